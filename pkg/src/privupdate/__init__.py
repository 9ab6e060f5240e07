"""Private updating of replicated messages.

A user with an outdated copy of one of K messages stored on N
non-colluding databases downloads only the syndrome of the current
message, privately, and corrects at most f flipped bits locally.
"""

from .codes import CodeConstructionError, CodeSpec, LinearCode, code_for
from .gf2 import BitMatrix, BitWord
from .pir.bounds import BoundsReport, bounds
from .protocol import (
    ConfigMismatch,
    MessageLibrary,
    SystemConfig,
    UpdateInstance,
    UpdateReport,
    client_update,
)
from .syndrome import DecodeFailure, syndrome_of, update_decode

__version__ = "0.1.0"

__all__ = [
    "BitMatrix",
    "BitWord",
    "BoundsReport",
    "CodeConstructionError",
    "CodeSpec",
    "ConfigMismatch",
    "DecodeFailure",
    "LinearCode",
    "MessageLibrary",
    "SystemConfig",
    "UpdateInstance",
    "UpdateReport",
    "bounds",
    "client_update",
    "code_for",
    "syndrome_of",
    "update_decode",
]
