"""Syndrome compression and coset-leader update decoding.

The user holds an outdated word ``w_hat`` and retrieves the syndrome ``s`` of
the current word ``w``. Since ``(w_hat ^ w) H^T = s_hat ^ s`` with
``s_hat = w_hat H^T``, the flip pattern is the unique word of weight at most
``f`` in the coset labelled ``s ^ s_hat``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

from .codes import LinearCode
from .gf2 import BitWord, enumerate_weight_at_most
from .pir.bounds import ball

LEADER_TABLE_MAX_R = 20
LEADER_TABLE_MAX_ENTRIES = 1 << 20


class DecodeFailure(ValueError):
    """No flip pattern of weight ``<= f`` explains the syndrome difference."""


@dataclass(frozen=True)
class Syndrome:
    bits: BitWord
    code_id: str


@dataclass(frozen=True)
class DecodeResult:
    updated: BitWord
    flip_set: frozenset[int]

    @property
    def flip_count(self) -> int:
        return len(self.flip_set)


def syndrome_of(code: LinearCode, w: BitWord) -> Syndrome:
    if w.length != code.n:
        raise ValueError(f"word length {w.length} does not match code length {code.n}")
    return Syndrome(BitWord(code.r, code.syndrome_value(w.value)), code.code_id)


def _check(code: LinearCode, s: Syndrome) -> None:
    if s.bits.length != code.r:
        raise ValueError(f"syndrome length {s.bits.length} does not match r={code.r}")
    if s.code_id != code.code_id:
        raise ValueError("syndrome belongs to a different code")


@lru_cache(maxsize=64)
def leader_table(code: LinearCode, wmax: int) -> dict[int, int]:
    """Syndrome value -> first word of weight ``<= wmax`` in enumeration order."""
    table: dict[int, int] = {}
    for e in enumerate_weight_at_most(code.n, wmax):
        table.setdefault(code.syndrome_value(e.value), e.value)
    return table


def _use_table(code: LinearCode, wmax: int) -> bool:
    return code.r <= LEADER_TABLE_MAX_R and ball(code.n, wmax) <= LEADER_TABLE_MAX_ENTRIES


def coset_leader(code: LinearCode, s: Syndrome, wmax: int, use_table: Optional[bool] = None) -> Optional[BitWord]:
    """The first word of weight ``<= wmax`` with syndrome ``s``, or ``None``.

    With ``certified_distance >= 2 * wmax + 1`` that word is unique. The table
    path and the scan path give identical answers.
    """
    _check(code, s)
    if use_table is None:
        use_table = _use_table(code, wmax)
    target = s.bits.value
    if use_table:
        e = leader_table(code, wmax).get(target)
        return None if e is None else BitWord(code.n, e)
    for e in enumerate_weight_at_most(code.n, wmax):
        if code.syndrome_value(e.value) == target:
            return e
    return None


def update_decode(code: LinearCode, outdated: BitWord, s: Syndrome, f: int) -> DecodeResult:
    if outdated.length != code.n:
        raise ValueError(f"outdated length {outdated.length} does not match code length {code.n}")
    if code.certified_distance < 2 * f + 1:
        raise ValueError(f"code certified to distance {code.certified_distance}, need {2 * f + 1}")
    _check(code, s)
    relative = Syndrome(s.bits ^ syndrome_of(code, outdated).bits, code.code_id)
    e = coset_leader(code, relative, f)
    if e is None:
        raise DecodeFailure(f"no flip pattern of weight <= {f} matches syndrome difference {relative.bits}")
    return DecodeResult(outdated ^ e, e.positions())
