"""Binary wire format between the client and each database.

Every message travels in a frame: a big-endian u32 length followed by the
payload. Requests are ``[version u8 = 1][opcode u8][body]``:

* HELLO (1): the 32-byte configuration digest.
* QUERY (2): ``[combination count u16]`` then per combination
  ``[term count u16]`` and per term ``[message u8][symbol u32][coefficient u8]``.

Responses are ``[status u8]``; an OK answer to QUERY continues with
``[bit count u16]`` and the answer bits packed most significant bit first.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from enum import IntEnum
from typing import BinaryIO, Optional, Union

from ..gf2 import BitWord
from ..pir.scheme import Combination

VERSION = 1
DIGEST_LEN = 32
MAX_FRAME = 1 << 20


class Opcode(IntEnum):
    HELLO = 1
    QUERY = 2


class Status(IntEnum):
    OK = 0
    BAD_VERSION = 1
    BAD_OPCODE = 2
    MALFORMED = 3
    DIGEST_MISMATCH = 4
    OUT_OF_RANGE = 5
    FRAME_TOO_LARGE = 6


class WireError(ValueError):
    def __init__(self, status: Status, message: str = ""):
        self.status = status
        super().__init__(f"{status.name}: {message}" if message else status.name)


@dataclass(frozen=True)
class Hello:
    digest: bytes


@dataclass(frozen=True)
class Query:
    combinations: tuple[Combination, ...]


Request = Union[Hello, Query]


@dataclass(frozen=True)
class Response:
    status: Status
    bits: Optional[tuple[int, ...]] = None

    @property
    def ok(self) -> bool:
        return self.status == Status.OK


def encode_request(req: Request) -> bytes:
    if isinstance(req, Hello):
        if len(req.digest) != DIGEST_LEN:
            raise ValueError(f"digest must be {DIGEST_LEN} bytes")
        return bytes([VERSION, Opcode.HELLO]) + req.digest
    out = [bytes([VERSION, Opcode.QUERY]), struct.pack(">H", len(req.combinations))]
    for combo in req.combinations:
        out.append(struct.pack(">H", len(combo.terms)))
        for m, s, c in combo.terms:
            out.append(struct.pack(">BIB", m, s, c))
    return b"".join(out)


def decode_request(payload: bytes) -> Request:
    if len(payload) < 2:
        raise WireError(Status.MALFORMED, "short request")
    if payload[0] != VERSION:
        raise WireError(Status.BAD_VERSION, f"version {payload[0]}")
    op, body = payload[1], payload[2:]
    if op == Opcode.HELLO:
        if len(body) != DIGEST_LEN:
            raise WireError(Status.MALFORMED, "HELLO body must be a 32-byte digest")
        return Hello(bytes(body))
    if op != Opcode.QUERY:
        raise WireError(Status.BAD_OPCODE, f"opcode {op}")
    try:
        (count,) = struct.unpack_from(">H", body, 0)
        pos = 2
        combos = []
        for _ in range(count):
            (nterms,) = struct.unpack_from(">H", body, pos)
            pos += 2
            terms = []
            for _ in range(nterms):
                terms.append(struct.unpack_from(">BIB", body, pos))
                pos += 6
            combos.append(Combination(tuple(terms)))
    except struct.error as exc:
        raise WireError(Status.MALFORMED, "truncated QUERY") from exc
    except ValueError as exc:
        raise WireError(Status.MALFORMED, str(exc)) from exc
    if pos != len(body):
        raise WireError(Status.MALFORMED, "trailing bytes after QUERY")
    return Query(tuple(combos))


def encode_response(resp: Response) -> bytes:
    head = bytes([resp.status])
    if resp.bits is None:
        return head
    return head + struct.pack(">H", len(resp.bits)) + BitWord.from_bits(resp.bits).to_bytes()


def decode_response(payload: bytes) -> Response:
    if not payload:
        raise WireError(Status.MALFORMED, "empty response")
    try:
        status = Status(payload[0])
    except ValueError as exc:
        raise WireError(Status.MALFORMED, f"unknown status {payload[0]}") from exc
    if len(payload) == 1:
        return Response(status)
    if len(payload) < 3:
        raise WireError(Status.MALFORMED, "truncated bit count")
    (count,) = struct.unpack_from(">H", payload, 1)
    try:
        word = BitWord.from_bytes(payload[3:], count)
    except ValueError as exc:
        raise WireError(Status.MALFORMED, str(exc)) from exc
    return Response(status, tuple(word))


def frame(payload: bytes, max_size: int = MAX_FRAME) -> bytes:
    if len(payload) > max_size:
        raise WireError(Status.FRAME_TOO_LARGE, f"{len(payload)} > {max_size}")
    return struct.pack(">I", len(payload)) + payload


def _read_exact(stream: BinaryIO, n: int) -> Optional[bytes]:
    buf = b""
    while len(buf) < n:
        chunk = stream.read(n - len(buf))
        if not chunk:
            if buf:
                raise ConnectionError("connection closed mid-frame")
            return None
        buf += chunk
    return buf


def read_frame(stream: BinaryIO, max_size: int = MAX_FRAME) -> Optional[bytes]:
    """Next payload, or ``None`` on a clean end of stream."""
    head = _read_exact(stream, 4)
    if head is None:
        return None
    (size,) = struct.unpack(">I", head)
    if size > max_size:
        raise WireError(Status.FRAME_TOO_LARGE, f"{size} > {max_size}")
    if size == 0:
        return b""
    body = _read_exact(stream, size)
    if body is None:
        raise ConnectionError("connection closed mid-frame")
    return body
