"""End-to-end private updating.

Databases map every stored message to a short public function of it (the
syndrome under an agreed code, or exact-one-flip parities, or the message
itself in naive mode). The user privately retrieves that image for the
desired index with a PIR plan and combines it with the outdated local copy.
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass
from math import comb
from typing import Literal, Optional, Protocol, Sequence, Union

import numpy as np

from .codes import CodeSpec, LinearCode, certified, code_for, dump_code, identity_code, signature_code
from .gf2 import BitWord, hamming_distance
from .pir.bounds import BoundsReport, bounds
from .pir.scheme import AnswerSet, Combination, PirParams, Randomness, build_plan, cost, plan_query, reconstruct
from .syndrome import DecodeFailure, Syndrome, syndrome_of, update_decode

Mode = Literal["bounded_f", "exact_one_flip", "naive"]
MODES: tuple[str, ...] = ("bounded_f", "exact_one_flip", "naive")

LIBRARY_MAGIC = b"PULB"
LIBRARY_VERSION = 1


class ConfigMismatch(RuntimeError):
    """A database advertised a different configuration digest."""


@dataclass(frozen=True)
class SystemConfig:
    N: int
    K: int
    L: int
    f: int
    mode: Mode = "bounded_f"
    code_spec: Optional[CodeSpec] = None
    seed: int = 0

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.N < 2 or self.K < 2:
            raise ValueError("need N >= 2 and K >= 2")
        if not 0 <= self.f <= self.L:
            raise ValueError(f"need 0 <= f <= L, got f={self.f}, L={self.L}")
        if self.mode == "exact_one_flip" and self.f != 1:
            raise ValueError("exact_one_flip mode needs f = 1")
        if self.code_spec is None:
            object.__setattr__(self, "code_spec", CodeSpec(self.L, self.f))
        elif (self.code_spec.L, self.code_spec.f) != (self.L, self.f):
            raise ValueError("code_spec does not match (L, f)")


@dataclass(frozen=True)
class MessageLibrary:
    messages: tuple[BitWord, ...]

    def __post_init__(self):
        if not self.messages:
            raise ValueError("empty library")
        if len({m.length for m in self.messages}) != 1:
            raise ValueError("messages must all have the same length")

    @property
    def K(self) -> int:
        return len(self.messages)

    @property
    def L(self) -> int:
        return self.messages[0].length

    def __getitem__(self, theta: int) -> BitWord:
        return self.messages[theta - 1]

    def __iter__(self):
        return iter(self.messages)

    def __len__(self) -> int:
        return len(self.messages)


@dataclass(frozen=True)
class UpdateInstance:
    theta: int
    outdated: BitWord
    f: int


@dataclass(frozen=True)
class UpdateReport:
    updated: BitWord
    flip_set: frozenset[int]
    bits_downloaded: int
    bounds: BoundsReport

    @property
    def met_upper_bound(self) -> bool:
        return self.bits_downloaded <= self.bounds.upper


class Transport(Protocol):
    N: int

    def hello(self, digest: bytes) -> None: ...

    def query(self, per_db_queries: Sequence[Sequence[Combination]]) -> AnswerSet: ...


def config_code(config: SystemConfig) -> LinearCode:
    """The public map databases apply to every message, as a parity-check matrix."""
    if config.mode == "naive":
        return identity_code(config.L)
    if config.mode == "exact_one_flip":
        return signature_code(config.L)
    return code_for(config.code_spec)


def config_digest(config: SystemConfig, code: LinearCode) -> bytes:
    """SHA-256 over ``(N, K, L, f, mode)`` and the code file bytes."""
    h = hashlib.sha256()
    h.update(struct.pack(">4sIIII", b"PUCF", config.N, config.K, config.L, config.f))
    h.update(config.mode.encode() + b"\0")
    h.update(dump_code(code))
    return h.digest()


def db_prepare(config: SystemConfig, library: MessageLibrary, code: Optional[LinearCode] = None) -> list[BitWord]:
    """Map each message to its syndrome under the configured code."""
    if library.K != config.K or library.L != config.L:
        raise ValueError(f"library is K={library.K}, L={library.L}; config wants K={config.K}, L={config.L}")
    code = code or config_code(config)
    if code.n != config.L:
        raise ValueError("code length does not match L")
    return [syndrome_of(code, w).bits for w in library]


def _retrieve(
    config: SystemConfig, code: LinearCode, theta: int, transport: Transport, randomness: Optional[Randomness] = None
) -> tuple[BitWord, int]:
    ell = code.r
    if ell == 0:
        return BitWord(0), 0
    if transport.N != config.N:
        raise ValueError(f"transport reaches {transport.N} databases, config has N={config.N}")
    transport.hello(config_digest(config, code))
    params = PirParams(config.N, config.K, ell)
    if randomness is None:
        plan = plan_query(params, theta, config.seed)
    else:
        plan = build_plan(params, theta, randomness)
    answers = transport.query(plan.per_db_queries)
    return reconstruct(plan, answers), cost(plan)


def _check_instance(config: SystemConfig, instance: UpdateInstance) -> None:
    if not 1 <= instance.theta <= config.K:
        raise ValueError(f"theta {instance.theta} outside 1..{config.K}")
    if instance.outdated.length != config.L:
        raise ValueError(f"outdated word has {instance.outdated.length} bits, config L={config.L}")


def client_update(
    config: SystemConfig,
    instance: UpdateInstance,
    transport: Transport,
    code: Optional[LinearCode] = None,
    randomness: Optional[Randomness] = None,
) -> UpdateReport:
    """Privately bring ``instance.outdated`` up to date; dispatches on ``config.mode``.

    ``randomness`` overrides the plan drawn from ``config.seed``; tests use it
    to walk every permutation and coefficient draw.
    """
    if config.mode == "exact_one_flip":
        return exact_one_flip_update(config, instance, transport, randomness)
    if config.mode == "naive":
        return naive_update(config, instance, transport, randomness)
    _check_instance(config, instance)
    code = code or config_code(config)
    f = instance.f
    if code.certified_distance < 2 * f + 1:
        code = certified(code, 2 * f + 1)
    s, bits = _retrieve(config, code, instance.theta, transport, randomness)
    result = update_decode(code, instance.outdated, Syndrome(s, code.code_id), f)
    return UpdateReport(result.updated, result.flip_set, bits, bounds(config.N, config.K, config.L, config.f))


def exact_one_flip_update(
    config: SystemConfig, instance: UpdateInstance, transport: Transport, randomness: Optional[Randomness] = None
) -> UpdateReport:
    """Locate the single flipped bit from ``ceil(log2 L)`` retrieved parities.

    The difference between retrieved and local parities spells ``L - j`` in
    binary for a flip at ``j``; an all-equal difference means position ``L``.
    """
    _check_instance(config, instance)
    code = signature_code(config.L)
    retrieved, bits = _retrieve(config, code, instance.theta, transport, randomness)
    diff = retrieved ^ syndrome_of(code, instance.outdated).bits
    value = 0
    for b in diff:
        value = (value << 1) | b
    j = config.L - value
    if not 1 <= j <= config.L:
        raise DecodeFailure(f"signature {diff} names no position (exactly one flip assumed)")
    return UpdateReport(instance.outdated.flip(j), frozenset({j}), bits, bounds(config.N, config.K, config.L, config.f))


def naive_update(
    config: SystemConfig, instance: UpdateInstance, transport: Transport, randomness: Optional[Randomness] = None
) -> UpdateReport:
    """Ignore the outdated copy and retrieve the whole message."""
    _check_instance(config, instance)
    fresh, bits = _retrieve(config, identity_code(config.L), instance.theta, transport, randomness)
    flips = (fresh ^ instance.outdated).positions()
    return UpdateReport(fresh, flips, bits, bounds(config.N, config.K, config.L, config.f))


@dataclass(frozen=True)
class SavingsReport:
    upper: int
    naive: int

    @property
    def saved(self) -> int:
        return self.naive - self.upper

    @property
    def strict(self) -> bool:
        return self.upper < self.naive


def savings(config: SystemConfig) -> SavingsReport:
    b = bounds(config.N, config.K, config.L, config.f)
    return SavingsReport(b.upper, b.naive)


# -- random instances --------------------------------------------------------


def random_library(K: int, L: int, rng: Union[int, np.random.Generator, None] = None) -> MessageLibrary:
    rng = np.random.default_rng(rng)
    return MessageLibrary(tuple(BitWord.from_bits(int(b) for b in rng.integers(0, 2, L)) for _ in range(K)))


def random_flips(L: int, f: int, rng: np.random.Generator, exact: bool = False) -> BitWord:
    """A flip pattern uniform over words of weight ``<= f`` (or exactly ``f``)."""
    if exact:
        w = f
    else:
        weights = np.array([comb(L, i) for i in range(f + 1)], dtype=float)
        w = int(rng.choice(f + 1, p=weights / weights.sum()))
    return BitWord.from_positions(L, (int(p) + 1 for p in rng.choice(L, size=w, replace=False)))


def outdated_copy(current: BitWord, flips: BitWord) -> BitWord:
    return current ^ flips


# -- PULB file format --------------------------------------------------------


def dump_library(library: MessageLibrary) -> bytes:
    """``PULB`` v1: magic, version u8, K u32 BE, L u32 BE, messages packed MSB first."""
    out = [LIBRARY_MAGIC, struct.pack(">BII", LIBRARY_VERSION, library.K, library.L)]
    out.extend(m.to_bytes() for m in library)
    return b"".join(out)


def load_library(data: bytes) -> MessageLibrary:
    if data[:4] != LIBRARY_MAGIC:
        raise ValueError("not a PULB library file")
    if len(data) < 13:
        raise ValueError("truncated PULB header")
    version, K, L = struct.unpack(">BII", data[4:13])
    if version != LIBRARY_VERSION:
        raise ValueError(f"unsupported PULB version {version}")
    per = (L + 7) // 8
    body = data[13:]
    if len(body) != K * per:
        raise ValueError(f"expected {K * per} payload bytes, got {len(body)}")
    return MessageLibrary(tuple(BitWord.from_bytes(body[i * per:(i + 1) * per], L) for i in range(K)))


def check_distortion(current: BitWord, outdated: BitWord, f: int) -> bool:
    return hamming_distance(current, outdated) <= f
