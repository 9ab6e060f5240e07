"""Query planning, answering and reconstruction for replicated-database PIR.

A plan retrieves an ``ell``-bit message out of ``K`` from ``N`` databases. The
message is cut into blocks of ``N**(K-1)`` symbols, each fetched by the
non-symmetric capacity-achieving block scheme at a cost of
``(N**K - 1) / (N - 1)`` bits, and the leftover symbols are fetched one at a
time by the two-database random-combination scheme at a cost of 2 bits each.

Randomness is one uniform permutation of the symbols of every message plus
one coefficient vector per leftover symbol. Given that randomness a plan is a
pure function of ``(N, K, ell, theta)``; message contents never enter it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Optional, Sequence, Union

import numpy as np

from ..gf2 import BitWord

Term = tuple[int, int, int]  # (message 1..K, wire symbol 1..ell, coefficient)
Ref = tuple[int, int]  # (database 1..N, answer position 1..len)


class UnsupportedParameters(ValueError):
    pass


@dataclass(frozen=True)
class PirParams:
    N: int
    K: int
    ell: int

    def __post_init__(self):
        if self.N < 2:
            raise ValueError(f"need N >= 2 databases, got {self.N}")
        if self.K < 2:
            raise ValueError(f"need K >= 2 messages, got {self.K}")
        if self.ell < 0:
            raise ValueError(f"need ell >= 0, got {self.ell}")
        if self.K > 255:
            raise ValueError("at most 255 messages fit the wire format")

    @property
    def block_len(self) -> int:
        return self.N ** (self.K - 1)

    @property
    def block_cost(self) -> int:
        return (self.N**self.K - 1) // (self.N - 1)

    def split(self) -> tuple[int, int]:
        """``(q, r)`` with ``ell = q * N**(K-1) + r``."""
        return divmod(self.ell, self.block_len)


@dataclass(frozen=True, order=True)
class Combination:
    """A GF(2) linear combination of stored symbols, terms in canonical order."""

    terms: tuple[Term, ...]

    def __post_init__(self):
        if list(self.terms) != sorted(self.terms):
            raise ValueError("terms must be sorted by (message, symbol)")
        keys = [(m, s) for m, s, _ in self.terms]
        if len(set(keys)) != len(keys):
            raise ValueError("duplicate (message, symbol) term")
        if any(c not in (0, 1) for _, _, c in self.terms):
            raise ValueError("coefficients must be 0 or 1")

    @classmethod
    def of(cls, terms) -> "Combination":
        return cls(tuple(sorted((int(m), int(s), int(c)) for m, s, c in terms)))

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(
            f"{'' if c else '0*'}w{m}[{s}]" for m, s, c in self.terms
        )


@dataclass(frozen=True)
class Randomness:
    """``permutations[k-1][j-1]`` is the wire index of virtual symbol ``j`` of message ``k``."""

    permutations: tuple[tuple[int, ...], ...]
    extra_coeffs: tuple[tuple[int, ...], ...] = ()

    @classmethod
    def identity(cls, params: PirParams, extra_coeffs=None) -> "Randomness":
        _, r = params.split()
        perms = tuple(tuple(range(1, params.ell + 1)) for _ in range(params.K))
        if extra_coeffs is None:
            extra_coeffs = tuple((0,) * params.K for _ in range(r))
        return cls(perms, tuple(tuple(h) for h in extra_coeffs))


@dataclass(frozen=True)
class SubPlan:
    """Queries for one block or leftover symbol, with answer positions local to it."""

    per_db_queries: tuple[tuple[Combination, ...], ...]
    decode: dict[int, tuple[Ref, ...]] = field(compare=False)


@dataclass(frozen=True)
class QueryPlan:
    params: PirParams
    theta: int
    per_db_queries: tuple[tuple[Combination, ...], ...]
    decode_plan: tuple[tuple[Ref, ...], ...]
    randomness: Randomness

    def queries_for(self, n: int) -> tuple[Combination, ...]:
        return self.per_db_queries[n - 1]


@dataclass(frozen=True)
class AnswerSet:
    per_db_answers: tuple[tuple[int, ...], ...]


def draw_randomness(params: PirParams, rng: Union[int, np.random.Generator, None]) -> Randomness:
    """Uniform symbol permutations and leftover coefficient vectors.

    An integer seed goes through ``numpy.random.default_rng`` (PCG64), so a
    recorded seed replays the identical plan.
    """
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    perms = tuple(tuple(int(x) + 1 for x in rng.permutation(params.ell)) for _ in range(params.K))
    _, r = params.split()
    coeffs = tuple(tuple(int(x) for x in rng.integers(0, 2, size=params.K)) for _ in range(r))
    return Randomness(perms, coeffs)


def _stage_counts(N: int, K: int) -> list[tuple[int, int]]:
    """Per stage ``k`` (sums of ``k`` messages): sums per subset at DB 1 and at each other DB.

    DB 1 opens with one single of every message. After that each database
    takes, for every subset, as many sums as there are side-information sums
    of the previous stage at the other databases.
    """
    counts = [(1, 0)]
    for _ in range(2, K + 1):
        a, b = counts[-1]
        counts.append(((N - 1) * b, a + (N - 2) * b))
    return counts


def plan_block(
    params: PirParams, theta: int, randomness: Randomness, block_index: int
) -> SubPlan:
    """Retrieve virtual symbols ``block_index * N**(K-1) + 1 ..`` of message ``theta``.

    Every k-subset ``S`` of messages gets the same number of k-sums at a given
    database. A sum over ``S`` not containing ``theta`` uses fresh symbols and
    serves as side information; a sum over ``S`` containing ``theta`` adds one
    fresh desired symbol to a side-information sum over ``S - {theta}``
    downloaded from a different database. Per database, every message symbol
    appears at most once, so after the random permutations each database sees
    the same distribution of queries whatever ``theta`` is.
    """
    N, K = params.N, params.K
    counts = _stage_counts(N, K)
    des_next = block_index * params.block_len
    und_next = {k: block_index * N ** (K - 2) for k in range(1, K + 1) if k != theta}
    perms = randomness.permutations

    def wire(k: int, virtual: int) -> int:
        return perms[k - 1][virtual - 1]

    queries: list[list[Combination]] = [[] for _ in range(N)]
    decode: dict[int, tuple[Ref, ...]] = {}
    # (subset) -> list of (db, position, virtual symbols by message)
    side: dict[tuple[int, ...], list[tuple[int, int, dict[int, int]]]] = {}
    for size, (at_first, at_other) in enumerate(counts, start=1):
        for n in range(1, N + 1):
            reps = at_first if n == 1 else at_other
            for subset in combinations(range(1, K + 1), size):
                for rep in range(reps):
                    if theta not in subset:
                        virt = {}
                        for k in subset:
                            und_next[k] += 1
                            virt[k] = und_next[k]
                        queries[n - 1].append(Combination.of((k, wire(k, v), 1) for k, v in virt.items()))
                        side.setdefault(subset, []).append((n, len(queries[n - 1]), virt))
                        continue
                    des_next += 1
                    rest = tuple(k for k in subset if k != theta)
                    terms = [(theta, wire(theta, des_next), 1)]
                    refs: list[Ref] = []
                    if rest:
                        pool = [entry for entry in side[rest] if entry[0] != n]
                        src_db, src_pos, virt = pool[rep]
                        terms += [(k, wire(k, v), 1) for k, v in virt.items()]
                        refs.append((src_db, src_pos))
                    queries[n - 1].append(Combination.of(terms))
                    decode[des_next] = ((n, len(queries[n - 1])),) + tuple(refs)
    return SubPlan(tuple(tuple(q) for q in queries), decode)


def plan_extra_bit(
    params: PirParams, theta: int, randomness: Randomness, symbol_index: int
) -> SubPlan:
    """Retrieve one leftover symbol with two random combinations.

    DB 1 gets ``sum_k h_k * x_k`` and DB 2 gets the same with ``h + e_theta``;
    the XOR of the two answers is the desired symbol. Zero coefficients are
    still sent so the query shape does not depend on ``theta``.
    """
    N, K = params.N, params.K
    q, r = params.split()
    if not 1 <= symbol_index <= r:
        raise ValueError(f"leftover symbol index {symbol_index} outside 1..{r}")
    h = randomness.extra_coeffs[symbol_index - 1]
    # the same virtual index for every message; blocks never reach it
    virt = {k: q * params.block_len + symbol_index for k in range(1, K + 1)}
    wire = {k: randomness.permutations[k - 1][v - 1] for k, v in virt.items()}
    first = Combination.of((k, wire[k], h[k - 1]) for k in range(1, K + 1))
    second = Combination.of((k, wire[k], h[k - 1] ^ (k == theta)) for k in range(1, K + 1))
    queries = [(first,), (second,)] + [()] * (N - 2)
    return SubPlan(tuple(queries), {virt[theta]: ((1, 1), (2, 1))})


def _assemble(params: PirParams, theta: int, randomness: Randomness, parts: Sequence[SubPlan]) -> QueryPlan:
    queries: list[list[Combination]] = [[] for _ in range(params.N)]
    decode: dict[int, tuple[Ref, ...]] = {}
    for part in parts:
        offsets = [len(q) for q in queries]
        for n, qs in enumerate(part.per_db_queries):
            queries[n].extend(qs)
        for sym, refs in part.decode.items():
            decode[sym] = tuple((db, pos + offsets[db - 1]) for db, pos in refs)
    if sorted(decode) != list(range(1, params.ell + 1)):
        raise AssertionError("decode plan does not cover every symbol exactly once")
    return QueryPlan(
        params,
        theta,
        tuple(tuple(q) for q in queries),
        tuple(decode[j] for j in range(1, params.ell + 1)),
        randomness,
    )


def build_plan(params: PirParams, theta: int, randomness: Randomness) -> QueryPlan:
    """The plan for fixed randomness; ``plan_query`` draws the randomness first."""
    if not 1 <= theta <= params.K:
        raise ValueError(f"theta {theta} outside 1..{params.K}")
    _check_randomness(params, randomness)
    q, r = params.split()
    parts = [plan_block(params, theta, randomness, b) for b in range(q)]
    parts += [plan_extra_bit(params, theta, randomness, i) for i in range(1, r + 1)]
    return _assemble(params, theta, randomness, parts)


def _check_randomness(params: PirParams, randomness: Randomness) -> None:
    if len(randomness.permutations) != params.K:
        raise ValueError("need one permutation per message")
    for p in randomness.permutations:
        if sorted(p) != list(range(1, params.ell + 1)):
            raise ValueError("permutation is not a permutation of 1..ell")
    _, r = params.split()
    if len(randomness.extra_coeffs) != r or any(len(h) != params.K for h in randomness.extra_coeffs):
        raise ValueError(f"need {r} coefficient vectors of length {params.K}")


def plan_query(
    params: PirParams, theta: int, rng: Union[int, np.random.Generator, None] = None
) -> QueryPlan:
    return build_plan(params, theta, draw_randomness(params, rng))


Scheme = Callable[[PirParams, int, Randomness], QueryPlan]


def answer(queries: Sequence[Combination], library: Sequence[BitWord]) -> tuple[int, ...]:
    """Evaluate each combination over the stored words (a database's whole job)."""
    out = []
    for combo in queries:
        bit = 0
        for m, s, c in combo.terms:
            if not 1 <= m <= len(library):
                raise IndexError(f"message index {m} outside 1..{len(library)}")
            bit ^= c & library[m - 1][s]
        out.append(bit)
    return tuple(out)


def answer_all(plan: QueryPlan, library: Sequence[BitWord]) -> AnswerSet:
    return AnswerSet(tuple(answer(q, library) for q in plan.per_db_queries))


def reconstruct(plan: QueryPlan, answers: AnswerSet) -> BitWord:
    """Recover the desired message in logical order from all databases' answers."""
    got = answers.per_db_answers
    if len(got) != plan.params.N or any(len(a) != len(q) for a, q in zip(got, plan.per_db_queries)):
        raise ValueError("answers do not match the plan's shape")
    perm = plan.randomness.permutations[plan.theta - 1]
    by_wire = {}
    for j, refs in enumerate(plan.decode_plan, start=1):
        bit = 0
        for db, pos in refs:
            bit ^= got[db - 1][pos - 1]
        by_wire[perm[j - 1]] = bit
    return BitWord.from_bits(by_wire[i] for i in range(1, plan.params.ell + 1))


def cost(plan: QueryPlan) -> int:
    """Downloaded bits: one per combination sent."""
    return sum(len(q) for q in plan.per_db_queries)


def expected_cost(params: PirParams) -> int:
    q, r = params.split()
    return q * params.block_cost + 2 * r
