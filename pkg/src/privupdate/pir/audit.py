"""Privacy auditing and brute-force correctness checks for PIR schemes.

A database's view is the ordered list of combinations it receives. The
auditor computes, for each database and each desired index, the distribution
of that view over the scheme's randomness, and reports the largest total
variation distance between two desired indices. Exhaustive mode enumerates
every permutation tuple and coefficient draw with exact rational weights.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations, product
from math import factorial
from typing import Iterable, Iterator, Literal, Optional, Sequence

import numpy as np

from ..gf2 import BitWord
from .scheme import (
    Combination,
    PirParams,
    QueryPlan,
    Randomness,
    Scheme,
    answer,
    answer_all,
    build_plan,
    draw_randomness,
    reconstruct,
)

EXHAUSTIVE_BUDGET = 500_000

View = tuple[Combination, ...]


class InfeasibleExhaustive(ValueError):
    pass


@dataclass
class AuditReport:
    params: PirParams
    mode: str
    configurations: int
    per_db_distance: list[Fraction]
    worst_pair: Optional[tuple[int, int, int]] = None  # (db, theta, theta')

    @property
    def max_distance(self) -> Fraction:
        return max(self.per_db_distance, default=Fraction(0))

    @property
    def private(self) -> bool:
        return self.max_distance == 0

    def lines(self) -> list[str]:
        out = [
            f"params N={self.params.N} K={self.params.K} ell={self.params.ell}",
            f"mode {self.mode}, configurations per theta: {self.configurations}",
        ]
        for n, d in enumerate(self.per_db_distance, start=1):
            out.append(f"db {n}: max TV distance {d} ({float(d):.6g})")
        out.append(f"max TV distance {self.max_distance}")
        return out


def total_variation(p: dict, q: dict) -> Fraction:
    keys = set(p) | set(q)
    return sum((abs(Fraction(p.get(k, 0)) - Fraction(q.get(k, 0))) for k in keys), Fraction(0)) / 2


def exhaustive_size(params: PirParams) -> int:
    _, r = params.split()
    return factorial(params.ell) ** params.K * 2 ** (params.K * r)


def all_randomness(params: PirParams) -> Iterator[Randomness]:
    _, r = params.split()
    perms = list(permutations(range(1, params.ell + 1)))
    coeffs = list(product((0, 1), repeat=params.K))
    for ps in product(perms, repeat=params.K):
        for hs in product(coeffs, repeat=r):
            yield Randomness(tuple(ps), tuple(hs))


def _distributions(
    params: PirParams, scheme: Scheme, randomness: Sequence[Randomness], key
) -> dict[int, list[dict]]:
    """theta -> per-database distribution of ``key(plan, n)`` with rational weights."""
    weight = Fraction(1, len(randomness))
    out = {}
    for theta in range(1, params.K + 1):
        counters = [Counter() for _ in range(params.N)]
        for rnd in randomness:
            plan = scheme(params, theta, rnd)
            for n in range(1, params.N + 1):
                counters[n - 1][key(plan, n)] += 1
        out[theta] = [{k: c * weight for k, c in ctr.items()} for ctr in counters]
    return out


def _compare(params: PirParams, dists: dict[int, list[dict]]) -> tuple[list[Fraction], Optional[tuple]]:
    per_db = [Fraction(0)] * params.N
    worst = None
    best = Fraction(-1)
    for n in range(params.N):
        for t1 in range(1, params.K + 1):
            for t2 in range(t1 + 1, params.K + 1):
                d = total_variation(dists[t1][n], dists[t2][n])
                per_db[n] = max(per_db[n], d)
                if d > best:
                    best, worst = d, (n + 1, t1, t2)
    return per_db, worst


def _view(plan: QueryPlan, n: int) -> View:
    return plan.per_db_queries[n - 1]


def audit_privacy(
    params: PirParams,
    scheme: Scheme = build_plan,
    mode: Literal["exhaustive", "montecarlo"] = "exhaustive",
    trials: int = 1000,
    seed: int = 0,
    budget: int = EXHAUSTIVE_BUDGET,
) -> AuditReport:
    """Largest per-database total variation distance between query views for two thetas.

    Exhaustive mode is exact and must report zero for a private scheme.
    Monte Carlo mode reports the empirical distance over ``trials`` seeded
    draws per theta; it is positive even for private schemes unless the
    view space is tiny, so it is a smoke test rather than a proof.
    """
    if mode == "exhaustive":
        size = exhaustive_size(params)
        if size > budget:
            raise InfeasibleExhaustive(f"{size} randomness configurations exceed budget {budget}")
        randomness = list(all_randomness(params))
    elif mode == "montecarlo":
        rng = np.random.default_rng(seed)
        randomness = [draw_randomness(params, rng) for _ in range(trials)]
    else:
        raise ValueError(f"unknown audit mode {mode!r}")
    dists = _distributions(params, scheme, randomness, _view)
    per_db, worst = _compare(params, dists)
    return AuditReport(params, mode, len(randomness), per_db, worst)


def audit_joint(
    params: PirParams, scheme: Scheme = build_plan, budget: int = EXHAUSTIVE_BUDGET
) -> AuditReport:
    """Exact audit of the pair (query, answer) at every database for every stored library.

    Libraries range over all ``2**(K*ell)`` choices of stored words; the
    distance reported is the worst over libraries.
    """
    size = exhaustive_size(params) * 2 ** (params.K * params.ell)
    if size > budget:
        raise InfeasibleExhaustive(f"{size} (randomness, library) pairs exceed budget {budget}")
    randomness = list(all_randomness(params))
    per_db = [Fraction(0)] * params.N
    worst = None
    for lib in all_libraries(params.K, params.ell):
        def key(plan: QueryPlan, n: int, lib=lib):
            return plan.per_db_queries[n - 1], answer(plan.per_db_queries[n - 1], lib)

        d, w = _compare(params, _distributions(params, scheme, randomness, key))
        for n in range(params.N):
            if d[n] > per_db[n]:
                per_db[n], worst = d[n], w
    return AuditReport(params, "joint", len(randomness), per_db, worst)


def all_libraries(K: int, ell: int) -> Iterator[tuple[BitWord, ...]]:
    for values in product(range(1 << ell), repeat=K):
        yield tuple(BitWord(ell, v) for v in values)


@dataclass
class VerifyReport:
    params: PirParams
    runs: int = 0
    failures: list[tuple[int, int, tuple[BitWord, ...]]] = field(default_factory=list)

    @property
    def passed(self) -> int:
        return self.runs - len(self.failures)

    @property
    def ok(self) -> bool:
        return self.runs > 0 and not self.failures


def verify_scheme(
    params: PirParams,
    scheme: Scheme = build_plan,
    seeds: Iterable[int] = range(8),
    libraries: Optional[Iterable[Sequence[BitWord]]] = None,
    samples: int = 64,
) -> VerifyReport:
    """Reconstruct every theta from every library for a sweep of seeded randomness.

    Libraries are exhaustive when ``K * ell <= 12``, otherwise ``samples``
    random libraries.
    """
    if libraries is None:
        if params.K * params.ell <= 12:
            libraries = list(all_libraries(params.K, params.ell))
        else:
            rng = np.random.default_rng(12345)
            libraries = [
                tuple(BitWord.from_bits(int(b) for b in rng.integers(0, 2, params.ell)) for _ in range(params.K))
                for _ in range(samples)
            ]
    libraries = list(libraries)
    report = VerifyReport(params)
    for seed in seeds:
        rnd = draw_randomness(params, seed)
        for theta in range(1, params.K + 1):
            plan = scheme(params, theta, rnd)
            for lib in libraries:
                report.runs += 1
                if reconstruct(plan, answer_all(plan, lib)) != lib[theta - 1]:
                    report.failures.append((seed, theta, tuple(lib)))
    return report


# -- negative controls ------------------------------------------------------


def leaky_extra_bit_plan(params: PirParams, theta: int, randomness: Randomness) -> QueryPlan:
    """Broken on purpose: DB 2 always puts coefficient 1 on the desired message."""
    plan = build_plan(params, theta, randomness)
    q, r = params.split()
    if r == 0:
        return plan
    db2 = list(plan.per_db_queries[1])
    for i in range(len(db2) - r, len(db2)):
        db2[i] = Combination.of((m, s, 1 if m == theta else c) for m, s, c in db2[i].terms)
    queries = list(plan.per_db_queries)
    queries[1] = tuple(db2)
    return QueryPlan(plan.params, theta, tuple(queries), plan.decode_plan, randomness)


def unpermuted_plan(params: PirParams, theta: int, randomness: Randomness) -> QueryPlan:
    """Broken on purpose: ignores the symbol permutations."""
    fixed = Randomness.identity(params, randomness.extra_coeffs)
    return build_plan(params, theta, fixed)


def corrupted_decode_plan(params: PirParams, theta: int, randomness: Randomness) -> QueryPlan:
    """Broken on purpose: drops the side-information reference of every symbol."""
    plan = build_plan(params, theta, randomness)
    decode = tuple(refs[:1] for refs in plan.decode_plan)
    return QueryPlan(plan.params, theta, plan.per_db_queries, decode, randomness)
