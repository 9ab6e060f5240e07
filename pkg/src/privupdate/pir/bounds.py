"""Exact download-cost arithmetic for private updating.

Everything here is integer or rational arithmetic. The information content of
the flip pattern, ``log2(ball(L, f))``, is irrational in general, so the lower
bound is evaluated through the equivalent integer test ``2**(D*v) >= ball**u``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb


def _check_nk(N: int, K: int) -> None:
    if N < 2:
        raise ValueError(f"need N >= 2 databases, got {N}")
    if K < 1:
        raise ValueError(f"need K >= 1 messages, got {K}")


def capacity(N: int, K: int) -> Fraction:
    """PIR capacity ``(1 + 1/N + ... + 1/N**(K-1))**-1`` as a reduced fraction."""
    _check_nk(N, K)
    return Fraction(N ** (K - 1) * (N - 1), N**K - 1)


def ball(L: int, f: int) -> int:
    """Number of flip patterns of weight at most ``f`` on ``L`` bits."""
    if not 0 <= f <= L:
        raise ValueError(f"need 0 <= f <= L, got f={f}, L={L}")
    return sum(comb(L, i) for i in range(f + 1))


def ceil_log2(x: int) -> int:
    """Smallest ``t >= 0`` with ``2**t >= x`` (``x >= 1``)."""
    if x < 1:
        raise ValueError("ceil_log2 needs a positive integer")
    return (x - 1).bit_length()


def lbar_ceil(L: int, f: int) -> int:
    """Syndrome length: the ceiling of ``log2(ball(L, f))``."""
    return ceil_log2(ball(L, f))


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


def cost_ratio(N: int, K: int) -> tuple[int, int]:
    """``(u, v)`` with ``1/C == u/v``: ``u = N**K - 1``, ``v = N**K - N**(K-1)``."""
    _check_nk(N, K)
    return N**K - 1, N**K - N ** (K - 1)


def pir_cost(ell: int, N: int, K: int) -> int:
    """Optimal PIR download cost ``ceil(ell / C)`` for an ``ell``-bit message."""
    u, v = cost_ratio(N, K)
    return _ceil_div(ell * u, v)


@dataclass(frozen=True)
class BoundsReport:
    L: int
    f: int
    N: int
    K: int
    ball: int
    lbar_ceil: int
    lower: int
    upper: int
    naive: int

    @property
    def gap(self) -> int:
        return self.upper - self.lower

    @property
    def perfect(self) -> bool:
        """True when the ball size is a power of two (integer entropy)."""
        return self.ball & (self.ball - 1) == 0

    @property
    def savings(self) -> int:
        return self.naive - self.upper


def bounds(N: int, K: int, L: int, f: int) -> BoundsReport:
    u, v = cost_ratio(N, K)
    b = ball(L, f)
    # min D with 2**(D*v) >= b**u  <=>  D*v >= ceil_log2(b**u)
    lower = _ceil_div(ceil_log2(b**u), v)
    lc = ceil_log2(b)
    return BoundsReport(
        L=L,
        f=f,
        N=N,
        K=K,
        ball=b,
        lbar_ceil=lc,
        lower=lower,
        upper=_ceil_div(lc * u, v),
        naive=_ceil_div(L * u, v),
    )
