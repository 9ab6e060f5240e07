"""Binary linear block codes that correct ``f`` flips with ``ceil(log2 ball)`` parity bits.

Codes are described by their parity-check matrix ``H``. The syndrome of a word
``w`` is ``w H^T``; the code corrects ``f`` flips iff every nonzero word of
weight at most ``2f`` has a nonzero syndrome, i.e. any ``2f`` columns of ``H``
are linearly independent.
"""

from __future__ import annotations

import hashlib
import itertools
import struct
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Literal, Optional

import numpy as np

from .gf2 import BitMatrix, BitWord, nullspace
from .pir.bounds import ball, lbar_ceil

Construction = Literal["repetition", "paper_example", "gv_greedy"]

CODE_MAGIC = b"PUCD"
CODE_VERSION = 1
RESTART_BUDGET = 1000
SEARCH_NODE_BUDGET = 200_000


class CodeConstructionError(RuntimeError):
    """No parity-check matrix was produced.

    ``reason`` is ``"infeasible"`` when no such code exists (proved by a
    counting bound or by exhausting the search space) and ``"budget"`` when
    the restart and search budgets ran out without a verdict.
    """

    def __init__(self, reason: str, L: int, r: int, d: int, detail: str = ""):
        self.reason = reason
        self.L, self.r, self.d = L, r, d
        self.detail = detail
        super().__init__(f"[{L}, {L - r}, {d}] code: {reason}" + (f" ({detail})" if detail else ""))


@dataclass(frozen=True)
class LinearCode:
    n: int
    k: int
    parity_check: BitMatrix
    generator: Optional[BitMatrix] = field(default=None, compare=False)
    certified_distance: int = field(default=1, compare=False)
    name: str = field(default="", compare=False)

    def __post_init__(self):
        if self.parity_check.ncols != self.n or self.parity_check.nrows != self.n - self.k:
            raise ValueError(
                f"parity check is {self.parity_check.nrows}x{self.parity_check.ncols}, "
                f"expected {self.n - self.k}x{self.n}"
            )

    @property
    def r(self) -> int:
        return self.n - self.k

    @cached_property
    def columns(self) -> tuple[int, ...]:
        return tuple(self.parity_check.column_values())

    @cached_property
    def code_id(self) -> str:
        return hashlib.sha256(dump_code(self)).hexdigest()[:16]

    def syndrome_value(self, word_value: int) -> int:
        s = 0
        cols = self.columns
        j = 0
        while word_value:
            if word_value & 1:
                s ^= cols[j]
            word_value >>= 1
            j += 1
        return s


@dataclass(frozen=True)
class CodeSpec:
    L: int
    f: int
    construction: Construction = "gv_greedy"
    seed: int = 0

    def __post_init__(self):
        if not 0 <= self.f <= self.L:
            raise ValueError(f"need 0 <= f <= L, got f={self.f}, L={self.L}")


def _with_generator(code: LinearCode) -> LinearCode:
    basis = nullspace(code.parity_check)
    gen = BitMatrix(len(basis), code.n, tuple(w.value for w in basis)) if basis else None
    return replace(code, generator=gen)


def repetition_code(n: int) -> LinearCode:
    """The ``[n, 1, n]`` repetition code; row ``i`` of ``H`` is ``e_1 + e_{i+1}``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    H = BitMatrix(n - 1, n, tuple(1 | (1 << i) for i in range(1, n)))
    G = BitMatrix(1, n, ((1 << n) - 1,))
    return LinearCode(n, 1, H, G, certified_distance=n, name=f"repetition[{n},1,{n}]")


PRINTED_G_523 = ((1, 0, 1, 1, 1), (0, 1, 1, 1, 0))


def paper_example_523() -> LinearCode:
    """The ``[5, 2, 3]`` code used for ``L = 5, f = 1``.

    ``H`` is the reference matrix. The reference generator
    (``PRINTED_G_523``) is not orthogonal to it, so ``G`` here is the basis
    of the null space of ``H``; it differs only in the last column.
    """
    G = BitMatrix.from_rows([[1, 0, 1, 1, 0], [0, 1, 1, 1, 1]])
    H = BitMatrix.from_rows([[1, 1, 1, 0, 0], [1, 1, 0, 1, 0], [0, 1, 0, 0, 1]])
    return LinearCode(5, 2, H, G, certified_distance=3, name="example[5,2,3]")


def identity_code(n: int) -> LinearCode:
    """``H = I_n``: the syndrome is the word itself and no word but zero is a codeword."""
    return LinearCode(n, 0, BitMatrix.identity(n), None, certified_distance=n + 1, name=f"identity[{n}]")


def trivial_code(n: int) -> LinearCode:
    """``r = 0``: every word is a codeword, the syndrome is empty."""
    return LinearCode(n, n, BitMatrix(0, n, ()), BitMatrix.identity(n), certified_distance=1, name=f"trivial[{n}]")


def _dependent_within(columns: tuple[int, ...], depth: int) -> bool:
    """True if some nonempty set of at most ``depth`` columns sums to zero."""
    n = len(columns)

    def dfs(start: int, acc: int, used: int) -> bool:
        for j in range(start, n):
            s = acc ^ columns[j]
            if s == 0:
                return True
            if used + 1 < depth and dfs(j + 1, s, used + 1):
                return True
        return False

    return depth >= 1 and dfs(0, 0, 0)


def certify_distance(code: LinearCode, d: int) -> bool:
    """True iff no nonzero word of weight ``<= d - 1`` has zero syndrome.

    Walks the same set of words as ``enumerate_weight_at_most(n, d - 1)``, as
    sums of columns of ``H``. ``d`` above ``n + 1`` is clipped: there are no
    words heavier than ``n``.
    """
    if d < 1:
        raise ValueError("d must be >= 1")
    return not _dependent_within(code.columns, min(d - 1, code.n))


def certified(code: LinearCode, d: int) -> LinearCode:
    """Return ``code`` with ``certified_distance = d`` after checking it."""
    if not certify_distance(code, d):
        raise ValueError(f"{code.name or 'code'} has a nonzero codeword of weight < {d}")
    return replace(code, certified_distance=max(d, code.certified_distance))


def is_perfect(code: LinearCode, f: int) -> bool:
    """Hamming-bound equality: ``ball(n, f) == 2**(n - k)``."""
    return ball(code.n, f) == 1 << code.r


# -- greedy Gilbert-Varshamov construction --------------------------------


class _SumTable:
    """Which ``r``-bit values are sums of at most ``j`` chosen columns, for ``j <= depth``."""

    def __init__(self, r: int, depth: int):
        self.size = 1 << r
        self.idx = np.arange(self.size)
        self.depth = depth
        self.layers = [np.zeros(self.size, dtype=bool) for _ in range(depth + 1)]
        for layer in self.layers:
            layer[0] = True

    def copy(self) -> "_SumTable":
        new = object.__new__(_SumTable)
        new.size, new.idx, new.depth = self.size, self.idx, self.depth
        new.layers = [layer.copy() for layer in self.layers]
        return new

    @property
    def forbidden(self) -> np.ndarray:
        return self.layers[self.depth]

    def add(self, c: int) -> None:
        shifted = self.idx ^ c
        for j in range(self.depth, 0, -1):
            self.layers[j] |= self.layers[j - 1][shifted]


def _greedy_columns(L: int, r: int, d: int, order: np.ndarray) -> Optional[list[int]]:
    table = _SumTable(r, d - 2)
    chosen: list[int] = []
    for c in order:
        c = int(c)
        if table.forbidden[c]:
            continue
        chosen.append(c)
        if len(chosen) == L:
            return chosen
        table.add(c)
    return None


def _full_rank(columns: list[int], r: int) -> bool:
    return BitMatrix.from_columns(columns, r).rank() == r


def _exhaustive_columns(L: int, r: int, d: int, node_budget: int) -> tuple[Optional[list[int]], bool]:
    """Exact search for a systematic ``H = [I_r | A]`` with any ``d - 1`` columns independent.

    Returns ``(columns, complete)``. ``columns is None`` with ``complete``
    true proves that no rank-``r`` parity-check matrix exists.

    Every full-rank solution can be brought to systematic form by column
    permutation and row operations, and a row permutation then turns any one
    extra column into ``2**w - 1``. So the search fixes that column for each
    feasible weight ``w`` and adds the others in increasing order.
    """
    units = [1 << i for i in range(r)]
    m = L - r
    if m < 0:
        return None, True
    base = _SumTable(r, d - 2)
    for u in units:
        if base.forbidden[u]:
            return None, True
        base.add(u)
    if m == 0:
        return units, True

    nodes = 0
    exhausted_budget = False

    def dfs(table: _SumTable, last: int, chosen: list[int]) -> Optional[list[int]]:
        nonlocal nodes, exhausted_budget
        need = m - len(chosen)
        if need == 0:
            return chosen
        cands = np.flatnonzero(~table.forbidden[last + 1:]) + last + 1
        if len(cands) < need:
            return None
        for c in cands:
            c = int(c)
            if table.forbidden[c]:
                continue
            nodes += 1
            if nodes > node_budget:
                exhausted_budget = True
                return None
            nxt = table.copy()
            nxt.add(c)
            found = dfs(nxt, c, chosen + [c])
            if found is not None or exhausted_budget:
                return found
        return None

    for w in range(max(d - 1, 1), r + 1):
        anchor = (1 << w) - 1
        if base.forbidden[anchor]:
            continue
        table = base.copy()
        table.add(anchor)
        found = dfs(table, 0, []) if m > 1 else []
        if exhausted_budget:
            return None, False
        if found is not None:
            # dfs may revisit the anchor value; its sum table forbids it
            return units + [anchor] + found, True
    return None, True


# -- binary Goppa fallback ------------------------------------------------


def _poly_mod_irreducible(m: int) -> int:
    """Smallest irreducible binary polynomial of degree ``m`` (bit ``i`` = coefficient of ``x**i``)."""
    for p in range((1 << m) | 1, 1 << (m + 1), 2):
        if all(_pmod(p, q) for q in range(2, 1 << (m // 2 + 1)) if q.bit_length() - 1 <= m // 2):
            return p
    raise AssertionError("unreachable")


def _pmod(a: int, b: int) -> int:
    db = b.bit_length()
    while a.bit_length() >= db:
        a ^= b << (a.bit_length() - db)
    return a


class _GF:
    """Arithmetic in GF(2**m) via log tables."""

    def __init__(self, m: int):
        self.m = m
        self.q = 1 << m
        poly = _poly_mod_irreducible(m)
        # find a generator of the multiplicative group
        for g in range(2, self.q) if m > 1 else [1]:
            exp, x = [], 1
            for _ in range(self.q - 1):
                exp.append(x)
                x = self._mul_slow(x, g, poly)
            if len(set(exp)) == self.q - 1:
                break
        self.exp = exp + exp
        self.log = {v: i for i, v in enumerate(exp)}

    def _mul_slow(self, a: int, b: int, poly: int) -> int:
        r = 0
        while b:
            if b & 1:
                r ^= a
            b >>= 1
            a <<= 1
            if a >> self.m:
                a ^= poly
        return r

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return self.exp[self.log[a] + self.log[b]]

    def inv(self, a: int) -> int:
        return self.exp[(self.q - 1 - self.log[a]) % (self.q - 1)]

    def poly_eval(self, coeffs: tuple[int, ...], x: int) -> int:
        acc = 0
        for c in reversed(coeffs):
            acc = self.mul(acc, x) ^ c
        return acc


def _goppa_columns(L: int, r: int, d: int) -> Optional[list[int]]:
    """Columns of a binary Goppa parity check, when its redundancy fits in ``r``.

    With ``t = (d - 1) // 2`` and ``2**m >= L``, a squarefree Goppa
    polynomial of degree ``t`` without roots in the field gives a code of
    length ``L``, redundancy at most ``m t`` and distance at least ``2t + 1``.
    Only odd ``d`` is handled.
    """
    t = (d - 1) // 2
    if d % 2 == 0 or t < 1 or L < 2:
        return None
    m = max(1, (L - 1).bit_length())
    if m * t > r:
        return None
    F = _GF(m)
    g = None
    for tail in itertools.product(range(F.q), repeat=t):
        coeffs = tail + (1,)
        if all(F.poly_eval(coeffs, x) for x in range(F.q)) and _squarefree(F, coeffs):
            g = coeffs
            break
    if g is None:
        return None
    support = list(range(L))
    rows = [0] * (m * t)
    for j, alpha in enumerate(support):
        ginv = F.inv(F.poly_eval(g, alpha))
        power = 1
        for i in range(t):
            entry = F.mul(power, ginv)
            for b in range(m):
                if (entry >> b) & 1:
                    rows[i * m + b] |= 1 << j
            power = F.mul(power, alpha)
    basis: list[int] = []
    for row in rows:
        reduced = row
        for v in basis:
            reduced = min(reduced, reduced ^ v)
        if reduced:
            basis.append(row)
    for i in range(L):
        if len(basis) == r:
            break
        cand = 1 << i
        if BitMatrix(len(basis) + 1, L, tuple(basis) + (cand,)).rank() > len(basis):
            basis.append(cand)
    if len(basis) != r:
        return None
    return BitMatrix(r, L, tuple(basis)).column_values()


def _squarefree(F: _GF, coeffs: tuple[int, ...]) -> bool:
    """gcd(g, g') == 1 over GF(2**m), coefficients lowest degree first."""

    def trim(p):
        p = list(p)
        while p and p[-1] == 0:
            p.pop()
        return p

    def pmod(a, b):
        a = trim(a)
        b = trim(b)
        inv_lead = F.inv(b[-1])
        while len(a) >= len(b):
            c = F.mul(a[-1], inv_lead)
            shift = len(a) - len(b)
            for i, bc in enumerate(b):
                a[shift + i] ^= F.mul(c, bc)
            a = trim(a)
        return a

    deriv = [coeffs[i] if i % 2 == 1 else 0 for i in range(1, len(coeffs))]
    a, b = trim(coeffs), trim(deriv)
    if not b:
        return False
    while b:
        a, b = b, pmod(a, b)
    return len(a) == 1


def build_gv_code(
    L: int,
    r: int,
    d: int,
    seed: int = 0,
    restarts: int = RESTART_BUDGET,
    node_budget: int = SEARCH_NODE_BUDGET,
) -> LinearCode:
    """An ``r x L`` parity-check matrix with any ``d - 1`` columns independent.

    Columns are picked greedily in increasing order, each avoiding every sum of
    at most ``d - 2`` earlier columns. If that stalls, the greedy pass is
    repeated over seeded random candidate orders, and finally an exact
    systematic search decides the case. The result is certified before return.
    """
    if L < 1 or r < 0 or d < 1:
        raise ValueError(f"bad parameters L={L}, r={r}, d={d}")
    if r > L:
        raise CodeConstructionError("infeasible", L, r, d, "rank r > L impossible")
    t = (d - 1) // 2
    if t <= L and ball(L, t) > 1 << r:
        raise CodeConstructionError("infeasible", L, r, d, f"Hamming bound: ball({L},{t}) > 2^{r}")
    name = f"gv[{L},{L - r},{d}]"
    if r == 0:
        if d > 1:
            raise CodeConstructionError("infeasible", L, r, d, "r = 0 code has distance 1")
        return trivial_code(L)

    if d <= 2:
        nonzero = list(range(1, 1 << r))
        units = [1 << i for i in range(r)]
        rest = [c for c in nonzero if c not in set(units)]
        cols = (units + rest * L)[:L]
    else:
        cols = None
        rng = np.random.default_rng(seed)
        order = np.arange(1, 1 << r)
        for attempt in range(restarts + 1):
            if attempt:
                order = rng.permutation(order)
            found = _greedy_columns(L, r, d, order)
            if found is not None and _full_rank(found, r):
                cols = found
                break
        if cols is None:
            cols = _goppa_columns(L, r, d)
            if cols is not None:
                name = f"goppa[{L},{L - r},{d}]"
        if cols is None:
            cols, complete = _exhaustive_columns(L, r, d, node_budget)
            if cols is None:
                if complete:
                    raise CodeConstructionError("infeasible", L, r, d, "exhaustive systematic search found no matrix")
                raise CodeConstructionError(
                    "budget", L, r, d, f"{restarts} greedy restarts and {node_budget} search nodes exhausted"
                )
    H = BitMatrix.from_columns(cols, r)
    code = _with_generator(LinearCode(L, L - r, H, name=name))
    if H.rank() != r:
        raise CodeConstructionError("infeasible", L, r, d, "rank deficient")
    return certified(code, d)


def signature_code(L: int) -> LinearCode:
    """Parity checks locating a single flip.

    With ``m = ceil(log2 L)`` checks, position ``j`` enters check ``t`` iff
    bit ``t`` (most significant first, ``m`` bits) of ``L - j`` is one. The
    syndrome of a single flip at ``j`` then spells ``L - j`` in binary, so the
    flip at position ``L`` has the all-zero signature.
    """
    if L < 1:
        raise ValueError("L must be >= 1")
    m = (L - 1).bit_length()
    rows = []
    for t in range(1, m + 1):
        shift = m - t
        rows.append(sum(1 << (j - 1) for j in range(1, L + 1) if ((L - j) >> shift) & 1))
    return LinearCode(L, L - m, BitMatrix(m, L, tuple(rows)), None, certified_distance=1, name=f"signature[{L}]")


def code_for(spec: CodeSpec) -> LinearCode:
    """The code shared by client and databases for ``(L, f)``; deterministic in ``spec``."""
    L, f = spec.L, spec.f
    r = lbar_ceil(L, f)
    d = 2 * f + 1
    if f == 0:
        return trivial_code(L)
    if r == L:
        return identity_code(L)
    if spec.construction == "repetition":
        code = repetition_code(L)
    elif spec.construction == "paper_example":
        code = paper_example_523()
    elif spec.construction == "gv_greedy":
        return build_gv_code(L, r, d, seed=spec.seed)
    else:
        raise ValueError(f"unknown construction {spec.construction!r}")
    if code.n != L or code.r != r or code.certified_distance < d:
        raise ValueError(f"{code.name} does not fit L={L}, f={f} (needs r={r}, d={d})")
    return code


# -- PUCD file format ------------------------------------------------------


def dump_code(code: LinearCode) -> bytes:
    """``PUCD`` v1: magic, version u8, n u32 BE, k u32 BE, rows of H packed MSB first."""
    out = [CODE_MAGIC, struct.pack(">BII", CODE_VERSION, code.n, code.k)]
    out.extend(row.to_bytes() for row in code.parity_check.rows())
    return b"".join(out)


def load_code(data: bytes) -> LinearCode:
    if data[:4] != CODE_MAGIC:
        raise ValueError("not a PUCD code file")
    if len(data) < 13:
        raise ValueError("truncated PUCD header")
    version, n, k = struct.unpack(">BII", data[4:13])
    if version != CODE_VERSION:
        raise ValueError(f"unsupported PUCD version {version}")
    if k > n:
        raise ValueError(f"k={k} exceeds n={n}")
    r = n - k
    row_bytes = (n + 7) // 8
    body = data[13:]
    if len(body) != r * row_bytes:
        raise ValueError(f"expected {r * row_bytes} bytes of H, got {len(body)}")
    rows = tuple(BitWord.from_bytes(body[i * row_bytes:(i + 1) * row_bytes], n).value for i in range(r))
    return _with_generator(LinearCode(n, k, BitMatrix(r, n, rows), name="loaded"))
