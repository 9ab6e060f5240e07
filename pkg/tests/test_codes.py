import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import all_words, as_list, brute_ball, brute_min_distance, brute_syndrome
from privupdate.codes import (
    CodeConstructionError,
    CodeSpec,
    PRINTED_G_523,
    LinearCode,
    build_gv_code,
    certified,
    certify_distance,
    code_for,
    dump_code,
    identity_code,
    is_perfect,
    load_code,
    paper_example_523,
    repetition_code,
    signature_code,
    trivial_code,
)
from privupdate.gf2 import BitMatrix, BitWord, enumerate_weight_at_most, vec_mat_mul
from privupdate.pir.bounds import lbar_ceil


def check_code_invariants(code):
    H = code.parity_check
    assert H.rank() == code.r
    if code.generator is not None:
        for g in code.generator.rows():
            assert vec_mat_mul(g, H) == BitWord.zeros(code.r)
    d = code.certified_distance
    for w in enumerate_weight_at_most(code.n, min(d - 1, code.n)):
        if w.value:
            assert vec_mat_mul(w, H).value != 0


def systematic_code_exists(n, k, d):
    """Brute force over every systematic generator ``[I_k | P]``.

    Every binary linear code is equivalent to a systematic one up to a
    column permutation, which keeps the minimum distance. The search is
    independent of the parity-check side used by the construction.
    """
    r = n - k
    weights = [bin(v).count("1") for v in range(1 << r)]

    def extend(rows, sums):
        # sums: parity parts of all nonzero combinations so far, with message weight
        if len(rows) == k:
            return True
        for p in range(1 << r) if not rows else range(rows[-1] + 1, 1 << r):
            if 1 + weights[p] < d:
                continue
            ok = True
            new = []
            for s, mw in sums:
                if mw + 1 + weights[s ^ p] < d:
                    ok = False
                    break
                new.append((s ^ p, mw + 1))
            if ok and extend(rows + [p], sums + [(p, 1)] + new):
                return True
        return False

    return extend([], [])


class TestNamedCodes:
    def test_repetition_3(self):
        c = repetition_code(3)
        assert c.parity_check.to_lists() == [[1, 1, 0], [1, 0, 1]]
        assert c.generator.to_lists() == [[1, 1, 1]]
        assert (c.n, c.k, c.certified_distance) == (3, 1, 3)
        check_code_invariants(c)

    def test_repetition_1_is_degenerate(self):
        c = repetition_code(1)
        assert (c.parity_check.nrows, c.parity_check.ncols, c.r) == (0, 1, 0)

    def test_repetition_5_detects_weight_up_to_4(self):
        c = repetition_code(5)
        for w in enumerate_weight_at_most(5, 4):
            if w.value:
                assert vec_mat_mul(w, c.parity_check).value != 0
        check_code_invariants(c)

    def test_example_523(self):
        c = paper_example_523()
        assert c.generator.to_lists() == [[1, 0, 1, 1, 0], [0, 1, 1, 1, 1]]
        assert c.parity_check.to_lists() == [[1, 1, 1, 0, 0], [1, 1, 0, 1, 0], [0, 1, 0, 0, 1]]
        for v in range(32):
            b = [(v >> i) & 1 for i in range(5)]
            expect = [(b[0] + b[1] + b[2]) % 2, (b[0] + b[1] + b[3]) % 2, (b[1] + b[4]) % 2]
            assert as_list(vec_mat_mul(BitWord.from_bits(b), c.parity_check)) == expect
        nonzero_low = [w for w in enumerate_weight_at_most(5, 2) if w.value]
        assert len(nonzero_low) == 15
        assert all(vec_mat_mul(w, c.parity_check).value for w in nonzero_low)
        check_code_invariants(c)

    def test_printed_generator_is_not_orthogonal_to_h(self):
        c = paper_example_523()
        printed = [BitWord.from_bits(row) for row in PRINTED_G_523]
        assert [vec_mat_mul(g, c.parity_check) for g in printed] != [BitWord.zeros(3)] * 2
        # the null space of H is spanned by the corrected rows
        codewords = {w for w in all_words(5) if vec_mat_mul(w, c.parity_check).value == 0}
        assert codewords == {BitWord.from_str(s) for s in ("00000", "10110", "01111", "11001")}

    def test_identity_and_trivial(self):
        check_code_invariants(identity_code(6))
        t = trivial_code(4)
        assert t.r == 0
        check_code_invariants(t)


class TestCertify:
    def test_examples(self):
        c = repetition_code(3)
        assert certify_distance(c, 3)
        assert not certify_distance(c, 4)
        assert certify_distance(paper_example_523(), 1)
        assert certify_distance(c, 1)

    def test_certified_returns_new_value(self):
        c = build_gv_code(5, 3, 3)
        weaker = certified(c, 2)
        assert weaker.certified_distance == 3
        with pytest.raises(ValueError):
            certified(repetition_code(3), 4)

    @pytest.mark.parametrize("L,f", [(3, 1), (5, 1), (6, 1), (7, 1), (8, 1), (8, 2), (9, 1), (10, 1)])
    def test_matches_brute_min_distance(self, L, f):
        c = code_for(CodeSpec(L, f))
        dmin = brute_min_distance(c.parity_check.to_lists(), L)
        for d in range(1, L + 2):
            assert certify_distance(c, d) == (d <= dmin)


class TestPerfect:
    def test_examples(self):
        assert is_perfect(repetition_code(3), 1)
        assert not is_perfect(paper_example_523(), 1)
        assert is_perfect(trivial_code(6), 0)

    @pytest.mark.parametrize("n", [1, 3, 5, 7, 9, 11, 13, 15])
    def test_odd_repetition_family(self, n):
        f = (n - 1) // 2
        assert brute_ball(n, f) == 2 ** (n - 1)
        assert is_perfect(repetition_code(n), f)


class TestBuildGV:
    def test_l8_r4_d3_picks_values_1_to_8(self):
        c = build_gv_code(8, 4, 3)
        assert c.parity_check.column_values() == list(range(1, 9))
        assert len(set(c.parity_check.column_values())) == 8
        assert c.certified_distance == 3

    def test_l3_is_repetition_like(self):
        c = build_gv_code(3, 2, 3)
        assert (c.n, c.k) == (3, 1)
        assert c.generator.to_lists() == [[1, 1, 1]]

    def test_l5_is_a_523(self):
        c = build_gv_code(5, 3, 3)
        assert (c.n, c.k, c.certified_distance) == (5, 2, 3)
        assert brute_min_distance(c.parity_check.to_lists(), 5) >= 3

    def test_hamming_bound_violation_is_infeasible(self):
        with pytest.raises(CodeConstructionError) as exc:
            build_gv_code(8, 3, 3)
        assert exc.value.reason == "infeasible"

    @pytest.mark.parametrize(
        "L,f", [(7, 2), (9, 2), (10, 2), (10, 3), (11, 3), (12, 2), (12, 4), (13, 4), (14, 5), (15, 5), (16, 6)]
    )
    def test_infeasible_verdict_matches_generator_oracle(self, L, f):
        r, d = lbar_ceil(L, f), 2 * f + 1
        with pytest.raises(CodeConstructionError) as exc:
            build_gv_code(L, r, d)
        assert exc.value.reason == "infeasible"
        assert not systematic_code_exists(L, L - r, d)

    @pytest.mark.parametrize("L,f", [(6, 1), (8, 2), (11, 2), (15, 3), (16, 2)])
    def test_feasible_verdict_matches_generator_oracle(self, L, f):
        r, d = lbar_ceil(L, f), 2 * f + 1
        assert systematic_code_exists(L, L - r, d)
        check_code_invariants(build_gv_code(L, r, d))

    @settings(max_examples=30, deadline=None)
    @given(st.integers(1, 20), st.integers(0, 2), st.integers(0, 2**32))
    def test_successful_builds_are_certified(self, L, f, seed):
        if 2 * f >= L:
            return
        r, d = lbar_ceil(L, f), 2 * f + 1
        try:
            c = build_gv_code(L, r, d, seed=seed, restarts=20, node_budget=5000)
        except CodeConstructionError as exc:
            assert exc.reason in ("infeasible", "budget")
            return
        check_code_invariants(c)
        assert c.r == r
        if L <= 12:
            assert brute_min_distance(c.parity_check.to_lists(), L) >= d


class TestCodeFor:
    def test_examples(self):
        assert code_for(CodeSpec(3, 1, "repetition")) == repetition_code(3)
        assert code_for(CodeSpec(5, 1, "paper_example")) == paper_example_523()
        assert code_for(CodeSpec(5, 3)).parity_check == BitMatrix.identity(5)
        c = code_for(CodeSpec(8, 1, "gv_greedy", 0))
        assert (c.n, c.k, c.certified_distance) == (8, 4, 3)

    def test_f_zero_gives_empty_syndrome(self):
        assert code_for(CodeSpec(6, 0)).r == 0

    def test_deterministic(self):
        for L, f in [(8, 1), (11, 2), (16, 2)]:
            a, b = code_for(CodeSpec(L, f, seed=5)), code_for(CodeSpec(L, f, seed=5))
            assert dump_code(a) == dump_code(b)

    def test_mismatched_named_construction(self):
        with pytest.raises(ValueError):
            code_for(CodeSpec(5, 1, "repetition"))

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            CodeSpec(3, 4)

    @pytest.mark.parametrize("L", range(1, 17))
    def test_every_l_up_to_16_builds(self, L):
        """code_for succeeds for every f with the syndrome length ceil(log2 ball)."""
        failures = []
        for f in range(L + 1):
            try:
                c = code_for(CodeSpec(L, f))
            except CodeConstructionError as exc:
                failures.append((f, exc.reason))
                continue
            assert c.r == lbar_ceil(L, f)
            assert certify_distance(c, min(2 * f + 1, L + 1))
        assert not failures, f"L={L}: no code for (f, reason) in {failures}"


class TestFileFormat:
    def test_layout(self):
        data = dump_code(repetition_code(3))
        assert data[:4] == b"PUCD"
        assert data[4] == 1
        assert data[5:13] == (3).to_bytes(4, "big") + (1).to_bytes(4, "big")
        assert data[13:] == bytes([0b11000000, 0b10100000])

    @pytest.mark.parametrize(
        "code", [repetition_code(3), paper_example_523(), identity_code(9), trivial_code(4), signature_code(12)]
    )
    def test_round_trip(self, code):
        loaded = load_code(dump_code(code))
        assert loaded == code
        assert dump_code(loaded) == dump_code(code)

    @given(st.integers(1, 20), st.integers(0, 20), st.data())
    def test_round_trip_random(self, n, r, data):
        r = min(r, n)
        rows = tuple(data.draw(st.integers(0, (1 << n) - 1)) for _ in range(r))
        code = LinearCode(n, n - r, BitMatrix(r, n, rows))
        assert dump_code(load_code(dump_code(code))) == dump_code(code)

    def test_rejects_garbage(self):
        good = dump_code(repetition_code(3))
        for bad in (b"XXXX" + good[4:], good[:-1], good[:4] + b"\x02" + good[5:]):
            with pytest.raises(ValueError):
                load_code(bad)


def test_syndrome_longhand_agrees():
    c = paper_example_523()
    w = BitWord.from_str("10110")
    assert as_list(vec_mat_mul(w, c.parity_check)) == brute_syndrome(c.parity_check.to_lists(), as_list(w))
