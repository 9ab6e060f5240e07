"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v``; the verdict lines bypass
output capture so they always show.
"""

import csv
import io
import os
import subprocess
import sys
from contextlib import contextmanager
from itertools import combinations
from pathlib import Path

import numpy as np
import pytest

from oracles import all_words, brute_ball, small_codes
from privupdate.codes import (
    CodeConstructionError,
    CodeSpec,
    build_gv_code,
    certify_distance,
    is_perfect,
    paper_example_523,
    repetition_code,
)
from privupdate.gf2 import BitWord, hamming_distance
from privupdate.pir.audit import all_randomness, audit_privacy, leaky_extra_bit_plan
from privupdate.pir.bounds import bounds, lbar_ceil
from privupdate.pir.scheme import PirParams
from privupdate.protocol import (
    MessageLibrary,
    SystemConfig,
    UpdateInstance,
    client_update,
    config_code,
    dump_library,
)
from privupdate.service.cli import main
from privupdate.service.server import DatabaseServer
from privupdate.service.transport import InMemoryTransport
from privupdate.syndrome import DecodeFailure, Syndrome, syndrome_of, update_decode


@pytest.fixture
def verdict(capsys):
    def report(number, title, ok, detail=""):
        with capsys.disabled():
            line = f"criterion {number:>2} {'PASS' if ok else 'FAIL'}: {title}"
            print("\n" + line + (f" ({detail})" if detail else ""))
        assert ok, f"criterion {number} failed: {detail}"

    return report


def library_of(K, L, value):
    mask = (1 << L) - 1
    return MessageLibrary(tuple(BitWord(L, (value >> (L * k)) & mask) for k in range(K)))


def ball_variants(w, f):
    out = []
    for k in range(f + 1):
        for pos in combinations(range(1, w.length + 1), k):
            out.append((w ^ BitWord.from_positions(w.length, pos), frozenset(pos)))
    return out


def exhaustive_runs(config, randomness_for):
    """Every library, every outdated copy within f, every theta; yields reports."""
    code = config_code(config)
    L, K = config.L, config.K
    run = 0
    for value in range(1 << (K * L)):
        lib = library_of(K, L, value)
        transport_servers = [DatabaseServer(config, lib, code) for _ in range(config.N)]
        for theta in range(1, K + 1):
            for stale, pos in ball_variants(lib[theta], config.f):
                for rnd in randomness_for(run):
                    transport = InMemoryTransport(transport_servers)
                    report = client_update(config, UpdateInstance(theta, stale, config.f), transport, code, rnd)
                    yield lib[theta], pos, report
                run += 1


def test_criterion_01_small_example(verdict):
    config = SystemConfig(2, 2, 3, 1, code_spec=CodeSpec(3, 1, "repetition"))
    everything = list(all_randomness(PirParams(2, 2, 2)))
    runs = correct = 0
    costs = set()
    for current, pos, report in exhaustive_runs(config, lambda _: everything):
        runs += 1
        correct += report.updated == current and report.flip_set == pos
        costs.add(report.bits_downloaded)
    ok = runs == 64 * 2 * 4 * len(everything) and correct == runs and costs == {3}
    verdict(1, "N=2 K=2 L=3 f=1 exhaustive", ok, f"{correct}/{runs} correct, costs {sorted(costs)}")


def test_criterion_02_extra_bit_example(verdict):
    config = SystemConfig(2, 2, 5, 1, code_spec=CodeSpec(5, 1, "paper_example"))
    everything = list(all_randomness(PirParams(2, 2, 3)))
    runs = correct = 0
    costs = set()
    # each run takes the next randomness draw in turn, so all of them are used
    for current, pos, report in exhaustive_runs(config, lambda i: [everything[i % len(everything)]]):
        runs += 1
        correct += report.updated == current and report.flip_set == pos
        costs.add(report.bits_downloaded)
    b = bounds(2, 2, 5, 1)
    ok = runs == 1024 * 6 * 2 and correct == runs and costs == {5} and (b.lower, b.upper) == (4, 5)
    verdict(2, "N=2 K=2 L=5 f=1 exhaustive", ok,
            f"{correct}/{runs} correct, costs {sorted(costs)}, lower={b.lower} upper={b.upper}")


def test_criterion_03_sandwich(verdict):
    bad = []
    count = 0
    for N in (2, 3, 4):
        for K in (2, 3):
            for L in range(1, 17):
                for f in range(L + 1):
                    b = bounds(N, K, L, f)
                    count += 1
                    power_of_two = brute_ball(L, f) & (brute_ball(L, f) - 1) == 0
                    if not (b.lower <= b.upper <= b.naive and b.upper - b.lower <= 2):
                        bad.append((N, K, L, f))
                    if power_of_two and b.lower != b.upper:
                        bad.append((N, K, L, f))
    verdict(3, "lower <= upper <= naive, gap <= 2, tight for power-of-two balls", not bad,
            f"{count} points, violations {bad[:5]}")


def test_criterion_04_threshold(verdict):
    bad = [
        (L, f)
        for L in range(1, 21)
        for f in range(L + 1)
        if (lbar_ceil(L, f) == L) != (2 * f >= L) or (2 * f < L and not lbar_ceil(L, f) < L)
    ]
    verdict(4, "lbar_ceil = L iff f >= L/2", not bad, f"violations {bad}")


def test_criterion_05_curve(verdict):
    out = io.StringIO()
    code = main(["curve", "--n", "2", "--k", "10", "--l", "32"], out)
    rows = {int(r["f"]): {k: int(v) for k, v in r.items()} for r in csv.DictReader(io.StringIO(out.getvalue()))}
    u, v = 2**10 - 1, 2**10 - 2**9

    def lower_oracle(f):
        D, target = 0, brute_ball(32, f) ** u
        while 2 ** (D * v) < target:
            D += 1
        return D

    uppers = [rows[f]["upper"] for f in sorted(rows)]
    ok = (
        code == 0
        and sorted(rows) == list(range(33))
        and rows[1]["upper"] == 12
        and rows[1]["lower"] == 11 == lower_oracle(1)
        and all(rows[f]["upper"] == rows[f]["naive"] == 64 for f in range(16, 33))
        and all(a <= b for a, b in zip(uppers, uppers[1:]))
        and all(rows[f]["lower"] == lower_oracle(f) for f in rows)
    )
    verdict(5, "curve N=2 K=10 L=32", ok,
            f"f=1 lower={rows[1]['lower']} upper={rows[1]['upper']}, f=16 upper={rows[16]['upper']}")


def test_criterion_06_privacy_audit(verdict):
    results = {}
    for name, params in [("two-symbol", PirParams(2, 2, 2)), ("extra-bit", PirParams(2, 2, 3)),
                         ("N=3 block", PirParams(3, 2, 3))]:
        results[name] = audit_privacy(params).max_distance
    leak = audit_privacy(PirParams(2, 2, 3), leaky_extra_bit_plan).max_distance
    ok = all(d == 0 for d in results.values()) and leak > 0
    detail = ", ".join(f"{k} TV={v}" for k, v in results.items()) + f", broken control TV={leak}"
    verdict(6, "exhaustive privacy audit", ok, detail)


def test_criterion_07_coset_oracle(verdict):
    cases = mismatches = 0
    for code, f in small_codes():
        for sv in range(1 << code.r):
            s = Syndrome(BitWord(code.r, sv), code.code_id)
            members = [w for w in all_words(code.n) if syndrome_of(code, w).bits == s.bits]
            for stale in all_words(code.n):
                cases += 1
                dist = min(hamming_distance(stale, w) for w in members)
                nearest = [w for w in members if hamming_distance(stale, w) == dist]
                try:
                    got = update_decode(code, stale, s, f).updated
                except DecodeFailure:
                    got = None
                expected = nearest[0] if dist <= f and len(nearest) == 1 else None
                if dist <= f and len(nearest) != 1:
                    mismatches += 1
                mismatches += got != expected
    verdict(7, "decoder equals coset argmin, L <= 8", mismatches == 0, f"{cases} cases, {mismatches} mismatches")


def test_criterion_08_code_construction(verdict):
    targets = [(L, f) for L in range(1, 17) for f in range(L + 1) if lbar_ceil(L, f) < L]
    targets += [(32, 1), (32, 2), (32, 3)]
    failed = []
    for L, f in targets:
        r, d = lbar_ceil(L, f), 2 * f + 1
        try:
            code = build_gv_code(L, r, d)
        except CodeConstructionError as exc:
            failed.append(f"({L},{f}) {exc.reason}")
            continue
        if not certify_distance(code, d):
            failed.append(f"({L},{f}) uncertified")
    perfect = is_perfect(repetition_code(3), 1) and not is_perfect(paper_example_523(), 1)
    ok = not failed and perfect
    verdict(8, "code construction", ok,
            f"{len(targets) - len(failed)}/{len(targets)} built; perfect checks {'ok' if perfect else 'wrong'};"
            f" no code: {', '.join(failed)}")


def test_criterion_09_exact_one_flip(verdict):
    rng = np.random.default_rng(9)
    exact = SystemConfig(2, 2, 8, 1, mode="exact_one_flip")
    bounded = SystemConfig(2, 2, 8, 1)
    codes = {c: config_code(c) for c in (exact, bounded)}
    runs = correct = 0
    costs = {exact: set(), bounded: set()}
    for value in range(256):
        for theta in (1, 2):
            other = BitWord(8, int(rng.integers(0, 256)))
            words = (BitWord(8, value), other) if theta == 1 else (other, BitWord(8, value))
            lib = MessageLibrary(words)
            servers = {c: [DatabaseServer(c, lib, codes[c]) for _ in range(2)] for c in codes}
            for j in range(1, 9):
                for c in (exact, bounded):
                    report = client_update(c, UpdateInstance(theta, lib[theta].flip(j), 1),
                                           InMemoryTransport(servers[c]), codes[c])
                    runs += 1
                    correct += report.updated == lib[theta] and report.flip_set == {j}
                    costs[c].add(report.bits_downloaded)
    ok = correct == runs == 256 * 2 * 8 * 2 and costs[exact] == {5} and costs[bounded] == {6}
    verdict(9, "exact one flip L=8", ok,
            f"{correct}/{runs} correct, exact cost {sorted(costs[exact])}, bounded cost {sorted(costs[bounded])}")


@contextmanager
def server_processes(library_path, count=2):
    env = dict(os.environ, PYTHONUNBUFFERED="1")
    procs = []
    try:
        for _ in range(count):
            procs.append(subprocess.Popen(
                [sys.executable, "-m", "privupdate", "serve", "--library", str(library_path), "--f", "1",
                 "--construction", "repetition", "--bind", "127.0.0.1:0"],
                stdout=subprocess.PIPE, text=True, env=env,
            ))
        endpoints = []
        for p in procs:
            line = p.stdout.readline().split()
            assert line and line[0] == "listening", line
            endpoints.append(line[1])
        yield ",".join(endpoints)
    finally:
        for p in procs:
            p.terminate()
            p.wait(timeout=10)


def test_criterion_10_distributed_parity(verdict, tmp_path: Path):
    lib = MessageLibrary((BitWord.from_str("101"), BitWord.from_str("011")))
    lib_path = tmp_path / "lib.pulb"
    lib_path.write_bytes(dump_library(lib))
    runs = identical = correct = 0
    costs = set()
    with server_processes(lib_path) as endpoints:
        for theta in (1, 2):
            for stale, pos in ball_variants(lib[theta], 1):
                seed = runs
                stale_path = tmp_path / f"stale{runs}.pulb"
                stale_path.write_bytes(dump_library(MessageLibrary((stale,))))
                tcp_log = tmp_path / f"tcp{runs}.bin"
                result = subprocess.run(
                    [sys.executable, "-m", "privupdate", "update", "--endpoints", endpoints,
                     "--outdated", str(stale_path), "--theta", str(theta), "--f", "1", "--seed", str(seed),
                     "--construction", "repetition", "--transcript", str(tcp_log)],
                    capture_output=True, text=True, timeout=60,
                )
                config = SystemConfig(2, 2, 3, 1, code_spec=CodeSpec(3, 1, "repetition"), seed=seed)
                mem = InMemoryTransport([DatabaseServer(config, lib) for _ in range(2)])
                report = client_update(config, UpdateInstance(theta, stale, 1), mem)
                runs += 1
                identical += result.returncode == 0 and tcp_log.read_bytes() == mem.flat_transcript()
                correct += report.updated == lib[theta] and report.flip_set == pos and f'"{lib[theta]}"' in result.stdout
                costs.add(report.bits_downloaded)
    ok = runs == 8 and identical == runs and correct == runs and costs == {3}
    verdict(10, "TCP servers match in-memory transport", ok,
            f"{identical}/{runs} byte-identical transcripts, {correct}/{runs} correct, costs {sorted(costs)}")
