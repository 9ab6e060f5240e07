"""Command line entry point: ``privupdate <command> ...``."""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence, TextIO

import numpy as np

from ..codes import CodeConstructionError, CodeSpec, code_for, dump_code, load_code
from ..pir.audit import (
    InfeasibleExhaustive,
    audit_joint,
    audit_privacy,
    leaky_extra_bit_plan,
    unpermuted_plan,
)
from ..pir.bounds import bounds, lbar_ceil
from ..pir.scheme import PirParams, build_plan
from ..protocol import (
    MODES,
    MessageLibrary,
    SystemConfig,
    UpdateInstance,
    client_update,
    config_code,
    dump_library,
    load_library,
    random_library,
)
from ..syndrome import DecodeFailure
from .server import DatabaseServer, DatabaseTCPServer
from .simulate import simulate
from .transport import TcpTransport, parse_endpoint

SCHEMES = {"standard": build_plan, "leaky": leaky_extra_bit_plan, "unpermuted": unpermuted_plan}


def _add_common(p: argparse.ArgumentParser, *names: str) -> None:
    defaults = {"n": 2, "k": 2, "l": None, "f": 1}
    for name in names:
        if name == "seed":
            p.add_argument("--seed", type=int, default=0)
        elif name == "mode":
            p.add_argument("--mode", choices=MODES, default="bounded_f")
        elif name == "construction":
            p.add_argument("--construction", choices=("repetition", "paper_example", "gv_greedy"), default="gv_greedy")
        else:
            kw = {"required": True} if defaults[name] is None else {"default": defaults[name]}
            p.add_argument(f"--{name}", type=int, **kw)


def cmd_bounds(args, out: TextIO) -> int:
    b = bounds(args.n, args.k, args.l, args.f)
    rows = [
        ("N", b.N), ("K", b.K), ("L", b.L), ("f", b.f), ("ball", b.ball), ("lbar_ceil", b.lbar_ceil),
        ("lower", b.lower), ("upper", b.upper), ("naive", b.naive), ("gap", b.gap),
    ]
    for name, value in rows:
        out.write(f"{name:<10} {value}\n")
    if b.perfect:
        out.write("perfect    ball is a power of two: lower == upper\n")
    return 0


def write_curve(N: int, K: int, L: int, fs: Sequence[int], out: TextIO) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["f", "lbar_ceil", "lower", "upper", "naive"])
    for f in fs:
        b = bounds(N, K, L, f)
        w.writerow([f, b.lbar_ceil, b.lower, b.upper, b.naive])


def cmd_curve(args, out: TextIO) -> int:
    f_max = args.l if args.f_max is None else args.f_max
    fs = range(args.f_min, f_max + 1)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            write_curve(args.n, args.k, args.l, fs, fh)
    else:
        write_curve(args.n, args.k, args.l, fs, out)
    return 0


def cmd_audit(args, out: TextIO) -> int:
    ell = args.ell if args.ell is not None else lbar_ceil(args.l, args.f)
    params = PirParams(args.n, args.k, ell)
    scheme = SCHEMES[args.scheme]
    if args.joint:
        report = audit_joint(params, scheme)
    else:
        report = audit_privacy(params, scheme, args.mode, trials=args.trials, seed=args.seed)
    for line in report.lines():
        out.write(line + "\n")
    if args.mode == "exhaustive" or args.joint:
        out.write("PRIVATE\n" if report.private else "LEAKS\n")
        return 0 if report.private else 3
    return 0


def _config(args, L: int, K: Optional[int] = None) -> SystemConfig:
    spec = CodeSpec(L, args.f, getattr(args, "construction", "gv_greedy"), getattr(args, "code_seed", 0))
    return SystemConfig(args.n, K if K is not None else args.k, L, args.f, args.mode, spec, getattr(args, "seed", 0))


def cmd_simulate(args, out: TextIO) -> int:
    summary = simulate(_config(args, args.l), args.trials, args.seed)
    for line in summary.lines():
        out.write(line + "\n")
    return 0 if summary.passed == summary.trials else 4


def cmd_gen_code(args, out: TextIO) -> int:
    if args.mode == "bounded_f":
        code = code_for(CodeSpec(args.l, args.f, args.construction, args.seed))
    else:
        code = config_code(SystemConfig(2, 2, args.l, args.f, args.mode))
    Path(args.out).write_bytes(dump_code(code))
    out.write(f"wrote [{code.n},{code.k}] code ({code.name}) to {args.out}\n")
    return 0


def cmd_gen_library(args, out: TextIO) -> int:
    library = random_library(args.k, args.l, np.random.default_rng(args.seed))
    Path(args.out).write_bytes(dump_library(library))
    out.write(f"wrote K={library.K} L={library.L} library to {args.out}\n")
    return 0


def _server_code(args, config: SystemConfig):
    if args.code and args.mode == "bounded_f":
        return load_code(Path(args.code).read_bytes())
    return config_code(config)


def cmd_serve(args, out: TextIO) -> int:
    library = load_library(Path(args.library).read_bytes())
    config = _config(args, library.L, library.K)
    db = DatabaseServer(config, library, _server_code(args, config))
    host, port = parse_endpoint(args.bind)
    srv = DatabaseTCPServer((host, port), db)
    h, p = srv.address
    out.write(f"listening {h}:{p}\n")
    out.flush()
    try:
        srv.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        srv.server_close()
    return 0


def cmd_update(args, out: TextIO) -> int:
    outdated_lib = load_library(Path(args.outdated).read_bytes())
    if outdated_lib.K != 1:
        raise ValueError("the outdated file must hold exactly one message")
    outdated = outdated_lib[1]
    endpoints = [parse_endpoint(e) for e in args.endpoints.split(",")]
    args.n = len(endpoints)
    config = _config(args, outdated.length)
    code = _server_code(args, config)
    with TcpTransport(endpoints, timeout=args.timeout, retries=args.retries) as transport:
        report = client_update(config, UpdateInstance(args.theta, outdated, args.f), transport, code)
    if args.transcript:
        Path(args.transcript).write_bytes(transport.flat_transcript())
    if args.result:
        Path(args.result).write_bytes(dump_library(MessageLibrary((report.updated,))))
    b = report.bounds
    out.write(json.dumps({
        "updated": str(report.updated),
        "flip_set": sorted(report.flip_set),
        "bits_downloaded": report.bits_downloaded,
        "lower": b.lower,
        "upper": b.upper,
        "naive": b.naive,
        "met_upper_bound": report.met_upper_bound,
    }) + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="privupdate", description="Private updating over replicated databases.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bounds", help="lower/upper/naive download cost")
    _add_common(p, "n", "k", "l", "f")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("curve", help="CSV of bounds against f")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--l", type=int, default=32)
    p.add_argument("--f-min", type=int, default=0)
    p.add_argument("--f-max", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("audit", help="privacy audit of the PIR plan")
    _add_common(p, "n", "k", "seed")
    p.add_argument("--l", type=int, default=3)
    p.add_argument("--f", type=int, default=1)
    p.add_argument("--ell", type=int, help="message length (default: syndrome length for --l/--f)")
    p.add_argument("--mode", choices=("exhaustive", "montecarlo"), default="exhaustive")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--scheme", choices=sorted(SCHEMES), default="standard")
    p.add_argument("--joint", action="store_true", help="audit (query, answer) over every library")
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("simulate", help="random end-to-end runs")
    _add_common(p, "n", "k", "l", "f", "seed", "mode", "construction")
    p.add_argument("--code-seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=100)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("gen-code", help="write a PUCD code file")
    _add_common(p, "l", "f", "seed", "mode", "construction")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen_code)

    p = sub.add_parser("gen-library", help="write a random PULB library file")
    _add_common(p, "k", "l", "seed")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen_library)

    p = sub.add_parser("serve", help="run one database")
    _add_common(p, "n", "f", "mode", "construction")
    p.add_argument("--bind", default="127.0.0.1:0")
    p.add_argument("--library", required=True)
    p.add_argument("--code")
    p.add_argument("--code-seed", type=int, default=0)
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("update", help="privately update an outdated message")
    _add_common(p, "k", "f", "seed", "mode", "construction")
    p.add_argument("--endpoints", required=True, help="host:port,host:port,...")
    p.add_argument("--outdated", required=True, help="PULB file holding the outdated message")
    p.add_argument("--theta", type=int, required=True)
    p.add_argument("--code")
    p.add_argument("--code-seed", type=int, default=0)
    p.add_argument("--transcript", help="write all request/response frames here")
    p.add_argument("--result", help="write the updated message here as PULB")
    p.add_argument("--timeout", type=float, default=5.0)
    p.add_argument("--retries", type=int, default=2)
    p.set_defaults(func=cmd_update)
    return parser


def main(argv: Optional[Sequence[str]] = None, out: TextIO = sys.stdout) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    try:
        return args.func(args, out)
    except InfeasibleExhaustive as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 5
    except (CodeConstructionError, DecodeFailure, ValueError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
