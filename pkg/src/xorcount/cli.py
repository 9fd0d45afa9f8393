"""Command-line entry point.

Exit codes: 0 success, 1 usage or parameter error, 2 a solver call ended
without a verdict, 3 an input file could not be read or parsed.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import shlex
import sys
import time
from typing import Iterable, Sequence

from . import __version__, bounds, codes
from .counter import CountParams, DminViolation, count
from .formula import DimacsError, as_constrained, min_distance_of_indices, model_indices, read_dimacs, write_dimacs
from .solver import KERNEL, BackendConfig, BackendUnknownError

INTERFACE_VERSION = "1.0"
MINDIST_CAP = 24

EXIT_OK, EXIT_USAGE, EXIT_UNKNOWN, EXIT_PARSE = 0, 1, 2, 3

TABLE1_ROWS = (
    (50, 13), (50, 16), (50, 20), (50, 30), (50, 39),
    (100, 11), (100, 15), (100, 25),
    (119, 7), (136, 9), (149, 11), (352, 10),
)


class UsageError(Exception):
    pass


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# --- output helpers --------------------------------------------------------


def fmt(x) -> str:
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, int):
        return str(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.6g}"


def write_csv(out, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(v) for v in r])


def _int_list(text: str) -> list[int]:
    """``"5"``, ``"1,3,7"`` or an inclusive range ``"1:40"``."""
    out = []
    for part in text.split(","):
        if ":" in part:
            lo, hi = part.split(":")
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    return out


def _float_list(text: str) -> list[float]:
    return [float(p) for p in text.split(",")]


def _load_formula(path: str):
    try:
        return read_dimacs(path)
    except DimacsError as exc:
        raise InputError(f"{path}: {exc}") from exc
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror or exc}") from exc


def _write_text(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


# --- count -----------------------------------------------------------------


def _backend(args) -> BackendConfig:
    if args.backend == "external":
        if not args.solver_cmd:
            raise UsageError("--backend external needs --solver-cmd")
        cmd = tuple(shlex.split(args.solver_cmd))
    else:
        cmd = ()
    return BackendConfig(args.backend, cmd, args.timeout, args.xor_mode)


def cmd_count(args) -> int:
    f = _load_formula(args.file)
    backend = _backend(args)
    p = CountParams(
        alpha=args.alpha,
        beta=args.beta,
        delta_target=args.delta,
        gamma=args.gamma,
        d_min=args.d_min,
        lam=args.lam,
        seed=args.seed,
        backend=backend,
        verify_dmin=args.verify_dmin,
    )
    t0 = time.perf_counter()
    iv = count(f, p)
    wall = (time.perf_counter() - t0) * 1000.0
    low, high = iv.counts()
    record = {
        "command": "count",
        "version": __version__,
        "seed": iv.seed,
        "params": {
            "file": args.file,
            "num_vars": f.num_vars,
            "alpha": p.alpha,
            "beta": p.beta,
            "delta": p.delta_target,
            "gamma": p.gamma,
            "d_min": p.d_min,
            "lambda": p.lam,
            "backend": backend.kind,
            "solver_cmd": list(backend.external_command),
            "xor_mode": backend.xor_mode,
            "timeout": backend.timeout,
            "kernel": KERNEL if backend.kind == "internal" else None,
        },
        "l": iv.l,
        "u": iv.u,
        "count_low": low,
        "count_high": high,
        "iterations": iv.iterations,
        "sat_calls": iv.sat_calls,
        "trials_per_decision": iv.trials_per_decision,
        "s_per_iteration": iv.s_values,
        "lambda_per_iteration": iv.lambdas,
        "decisions": iv.decisions,
        "wall_time_ms": round(wall, 3),
    }
    print(json.dumps(record, sort_keys=True))
    return EXIT_OK


# --- bounds ----------------------------------------------------------------

STAR_HEADER = ("m", "s", "beta", "d", "gamma", "lambda_star", "lambda_star_times_m")


def _star_row(m, s, beta, d, gamma):
    lam = bounds.lambda_star(s, m, beta, d, gamma)
    return (m, s, beta, d, gamma, lam, lam * m)


def cmd_bound(args) -> int:
    p = bounds.BoundParams(args.m, args.s, args.beta, args.d, args.lam)
    w, n_star = bounds.w_star_n_star(p.m, p.d, p.N)
    write_csv(
        sys.stdout,
        ("m", "s", "beta", "d", "lambda", "rho", "N", "w_star", "n_star", "B"),
        [(p.m, p.s, p.beta, p.d, p.lam, p.rho, p.N, w, n_star, bounds.bound_B(p))],
    )
    return EXIT_OK


def cmd_lambda_star(args) -> int:
    write_csv(sys.stdout, STAR_HEADER, [_star_row(args.m, args.s, args.beta, args.d, args.gamma)])
    return EXIT_OK


def _valid_grid(ms, ss, betas, ds, gammas):
    for m in sorted(set(ms)):
        for s in sorted(set(ss)):
            for beta in sorted(set(betas)):
                for d in sorted(set(ds)):
                    if not 1 <= d <= m:
                        continue
                    for gamma in sorted(set(gammas)):
                        yield m, s, beta, d, gamma


def cmd_sweep(args) -> int:
    rows = [_star_row(*key) for key in _valid_grid(args.m, args.s, args.beta, args.d, args.gamma)]
    write_csv(sys.stdout, STAR_HEADER, rows)
    return EXIT_OK


def table1_rows(beta: float = 2.0, gamma: float = 0.8) -> list[tuple]:
    rows = []
    for m, s in TABLE1_ROWS:
        rows.append((m, s) + tuple(m * bounds.lambda_star(s, m, beta, d, gamma) for d in (1, 5, 20)))
    return rows


def cmd_table1(args) -> int:
    write_csv(sys.stdout, ("m", "s", "d1", "d5", "d20"), table1_rows(args.beta, args.gamma))
    return EXIT_OK


def cmd_fig1(args) -> int:
    ms = args.m or [32, 64]
    keys = [
        (m, s, args.beta, d, args.gamma)
        for m in sorted(ms)
        for d in sorted(args.d)
        if d <= m
        for s in range(1, m + 1)
    ]
    write_csv(sys.stdout, STAR_HEADER, [_star_row(*k) for k in keys])
    return EXIT_OK


def fig2_rows(m: int, n: int = 155, d_code: int = 20, beta: float = 1.5) -> list[tuple]:
    rows = []
    for s in range(1, m + 1):
        gain, lhs, rhs = bounds.embedding_gain(n, d_code, m, s, beta)
        rows.append((m, s, rhs, lhs, gain))
    return rows


def crossover(rows: Sequence[tuple]) -> int:
    """Last ``s`` of the initial run where the gain flag holds (0 if none)."""
    last = 0
    for _, s, _, _, gain in rows:
        if not gain:
            break
        last = s
    return last


def cmd_fig2(args) -> int:
    rows = []
    for m in sorted(args.m or [32, 64]):
        rows.extend(fig2_rows(m, args.n, args.d_code, args.beta))
    write_csv(sys.stdout, ("m", "s", "len_plain", "len_embedded", "gain"), rows)
    return EXIT_OK


# --- codes -----------------------------------------------------------------


def cmd_gen_bch(args) -> int:
    code = codes.bch_code(args.q, args.t)
    f = codes.parity_formula(code.H)
    text = write_dimacs(f, comments=[f"code n={code.n} k={code.k} dmin>={code.d_lower}"])
    _write_text(args.output, text)
    return EXIT_OK


def _load_matrix(path: str) -> codes.Gf2Matrix:
    try:
        return codes.read_matrix(path)
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror or exc}") from exc
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from exc


def cmd_embed(args) -> int:
    f = _load_formula(args.file)
    G = _load_matrix(args.gen)
    if G.rows > codes.MIN_WEIGHT_CAP and args.d is None:
        raise UsageError(f"code dimension {G.rows} is too large for exact distance; pass --d")
    code = codes.LinearCode.from_generator(G, args.d)
    if args.d is not None and code.k <= codes.MIN_WEIGHT_CAP and codes.min_weight(code) < args.d:
        raise UsageError(f"--d {args.d} exceeds the code's actual minimum distance")
    out, d = codes.embed(f, code)
    text = write_dimacs(out, comments=[f"embedded n={code.n} k={code.k} dmin>={d}"])
    _write_text(args.output, text)
    if args.print_d:
        print(d, file=sys.stderr if args.output in (None, "-") else sys.stdout)
    return EXIT_OK


def cmd_mindist(args) -> int:
    f = as_constrained(_load_formula(args.file))
    if f.num_vars > MINDIST_CAP:
        raise UsageError(f"mindist enumerates at most {MINDIST_CAP} variables, formula has {f.num_vars}")
    idx = model_indices(f, var_cap=MINDIST_CAP)
    if len(idx) < 2:
        print("inf")
    else:
        print(min_distance_of_indices(idx, f.num_vars))
    return EXIT_OK


# --- parser ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="xorcount", description="Approximate model counting with sparse XOR constraints.")
    ap.add_argument(
        "--version", action="version", version=f"xorcount {__version__} (interface {INTERFACE_VERSION})"
    )
    ap.add_argument("--verbose", action="store_true", help="log progress to stderr")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("count", help="approximate the model count of a DIMACS file")
    c.add_argument("file")
    c.add_argument("--alpha", type=float, default=1.5)
    c.add_argument("--beta", type=float, default=1.5)
    c.add_argument("--delta", type=float, default=0.1, help="target error probability")
    c.add_argument("--gamma", type=float, default=0.8)
    c.add_argument("--d-min", type=int, default=1, help="known lower bound on model distance")
    c.add_argument("--lambda", dest="lam", type=float, default=None, help="fixed density instead of the threshold")
    c.add_argument("--seed", type=int, default=None)
    c.add_argument("--backend", choices=("internal", "external"), default="internal")
    c.add_argument("--solver-cmd", default=None, help="external solver command; the file path is appended")
    c.add_argument("--xor-mode", choices=("x", "cnf"), default="x")
    c.add_argument("--timeout", type=float, default=None, help="seconds per solver call")
    c.add_argument("--verify-dmin", action="store_true", help="check --d-min by enumeration (small inputs)")
    c.set_defaults(func=cmd_count)

    b = sub.add_parser("bound", help="evaluate the variance bound at one point")
    for name, typ in (("--m", int), ("--s", int), ("--d", int)):
        b.add_argument(name, type=typ, required=True)
    b.add_argument("--beta", type=float, default=1.5)
    b.add_argument("--lambda", dest="lam", type=float, required=True)
    b.set_defaults(func=cmd_bound)

    ls = sub.add_parser("lambda-star", help="smallest density meeting the bound")
    ls.add_argument("--m", type=int, required=True)
    ls.add_argument("--s", type=int, required=True)
    ls.add_argument("--d", type=int, default=1)
    ls.add_argument("--beta", type=float, default=1.5)
    ls.add_argument("--gamma", type=float, default=0.8)
    ls.set_defaults(func=cmd_lambda_star)

    sw = sub.add_parser("sweep", help="threshold density over a parameter grid")
    sw.add_argument("--m", type=_int_list, required=True, help="e.g. 32,64")
    sw.add_argument("--s", type=_int_list, required=True, help="e.g. 1:40")
    sw.add_argument("--d", type=_int_list, default=[1])
    sw.add_argument("--beta", type=_float_list, default=[1.5])
    sw.add_argument("--gamma", type=_float_list, default=[0.8])
    sw.set_defaults(func=cmd_sweep)

    t1 = sub.add_parser("table1", help="density table for the standard benchmark sizes")
    t1.add_argument("--beta", type=float, default=2.0)
    t1.add_argument("--gamma", type=float, default=0.8)
    t1.set_defaults(func=cmd_table1)

    f1 = sub.add_parser("fig1", help="threshold density against s")
    f1.add_argument("--m", type=_int_list, default=None)
    f1.add_argument("--d", type=_int_list, default=[1, 5, 10, 20])
    f1.add_argument("--beta", type=float, default=1.5)
    f1.add_argument("--gamma", type=float, default=1.0)
    f1.set_defaults(func=cmd_fig1)

    f2 = sub.add_parser("fig2", help="expected XOR length with and without a code embedding")
    f2.add_argument("--m", type=_int_list, default=None)
    f2.add_argument("--n", type=int, default=155)
    f2.add_argument("--d-code", type=int, default=20)
    f2.add_argument("--beta", type=float, default=1.5)
    f2.set_defaults(func=cmd_fig2)

    g = sub.add_parser("gen-bch", help="formula whose models are the codewords of a BCH code")
    g.add_argument("--q", type=int, required=True)
    g.add_argument("--t", type=int, required=True)
    g.add_argument("-o", "--output", default=None)
    g.set_defaults(func=cmd_gen_bch)

    e = sub.add_parser("embed", help="conjoin a formula with z = yG")
    e.add_argument("file")
    e.add_argument("--gen", required=True, help="generator matrix file")
    e.add_argument("--d", type=int, default=None, help="distance lower bound (default: exact)")
    e.add_argument("-o", "--output", default=None)
    e.add_argument("--print-d", action="store_true", help="print the distance guarantee")
    e.set_defaults(func=cmd_embed)

    md = sub.add_parser("mindist", help="exact minimum distance between models (small inputs)")
    md.add_argument("file")
    md.set_defaults(func=cmd_mindist)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except InputError as exc:
        print(f"xorcount: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except BackendUnknownError as exc:
        print(f"xorcount: {exc}", file=sys.stderr)
        return EXIT_UNKNOWN
    except (UsageError, DminViolation, ValueError) as exc:
        print(f"xorcount: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
