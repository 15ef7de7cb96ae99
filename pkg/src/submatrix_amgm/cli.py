"""Command-line front end.

Exit codes: 0 verified, 1 violation or failed identity, 2 input/usage
error, 3 enumeration cap or interval precision exhausted.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import __version__
from .combinatorics import DEFAULT_CAP, enumerate_lex
from .core import (
    NonnegMatrix,
    RangeParams,
    ScalarBackend,
    SubmatrixSelection,
    Verdict,
    parse_matrix,
    serialize_matrix,
)
from .errors import AmgmError, InputError
from .inequality import (
    DISTRIBUTIONS,
    evaluate_theorem,
    evaluate_unchecked,
    random_matrix,
    random_scan,
    counterexample_matrix,
)
from .lemma import coefficient_check, lemma_identity, proof_trace
from .means import geometric_mean
from .oracle import subset_inequality_1

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _to_jsonable(v):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.bool_,)):
        return bool(v)
    if isinstance(v, np.ndarray):
        return v.tolist()
    if isinstance(v, tuple):
        return list(v)
    raise TypeError(f"not JSON serializable: {type(v).__name__}")


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="submatrix-amgm",
        description="Check the mixed arithmetic-geometric mean inequality over k×l submatrices.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def common(p, matrix=True, kl=True):
        if matrix:
            p.add_argument("--input", default=None, help="matrix file (default: standard input)")
            p.add_argument("--format", choices=("csv", "json"), default="csv")
        if kl:
            p.add_argument("--k", type=int, required=True, help="submatrix row count")
            p.add_argument("--l", type=int, required=True, help="submatrix column count")
        p.add_argument("--backend", choices=("float", "exact"), default="float")
        p.add_argument("--tolerance", type=float, default=1e-9)
        p.add_argument("--report", choices=("text", "json"), default="text")
        p.add_argument("--cap", type=int, default=DEFAULT_CAP, help="max submatrix count (default 2**40)")
        p.add_argument("--threads", type=int, default=1)

    common(sub.add_parser("verify", help="evaluate both sides inside the valid range"))
    common(sub.add_parser("verify-unchecked", help="evaluate without the range condition"))

    p = sub.add_parser("lemma", help="averaging identity for one or all base submatrices")
    common(p)
    p.add_argument("--r", type=float, default=1.0)
    p.add_argument("--rows", type=_int_list, default=None, help="base rows, e.g. 0,1")
    p.add_argument("--cols", type=_int_list, default=None, help="base columns, e.g. 0,2")

    p = sub.add_parser("coeffs", help="exact weight of each base position")
    common(p, matrix=False)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--rows", type=_int_list, default=None)
    p.add_argument("--cols", type=_int_list, default=None)

    common(sub.add_parser("trace", help="check every link of the proof chain"))

    p = sub.add_parser("counterexample", help="build and evaluate the out-of-range counterexample")
    common(p, matrix=False)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)

    p = sub.add_parser("scan", help="randomized sweep over valid and out-of-range instances")
    common(p, matrix=False, kl=False)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--min-dim", type=int, default=1)
    p.add_argument("--max-dim", type=int, default=5)
    p.add_argument("--distribution", choices=DISTRIBUTIONS, default="uniform")
    p.add_argument("--zero-fraction", type=float, default=0.1)

    p = sub.add_parser("reduce-check", help="whole-matrix and single-row reductions")
    common(p, matrix=False, kl=False)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-len", type=int, default=8)
    return parser


def _read_matrix(args, exact: bool) -> NonnegMatrix:
    if args.input is None:
        text = sys.stdin.read()
    else:
        try:
            with open(args.input, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as e:
            raise InputError(f"cannot read {args.input}: {e}") from None
    return parse_matrix(text, args.format, exact=exact)


def _selection(m, n, k, l, rows, cols):
    rows = list(range(k)) if rows is None else rows
    cols = list(range(l)) if cols is None else cols
    sel = SubmatrixSelection.of(m, n, rows, cols)
    if sel.shape != (k, l):
        raise InputError(f"base shape {sel.shape} does not match --k {k} --l {l}")
    return sel


# -- command bodies: each returns (values, verdict string, exit code) ---------------


def _cmd_verify(args, backend, checked: bool):
    B = _read_matrix(args, backend.exact)
    fn = evaluate_theorem if checked else evaluate_unchecked
    rep = fn(B, args.k, args.l, backend, threads=args.threads, cap=args.cap)
    code = EXIT_FAIL if rep.verdict is Verdict.VIOLATED else EXIT_OK
    return rep.to_dict(), rep.verdict.value, code


def _cmd_lemma(args, backend):
    B = _read_matrix(args, backend.exact)
    RangeParams(B.m, B.n, args.k, args.l).require_valid()
    r = args.r
    if backend.exact:
        if r < 1 or not float(r).is_integer():
            raise InputError(f"--backend exact needs an integer --r >= 1, got {r}")
        r = int(r)
    if args.rows is None and args.cols is None:
        bases = [
            SubmatrixSelection.of(B.m, B.n, rows, cols)
            for rows in enumerate_lex(B.m, args.k)
            for cols in enumerate_lex(B.n, args.l)
        ]
    else:
        bases = [_selection(B.m, B.n, args.k, args.l, args.rows, args.cols)]
    worst = None
    for base in bases:
        res = lemma_identity(B, base, r, backend)
        if worst is None or res.relative_residual > worst[0].relative_residual:
            worst = (res, base)
    res, base = worst
    ok = res.residual == 0 if backend.exact else res.relative_residual <= 1e-12
    values = {
        "r": r,
        "bases_checked": len(bases),
        "worst_base_rows": list(base.rows),
        "worst_base_cols": list(base.cols),
        "lhs": res.lhs,
        "rhs": res.rhs,
        "residual": res.residual,
        "relative_residual": res.relative_residual,
    }
    return values, "identity" if ok else "mismatch", EXIT_OK if ok else EXIT_FAIL


def _cmd_coeffs(args, backend):
    base = None
    if args.rows is not None or args.cols is not None:
        base = _selection(args.m, args.n, args.k, args.l, args.rows, args.cols)
    table = coefficient_check(args.m, args.n, args.k, args.l, base)
    values = {
        "m": args.m,
        "n": args.n,
        "k": args.k,
        "l": args.l,
        "base_rows": list(table.base.rows),
        "base_cols": list(table.base.cols),
        "expected": table.expected,
        "total": table.total,
        "coefficients": {f"{p},{q}": c for (p, q), c in sorted(table.coefficients.items())},
    }
    return values, "uniform" if table.ok else "nonuniform", EXIT_OK if table.ok else EXIT_FAIL


def _cmd_trace(args, backend):
    B = _read_matrix(args, False)
    tr = proof_trace(B, args.k, args.l, backend, cap=args.cap)
    return tr.to_dict(), "chain-holds" if tr.ok else "chain-broken", EXIT_OK if tr.ok else EXIT_FAIL


def _cmd_counterexample(args, backend):
    B = counterexample_matrix(args.m, args.n, args.k, args.l, exact=backend.exact)
    rep = evaluate_unchecked(B, args.k, args.l, backend, threads=args.threads, cap=args.cap)
    values = {"matrix": serialize_matrix(B).splitlines(), **rep.to_dict()}
    # a violation is the expected outcome here; exit status still reports it
    code = EXIT_FAIL if rep.verdict is Verdict.VIOLATED else EXIT_OK
    return values, rep.verdict.value, code


def _cmd_scan(args, backend):
    s = random_scan(
        args.trials,
        dims=(args.min_dim, args.max_dim),
        distribution=args.distribution,
        seed=args.seed,
        zero_fraction=args.zero_fraction,
        backend=backend,
    )
    values = s.to_dict()
    values["seed"] = args.seed
    ok = s.violated_count == 0
    return values, "no-violations" if ok else "violations", EXIT_OK if ok else EXIT_FAIL


def _close(a: float, b: float, tol: float = 1e-12) -> bool:
    return abs(a - b) <= tol * max(abs(a), abs(b))


def reduce_check(trials: int = 100, seed: int = 0, max_len: int = 8, backend=None) -> dict:
    """Run both reductions on random inputs and count failures.

    Whole-matrix case: with k = m and l = n the two sides are the plain
    arithmetic and geometric means of all entries. Single-row case: a 1×n
    matrix with k = 1 matches the subset inequality oracle.
    """
    backend = backend or ScalarBackend()
    rng = np.random.default_rng(seed)
    whole_fail = row_fail = 0
    for _ in range(trials):
        m, n = (int(v) for v in rng.integers(1, 7, size=2))
        B = random_matrix(rng, m, n, "uniform")
        rep = evaluate_theorem(B, m, n, backend)
        flat = list(B.entries)
        if not (_close(rep.lhs, math.fsum(flat) / len(flat)) and _close(rep.rhs, geometric_mean(flat))):
            whole_fail += 1
    for _ in range(trials):
        n = int(rng.integers(1, max_len + 1))
        l = int(rng.integers(n // 2 + 1, n + 1))
        x = (1.0 - rng.random(n)).tolist()
        rep = evaluate_unchecked(NonnegMatrix.from_rows([x]), 1, l, backend)
        ref = subset_inequality_1(x, l)
        if not (_close(rep.lhs, ref.lhs) and _close(rep.rhs, ref.rhs)):
            row_fail += 1
    return {"trials": trials, "seed": seed, "whole_matrix_failures": whole_fail, "single_row_failures": row_fail}


def _cmd_reduce(args, backend):
    values = reduce_check(args.trials, args.seed, args.max_len, backend)
    ok = values["whole_matrix_failures"] == 0 and values["single_row_failures"] == 0
    return values, "reductions-hold" if ok else "reductions-fail", EXIT_OK if ok else EXIT_FAIL


def _parameters(args) -> dict:
    skip = {"command", "report", "input", "format"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip and v is not None}


def _render_text(doc: dict, color: bool) -> str:
    lines = [f"command: {doc['command']}", f"backend: {doc['backend']}"]
    for k, v in doc["parameters"].items():
        lines.append(f"param.{k}: {v}")
    for k, v in doc["values"].items():
        if k in ("verdict", "backend"):
            continue
        if isinstance(v, dict):
            for kk, vv in v.items():
                lines.append(f"{k}.{kk}: {_fmt(vv)}")
        elif isinstance(v, list) and v and isinstance(v[0], dict):
            for item in v:
                name = item.get("name", "?")
                for kk, vv in item.items():
                    if kk != "name":
                        lines.append(f"{k}.{name}.{kk}: {_fmt(vv)}")
        else:
            lines.append(f"{k}: {_fmt(v)}")
    verdict = doc["verdict"]
    if color:
        verdict = f"\x1b[{'32' if doc['exit_code'] == 0 else '31'}m{verdict}\x1b[0m"
    lines.append(f"verdict: {verdict}")
    lines.append(f"elapsed_s: {_fmt(doc['elapsed_s'])}")
    return "\n".join(lines) + "\n"


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, list):
        return "[" + ", ".join(_fmt(x) for x in v) + "]"
    return str(v)


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv) if argv is not None else None)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE

    started = time.perf_counter()
    try:
        backend = ScalarBackend.from_name(args.backend, args.tolerance)
        if args.threads < 1:
            raise InputError("--threads must be >= 1")
        cmd = args.command
        if cmd in ("verify", "verify-unchecked"):
            values, verdict, code = _cmd_verify(args, backend, cmd == "verify")
        elif cmd == "lemma":
            values, verdict, code = _cmd_lemma(args, backend)
        elif cmd == "coeffs":
            values, verdict, code = _cmd_coeffs(args, backend)
        elif cmd == "trace":
            values, verdict, code = _cmd_trace(args, backend)
        elif cmd == "counterexample":
            values, verdict, code = _cmd_counterexample(args, backend)
        elif cmd == "scan":
            values, verdict, code = _cmd_scan(args, backend)
        else:
            values, verdict, code = _cmd_reduce(args, backend)
    except AmgmError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return e.exit_code

    doc = {
        "command": args.command,
        "backend": args.backend,
        "parameters": _parameters(args),
        "values": values,
        "verdict": verdict,
        "exit_code": code,
        "elapsed_s": time.perf_counter() - started,
    }
    if args.report == "json":
        sys.stdout.write(json.dumps(doc, default=_to_jsonable, sort_keys=True) + "\n")
    else:
        color = sys.stdout.isatty() and "NO_COLOR" not in os.environ
        sys.stdout.write(_render_text(json.loads(json.dumps(doc, default=_to_jsonable)), color))
    return code


def main() -> None:
    raise SystemExit(run())


if __name__ == "__main__":
    main()
