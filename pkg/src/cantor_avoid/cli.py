"""Command-line front end: build, verify, diagnose, render.

Exit codes (stable):

    0  success
    2  usage error (bad flags)
    3  validation error (bad spec, rectangle or parameters)
    4  I/O error
    5  trace parse error (corrupted or malformed trace)
    6  resource cap exceeded (depth or grid size)
    7  construction failed within the retry cap
    8  verification failed (a counterexample was found)
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys

from .arrangement import ParamRect
from .cantor import (
    CantorSpec,
    GenerationLimitError,
    SpecError,
    newhouse_thickness,
    theorem12_diagnostic,
    theorem13_diagnostic,
    theorem15_diagnostic,
    d,
    ell,
)
from .construction import (
    ConstructionFailure,
    ConstructionParams,
    PhiSchedule,
    QSchedule,
    ResourceLimitError,
    recertify_trace,
    run,
)
from .intervals import as_rational, format_rational
from . import render, traceio

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_VALIDATION = 3
EXIT_IO = 4
EXIT_PARSE = 5
EXIT_RESOURCE = 6
EXIT_CONSTRUCTION = 7
EXIT_VERIFY = 8


class CliError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


def _load_spec(path) -> CantorSpec:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise CliError(f"cannot read spec: {exc}", EXIT_IO)
    except json.JSONDecodeError as exc:
        raise CliError(f"spec is not valid JSON: {exc}", EXIT_VALIDATION)
    try:
        return CantorSpec.from_json(data)
    except SpecError as exc:
        raise CliError(f"invalid spec: {exc}", EXIT_VALIDATION)


def _parse_rect(text: str) -> ParamRect:
    parts = text.split(",")
    if len(parts) != 4:
        raise CliError("--rect needs four values a,b,A,B", EXIT_VALIDATION)
    try:
        return ParamRect.from_signed(*(as_rational(p) for p in parts))
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise CliError(f"invalid rectangle: {exc}", EXIT_VALIDATION)


def _rational(text: str, name: str):
    try:
        return as_rational(text)
    except (TypeError, ValueError, ZeroDivisionError):
        raise CliError(f"{name} must be an exact rational like 1/2, got {text!r}", EXIT_VALIDATION)


def _write(path, text):
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc}", EXIT_IO)


def _load_trace(path):
    try:
        return traceio.load(path)
    except OSError as exc:
        raise CliError(f"cannot read trace: {exc}", EXIT_IO)
    except traceio.TraceFormatError as exc:
        raise CliError(f"corrupted trace: {exc}", EXIT_PARSE)


def _build_table(trace) -> str:
    head = f"{'n':>3} {'phi':>4} {'f_n':>12} {'m(F_n)':>12} {'tries':>5} {'S_n':>7} {'faces':>8} {'min_p':>6} {'bound':>12}"
    lines = [head]
    for s, v, b in zip(trace.states, trace.verdicts, trace.bound_values):
        lines.append(
            f"{s.n:>3} {s.phi_n:>4} {format_rational(s.f_n):>12} {float(s.measure):>12.6g} "
            f"{s.attempts:>5} {v.S_n:>7} {v.faces_checked:>8} {str(v.min_p):>6} "
            f"{'-' if b is None else format(float(b), '.4g'):>12}"
        )
    return "\n".join(lines)


def cmd_build(args) -> int:
    spec = _load_spec(args.spec)
    rect = _parse_rect(args.rect)
    try:
        if args.phi_override:
            phi = PhiSchedule.parse_override(args.phi_override)
        else:
            phi = PhiSchedule(eta=_rational(args.eta, "--eta"))
        q = QSchedule() if args.q is None else QSchedule("constant", _rational(args.q, "--q"))
        params = ConstructionParams(rect=rect, phi=phi, depth=args.depth, seed=args.seed,
                                    retry_cap=args.retry_cap, q_schedule=q)
    except ResourceLimitError as exc:
        raise CliError(str(exc), EXIT_RESOURCE)
    except (TypeError, ValueError) as exc:
        raise CliError(f"invalid parameters: {exc}", EXIT_VALIDATION)
    try:
        trace = run(spec, params, workers=args.workers)
    except ConstructionFailure as exc:
        print(f"construction failed: {exc}", file=sys.stderr)
        if exc.counterexample is not None:
            x, t = exc.counterexample
            print(f"counterexample: x={format_rational(x)} t={format_rational(t)}", file=sys.stderr)
        return EXIT_CONSTRUCTION
    except (ResourceLimitError, GenerationLimitError) as exc:
        raise CliError(str(exc), EXIT_RESOURCE)
    _write(args.out, traceio.dumps(trace))
    print(_build_table(trace))
    if trace.outside_asymptotic_regime:
        print("note: phi override in use; the bad-probability bound need not vanish")
    return EXIT_OK


def cmd_verify(args) -> int:
    trace = _load_trace(args.trace)
    checks = recertify_trace(trace, mode=args.mode, samples=args.samples,
                             sample_seed=args.sample_seed, workers=args.workers)
    report = {"mode": args.mode, "holds": all(c.holds for c in checks), "generations": []}
    for c in checks:
        entry = {"n": c.n, "holds": c.holds, "problems": c.problems}
        if c.verdict is not None:
            entry["verdict"] = c.verdict.to_json()
        if args.mode == "sample":
            entry["samples"] = c.samples
            entry["violations"] = len(c.violations)
        ce = c.counterexample
        if ce is not None:
            entry["counterexample"] = {"x": format_rational(ce[0]), "t": format_rational(ce[1])}
        report["generations"].append(entry)
        status = "ok" if c.holds else "FAIL"
        msg = f"n={c.n}: {status}"
        if c.problems:
            msg += " (" + "; ".join(c.problems) + ")"
        if ce is not None:
            msg += f" counterexample x={format_rational(ce[0])} t={format_rational(ce[1])}"
        print(msg)
    if args.out:
        _write(args.out, json.dumps(report, indent=2) + "\n")
    return EXIT_OK if report["holds"] else EXIT_VERIFY


def diagnose_rows(spec: CantorSpec, max_n: int, epsilon) -> list:
    t12 = theorem12_diagnostic(spec, max_n)
    t13 = theorem13_diagnostic(spec, max_n)
    t15 = theorem15_diagnostic(spec, max_n, epsilon)
    rows = []
    for r12, r13, r15 in zip(t12.rows, t13.rows, t15.rows):
        n = r13.n
        rows.append({
            "n": n,
            "r_n": format_rational(spec.ratio(n)),
            "ell_n": format_rational(ell(spec, n)),
            "d_n": format_rational(d(spec, n)),
            "thin_n": d(spec, n) > ell(spec, n),
            "ell_n_approx": f"{float(ell(spec, n)):.6e}",
            "delta_L_n": format_rational(r12.value),
            "thm12_ratio": f"{r12.ratio:.6g}",
            "thm13_ratio": f"{r13.ratio:.6g}",
            "thm15_ratio": f"{r15.ratio:.6g}",
        })
    return rows


def cmd_diagnose(args) -> int:
    spec = _load_spec(args.spec)
    eps = _rational(args.epsilon, "--epsilon")
    if args.max_n < 1:
        raise CliError("--max-n must be >= 1", EXIT_VALIDATION)
    try:
        rows = diagnose_rows(spec, args.max_n, eps)
    except ValueError as exc:
        raise CliError(str(exc), EXIT_VALIDATION)
    thickness = newhouse_thickness(spec, args.max_n)
    t15 = theorem15_diagnostic(spec, args.max_n, eps)
    print(f"newhouse thickness (n <= {args.max_n}): {format_rational(thickness)} ~ {float(thickness):.6g}")
    print(f"thin (d_n > l_n for all n): {spec.thin}")
    print(f"eps={format_rational(eps)} ratio strictly decreasing from n={t15.decreasing_from()}")
    cols = ["n", "ell_n_approx", "thin_n", "thm12_ratio", "thm13_ratio", "thm15_ratio"]
    print(" ".join(f"{c:>14}" for c in cols))
    for row in rows:
        print(" ".join(f"{str(row[c]):>14}" for c in cols))
    if args.csv:
        try:
            with open(args.csv, "w", newline="", encoding="utf-8") as fh:
                writer = csv.DictWriter(fh, fieldnames=list(rows[0]))
                writer.writeheader()
                writer.writerows(rows)
        except OSError as exc:
            raise CliError(f"cannot write {args.csv}: {exc}", EXIT_IO)
    return EXIT_OK


def cmd_render(args) -> int:
    if args.trace:
        svg = render.render_trace(_load_trace(args.trace), width=args.width)
    elif args.spec:
        svg = render.render_spec(_load_spec(args.spec), args.depth, width=args.width)
    else:
        raise CliError("render needs --trace or --spec", EXIT_VALIDATION)
    _write(args.out, svg)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cantor-avoid", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", help="construct F_1..F_depth and certify each generation")
    b.add_argument("--spec", required=True)
    b.add_argument("--rect", required=True, help="a,b,A,B as exact rationals")
    g = b.add_mutually_exclusive_group(required=True)
    g.add_argument("--eta", help="phi(n) = floor(n^(1+eta))")
    g.add_argument("--phi-override", help="linear schedule such as n+1 or 2n")
    b.add_argument("--depth", type=int, required=True)
    b.add_argument("--seed", type=int, required=True)
    b.add_argument("--retry-cap", type=int, default=64)
    b.add_argument("--q", help="constant retention probability in (0, 1/4)")
    b.add_argument("--workers", type=int, default=1)
    b.add_argument("--out", required=True)
    b.set_defaults(func=cmd_build)

    v = sub.add_parser("verify", help="re-certify a stored trace")
    v.add_argument("--trace", required=True)
    v.add_argument("--mode", choices=["arrangement", "sample"], default="arrangement")
    v.add_argument("--samples", type=int, default=10_000)
    v.add_argument("--sample-seed", type=int, default=0)
    v.add_argument("--workers", type=int, default=1)
    v.add_argument("--out")
    v.set_defaults(func=cmd_verify)

    dg = sub.add_parser("diagnose", help="decay tables and thickness for a spec")
    dg.add_argument("--spec", required=True)
    dg.add_argument("--max-n", type=int, required=True)
    dg.add_argument("--epsilon", default="1/2")
    dg.add_argument("--csv")
    dg.set_defaults(func=cmd_diagnose)

    r = sub.add_parser("render", help="SVG of generations")
    r.add_argument("--trace")
    r.add_argument("--spec")
    r.add_argument("--depth", type=int, default=3)
    r.add_argument("--out", required=True)
    r.add_argument("--width", type=int, default=800)
    r.set_defaults(func=cmd_render)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
