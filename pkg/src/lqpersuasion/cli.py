"""Batch front end: instance ingestion, program solving, sweeps, examples.

Instance files are JSON (schema_version "1"), matrices row-major arrays of
arrays.  All numeric output is serialized with 17 significant digits, LF
newlines, UTF-8 — identical inputs produce byte-identical outputs.

Exit codes: 0 success, 2 malformed input, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import evaluator, instance as inst, programs
from .errors import InputError, NumericalError

PROGRAMS = ("bp", "pp", "uop", "pop", "spop")


# --------------------------------------------------------------------------
# serialization (17 significant digits, deterministic)
# --------------------------------------------------------------------------


def _fmt(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return format(float(x), ".17g")


def _dump_json(obj, indent: int = 0) -> str:
    pad = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [
            f'{pad}  {json.dumps(k)}: {_dump_json(v, indent + 1)}'
            for k, v in obj.items()
        ]
        return "{\n" + ",\n".join(items) + f"\n{pad}}}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        flat = all(not isinstance(v, (dict, list, tuple)) for v in obj)
        if flat:
            return "[" + ", ".join(_dump_json(v) for v in obj) + "]"
        items = [f"{pad}  {_dump_json(v, indent + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + f"\n{pad}]"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt(float(obj))
    if obj is None:
        return "null"
    return json.dumps(obj)


def _matrix(a: np.ndarray) -> list[list[float]]:
    return [[float(x) for x in row] for row in np.atleast_2d(np.asarray(a, float))]


def _write_text(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_bytes(text.encode("utf-8"))


# --------------------------------------------------------------------------
# instance ingestion
# --------------------------------------------------------------------------


class InstanceFileError(InputError):
    """Malformed instance file (reported with field diagnostics, exit 2)."""


def _req(d: dict, key: str, where: str):
    if key not in d:
        raise InstanceFileError(f"missing field {key!r} in {where}")
    return d[key]


def _np(x, where: str) -> np.ndarray:
    try:
        a = np.asarray(x, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InstanceFileError(f"field {where} is not numeric: {exc}") from None
    if not np.all(np.isfinite(a)):
        raise InstanceFileError(f"field {where} has non-finite entries")
    return a


def parse_instance(path: str):
    """Read an instance file; returns (QuadraticForm, hypothesis, PriorSpec)."""
    try:
        raw = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InstanceFileError(f"cannot read {path}: {exc}") from None
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise InstanceFileError(
            f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from None
    if not isinstance(doc, dict):
        raise InstanceFileError(f"{path}: top level must be an object")
    if str(doc.get("schema_version")) != "1":
        raise InstanceFileError(f"{path}: unsupported schema_version "
                                f"{doc.get('schema_version')!r} (expected \"1\")")
    n = _req(doc, "n", "instance")
    if not isinstance(n, int) or n < 1:
        raise InstanceFileError("field 'n' must be a positive integer")

    forms = [k for k in ("raw", "reduced") if k in doc]
    if len(forms) != 1:
        raise InstanceFileError("exactly one of 'raw' or 'reduced' must be present")
    if forms[0] == "reduced":
        red = doc["reduced"]
        qf = inst.QuadraticForm(
            n=n,
            Q=_np(_req(red, "Q", "reduced"), "reduced.Q"),
            l=_np(red.get("l", [0.0] * (2 * n)), "reduced.l"),
            r=float(red.get("r", 0.0)),
        )
    else:
        rg = doc["raw"]
        k = _req(rg, "k", "raw")
        game = inst.RawGame(
            n=n, k=int(k),
            M=_np(_req(rg, "M", "raw"), "raw.M"),
            p=_np(rg.get("p", [0.0] * (n + int(k))), "raw.p"),
            q=float(rg.get("q", 0.0)),
            B=_np(_req(rg, "B", "raw"), "raw.B"),
            b=_np(rg.get("b", [0.0] * int(k)), "raw.b"),
        )
        qf = inst.decompose_nonneg(game)

    hyp_doc = _req(doc, "hypothesis", "instance")
    if not isinstance(hyp_doc, dict) or len(hyp_doc) != 1:
        raise InstanceFileError("'hypothesis' must hold exactly one builder key")
    (kind, params), = hyp_doc.items()
    if kind == "matrix":
        hyp = inst.EllipsoidalHypothesis(C=_np(params, "hypothesis.matrix"))
    elif kind == "scaled_identity":
        hyp = inst.hypothesis_wasserstein(float(params), n)
    elif kind == "wasserstein":
        hyp = inst.hypothesis_wasserstein(float(_req(params, "epsilon", kind)), n)
    elif kind == "costly_update":
        hyp = inst.hypothesis_costly_update(
            _np(_req(params, "R", kind), "costly_update.R"), n,
            float(_req(params, "epsilon", kind)),
        )
    elif kind == "mismatched_prior":
        hyp = inst.hypothesis_mismatched_prior(
            float(_req(params, "epsilon", kind)), n,
            params.get("trace_sigma_bound"),
        )
    elif kind == "affine_distortion":
        hyp = inst.hypothesis_affine_distortion(
            float(_req(params, "chi", kind)),
            float(_req(params, "epsilon", kind)), n,
        )
    else:
        raise InstanceFileError(f"unknown hypothesis kind {kind!r}")

    prior_doc = doc.get("prior", {"family": "gaussian", "n": n})
    prior = inst.PriorSpec(
        family=str(_req(prior_doc, "family", "prior")),
        n=int(prior_doc.get("n", n)),
    )
    if prior.n != n:
        raise InstanceFileError("prior dimension differs from instance dimension")
    return qf, hyp, prior


def _base_hypothesis(hyp: inst.EllipsoidalHypothesis) -> np.ndarray:
    """The sweep's unit-scale shape matrix C0 (scale stripped when known)."""
    if hyp.base is not None:
        return hyp.base
    return hyp.C


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------


def cmd_solve(args) -> int:
    qf, hyp, prior = parse_instance(args.instance)
    dc = inst.derive_coefficients(qf, hyp)
    ps = inst.prior_stats(prior)
    rho = args.rho if args.rho is not None else programs.default_rho(dc)
    names = PROGRAMS if args.program == "all" else (args.program,)

    solvers = {
        "bp": lambda: programs.solve_bp(dc),
        "pp": lambda: programs.solve_pp(dc, rho),
        "uop": lambda: programs.solve_uop(dc),
        "pop": lambda: programs.solve_pop(dc, ps, rho),
        "spop": lambda: programs.solve_spop(dc, ps, rho),
    }
    results = []
    for name in names:
        sol = solvers[name]()
        results.append(
            {
                "program": sol.program,
                "value": sol.value,
                "rank": sol.rank,
                "rho": sol.rho,
                "Sigma": _matrix(sol.Sigma),
                "projection": _matrix(sol.projection),
            }
        )

    dc0 = inst.derive_coefficients(
        qf, inst.EllipsoidalHypothesis(C=_base_hypothesis(hyp))
    )
    s_raw = programs.pessimistic_noinfo_threshold(dc0.D, dc0.E, dc0.f)
    record = {
        "schema_version": "1",
        "rho": rho,
        "coefficients": {
            "D": _matrix(dc.D),
            "E": _matrix(dc.E),
            "f": dc.f,
            "c": dc.c,
            "lambda_bar": dc.lambda_bar,
            "lambda_bar_2": dc.lambda_bar_2,
            "t_bar": dc.t_bar,
        },
        "pessimistic_noinfo_threshold": {
            "raw_inequality_solution_s": s_raw,
            "reading_eps_equals_s": s_raw,
            "reading_eps_equals_sqrt_s": math.sqrt(s_raw)
            if math.isfinite(s_raw)
            else s_raw,
        },
        "results": results,
    }
    _write_text(args.out, _dump_json(record) + "\n")
    return 0


def _csv_rows(rows, with_mc: bool) -> str:
    header = "epsilon,val_uop,val_pop,val_spop,val_pp,val_2uop,rank_pp"
    if with_mc:
        header += ",mc_true_mean,mc_true_stderr"
    lines = [header]
    for r in rows:
        cells = [
            _fmt(r.epsilon).strip('"'),
            _fmt(r.val_uop).strip('"'),
            _fmt(r.val_pop).strip('"'),
            _fmt(r.val_spop).strip('"'),
            _fmt(r.val_pp).strip('"'),
            _fmt(r.val_2uop).strip('"'),
            str(r.rank_pp),
        ]
        if with_mc:
            cells += [_fmt(r.mc_true_mean).strip('"'), _fmt(r.mc_true_stderr).strip('"')]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def cmd_sweep(args) -> int:
    qf, hyp, prior = parse_instance(args.instance)
    c0 = _base_hypothesis(hyp)
    dc_base = inst.derive_coefficients(qf, inst.EllipsoidalHypothesis(C=c0))
    ps = inst.prior_stats(prior)
    rho = args.rho if args.rho is not None else programs.default_rho(dc_base)
    if args.steps < 1:
        raise InstanceFileError("--steps must be >= 1")
    if args.steps == 1:
        grid = [args.eps_lo]
    else:
        grid = list(np.linspace(args.eps_lo, args.eps_hi, args.steps))
    mc = None
    if args.mc_samples is not None:
        mc = {"samples": args.mc_samples, "seed": args.mc_seed}
    rows = programs.sweep(
        dc_base, ps, grid, rho, qf=qf, C0=c0, prior=prior, mc=mc
    )
    _write_text(args.out, _csv_rows(rows, with_mc=mc is not None))
    return 0


def cmd_example(args) -> int:
    if args.steps == 1:
        grid = [args.eps_lo]
    else:
        grid = list(np.linspace(args.eps_lo, args.eps_hi, args.steps))
    if args.which == "oned":
        triple = evaluator.thresholds_1d(args.k)
        table = evaluator.oned_table
        rows = [(e, table(args.k, float(e))) for e in grid]
    else:
        triple = evaluator.opening_thresholds(args.k, args.n)
        rows = [(e, evaluator.opening_table(args.k, args.n, float(e))) for e in grid]
    cols = ("abp_ni", "abp_fi", "pp_ni", "pp_fi", "pop_ni", "pop_fi")
    lines = ["epsilon," + ",".join(cols)]
    for e, vals in rows:
        lines.append(
            ",".join([_fmt(float(e)).strip('"')] + [_fmt(vals[c]).strip('"') for c in cols])
        )
    _write_text(args.out, "\n".join(lines) + "\n")

    sys.stdout.write(
        f"eps_minus={_fmt(triple.eps_minus)} eps_star={_fmt(triple.eps_star)} "
        f"eps_plus={_fmt(triple.eps_plus)}\n"
    )
    if args.which == "opening":
        sys.stdout.write(
            f"eps_plus_over_eps_minus={_fmt(triple.eps_plus / triple.eps_minus)}\n"
        )
        if args.out is not None:
            # radius-threshold policy scan at the top of the epsilon grid
            eps = float(grid[-1])
            gap = abs(1.0 - args.k)
            if eps > 0.0 and gap > 0.0:
                r_star = 2.0 * eps * gap / (2.0 * args.k - 1.0)
                scan = evaluator.radius_scan(
                    args.k, args.n, eps, r_star * 1.01, r_star * 4.0, 40
                )
                scan_path = str(Path(args.out).with_suffix("")) + "_radius.csv"
                scan_lines = ["R,cost"] + [
                    f"{_fmt(r).strip(chr(34))},{_fmt(cst).strip(chr(34))}"
                    for r, cst in scan
                ]
                _write_text(scan_path, "\n".join(scan_lines) + "\n")
    return 0


# --------------------------------------------------------------------------
# argument parsing / entry point
# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lqpersuasion",
        description=(
            "Solve and bound almost-Bayesian linear-quadratic persuasion "
            "programs (BP/PP/UOP/POP/SPOP) with certified suboptimality."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="solve one or all programs")
    p_solve.add_argument("--instance", required=True, help="instance JSON path")
    p_solve.add_argument("--program", default="all", choices=PROGRAMS + ("all",))
    p_solve.add_argument("--rho", type=float, default=None,
                         help="suboptimality budget (default 1e-6*(1+|BP|))")
    p_solve.add_argument("--out", default=None, help="output path (default stdout)")
    p_solve.set_defaults(func=cmd_solve)

    p_sweep = sub.add_parser("sweep", help="homothetic hypothesis sweep C = eps*C0")
    p_sweep.add_argument("--instance", required=True)
    p_sweep.add_argument("--eps-lo", type=float, default=0.0)
    p_sweep.add_argument("--eps-hi", type=float, default=2.5)
    p_sweep.add_argument("--steps", type=int, default=200)
    p_sweep.add_argument("--rho", type=float, default=None)
    p_sweep.add_argument("--mc-samples", type=int, default=None)
    p_sweep.add_argument("--mc-seed", type=int, default=0)
    p_sweep.add_argument("--out", default=None)
    p_sweep.set_defaults(func=cmd_sweep)

    p_ex = sub.add_parser("example", help="closed-form tables and thresholds")
    p_ex.add_argument("--which", required=True, choices=("oned", "opening"))
    p_ex.add_argument("--k", type=float, default=2.0)
    p_ex.add_argument("--n", type=int, default=1)
    p_ex.add_argument("--eps-lo", type=float, default=0.0)
    p_ex.add_argument("--eps-hi", type=float, default=6.0)
    p_ex.add_argument("--steps", type=int, default=61)
    p_ex.add_argument("--out", default=None)
    p_ex.set_defaults(func=cmd_example)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
