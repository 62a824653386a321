"""Batch command line front door.

Three subcommands: `fit` runs a minimax fit from a JSON config and writes a
result JSON plus an optional surface CSV; `verify` re-checks a finished 1-D
fit against the alternation count it needs for optimality; `convexity`
exposes the finite convexity toolkit over small text files.

Exit codes: 0 success, 2 config or input error, 3 infeasible start,
4 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from typing import Any, Sequence, TextIO

import numpy as np

from . import axiomatic
from .bisection import FitError, OracleFailure, fit
from .expr import ExprError, parse
from .grid import Grid, SampledFunction, sample
from .models import (
    BasisSpec,
    Coefficients,
    InfeasibleInitialCoefficientsError,
    ModelClass,
    MonotoneOuter,
    evaluate_model_values,
)
from .oscillation import (
    check_polynomial_optimality,
    check_rational_optimality,
    compute_defect,
    effective_degree,
    extract_alternations,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INFEASIBLE = 3
EXIT_NUMERICAL = 4

log = logging.getLogger("quasifit")


class ConfigError(ValueError):
    pass


def _build_model(config: dict) -> tuple[ModelClass, Any, Grid]:
    try:
        variables = [str(v) for v in config["variables"]]
        target_src = config["target"]
        grid_cfg = config["grid"]
        model_cfg = config["model"]
    except KeyError as exc:
        raise ConfigError(f"missing config key: {exc}") from None

    grid = Grid(
        tuple(float(v) for v in _as_vector(grid_cfg["lower"], len(variables))),
        tuple(float(v) for v in _as_vector(grid_cfg["upper"], len(variables))),
        tuple(float(v) for v in _as_vector(grid_cfg["step"], len(variables))),
    )

    try:
        target = parse(target_src, variables)
        numerator = BasisSpec.from_sources(model_cfg["numerator_basis"], variables)
        denominator = None
        fixed = None
        if model_cfg.get("denominator_basis"):
            denominator = BasisSpec.from_sources(model_cfg["denominator_basis"], variables)
            fixed_cfg = model_cfg.get("fixed_coefficient")
            if fixed_cfg is None:
                raise ConfigError("a denominator_basis requires fixed_coefficient {index, value}")
            fixed = (int(fixed_cfg["index"]), float(fixed_cfg["value"]))
    except ExprError as exc:
        raise ConfigError(f"expression error: {exc}") from exc

    outer_kind = model_cfg.get("outer", "identity")
    if outer_kind == "identity":
        outer = MonotoneOuter.identity()
    elif outer_kind == "odd_power":
        outer = MonotoneOuter.odd_power(int(model_cfg.get("power", 1)))
    else:
        raise ConfigError(f"unknown outer kind {outer_kind!r}")

    model = ModelClass(
        variables=tuple(variables),
        outer=outer,
        numerator=numerator,
        denominator=denominator,
        fixed_coefficient=fixed,
        delta=float(model_cfg.get("delta", 1e-4)),
    )
    return model, target, grid


def _as_vector(v, d: int) -> list[float]:
    if isinstance(v, (int, float)):
        return [float(v)] * d
    vec = [float(x) for x in v]
    if len(vec) != d:
        raise ConfigError(f"expected {d} entries, got {len(vec)}")
    return vec


def _write_surface_csv(out: TextIO, points: np.ndarray, fvals: np.ndarray, gvals: np.ndarray) -> None:
    d = points.shape[1]
    header = [f"x{i + 1}" for i in range(d)] + ["f", "g", "residual"]
    out.write(",".join(header) + "\n")
    for k in range(points.shape[0]):
        cells = [repr(float(c)) for c in points[k]]
        cells += [repr(float(fvals[k])), repr(float(gvals[k])), repr(float(fvals[k] - gvals[k]))]
        out.write(",".join(cells) + "\n")


def _emit_error(code: int, kind: str, message: str) -> int:
    sys.stderr.write(json.dumps({"error": {"kind": kind, "message": message}}) + "\n")
    return code


def cmd_fit(config_path: str) -> int:
    try:
        with open(config_path) as fh:
            config = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        return _emit_error(EXIT_CONFIG, "config", f"cannot read config: {exc}")

    try:
        model, target, grid = _build_model(config)
        solver_cfg = config.get("solver", {})
        epsilon = float(solver_cfg.get("epsilon", 1e-6))
        lp_cap = solver_cfg.get("max_iterations")
        lp_cap = int(lp_cap) if lp_cap is not None else None
        output_cfg = config["output"]
        result_path = output_cfg["result_path"]
        surface_path = output_cfg.get("surface_path")
    except (ConfigError, KeyError, TypeError, ValueError) as exc:
        return _emit_error(EXIT_CONFIG, "config", str(exc))

    try:
        sampled = sample(target, grid, model.variables)
    except ExprError as exc:
        return _emit_error(EXIT_CONFIG, "evaluation", str(exc))

    log.info("fitting %d points, %d free coefficients", len(sampled), len(model.coefficient_names()))
    try:
        result = fit(model, sampled, epsilon=epsilon, lp_max_iterations=lp_cap)
    except InfeasibleInitialCoefficientsError as exc:
        return _emit_error(EXIT_INFEASIBLE, "infeasible_start", str(exc))
    except OracleFailure as exc:
        return _emit_error(EXIT_NUMERICAL, "solver", str(exc))
    except FitError as exc:
        return _emit_error(EXIT_NUMERICAL, "solver", str(exc))

    gvals = evaluate_model_values(model, result.coefficients, sampled.points)

    certificate = None
    if sampled.dimension == 1:
        residuals = SampledFunction(sampled.points, sampled.values - gvals)
        certificate = extract_alternations(residuals).to_dict()

    payload = {
        "config": config,
        "coefficients": {
            "numerator": list(result.coefficients.numerator),
            "denominator": (
                list(result.coefficients.denominator)
                if result.coefficients.denominator is not None
                else None
            ),
        },
        "achieved_deviation": result.achieved_deviation,
        "certified_bounds": [result.lower, result.upper],
        "iterations": result.iterations,
        "trace": [[entry.z, entry.feasible] for entry in result.trace],
        "certificate": certificate,
        "surface_path": surface_path,
    }
    with open(result_path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    if surface_path:
        with open(surface_path, "w") as fh:
            _write_surface_csv(fh, sampled.points, sampled.values, gvals)
    print(json.dumps({
        "achieved_deviation": result.achieved_deviation,
        "certified_bounds": [result.lower, result.upper],
        "iterations": result.iterations,
        "result_path": result_path,
    }, sort_keys=True))
    return EXIT_OK


def cmd_verify(result_path: str, n: int, m: int | None, tau: float) -> int:
    try:
        with open(result_path) as fh:
            result = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        return _emit_error(EXIT_CONFIG, "input", f"cannot read result: {exc}")

    surface_path = result.get("surface_path")
    if not surface_path:
        return _emit_error(EXIT_CONFIG, "input", "result has no surface_path; rerun fit with one")
    try:
        with open(surface_path) as fh:
            header = fh.readline().strip().split(",")
            data = np.loadtxt(fh, delimiter=",", ndmin=2)
    except OSError as exc:
        return _emit_error(EXIT_CONFIG, "input", f"cannot read surface: {exc}")

    coord_cols = [i for i, name in enumerate(header) if name.startswith("x")]
    if len(coord_cols) != 1:
        return _emit_error(
            EXIT_CONFIG, "input",
            f"alternation checks need a 1-D fit; surface has {len(coord_cols)} coordinates",
        )
    residuals = SampledFunction(data[:, coord_cols[0]].reshape(-1, 1), data[:, header.index("residual")])
    report = extract_alternations(residuals, tau=tau)

    if m is None:
        optimal = check_polynomial_optimality(n, report)
        needed = n + 2
        defect = None
    else:
        coeffs = result.get("coefficients", {})
        p = effective_degree(coeffs.get("numerator", []))
        q = effective_degree(coeffs.get("denominator") or [0.0])
        info = compute_defect(n, m, min(p, n), min(q, m))
        optimal = check_rational_optimality(n, m, info.defect, report)
        needed = n + m + 2 - info.defect
        defect = info.defect

    print(json.dumps({
        "certificate": report.to_dict(),
        "required_count": needed,
        "defect": defect,
        "verdict": "optimal" if optimal else "not-certified",
    }, sort_keys=True))
    return EXIT_OK


def cmd_convexity(sub: str, paths: Sequence[str], query: str | None) -> int:
    try:
        text = open(paths[0]).read()
    except OSError as exc:
        return _emit_error(EXIT_CONFIG, "input", f"cannot read input: {exc}")

    try:
        if sub == "extension":
            table = axiomatic.parse_function_table_csv(text)
            members = axiomatic.convexity_extension(table)
            fam = axiomatic.family_over_rows(table, members)
            print(json.dumps({
                "ground": list(fam.ground.labels),
                "members": fam.member_labels(),
            }, sort_keys=True))
            return EXIT_OK

        family = axiomatic.parse_family_text(text)
        if sub == "check":
            print(json.dumps({
                "closure_space": axiomatic.is_closure_space(family),
                "convexity_structure": axiomatic.is_convexity_structure(family),
            }, sort_keys=True))
        elif sub == "caratheodory":
            print(json.dumps({"caratheodory_number": axiomatic.caratheodory_number(family)}))
        elif sub == "hull":
            if not query:
                return _emit_error(EXIT_CONFIG, "input", "hull requires --set with element labels")
            labels = [t.strip() for t in query.split(",") if t.strip()]
            idx = [family.ground.index_of(lbl) for lbl in labels]
            result = axiomatic.hull(family, idx)
            print(json.dumps({"hull": [family.ground.labels[i] for i in sorted(result)]}))
        else:
            return _emit_error(EXIT_CONFIG, "input", f"unknown convexity subcommand {sub!r}")
    except (axiomatic.SizeGuardError, ValueError, KeyError) as exc:
        return _emit_error(EXIT_CONFIG, "input", str(exc))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="quasifit")
    subs = parser.add_subparsers(dest="command", required=True)

    p_fit = subs.add_parser("fit", help="run a minimax fit from a JSON config")
    p_fit.add_argument("config", help="path to the fit config JSON")

    p_verify = subs.add_parser("verify", help="alternation certificate for a 1-D fit result")
    p_verify.add_argument("result", help="path to a fit result JSON")
    p_verify.add_argument("--n", type=int, required=True, help="numerator degree")
    p_verify.add_argument("--m", type=int, default=None, help="denominator degree (rational fits)")
    p_verify.add_argument("--tau", type=float, default=1e-3, help="near-maximality threshold")

    p_conv = subs.add_parser("convexity", help="finite convexity computations")
    p_conv.add_argument("sub", choices=["hull", "caratheodory", "check", "extension"])
    p_conv.add_argument("files", nargs="+", help="family text file or function table CSV")
    p_conv.add_argument("--set", dest="query", default=None, help="comma-separated labels for hull")

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    level = os.environ.get("QUASIFIT_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), stream=sys.stderr)
    args = build_parser().parse_args(argv)
    if args.command == "fit":
        return cmd_fit(args.config)
    if args.command == "verify":
        return cmd_verify(args.result, args.n, args.m, args.tau)
    return cmd_convexity(args.sub, args.files, args.query)


if __name__ == "__main__":
    sys.exit(main())
