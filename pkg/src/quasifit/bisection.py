"""Bisection on the deviation level with the LP emptiness oracle.

The uniform error of a quasiaffine model is a quasiconvex function of the
coefficients, so its sublevel sets are nested polytopes.  Starting from the
bracket [0, u0], where u0 is the deviation at the initial coefficients, each
step solves the level-z feasibility LP at the midpoint: optimum u* <= 0
means the level set is nonempty, so the upper bound moves down to z and the
solution is kept; otherwise the lower bound moves up to z.  The bracket
halves exactly, so the loop runs ceil(log2(u0 / epsilon)) times.

The coefficients returned are those of the last feasible oracle call, and
the reported deviation is recomputed from them by direct evaluation, which
is the honest number when the LP stops inside its own tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .grid import SampledFunction
from .linearize import LinearProgram, build_feasibility_lp
from .models import Coefficients, ModelClass, default_initial_coefficients, evaluate_model_values
from .simplex import INFEASIBLE, OPTIMAL, UNBOUNDED, solve

__all__ = ["FitResult", "TraceEntry", "FitError", "OracleFailure", "fit", "certify_bracket", "expected_iterations"]


class FitError(RuntimeError):
    """Fit could not start or the oracle returned an impossible verdict."""


class OracleFailure(FitError):
    """The LP solver failed numerically; carries the level being tested."""

    def __init__(self, z: float, status: str):
        super().__init__(f"LP oracle failed with status {status!r} at level z={z}")
        self.z = z
        self.status = status


@dataclass(frozen=True)
class TraceEntry:
    z: float
    feasible: bool
    lp_objective: float | None


@dataclass
class FitResult:
    coefficients: Coefficients
    lower: float
    upper: float
    achieved_deviation: float
    iterations: int
    trace: list[TraceEntry] = field(default_factory=list)

    @property
    def certified_bounds(self) -> tuple[float, float]:
        return (self.lower, self.upper)


def _oracle(
    model: ModelClass, f: SampledFunction, z: float, lp_max_iterations: int | None = None
) -> tuple[bool, Coefficients | None, float | None]:
    """Decide level-z emptiness; when nonempty also return witness coefficients."""
    lp = build_feasibility_lp(model, f, z)
    sol = solve(lp, max_iterations=lp_max_iterations)
    if sol.status == OPTIMAL:
        if sol.objective <= 0.0:
            return True, model.coefficients_from_free(sol.solution[:-1]), sol.objective
        return False, None, sol.objective
    if sol.status == UNBOUNDED:
        # u only ever relaxes constraints, so an unbounded objective means
        # points with u <= 0 exist; re-solve with a floor on u to extract one
        bounded = _with_u_floor(lp)
        sol2 = solve(bounded, max_iterations=lp_max_iterations)
        if sol2.status != OPTIMAL or sol2.objective > 0.0:
            raise OracleFailure(z, f"unbounded oracle could not be re-solved ({sol2.status})")
        return True, model.coefficients_from_free(sol2.solution[:-1]), sol2.objective
    if sol.status == INFEASIBLE:
        # positivity rows do not depend on z and the start was feasible
        raise FitError(
            f"oracle reported an infeasible LP at level z={z}, which contradicts "
            "the feasible starting coefficients"
        )
    raise OracleFailure(z, sol.status)


def _with_u_floor(lp: LinearProgram) -> LinearProgram:
    row = np.zeros(lp.variable_count)
    row[-1] = -1.0
    return LinearProgram(
        lp.objective,
        np.vstack([lp.rows, row]),
        np.concatenate([lp.rhs, [1.0]]),
        lp.names,
    )


def fit(
    model: ModelClass,
    f: SampledFunction,
    epsilon: float = 1e-6,
    initial: Coefficients | None = None,
    lp_max_iterations: int | None = None,
) -> FitResult:
    """Minimise the uniform deviation of the model over the sampled function."""
    if not (epsilon > 0):
        raise ValueError("epsilon must be positive")
    if initial is None:
        initial = default_initial_coefficients(model, f.points)
    g0 = evaluate_model_values(model, initial, f.points)
    u0 = float(np.max(np.abs(f.values - g0)))

    lower = 0.0
    upper = u0
    best: Coefficients | None = None
    trace: list[TraceEntry] = []
    while upper - lower > epsilon:
        z = 0.5 * (upper + lower)
        feasible, coeffs, obj = _oracle(model, f, z, lp_max_iterations)
        trace.append(TraceEntry(z, feasible, obj))
        if feasible:
            upper = z
            best = coeffs
        else:
            lower = z

    final = best if best is not None else initial
    g = evaluate_model_values(model, final, f.points)
    achieved = float(np.max(np.abs(f.values - g)))
    return FitResult(final, lower, upper, achieved, len(trace), trace)


def expected_iterations(u0: float, epsilon: float) -> int:
    """ceil(log2(u0 / epsilon)), the exact bisection step count."""
    if u0 <= epsilon:
        return 0
    return int(np.ceil(np.log2(u0 / epsilon)))


def certify_bracket(
    model: ModelClass, f: SampledFunction, result: FitResult, epsilon: float
) -> tuple[bool, bool | None]:
    """Post-hoc oracle certificate for a finished fit.

    Returns (upper_feasible, lower_infeasible): the level u + epsilon must be
    feasible, and when l > 0 the level l - min(epsilon, l/2) must be
    infeasible.  The second entry is None when l = 0.
    """
    up_ok, _, _ = _oracle(model, f, result.upper + epsilon)
    if result.lower <= 0.0:
        return up_ok, None
    probe = result.lower - min(epsilon, result.lower / 2.0)
    low_feasible, _, _ = _oracle(model, f, probe)
    return up_ok, not low_feasible
