"""Approximation model classes.

A model is phi(r(x)) where phi is a strictly increasing outer function that
maps the reals onto the reals, and r is either a linear combination of
numerator basis functions or a ratio of two such combinations:

    r(x) = A . G(x)                    (linear-in-basis)
    r(x) = A . G(x) / B . H(x)         (generalised rational)

The denominator, when present, is normalised by hard-fixing one entry of B,
and must stay above a positivity margin delta on every evaluation point.
Surjectivity of phi onto the reals is required so that every deviation level
can be pulled back through phi inverse when the fit is linearised.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .expr import Expression, evaluate, parse, to_source

__all__ = [
    "BasisSpec",
    "MonotoneOuter",
    "ModelClass",
    "Coefficients",
    "DenominatorPositivityError",
    "InfeasibleInitialCoefficientsError",
    "evaluate_model",
    "evaluate_model_values",
    "default_initial_coefficients",
    "basis_matrix",
]


class DenominatorPositivityError(ValueError):
    """Denominator dropped below the positivity margin at some point."""

    def __init__(self, point, value: float, delta: float):
        super().__init__(
            f"denominator value {value} is below the margin {delta} at point {tuple(point)}"
        )
        self.point = tuple(point)
        self.value = value


class InfeasibleInitialCoefficientsError(ValueError):
    """Default initialisation violates denominator positivity; carries the failing points."""

    def __init__(self, failing_points):
        pts = [tuple(p) for p in failing_points]
        super().__init__(
            f"default denominator coefficients are infeasible at {len(pts)} point(s), "
            f"e.g. {pts[0]}; supply explicit starting coefficients"
        )
        self.failing_points = pts


@dataclass(frozen=True)
class BasisSpec:
    """Ordered list of basis expressions over the domain variables."""

    functions: tuple[Expression, ...]

    def __post_init__(self):
        if len(self.functions) == 0:
            raise ValueError("basis must be nonempty")
        object.__setattr__(self, "functions", tuple(self.functions))

    @classmethod
    def from_sources(cls, sources: Sequence[str], variables: Sequence[str]) -> "BasisSpec":
        return cls(tuple(parse(s, list(variables)) for s in sources))

    def sources(self) -> list[str]:
        return [to_source(f) for f in self.functions]

    def __len__(self) -> int:
        return len(self.functions)


@dataclass(frozen=True)
class MonotoneOuter:
    """Strictly increasing bijection of the reals: identity or an odd power."""

    kind: str  # "identity" | "odd_power"
    power: int = 1

    def __post_init__(self):
        if self.kind not in ("identity", "odd_power"):
            raise ValueError(f"unknown outer kind {self.kind!r}")
        if self.kind == "odd_power":
            if self.power < 1 or self.power % 2 == 0:
                raise ValueError("odd_power requires a positive odd integer power")
        elif self.power != 1:
            raise ValueError("identity outer has no power parameter")

    @classmethod
    def identity(cls) -> "MonotoneOuter":
        return cls("identity")

    @classmethod
    def odd_power(cls, p: int) -> "MonotoneOuter":
        return cls("odd_power", p)

    def forward(self, t: float) -> float:
        if self.kind == "identity":
            return float(t)
        return float(t) ** self.power

    def inverse(self, s: float) -> float:
        if self.kind == "identity":
            return float(s)
        return math.copysign(abs(float(s)) ** (1.0 / self.power), s)


@dataclass(frozen=True)
class ModelClass:
    variables: tuple[str, ...]
    outer: MonotoneOuter
    numerator: BasisSpec
    denominator: BasisSpec | None = None
    fixed_coefficient: tuple[int, float] | None = None  # (index into B, value)
    delta: float = 1e-4

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        if self.denominator is not None:
            if self.fixed_coefficient is None:
                raise ValueError("a denominator requires one fixed coefficient for normalisation")
            idx, val = self.fixed_coefficient
            if not (0 <= idx < len(self.denominator)):
                raise ValueError(f"fixed coefficient index {idx} out of range")
            object.__setattr__(self, "fixed_coefficient", (int(idx), float(val)))
        elif self.fixed_coefficient is not None:
            raise ValueError("fixed coefficient given without a denominator")
        if not (self.delta > 0):
            raise ValueError("delta must be positive")

    @property
    def has_denominator(self) -> bool:
        return self.denominator is not None

    def free_denominator_indices(self) -> list[int]:
        if self.denominator is None:
            return []
        fixed = self.fixed_coefficient[0]
        return [j for j in range(len(self.denominator)) if j != fixed]

    def coefficient_names(self) -> list[str]:
        names = [f"a{i + 1}" for i in range(len(self.numerator))]
        names += [f"b{j + 1}" for j in self.free_denominator_indices()]
        return names

    def coefficients_from_free(self, free: Sequence[float]) -> "Coefficients":
        """Assemble full coefficients from the free entries, in LP variable order."""
        free = [float(v) for v in free]
        n_g = len(self.numerator)
        if len(free) != n_g + len(self.free_denominator_indices()):
            raise ValueError("wrong number of free coefficients")
        a = tuple(free[:n_g])
        if self.denominator is None:
            return Coefficients(a, None)
        b = [0.0] * len(self.denominator)
        idx, val = self.fixed_coefficient
        b[idx] = val
        for j, v in zip(self.free_denominator_indices(), free[n_g:]):
            b[j] = v
        return Coefficients(a, tuple(b))


@dataclass(frozen=True)
class Coefficients:
    numerator: tuple[float, ...]  # A
    denominator: tuple[float, ...] | None = None  # B, full vector including the fixed entry

    def __post_init__(self):
        object.__setattr__(self, "numerator", tuple(float(v) for v in self.numerator))
        if self.denominator is not None:
            object.__setattr__(self, "denominator", tuple(float(v) for v in self.denominator))

    def free_vector(self, model: ModelClass) -> np.ndarray:
        vec = list(self.numerator)
        if model.denominator is not None:
            vec += [self.denominator[j] for j in model.free_denominator_indices()]
        return np.array(vec, dtype=float)


def _check_shapes(model: ModelClass, coeffs: Coefficients) -> None:
    if len(coeffs.numerator) != len(model.numerator):
        raise ValueError("numerator coefficient length does not match basis")
    if model.denominator is None:
        if coeffs.denominator is not None:
            raise ValueError("denominator coefficients given for a model without denominator")
        return
    if coeffs.denominator is None:
        raise ValueError("model has a denominator but no B coefficients were given")
    if len(coeffs.denominator) != len(model.denominator):
        raise ValueError("denominator coefficient length does not match basis")
    idx, val = model.fixed_coefficient
    if coeffs.denominator[idx] != val:
        raise ValueError(
            f"fixed denominator coefficient b{idx + 1} must equal {val}, "
            f"got {coeffs.denominator[idx]}"
        )


def basis_matrix(basis: BasisSpec, variables: Sequence[str], points: np.ndarray) -> np.ndarray:
    """Evaluate every basis function at every point: (N, len(basis)) array."""
    pts = np.atleast_2d(points)
    names = list(variables)
    out = np.empty((pts.shape[0], len(basis)), dtype=float)
    for k in range(pts.shape[0]):
        env = dict(zip(names, pts[k]))
        for j, fn in enumerate(basis.functions):
            out[k, j] = evaluate(fn, env)
    if not np.all(np.isfinite(out)):
        raise ValueError("basis function evaluated to a non-finite value on the domain")
    return out


def evaluate_model(model: ModelClass, coeffs: Coefficients, point: Sequence[float]) -> float:
    """g(A, x) at a single point; errors if the denominator dips below delta."""
    _check_shapes(model, coeffs)
    env = dict(zip(model.variables, [float(v) for v in point]))
    num = sum(a * evaluate(fn, env) for a, fn in zip(coeffs.numerator, model.numerator.functions))
    if model.denominator is None:
        return model.outer.forward(num)
    den = sum(b * evaluate(fn, env) for b, fn in zip(coeffs.denominator, model.denominator.functions))
    if den < model.delta * (1.0 - 1e-9) - 1e-12:
        raise DenominatorPositivityError(point, den, model.delta)
    return model.outer.forward(num / den)


def evaluate_model_values(model: ModelClass, coeffs: Coefficients, points: np.ndarray) -> np.ndarray:
    """g(A, x) over an (N, d) point array, in order."""
    _check_shapes(model, coeffs)
    pts = np.atleast_2d(points)
    gmat = basis_matrix(model.numerator, model.variables, pts)
    num = gmat @ np.asarray(coeffs.numerator)
    if model.denominator is None:
        r = num
    else:
        hmat = basis_matrix(model.denominator, model.variables, pts)
        den = hmat @ np.asarray(coeffs.denominator)
        bad = den < model.delta * (1.0 - 1e-9) - 1e-12
        if np.any(bad):
            k = int(np.argmax(bad))
            raise DenominatorPositivityError(pts[k], float(den[k]), model.delta)
        r = num / den
    if model.outer.kind == "identity":
        return r
    return r**model.outer.power


def default_initial_coefficients(model: ModelClass, points: np.ndarray | None = None) -> Coefficients:
    """A = 0 and B = 0 except the fixed entry.

    When evaluation points are supplied and the model is rational, the
    resulting denominator is checked against the positivity margin; failure
    raises with the offending points so the caller can supply a start.
    """
    a = tuple(0.0 for _ in range(len(model.numerator)))
    if model.denominator is None:
        return Coefficients(a, None)
    b = [0.0] * len(model.denominator)
    idx, val = model.fixed_coefficient
    b[idx] = val
    coeffs = Coefficients(a, tuple(b))
    if points is not None:
        pts = np.atleast_2d(points)
        hmat = basis_matrix(model.denominator, model.variables, pts)
        den = hmat @ np.asarray(coeffs.denominator)
        bad = den < model.delta
        if np.any(bad):
            raise InfeasibleInitialCoefficientsError(pts[bad])
    return coeffs
