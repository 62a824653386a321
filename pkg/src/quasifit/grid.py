"""Finite evaluation domains: regular grids and explicit point clouds.

A fit never sees a continuous domain; the uniform norm is always taken over
an enumerated finite set of points.  Regular grids are described by
per-axis lower/upper bounds and step sizes, with both endpoints included.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence, TextIO

import numpy as np

from .expr import EvaluationError, Expression, evaluate

__all__ = ["Grid", "SampledFunction", "enumerate_points", "sample", "export_csv"]


@dataclass(frozen=True)
class Grid:
    lower: tuple[float, ...]
    upper: tuple[float, ...]
    step: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "lower", tuple(float(v) for v in self.lower))
        object.__setattr__(self, "upper", tuple(float(v) for v in self.upper))
        object.__setattr__(self, "step", tuple(float(v) for v in self.step))
        if not (len(self.lower) == len(self.upper) == len(self.step)):
            raise ValueError("lower, upper and step must have equal length")
        if len(self.lower) == 0:
            raise ValueError("grid must have at least one axis")
        for lo, hi, st in zip(self.lower, self.upper, self.step):
            if not (lo <= hi):
                raise ValueError(f"lower bound {lo} exceeds upper bound {hi}")
            if not (st > 0):
                raise ValueError(f"step must be positive, got {st}")

    @property
    def dimension(self) -> int:
        return len(self.lower)

    def axis_counts(self) -> tuple[int, ...]:
        # floor with a small guard so that upper lands on the last point
        # despite rounding in (upper - lower) / step
        return tuple(
            int(np.floor((hi - lo) / st + 1e-9)) + 1
            for lo, hi, st in zip(self.lower, self.upper, self.step)
        )

    def cardinality(self) -> int:
        n = 1
        for c in self.axis_counts():
            n *= c
        return n


def enumerate_points(grid: Grid) -> np.ndarray:
    """All grid points as an (N, d) array in lexicographic order, last axis fastest.

    Coordinates are computed as lower + k * step rather than by cumulative
    addition, so enumeration is bit-stable.
    """
    axes = [
        lo + np.arange(count, dtype=float) * st
        for lo, st, count in zip(grid.lower, grid.step, grid.axis_counts())
    ]
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.column_stack([m.ravel() for m in mesh])
    pts.setflags(write=False)
    return pts


@dataclass(frozen=True, eq=False)
class SampledFunction:
    """Target values on an enumerated finite domain."""

    points: np.ndarray  # (N, d)
    values: np.ndarray  # (N,)
    grid: Grid | None = field(default=None)

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=float))
        vals = np.asarray(self.values, dtype=float).ravel()
        if pts.shape[0] != vals.shape[0]:
            raise ValueError("one value per point required")
        if not np.all(np.isfinite(pts)):
            raise ValueError("points must be finite")
        if not np.all(np.isfinite(vals)):
            raise ValueError("values must be finite")
        if self.grid is not None:
            if pts.shape != (self.grid.cardinality(), self.grid.dimension):
                raise ValueError("points do not match the attached grid's enumeration")
        pts.setflags(write=False)
        vals.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_points(cls, points: Iterable[Sequence[float]], values: Iterable[float]) -> "SampledFunction":
        """Explicit point-cloud constructor for non-grid domains."""
        return cls(np.asarray(list(points), dtype=float), np.asarray(list(values), dtype=float))

    @property
    def dimension(self) -> int:
        return self.points.shape[1]

    def __len__(self) -> int:
        return self.points.shape[0]


def sample(f: Expression, grid: Grid, variables: Sequence[str]) -> SampledFunction:
    """Evaluate `f` at every grid point, in enumeration order."""
    if len(variables) != grid.dimension:
        raise ValueError(
            f"expression has {len(variables)} variables but grid has dimension {grid.dimension}"
        )
    pts = enumerate_points(grid)
    names = list(variables)
    values = np.empty(pts.shape[0], dtype=float)
    for k in range(pts.shape[0]):
        env = dict(zip(names, pts[k]))
        try:
            v = evaluate(f, env)
        except EvaluationError as exc:
            raise EvaluationError(f"{exc} at point {tuple(pts[k])}") from exc
        if not np.isfinite(v):
            raise EvaluationError(f"non-finite value {v} at point {tuple(pts[k])}")
        values[k] = v
    return SampledFunction(pts, values, grid)


def export_csv(sf: SampledFunction, out: TextIO) -> None:
    """One row per point, columns x1..xd,f."""
    d = sf.dimension
    out.write(",".join([f"x{i + 1}" for i in range(d)] + ["f"]) + "\n")
    for k in range(len(sf)):
        coords = [repr(float(c)) for c in sf.points[k]]
        out.write(",".join(coords + [repr(float(sf.values[k]))]) + "\n")
