"""Dense two-phase primal simplex for inequality-form programs with free variables.

Solves  min c.v  subject to  G v <= h  with v sign-unrestricted, by splitting
v into differences of nonnegative parts, adding one slack per row and, for
rows whose right-hand side is negative after standardisation, one artificial
variable driven out in phase one.

The pivot rule is largest reduced cost with lowest-index tie-breaking, which
is deterministic; after a run of degenerate pivots the rule switches to
Bland's, which cannot cycle.  Problems here are a few thousand rows by a few
tens of columns, so a dense tableau beats anything clever.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linearize import LinearProgram

__all__ = ["LpSolution", "solve"]

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"
NUMERICAL_FAILURE = "numerical_failure"

_RED_TOL = 1e-9  # reduced cost significance
_PIV_TOL = 1e-10  # ratio test eligibility
_PIV_MIN = 1e-12  # below this a pivot is numerically meaningless


@dataclass
class LpSolution:
    status: str
    solution: np.ndarray | None = None
    objective: float | None = None
    iterations: int = 0


class _Tableau:
    def __init__(self, G: np.ndarray, h: np.ndarray):
        m, n = G.shape
        self.m = m
        self.n = n
        A = np.hstack([G, -G, np.eye(m)])
        b = h.astype(float).copy()
        neg = b < 0
        A[neg] *= -1.0
        b[neg] *= -1.0
        self.n_cols = 2 * n + m  # structural + slack columns
        art_rows = np.flatnonzero(neg)
        self.n_art = art_rows.size
        if self.n_art:
            art = np.zeros((m, self.n_art))
            art[art_rows, np.arange(self.n_art)] = 1.0
            A = np.hstack([A, art])
        self.T = np.hstack([A, b[:, None]])
        self.basis = np.empty(m, dtype=int)
        pos_rows = np.flatnonzero(~neg)
        self.basis[pos_rows] = 2 * n + pos_rows
        self.basis[art_rows] = self.n_cols + np.arange(self.n_art)
        self.iterations = 0

    def pivot(self, r: int, j: int) -> None:
        T = self.T
        piv = T[r, j]
        T[r] /= piv
        col = T[:, j].copy()
        col[r] = 0.0
        T -= np.outer(col, T[r])
        self.basis[r] = j

    def run(self, cost: np.ndarray, allowed: np.ndarray, max_iterations: int) -> tuple[str, float]:
        """Minimise cost over the current basis; returns (status, objective)."""
        T = self.T
        m = self.m
        red = np.append(cost, 0.0)
        for r, bc in enumerate(self.basis):
            if cost[bc] != 0.0:
                red -= cost[bc] * T[r]
        bland = False
        degenerate_run = 0
        while True:
            cand = np.where(allowed, red[:-1], np.inf)
            if bland:
                elig = np.flatnonzero(cand < -_RED_TOL)
                if elig.size == 0:
                    return OPTIMAL, -red[-1]
                j = int(elig[0])
            else:
                j = int(np.argmin(cand))
                if cand[j] >= -_RED_TOL:
                    return OPTIMAL, -red[-1]
            col = T[:, j]
            elig_rows = col > _PIV_TOL
            if not elig_rows.any():
                if (col > _PIV_MIN).any():
                    # only numerically meaningless pivots remain in this column
                    if bland:
                        return NUMERICAL_FAILURE, -red[-1]
                    bland = True
                    continue
                return UNBOUNDED, -red[-1]
            ratios = np.full(m, np.inf)
            ratios[elig_rows] = T[elig_rows, -1] / col[elig_rows]
            best = ratios.min()
            ties = np.flatnonzero(ratios <= best + 1e-12)
            if bland and ties.size > 1:
                r = int(ties[np.argmin(self.basis[ties])])
            else:
                r = int(ties[0])
            if abs(T[r, j]) < _PIV_MIN:
                return NUMERICAL_FAILURE, -red[-1]
            if T[r, -1] <= 1e-12:
                degenerate_run += 1
                if degenerate_run > 5 * m:
                    bland = True
            else:
                degenerate_run = 0
            self.pivot(r, j)
            red -= red[j] * T[r]
            self.iterations += 1
            if self.iterations > max_iterations:
                return NUMERICAL_FAILURE, -red[-1]

    def drop_artificials(self) -> None:
        """Pivot basic artificials out; delete rows made redundant by them."""
        redundant = []
        for r in range(self.m):
            if self.basis[r] >= self.n_cols:
                row = np.abs(self.T[r, : self.n_cols])
                j = int(np.argmax(row))
                if row[j] > 1e-9:
                    self.pivot(r, j)
                else:
                    redundant.append(r)
        if redundant:
            keep = np.setdiff1d(np.arange(self.m), redundant)
            self.T = self.T[keep]
            self.basis = self.basis[keep]
            self.m = keep.size
        self.T = np.hstack([self.T[:, : self.n_cols], self.T[:, -1:]])
        self.n_art = 0


def solve(lp: LinearProgram, max_iterations: int | None = None) -> LpSolution:
    """Solve min c.v s.t. rows.v <= rhs with free v.

    Deterministic: identical input yields an identical pivot path, solution
    and iteration count.
    """
    G = np.asarray(lp.rows, dtype=float)
    h = np.asarray(lp.rhs, dtype=float)
    c = np.asarray(lp.objective, dtype=float)
    n = lp.variable_count
    if lp.row_count == 0:
        if np.any(c != 0.0):
            return LpSolution(UNBOUNDED)
        return LpSolution(OPTIMAL, np.zeros(n), 0.0, 0)

    tab = _Tableau(G, h)
    if max_iterations is None:
        max_iterations = 20000 + 200 * (tab.m + n)

    if tab.n_art:
        cost1 = np.zeros(tab.n_cols + tab.n_art)
        cost1[tab.n_cols :] = 1.0
        allowed = np.ones(tab.n_cols + tab.n_art, dtype=bool)
        status, obj1 = tab.run(cost1, allowed, max_iterations)
        # the phase-one objective is a sum of nonnegative variables, so an
        # unbounded verdict here can only be numerical noise
        if status != OPTIMAL:
            return LpSolution(NUMERICAL_FAILURE, iterations=tab.iterations)
        if obj1 > 1e-7 * (1.0 + np.abs(h).max()):
            return LpSolution(INFEASIBLE, iterations=tab.iterations)
        tab.drop_artificials()

    cost2 = np.zeros(tab.n_cols)
    cost2[:n] = c
    cost2[n : 2 * n] = -c
    allowed = np.ones(tab.n_cols, dtype=bool)
    status, _ = tab.run(cost2, allowed, max_iterations)
    if status != OPTIMAL:
        return LpSolution(status, iterations=tab.iterations)

    full = np.zeros(tab.n_cols)
    full[tab.basis] = tab.T[:, -1]
    x = full[:n] - full[n : 2 * n]
    return LpSolution(OPTIMAL, x, float(c @ x), tab.iterations)
