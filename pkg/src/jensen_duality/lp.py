"""Dense two-phase tableau simplex with Bland's rule and dual certificates.

The solver works on a general form

    min/max  c @ x + offset
    s.t.     A[i] @ x  (<=, ==, >=)  b[i]
             0 <= x[j] <= upper[j]  or  x[j] free

and reports, next to the optimizer, the shadow prices ``y`` of every row
(``y[i]`` is the derivative of the optimal value with respect to ``b[i]``),
so that at an optimum ``c @ x == b @ y`` plus the bound term
``sum_j upper[j] * min(r[j], 0)`` (minimization, ``r = c - A.T @ y``).
Finite upper bounds are handled by bound flipping, not as extra rows.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.linalg.blas import dger

from .errors import SolverError, ValidationError

log = logging.getLogger(__name__)

LE, EQ, GE = "<=", "==", ">="
_SENSES = (LE, EQ, GE)

PERTURBATION = 1e-11
PIVOT_TOL = 1e-9
REINVERT_EVERY = 1000
HARRIS_TOL = 1e-9
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0

OPTIMAL = "optimal"
UNBOUNDED = "unbounded"
INFEASIBLE = "infeasible"


@dataclass(frozen=True)
class LinearProgram:
    c: np.ndarray
    A: np.ndarray
    b: np.ndarray
    senses: tuple
    free: np.ndarray
    maximize: bool = False
    offset: float = 0.0
    upper: np.ndarray | None = None

    @classmethod
    def build(cls, c, A, b, senses: Sequence[str] | str = LE, free=False,
              maximize=False, offset=0.0, upper=None) -> "LinearProgram":
        """Coerce arrays, broadcast scalar ``senses``/``free``/``upper`` and validate."""
        c = np.asarray(c, dtype=float).ravel()
        A = np.atleast_2d(np.asarray(A, dtype=float))
        b = np.asarray(b, dtype=float).ravel()
        if A.size == 0:
            A = A.reshape(len(b), len(c))
        if isinstance(senses, str):
            senses = (senses,) * len(b)
        free = np.broadcast_to(np.asarray(free, dtype=bool), c.shape).copy()
        if upper is not None:
            upper = np.broadcast_to(np.asarray(upper, dtype=float), c.shape).copy()
        lp = cls(c, A, b, tuple(senses), free, bool(maximize), float(offset), upper)
        lp.validate()
        return lp

    def validate(self) -> None:
        m, n = self.A.shape
        if self.c.shape != (n,):
            raise ValidationError(f"objective has {self.c.size} entries, A has {n} columns")
        if self.b.shape != (m,):
            raise ValidationError(f"b has {self.b.size} entries, A has {m} rows")
        if len(self.senses) != m:
            raise ValidationError(f"{len(self.senses)} row senses for {m} rows")
        bad = [s for s in self.senses if s not in _SENSES]
        if bad:
            raise ValidationError(f"unknown row sense {bad[0]!r}")
        if self.free.shape != (n,):
            raise ValidationError("free mask does not match the number of variables")
        for name, arr in (("c", self.c), ("A", self.A), ("b", self.b)):
            if not np.all(np.isfinite(arr)):
                raise ValidationError(f"non-finite entries in {name}")
        if not np.isfinite(self.offset):
            raise ValidationError("non-finite objective offset")
        if self.upper is not None:
            u = self.upper
            if u.shape != (n,):
                raise ValidationError("upper bounds do not match the number of variables")
            if np.any(np.isnan(u)) or np.any(u < 0):
                raise ValidationError("upper bounds must be >= 0")
            if np.any(np.isfinite(u) & self.free):
                raise ValidationError("free variables cannot carry upper bounds")

    @property
    def ub(self) -> np.ndarray:
        """Upper bounds, ``inf`` where absent."""
        n = self.c.size
        return np.full(n, np.inf) if self.upper is None else self.upper

    @property
    def shape(self):
        return self.A.shape


@dataclass(frozen=True)
class Residuals:
    """Certificate residuals of a primal/dual pair (all nonnegative)."""

    primal: float
    dual: float
    gap: float
    slackness: float

    def max(self) -> float:
        return max(self.primal, self.dual, self.gap, self.slackness)

    def to_dict(self):
        return {"primal": self.primal, "dual": self.dual, "gap": self.gap,
                "slackness": self.slackness}


@dataclass
class LpSolution:
    status: str
    value: float = float("nan")
    x: np.ndarray | None = None
    y: np.ndarray | None = None
    residuals: Residuals | None = None
    iterations: int = 0
    basis: tuple = field(default=())

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


def verify_certificates(lp: LinearProgram, sol: LpSolution, tol: float = 1e-8) -> Residuals:
    """Recompute feasibility, dual feasibility, gap and complementary slackness.

    Never raises; a solution without vectors yields infinite residuals.
    ``tol`` is accepted for signature symmetry: the residuals themselves are
    reported raw, and callers compare them against whatever scale they need.
    """
    del tol
    if sol.x is None or sol.y is None:
        inf = float("inf")
        return Residuals(inf, inf, inf, inf)
    x, y = sol.x, sol.y
    Ax = lp.A @ x
    slack = Ax - lp.b
    senses = np.array(lp.senses)
    le, ge, eq = senses == LE, senses == GE, senses == EQ

    prim = np.zeros(len(lp.b))
    prim[le] = np.maximum(slack[le], 0.0)
    prim[ge] = np.maximum(-slack[ge], 0.0)
    prim[eq] = np.abs(slack[eq])
    ub = lp.ub
    var_viol = np.where(lp.free, 0.0, np.maximum(-x, 0.0))
    var_viol = np.maximum(var_viol, np.where(np.isfinite(ub), np.maximum(x - ub, 0.0), 0.0))
    primal = float(max(prim.max(initial=0.0), var_viol.max(initial=0.0)))

    # Shadow-price sign conventions: for a minimization a ">=" row has
    # y >= 0 and a "<=" row y <= 0; maximization flips both.
    sgn = -1.0 if lp.maximize else 1.0
    row_viol = np.zeros(len(lp.b))
    row_viol[le] = np.maximum(sgn * y[le], 0.0)
    row_viol[ge] = np.maximum(-sgn * y[ge], 0.0)
    r = lp.c - lp.A.T @ y
    bounded = np.isfinite(ub)
    # the part of r of the wrong sign is a bound multiplier where x has an upper bound
    r_lo = np.maximum(sgn * r, 0.0)
    r_up = np.where(bounded, np.minimum(sgn * r, 0.0), 0.0)
    col_viol = np.where(lp.free, np.abs(r), np.where(bounded, 0.0, np.maximum(-sgn * r, 0.0)))
    dual = float(max(row_viol.max(initial=0.0), col_viol.max(initial=0.0)))

    bound_term = sgn * float(np.where(bounded, ub, 0.0) @ r_up)
    gap = float(abs(lp.c @ x - lp.b @ y - bound_term))
    cs_rows = np.abs(y * slack)
    cs_cols = np.where(lp.free, 0.0,
                       np.abs(r_lo * x) + np.abs(r_up * np.where(bounded, ub - x, 0.0)))
    slackness = float(max(cs_rows.max(initial=0.0), cs_cols.max(initial=0.0)))
    return Residuals(primal, dual, gap, slackness)


class _Tableau:
    """Standard-form tableau ``min c~ @ t, A~ t = b~, 0 <= t <= u`` with b~ >= 0.

    Nonbasic variables sit at zero in working coordinates: a variable resting
    at its upper bound is replaced by ``u - t`` (``sign = -1``), which negates
    its column and shifts the right-hand side.
    """

    def __init__(self, lp: LinearProgram):
        m, n = lp.A.shape
        self.m, self.n_orig = m, n
        # structural columns: x+ for every variable, x- for free ones
        cols = [lp.A]
        self.neg_of = {}
        free_idx = np.flatnonzero(lp.free)
        if free_idx.size:
            cols.append(-lp.A[:, free_idx])
            for k, j in enumerate(free_idx):
                self.neg_of[j] = n + k
        A = np.hstack(cols)
        c = np.concatenate([lp.c, -lp.c[free_idx]])
        if lp.maximize:
            c = -c
        b = lp.b.copy()
        senses = list(lp.senses)
        self.row_flip = b < 0
        A[self.row_flip] *= -1.0
        b[self.row_flip] *= -1.0
        for i in np.flatnonzero(self.row_flip):
            senses[i] = {LE: GE, GE: LE, EQ: EQ}[senses[i]]
        n_struct = A.shape[1]

        n_slack = sum(s != EQ for s in senses)
        n_art = sum(s != LE for s in senses)
        S = np.zeros((m, n_slack))
        R = np.zeros((m, n_art))
        init_basis = np.empty(m, dtype=np.int64)
        js = ja = 0
        for i, s in enumerate(senses):
            if s != EQ:
                S[i, js] = 1.0 if s == LE else -1.0
                if s == LE:
                    init_basis[i] = n_struct + js
                js += 1
            if s != LE:
                R[i, ja] = 1.0
                init_basis[i] = n_struct + n_slack + ja
                ja += 1
        self.n_struct = n_struct
        self.n_total = n_struct + n_slack + n_art
        self.art_start = n_struct + n_slack
        self.A_full = np.hstack([A, S, R])
        self.b = b
        self.c_full = np.concatenate([c, np.zeros(n_slack + n_art)])
        self.ub = np.full(self.n_total, np.inf)
        self.ub[:n] = lp.ub
        self.sign = np.ones(self.n_total)
        self.basis = init_basis.copy()
        self.T = np.zeros((m + 1, self.n_total + 1))
        self.T[:m, :-1] = self.A_full
        # generic right-hand side: breaks the ties that make Bland's rule crawl
        # through degenerate vertices; the final basis is re-solved with b itself
        self.eps = PERTURBATION * max(1.0, float(np.abs(b).max(initial=0.0)))
        self.rhs0 = b + self.eps * (0.5 + np.modf(np.arange(1, m + 1) * _GOLDEN)[0])
        self.T[:m, -1] = self.rhs0
        # Bland's rule over a fixed column order: structural columns by
        # ascending cost (stable), then slacks and artificials
        order = np.concatenate([np.argsort(c, kind="stable"), np.arange(n_struct, self.n_total)])
        self.rank = np.empty(self.n_total, dtype=np.int64)
        self.rank[order] = np.arange(self.n_total)
        self.feas_tol = HARRIS_TOL * max(1.0, float(np.abs(b).max(initial=0.0)))
        self.iterations = 0
        self._checked = -1
        self._bound_crash()
        self._crash(lp)

    def _bound_crash(self) -> None:
        """Start with every bounded variable at its upper bound when that point
        keeps the slack basis feasible and lowers the objective."""
        if self.n_total != self.art_start:
            return
        up = np.isfinite(self.ub)
        if not up.any() or self.c_full[up] @ self.ub[up] >= 0:
            return
        if np.any(self.b - self.A_full[:, up] @ self.ub[up] < 0):
            return
        for j in np.flatnonzero(up):
            self.flip(int(j))

    def _crash(self, lp: LinearProgram) -> None:
        """Start rows that need an artificial from a structural unit column
        ``a * e_i`` (``a > 0``) when one exists and its value fits its bound."""
        m = self.m
        A = self.A_full[:, :self.n_orig]
        nnz = np.count_nonzero(A, axis=0)
        taken = set()
        for j in np.flatnonzero((nnz == 1) & ~lp.free):
            i = int(np.flatnonzero(A[:, j])[0])
            a = A[i, j]
            if (a <= 0 or i in taken or self.basis[i] < self.art_start
                    or self.rhs0[i] / a > self.ub[j]):
                continue
            taken.add(i)
            self.pivot(i, int(j))
        self.iterations = 0

    def working_matrix(self) -> np.ndarray:
        return self.A_full * self.sign

    def shifted_rhs(self, rhs: np.ndarray) -> np.ndarray:
        """``rhs`` minus the contribution of variables resting at their upper bound."""
        up = self.sign < 0
        if not up.any():
            return rhs.copy()
        return rhs - self.A_full[:, up] @ self.ub[up]

    def reinvert(self) -> None:
        """Rebuild the tableau from the original data to shed accumulated round-off."""
        m = self.m
        A = self.working_matrix()
        try:
            self.T[:m] = np.linalg.solve(A[:, self.basis],
                                         np.hstack([A, self.shifted_rhs(self.rhs0)[:, None]]))
        except np.linalg.LinAlgError:
            return
        self.T[:m, self.basis] = np.eye(m)
        self.set_cost(self.cost)

    def set_cost(self, cost: np.ndarray) -> None:
        self.cost = cost
        m = self.m
        cw = cost * self.sign
        const = float(cost[self.sign < 0] @ self.ub[self.sign < 0]) if (self.sign < 0).any() else 0.0
        cb = cw[self.basis]
        self.T[m, :-1] = cw - cb @ self.T[:m, :-1]
        self.T[m, -1] = -cb @ self.T[:m, -1] - const

    def pivot(self, r: int, j: int) -> None:
        T = self.T
        prow = T[r] / T[r, j]
        col = T[:, j].copy()
        # in-place rank-one update (T is C-ordered, so T.T is Fortran-ordered)
        dger(-1.0, prow, col, a=T.T, overwrite_a=1)
        T[r] = prow
        self.basis[r] = j
        self.iterations += 1

    def flip(self, j: int) -> None:
        """Substitute ``t_j -> u_j - t_j`` (``j`` nonbasic)."""
        T = self.T
        T[:, -1] -= self.ub[j] * T[:, j]
        T[:, j] *= -1.0
        self.sign[j] *= -1.0

    def run(self, n_allowed: int, tol: float, max_iter: int, stop_value: float | None = None) -> str:
        """Bland's rule on columns ``[0, n_allowed)``; returns a status string.

        With ``stop_value`` the loop also ends once the objective drops to it
        (phase 1 stops at zero infeasibility instead of pivoting on through a
        degenerate vertex).
        """
        T, m = self.T, self.m
        rc_tol = tol * max(1.0, float(np.abs(self.cost[:n_allowed]).max(initial=0.0)))
        while True:
            if stop_value is not None and -T[m, -1] <= stop_value:
                return OPTIMAL
            if self.iterations >= max_iter:
                raise SolverError(f"iteration guard tripped after {self.iterations} pivots")
            rc = T[m, :n_allowed]
            cand = np.flatnonzero(rc < -rc_tol)
            if cand.size == 0:
                # confirm on a freshly inverted tableau before declaring optimality
                if self.iterations == self._checked:
                    return OPTIMAL
                self._checked = self.iterations
                self.reinvert()
                continue
            j = int(cand[np.argmin(self.rank[cand])])
            r, to_upper, theta = self._leaving_row(T[:m, j])
            if r < 0 and not np.isfinite(self.ub[j]):
                return UNBOUNDED
            if self.ub[j] <= theta:
                self.flip(j)  # the entering variable reaches its own bound first
                self.iterations += 1
            else:
                leaving = int(self.basis[r])
                self.pivot(r, j)
                if to_upper:
                    self.flip(leaving)
            if self.iterations % REINVERT_EVERY == 0:
                self.reinvert()

    def _leaving_row(self, col: np.ndarray):
        """Two-pass (Harris) ratio test over rows whose basic variable falls to
        zero (``col > 0``) or climbs to its upper bound (``col < 0``).

        The bound ``theta`` lets each basic value overshoot by ``feas_tol``; the
        largest pivot element with ratio ``<= theta`` leaves, remaining ties go
        to the lowest-ranked basic variable.  Returns ``(row, to_upper, ratio)``
        with ``row = -1`` when nothing blocks.
        """
        rhs = self.T[:self.m, -1]
        scale = PIVOT_TOL * max(1.0, float(np.abs(col).max(initial=0.0)))
        ub_b = self.ub[self.basis]
        down = np.flatnonzero(col > scale)
        up = np.flatnonzero((col < -scale) & np.isfinite(ub_b))
        rows = np.concatenate([down, up])
        if rows.size == 0:
            return -1, False, np.inf
        gap = np.concatenate([np.maximum(rhs[down], 0.0), np.maximum(ub_b[up] - rhs[up], 0.0)])
        piv = np.abs(col[rows])
        theta = ((gap + self.feas_tol) / piv).min()
        ok = gap / piv <= theta
        big = piv[ok].max()
        sel = np.flatnonzero(ok & (piv >= big * (1.0 - 1e-12)))
        k = sel[np.argmin(self.rank[self.basis[rows[sel]]])]
        return int(rows[k]), bool(k >= down.size), float(gap[k] / piv[k])

    def drive_out_artificials(self, tol: float) -> None:
        m = self.m
        for i in range(m):
            if self.basis[i] < self.art_start:
                continue
            self.T[i, -1] = 0.0  # perturbation residue only
            row = self.T[i, :self.art_start]
            k = int(np.argmax(np.abs(row))) if row.size else 0
            if row.size and abs(row[k]) > max(tol, 1e-7):
                self.pivot(i, k)
            # otherwise the row is redundant; its artificial stays basic at zero
        # keep reinversion consistent with the zeroed artificial values
        xB = np.where(self.basis >= self.art_start, 0.0, self.T[:m, -1])
        rhs_w = self.working_matrix()[:, self.basis] @ xB
        up = self.sign < 0
        self.rhs0 = rhs_w + (self.A_full[:, up] @ self.ub[up] if up.any() else 0.0)

    def refine(self):
        """Recompute primal and dual basic values from the original data."""
        A = self.working_matrix()
        B = A[:, self.basis]
        tB = np.linalg.solve(B, self.shifted_rhs(self.b))
        yB = np.linalg.solve(B.T, (self.c_full * self.sign)[self.basis])
        t = np.zeros(self.n_total)
        t[self.basis] = tB
        up = self.sign < 0
        t[up] = self.ub[up] - t[up]
        return t, yB


def solve(lp: LinearProgram, tol: float = 1e-9, max_iter: int | None = None,
          verbose: bool = False) -> LpSolution:
    """Solve ``lp`` with the two-phase dense simplex (Bland's rule throughout).

    ``tol`` is the pivot / reduced-cost tolerance.  Deterministic: identical
    inputs give identical pivot sequences.
    """
    lp.validate()
    tab = _Tableau(lp)
    m = tab.m
    if max_iter is None:
        max_iter = 50 * (m + tab.n_total) + 1000

    n_art = tab.n_total - tab.art_start
    if n_art:
        phase1 = np.zeros(tab.n_total)
        phase1[tab.art_start:] = 1.0
        tab.set_cost(phase1)
        feas_tol = max(tol, 1e-7) * max(1.0, float(np.abs(tab.b).max(initial=0.0)))
        tab.run(tab.n_total, tol, max_iter,
                stop_value=tol * max(1.0, float(tab.b.sum())) + 2 * m * tab.eps)
        infeas = -tab.T[m, -1]
        if infeas > feas_tol:
            log.debug("phase 1 ended with infeasibility %.3e", infeas)
            return LpSolution(INFEASIBLE, iterations=tab.iterations)
        tab.drive_out_artificials(tol)
    if verbose:
        log.debug("phase 1 done after %d pivots", tab.iterations)

    tab.set_cost(tab.c_full)
    status = tab.run(tab.art_start, tol, max_iter)
    if verbose:
        log.debug("phase 2 status %s after %d pivots", status, tab.iterations)
    if status == UNBOUNDED:
        return LpSolution(UNBOUNDED, iterations=tab.iterations)

    try:
        t, y_std = tab.refine()
    except np.linalg.LinAlgError as exc:
        raise SolverError(f"final basis is singular: {exc}") from exc

    x = t[:tab.n_orig].copy()
    for j, jn in tab.neg_of.items():
        x[j] -= t[jn]
    y = np.where(tab.row_flip, -y_std, y_std)
    if lp.maximize:
        y = -y
    value = float(lp.c @ x + lp.offset)
    sol = LpSolution(OPTIMAL, value, x, y, iterations=tab.iterations,
                     basis=tuple(int(k) for k in tab.basis))
    sol.residuals = verify_certificates(lp, sol)
    return sol
