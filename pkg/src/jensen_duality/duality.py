"""Discrete sup/inf duality on a square lattice inside a disk.

Nodes are the lattice points ``h*(i + 1j*j)`` with ``i**2 + j**2 <= n**2``.
A node is *interior* when its four neighbours are nodes; the cone consists of
node vectors ``v`` with ``(S v)_i >= 0`` (subharmonic) or ``== 0`` (harmonic) at
every interior node, where ``S = h**2 L`` is the integer 5-point stencil.

Primal (sup): maximize ``v(0)`` over cone members with ``v <= x``.  Constants
lie in both cones, so ``v = min x + u``.  For the subharmonic cone ``u`` is
bounded by ``0 <= u <= x - min x`` and constrained by ``S u >= 0``; the
optimizer is the pointwise largest minorant, so ``u >= 0`` loses nothing.
For the harmonic cone ``u = P g`` with ``P`` the discrete harmonic extension of
free boundary values ``g``.

Dual (inf): minimize ``sum w_i x_i`` over discrete Jensen measures.  For the
subharmonic cone ``w = e_0 + S^T lam`` with ``lam >= 0``; every stencil row sums
to zero, so ``w`` has unit mass and ``sum w v = v(0) + lam @ S v >= v(0)`` for
each cone member ``v``.  For the harmonic cone ``w >= 0`` must reproduce every
discrete harmonic function at the origin (``P^T w = P[0]``), which is the same
set as ``e_0 + range(S^T)`` intersected with the nonnegative orthant.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import spsolve

from .errors import ConfigurationError, SolverError, ValidationError
from .lp import EQ, LE, LinearProgram, LpSolution, solve
from .measures import Atomic

LP_TOL = 1e-9
GAP_TOL = 1e-6


class Cone(str, enum.Enum):
    SUBHARMONIC = "subharmonic"
    HARMONIC = "harmonic"

    @classmethod
    def parse(cls, value) -> "Cone":
        try:
            return cls(value if isinstance(value, Cone) else str(value).lower())
        except ValueError:
            raise ValidationError(f"unknown cone {value!r}") from None


@dataclass(frozen=True)
class Grid:
    R: float
    n: int
    h: float
    ij: np.ndarray  # (N, 2) integer lattice coordinates, row-major (by j, then i)
    z: np.ndarray
    interior: np.ndarray  # indices of interior nodes
    boundary: np.ndarray
    origin: int
    neighbours: np.ndarray  # (len(interior), 4) node indices: E, W, N, S

    @property
    def size(self) -> int:
        return len(self.z)

    @property
    def side(self) -> int:
        """Nodes along a diameter (``2n + 1``)."""
        return 2 * self.n + 1

    def index(self, i: int, j: int) -> int:
        hit = np.flatnonzero((self.ij[:, 0] == i) & (self.ij[:, 1] == j))
        if not hit.size:
            raise KeyError((i, j))
        return int(hit[0])

    @property
    def radial_order(self) -> np.ndarray:
        """Node indices sorted by modulus, then argument (the LP column order)."""
        return np.lexsort((np.angle(self.z), np.abs(self.z)))

    def sample(self, f: Callable) -> np.ndarray:
        return np.asarray(f(self.z), dtype=float)

    def to_dict(self):
        return {"R": self.R, "n": self.n, "h": self.h, "nodes": self.size,
                "interior": int(self.interior.size)}


def build_grid(R: float, n_per_radius: int) -> Grid:
    """Lattice of spacing ``R/n`` clipped to the closed disk ``|z| <= R``."""
    if not (R > 0 and math.isfinite(R)):
        raise ConfigurationError(f"grid radius must be positive, got {R}")
    n = int(n_per_radius)
    if n < 4:
        raise ConfigurationError(f"n_per_radius must be >= 4, got {n_per_radius}")
    h = R / n
    rng = np.arange(-n, n + 1)
    jj, ii = np.meshgrid(rng, rng, indexing="ij")
    keep = ii ** 2 + jj ** 2 <= n ** 2
    ij = np.column_stack([ii[keep], jj[keep]])  # row-major: j outer, i inner
    lookup = {(int(a), int(b)): k for k, (a, b) in enumerate(ij)}
    nbr_all = []
    interior = []
    for k, (a, b) in enumerate(ij):
        nb = [lookup.get((int(a) + 1, int(b))), lookup.get((int(a) - 1, int(b))),
              lookup.get((int(a), int(b) + 1)), lookup.get((int(a), int(b) - 1))]
        if all(v is not None for v in nb):
            interior.append(k)
            nbr_all.append(nb)
    interior = np.array(interior, dtype=np.int64)
    if interior.size < 9:
        raise ConfigurationError(f"only {interior.size} interior nodes; need at least 9")
    boundary = np.setdiff1d(np.arange(len(ij)), interior)
    z = h * (ij[:, 0] + 1j * ij[:, 1])
    return Grid(float(R), n, h, ij, z, interior, boundary, lookup[(0, 0)],
                np.array(nbr_all, dtype=np.int64))


def stencil_matrix(grid: Grid) -> sp.csr_matrix:
    """Integer 5-point stencil ``S`` (rows: interior nodes, columns: all nodes)."""
    m = grid.interior.size
    rows = np.repeat(np.arange(m), 5)
    cols = np.column_stack([grid.interior, grid.neighbours]).ravel()
    vals = np.tile([-4.0, 1.0, 1.0, 1.0, 1.0], m)
    return sp.csr_matrix((vals, (rows, cols)), shape=(m, grid.size))


def discrete_laplacian(grid: Grid) -> sp.csr_matrix:
    """``(v_E + v_W + v_N + v_S - 4 v_i)/h**2`` at each interior node."""
    return stencil_matrix(grid) / grid.h ** 2


def harmonic_extension(grid: Grid) -> np.ndarray:
    """Dense ``P`` (nodes x boundary nodes): ``P g`` is the discrete harmonic
    function with boundary values ``g``."""
    S = stencil_matrix(grid).tocsc()
    Sb = S[:, grid.boundary].toarray()
    P = np.zeros((grid.size, grid.boundary.size))
    P[grid.boundary] = np.eye(grid.boundary.size)
    P[grid.interior] = -np.asarray(spsolve(S[:, grid.interior], Sb)).reshape(-1, grid.boundary.size)
    return P


# --------------------------------------------------------------------------


@dataclass
class DiscreteJensenMeasure:
    """Node weights ``w = e_0 + S^T lam`` with the stencil multipliers ``lam``."""

    w: np.ndarray
    lam: np.ndarray

    @property
    def mass(self) -> float:
        return float(math.fsum(self.w.tolist()))

    def integrate(self, values) -> float:
        return float(self.w @ np.asarray(values, dtype=float))


@dataclass
class DualityInstance:
    grid: Grid
    cone: Cone
    x: np.ndarray
    notes: list = field(default_factory=list)

    def __post_init__(self):
        self.cone = Cone.parse(self.cone)
        x = np.asarray(self.x, dtype=float).ravel().copy()
        if x.shape != (self.grid.size,):
            raise ValidationError(f"x has {x.size} entries for {self.grid.size} nodes")
        if np.any(np.isnan(x)) or np.any(np.isneginf(x)):
            raise ValidationError("x must be finite or +inf")
        pinf = np.isposinf(x)
        if pinf.any():
            if np.any(pinf[self.grid.boundary]):
                raise ValidationError("x = +inf at a boundary node leaves the sup unbounded")
            # exact: discrete subharmonic v attains its max on the boundary
            cap = x[~pinf].max()
            x[pinf] = cap
            self.notes.append(f"{int(pinf.sum())} interior +inf value(s) capped at {cap:.6g}")
        self.x = x

    @classmethod
    def from_field(cls, grid: Grid, f: Callable, cone=Cone.SUBHARMONIC) -> "DualityInstance":
        with np.errstate(divide="ignore", invalid="ignore"):
            return cls(grid, cone, grid.sample(f))

    def primal_lp(self) -> LinearProgram:
        """Both cones contain the constants, so ``v`` is written as ``min x + u``.

        Subharmonic: ``0 <= u <= x - min x`` (bounds) and ``-S u <= 0``; the
        optimizer is the pointwise largest minorant, hence ``u >= 0`` loses
        nothing.  Harmonic: ``u = P g`` over free boundary values ``g`` with
        ``P`` the discrete harmonic extension, and rows ``P g <= x - min x``.
        """
        lo = float(self.x.min())
        if self.cone is Cone.SUBHARMONIC:
            # columns in radial order: Bland's rule then grows u outward from 0
            perm = self.grid.radial_order
            S = stencil_matrix(self.grid).toarray()[:, perm]
            c = (perm == self.grid.origin).astype(float)
            return LinearProgram.build(c, -S, np.zeros(S.shape[0]), LE, maximize=True,
                                       offset=lo, upper=(self.x - lo)[perm])
        P = harmonic_extension(self.grid)
        return LinearProgram.build(P[self.grid.origin], P, self.x - lo, LE, free=True,
                                   maximize=True, offset=lo)

    def dual_lp(self) -> LinearProgram:
        """Subharmonic: variables ``lam >= 0`` with ``w = e_0 + S^T lam``.
        Harmonic: variables ``w >= 0`` reproducing every discrete harmonic function."""
        if self.cone is Cone.SUBHARMONIC:
            S = stencil_matrix(self.grid).toarray()
            e0 = np.zeros(self.grid.size)
            e0[self.grid.origin] = 1.0
            return LinearProgram.build(S @ self.x, -S.T, e0, LE,
                                       offset=float(self.x[self.grid.origin]))
        # every feasible w has unit mass, so shifting x by a constant is exact
        P = harmonic_extension(self.grid)
        lo = float(self.x.min())
        return LinearProgram.build(self.x - lo, P.T, P[self.grid.origin], EQ, offset=lo)


@dataclass
class PrimalResult:
    value: float
    v: np.ndarray
    lp: LpSolution


@dataclass
class DualResult:
    value: float
    measure: DiscreteJensenMeasure
    lp: LpSolution


def _check(sol: LpSolution, what: str):
    if not sol.optimal:
        raise SolverError(f"{what} LP ended with status {sol.status}")


def primal_qn(inst: DualityInstance, tol: float = LP_TOL) -> PrimalResult:
    """``sup{v(0) : v in cone, v <= x}`` and an optimizer ``v*``."""
    sol = solve(inst.primal_lp(), tol)
    _check(sol, "primal")
    if inst.cone is Cone.SUBHARMONIC:
        v = np.empty(inst.grid.size)
        v[inst.grid.radial_order] = sol.x + float(inst.x.min())
    else:
        v = harmonic_extension(inst.grid) @ sol.x + float(inst.x.min())
    return PrimalResult(float(v[inst.grid.origin]), v, sol)


def dual_spr(inst: DualityInstance, tol: float = LP_TOL) -> DualResult:
    """``inf{sum w x : w discrete Jensen}`` and an optimal measure."""
    sol = solve(inst.dual_lp(), tol)
    _check(sol, "dual")
    grid = inst.grid
    S = stencil_matrix(grid)
    if inst.cone is Cone.SUBHARMONIC:
        lam = sol.x.copy()
        w = S.T @ lam
        w[grid.origin] += 1.0
    else:
        w = sol.x.copy()
        # w - e_0 lies in the range of S^T; its interior part fixes lam
        rhs = w[grid.interior].copy()
        rhs[np.searchsorted(grid.interior, grid.origin)] -= 1.0
        lam = spsolve(S[:, grid.interior].T.tocsc(), rhs)
    return DualResult(sol.value, DiscreteJensenMeasure(w, lam), sol)


@dataclass
class DualityResult:
    instance: DualityInstance
    primal: PrimalResult
    dual: DualResult

    @property
    def gap(self) -> float:
        return abs(self.primal.value - self.dual.value)

    @property
    def scale(self) -> float:
        return float(max(1.0, np.abs(self.instance.x).max()))

    @property
    def flagged(self) -> bool:
        return self.gap > GAP_TOL * self.scale

    def slackness(self) -> float:
        """Cross complementary slackness between the two independent optimizers."""
        S = stencil_matrix(self.instance.grid)
        w, lam = self.dual.measure.w, self.dual.measure.lam
        v = self.primal.v
        r1 = np.abs(w * (self.instance.x - v)).max()
        r2 = np.abs(lam * (S @ v)).max(initial=0.0)
        return float(max(r1, r2))

    def certificate_residuals(self) -> dict:
        m = self.dual.measure
        S = stencil_matrix(self.instance.grid)
        sv = S @ self.primal.v
        cone_viol = (np.maximum(-sv, 0).max() if self.instance.cone is Cone.SUBHARMONIC
                     else np.abs(sv).max())
        return {"mass_defect": abs(m.mass - 1.0), "min_weight": float(m.w.min()),
                "cone_violation": float(cone_viol),
                "majorant_violation": float(np.maximum(self.primal.v - self.instance.x, 0).max()),
                "slackness": self.slackness(),
                "lp_primal": self.primal.lp.residuals.max(),
                "lp_dual": self.dual.lp.residuals.max()}

    def summary(self) -> dict:
        return {"qn_primal": self.primal.value, "qn_dual": self.dual.value, "gap": self.gap,
                "flagged": self.flagged, "residuals": self.certificate_residuals(),
                "measure_summary": measure_summary(self.dual.measure, self.instance.grid)}


def solve_instance(inst: DualityInstance, tol: float = LP_TOL) -> DualityResult:
    return DualityResult(inst, primal_qn(inst, tol), dual_spr(inst, tol))


def duality_gap(inst: DualityInstance, tol: float = LP_TOL) -> float:
    return solve_instance(inst, tol).gap


def export_measure(mu: DiscreteJensenMeasure, grid: Grid, tol_atom: float = 1e-12) -> Atomic:
    """Atoms at node positions carrying weight above ``tol_atom``."""
    keep = np.flatnonzero(mu.w > tol_atom)
    return Atomic(tuple((complex(grid.z[k]), float(mu.w[k])) for k in keep))


def measure_summary(mu: DiscreteJensenMeasure, grid: Grid, tol_atom: float = 1e-12) -> dict:
    keep = mu.w > tol_atom
    first = complex(mu.w @ grid.z)
    return {"mass": mu.mass, "atoms": int(keep.sum()),
            "origin_weight": float(mu.w[grid.origin]),
            "boundary_weight": float(mu.w[grid.boundary].sum()),
            "first_moment": [first.real, first.imag], "min_weight": float(mu.w.min())}


# --------------------------------------------------------------------------
# random cone members and feasible measures


def random_cone_member(grid: Grid, rng: np.random.Generator, cone=Cone.SUBHARMONIC,
                       scale: float = 1.0) -> np.ndarray:
    """Solve ``S v = f`` (``f >= 0``; ``f = 0`` for the harmonic cone) with random boundary data."""
    cone = Cone.parse(cone)
    S = stencil_matrix(grid).tocsc()
    interior, boundary = grid.interior, grid.boundary
    g = rng.normal(size=boundary.size) * scale
    f = (rng.exponential(size=interior.size) * scale * (rng.uniform(size=interior.size) < 0.3)
         if cone is Cone.SUBHARMONIC else np.zeros(interior.size))
    A = S[:, interior]
    rhs = f - S[:, boundary] @ g
    v = np.zeros(grid.size)
    v[boundary] = g
    v[interior] = spsolve(A.tocsc(), rhs)
    return v


def random_smooth_field(grid: Grid, rng: np.random.Generator, degree: int = 4) -> np.ndarray:
    """Polynomial in ``(x/R, y/R)`` of total degree ``degree`` with N(0, 1) coefficients."""
    X, Y = grid.z.real / grid.R, grid.z.imag / grid.R
    out = np.zeros(grid.size)
    for i in range(degree + 1):
        for j in range(degree + 1 - i):
            out += rng.normal() * X ** i * Y ** j
    return out


def random_feasible_measure(grid: Grid, rng: np.random.Generator, steps: int = 200,
                            ) -> DiscreteJensenMeasure:
    """A discrete Jensen measure built by random mass splitting from ``e_0``.

    Each step moves a fraction of the mass at an interior node equally onto
    its four neighbours (a nonnegative multiplier on that stencil row).
    """
    w = np.zeros(grid.size)
    w[grid.origin] = 1.0
    lam = np.zeros(grid.interior.size)
    pos = {int(k): r for r, k in enumerate(grid.interior)}
    for _ in range(steps):
        cand = [k for k in np.flatnonzero(w > 1e-14) if int(k) in pos]
        if not cand:
            break
        k = int(rng.choice(cand))
        t = rng.uniform(0.2, 1.0) * w[k] / 4.0
        r = pos[k]
        lam[r] += t
        w[k] -= 4 * t
        w[grid.neighbours[r]] += t
    return DiscreteJensenMeasure(np.maximum(w, 0.0), lam)


def weak_duality_check(inst: DualityInstance, rng: np.random.Generator, pairs: int = 100) -> float:
    """``max(v(0) - sum w x)`` over random feasible pairs; should be ``<= 0``."""
    worst = -np.inf
    for _ in range(pairs):
        v = random_cone_member(inst.grid, rng, inst.cone)
        v = v - (v - inst.x).max()  # shift below x; constants are in the cone
        mu = random_feasible_measure(inst.grid, rng, steps=int(rng.integers(1, 200)))
        worst = max(worst, v[inst.grid.origin] - mu.integrate(inst.x))
    return float(worst)


# --------------------------------------------------------------------------


def main_theorem_demo(u: Callable, M: Callable, R: float = 1.0, ladder=(8, 16),
                      cone=Cone.SUBHARMONIC, tol: float = LP_TOL) -> dict:
    """Per grid level: ``q_n(M - u)`` both ways, and the minorant ``v*`` with ``v* + u <= M``."""
    levels = []
    for n in ladder:
        grid = build_grid(R, n)
        with np.errstate(divide="ignore", invalid="ignore"):
            uu = grid.sample(u)
            mm = grid.sample(M)
        inst = DualityInstance(grid, cone, mm - uu)
        res = solve_instance(inst, tol)
        v = res.primal.v
        finite = np.isfinite(uu)
        excess = float(np.max((v + uu - mm)[finite])) if finite.any() else 0.0
        levels.append({"n": n, "grid": grid.to_dict(), **res.summary(),
                       "minorant_excess": max(excess, 0.0),
                       "origin_match": abs(v[grid.origin] - res.primal.value),
                       "notes": inst.notes})
    q = [lv["qn_primal"] for lv in levels]
    trend = "nonincreasing" if all(b <= a + 1e-9 for a, b in zip(q, q[1:])) else "mixed"
    return {"cone": Cone.parse(cone).value, "levels": levels, "trend": trend}
