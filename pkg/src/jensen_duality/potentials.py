"""Potentials ``V_mu(zeta) = int log|z - zeta| dmu(z) - log|zeta|``, the test
family ``V_r = log+(r/|zeta|)``, checks of the representing-function
conditions, and Riesz measures of radial weights.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import simpson

from .errors import DomainError, EvaluationError, InvalidTestObject, ValidationError
from .geometry import DomainSpec, circle_nodes
from .measures import (DEFAULT_QUAD_NODES, Measure, TestFunctionBank, integrate, log_potential,
                       representing_check)
from .weights import WeightSpec, ZeroWeight


def potential_eval(mu: Measure, zeta, quad_nodes: int = DEFAULT_QUAD_NODES):
    """``V_mu(zeta)``; vectorized over ``zeta``.  Raises at ``0`` and on atoms."""
    zeta = np.asarray(zeta, dtype=complex)
    if np.any(zeta == 0):
        raise DomainError("the potential is singular at the origin")
    del quad_nodes  # every shipped kind has a closed form
    out = np.asarray(log_potential(mu, zeta)) - np.log(np.abs(zeta))
    return float(out) if out.ndim == 0 else out


class Potential:
    """Callable wrapper ``zeta -> V_mu(zeta)`` around a source measure."""

    def __init__(self, source: Measure, quad_nodes: int = DEFAULT_QUAD_NODES):
        self.source = source
        self.quad_nodes = quad_nodes

    def __call__(self, zeta):
        return potential_eval(self.source, zeta, self.quad_nodes)


def vr_eval(r: float, zeta):
    """``log+(r / |zeta|)``."""
    if not r > 0:
        raise ValidationError("V_r needs r > 0")
    zeta = np.asarray(zeta, dtype=complex)
    a = np.abs(zeta)
    if np.any(a == 0):
        raise DomainError("V_r is singular at the origin")
    out = np.maximum(np.log(r / a), 0.0)
    return float(out) if out.ndim == 0 else out


# --------------------------------------------------------------------------


@dataclass(frozen=True)
class FunctionVerdict:
    """Outcome of the three representing/Jensen-function conditions on samples."""

    cond1: bool
    cond1_defect: float
    cond2: bool
    cond2_bound: float
    cond3: bool
    min_value: float
    tol: float

    @property
    def representing(self) -> bool:
        return self.cond1 and self.cond2

    @property
    def jensen(self) -> bool:
        return self.representing and self.cond3

    def to_dict(self):
        return {"cond1": self.cond1, "cond1_defect": self.cond1_defect,
                "cond2": self.cond2, "cond2_bound": self.cond2_bound,
                "cond3": self.cond3, "min_value": self.min_value,
                "representing": self.representing, "jensen": self.jensen, "tol": self.tol}


def representing_function_check(V: Callable, G: DomainSpec, singularity_samples: int = 4,
                                 tol: float = 1e-9, annulus_samples: int = 256,
                                 depth: int = 40) -> FunctionVerdict:
    """Sampled surrogate for the representing-function conditions.

    1. ``|V| <= tol`` on the annulus ``0.99 R <= |z| <= 0.999 R``;
    2. ``V(z_k) + log|z_k|`` along ``z_k = 2**-k * e^{i t}`` (k <= ``depth``,
       ``singularity_samples`` directions) has a finite upper bound that the
       deep half of the sequence does not exceed (the bound is reported);
    3. ``min V >= -tol`` over a polar sample of ``G \\ {0}`` (Jensen flag).
    """
    R = G.R
    n_rad = 8
    n_ang = max(1, annulus_samples // n_rad)
    rad = np.linspace(0.99, 0.999, n_rad) * R
    ang = circle_nodes(n_ang, 0.25)
    ann = (rad[:, None] * np.exp(1j * ang)[None, :]).ravel()

    def ev(z):
        vals = np.asarray(V(z), dtype=float)
        bad = ~np.isfinite(vals)
        if bad.any():
            p = complex(np.ravel(z)[np.flatnonzero(np.ravel(bad))[0]])
            raise EvaluationError(f"V is not finite at {p}", point=p)
        return vals

    ann_vals = ev(ann)
    cond1_defect = float(np.abs(ann_vals).max())
    cond1 = cond1_defect <= tol

    k = np.arange(1, depth + 1)
    dirs = np.exp(1j * circle_nodes(singularity_samples, 0.125))
    zk = (R * 2.0 ** (-k.astype(float)))[:, None] * dirs[None, :]
    s = ev(zk) + np.log(np.abs(zk))
    per_k = s.max(axis=1)
    bound = float(per_k.max())
    half = depth // 2
    cond2 = bool(np.isfinite(bound) and per_k[half:].max() <= per_k[:half].max() + max(tol, 1e-6))

    radii = R * np.concatenate([np.geomspace(1e-6, 0.5, 40), np.linspace(0.5, 0.999, 60)])
    body = (radii[:, None] * np.exp(1j * circle_nodes(64, 0.5))[None, :]).ravel()
    mins = [ann_vals.min(), body_min := ev(body).min(), (s - np.log(np.abs(zk))).min()]
    del body_min
    min_value = float(min(mins))
    cond3 = min_value >= -tol
    return FunctionVerdict(cond1, cond1_defect, cond2, bound, cond3, min_value, tol)


@dataclass(frozen=True)
class PoissonJensenReport:
    lhs: float
    rhs: float
    diff: float
    tol: float
    zeros: int

    @property
    def passed(self) -> bool:
        return self.diff <= self.tol

    def to_dict(self):
        return {"lhs": self.lhs, "rhs": self.rhs, "diff": self.diff, "tol": self.tol,
                "zeros": self.zeros, "pass": self.passed}


def poisson_jensen(p, mu: Measure, quad_nodes: int = DEFAULT_QUAD_NODES, tol: float = 1e-8,
                   bank: TestFunctionBank | None = None,
                   check_tol: float = 1e-9) -> PoissonJensenReport:
    """Both sides of ``int log|p| dmu = sum_k V_mu(lambda_k) + log|p(0)|``.

    ``p`` is a polynomial spec with ``p(0) != 0``.  The left side is the
    quadrature of ``log|p|`` against ``mu``; the right side uses the closed-form
    potential at each root.  ``mu`` must pass :func:`representing_check`.
    """
    p0 = complex(p(0.0))
    if p0 == 0:
        raise DomainError("p(0) = 0: the identity needs a polynomial that is nonzero at the origin")
    verdict = representing_check(mu, bank, tol=check_tol, quad_nodes=quad_nodes)
    if not verdict.passed:
        raise InvalidTestObject(f"measure is not representing (defect {verdict.worst_defect:.3g}"
                                f" on {verdict.witness})")
    lhs = integrate(mu, p.log_abs, quad_nodes)
    roots = np.atleast_1d(p.zeros())
    pot = np.atleast_1d(potential_eval(mu, roots)) if roots.size else np.zeros(0)
    rhs = math.fsum(pot.tolist()) + math.log(abs(p0))
    return PoissonJensenReport(float(lhs), float(rhs), abs(lhs - rhs), tol, int(roots.size))


# --------------------------------------------------------------------------
# Riesz measures


def _graded_grid(r, n: int = 4097) -> np.ndarray:
    """Nodes on ``[0, r]`` uniform in ``log(1 - s)``: dense where boundary weights blow up.

    Vectorized: an array ``r`` gives one row of nodes per entry.
    """
    r_arr = np.asarray(r, dtype=float)[..., None]
    u = np.linspace(0.0, 1.0, n)
    inner = r_arr < 1
    graded = -np.expm1(u * np.log1p(-np.where(inner, r_arr, 0.0)))
    s = np.where(inner, graded, u * r_arr)
    s[..., -1] = r_arr[..., 0]
    return s


_GL_X, _GL_W = np.polynomial.legendre.leggauss(8)


def _panel_terms(g: Callable, a: np.ndarray, b: np.ndarray):
    """Per panel ``[a, b]``: ``int_a^b g`` and ``int_a^b (int_a^sigma g) / sigma dsigma``."""
    a, b = np.asarray(a, dtype=float)[:, None], np.asarray(b, dtype=float)[:, None]
    h = 0.5 * (b - a)
    sig = a + h * (1.0 + _GL_X)
    mass = h[:, 0] * (g(sig) @ _GL_W)
    hh = 0.5 * (sig - a)
    inner = hh * (g(a[..., None] + hh[..., None] * (1.0 + _GL_X)) @ _GL_W)
    return mass, h[:, 0] * ((inner / sig) @ _GL_W)


def _log_step(n0: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """``n0 * log(b / a)``, taken as ``0`` where ``n0 = 0`` (the panel at the origin)."""
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(n0 == 0, 0.0, n0 * np.log(b / np.where(a > 0, a, 1.0)))


@dataclass
class RieszMeasure:
    """``nu_M = Laplacian(M) / (2 pi)``: zero, radial with density, or atomic.

    ``n(r)`` is the mass of ``|z| <= r``; ``N(t) = int_0^t n(s)/s ds`` is the
    integrated counting function, which for radial ``nu`` equals
    ``int V_mu dnu`` evaluated against any ``mu`` concentrated on ``|z| = t``.
    """

    kind: str
    line_density: Callable | None = None
    atoms: tuple = ()
    radii: np.ndarray = field(default_factory=lambda: np.zeros(0))
    density: np.ndarray = field(default_factory=lambda: np.zeros(0))

    @classmethod
    def zero(cls) -> "RieszMeasure":
        return cls("zero")

    @classmethod
    def from_zeros(cls, zeros, multiplicities=None) -> "RieszMeasure":
        mult = multiplicities if multiplicities is not None else [1] * len(zeros)
        return cls("atomic", atoms=tuple((complex(a), float(m)) for a, m in zip(zeros, mult)))

    def counting(self, r: float) -> float:
        """``n_nu(r)``."""
        if self.kind == "zero":
            return 0.0
        if self.kind == "atomic":
            return math.fsum(m for a, m in self.atoms if abs(a) <= r)
        s = _graded_grid(r)
        # dn = line_density(s) ds with line_density = s * Laplacian (the 2 pi cancels)
        return float(simpson(self.line_density(s), x=s)) if r > 0 else 0.0

    def integrated_counting(self, t) -> np.ndarray | float:
        """``N_nu(t) = int_0^t n(s)/s ds`` (vectorized over ``t``)."""
        t_arr = np.atleast_1d(np.asarray(t, dtype=float))
        if self.kind == "zero":
            out = np.zeros(t_arr.shape)
        elif self.kind == "atomic":
            out = np.array([math.fsum(m * math.log(tt / abs(a)) for a, m in self.atoms
                                      if 0 < abs(a) <= tt) for tt in t_arr])
        else:
            out = self._integrated_radial(t_arr)
        return float(out[0]) if np.ndim(t) == 0 else out

    def _integrated_radial(self, t, panels: int = 2048) -> np.ndarray:
        # exact N and n at graded panel edges, then a nested tail from the left edge
        t = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.zeros(t.shape)
        pos = t > 0
        if not pos.any():
            return out
        tp = t[pos]
        edges = _graded_grid(float(tp.max()), panels + 1)
        # geometric refinement toward 0 for densities like s**(p - 1) with 1 < p < 2
        edges = np.concatenate([[0.0], edges[1] * 0.5 ** np.arange(60, 0, -1), edges[1:]])
        panels = edges.size - 1
        mass, tail = _panel_terms(self.line_density, edges[:-1], edges[1:])
        n_edge = np.concatenate([[0.0], np.cumsum(mass)])
        N_edge = np.concatenate([[0.0], np.cumsum(tail + _log_step(n_edge[:-1], edges[:-1],
                                                                   edges[1:]))])
        k = np.clip(np.searchsorted(edges, tp, side="right") - 1, 0, panels - 1)
        a = edges[k]
        _, tail_t = _panel_terms(self.line_density, a, tp)
        out[pos] = N_edge[k] + tail_t + _log_step(n_edge[k], a, tp)
        return out

    def integrate_potential(self, mu: Measure, quad_nodes: int = DEFAULT_QUAD_NODES) -> float:
        """``int V_mu dnu``.

        Radial ``nu``: the circle mean of ``V_mu`` over ``|zeta| = s`` is
        ``int log+(|z|/s) dmu``, so the integral is ``int N_nu(|z|) dmu(z)``.
        Atomic ``nu``: a direct sum of potential values.
        """
        if self.kind == "zero":
            return 0.0
        if self.kind == "atomic":
            pts = np.array([a for a, _ in self.atoms])
            m = np.array([w for _, w in self.atoms])
            return float(m @ np.asarray(potential_eval(mu, pts, quad_nodes)))
        z, w = mu.quadrature(quad_nodes)
        rad = np.abs(z)
        # N is radial: evaluate on the distinct radii only
        uniq, inv = np.unique(np.round(rad, 15), return_inverse=True)
        vals = np.asarray(self.integrated_counting(uniq))[inv]
        return float(vals @ w)

    def integrate_vr(self, r: float) -> float:
        """``int V_r dnu = N_nu(r)``."""
        return float(self.integrated_counting(r))

    def to_dict(self):
        d = {"kind": self.kind}
        if self.kind == "radial":
            d["grid"] = [[float(a), float(b)] for a, b in zip(self.radii, self.density)]
        if self.kind == "atomic":
            d["atoms"] = [{"z": [a.real, a.imag], "w": m} for a, m in self.atoms]
        return d


def riesz_of_weight(M: WeightSpec, grid_points: int = 65) -> RieszMeasure:
    """Riesz measure of a radial subharmonic preset (or the zero measure)."""
    if isinstance(M, ZeroWeight):
        return RieszMeasure.zero()
    if not getattr(M, "radial", False):
        raise ValidationError(f"no closed-form Riesz measure for the {M.kind} weight")
    if not M.is_subharmonic():
        raise ValidationError(f"{M.kind} weight {M.to_dict()} is not subharmonic")
    radii = np.linspace(0.0, 1.0, grid_points)[1:-1]
    density = np.asarray(M.radial_laplacian(radii)) / (2 * np.pi)
    if np.any(density < 0):
        raise ValidationError("negative Riesz density")
    return RieszMeasure("radial", line_density=M.line_density, radii=radii, density=density)
