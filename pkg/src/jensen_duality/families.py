"""Seeded families of representing (in fact Jensen) measures.

Members are centered circle measures, off-center balayages of ``delta_0`` onto
circles that surround the origin, and Dirichlet-weighted convex combinations
of these.  Each member is tagged with its support radius, the parameter along
which growth is judged.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError
from .geometry import DomainSpec
from .measures import (CircleUniform, Measure, PoissonCircle, TestFunctionBank, combine,
                       jensen_check)
from .sequences import decade_ladder

DEFAULT_FAMILY_SIZE = 64
SMALL_RADII = (0.1, 0.25, 0.5)


@dataclass(frozen=True)
class FamilyMember:
    index: int
    measure: Measure
    param: float
    label: str


@dataclass(frozen=True)
class MeasureFamily:
    members: tuple
    seed: int | None
    ladder: tuple

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def restricted(self, keep) -> "MeasureFamily":
        return MeasureFamily(tuple(m for m in self.members if keep(m)), self.seed, self.ladder)

    def provenance(self):
        kinds = {}
        for m in self.members:
            kinds[m.label] = kinds.get(m.label, 0) + 1
        return {"seed": self.seed, "size": len(self.members), "ladder": list(self.ladder),
                "kinds": dict(sorted(kinds.items()))}


def _offcenter(rng, s: float) -> PoissonCircle:
    """Balayage of ``delta_0`` onto a circle of support radius ``s`` that surrounds 0."""
    rho = s * rng.uniform(0.55, 0.95)
    c = (s - rho) * np.exp(2j * np.pi * rng.uniform())
    return PoissonCircle(0j, rho, 1.0, c)


def _log_uniform_radius(rng, r_min: float, r_max: float, R: float) -> float:
    """Radius with ``log(R - r)`` uniform between the two distances to the boundary."""
    hi, lo = np.log(R - r_min), np.log(R - r_max)
    return float(R - np.exp(rng.uniform(lo, hi)))


def representing_family(size: int = DEFAULT_FAMILY_SIZE, seed: int | None = None,
                        G: DomainSpec | None = None, ladder=None, max_k: int = 5) -> MeasureFamily:
    """Deterministic ladder circles plus ``size - len(ladder) - 3`` seeded random members.

    The ladder defaults to ``R*(1 - 10**-k)``, ``k = 1..max_k``; random members
    never reach beyond its last rung.
    """
    if seed is None:
        raise ConfigurationError("a seed is required for the sampled measure family")
    G = G or DomainSpec.unit_disk()
    R = G.R
    ladder = tuple(float(r) for r in (decade_ladder(max_k, R=R) if ladder is None else ladder))
    if not ladder:
        raise ConfigurationError("empty radius ladder")
    r_max = max(ladder)
    members = []
    det = sorted({*(R * s for s in SMALL_RADII if R * s < r_max), *ladder})
    for r in det:
        members.append(FamilyMember(len(members), CircleUniform(0j, r, 1.0), r, "circle"))
    if size < len(members):
        raise ConfigurationError(f"family size {size} is below the {len(members)} ladder members")
    rng = np.random.default_rng(seed)
    r_min = min(0.05 * R, 0.5 * r_max)
    while len(members) < size:
        kind = len(members) % 3
        if kind == 0:
            k = int(rng.integers(2, 5))
            radii = [_log_uniform_radius(rng, r_min, r_max, R) for _ in range(k)]
            w = rng.dirichlet(np.ones(k))
            mu = combine(w, [CircleUniform(0j, r, 1.0) for r in radii])
            label = "circle_mix"
        elif kind == 1:
            mu = _offcenter(rng, _log_uniform_radius(rng, r_min, r_max, R))
            label = "offcenter"
        else:
            k = int(rng.integers(2, 4))
            parts = []
            for j in range(k):
                s = _log_uniform_radius(rng, r_min, r_max, R)
                parts.append(_offcenter(rng, s) if j % 2 == 0 else CircleUniform(0j, s, 1.0))
            mu = combine(rng.dirichlet(np.ones(k)), parts)
            label = "mixed"
        members.append(FamilyMember(len(members), mu, float(mu.support_radius()), label))
    return MeasureFamily(tuple(members), seed, ladder)


def jensen_family(size: int = DEFAULT_FAMILY_SIZE, seed: int | None = None,
                  G: DomainSpec | None = None, ladder=None, max_k: int = 5,
                  tol: float = 1e-6) -> MeasureFamily:
    """:func:`representing_family` filtered through :func:`jensen_check`.

    The default ``tol`` leaves room for trapezoid error when a circle passes
    close to a bank pole.
    """
    fam = representing_family(size, seed, G, ladder, max_k)
    bank = TestFunctionBank.default(G or DomainSpec.unit_disk())
    return fam.restricted(lambda m: jensen_check(m.measure, bank, tol=tol).passed)


def _support_circles(mu: Measure):
    return [(p.center, p.radius) for p in mu.parts()]


def random_pj_case(rng: np.random.Generator, degree: int = 5, R: float = 1.0,
                   clearance: float = 0.03):
    """A random polynomial of ``degree`` and a random representing measure.

    The measure is a centered circle, an off-center balayage of ``delta_0`` or a
    mixture of both; roots are uniform in ``|z| < 0.95 R`` and are redrawn when
    they fall within ``clearance * R`` of a support circle (the trapezoid rule
    loses its geometric rate there).
    """
    from .functions import Polynomial

    kind = int(rng.integers(0, 3))
    s = R * rng.uniform(0.2, 0.95)
    if kind == 0:
        mu = CircleUniform(0j, s, 1.0)
    elif kind == 1:
        mu = _offcenter(rng, s)
    else:
        s2 = R * rng.uniform(0.2, 0.95)
        mu = combine(rng.dirichlet(np.ones(2)), [CircleUniform(0j, s, 1.0), _offcenter(rng, s2)])
    circles = _support_circles(mu)
    roots = []
    while len(roots) < degree:
        z = 0.95 * R * np.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform())
        if abs(z) < 1e-3 * R:
            continue
        if all(abs(abs(z - c) - r) >= clearance * R for c, r in circles):
            roots.append(complex(z))
    lead = complex(rng.normal(), rng.normal())
    return Polynomial.from_roots(roots, lead), mu
