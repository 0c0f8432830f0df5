"""Domains, boundary distance, the weight correction ``l_G``, smoothing radii
and the two smoothing operators (supremum over a disk, mean over a circle or
disk).

Scalar fields throughout the package are plain callables that accept a
complex ``numpy`` array and return a real array of the same shape.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError, EvaluationError, ValidationError

Field = Callable[[np.ndarray], np.ndarray]

UNIT_DISK = "unit_disk"
DISK = "disk"
PLANE_WINDOW = "plane_window"


@dataclass(frozen=True)
class DomainSpec:
    """A disk ``|z| < R`` or a finite window ``|z| <= R`` standing in for the plane."""

    kind: str = UNIT_DISK
    R: float = 1.0

    def __post_init__(self):
        if self.kind not in (UNIT_DISK, DISK, PLANE_WINDOW):
            raise ValidationError(f"unknown domain kind {self.kind!r}")
        if not (math.isfinite(self.R) and self.R > 0):
            raise ValidationError(f"domain radius must be positive, got {self.R}")
        if self.kind == UNIT_DISK and self.R != 1.0:
            raise ValidationError("UnitDisk has R = 1")

    @classmethod
    def unit_disk(cls) -> "DomainSpec":
        return cls(UNIT_DISK, 1.0)

    @classmethod
    def disk(cls, R: float) -> "DomainSpec":
        return cls(DISK, float(R))

    @classmethod
    def plane_window(cls, R: float) -> "DomainSpec":
        return cls(PLANE_WINDOW, float(R))

    @property
    def is_plane(self) -> bool:
        return self.kind == PLANE_WINDOW

    @property
    def is_unit_disk(self) -> bool:
        return self.kind == UNIT_DISK or (self.kind == DISK and self.R == 1.0)

    def contains(self, z, margin: float = 0.0) -> np.ndarray:
        """True where ``|z| <= R - margin`` (closed for the plane window)."""
        r = np.abs(np.asarray(z, dtype=complex))
        if self.is_plane:
            return r <= self.R - margin
        return r < self.R - margin

    def to_dict(self):
        return {"kind": self.kind, "R": self.R}

    @classmethod
    def from_dict(cls, d) -> "DomainSpec":
        kind = d.get("kind", UNIT_DISK)
        return cls(kind, float(d.get("R", 1.0)))


def _as_complex(z) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    if not np.all(np.isfinite(z)):
        raise ValidationError("complex points must have finite components")
    return z


def _ret(arr: np.ndarray):
    return float(arr) if arr.ndim == 0 else arr


def boundary_distance(G: DomainSpec, z):
    """Distance from ``z`` to the boundary of ``G``; ``inf`` for the plane."""
    z = _as_complex(z)
    r = np.abs(z)
    if G.is_plane:
        if np.any(r > G.R):
            raise DomainError(f"point outside the plane window |z| <= {G.R}")
        return _ret(np.full(z.shape, np.inf))
    if np.any(r > G.R):
        raise DomainError(f"point outside the closed disk of radius {G.R}")
    return _ret(G.R - r)


def weight_l(G: DomainSpec, z):
    """The correction ``l_G``: ``log(1/rho(z, dG))`` on disks, ``log(2+|z|)`` on the plane."""
    z = _as_complex(z)
    if G.is_plane:
        boundary_distance(G, z)
        return _ret(np.log(2.0 + np.abs(z)))
    rho = np.asarray(boundary_distance(G, z))
    if np.any(rho <= 0):
        raise DomainError("l_G is undefined on the boundary")
    return _ret(-np.log(rho))


class Kernel(str, enum.Enum):
    """Geometry of the smoothing mass ``m_z``: uniform on the circle or on the disk."""

    CIRCUMFERENCE = "circle"
    DISK = "disk"

    @classmethod
    def parse(cls, value) -> "Kernel":
        if isinstance(value, Kernel):
            return value
        aliases = {"circle": cls.CIRCUMFERENCE, "circumference": cls.CIRCUMFERENCE,
                   "disk": cls.DISK}
        try:
            return aliases[str(value).lower()]
        except KeyError:
            raise ValidationError(f"unknown kernel {value!r}") from None


@dataclass(frozen=True)
class SigmaSpec:
    """Smoothing radius ``sigma(z)``.

    ``mode`` is ``"default"`` (``min{1, rho/2}`` clamped by ``|z|/2``),
    ``"constant"`` or ``"custom"`` (a radial step table of ``(|z| upper
    bound, sigma)`` pairs).  ``scale`` multiplies the result and is the knob
    used to shrink the smoothing towards the identity.
    """

    mode: str = "default"
    value: float | None = None
    table: tuple = ()
    scale: float = 1.0

    def __post_init__(self):
        if self.mode not in ("default", "constant", "custom"):
            raise ValidationError(f"unknown sigma mode {self.mode!r}")
        if self.mode == "constant" and not (self.value and self.value > 0):
            raise ValidationError("constant sigma needs a positive value")
        if self.mode == "custom":
            if not self.table:
                raise ValidationError("custom sigma needs a nonempty table")
            if any(s <= 0 for _, s in self.table):
                raise ValidationError("custom sigma values must be positive")
        if not self.scale > 0:
            raise ValidationError("sigma scale must be positive")

    @classmethod
    def default(cls, scale: float = 1.0) -> "SigmaSpec":
        return cls("default", scale=scale)

    @classmethod
    def constant(cls, s: float) -> "SigmaSpec":
        return cls("constant", value=float(s))

    @classmethod
    def custom(cls, table) -> "SigmaSpec":
        rows = tuple(sorted((float(b), float(s)) for b, s in table))
        return cls("custom", table=rows)

    def raw(self, G: DomainSpec, z) -> np.ndarray:
        """Unvalidated radii (no escape check)."""
        z = _as_complex(z)
        r = np.abs(z)
        if self.mode == "default":
            rho = np.asarray(boundary_distance(G, z), dtype=float)
            s = np.minimum(1.0, rho / 2.0)
            s = np.where(r > 0, np.minimum(s, r / 2.0), s)
        elif self.mode == "constant":
            s = np.full(z.shape, self.value)
        else:
            s = np.full(z.shape, np.nan)
            for bound, val in reversed(self.table):
                s = np.where(r <= bound, val, s)
            if np.any(np.isnan(s)):
                raise DomainError("custom sigma table does not cover the queried point")
        return s * self.scale

    def radius(self, G: DomainSpec, z):
        """``sigma(z)``, raising :class:`DomainError` if the disk leaves ``G``."""
        z = _as_complex(z)
        s = self.raw(G, z)
        if G.is_plane:
            escapes = np.abs(z) + s > G.R
        else:
            escapes = s >= np.asarray(boundary_distance(G, z))
        if np.any(escapes):
            bad = np.atleast_1d(z)[np.atleast_1d(escapes)][0]
            raise DomainError(f"smoothing disk at {bad} leaves the domain")
        return _ret(s)

    def admissible(self, G: DomainSpec, z) -> np.ndarray:
        """Pointwise check of ``0 < sigma < min(rho, |z|)`` (for ``z != 0``)."""
        z = _as_complex(z)
        s = self.raw(G, z)
        rho = np.asarray(boundary_distance(G, z), dtype=float)
        return (s > 0) & (s < rho) & (s < np.abs(z))

    def to_dict(self):
        d = {"mode": self.mode, "scale": self.scale}
        if self.mode == "constant":
            d["value"] = self.value
        if self.mode == "custom":
            d["table"] = [list(t) for t in self.table]
        return d

    @classmethod
    def from_dict(cls, d) -> "SigmaSpec":
        mode = d.get("mode", "default")
        scale = float(d.get("scale", 1.0))
        if mode == "constant":
            return cls("constant", value=float(d["value"]), scale=scale)
        if mode == "custom":
            return cls("custom", table=tuple(sorted((float(b), float(s)) for b, s in d["table"])),
                       scale=scale)
        return cls("default", scale=scale)


def geometry_from_dict(d):
    """Parse the ``{"domain": ..., "sigma": ...}`` object used by the CLI."""
    G = DomainSpec.from_dict(d.get("domain", {}))
    sigma = SigmaSpec.from_dict(d.get("sigma", {}))
    return G, sigma


def geometry_to_dict(G: DomainSpec, sigma: SigmaSpec):
    return {"domain": G.to_dict(), "sigma": sigma.to_dict()}


def circle_nodes(n: int, shift: float = 0.0) -> np.ndarray:
    """Equispaced angles ``2*pi*(j + shift)/n``."""
    if n < 1:
        raise ValidationError("need at least one quadrature node")
    return 2.0 * np.pi * (np.arange(n) + shift) / n


def disk_rule(n_theta: int, n_radial: int):
    """Offsets and weights of a product rule for the uniform probability on the unit disk.

    Gauss-Legendre in ``t = rho**2`` (the area variable) times the trapezoid
    rule in angle; exact for polynomials in ``x, y`` of moderate degree.
    """
    t, wt = np.polynomial.legendre.leggauss(n_radial)
    t = 0.5 * (t + 1.0)
    wt = 0.5 * wt
    theta = circle_nodes(n_theta)
    offsets = (np.sqrt(t)[:, None] * np.exp(1j * theta)[None, :]).ravel()
    weights = (wt[:, None] * np.full(n_theta, 1.0 / n_theta)[None, :]).ravel()
    return offsets, weights


def _check_finite(values: np.ndarray, points: np.ndarray, what: str):
    bad = ~np.isfinite(values)
    if np.any(bad):
        p = complex(np.asarray(points).ravel()[np.flatnonzero(bad.ravel())[0]])
        raise EvaluationError(f"non-finite {what} at {p}", point=p)


def sup_smooth(w: Field, G: DomainSpec, sigma: SigmaSpec, z, n_r: int = 32, n_theta: int = 128):
    """``sup`` of ``w`` over the closed disk of radius ``sigma(z)`` about ``z``.

    Sampled on a polar net of ``n_r x n_theta`` nodes plus the center, so the
    result is a lower bound of the true supremum (exact when the maximum sits
    on a net node).
    """
    z = _as_complex(z)
    s = np.asarray(sigma.radius(G, z), dtype=float)
    rad = np.arange(1, n_r + 1) / n_r
    ring = (rad[:, None] * np.exp(1j * circle_nodes(n_theta))[None, :]).ravel()
    offsets = np.concatenate([[0.0], ring])
    pts = z[..., None] + s[..., None] * offsets
    vals = np.asarray(w(pts), dtype=float)
    vals = np.where(np.isnan(vals), -np.inf, vals)
    return _ret(vals.max(axis=-1))


def circle_mean_smooth(w: Field, G: DomainSpec, sigma: SigmaSpec, z, quad_nodes: int = 1024,
                       kernel: Kernel | str = Kernel.CIRCUMFERENCE, radial_nodes: int = 32):
    """Mean of ``w`` against ``m_z``: uniform on the circle (default) or disk of radius ``sigma(z)``."""
    kernel = Kernel.parse(kernel)
    z = _as_complex(z)
    s = np.asarray(sigma.radius(G, z), dtype=float)
    if kernel is Kernel.CIRCUMFERENCE:
        offsets = np.exp(1j * circle_nodes(quad_nodes))
        weights = np.full(quad_nodes, 1.0 / quad_nodes)
    else:
        offsets, weights = disk_rule(quad_nodes, radial_nodes)
    pts = z[..., None] + s[..., None] * offsets
    vals = np.asarray(w(pts), dtype=float)
    _check_finite(vals, pts, "field sample in circle mean")
    return _ret(vals @ weights)


def corrected_weight(M: Field, G: DomainSpec, z, sigma: SigmaSpec | None = None):
    """``M^(sigma)(z) + 4 l_G(z)`` with the default radius; reported, never certified."""
    sigma = sigma or SigmaSpec.default()
    return _ret(np.asarray(sup_smooth(M, G, sigma, z)) + 4.0 * np.asarray(weight_l(G, z)))
