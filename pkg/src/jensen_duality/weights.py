"""Weight functions ``M`` for the spaces ``H(G; M)``.

Radial presets expose their profile ``m(s) = M(|z| = s)`` and the closed-form
radial Laplacian ``m'' + m'/s`` so that the Riesz measure can be formed
without numerical differentiation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ValidationError


class WeightSpec:
    """Base class; instances are callable scalar fields."""

    kind = "abstract"
    radial = False

    def __call__(self, z) -> np.ndarray:
        raise NotImplementedError

    def value_at_origin(self) -> float:
        return float(self(np.array([0j]))[0])

    def is_subharmonic(self) -> bool:
        return False

    def to_dict(self):
        raise NotImplementedError


@dataclass(frozen=True)
class ZeroWeight(WeightSpec):
    kind = "zero"
    radial = True

    def __call__(self, z):
        return np.zeros(np.shape(z))

    def profile(self, s):
        return np.zeros(np.shape(s))

    def radial_laplacian(self, s):
        return np.zeros(np.shape(s))

    def line_density(self, s):
        return np.zeros(np.shape(s))

    def is_subharmonic(self):
        return True

    def to_dict(self):
        return {"preset": "zero"}


@dataclass(frozen=True)
class PowerRadial(WeightSpec):
    """``M(z) = alpha * |z|**p`` with ``p >= 1``."""

    alpha: float
    p: float = 2.0

    kind = "power"
    radial = True

    def __post_init__(self):
        if not self.p >= 1:
            raise ValidationError("PowerRadial needs p >= 1")

    def __call__(self, z):
        return self.alpha * np.abs(np.asarray(z)) ** self.p

    def profile(self, s):
        return self.alpha * np.asarray(s, dtype=float) ** self.p

    def radial_laplacian(self, s):
        s = np.asarray(s, dtype=float)
        with np.errstate(divide="ignore"):
            return self.alpha * self.p ** 2 * s ** (self.p - 2)

    def line_density(self, s):
        """``s * Laplacian``, i.e. ``dn/ds`` with ``n(r) = nu(|z| <= r)`` times ``2*pi``."""
        return self.alpha * self.p ** 2 * np.asarray(s, dtype=float) ** (self.p - 1)

    def is_subharmonic(self):
        return self.alpha >= 0

    def to_dict(self):
        return {"preset": "power", "alpha": self.alpha, "p": self.p}


@dataclass(frozen=True)
class LogBoundary(WeightSpec):
    """``M(z) = beta * log(1 / (1 - |z|))`` on the unit disk."""

    beta: float

    kind = "log_boundary"
    radial = True

    def __call__(self, z):
        r = np.abs(np.asarray(z))
        if np.any(r >= 1):
            raise DomainError("LogBoundary weight is defined on the open unit disk")
        return -self.beta * np.log1p(-r)

    def profile(self, s):
        return -self.beta * np.log1p(-np.asarray(s, dtype=float))

    def radial_laplacian(self, s):
        s = np.asarray(s, dtype=float)
        with np.errstate(divide="ignore"):
            return self.beta / (s * (1.0 - s) ** 2)

    def line_density(self, s):
        return self.beta / (1.0 - np.asarray(s, dtype=float)) ** 2

    def is_subharmonic(self):
        return self.beta >= 0

    def to_dict(self):
        return {"preset": "log_boundary", "beta": self.beta}


class GridSampled(WeightSpec):
    """Values on a point cloud; piecewise-linear in between, nearest outside the hull."""

    kind = "grid"

    def __init__(self, points, values):
        from scipy.interpolate import LinearNDInterpolator, NearestNDInterpolator

        self.points = np.asarray(points, dtype=complex).ravel()
        self.values = np.asarray(values, dtype=float).ravel()
        if self.points.shape != self.values.shape:
            raise ValidationError("grid weight needs one value per point")
        if not np.all(np.isfinite(self.values)):
            raise ValidationError("grid weight values must be finite")
        xy = np.column_stack([self.points.real, self.points.imag])
        self._lin = LinearNDInterpolator(xy, self.values)
        self._near = NearestNDInterpolator(xy, self.values)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        xy = np.column_stack([z.real.ravel(), z.imag.ravel()])
        out = self._lin(xy)
        miss = np.isnan(out)
        if miss.any():
            out[miss] = self._near(xy[miss])
        return out.reshape(z.shape)

    def to_dict(self):
        return {"preset": "grid", "points": [[p.real, p.imag] for p in self.points],
                "values": self.values.tolist()}


def weight_from_dict(d) -> WeightSpec:
    preset = d.get("preset", "zero")
    if preset == "zero":
        return ZeroWeight()
    if preset == "power":
        return PowerRadial(float(d["alpha"]), float(d.get("p", 2.0)))
    if preset == "log_boundary":
        return LogBoundary(float(d["beta"]))
    if preset == "grid":
        pts = [complex(a, b) for a, b in d["points"]]
        return GridSampled(pts, d["values"])
    raise ValidationError(f"unknown weight preset {preset!r}")


def finite_difference_laplacian(w: WeightSpec, s: float, h: float = 1e-4) -> float:
    """Central-difference ``m'' + m'/s`` of a radial profile (used as a spot check)."""
    m = w.profile
    d2 = (m(s + h) - 2 * m(s) + m(s - h)) / h ** 2
    d1 = (m(s + h) - m(s - h)) / (2 * h)
    return float(d2 + d1 / s)


__all__ = ["WeightSpec", "ZeroWeight", "PowerRadial", "LogBoundary", "GridSampled",
           "weight_from_dict", "finite_difference_laplacian"]
