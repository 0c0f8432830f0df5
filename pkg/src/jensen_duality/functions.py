"""Holomorphic test functions: polynomials, finite Blaschke products and
coprime quotients ``f = g0/h0``, with ``u_f = max(log|g0|, log|h0|)`` and the
Nevanlinna characteristic ``T_f(r)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, EvaluationError, JensenDualityError, ValidationError
from .geometry import circle_nodes

COPRIME_TOL = 1e-9


def _cx(v) -> complex:
    if isinstance(v, (list, tuple)):
        return complex(float(v[0]), float(v[1]) if len(v) > 1 else 0.0)
    return complex(v)


class FunctionSpec:
    kind = "abstract"

    def __call__(self, z):
        raise NotImplementedError

    def log_abs(self, z) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return np.log(np.abs(self(z)))

    def zeros(self) -> np.ndarray:
        raise NotImplementedError

    def to_dict(self):
        raise NotImplementedError


@dataclass(frozen=True)
class Polynomial(FunctionSpec):
    """``sum coeffs[k] z**k`` (ascending order)."""

    coeffs: tuple

    kind = "polynomial"

    def __post_init__(self):
        c = tuple(complex(x) for x in self.coeffs)
        while len(c) > 1 and c[-1] == 0:
            c = c[:-1]
        if not c or all(x == 0 for x in c):
            raise ValidationError("the zero polynomial is not a valid test function")
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def from_roots(cls, roots, lead: complex = 1.0) -> "Polynomial":
        c = np.atleast_1d(np.poly(np.asarray(roots, dtype=complex)))[::-1] * lead
        return cls(tuple(c))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, z):
        return np.polynomial.polynomial.polyval(np.asarray(z, dtype=complex),
                                                np.array(self.coeffs))

    def zeros(self):
        if self.degree == 0:
            return np.zeros(0, dtype=complex)
        return np.roots(np.array(self.coeffs[::-1]))

    def to_dict(self):
        return {"kind": "polynomial", "coeffs": [[c.real, c.imag] for c in self.coeffs]}


@dataclass(frozen=True)
class FiniteBlaschke(FunctionSpec):
    """``prod (conj(a)/|a|) (a - z)/(1 - conj(a) z)``; a zero at ``0`` contributes ``z``."""

    zeros_: tuple

    kind = "blaschke"

    def __post_init__(self):
        zs = tuple(complex(a) for a in self.zeros_)
        if any(abs(a) >= 1 for a in zs):
            raise DomainError("Blaschke zeros must lie in the open unit disk")
        object.__setattr__(self, "zeros_", zs)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.ones(z.shape, dtype=complex)
        for a in self.zeros_:
            if a == 0:
                out = out * z
            else:
                out = out * (np.conj(a) / abs(a)) * (a - z) / (1 - np.conj(a) * z)
        return out

    def log_abs(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.zeros(z.shape)
        with np.errstate(divide="ignore"):
            for a in self.zeros_:
                out += np.log(np.abs(a - z)) - np.log(np.abs(1 - np.conj(a) * z))
        return out

    def zeros(self):
        return np.array(self.zeros_, dtype=complex)

    def to_dict(self):
        return {"kind": "blaschke", "zeros": [[a.real, a.imag] for a in self.zeros_]}


@dataclass(frozen=True)
class RationalPair(FunctionSpec):
    """``f = num/den`` with no common zeros; ``normalized`` asks for ``num(0) = den(0) = 1``."""

    num: FunctionSpec
    den: FunctionSpec
    normalized: bool = False

    kind = "rational"

    def __post_init__(self):
        if isinstance(self.num, RationalPair) or isinstance(self.den, RationalPair):
            raise ValidationError("numerator and denominator must be polynomials or Blaschke")
        zn, zd = self.num.zeros(), self.den.zeros()
        if zn.size and zd.size:
            d = np.abs(zn[:, None] - zd[None, :])
            if d.min() <= COPRIME_TOL:
                i, j = np.unravel_index(np.argmin(d), d.shape)
                raise ValidationError(
                    f"numerator and denominator share the zero {zn[i]:.6g} (within {COPRIME_TOL})")
        if self.normalized:
            for name, part in (("numerator", self.num), ("denominator", self.den)):
                v = complex(np.asarray(part(0j)))
                if abs(v - 1) > COPRIME_TOL:
                    raise ValidationError(f"normalized pair needs {name}(0) = 1, got {v:.6g}")

    def __call__(self, z):
        return self.num(z) / self.den(z)

    def zeros(self):
        return self.num.zeros()

    def poles(self):
        return self.den.zeros()

    def to_dict(self):
        return {"kind": "rational", "num": self.num.to_dict(), "den": self.den.to_dict(),
                "normalized": self.normalized}


ONE = Polynomial((1.0,))


def as_pair(f: FunctionSpec) -> RationalPair:
    """View any spec as a quotient (denominator ``1`` for entire parts)."""
    return f if isinstance(f, RationalPair) else RationalPair(f, ONE)


def function_from_dict(d) -> FunctionSpec:
    kind = d.get("kind")
    if kind == "polynomial":
        if "roots" in d:
            return Polynomial.from_roots([_cx(r) for r in d["roots"]], _cx(d.get("lead", 1.0)))
        return Polynomial(tuple(_cx(c) for c in d["coeffs"]))
    if kind == "blaschke":
        return FiniteBlaschke(tuple(_cx(a) for a in d["zeros"]))
    if kind == "rational":
        return RationalPair(function_from_dict(d["num"]), function_from_dict(d["den"]),
                            bool(d.get("normalized", False)))
    raise ValidationError(f"unknown function kind {kind!r}")


def uf_eval(f: FunctionSpec, z):
    """``u_f(z) = max(log|g0(z)|, log|h0(z)|)``."""
    pair = as_pair(f)
    z = np.asarray(z, dtype=complex)
    a = pair.num.log_abs(z)
    b = pair.den.log_abs(z)
    out = np.maximum(a, b)
    if np.any(np.isneginf(out)):
        p = complex(z.ravel()[np.flatnonzero(np.isneginf(out).ravel())[0]])
        raise JensenDualityError(f"numerator and denominator both vanish at {p}")
    return float(out) if out.ndim == 0 else out


def _circle_mean_uf(pair: RationalPair, r: float, quad_nodes: int) -> float:
    for shift in (0.0, 0.5):
        z = r * np.exp(1j * circle_nodes(quad_nodes, shift))
        with np.errstate(divide="ignore", invalid="ignore"):
            vals = np.maximum(pair.num.log_abs(z), pair.den.log_abs(z))
        if np.all(np.isfinite(vals)):
            return float(vals.mean())
    p = complex(z[np.flatnonzero(~np.isfinite(vals))[0]])
    raise EvaluationError(f"u_f is not finite at node {p} even after a node shift", point=p)


def nevanlinna_T(f: FunctionSpec, r, quad_nodes: int = 1024):
    """``T_f(r)``: trapezoid mean of ``u_f`` on ``|z| = r`` (vectorized over ``r``)."""
    pair = as_pair(f)
    r_arr = np.atleast_1d(np.asarray(r, dtype=float))
    if np.any(r_arr <= 0) or np.any(r_arr >= 1):
        raise DomainError("T_f(r) is evaluated for 0 < r < 1")
    out = np.array([_circle_mean_uf(pair, float(rr), quad_nodes) for rr in r_arr])
    return float(out[0]) if np.ndim(r) == 0 else out
