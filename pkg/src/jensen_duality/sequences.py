"""Zero sequences ``Lambda`` with multiplicities, and the two generator formulas
``a - b/n^p`` and ``a*(1 - q^n)`` used for truncated infinite sequences.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError, ValidationError
from .geometry import DomainSpec

_NUM = r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_POWER_RE = re.compile(
    rf"^\s*(?P<a>{_NUM})\s*-\s*(?P<b>{_NUM})\s*/\s*n\s*(?:\^\s*(?P<p>{_NUM}))?\s*$")
_GEOM_RE = re.compile(
    rf"^\s*(?:(?P<a>{_NUM})\s*\*\s*)?\(\s*1\s*-\s*(?P<q>{_NUM})\s*\^\s*n\s*\)\s*$")


def parse_generator(formula: str) -> Callable[[np.ndarray], np.ndarray]:
    """Compile ``"a - b/n^p"`` or ``"a*(1 - q^n)"`` into a vectorized map ``n -> lambda_n``.

    >>> parse_generator("1 - 1/n^2")(np.array([1, 2]))
    array([0.  , 0.75])
    """
    m = _POWER_RE.match(formula)
    if m:
        a, b = float(m["a"]), float(m["b"])
        p = float(m["p"]) if m["p"] else 1.0
        return lambda n: a - b / np.asarray(n, dtype=float) ** p
    m = _GEOM_RE.match(formula)
    if m:
        a = float(m["a"]) if m["a"] else 1.0
        q = float(m["q"])
        return lambda n: a * (1.0 - q ** np.asarray(n, dtype=float))
    raise ValidationError(
        f"cannot parse generator {formula!r}; expected 'a - b/n^p' or 'a*(1 - q^n)'")


@dataclass(frozen=True)
class ZeroSequence:
    """Points of ``Lambda`` (nonzero, sorted by modulus) with multiplicities.

    Zeros at the origin are kept apart in ``origin_multiplicity``: they
    contribute to the Blaschke sum but not to potentials (where the origin is
    the pole of ``V``).  ``truncation`` is the number of generator terms used,
    or ``None`` for an explicit finite list.
    """

    points: np.ndarray
    multiplicities: np.ndarray
    domain: DomainSpec = DomainSpec()
    origin_multiplicity: int = 0
    truncation: int | None = None
    generator: str | None = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=complex).ravel()
        mult = np.asarray(self.multiplicities, dtype=float).ravel()
        if pts.shape != mult.shape:
            raise ValidationError("one multiplicity per point is required")
        if np.any(mult < 1) or np.any(mult != np.round(mult)):
            raise ValidationError("multiplicities must be integers >= 1")
        if not np.all(np.isfinite(pts)):
            raise ValidationError("sequence points must be finite")
        if pts.size and not np.all(self.domain.contains(pts)):
            bad = pts[~self.domain.contains(pts)][0]
            raise DomainError(f"sequence point {bad} is not interior to the domain")
        if np.any(pts == 0):
            raise ValidationError("origin zeros belong in origin_multiplicity")
        order = np.argsort(np.abs(pts), kind="stable")
        object.__setattr__(self, "points", pts[order])
        object.__setattr__(self, "multiplicities", mult[order])

    @classmethod
    def from_points(cls, points, multiplicities=None, domain: DomainSpec | None = None,
                    truncation=None, generator=None) -> "ZeroSequence":
        """Build from raw points; exact zeros are moved to ``origin_multiplicity``."""
        pts = np.asarray(points, dtype=complex).ravel()
        mult = (np.ones(pts.shape) if multiplicities is None
                else np.asarray(multiplicities, dtype=float).ravel())
        at0 = pts == 0
        k = int(mult[at0].sum())
        return cls(pts[~at0], mult[~at0], domain or DomainSpec.unit_disk(), k, truncation,
                   generator)

    @classmethod
    def from_generator(cls, formula: str, N: int, domain: DomainSpec | None = None):
        """First ``N`` terms of a generator formula (real points)."""
        if N < 1:
            raise ValidationError("truncation N must be >= 1")
        lam = parse_generator(formula)(np.arange(1, N + 1))
        G = domain or DomainSpec.unit_disk()
        out = ~G.contains(lam)
        if out.any():
            n = int(np.flatnonzero(out)[0]) + 1
            raise DomainError(f"term n={n} of {formula!r} is {lam[n - 1]!r}, not interior to the"
                              f" domain in floating point; lower the truncation N")
        return cls.from_points(lam, None, G, N, formula)

    @classmethod
    def empty(cls, domain: DomainSpec | None = None) -> "ZeroSequence":
        return cls(np.zeros(0, dtype=complex), np.zeros(0), domain or DomainSpec.unit_disk())

    def __len__(self):
        return int(self.multiplicities.sum()) + self.origin_multiplicity

    @property
    def moduli(self) -> np.ndarray:
        return np.abs(self.points)

    @property
    def horizon(self) -> float | None:
        """Largest modulus reached by a truncated sequence (``None`` if not truncated)."""
        if self.truncation is None or not self.points.size:
            return None
        return float(self.moduli[-1])

    def inside(self, r: float) -> "ZeroSequence":
        """The sub-sequence with ``|lambda| <= r`` (origin zeros kept)."""
        keep = self.moduli <= r
        return ZeroSequence(self.points[keep], self.multiplicities[keep], self.domain,
                            self.origin_multiplicity, self.truncation, self.generator)

    def to_dict(self):
        d = {"domain": self.domain.to_dict(), "origin_multiplicity": self.origin_multiplicity,
             "truncation": self.truncation}
        if self.generator:
            d["generator"] = self.generator
        else:
            d["points"] = [{"z": [float(p.real), float(p.imag)], "m": int(m)}
                           for p, m in zip(self.points, self.multiplicities)]
        return d


def sequence_from_dict(d, default_N: int = 10_000) -> ZeroSequence:
    """``{"generator": "...", "N": ...}`` or ``{"points": [...]}`` (entries ``[re, im]``,
    plain numbers, or ``{"z": [re, im], "m": k}``)."""
    domain = DomainSpec.from_dict(d.get("domain", {}))
    if "generator" in d:
        return ZeroSequence.from_generator(d["generator"], int(d.get("N", default_N)), domain)
    if "points" not in d:
        raise ValidationError("sequence needs 'generator' or 'points'")
    pts, mult = [], []
    for p in d["points"]:
        if isinstance(p, dict):
            z, m = p["z"], p.get("m", 1)
        else:
            z, m = p, 1
        if isinstance(z, (list, tuple)):
            z = complex(float(z[0]), float(z[1]) if len(z) > 1 else 0.0)
        pts.append(complex(z))
        mult.append(m)
    return ZeroSequence.from_points(pts, mult, domain)


def decade_ladder(max_k: int, horizon: float | None = None, R: float = 1.0) -> np.ndarray:
    """Radii ``R*(1 - 10**-k)``, ``k = 1..max_k``, capped at ``horizon``."""
    r = R * (1.0 - 10.0 ** -np.arange(1, max_k + 1, dtype=float))
    if horizon is not None:
        r = r[r <= horizon * (1 + 1e-12)]
    return r


def _check_unit_disk(seq: ZeroSequence):
    if not seq.domain.is_unit_disk:
        raise DomainError("Blaschke quantities are defined on the unit disk")


def blaschke_sum(seq: ZeroSequence) -> float:
    """``sum m_n (1 - |lambda_n|)`` including zeros at the origin."""
    _check_unit_disk(seq)
    return math.fsum((seq.multiplicities * (1.0 - seq.moduli)).tolist()) + seq.origin_multiplicity


def partial_blaschke_sums(seq: ZeroSequence, checkpoints) -> list:
    """``(n, sum of the first n terms)`` in sequence order (origin zeros first)."""
    _check_unit_disk(seq)
    terms = np.concatenate([np.ones(seq.origin_multiplicity),
                            np.repeat(1.0 - seq.moduli, seq.multiplicities.astype(int))])
    csum = np.cumsum(terms)
    out = []
    for n in checkpoints:
        n = int(min(n, terms.size))
        out.append((n, float(csum[n - 1]) if n > 0 else 0.0))
    return out


def counting_log_sum(seq: ZeroSequence, r_grid) -> np.ndarray:
    """``sum_{|lambda_n| <= r} m_n log(r/|lambda_n|)`` for each ``r`` (nonzero points)."""
    mod = seq.moduli
    w = seq.multiplicities
    cm = np.concatenate([[0.0], np.cumsum(w)])
    cl = np.concatenate([[0.0], np.cumsum(w * np.log(mod))]) if mod.size else np.zeros(1)
    r_grid = np.asarray(r_grid, dtype=float)
    k = np.searchsorted(mod, r_grid, side="right")
    return cm[k] * np.log(r_grid) - cl[k]


def log_blaschke(seq: ZeroSequence, z, chunk: int = 2048):
    """``log|B(z)|`` for the Blaschke product with zeros ``Lambda``; ``-inf`` on ``Lambda``.

    Origin zeros contribute ``k log|z|``.
    """
    _check_unit_disk(seq)
    z = np.asarray(z, dtype=complex)
    flat = z.ravel()
    out = np.zeros(flat.shape)
    with np.errstate(divide="ignore"):
        if seq.origin_multiplicity:
            out += seq.origin_multiplicity * np.log(np.abs(flat))
        for s in range(0, seq.points.size, chunk):
            lam = seq.points[s:s + chunk]
            m = seq.multiplicities[s:s + chunk]
            num = np.abs(lam[None, :] - flat[:, None])
            den = np.abs(1.0 - np.conj(lam)[None, :] * flat[:, None])
            out += (np.log(num / den)) @ m
    out = out.reshape(z.shape)
    return float(out) if out.ndim == 0 else out


def log_g_normalized(seq: ZeroSequence, z, chunk: int = 2048):
    """``log|B(z)/B(0)|`` over the nonzero points: the zero-set representative
    normalized to ``1`` at the origin."""
    z = np.asarray(z, dtype=complex)
    flat = z.ravel()
    out = np.zeros(flat.shape)
    with np.errstate(divide="ignore"):
        for s in range(0, seq.points.size, chunk):
            lam = seq.points[s:s + chunk]
            m = seq.multiplicities[s:s + chunk]
            a = np.abs(1.0 - flat[:, None] / lam[None, :])
            b = np.abs(1.0 - np.conj(lam)[None, :] * flat[:, None])
            out += np.log(a / b) @ m
    out = out.reshape(z.shape)
    return float(out) if out.ndim == 0 else out
