"""Evaluators of the dual inequalities over sampled test families.

Each evaluator returns a :class:`BoundReport`: the empirical sup (or inf)
together with a tri-state verdict on whether the underlying constant exists.
That verdict is read off the partial extrema along a radius ladder
``r_k = R(1 - 10**-k)``: the extremum over all test objects whose support
parameter is at most ``r_k``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, ValidationError
from .families import MeasureFamily, jensen_family, representing_family
from .functions import FunctionSpec, nevanlinna_T, uf_eval
from .geometry import DomainSpec, Kernel, SigmaSpec, corrected_weight
from .measures import (DEFAULT_QUAD_NODES, CircleUniform, TestFunctionBank, integrate,
                       integrate_log_sum, jensen_check, representing_check,
                       smooth_measure)
from .potentials import potential_eval, riesz_of_weight
from .sequences import (ZeroSequence, blaschke_sum, counting_log_sum, decade_ladder,
                        log_g_normalized, partial_blaschke_sums)
from .weights import WeightSpec, ZeroWeight

GROWTH_RATIO = 0.7
SETTLE_RATIO = 0.5
ABS_TOL = 1e-9


class BoundedFlag(str, enum.Enum):
    BOUNDED = "bounded"
    DIVERGENCE_SUSPECTED = "divergence_suspected"
    INCONCLUSIVE = "inconclusive"


@dataclass
class BoundReport:
    kind: str  # "sup" or "inf"
    value: float
    attained_at: str
    family_size: int
    bounded_flag: BoundedFlag
    trace: list = field(default_factory=list)  # [(ladder radius, partial extremum)]
    witness: list = field(default_factory=list)
    truncation: int | None = None
    notes: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    @property
    def bounded(self) -> bool:
        return self.bounded_flag is BoundedFlag.BOUNDED

    def to_dict(self):
        d = {f"{self.kind}_value": self.value, "attained_at": self.attained_at,
             "family_size": self.family_size, "bounded_flag": self.bounded_flag.value,
             "trace": [[float(a), float(b)] for a, b in self.trace],
             "witness": [[float(a), float(b)] for a, b in self.witness],
             "truncation": self.truncation, "notes": list(self.notes)}
        d.update(self.extra)
        return d


def classify_growth(params, values, abs_tol: float = ABS_TOL):
    """Tri-state verdict on a sequence of partial suprema along a ladder.

    ``divergence_suspected`` when the last three values strictly increase and
    the last increment keeps at least ``GROWTH_RATIO`` of the previous one
    (the three points are the witness); ``bounded`` when the last increment is
    negligible or has shrunk to ``SETTLE_RATIO`` of the previous one;
    ``inconclusive`` otherwise.  For infima pass negated values.
    """
    v = np.asarray(values, dtype=float)
    p = np.asarray(params, dtype=float)
    if v.size < 2:
        return BoundedFlag.INCONCLUSIVE, []
    d = np.diff(v)
    if v.size >= 3 and d[-1] > abs_tol and d[-2] > abs_tol and d[-1] >= GROWTH_RATIO * d[-2]:
        return BoundedFlag.DIVERGENCE_SUSPECTED, list(zip(p[-3:].tolist(), v[-3:].tolist()))
    if d[-1] <= abs_tol:
        return BoundedFlag.BOUNDED, []
    if v.size >= 3 and d[-1] <= SETTLE_RATIO * d[-2]:
        return BoundedFlag.BOUNDED, []
    return BoundedFlag.INCONCLUSIVE, []


def _ladder_extremum(ladder, params, vals, kind="sup"):
    """Partial sup/inf of ``vals`` over objects with ``param <= r`` for each rung."""
    params = np.asarray(params, dtype=float)
    vals = np.asarray(vals, dtype=float)
    trace = []
    for r in ladder:
        sel = vals[params <= r * (1 + 1e-12)]
        if sel.size == 0:
            continue
        trace.append((float(r), float(sel.max() if kind == "sup" else sel.min())))
    return trace


def _report(kind, labels, params, vals, ladder, truncation=None, notes=None):
    vals = np.asarray(vals, dtype=float)
    i = int(np.argmax(vals) if kind == "sup" else np.argmin(vals))
    trace = _ladder_extremum(ladder, params, vals, kind)
    ts = [t[1] for t in trace] if kind == "sup" else [-t[1] for t in trace]
    flag, wit = classify_growth([t[0] for t in trace], ts)
    if kind == "inf":
        wit = [(a, -b) for a, b in wit]
    return BoundReport(kind, float(vals[i]), labels[i], len(vals), flag, trace, wit,
                       truncation, list(notes or []))


# --------------------------------------------------------------------------
# Blaschke condition


@dataclass
class BlaschkeReport:
    sum_value: float
    sum_bounded: bool
    tail: float
    partial_sums: list
    sup: BoundReport
    agree: bool

    @property
    def verdict(self) -> str:
        if self.sum_bounded and self.sup.bounded:
            return "zero_set"
        if not self.sum_bounded and self.sup.bounded_flag is BoundedFlag.DIVERGENCE_SUSPECTED:
            return "divergence_suspected"
        return "inconclusive"

    def to_dict(self):
        return {"blaschke_sum": self.sum_value, "sum_bounded": self.sum_bounded,
                "cauchy_tail": self.tail, "partial_sums": self.partial_sums,
                "blaschke_sup": self.sup.to_dict(), "flags_agree": self.agree,
                "verdict": self.verdict}


def blaschke_sup(seq: ZeroSequence, r_grid=None) -> BoundReport:
    """``sup_r sum_{|lambda_n| <= r} log(r/|lambda_n|)`` over ``r_grid``.

    The default grid is the decade ladder to ``0.999`` for explicit lists, and
    to ``1 - 10**-8`` capped at the largest modulus for truncated generators.
    Zeros at the origin are outside the domain of this sum and are skipped.
    """
    if not seq.domain.is_unit_disk:
        raise DomainError("Blaschke quantities are defined on the unit disk")
    if r_grid is None:
        r_grid = decade_ladder(3) if seq.truncation is None else decade_ladder(8, seq.horizon)
    r_grid = np.asarray(r_grid, dtype=float)
    if r_grid.size == 0:
        raise ValidationError("empty radius grid")
    if np.any((r_grid <= 0) | (r_grid >= 1)):
        raise DomainError("radius grid must lie in (0, 1)")
    vals = counting_log_sum(seq, r_grid)
    notes = []
    if seq.origin_multiplicity:
        notes.append(f"{seq.origin_multiplicity} zero(s) at the origin excluded from the sum")
    labels = [f"r={r:.10g}" for r in r_grid]
    rep = _report("sup", labels, r_grid, vals, np.sort(r_grid), seq.truncation, notes)
    return rep


def blaschke_test(seq: ZeroSequence, r_grid=None, tail_tol: float = 1e-3) -> BlaschkeReport:
    """Blaschke sum with a Cauchy-tail check against the bounded-sup verdict.

    For a truncated generator the tail is the sum over the second half of the
    terms: a truncation doubling that moves the sum by less than ``tail_tol``
    counts as convergent.  An explicit finite list has zero tail.
    """
    total = blaschke_sum(seq)
    n = len(seq)
    if seq.truncation is None:
        tail = 0.0
    else:
        tail = total - (partial_blaschke_sums(seq, [n // 2])[0][1] if n else 0.0)
    sum_bounded = bool(tail < tail_tol)
    checkpoints = sorted({int(round(10 ** k)) for k in np.arange(0, math.log10(max(n, 1)) + 1e-9, 0.5)}
                         | {n}) if n else []
    sup = blaschke_sup(seq, r_grid)
    agree = sum_bounded == sup.bounded
    return BlaschkeReport(total, sum_bounded, float(tail),
                          [[k, v] for k, v in partial_blaschke_sums(seq, checkpoints)], sup, agree)


# --------------------------------------------------------------------------
# zero sets


def _riesz_or_none(M: WeightSpec):
    try:
        return riesz_of_weight(M), None
    except ValidationError as exc:
        return None, str(exc)


def _family_or_default(family, seed, size, G, ladder, jensen_only):
    if family is not None:
        return family
    maker = jensen_family if jensen_only else representing_family
    return maker(size, seed, G, ladder)


def zero_set_dual_test(seq: ZeroSequence, M: WeightSpec | None = None,
                       family: MeasureFamily | None = None, *, seed: int | None = None,
                       size: int = 64, jensen_only: bool = False, ladder=None,
                       quad_nodes: int = DEFAULT_QUAD_NODES, tol: float = 1e-8) -> dict:
    """Both arms of the zero-set criterion.

    potential arm: ``sum_n V(lambda_n) - int V dnu_M`` over ``V_r`` on the ladder
    and ``V_mu`` for each family member;  measure arm: ``int log|g| dmu - int M dmu``
    with ``g`` the Blaschke product normalized to ``g(0) = 1``.  The measure arm
    integrates ``log|g|`` numerically over the zeros inside the support only
    (the rest is harmonic on a disk containing the support and integrates to
    its value ``0`` at the origin); zeros or reflections ``1/conj(lambda)``
    close to a support circle get a rule graded toward them.  The two arms must agree in verdict; the
    per-member discrepancy from the Poisson-Jensen identity is reported.
    """
    M = M or ZeroWeight()
    if not seq.domain.is_unit_disk:
        raise DomainError("the zero-set criterion is evaluated on the unit disk")
    G = seq.domain
    if ladder is None:
        ladder = decade_ladder(5, seq.horizon)
    ladder = np.asarray(ladder, dtype=float)
    if ladder.size == 0:
        raise ValidationError("radius ladder is empty (truncation horizon too small)")
    family = _family_or_default(family, seed, size, G, ladder, jensen_only)
    notes = []
    if jensen_only:
        bank = TestFunctionBank.default(G)
        family = family.restricted(lambda m: jensen_check(m.measure, bank, tol=1e-6).passed)
        notes.append(f"jensen-only mode: {len(family)} members retained")
    if seq.origin_multiplicity:
        notes.append(f"{seq.origin_multiplicity} zero(s) at the origin factored out")

    nu, why = _riesz_or_none(M)
    pts, mult = seq.points, seq.multiplicities
    m0 = M.value_at_origin()

    pot_labels, pot_params, pot_vals = [], [], []
    meas_labels, meas_params, meas_vals = [], [], []
    residuals = []
    # V_r members (these are the potentials of centered circle measures)
    sums_r = counting_log_sum(seq, ladder)
    for r, s in zip(ladder, sums_r):
        if nu is not None:
            pot_labels.append(f"V_r r={r:.10g}")
            pot_params.append(r)
            pot_vals.append(float(s) - nu.integrate_vr(r))
    for mem in family:
        mu = mem.measure
        rad = mem.param
        inside = np.abs(pts) <= rad
        zin, win = pts[inside], mult[inside]
        pot_sum = float(np.asarray(potential_eval(mu, zin)) @ win) if zin.size else 0.0
        sub = ZeroSequence(zin, win, G)
        # log|g_lambda(z)| = log|z - lambda| - log|z - 1/conj(lambda)| - 2 log|lambda|
        sing = np.concatenate([zin, 1.0 / np.conj(zin)])
        int_log_g = (integrate_log_sum(mu, sing, np.concatenate([win, -win]), quad_nodes)
                     - 2.0 * mu.mass() * float(win @ np.log(np.abs(zin))))
        int_m = integrate(mu, M, quad_nodes)
        meas_labels.append(f"member {mem.index} ({mem.label})")
        meas_params.append(rad)
        meas_vals.append(int_log_g - int_m)
        if nu is not None:
            riesz_term = nu.integrate_potential(mu, quad_nodes)
            pot_labels.append(f"V_mu member {mem.index} ({mem.label})")
            pot_params.append(rad)
            pot_vals.append(pot_sum - riesz_term)
            # Poisson-Jensen: int M dmu = int V_mu dnu + M(0); int log|g| dmu = sum V_mu(lambda)
            residuals.append(abs((int_log_g - int_m) - (pot_sum - riesz_term - m0)))

    measure_arm = _report("sup", meas_labels, meas_params, meas_vals, ladder, seq.truncation,
                          notes)
    out = {"measure_arm": measure_arm, "potential_arm": None, "agree": None,
           "identity_residual": max(residuals) if residuals else None,
           "family": family.provenance(), "notes": list(notes)}
    if nu is None:
        out["notes"].append(f"potential arm skipped: {why}")
        out["verdict"] = measure_arm.bounded_flag.value
        return out
    pot = _report("sup", pot_labels, pot_params, pot_vals, ladder, seq.truncation, notes)
    out["potential_arm"] = pot
    agree = pot.bounded_flag is measure_arm.bounded_flag
    out["agree"] = agree
    if agree:
        out["verdict"] = pot.bounded_flag.value
    else:
        out["verdict"] = BoundedFlag.INCONCLUSIVE.value
        out["notes"].append(f"arms disagree: potential arm {pot.bounded_flag.value},"
                            f" measure arm {measure_arm.bounded_flag.value}")
    return out


def zero_set_report_dict(res: dict) -> dict:
    d = dict(res)
    d["measure_arm"] = res["measure_arm"].to_dict()
    d["potential_arm"] = res["potential_arm"].to_dict() if res["potential_arm"] else None
    return d


# --------------------------------------------------------------------------
# nontriviality


def nontriviality_test(M: WeightSpec, family: MeasureFamily | None = None, *,
                       seed: int | None = None, size: int = 64, G: DomainSpec | None = None,
                       ladder=None, kernel: Kernel | str = Kernel.CIRCUMFERENCE,
                       sigma: SigmaSpec | None = None, quad_nodes: int = DEFAULT_QUAD_NODES,
                       smoothed: bool = True, tol: float = 1e-6) -> BoundReport:
    """``inf`` of ``int M dmu`` over a Jensen family (members failing the check are dropped).

    With ``smoothed`` the same infimum over the smoothed members is recorded
    alongside, and the corrected weight ``M^(sigma) + 4 l_G`` is sampled at a
    few radii (reported only).
    """
    G = G or DomainSpec.unit_disk()
    if ladder is None:
        ladder = decade_ladder(5, R=G.R)
    ladder = np.asarray(ladder, dtype=float)
    family = family if family is not None else representing_family(size, seed, G, ladder)
    bank = TestFunctionBank.default(G)
    kept = family.restricted(lambda m: jensen_check(m.measure, bank, tol=tol).passed)
    notes = []
    if len(kept) < len(family):
        notes.append(f"{len(family) - len(kept)} member(s) failed the Jensen check and were dropped")
    labels = [f"member {m.index} ({m.label})" for m in kept]
    params = [m.param for m in kept]
    vals = [integrate(m.measure, M, quad_nodes) for m in kept]
    rep = _report("inf", labels, params, vals, ladder, None, notes)
    rep.extra["family"] = kept.provenance()
    if smoothed:
        sigma = sigma or SigmaSpec.default()
        sv = []
        for m in kept:
            try:
                sm = smooth_measure(m.measure, G, sigma, kernel, outer_nodes=64)
            except DomainError:
                continue
            sv.append(integrate(sm, M, 256))
        rep.extra["smoothed_inf"] = float(min(sv)) if sv else None
        rep.extra["kernel"] = Kernel.parse(kernel).value
        radii = G.R * np.array([0.0, 0.5, 0.9, 0.99])
        rep.extra["corrected_weight"] = [[float(r), float(corrected_weight(M, G, r + 0j, sigma))]
                                         for r in radii]
    return rep


# --------------------------------------------------------------------------
# quotient representation


def quotient_test(f: FunctionSpec, M: WeightSpec | None = None,
                  family: MeasureFamily | None = None, *, seed: int | None = None,
                  size: int = 64, ladder=None, quad_nodes: int = DEFAULT_QUAD_NODES,
                  tol: float = 1e-9) -> BoundReport:
    """``sup`` of ``int u_f dmu - int M dmu`` over a representing family.

    Cross-checks against the Nevanlinna characteristic: on centered circle
    members ``int u_f dmu_r = T_f(r)``, and every member supported in
    ``|z| <= s`` satisfies ``int u_f dmu <= T_f(s)`` (balayage onto the circle).
    """
    M = M or ZeroWeight()
    G = DomainSpec.unit_disk()
    if ladder is None:
        ladder = decade_ladder(5)
    ladder = np.asarray(ladder, dtype=float)
    family = family if family is not None else representing_family(size, seed, G, ladder)
    bank = TestFunctionBank.default(G)
    kept = family.restricted(lambda m: representing_check(m.measure, bank, tol=tol).passed)
    notes = []
    if len(kept) < len(family):
        notes.append(f"{len(family) - len(kept)} member(s) failed the representing check")

    def u(z):
        return uf_eval(f, z)

    labels, params, vals, uf_int = [], [], [], []
    for m in kept:
        a = integrate(m.measure, u, quad_nodes)
        uf_int.append(a)
        vals.append(a - integrate(m.measure, M, quad_nodes))
        labels.append(f"member {m.index} ({m.label})")
        params.append(m.param)
    rep = _report("sup", labels, params, vals, ladder, None, notes)
    rep.extra["family"] = kept.provenance()

    # cross-checks
    circ = [(m, a) for m, a in zip(kept, uf_int)
            if isinstance(m.measure, CircleUniform) and m.measure.center == 0]
    if circ:
        t = nevanlinna_T(f, np.array([m.measure.radius for m, _ in circ]), quad_nodes)
        rep.extra["circle_vs_T_max_diff"] = float(np.max(np.abs(t - np.array([a for _, a in circ]))))
    supports = np.array(params)
    t_sup = nevanlinna_T(f, np.minimum(supports, 1 - 1e-12), quad_nodes)
    rep.extra["balayage_excess"] = float(np.max(np.array(uf_int) - t_sup))
    if isinstance(M, ZeroWeight):
        rep.extra["sup_T"] = float(np.max(t_sup))
    return rep
