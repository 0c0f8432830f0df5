import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import highs_qn
from jensen_duality.duality import (Cone, DualityInstance, build_grid, dual_spr, duality_gap,
                                    export_measure, harmonic_extension, main_theorem_demo,
                                    primal_qn, random_cone_member, random_feasible_measure,
                                    solve_instance, stencil_matrix, weak_duality_check)
from jensen_duality.errors import ConfigurationError, ValidationError

A = 0.37 + 0.21j
FIELDS = {
    "log": lambda z: np.log(np.abs(z - A)),
    "neg_sq": lambda z: -np.abs(z) ** 2,
    "sq_re": lambda z: np.abs(z) ** 2 + z.real,
}
# HiGHS on the plain formulation (independent of the encodings used by the solver)
FROZEN = {
    (8, "log", "subharmonic"): -0.8585932680659525,
    (8, "log", "harmonic"): -1.07913714237138,
    (8, "neg_sq", "subharmonic"): -0.8359376597100683,
    (8, "neg_sq", "harmonic"): -0.8359376597100683,
    (16, "log", "subharmonic"): -0.8623135228694926,
    (16, "log", "harmonic"): -1.422815112713506,
    (16, "neg_sq", "subharmonic"): -0.924398571197314,
    (8, "sq_re", "subharmonic"): 0.0,
    (8, "sq_re", "harmonic"): 0.0,
}


def test_grid_shape():
    g = build_grid(1.0, 8)
    assert g.side == 17
    assert g.z[g.origin] == 0
    assert np.all(np.abs(g.z) <= 1.0 + 1e-12)
    assert g.interior.size + g.boundary.size == g.size
    with pytest.raises(ConfigurationError):
        build_grid(1.0, 1)


def test_stencil_rows_sum_to_zero():
    g = build_grid(1.0, 6)
    S = stencil_matrix(g)
    assert np.all(np.asarray(S.sum(axis=1)).ravel() == 0)
    # quadratic |z|^2 has constant positive stencil value 4 h^2
    assert S @ np.abs(g.z) ** 2 == pytest.approx(np.full(g.interior.size, 4 * g.h ** 2))


def test_harmonic_extension():
    g = build_grid(1.0, 6)
    P = harmonic_extension(g)
    S = stencil_matrix(g)
    assert np.abs(S @ P).max() <= 1e-12
    assert P[g.boundary] == pytest.approx(np.eye(g.boundary.size))
    # the discrete harmonic function Re z is reproduced from its boundary values
    assert P @ g.z[g.boundary].real == pytest.approx(g.z.real, abs=1e-12)


@pytest.mark.parametrize("key", sorted(FROZEN))
def test_frozen_values(key):
    n, name, cone = key
    inst = DualityInstance.from_field(build_grid(1.0, n), FIELDS[name], cone)
    res = solve_instance(inst)
    assert res.primal.value == pytest.approx(FROZEN[key], abs=1e-9)
    assert res.dual.value == pytest.approx(FROZEN[key], abs=1e-9)
    assert res.gap <= 1e-9


@pytest.mark.parametrize("cone", ["subharmonic", "harmonic"])
@pytest.mark.parametrize("name", sorted(FIELDS))
def test_matches_highs_small(cone, name):
    inst = DualityInstance.from_field(build_grid(1.0, 4), FIELDS[name], cone)
    assert primal_qn(inst).value == pytest.approx(highs_qn(4, FIELDS[name], cone), abs=1e-9)


@pytest.mark.parametrize("cone", ["subharmonic", "harmonic"])
def test_constant(cone):
    inst = DualityInstance(build_grid(1.0, 8), cone, np.full(build_grid(1.0, 8).size, 5.0))
    res = solve_instance(inst)
    assert res.primal.value == pytest.approx(5.0, abs=1e-12)
    assert res.dual.value == pytest.approx(5.0, abs=1e-12)
    assert res.gap <= 1e-12


def test_discretely_subharmonic_data_gives_dirac():
    g = build_grid(1.0, 8)
    inst = DualityInstance.from_field(g, FIELDS["sq_re"])
    res = solve_instance(inst)
    assert res.dual.measure.w[g.origin] == pytest.approx(1.0, abs=1e-12)
    assert res.primal.value == pytest.approx(inst.x[g.origin], abs=1e-12)


def test_log_value_close_to_log_abs_a():
    inst = DualityInstance.from_field(build_grid(1.0, 16), FIELDS["log"])
    assert solve_instance(inst).primal.value == pytest.approx(math.log(abs(A)), abs=1e-2)


def test_large_cap_at_origin():
    """``-log|z|`` capped at 50 at the origin: the minimizing measure avoids the origin."""
    g = build_grid(1.0, 8)
    with np.errstate(divide="ignore"):
        x = -np.log(np.abs(g.z))
    x[g.origin] = 50.0
    res = solve_instance(DualityInstance(g, "subharmonic", x))
    assert res.dual.measure.w[g.origin] == pytest.approx(0.0, abs=1e-12)
    assert 0 < res.primal.value < 50
    assert res.gap <= 1e-9

    def capped(z):
        with np.errstate(divide="ignore"):
            return np.where(z == 0, 50.0, -np.log(np.abs(z)))
    assert res.primal.value == pytest.approx(highs_qn(8, capped, "subharmonic"), abs=1e-9)


def test_infinite_values():
    g = build_grid(1.0, 4)
    x = np.zeros(g.size)
    x[g.origin] = np.inf
    inst = DualityInstance(g, "subharmonic", x)
    assert inst.notes and np.isfinite(inst.x).all()
    assert primal_qn(inst).value == pytest.approx(0.0, abs=1e-12)
    x = np.zeros(g.size)
    x[g.boundary[0]] = np.inf
    with pytest.raises(ValidationError):
        DualityInstance(g, "subharmonic", x)
    with pytest.raises(ValidationError):
        DualityInstance(g, "subharmonic", np.zeros(3))
    with pytest.raises(ValidationError):
        DualityInstance(g, "cone", np.zeros(g.size))


@pytest.mark.parametrize("cone", ["subharmonic", "harmonic"])
def test_certificates(cone, rng):
    g = build_grid(1.0, 6)
    inst = DualityInstance(g, cone, rng.normal(size=g.size))
    res = solve_instance(inst)
    r = res.certificate_residuals()
    assert r["mass_defect"] <= 1e-12
    assert r["min_weight"] >= -1e-12
    assert r["cone_violation"] <= 1e-10
    assert r["majorant_violation"] <= 1e-10
    assert r["slackness"] <= 1e-9
    mu = export_measure(res.dual.measure, g)
    assert mu.mass() == pytest.approx(1.0, abs=1e-12)


def test_weak_duality(rng):
    g = build_grid(1.0, 6)
    inst = DualityInstance(g, "subharmonic", rng.normal(size=g.size))
    assert weak_duality_check(inst, rng, pairs=30) <= 1e-12


def test_random_feasible_measure_is_jensen(rng):
    g = build_grid(1.0, 6)
    mu = random_feasible_measure(g, rng)
    S = stencil_matrix(g)
    e0 = np.zeros(g.size)
    e0[g.origin] = 1
    assert mu.w == pytest.approx(e0 + S.T @ mu.lam, abs=1e-12)
    assert mu.mass == pytest.approx(1.0, abs=1e-12) and mu.w.min() >= 0


def test_adversarial_scale(rng):
    g = build_grid(1.0, 6)
    inst = DualityInstance(g, "subharmonic", 1e6 * rng.normal(size=g.size))
    res = solve_instance(inst)
    assert not res.flagged
    assert res.gap / res.scale <= 1e-12


def test_main_theorem_demo():
    out = main_theorem_demo(lambda z: np.log(np.abs(z - A)), lambda z: np.abs(z) ** 2,
                            ladder=(4, 8))
    for lv in out["levels"]:
        assert lv["gap"] <= 1e-9
        assert lv["minorant_excess"] <= 1e-9
        assert lv["origin_match"] <= 1e-12


def test_harmonic_value_never_exceeds_subharmonic(rng):
    g = build_grid(1.0, 6)
    for _ in range(5):
        x = rng.normal(size=g.size)
        qh = primal_qn(DualityInstance(g, "harmonic", x)).value
        qs = primal_qn(DualityInstance(g, "subharmonic", x)).value
        assert qh <= qs + 1e-9


GRID4 = build_grid(1.0, 4)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2 ** 31), st.sampled_from(["subharmonic", "harmonic"]))
def test_cone_members_are_their_own_value(seed, cone):
    v = random_cone_member(GRID4, np.random.default_rng(seed), cone)
    assert primal_qn(DualityInstance(GRID4, cone, v)).value == pytest.approx(
        v[GRID4.origin], abs=1e-9)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2 ** 31), st.floats(-5, 5), st.floats(0.1, 10))
def test_functional_laws(seed, c, t):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=GRID4.size)
    y = rng.normal(size=GRID4.size)

    def q(v):
        return primal_qn(DualityInstance(GRID4, "subharmonic", v)).value

    qx = q(x)
    assert q(x + c) == pytest.approx(qx + c, abs=1e-9)
    assert q(t * x) == pytest.approx(t * qx, abs=1e-9 * max(1, t))
    assert q(x + y) >= qx + q(y) - 1e-9
    assert q(np.maximum(x, y)) >= qx - 1e-9


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2 ** 31), st.sampled_from(["subharmonic", "harmonic"]))
def test_gap_property(seed, cone):
    inst = DualityInstance(GRID4, cone, np.random.default_rng(seed).normal(size=GRID4.size))
    assert duality_gap(inst) <= 1e-9
    assert dual_spr(inst).measure.mass == pytest.approx(1.0, abs=1e-12)
