import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from jensen_duality.errors import DomainError, InvalidTestObject, ValidationError
from jensen_duality.families import random_pj_case
from jensen_duality.functions import Polynomial
from jensen_duality.geometry import DomainSpec
from jensen_duality.measures import (Atomic, CircleUniform, DiskUniform, PoissonCircle, combine,
                                     integrate)
from jensen_duality.potentials import (Potential, RieszMeasure, poisson_jensen, potential_eval,
                                       representing_function_check, riesz_of_weight, vr_eval)
from jensen_duality.weights import (GridSampled, LogBoundary, PowerRadial, ZeroWeight,
                                    finite_difference_laplacian, weight_from_dict)

UNIT = DomainSpec.unit_disk()


def test_vr_values():
    assert vr_eval(0.5, 0.25) == pytest.approx(math.log(2))
    assert vr_eval(0.5, 0.75) == 0.0
    with pytest.raises(DomainError):
        vr_eval(0.5, 0.0)
    with pytest.raises(ValidationError):
        vr_eval(0.0, 0.5)


@pytest.mark.parametrize("r", [0.3, 0.6, 0.9])
def test_circle_potential_is_vr(r, rng):
    zeta = 0.999 * np.sqrt(rng.uniform(size=200)) * np.exp(2j * np.pi * rng.uniform(size=200))
    assert potential_eval(CircleUniform(0, r), zeta) == pytest.approx(vr_eval(r, zeta), abs=1e-12)


def test_potential_singular_at_origin():
    with pytest.raises(DomainError):
        potential_eval(CircleUniform(0, 0.5), 0.0)
    with pytest.raises(DomainError):
        potential_eval(Atomic.dirac(0.3), 0.3)


def test_potential_wrapper_and_dirac():
    V = Potential(Atomic.dirac(0.0))
    assert V(np.array([0.3, 0.7j])) == pytest.approx([0.0, 0.0], abs=1e-15)


@pytest.mark.parametrize("mu", [CircleUniform(0, 0.5), PoissonCircle(0, 0.6, 1.0, 0.2),
                                DiskUniform(0, 0.5),
                                combine([0.5, 0.5], [CircleUniform(0, 0.3),
                                                     PoissonCircle(0, 0.7, 1.0, -0.1j)])])
def test_potentials_of_jensen_measures_are_jensen_functions(mu):
    v = representing_function_check(Potential(mu), UNIT)
    assert v.representing and v.jensen
    assert v.cond2_bound == pytest.approx(0.0, abs=1e-9) or v.cond2_bound < 0


def test_representing_function_check_rejects():
    off = representing_function_check(Potential(CircleUniform(0.3, 0.5)), UNIT)
    assert not off.cond1
    fat = representing_function_check(Potential(CircleUniform(0, 0.995)), UNIT)
    assert not fat.cond1  # not zero on the annulus
    neg = representing_function_check(lambda z: vr_eval(0.5, z) - vr_eval(0.9, z) * 0.5, UNIT)
    assert neg.cond1 and not neg.jensen


# ---------------------------------------------------------------- Riesz


@pytest.mark.parametrize("M", [PowerRadial(1.5, 2.0), PowerRadial(0.7, 3.0), LogBoundary(0.5)])
@pytest.mark.parametrize("t", [0.3, 0.7, 0.95])
def test_integrated_counting_is_jensen_formula(M, t):
    nu = riesz_of_weight(M)
    assert nu.integrated_counting(t) == pytest.approx(M.profile(t) - M.profile(0.0), rel=1e-7)
    assert nu.integrate_vr(t) == pytest.approx(M.profile(t) - M.profile(0.0), rel=1e-7)


@pytest.mark.parametrize("alpha, p, r", [(1.0, 2.0, 0.5), (2.0, 3.0, 0.8)])
def test_counting_function_power(alpha, p, r):
    assert riesz_of_weight(PowerRadial(alpha, p)).counting(r) == pytest.approx(
        alpha * p * r ** p, rel=1e-9)


@pytest.mark.parametrize("p", [1.0, 1.1, 1.5, 2.0, 3.7])
def test_integrated_counting_power(p):
    """For ``M = 2 |z|**p``: ``N(t) = M(t) - M(0)``."""
    t = np.array([1e-9, 1e-3, 0.1, 0.5, 0.9, 0.999, 0.99999])
    assert np.allclose(riesz_of_weight(PowerRadial(2.0, p)).integrated_counting(t), 2.0 * t ** p,
                       rtol=0, atol=1e-13)


def test_integrated_counting_log_boundary():
    t = np.array([0.1, 0.9, 0.999, 0.99999])
    got = riesz_of_weight(LogBoundary(0.5)).integrated_counting(t)
    assert np.allclose(got, -0.5 * np.log1p(-t), rtol=0, atol=1e-11)


def test_riesz_integral_of_general_member():
    """Poisson-Jensen for a weight: int M dmu = int V_mu dnu + M(0)."""
    M = PowerRadial(1.0, 2.0)
    mu = combine([0.4, 0.6], [CircleUniform(0, 0.5), PoissonCircle(0, 0.7, 1.0, 0.2)])
    lhs = integrate(mu, M, 2048)
    assert riesz_of_weight(M).integrate_potential(mu) + 0.0 == pytest.approx(lhs, abs=1e-7)


def test_riesz_errors():
    assert riesz_of_weight(ZeroWeight()).counting(0.5) == 0.0
    with pytest.raises(ValidationError):
        riesz_of_weight(PowerRadial(-1.0))
    with pytest.raises(ValidationError):
        riesz_of_weight(GridSampled([0, 1, 1j], [0, 1, 1]))
    with pytest.raises(ValidationError):
        PowerRadial(1.0, 0.5)


def test_atomic_riesz():
    nu = RieszMeasure.from_zeros([0.5, 0.25j], [2, 1])
    assert nu.counting(0.3) == 1 and nu.counting(0.6) == 3
    assert nu.integrated_counting(0.8) == pytest.approx(2 * math.log(1.6) + math.log(3.2))


def test_weights():
    assert finite_difference_laplacian(PowerRadial(1.0, 2.0), 0.5) == pytest.approx(4.0, rel=1e-6)
    assert finite_difference_laplacian(LogBoundary(1.0), 0.5) == pytest.approx(
        float(LogBoundary(1.0).radial_laplacian(0.5)), rel=1e-6)
    with pytest.raises(DomainError):
        LogBoundary(1.0)(1.0)
    assert weight_from_dict({"preset": "power", "alpha": 2}).to_dict() == {
        "preset": "power", "alpha": 2.0, "p": 2.0}
    g = GridSampled([0, 1, 1j, -1, -1j], [0, 1, 1, 1, 1])
    assert float(g(np.array([0.5]))[0]) == pytest.approx(0.5)
    assert float(g(np.array([3.0]))[0]) == pytest.approx(1.0)
    with pytest.raises(ValidationError):
        weight_from_dict({"preset": "cubic"})


# ---------------------------------------------------------------- Poisson-Jensen


def test_poisson_jensen_example():
    rep = poisson_jensen(Polynomial((-0.5, 1)), CircleUniform(0, 0.8), 2048)
    assert rep.lhs == pytest.approx(math.log(0.8), abs=1e-15)
    assert rep.rhs == pytest.approx(math.log(0.8), abs=1e-15)
    assert rep.passed


def test_poisson_jensen_constant():
    rep = poisson_jensen(Polynomial((1,)), PoissonCircle(0, 0.5, 1.0, 0.1))
    assert rep.lhs == pytest.approx(0.0, abs=1e-15) and rep.rhs == 0.0 and rep.zeros == 0


def test_poisson_jensen_errors():
    with pytest.raises(InvalidTestObject):
        poisson_jensen(Polynomial((-0.5, 1)), CircleUniform(0.3, 0.5))
    with pytest.raises(DomainError):
        poisson_jensen(Polynomial((0, 1)), CircleUniform(0, 0.5))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** 31), st.integers(1, 7))
def test_poisson_jensen_property(seed, degree):
    p, mu = random_pj_case(np.random.default_rng(seed), degree)
    assert poisson_jensen(p, mu, 2048).diff <= 1e-8
