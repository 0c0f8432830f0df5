import json
import math
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from jensen_duality.criteria import (BoundedFlag, blaschke_sup, blaschke_test, classify_growth,
                                     nontriviality_test, quotient_test, zero_set_dual_test)
from jensen_duality.errors import DomainError, ValidationError
from jensen_duality.functions import (FiniteBlaschke, Polynomial, RationalPair,
                                      function_from_dict, nevanlinna_T, uf_eval)
from jensen_duality.sequences import (ZeroSequence, counting_log_sum, decade_ladder,
                                      log_blaschke, log_g_normalized, parse_generator,
                                      sequence_from_dict)
from jensen_duality.weights import PowerRadial, ZeroWeight

INPUTS = Path(__file__).resolve().parents[1] / "inputs"
F_POLE = RationalPair(Polynomial((1.0,)), Polynomial((1.0, -1.0)))

# sum_{n <= 10^4} 1/n^2 and H_{10^4}, exact rational sums rounded (fractions.Fraction)
BASEL_1E4 = 1.6448340718480599
HARMONIC_1E4 = 9.787606036044382
# T_f(r) for f = 1/(1-z): mpmath quad of log+|1 - r e^{it}| split at t = acos(r/2)
NEVANLINNA_T = {0.5: 0.159717146234380240109108545556,
                0.9: 0.289895023110266610167837941419,
                0.99: 0.319734315870430308729064353913}


def gen(formula, N=10_000):
    return ZeroSequence.from_generator(formula, N)


# --------------------------------------------------------------------------
# sequences


def test_parse_generator_forms():
    n = np.arange(1, 5)
    assert np.allclose(parse_generator("1 - 1/n^2")(n), 1 - 1 / n ** 2)
    assert np.allclose(parse_generator("1-1/n")(n), 1 - 1 / n)
    assert np.allclose(parse_generator("0.9*(1 - 0.5^n)")(n), 0.9 * (1 - 0.5 ** n))
    assert np.allclose(parse_generator("(1 - 0.25^n)")(n), 1 - 0.25 ** n)


@pytest.mark.parametrize("bad", ["1 - 0.5^n", "exp(-n)", "1 - n", ""])
def test_parse_generator_rejects(bad):
    with pytest.raises(ValidationError):
        parse_generator(bad)


def test_generator_float_limit():
    with pytest.raises(DomainError):
        ZeroSequence.from_generator("(1 - 0.5^n)", 60)


def test_origin_zeros_split_off():
    s = gen("1 - 1/n^2", 3)
    assert s.origin_multiplicity == 1
    assert len(s) == 3
    assert np.allclose(s.moduli, [0.75, 8 / 9])


def test_sequence_from_dict_forms():
    s = sequence_from_dict({"points": [0.5, [0, 0.3], {"z": [0.1, 0.1], "m": 2}]})
    assert len(s) == 4
    assert s.truncation is None
    with pytest.raises(ValidationError):
        sequence_from_dict({})
    with pytest.raises(DomainError):
        sequence_from_dict({"points": [1.2]})


def test_decade_ladder():
    assert np.allclose(decade_ladder(3), [0.9, 0.99, 0.999])
    assert np.allclose(decade_ladder(8, horizon=0.9995), [0.9, 0.99, 0.999])


def test_log_g_normalized_at_origin_and_ratio():
    s = sequence_from_dict({"points": [0.5, 0.3j, -0.2 + 0.1j]})
    assert log_g_normalized(s, 0.0) == pytest.approx(0.0, abs=1e-15)
    z = np.array([0.1 + 0.4j, -0.6, 0.7j])
    log_b0 = float(np.sum(np.log(np.abs(s.points))))
    assert np.allclose(log_g_normalized(s, z), log_blaschke(s, z) - log_b0, atol=1e-13)
    assert np.isneginf(log_blaschke(s, 0.5))


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(0.01, 0.99), min_size=1, max_size=12), st.floats(0.02, 0.995))
def test_counting_log_sum_matches_brute_force(mods, r):
    s = sequence_from_dict({"points": mods})
    brute = math.fsum(math.log(r / m) for m in mods if m <= r)
    assert counting_log_sum(s, [r])[0] == pytest.approx(brute, abs=1e-12)


# --------------------------------------------------------------------------
# Blaschke condition


def test_blaschke_square_sum():
    rep = blaschke_test(gen("1 - 1/n^2"))
    assert rep.sum_value == pytest.approx(BASEL_1E4, abs=1e-12)
    assert abs(rep.sum_value - math.pi ** 2 / 6) <= 1e-3
    assert rep.verdict == "zero_set"
    assert rep.agree


def test_blaschke_harmonic_diverges_with_witness():
    rep = blaschke_test(gen("1 - 1/n"))
    assert rep.sum_value == pytest.approx(HARMONIC_1E4, abs=1e-10)
    assert rep.verdict == "divergence_suspected"
    w = [v for _, v in rep.sup.witness]
    assert len(w) >= 3 and all(b > a for a, b in zip(w, w[1:]))


def test_blaschke_finite_list():
    rep = blaschke_test(sequence_from_dict({"points": [0.5]}))
    assert rep.sum_value == 0.5
    assert rep.tail == 0.0
    assert rep.verdict == "zero_set"


def test_blaschke_sup_closed_form():
    s = sequence_from_dict({"points": [0.5]})
    rep = blaschke_sup(s, [0.25, 0.5, 0.9, 0.99])
    assert rep.value == pytest.approx(math.log(0.99 / 0.5), rel=1e-14)
    assert rep.attained_at == "r=0.99"


def test_blaschke_sup_grid_errors():
    s = sequence_from_dict({"points": [0.5]})
    with pytest.raises(DomainError):
        blaschke_sup(s, [0.5, 1.0])
    with pytest.raises(ValidationError):
        blaschke_sup(s, [])


def test_blaschke_suite_flags_agree():
    doc = json.loads((INPUTS / "blaschke_suite.json").read_text())
    verdicts = []
    for spec in doc["sequences"]:
        rep = blaschke_test(sequence_from_dict(spec))
        assert rep.agree, spec
        verdicts.append(rep.verdict)
    assert verdicts == ["zero_set"] * 3 + ["divergence_suspected"] * 3


# --------------------------------------------------------------------------
# growth classifier


@pytest.mark.parametrize("values,flag", [
    ([1.0, 2.0, 3.0], BoundedFlag.DIVERGENCE_SUSPECTED),
    ([1.0, 2.0, 2.8], BoundedFlag.DIVERGENCE_SUSPECTED),
    ([1.0, 2.0, 2.6], BoundedFlag.INCONCLUSIVE),
    ([1.0, 2.0, 2.4], BoundedFlag.BOUNDED),
    ([1.0, 1.5, 1.5], BoundedFlag.BOUNDED),
    ([1.0, 2.0], BoundedFlag.INCONCLUSIVE),
    ([1.0], BoundedFlag.INCONCLUSIVE),
    ([1.0, 1.0], BoundedFlag.BOUNDED),
])
def test_classify_growth(values, flag):
    got, witness = classify_growth(range(len(values)), values)
    assert got is flag
    assert (len(witness) == 3) == (flag is BoundedFlag.DIVERGENCE_SUSPECTED)


# --------------------------------------------------------------------------
# functions and the Nevanlinna characteristic


@pytest.mark.parametrize("r", sorted(NEVANLINNA_T))
def test_nevanlinna_oracle(r):
    assert nevanlinna_T(F_POLE, r, 16384) == pytest.approx(NEVANLINNA_T[r], abs=2e-9)


def test_nevanlinna_bounded_by_log2():
    r = 1 - np.logspace(-1, -6, 6)
    t = nevanlinna_T(F_POLE, r)
    assert np.all(np.diff(t) > 0)
    assert t[-1] <= math.log(2)


def test_nevanlinna_of_blaschke_is_zero():
    b = FiniteBlaschke((0.5, 0.3j))
    assert np.allclose(nevanlinna_T(b, [0.2, 0.7, 0.99]), 0.0, atol=1e-12)


def test_nevanlinna_domain():
    with pytest.raises(DomainError):
        nevanlinna_T(F_POLE, 1.0)


def test_function_from_dict_and_uf():
    f = function_from_dict({"kind": "rational", "num": {"kind": "polynomial", "coeffs": [1]},
                            "den": {"kind": "polynomial", "roots": [1.0]}})
    z = np.array([0.5, -0.5, 0.9j])
    assert np.allclose(uf_eval(f, z), np.maximum(0.0, np.log(np.abs(z - 1))))
    with pytest.raises(ValidationError):
        function_from_dict({"kind": "entire"})


# --------------------------------------------------------------------------
# dual inequalities over sampled families


def test_quotient_example():
    rep = quotient_test(F_POLE, ZeroWeight(), seed=5)
    assert rep.bounded
    assert rep.value <= math.log(2) + 1e-6
    assert rep.extra["circle_vs_T_max_diff"] <= 1e-12
    assert rep.extra["balayage_excess"] <= 1e-9


def test_quotient_with_weight_is_smaller():
    a = quotient_test(F_POLE, ZeroWeight(), seed=5, size=24)
    b = quotient_test(F_POLE, PowerRadial(1.0, 2.0), seed=5, size=24)
    assert b.value < a.value


def test_nontriviality_zero_and_power():
    z = nontriviality_test(ZeroWeight(), seed=5, size=24)
    assert z.value == 0.0 and z.bounded
    p = nontriviality_test(PowerRadial(1.0, 2.0), seed=5, size=24, smoothed=False)
    # the smallest deterministic member is the circle of radius 0.1
    assert p.value == pytest.approx(0.01, rel=1e-12)


@pytest.mark.parametrize("spec,value,verdict", [
    ({"points": [0.5]}, math.log(0.99999 / 0.5), "bounded"),
    ({"points": [0.5, 0.3j]}, math.log(0.99999 ** 2 / 0.15), "bounded"),
])
def test_zero_set_finite(spec, value, verdict):
    res = zero_set_dual_test(sequence_from_dict(spec), ZeroWeight(), seed=5)
    assert res["measure_arm"].value == pytest.approx(value, abs=1e-9)
    assert res["potential_arm"].value == pytest.approx(value, abs=1e-9)
    assert res["agree"]
    assert res["identity_residual"] <= 1e-10
    assert res["verdict"] == verdict


@pytest.mark.parametrize("formula,verdict", [
    ("1 - 1/n^2", "bounded"),
    ("1 - 1/n", "divergence_suspected"),
])
def test_zero_set_generators(formula, verdict):
    res = zero_set_dual_test(gen(formula), ZeroWeight(), seed=5)
    assert res["agree"]
    assert res["identity_residual"] <= 1e-8
    assert res["verdict"] == verdict


def test_zero_set_needs_seed():
    from jensen_duality.errors import ConfigurationError
    with pytest.raises(ConfigurationError):
        zero_set_dual_test(sequence_from_dict({"points": [0.5]}), ZeroWeight())
