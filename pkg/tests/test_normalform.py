import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pwholo.cpoly import CPoly, ComplexRationalField
from pwholo.fixtures import example_circle, monomial, rigid_systems
from pwholo.flow import first_integral_drift, ik_integral, integrate_field
from pwholo.normalform import (
    HIGHER_ZERO,
    INCONCLUSIVE,
    NO_CROSSING,
    POLE,
    REGULAR,
    SIMPLE_ZERO,
    InconsistencyError,
    SingularityClass,
    classify,
    falsify_crossing_cycles,
    normal_form_field,
    radial_velocity,
    radial_velocity_closed,
    residue_contour,
    residue_laurent,
    rigidity_check,
    sign_certificate,
)
from pwholo.system import PiecewiseSystem, SwitchingManifold
from pwholo.verify import oracle_class, random_classification_case


def field(num, den=(1,)):
    return ComplexRationalField(CPoly(list(num)), CPoly(list(den)), reduce=False)


def circle_pair(outer, inner):
    return PiecewiseSystem(outer, inner, SwitchingManifold.unit_circle())


def test_classify_examples():
    c = classify(field([0, 0, 1], [1, 1]), 0)
    assert c.tag == HIGHER_ZERO and c.n == 2 and abs(c.gamma - 1) < 1e-12
    assert classify(field([1], [0, 1]), 0) == SingularityClass(POLE, n=1)
    c = classify(field([0, 0, 1]), 0)
    assert c.tag == HIGHER_ZERO and abs(c.gamma) < 1e-12
    assert classify(field([1, 1]), 0.5).tag == REGULAR
    c = classify(field([0, 2 + 1j]), 0)
    assert c.tag == SIMPLE_ZERO and abs(c.lam - (2 + 1j)) < 1e-14


def test_classify_errors():
    with pytest.raises(ValueError, match="identically zero"):
        classify(field([0]), 0)
    with pytest.raises(ValueError, match="indeterminate"):
        classify(field([0, 1], [0, 1]), 0)
    with pytest.raises(ValueError):
        SingularityClass(HIGHER_ZERO, n=1)


@pytest.mark.parametrize("seed", range(30))
def test_classify_matches_symbolic_oracle(seed):
    num, den, w0, _ = random_classification_case(np.random.default_rng(seed))
    got = classify(ComplexRationalField(num, den), w0)
    tag, n, lam, gamma = oracle_class(num, den, w0)
    assert got.tag == tag
    if tag in (POLE, HIGHER_ZERO):
        assert got.n == n
    if tag == SIMPLE_ZERO:
        assert abs(got.lam - lam) < 1e-9 * max(1.0, abs(lam))
    if tag == HIGHER_ZERO:
        assert abs(got.gamma - gamma) < 1e-8 * max(1.0, abs(gamma))


@pytest.mark.parametrize("n,gamma", [(2, 1.5), (3, -2.0), (4, 2.5 - 1j), (5, 0.25j)])
def test_residue_methods_agree(n, gamma):
    F = normal_form_field(n, gamma)
    assert abs(residue_laurent(F, 0) - gamma) < 1e-12
    assert abs(residue_contour(F, 0) - gamma) < 1e-9


def test_radial_velocity_examples():
    assert abs(radial_velocity(normal_form_field(2, 1.5), math.pi) - 2.0) < 1e-12
    rot = field([0, 1j])
    assert all(abs(radial_velocity(rot, th)) < 1e-15 for th in np.linspace(0, 6, 13))
    F = normal_form_field(3, -2.0)
    ths = [2 * math.pi * (k + 0.5) / 100 for k in range(100)]
    assert all(radial_velocity(F, th) < 0 for th in ths)


def test_radial_velocity_pole_on_circle():
    with pytest.raises(ValueError, match="singular point"):
        radial_velocity(normal_form_field(2, 1.0), math.pi)


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 6), st.floats(-3, 3), st.floats(0, 2 * math.pi))
def test_radial_velocity_closed_form(n, gamma, theta):
    phi = (n - 1) * theta
    if abs(1 + gamma * complex(math.cos(phi), math.sin(phi))) < 1e-3:
        return
    got = radial_velocity(normal_form_field(n, gamma), theta)
    assert abs(got - radial_velocity_closed(n, gamma, theta)) < 1e-10 * max(1.0, abs(got))


@pytest.mark.parametrize("k", [2, 3, -1])
def test_ik_constant_along_monomial_flow(k):
    F = monomial(k)
    tr = integrate_field(F, 0.8 * np.exp(0.3j), 0.3)
    assert first_integral_drift(F, ik_integral(k), tr) < 1e-8


def test_rigidity_linear_and_monomial():
    res = rigidity_check(circle_pair(field([0, 2 + 3j]), monomial(3)))
    assert res.applicable and res.conclusion == NO_CROSSING
    assert res.names() == {"linear-J", "monomial-I"}


def test_rigidity_rational_sign():
    res = rigidity_check(circle_pair(normal_form_field(2, 1.5), field([1, 0.5, 1])))
    assert res.applicable and res.names() == {"rational-sign"}
    cert = next(iter(res.certificates))
    assert cert.detail["sign"] == 1 and cert.detail["samples"] == 720
    sign, vals = sign_certificate(normal_form_field(2, 1.5))
    assert sign == 1 and len(vals) == 720 and np.all(vals > 0)


def test_rigidity_small_residue_inconclusive():
    res = rigidity_check(circle_pair(normal_form_field(2, 0.5), field([1, 0.5, 1])))
    assert not res.applicable and res.conclusion == INCONCLUSIVE
    assert any("residue hypothesis" in n for n in res.notes)


def test_rigidity_single_monomial_insufficient():
    res = rigidity_check(circle_pair(monomial(2), field([1, 0.5, 1])))
    assert not res.applicable
    assert res.certificates[0].detail["sufficient"] is False


def test_rigidity_requires_unit_circle():
    sys = PiecewiseSystem(field([0, 1j]), field([0, 1j]), SwitchingManifold.real_axis())
    res = rigidity_check(sys)
    assert not res.applicable and res.notes


def test_rigid_fixtures_certified():
    for sys in rigid_systems():
        assert rigidity_check(sys).conclusion == NO_CROSSING


def test_falsify_finds_example_cycle():
    res = falsify_crossing_cycles(example_circle(), trials=40)
    assert not res.clean and len(res.found) == 1
    assert abs(res.found[0].multiplier - math.exp(-math.pi)) < 1e-4


def test_falsify_clean_on_rigid_pair():
    sys = circle_pair(field([0, 2 + 3j]), monomial(3))
    res = falsify_crossing_cycles(sys, trials=200)
    assert res.clean and res.trials == 200


def test_falsify_smooth_system_clean():
    F = field([1, 0.5j, 0.2])
    assert falsify_crossing_cycles(circle_pair(F, F), trials=50).clean


def test_falsify_raises_on_inconsistent_certificate():
    cert = rigidity_check(circle_pair(field([0, 2 + 3j]), monomial(3)))
    with pytest.raises(InconsistencyError, match="certified rigid system exhibits a numerical cycle"):
        falsify_crossing_cycles(example_circle(), trials=40, rigidity=cert)
