import cmath

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from pwholo.cpoly import CPoly, ComplexRationalField
from pwholo.flow import integrate_field
from pwholo.mobius import INFINITY, Circle, InvalidMobius, Line, MobiusMap, is_infinity
from pwholo.normalform import HIGHER_ZERO, classify, normal_form_field

small = st.floats(-2, 2, allow_nan=False, allow_infinity=False)
cplx = st.builds(complex, small, small)


def maps():
    return st.tuples(cplx, cplx, cplx, cplx).filter(lambda t: abs(t[0] * t[3] - t[1] * t[2]) > 0.3).map(lambda t: MobiusMap(*t))


def test_canonical_values():
    phi = MobiusMap.canonical()
    assert abs(phi(1j)) < 1e-15
    assert is_infinity(phi(-1j))
    pinv = phi.inverse()
    assert is_infinity(pinv(1j))
    assert abs(pinv(0) - 1j) < 1e-15


def test_canonical_circle_to_line():
    img = MobiusMap.canonical().image_of_circle(0j, 1.0)
    assert isinstance(img, Line)
    assert abs(img.point.imag) < 1e-12 and abs(img.direction.imag) < 1e-12


def test_inverse_maps_line_to_unit_circle():
    img = MobiusMap.canonical().inverse().image_of_line(0j, 1 + 0j)
    assert isinstance(img, Circle)
    assert abs(img.center) < 1e-12 and abs(img.radius - 1) < 1e-12


def test_degenerate_rejected():
    with pytest.raises(InvalidMobius):
        MobiusMap(1, 2, 2, 4)


def test_infinity_handling():
    m = MobiusMap(2, 1, 1, 0)
    assert abs(m(INFINITY) - 2) < 1e-15
    assert is_infinity(m(0))


def test_compose_inverse_identity():
    phi = MobiusMap.canonical()
    rng = np.random.default_rng(0)
    pts = rng.normal(size=10) + 1j * rng.normal(size=10)
    comp = phi @ phi.inverse()
    for z in pts:
        assert abs(comp(z) - z) < 1e-12
    assert MobiusMap.identity().inverse().equals(MobiusMap.identity())


def test_pushforward_center_to_linear():
    G = MobiusMap.canonical().pushforward(ComplexRationalField(CPoly([0.5, 0, 0.5])))
    assert G.den.degree == 0
    assert np.allclose(G.num.coeffs / G.den.coeffs[0], [0, 1j], atol=1e-12)


def test_pushforward_degree_statement():
    # a degree-n polynomial perturbation pulled back has degree n + 2 images
    h = ComplexRationalField(CPoly([1, 2j, -1, 0.5]))
    G = MobiusMap.canonical().inverse().pushforward(h)
    assert G.num.degree - G.den.degree == 2


def _gap(F, G, pts):
    return max(abs(F(w) - G(w)) / max(1.0, abs(F(w))) for w in pts)


@settings(max_examples=50, deadline=None)
@given(maps(), maps(), st.lists(cplx, min_size=2, max_size=4))
def test_functoriality(m1, m2, coeffs):
    F = ComplexRationalField(CPoly(coeffs))
    assume(not F.num.is_zero())
    a = (m1 @ m2).pushforward(F)
    b = m1.pushforward(m2.pushforward(F))
    pts = [0.3 + 0.2j, -0.7 + 1.1j, 1.4 - 0.5j]
    assume(all(abs(a.den(w)) > 1e-3 and abs(b.den(w)) > 1e-3 for w in pts))
    assert _gap(a, b, pts) < 1e-9


@settings(max_examples=50, deadline=None)
@given(maps(), st.lists(cplx, min_size=2, max_size=4))
def test_round_trip(m, coeffs):
    F = ComplexRationalField(CPoly(coeffs))
    assume(not F.num.is_zero())
    back = m.inverse().pushforward(m.pushforward(F))
    pts = [0.3 + 0.2j, -0.7 + 1.1j, 1.4 - 0.5j]
    assume(all(abs(back.den(w)) > 1e-3 for w in pts))
    assert _gap(F, back, pts) < 1e-9


@settings(max_examples=25, deadline=None)
@given(maps(), st.lists(cplx, min_size=2, max_size=4), cplx)
def test_flow_conjugacy(m, coeffs, z0):
    F = ComplexRationalField(CPoly(coeffs))
    G = m.pushforward(F)
    assume(abs(m.c * z0 + m.d) > 0.3 and abs(F(z0)) < 20)
    w0 = m(z0)
    tz = integrate_field(F, z0, 0.3, rtol=1e-11, atol=1e-13)
    tw = integrate_field(G, w0, 0.3, rtol=1e-11, atol=1e-13)
    assume(tz.status == "completed" and tw.status == "completed")
    assume(abs(m.c * tz.final + m.d) > 0.1)
    assert abs(m(tz.final) - tw.final) < 1e-7 * max(1.0, abs(tw.final))


@pytest.mark.parametrize("n,gamma", [(2, 1.5), (3, 0.4 - 0.2j), (4, -2.0)])
def test_normal_form_residue_conserved(n, gamma):
    """The residue of ``1/F`` at a higher zero is a conjugacy invariant.

    Both the residue and its reciprocal are recorded; the residue is the
    quantity that is preserved.
    """
    F = normal_form_field(n, gamma)
    rng = np.random.default_rng(n)
    for _ in range(5):
        a, b, c, d = rng.normal(size=4) + 1j * rng.normal(size=4)
        m = MobiusMap(a, b, c, d)
        G = m.pushforward(F)
        cls0, cls1 = classify(F, 0j), classify(G, m(0j))
        assert cls1.tag == HIGHER_ZERO and cls1.n == n
        assert abs(cls1.gamma - gamma) < 1e-8
        recip = cls1.to_json()["gamma_reciprocal"]
        assert abs(complex(*recip) - 1 / gamma) < 1e-8
        assert abs(cls0.gamma - cls1.gamma) < 1e-8


def test_json_roundtrip_and_named():
    m = MobiusMap(1, 2j, -1, 3)
    assert MobiusMap.from_json(m.to_json()).equals(m)
    assert MobiusMap.from_json("canonical").equals(MobiusMap.canonical())
    with pytest.raises(KeyError):
        MobiusMap.named("nope")


def test_derivative():
    m = MobiusMap(1, 2j, -1, 3)
    z, h = 0.4 + 0.1j, 1e-6
    fd = (m(z + h) - m(z - h)) / (2 * h)
    assert abs(fd - m.derivative(z)) < 1e-8
    assert cmath.isfinite(m.derivative(z))
