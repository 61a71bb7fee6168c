from fractions import Fraction

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from pwholo.cpoly import (
    CPoly,
    ComplexRationalField,
    RPoly2,
    bareiss_det,
    extract_factor,
    resultant_y,
    roots,
)

small = st.floats(-3, 3, allow_nan=False, allow_infinity=False)
cplx = st.builds(complex, small, small)


def test_trim_and_degree():
    p = CPoly([1, 2, 0, 0])
    assert p.degree == 1
    assert CPoly([0]).is_zero()
    assert CPoly([0]).degree == -1


def test_arithmetic_matches_numpy():
    a, b = CPoly([1, 2j, 3]), CPoly([-1, 1])
    prod = np.polynomial.polynomial.polymul(a.coeffs, b.coeffs)
    assert np.allclose((a * b).coeffs, prod)
    assert np.allclose((a + b).coeffs, [0, 1 + 2j, 3])
    q, r = (a * b + 5).divmod(b)
    assert q.allclose(a) and r.allclose(CPoly([5]))


def test_taylor_shift():
    p = CPoly([1, -2, 0, 1])
    s = p.taylor_shift(1.5)
    for t in (0.0, 0.3, -1.1):
        assert abs(s(t) - p(1.5 + t)) < 1e-12


def test_roots_known():
    r = sorted(roots(CPoly.from_roots([1, 2, 3j])), key=lambda z: (z.real, z.imag))
    assert np.allclose(r, [3j, 1, 2])


def test_roots_multiple():
    p = CPoly.from_roots([0.5, 0.5, -1])
    r = np.sort_complex(roots(p))
    assert np.allclose(r, [-1, 0.5, 0.5], atol=1e-6)


@settings(max_examples=40, deadline=None)
@given(st.lists(cplx, min_size=1, max_size=6))
def test_roots_reconstruct(rs):
    p = CPoly.from_roots(rs)
    got = roots(p)
    assert len(got) == len(rs)
    # every computed root is a root up to conditioning
    scale = float(np.max(np.abs(p.coeffs)))
    for z in got:
        assert abs(p(z)) <= 1e-7 * scale * max(1.0, abs(z)) ** p.degree


def test_field_normalises_and_cancels():
    F = ComplexRationalField(CPoly.from_roots([1, 2]) * 3, CPoly.from_roots([1, -1]) * 2)
    assert F.den.degree == 1 and abs(F.den.lead - 1) < 1e-14
    assert abs(F(0.3) - 1.5 * (0.3 - 2) / (0.3 + 1)) < 1e-12


def test_field_zero_denominator():
    with pytest.raises(ValueError):
        ComplexRationalField(CPoly([1]), CPoly([0]))


def test_field_json_roundtrip():
    F = ComplexRationalField(CPoly([1, 2j]), CPoly([3, 1]))
    G = ComplexRationalField.from_json(F.to_json())
    assert G.allclose(F, 1e-15)


def test_rpoly2_algebra():
    x, y = RPoly2.x(), RPoly2.y()
    p = (x + y) ** 2 - x * y * 2
    assert p == x * x + y * y
    assert p.swap() == p
    assert p.diff_x() == x * 2
    assert p(2, 3) == 13


def test_rpoly2_divmod_x():
    x, y = RPoly2.x(), RPoly2.y()
    a = (x - y) * (x * x + y + 1)
    q, r = a.divmod_x(x - y)
    assert r.is_zero() and q == x * x + y + 1


def _sym(p):
    X, Y = sp.symbols("x y")
    return sum(sp.Rational(Fraction(c).numerator, Fraction(c).denominator) * X**i * Y**j for (i, j), c in p.items()), X, Y


def _rand_rpoly(rng, dx, dy):
    return RPoly2({(i, j): Fraction(int(rng.integers(-5, 6)), int(rng.integers(1, 4))) for i in range(dx + 1) for j in range(dy + 1)})


@pytest.mark.parametrize("seed", range(5))
def test_resultant_matches_sympy(seed):
    rng = np.random.default_rng(seed)
    f, g = _rand_rpoly(rng, 2, 2), _rand_rpoly(rng, 1, 3)
    R = resultant_y(f, g)
    fs, X, Y = _sym(f)
    gs, _, _ = _sym(g)
    ref = sp.Poly(sp.resultant(fs, gs, Y), X)
    got = sp.Poly(_sym(R)[0], X)
    assert sp.expand(ref.as_expr() - got.as_expr()) == 0


def test_resultant_float_path():
    rng = np.random.default_rng(3)
    f = _rand_rpoly(rng, 2, 2).map_coeffs(float)
    g = _rand_rpoly(rng, 1, 2).map_coeffs(float)
    exact = resultant_y(f.map_coeffs(Fraction), g.map_coeffs(Fraction))
    approx = resultant_y(f, g)
    for x0 in (-1.3, 0.2, 0.9):
        a, b = float(exact(x0, 0)), float(approx(x0, 0))
        assert abs(a - b) <= 1e-9 * max(1.0, abs(a))


def test_bareiss_matches_sympy():
    rng = np.random.default_rng(0)
    n = 4
    mat = [[[int(v) for v in rng.integers(-3, 4, size=2)] for _ in range(n)] for _ in range(n)]
    det = bareiss_det(mat)
    X = sp.Symbol("x")
    M = sp.Matrix(n, n, lambda i, j: mat[i][j][0] + mat[i][j][1] * X)
    ref = sp.Poly(M.det(), X).all_coeffs()[::-1]
    assert [int(c) for c in ref] == [int(c) for c in det] + [0] * (len(ref) - len(det))


def test_extract_factor_exact():
    q = RPoly2.univariate([Fraction(1), 0, Fraction(1)])
    core = RPoly2.univariate([Fraction(2), Fraction(-1), Fraction(3)])
    p = core * q**3
    quot, exact, k = extract_factor(p, q)
    assert exact and k == 3 and quot == core


def test_extract_factor_none():
    q = RPoly2.univariate([Fraction(1), 0, Fraction(1)])
    quot, exact, k = extract_factor(RPoly2.univariate([Fraction(1), Fraction(1)]), q)
    assert not exact and k == 0
