"""Piecewise antiholomorphic systems ``z' = conj(f(z))`` on the unit circle.

Each side is Hamiltonian. A crossing periodic orbit meets the circle at two
points where both Hamiltonians take equal values, so in the rational chart
``x -> (2x/(1+x^2), (1-x^2)/(1+x^2))`` its abscissae ``(x0, y0)`` are common
zeros of two symmetric polynomials ``alpha^+`` and ``alpha^-``. Eliminating
``y`` with a resultant bounds the number of such orbits. Everything up to the
final root isolation is exact rational arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .cpoly import CPoly, ComplexRationalField, RPoly2, _try_divide, extract_factor, resultant_y, roots
from .system import PiecewiseSystem, SwitchingManifold

# exponent of (1 + x^2) in the resultant, and the orbit bound, per degree
FACTOR_EXPONENT = {1: 6, 2: 15}
ORBIT_BOUND = {1: 3, 2: 10}
# overall constants of the resultant under the clearing convention below;
# reported for comparison, never enforced
DISPLAYED_CONSTANT = {1: -4, 2: 36864}


def _q(c):
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    return Fraction(c).limit_denominator(10**12) if isinstance(c, float) else Fraction(c)


@dataclass(frozen=True)
class AntiholoSide:
    """``f(z) = A z + B`` (degree 1) or ``A z^2 + B z + C`` (degree 2).

    Coefficients are stored as pairs of Fractions ``(re, im)``.
    """

    degree: int
    A: tuple
    B: tuple
    C: tuple = (Fraction(0), Fraction(0))

    def __post_init__(self):
        if self.degree not in (1, 2):
            raise ValueError("degree must be 1 or 2")
        if self.degree == 1 and any(c != 0 for c in self.C):
            raise ValueError("linear side has no C coefficient")

    @classmethod
    def linear(cls, A, B):
        return cls(1, _pair(A), _pair(B))

    @classmethod
    def quadratic(cls, A, B, C):
        return cls(2, _pair(A), _pair(B), _pair(C))

    @classmethod
    def random(cls, rng, degree, denom=7, span=5):
        def rnd():
            return (Fraction(int(rng.integers(-span * denom, span * denom + 1)), denom),
                    Fraction(int(rng.integers(-span * denom, span * denom + 1)), denom))

        if degree == 1:
            return cls(1, rnd(), rnd())
        return cls(2, rnd(), rnd(), rnd())

    def coeffs(self):
        """Ascending complex coefficients of ``f``."""
        a = complex(*map(float, self.A))
        b = complex(*map(float, self.B))
        if self.degree == 1:
            return [b, a]
        return [complex(*map(float, self.C)), b, a]

    def poly(self):
        return CPoly(self.coeffs())

    def field(self):
        return ComplexRationalField(self.poly())

    def is_zero(self):
        return all(c == 0 for c in self.A + self.B + self.C)

    def rotated(self):
        """Side of the system seen through ``w = -z``: ``f~(w) = -f(-w)``."""
        neg = lambda p: (-p[0], -p[1])
        if self.degree == 1:
            return AntiholoSide(1, self.A, neg(self.B))
        return AntiholoSide(2, neg(self.A), self.B, neg(self.C))

    def to_json(self):
        enc = lambda p: [str(p[0]), str(p[1])]
        return {"degree": self.degree, "A": enc(self.A), "B": enc(self.B), "C": enc(self.C)}

    @classmethod
    def from_json(cls, data):
        dec = lambda p: (Fraction(p[0]), Fraction(p[1]))
        return cls(int(data["degree"]), dec(data["A"]), dec(data["B"]), dec(data.get("C", ["0", "0"])))

    @classmethod
    def from_field(cls, F):
        """Side from a polynomial field of degree 1 or 2 (coefficients rationalised)."""
        if not F.is_polynomial():
            raise ValueError("antiholomorphic sides must be polynomial")
        c = list(F.num.coeffs) + [0j] * 3
        deg = max(F.num.degree, 1)
        if deg == 1:
            return cls.linear(c[1], c[0])
        if deg == 2:
            return cls.quadratic(c[2], c[1], c[0])
        raise ValueError("degree above 2 not supported")


def _pair(z):
    if isinstance(z, tuple):
        return (_q(z[0]), _q(z[1]))
    z = complex(z)
    return (_q(z.real), _q(z.imag))


def hamiltonian(side):
    """``H`` with ``dH/dy = Re f`` and ``dH/dx = Im f``; the flow is
    ``(x', y') = (dH/dy, -dH/dx)``."""
    a1, a2 = side.A
    b1, b2 = side.B
    if side.degree == 1:
        return RPoly2({(1, 0): b2, (0, 1): b1, (2, 0): a2 / 2, (1, 1): a1, (0, 2): -a2 / 2})
    c1, c2 = side.C
    return RPoly2(
        {
            (1, 0): c2,
            (2, 0): b2 / 2,
            (3, 0): a2 / 3,
            (0, 1): c1,
            (1, 1): b1,
            (2, 1): a1,
            (0, 2): -b2 / 2,
            (1, 2): -a2,
            (0, 3): -a1 / 3,
        }
    )


def velocity_components(side):
    """``(u, v) = (Re f, Im f)`` as polynomials in ``x, y``."""
    x, y = RPoly2.x(), RPoly2.y()
    z_re, z_im = x, y
    a1, a2 = side.A
    b1, b2 = side.B
    c1, c2 = side.C
    if side.degree == 1:
        re = z_re * a1 - z_im * a2 + b1
        im = z_re * a2 + z_im * a1 + b2
        return re, im
    # z^2 = (x^2 - y^2) + 2 i x y
    s_re = x * x - y * y
    s_im = x * y * 2
    re = s_re * a1 - s_im * a2 + x * b1 - y * b2 + c1
    im = s_re * a2 + s_im * a1 + x * b2 + y * b1 + c2
    return re, im


# ---------------------------------------------------------------------------
# rational chart of the circle


def _upoly_mul(a, b):
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def _upoly_pow(a, k):
    out = [Fraction(1)]
    for _ in range(k):
        out = _upoly_mul(out, a)
    return out


def chart_numerator(H, m):
    """``P`` with ``H(A(x)) = P(x) / (1 + x^2)^m`` (ascending Fractions)."""
    X = [Fraction(0), Fraction(2)]
    Y = [Fraction(1), Fraction(0), Fraction(-1)]
    D = [Fraction(1), Fraction(0), Fraction(1)]
    out = [Fraction(0)] * (2 * m + 1)
    for (i, j), c in H.items():
        if i + j > m:
            raise ValueError("Hamiltonian degree exceeds clearing exponent")
        term = _upoly_mul(_upoly_mul(_upoly_pow(X, i), _upoly_pow(Y, j)), _upoly_pow(D, m - i - j))
        for k, t in enumerate(term):
            out[k] += Fraction(c) * t
    return out


def chart_point(x):
    """Point of the unit circle with chart abscissa ``x``."""
    d = 1 + x * x
    return complex(2 * x / d, (1 - x * x) / d)


def chart_abscissa(p):
    """Inverse of :func:`chart_point` (undefined at ``-i``)."""
    # p = i e^{-i t}, x = tan(t / 2)
    t = math.atan2(p.real, p.imag)
    return math.tan(t / 2)


def alpha_poly(side):
    """Symmetric polynomial vanishing at chart pairs with equal ``H`` values.

    ``H(A(x)) - H(A(y))`` is divided exactly by ``x - y`` after clearing the
    ``(1 + x^2)^m (1 + y^2)^m`` denominators, then scaled by ``-1/2``
    (degree 1) or ``3/2`` (degree 2).
    """
    m = 2 if side.degree == 1 else 3
    P = chart_numerator(hamiltonian(side), m)
    Px = RPoly2({(k, 0): c for k, c in enumerate(P)})
    Py = Px.swap()
    D = RPoly2({(0, 0): Fraction(1), (2, 0): Fraction(1)})
    N = Px * D.swap() ** m - Py * D**m
    quot, rem = N.divmod_x(RPoly2({(1, 0): Fraction(1), (0, 1): Fraction(-1)}))
    if not rem.is_zero():
        raise ArithmeticError("H(A(x)) - H(A(y)) not divisible by x - y")
    scale = Fraction(-1, 2) if side.degree == 1 else Fraction(3, 2)
    return quot * scale


# ---------------------------------------------------------------------------
# resultant and candidates


class ResultantDegenerate(ValueError):
    pass


@dataclass
class ResultantBound:
    R: RPoly2
    reduced: RPoly2
    bound: int
    factor_exponent: int
    exact: bool
    max_exponent: int
    leading_constant: Fraction
    identical: bool = False

    @property
    def reduced_degree(self):
        return self.reduced.deg_x()

    def report(self):
        return {
            "degree_R": self.R.deg_x(),
            "reduced_degree": self.reduced_degree,
            "factor_exponent": self.factor_exponent,
            "max_factor_exponent": self.max_exponent,
            "exact_division": self.exact,
            "bound": self.bound,
            "leading_constant": str(self.leading_constant),
            "identical_sides": self.identical,
        }


def resultant_bound(plus, minus):
    """``R = Res_y(alpha^+, alpha^-)`` with the ``(1 + x^2)^m`` factor removed."""
    if plus.degree != minus.degree:
        raise ValueError("both sides must have the same degree")
    deg = plus.degree
    ap, am = alpha_poly(plus), alpha_poly(minus)
    m = FACTOR_EXPONENT[deg]
    q = RPoly2.univariate([Fraction(1), Fraction(0), Fraction(1)])
    if ap == am or (not ap.is_zero() and _proportional(ap, am)):
        return ResultantBound(RPoly2(), RPoly2(), 0, m, True, 0, Fraction(0), identical=True)
    if ap.deg_y() <= 0 or am.deg_y() <= 0:
        raise ResultantDegenerate("resultant degenerate")
    R = resultant_y(ap, am)
    if R.is_zero():
        return ResultantBound(R, R, 0, m, True, 0, Fraction(0), identical=True)
    _, _, kmax = extract_factor(R, q)
    reduced, exact = R, True
    for _ in range(m):
        quot, ok, _ = _divide_once(reduced, q)
        if not ok:
            exact = False
            break
        reduced = quot
    lead = _content_constant(reduced)
    return ResultantBound(R, reduced, ORBIT_BOUND[deg], m, exact, kmax, lead)


def _divide_once(p, q):
    quot, ok = _try_divide(p.to_univariate(), q.to_univariate(), True, 0.0)
    return RPoly2.univariate(quot), ok, 1


def _proportional(a, b):
    if set(k for k, _ in a.items()) != set(k for k, _ in b.items()):
        return False
    ratio = None
    for k, c in a.items():
        r = Fraction(b[k]) / Fraction(c)
        if ratio is None:
            ratio = r
        elif r != ratio:
            return False
    return True


def _content_constant(p):
    """Rational ``c`` with ``p / c`` an integer polynomial with coprime entries."""
    coeffs = [Fraction(c) for c in p.to_univariate() if c != 0]
    if not coeffs:
        return Fraction(0)
    den = 1
    for c in coeffs:
        den = den * c.denominator // math.gcd(den, c.denominator)
    ints = [int(c * den) for c in coeffs]
    g = 0
    for v in ints:
        g = math.gcd(g, v)
    sign = 1 if ints[-1] > 0 else -1
    return Fraction(sign * g, den)


def _real_roots(coeffs, tol=1e-8):
    c = np.array([float(v) for v in coeffs], dtype=float)
    p = CPoly(c.astype(complex))
    if p.degree < 1:
        return []
    out = []
    for z in roots(p):
        if abs(z.imag) <= tol * max(1.0, abs(z)):
            x = _newton_real(coeffs, z.real)
            out.append(x)
    return sorted(out)


def _newton_real(coeffs, x, iters=8):
    """Polish a real root with exact-coefficient Horner in floating point."""
    c = [float(v) for v in coeffs]
    for _ in range(iters):
        f = 0.0
        df = 0.0
        for a in reversed(c):
            df = df * x + f
            f = f * x + a
        if df == 0:
            break
        step = f / df
        x -= step
        if abs(step) <= 1e-16 * max(1.0, abs(x)):
            break
    return x


def _eval_scaled(p, x, y):
    val = 0.0
    scale = 0.0
    for (i, j), c in p.items():
        t = float(c) * x**i * y**j
        val += t
        scale += abs(t)
    return val, max(scale, 1e-300)


def cycle_candidates(plus, minus, tol=1e-8, bound_result=None):
    """Pairs ``(x0, y0)``, ``x0 != y0``, of chart abscissae with
    ``alpha^+ = alpha^- = 0``; symmetric duplicates are merged."""
    if plus.is_zero() and minus.is_zero():
        return []
    res = bound_result or resultant_bound(plus, minus)
    if res.identical:
        return []
    ap, am = alpha_poly(plus), alpha_poly(minus)
    pairs = []
    for x0 in _real_roots(res.reduced.to_univariate()):
        ycoef = _at_x_float(ap, x0)
        if len(ycoef) < 2 or all(c == 0 for c in ycoef):
            continue
        for y0 in _real_roots_float(ycoef):
            if abs(x0 - y0) <= 1e-6 * max(1.0, abs(x0)):
                continue
            val, scale = _eval_scaled(am, x0, y0)
            if abs(val) > tol * scale:
                continue
            key = tuple(sorted((x0, y0)))
            if any(abs(key[0] - k[0]) < 1e-7 * max(1, abs(k[0])) and abs(key[1] - k[1]) < 1e-7 * max(1, abs(k[1])) for k in pairs):
                continue
            pairs.append(key)
    return sorted(pairs)


def _at_x_float(p, x0):
    dy = p.deg_y()
    out = [0.0] * (dy + 1)
    for (i, j), c in p.items():
        out[j] += float(c) * x0**i
    return out


def _real_roots_float(coeffs):
    c = np.array(coeffs, dtype=float)
    nz = np.nonzero(np.abs(c) > 1e-14 * np.max(np.abs(c)))[0]
    if len(nz) == 0 or nz[-1] < 1:
        return []
    c = c[: nz[-1] + 1]
    out = []
    for z in roots(CPoly(c.astype(complex))):
        if abs(z.imag) <= 1e-7 * max(1.0, abs(z)):
            out.append(_newton_real(list(c), z.real))
    return out


def candidate_points(plus, minus, rotated=True):
    """Boundary point pairs (on the unit circle) of candidate crossing orbits.

    With ``rotated=True`` the construction is repeated in the chart of the
    rotated system ``w = -z`` so orbits through the chart's missing point
    ``-i`` are covered too.
    """
    out = []
    for x0, y0 in cycle_candidates(plus, minus):
        out.append((chart_point(x0), chart_point(y0)))
    if rotated:
        for x0, y0 in cycle_candidates(plus.rotated(), minus.rotated()):
            pair = (-chart_point(x0), -chart_point(y0))
            if not any(same_pair(pair, q) for q in out):
                out.append(pair)
    return out


def same_pair(a, b, tol=1e-6):
    return (abs(a[0] - b[0]) < tol and abs(a[1] - b[1]) < tol) or (abs(a[0] - b[1]) < tol and abs(a[1] - b[0]) < tol)


def antiholo_system(plus, minus):
    """Piecewise system ``z' = conj(f^±(z))`` with ``f^+`` outside the unit circle."""
    return PiecewiseSystem(plus.field(), minus.field(), SwitchingManifold.unit_circle(), conjugated=True)


def confirm_candidates(plus, minus, width=1e-3, grid=9):
    """Candidates that :func:`pwholo.cycles.find_cycles` confirms as crossing cycles."""
    from .cycles import SectionChart, find_cycles

    sys = antiholo_system(plus, minus)
    confirmed = []
    for p0, p1 in candidate_points(plus, minus):
        for p in (p0, p1):
            th = math.atan2(p.imag, p.real)
            chart = SectionChart(sys.manifold, th)
            try:
                found = find_cycles(sys, (th - width, th + width), grid=grid, chart=chart)
            except ValueError:
                continue
            if found:
                confirmed.append((found[0], (p0, p1)))
                break
    return confirmed


def _side_from_vector(degree, v):
    v = list(v) + [Fraction(0)] * (6 - len(v))
    if degree == 1:
        return AntiholoSide(1, (v[0], v[1]), (v[2], v[3]))
    return AntiholoSide(2, (v[0], v[1]), (v[2], v[3]), (v[4], v[5]))


def alpha_value_basis(degree, x0, y0):
    """``alpha(x0, y0)`` of each unit coefficient side (it is linear in them)."""
    out = []
    for k in range(2 * (degree + 1)):
        v = [Fraction(0)] * (2 * (degree + 1))
        v[k] = Fraction(1)
        out.append(alpha_poly(_side_from_vector(degree, v))(x0, y0))
    return out


def engineered_pair(rng, degree, attempts=200, denom=1000):
    """Random pair with a crossing periodic orbit, or ``None``.

    The outer side gets a saddle just outside the circle so that some outer
    orbit arcs leave and re-enter the disk. Its true half return ``P -> Q`` is
    integrated, and the inner side is drawn from the rational hyperplane
    ``alpha^-(x_P, x_Q) = 0`` with the crossing signs at ``P`` and ``Q``
    required, so the orbit closes up to integration error.
    Returns ``(plus, minus, theta_P)``.
    """
    from .cycles import SectionChart, half_return_full, poincare
    from .flow import NoReturn
    from .system import normal_components

    q = lambda v: Fraction(float(v)).limit_denominator(denom)
    n = 2 * (degree + 1)
    for _ in range(attempts):
        a = complex(q(rng.normal()), q(rng.normal()))
        t0, r0 = rng.uniform(0, 2 * math.pi), rng.uniform(1.0, 1.5)
        s1 = complex(q(r0 * math.cos(t0)), q(r0 * math.sin(t0)))
        if degree == 1:
            plus = AntiholoSide.linear(a, -a * s1)
        else:
            s2 = complex(q(rng.normal()), q(rng.normal()))
            plus = AntiholoSide.quadratic(a, -a * (s1 + s2), a * s1 * s2)
        th = float(rng.uniform(-math.pi, math.pi))
        probe = antiholo_system(plus, plus)
        chart = SectionChart(probe.manifold, th)
        try:
            h = half_return_full(probe, "outer", th, chart, tmax=50.0, bound=50.0)
        except (NoReturn, ValueError, ArithmeticError):
            continue
        P, Q = chart.point(th), h.z
        x0 = Fraction(chart_abscissa(P)).limit_denominator(10**9)
        y0 = Fraction(chart_abscissa(Q)).limit_denominator(10**9)
        w = alpha_value_basis(degree, x0, y0)
        k = max(range(n), key=lambda i: abs(w[i]))
        if w[k] == 0:
            continue
        for _ in range(20):
            v = [q(2 * rng.normal()) for _ in range(n)]
            v[k] = Fraction(0)
            v[k] = -sum(wi * vi for wi, vi in zip(w, v)) / w[k]
            v[k] = v[k].limit_denominator(10**6)
            minus = _side_from_vector(degree, v)
            sys = antiholo_system(plus, minus)
            try:
                if not (normal_components(sys, P)[1] > 0 and normal_components(sys, Q)[1] < 0):
                    continue
                r = poincare(sys, th, chart, tmax=50.0)
            except (NoReturn, ValueError, ArithmeticError):
                break
            if abs(r - th) < 1e-4:
                return plus, minus, th
            break
    return None
