"""First and second order averaged functions for perturbed linear centers.

The unperturbed field is ``w' = i w`` on both sides of the real axis (the
image of ``z' = (1 + z^2)/2`` under the canonical Möbius map). A side with
perturbation ``h(w) = sum (a_k + i b_k) w^k`` pulled back to the circle and
pushed forward again becomes ``w' = i w + eps * sum (p_k + i q_k) w^k`` with
``p_k + i q_k = -delta_{k-2}/2 + i delta_{k-1} + delta_k/2``.

Closed forms work for float or :class:`fractions.Fraction` coefficients; the
quadrature oracles integrate the polar form ``dr/dtheta`` directly.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy import integrate

from .cpoly import CPoly, ComplexRationalField, roots
from .mobius import MobiusMap
from .system import PiecewiseSystem, SwitchingManifold, transform_system

QUAD_TOL = 1e-11
HALF = Fraction(1, 2)


@dataclass
class PerturbationSpec:
    """Coefficients ``a_k, b_k`` (``k = 0..n``) of ``h^+`` and ``h^-``."""

    a_plus: list
    b_plus: list
    a_minus: list
    b_minus: list
    eps: float = 1e-3

    def __post_init__(self):
        if len(self.a_plus) != len(self.b_plus) or len(self.a_minus) != len(self.b_minus):
            raise ValueError("coefficient lists of a side must have equal length")
        if not self.a_plus or not self.a_minus:
            raise ValueError("each side needs at least one coefficient")

    @property
    def n_plus(self):
        return len(self.a_plus) - 1

    @property
    def n_minus(self):
        return len(self.a_minus) - 1

    @classmethod
    def from_complex(cls, h_plus, h_minus, eps=1e-3):
        hp = [complex(c) for c in h_plus]
        hm = [complex(c) for c in h_minus]
        return cls([c.real for c in hp], [c.imag for c in hp], [c.real for c in hm], [c.imag for c in hm], eps)

    @classmethod
    def random(cls, rng, n_plus, n_minus, scale=1.0, eps=1e-3):
        u = lambda n: list(rng.uniform(-scale, scale, n + 1))
        return cls(u(n_plus), u(n_plus), u(n_minus), u(n_minus), eps)

    def h(self, side):
        a, b = (self.a_plus, self.b_plus) if side == "plus" else (self.a_minus, self.b_minus)
        return CPoly([complex(float(x), float(y)) for x, y in zip(a, b)])

    def params(self):
        """Flat parameter vector ``a+, b+, a-, b-``."""
        return list(self.a_plus) + list(self.b_plus) + list(self.a_minus) + list(self.b_minus)

    def with_params(self, x):
        n1, n2 = self.n_plus + 1, self.n_minus + 1
        x = list(x)
        return PerturbationSpec(x[:n1], x[n1 : 2 * n1], x[2 * n1 : 2 * n1 + n2], x[2 * n1 + n2 :], self.eps)

    def to_json(self):
        conv = lambda v: [str(c) if isinstance(c, Fraction) else float(c) for c in v]
        return {
            "a_plus": conv(self.a_plus),
            "b_plus": conv(self.b_plus),
            "a_minus": conv(self.a_minus),
            "b_minus": conv(self.b_minus),
            "eps": float(self.eps),
        }

    @classmethod
    def from_json(cls, data):
        conv = lambda v: [Fraction(c) if isinstance(c, str) else float(c) for c in v]
        return cls(
            conv(data["a_plus"]),
            conv(data["b_plus"]),
            conv(data["a_minus"]),
            conv(data["b_minus"]),
            float(data.get("eps", 1e-3)),
        )


@dataclass
class LiftedCoefficients:
    """``p_k, q_k`` for ``k = 0..n+2`` on each side."""

    p_plus: list
    q_plus: list
    p_minus: list
    q_minus: list

    def side(self, side):
        return (self.p_plus, self.q_plus) if side == "plus" else (self.p_minus, self.q_minus)


def _lift_side(a, b):
    n = len(a) - 1
    A = lambda k: a[k] if 0 <= k <= n else 0
    B = lambda k: b[k] if 0 <= k <= n else 0
    # Fraction multipliers keep exact inputs exact (0 / 2 would be a float)
    p = [-A(k - 2) * HALF - B(k - 1) + A(k) * HALF for k in range(n + 3)]
    q = [-B(k - 2) * HALF + A(k - 1) + B(k) * HALF for k in range(n + 3)]
    return p, q


def lift(spec):
    pp, qp = _lift_side(spec.a_plus, spec.b_plus)
    pm, qm = _lift_side(spec.a_minus, spec.b_minus)
    return LiftedCoefficients(pp, qp, pm, qm)


@dataclass
class AveragedPoly:
    """Real polynomial in ``r`` (ascending coefficients) of a given order."""

    coeffs: np.ndarray
    order: int
    exact_zero: bool = False
    tol: float = field(default=0.0, repr=False)

    def __call__(self, r):
        return np.polynomial.polynomial.polyval(r, self.coeffs)

    def cpoly(self):
        return CPoly(self.coeffs.astype(complex))

    def is_zero(self):
        return self.exact_zero or not np.any(np.abs(self.coeffs) > self.tol)

    def monomials(self):
        """Exponents of the nonzero monomials."""
        scale = max(1.0, float(np.max(np.abs(self.coeffs)))) if self.coeffs.size else 1.0
        return [k for k, c in enumerate(self.coeffs) if abs(c) > 1e-14 * scale]

    def monomial_count(self):
        return len(self.monomials())


def _num(x):
    return float(x)


def m1_parts(spec):
    """Exact parts of ``M_1``: ``(c0, c1_over_pi, {2k: c_2k})``.

    ``M_1(r) = c0 + pi * c1_over_pi * r + sum c_2k r^(2k)``; the parts stay
    in the arithmetic of the inputs (so Fractions give exact zeros).
    """
    L = lift(spec)
    kmax = max(spec.n_plus, spec.n_minus) // 2 + 1
    pp, qp, pm, qm = L.p_plus, L.q_plus, L.p_minus, L.q_minus
    Q = lambda q, k: q[k] if k < len(q) else 0
    c0 = 2 * (qp[0] - qm[0])
    c1 = pp[1] + pm[1]
    even = {}
    for k in range(1, kmax + 1):
        even[2 * k] = (Q(qp, 2 * k) - Q(qm, 2 * k)) * Fraction(-2, 2 * k - 1)
    return c0, c1, even


def m1_closed(spec):
    """``M_1 = M_1^+ - M_1^-`` with ``M_1^± = 2 q_0 ± pi p_1 r - 2 sum q_2k r^2k / (2k-1)``."""
    c0, c1, even = m1_parts(spec)
    deg = max(even) if even else 1
    coeffs = np.zeros(deg + 1)
    coeffs[0] = _num(c0)
    coeffs[1] = math.pi * _num(c1)
    for k, c in even.items():
        coeffs[k] = _num(c)
    exact = all(isinstance(x, Fraction) or isinstance(x, int) for x in spec.params())
    zero = exact and c0 == 0 and c1 == 0 and all(c == 0 for c in even.values())
    return AveragedPoly(coeffs, 1, exact_zero=zero, tol=1e-12 * max(1.0, _spec_scale(spec)))


def _spec_scale(spec):
    return max(abs(float(x)) for x in spec.params())


class FirstOrderNotZero(ValueError):
    pass


def _u_k(p, q, k):
    """``U_k`` from one side's lifted coefficients."""
    P = lambda j: p[j] if 0 <= j < len(p) else 0
    Qc = lambda j: q[j] if 0 <= j < len(q) else 0
    fk = math.factorial
    pref = -Fraction(2 ** (k + 1) * fk(k), fk(2 * k))
    c_pp = Fraction(fk(2 * (k - 1))) / (Fraction(2) ** (k - 2) * fk(k - 1))
    total = 0
    for s in range(0, k + 1):
        t = 2 * k + 1 - 2 * s
        if t < 0:
            continue
        c_qq = Fraction((t - 2 * s) * fk(2 * k - 2)) / ((2 * s - 1) * Fraction(2) ** (k - 1) * fk(k - 1))
        total = total + _mul(c_pp, P(2 * s) * P(t)) + _mul(c_qq, Qc(2 * s) * Qc(t))
    return _mul(pref, total)


def _mul(frac, x):
    if isinstance(x, (Fraction, int)):
        return frac * x
    return float(frac) * x


def m2_closed(spec, check=True):
    """Second order averaged polynomial under the first-order vanishing conditions."""
    if check:
        m1 = m1_closed(spec)
        if not m1.is_zero():
            raise FirstOrderNotZero("second order undefined: first order does not vanish")
    L = lift(spec)
    N = max(spec.n_plus, spec.n_minus)
    pad = lambda v: list(v) + [0] * (N + 3 - len(v))
    pp, qp, pm, qm = (pad(v) for v in (L.p_plus, L.q_plus, L.p_minus, L.q_minus))
    coeffs = np.zeros(2 * N + 3)
    const = -4 * pm[1] * (pp[0] + pm[0]) - 2 * qm[0] * (qp[1] - qm[1])
    lin = pm[1] * (qp[1] - qm[1]) - 2 * qm[0] * (pp[2] + pm[2]) - 2 * qm[2] * (pp[0] + pm[0])
    coeffs[0] = _num(const)
    coeffs[1] = math.pi * _num(lin)
    for k in range(1, N + 2):
        coeffs[2 * k] = _num(_u_k(pp, qp, k) - _u_k(pm, qm, k))
    for k in range(1, (N + 1) // 2 + 1):
        coeffs[2 * k + 1] = math.pi * _num(pm[1] * (qm[2 * k + 1] - qp[2 * k + 1]))
    return AveragedPoly(coeffs, 2)


# ---------------------------------------------------------------------------
# quadrature oracles


def _side_eval(p, q):
    """Scalar evaluators of ``F_1``, ``F_2`` and ``dF_1/dr`` for one side."""
    coef = [complex(_num(pk), _num(qk)) for pk, qk in zip(p, q)]

    def parts(theta, r):
        # e^{-i theta} * sum c_k (r e^{i theta})^k
        w = r * cmath.exp(1j * theta)
        acc = 0j
        for c in reversed(coef):
            acc = acc * w + c
        E = acc * cmath.exp(-1j * theta)
        return E.real, E.imag

    def f1(theta, r):
        return parts(theta, r)[0]

    def f2(theta, r):
        R, T = parts(theta, r)
        return -R * T / r

    def df1(theta, r):
        acc = 0.0
        for k in range(1, len(coef)):
            c = coef[k]
            acc += k * r ** (k - 1) * (c.real * math.cos((k - 1) * theta) - c.imag * math.sin((k - 1) * theta))
        return acc

    return f1, f2, df1


def _quad(f, a, b):
    # the requested accuracy sits at the rounding floor, so scipy may warn
    # about roundoff; the result is still accurate to the floor
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, _ = integrate.quad(f, a, b, epsabs=QUAD_TOL * 1e-2, epsrel=QUAD_TOL * 1e-2, limit=200)
    return val


def m1_numeric(spec, r):
    """``M_1(r)`` by adaptive quadrature of ``F_1`` over each half turn."""
    L = lift(spec)
    out = 0.0
    for side, end in (("plus", math.pi), ("minus", -math.pi)):
        f1, _, _ = _side_eval(*L.side(side))
        val = _quad(lambda th: f1(th, r), 0.0, end)
        out += val if side == "plus" else -val
    return out


def m2_numeric(spec, r):
    """``M_2(r)`` by nested quadrature of ``y_2(±pi, r) / 2``."""
    L = lift(spec)
    out = 0.0
    for side, end in (("plus", math.pi), ("minus", -math.pi)):
        f1, f2, df1 = _side_eval(*L.side(side))
        y1 = lambda th: _quad(lambda s: f1(s, r), 0.0, th)
        integrand = lambda th: 2 * f2(th, r) + 2 * df1(th, r) * y1(th)
        val = _quad(integrand, 0.0, end) / 2
        out += val if side == "plus" else -val
    return out


# ---------------------------------------------------------------------------
# zero counting


def _clean(coeffs):
    """Real coefficients with entries below ``1e-14`` of the largest set to zero."""
    c = np.array(getattr(coeffs, "coeffs", coeffs), dtype=float)
    if c.size and np.any(c):
        c[np.abs(c) <= 1e-14 * float(np.max(np.abs(c)))] = 0.0
    return c


def descartes_bound(coeffs):
    """Number of sign changes in the nonzero coefficients."""
    signs = [np.sign(x) for x in _clean(coeffs) if x != 0]
    if not signs:
        raise ValueError("zero polynomial")
    return int(sum(1 for s0, s1 in zip(signs, signs[1:]) if s0 != s1))


def positive_simple_zeros(coeffs, cluster=1e-6):
    """Sorted positive real roots that are simple (isolated and ``|p'| > 1e-10``).

    Coefficients are cleaned as in :func:`descartes_bound`, so the count
    never exceeds that bound.
    """
    c = _clean(coeffs)
    p = CPoly(c.astype(complex))
    if p.degree < 1:
        return []
    rs = roots(p)
    dp = p.deriv()
    scale = float(np.max(np.abs(c)))
    out = []
    for i, z in enumerate(rs):
        mag = max(1.0, abs(z))
        if abs(z.imag) > 1e-8 * mag or z.real <= 0:
            continue
        if any(j != i and abs(w - z) < cluster * mag for j, w in enumerate(rs)):
            continue
        if abs(dp(z.real)) <= 1e-10 * scale:
            continue
        out.append(float(z.real))
    return sorted(out)


def count_positive_simple_zeros(coeffs):
    return len(positive_simple_zeros(coeffs))


# ---------------------------------------------------------------------------
# linear algebra on the parameter space


def m1_matrix(spec):
    """Matrix of the linear map parameters -> nonzero ``M_1`` coefficients.

    Rows follow the monomials ``1, r, r^2, r^4, ..., r^(2K)``; columns follow
    :meth:`PerturbationSpec.params`.
    """
    x0 = spec.params()
    cols = []
    for j in range(len(x0)):
        e = [0.0] * len(x0)
        e[j] = 1.0
        m = m1_closed(spec.with_params(e))
        cols.append(m.coeffs)
    deg = max(len(c) for c in cols)
    M = np.zeros((deg, len(x0)))
    for j, c in enumerate(cols):
        M[: len(c), j] = c
    rows = [0, 1] + list(range(2, deg, 2))
    return M[rows], [0, 1] + list(range(2, deg, 2))


def m1_rank(spec):
    A, _ = m1_matrix(spec)
    return int(np.linalg.matrix_rank(A))


def poly_with_zeros(exponents, zeros):
    """Coefficients on ``exponents`` of a polynomial vanishing at ``zeros``.

    Needs ``len(zeros) == len(exponents) - 1``; the null vector is normalised
    to unit norm with a positive last entry.
    """
    V = np.array([[z**e for e in exponents] for z in zeros], dtype=float)
    _, _, vt = np.linalg.svd(V)
    v = vt[-1]
    if v[-1] < 0:
        v = -v
    return v / np.linalg.norm(v)


def spec_with_m1_zeros(n_plus, n_minus, zeros, eps=1e-3, scale=1.0):
    """Least-norm perturbation whose ``M_1`` vanishes at the given radii.

    The target polynomial has coefficient vector of norm ``scale``.
    """
    template = PerturbationSpec([0.0] * (n_plus + 1), [0.0] * (n_plus + 1), [0.0] * (n_minus + 1), [0.0] * (n_minus + 1), eps)
    A, exps = m1_matrix(template)
    if np.linalg.matrix_rank(A) != A.shape[0]:
        raise ArithmeticError("first order coefficient map is rank deficient")
    target = scale * poly_with_zeros(exps, zeros)
    x, *_ = np.linalg.lstsq(A, target, rcond=None)
    return template.with_params(list(x))


def vanishing_constraints(spec):
    """Linear constraints (rows over the parameters) forcing ``M_1 = 0``.

    The rows are the exact ``M_1`` parts ``c0``, ``c1/pi`` and each ``c_2k``
    as functions of the parameters, obtained by evaluating on unit vectors.
    """
    n = len(spec.params())
    rows = []
    base = [Fraction(0)] * n
    for j in range(n):
        e = list(base)
        e[j] = Fraction(1)
        c0, c1, even = m1_parts(spec.with_params(e))
        rows.append([c0, c1] + [even[k] for k in sorted(even)])
    # transpose: one row per constraint
    return [list(r) for r in zip(*rows)]


def _rref(rows, order):
    """Reduced row echelon form over Q, pivoting on columns in ``order``."""
    rows = [list(r) for r in rows if any(c != 0 for c in r)]
    pivots = []
    ri = 0
    for col in order:
        if ri == len(rows):
            break
        piv = next((i for i in range(ri, len(rows)) if rows[i][col] != 0), None)
        if piv is None:
            continue
        rows[ri], rows[piv] = rows[piv], rows[ri]
        lead = rows[ri][col]
        rows[ri] = [c / lead for c in rows[ri]]
        for i in range(len(rows)):
            if i != ri and rows[i][col] != 0:
                f = rows[i][col]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[ri])]
        pivots.append(col)
        ri += 1
    return rows[: len(pivots)], pivots


def _pivot_order(spec, prefer):
    n1 = 2 * (spec.n_plus + 1)
    plus, minus = list(range(n1)), list(range(n1, len(spec.params())))
    return plus + minus if prefer == "plus" else minus + plus


def impose_vanishing(spec, prefer="plus"):
    """Exact copy of ``spec`` with the first order averaged function zero.

    Inputs are converted to Fractions. Each constraint is solved for one
    pivot parameter (of the preferred side when possible); all other
    parameters keep their values.
    """
    x = [Fraction(v) for v in spec.params()]
    rows, pivots = _rref(vanishing_constraints(spec), _pivot_order(spec, prefer))
    for row, col in zip(rows, pivots):
        x[col] = -sum(row[j] * x[j] for j in range(len(x)) if j not in pivots)
    out = spec.with_params(x)
    c0, c1, even = m1_parts(out)
    assert c0 == 0 and c1 == 0 and all(v == 0 for v in even.values())
    return out


def m2_parameterization(spec, prefer="plus"):
    """Free parameter indices and a map from their values to a spec that
    satisfies the vanishing conditions exactly."""
    _, pivots = _rref(vanishing_constraints(spec), _pivot_order(spec, prefer))
    free = [j for j in range(len(spec.params())) if j not in pivots]

    def build(values):
        x = [Fraction(0)] * len(spec.params())
        for j, v in zip(free, values):
            x[j] = Fraction(v)
        return impose_vanishing(spec.with_params(x), prefer)

    return free, build


def m2_exponents(n_plus, n_minus):
    """Exponents of the monomials that ``M_2`` can carry."""
    N = max(n_plus, n_minus)
    odd = [2 * k + 1 for k in range(1, (N + 1) // 2 + 1)]
    return sorted([0, 1] + [2 * k for k in range(1, N + 2)] + odd)


def m2_zero_bound(n_plus, n_minus):
    """Descartes bound on positive zeros carried by the ``M_2`` monomials."""
    return len(m2_exponents(n_plus, n_minus)) - 1


def _zero_template(n_plus, n_minus):
    z = lambda n: [Fraction(0)] * (n + 1)
    return PerturbationSpec(z(n_plus), z(n_plus), z(n_minus), z(n_minus))


def m2_quadratic_form(n_plus, n_minus):
    """``M_2`` coefficients as quadratic forms in the free parameters.

    Returns ``(Q, exps, free, build)`` with ``coeffs[exps] = v^T Q[k] v`` for
    free parameter values ``v``; ``build`` maps ``v`` to an exact spec.
    The forms are recovered by polarization on exact specs.
    """
    exps = m2_exponents(n_plus, n_minus)
    free, build = m2_parameterization(_zero_template(n_plus, n_minus))
    top = max(exps) + 1

    def coef(v):
        c = m2_closed(build(v), check=False).coeffs
        out = np.zeros(top)
        out[: min(top, len(c))] = c[:top]
        return out[exps]

    k = len(free)
    unit = np.eye(k, dtype=int)
    Q = np.zeros((len(exps), k, k))
    for i in range(k):
        Q[:, i, i] = coef([int(x) for x in unit[i]])
    for i in range(k):
        for j in range(i + 1, k):
            q = (coef([int(x) for x in unit[i] + unit[j]]) - Q[:, i, i] - Q[:, j, j]) / 2
            Q[:, i, j] = Q[:, j, i] = q
    return Q, exps, free, build


def search_m2_zeros(n_plus, n_minus, target=None, seed=0, batches=20, batch=5000):
    """Spec satisfying the vanishing conditions whose ``M_2`` has many simple
    positive zeros.

    Free parameters are sampled on several scales, sign changes of ``M_2``
    are counted on a logarithmic radius grid and the best sample is
    confirmed by root finding. Stops early once ``target`` zeros (default
    :func:`m2_zero_bound`) are confirmed. Returns ``(spec, zeros)``.
    """
    Q, exps, free, build = m2_quadratic_form(n_plus, n_minus)
    target = m2_zero_bound(n_plus, n_minus) if target is None else target
    rng = np.random.default_rng(seed)
    grid = np.geomspace(1e-3, 1e3, 600)
    powers = grid[None, :] ** np.array(exps)[:, None]
    best_spec, best_zeros = None, []
    for _ in range(batches):
        v = rng.normal(size=(batch, len(free))) * 10.0 ** rng.uniform(-1, 1, size=(batch, len(free)))
        c = np.einsum("kij,ni,nj->nk", Q, v, v)
        vals = c @ powers
        changes = np.sum(np.signbit(vals[:, 1:]) != np.signbit(vals[:, :-1]), axis=1)
        for idx in np.argsort(-changes, kind="stable")[:20]:
            if changes[idx] <= len(best_zeros):
                break
            spec = build([Fraction(float(x)) for x in v[idx]])
            zeros = positive_simple_zeros(m2_closed(spec))
            if len(zeros) > len(best_zeros):
                best_spec, best_zeros = spec, zeros
        if len(best_zeros) >= target:
            break
    return best_spec, best_zeros


def impose_vanishing_float(spec):
    """Floating version of :func:`impose_vanishing` (used inside solvers)."""
    exact = impose_vanishing(spec.with_params([Fraction(v) for v in spec.params()]))
    return exact.with_params([float(v) for v in exact.params()])


# ---------------------------------------------------------------------------
# systems


def line_system(spec, eps=None):
    """``w' = i w + eps * sum (p_k + i q_k) w^k`` on each side of the real axis."""
    eps = spec.eps if eps is None else eps
    L = lift(spec)
    fields = []
    for side in ("plus", "minus"):
        p, q = L.side(side)
        c = np.array([complex(_num(a), _num(b)) for a, b in zip(p, q)]) * eps
        c[1] += 1j
        fields.append(ComplexRationalField(CPoly(c)))
    return PiecewiseSystem(fields[0], fields[1], SwitchingManifold.real_axis())


def circle_system(spec, eps=None):
    """``z' = (1 + z^2)/2 + eps * h(phi(z))`` on each side of the unit circle."""
    return transform_system(line_system(spec, eps), MobiusMap.canonical().inverse())


def circle_field_direct(h, eps):
    """``(1 + z^2)/2 + eps * h(phi(z))`` assembled directly as a rational field."""
    n = h.degree if not h.is_zero() else 0
    P = CPoly([1j, -1])
    Q = CPoly([-1, 1j])
    num = CPoly([0.0])
    for k, c in enumerate(h.coeffs):
        num = num + c * P**k * Q ** (n - k)
    base = CPoly([0.5, 0, 0.5]) * Q**n
    return ComplexRationalField(base + eps * num, Q**n)
