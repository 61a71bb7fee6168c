"""Polynomial algebra: complex univariate polynomials, rational vector fields,
real bivariate polynomials and Sylvester resultants.

Univariate complex polynomials (:class:`CPoly`) are floating point and carry
their coefficients in ascending degree. Bivariate real polynomials
(:class:`RPoly2`) hold arbitrary numeric coefficients, so they can be used
with :class:`fractions.Fraction` for exact elimination.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational
import math

import numpy as np

TRIM_RTOL = 1e-12


def _as_complex_array(coeffs):
    arr = np.array(coeffs, dtype=complex).ravel()
    return arr if arr.size else np.zeros(1, dtype=complex)


class CPoly:
    """Complex polynomial with ascending coefficients ``c[0] + c[1] z + ...``.

    Coefficients below ``TRIM_RTOL`` times the largest magnitude are dropped
    from the top, so ``degree`` is the index of the leading nonzero term.
    The zero polynomial is stored as ``[0]`` and has degree ``-1``.
    """

    __slots__ = ("_c",)

    def __init__(self, coeffs, trim=True):
        c = _as_complex_array(coeffs)
        if trim:
            c = _trim(c)
        c.setflags(write=False)
        self._c = c

    @classmethod
    def monomial(cls, k, coeff=1.0):
        c = np.zeros(k + 1, dtype=complex)
        c[k] = coeff
        return cls(c)

    @classmethod
    def from_roots(cls, roots, lead=1.0):
        p = cls([lead])
        for r in roots:
            p = p * cls([-r, 1.0])
        return p

    @property
    def coeffs(self):
        return self._c

    @property
    def degree(self):
        if self.is_zero():
            return -1
        return len(self._c) - 1

    @property
    def lead(self):
        return self._c[-1]

    def is_zero(self):
        return len(self._c) == 1 and self._c[0] == 0

    def is_constant(self):
        return len(self._c) == 1

    def scale(self):
        return float(np.max(np.abs(self._c)))

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        acc = np.zeros_like(z) + self._c[-1]
        for c in self._c[-2::-1]:
            acc = acc * z + c
        return acc if acc.ndim else complex(acc)

    def __repr__(self):
        return f"CPoly({self._c.tolist()!r})"

    def __len__(self):
        return len(self._c)

    def __eq__(self, other):
        if not isinstance(other, CPoly):
            return NotImplemented
        return len(self._c) == len(other._c) and bool(np.all(self._c == other._c))

    def __hash__(self):
        return hash(self._c.tobytes())

    def allclose(self, other, tol=1e-10):
        """Coefficient-wise comparison relative to the larger scale."""
        n = max(len(self._c), len(other._c))
        a = np.zeros(n, dtype=complex)
        b = np.zeros(n, dtype=complex)
        a[: len(self._c)] = self._c
        b[: len(other._c)] = other._c
        scale = max(1.0, np.max(np.abs(a)), np.max(np.abs(b)))
        return bool(np.max(np.abs(a - b)) <= tol * scale)

    def _coerce(self, other):
        if isinstance(other, CPoly):
            return other
        return CPoly([other])

    def __add__(self, other):
        other = self._coerce(other)
        n = max(len(self._c), len(other._c))
        out = np.zeros(n, dtype=complex)
        out[: len(self._c)] += self._c
        out[: len(other._c)] += other._c
        return CPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return CPoly(-self._c)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, CPoly):
            return CPoly(np.convolve(self._c, other._c))
        return CPoly(self._c * complex(other))

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return CPoly(self._c / complex(scalar))

    def __pow__(self, k):
        out = CPoly([1.0])
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def deriv(self):
        if len(self._c) == 1:
            return CPoly([0.0])
        return CPoly(self._c[1:] * np.arange(1, len(self._c)))

    def conj(self):
        return CPoly(np.conj(self._c))

    def divmod(self, other):
        """Polynomial long division, returns ``(quotient, remainder)``."""
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        num = self._c.astype(complex).copy()
        den = other._c
        dn = len(den) - 1
        if len(num) - 1 < dn:
            return CPoly([0.0]), CPoly(num)
        q = np.zeros(len(num) - dn, dtype=complex)
        for k in range(len(num) - 1, dn - 1, -1):
            coef = num[k] / den[-1]
            q[k - dn] = coef
            num[k - dn : k + 1] -= coef * den
        rem = num[:dn] if dn > 0 else np.zeros(1, dtype=complex)
        return CPoly(q), CPoly(rem, trim=False)

    def deflate(self, root):
        """Synthetic division by ``(z - root)``; the remainder is discarded."""
        c = self._c
        n = len(c) - 1
        q = np.zeros(n, dtype=complex)
        acc = c[-1]
        for k in range(n - 1, -1, -1):
            q[k] = acc
            acc = c[k] + acc * root
        return CPoly(q)

    def taylor_shift(self, z0):
        """Coefficients of ``p(z0 + t)`` in ascending powers of ``t``."""
        c = self._c.astype(complex).copy()
        n = len(c)
        for i in range(n):
            for k in range(n - 2, i - 1, -1):
                c[k] += z0 * c[k + 1]
        return CPoly(c, trim=False)

    def roots(self, tol=1e-10):
        return roots(self, tol)

    def to_json(self):
        return [[float(c.real), float(c.imag)] for c in self._c]

    @classmethod
    def from_json(cls, data):
        return cls([complex(re, im) for re, im in data])


def _trim(c):
    if c.size == 0:
        return np.zeros(1, dtype=complex)
    mags = np.abs(c)
    m = mags.max()
    if m == 0:
        return np.zeros(1, dtype=complex)
    keep = np.nonzero(mags > TRIM_RTOL * m)[0]
    return c[: keep[-1] + 1].copy()


def roots(p, tol=1e-10, maxiter=200):
    """All roots of ``p`` (with multiplicity) by Aberth simultaneous iteration.

    Initial guesses sit on a circle of radius ``1 + max|c_i / c_n|`` with a
    fixed angular offset, so results are deterministic. Exact zero roots are
    split off first.
    """
    if not isinstance(p, CPoly):
        p = CPoly(p)
    if p.degree < 1:
        raise ValueError("constant polynomial has no roots")
    c = p.coeffs
    nzero = 0
    while c[nzero] == 0:
        nzero += 1
    c = c[nzero:]
    n = len(c) - 1
    out = [0j] * nzero
    if n == 0:
        return np.array(out, dtype=complex)
    monic = c / c[-1]
    if n == 1:
        return np.array(out + [-monic[0]], dtype=complex)

    dmonic = monic[1:] * np.arange(1, n + 1)
    radius = 1.0 + np.max(np.abs(monic[:-1]))
    z = radius * np.exp(1j * (2 * np.pi * np.arange(n) / n + 0.4))

    def horner(coef, x):
        acc = np.full_like(x, coef[-1])
        for a in coef[-2::-1]:
            acc = acc * x + a
        return acc

    for _ in range(maxiter):
        pv = horner(monic, z)
        dv = horner(dmonic, z)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(pv == 0, 0, pv / dv)
            diff = z[:, None] - z[None, :]
            np.fill_diagonal(diff, 1.0)
            inv = 1.0 / diff
            np.fill_diagonal(inv, 0.0)
            s = inv.sum(axis=1)
            step = ratio / (1 - ratio * s)
        step = np.where(np.isfinite(step), step, 0)
        z = z - step
        if np.all(np.abs(step) < 1e-14 * np.maximum(1.0, np.abs(z))):
            break
    # one Newton polish; keeps simple roots at full precision
    pv = horner(monic, z)
    dv = horner(dmonic, z)
    with np.errstate(divide="ignore", invalid="ignore"):
        corr = np.where(np.abs(dv) > 0, pv / dv, 0)
    polished = z - corr
    better = np.abs(horner(monic, polished)) < np.abs(pv)
    z = np.where(better & np.isfinite(polished), polished, z)
    return np.concatenate([np.array(out, dtype=complex), z])


class ComplexRationalField:
    """Planar vector field ``dz/dt = num(z) / den(z)``.

    The denominator is normalised to be monic and common roots of ``num`` and
    ``den`` are cancelled on construction.
    """

    __slots__ = ("num", "den", "_poles")

    def __init__(self, num, den=None, reduce=True):
        num = num if isinstance(num, CPoly) else CPoly(num)
        den = CPoly([1.0]) if den is None else (den if isinstance(den, CPoly) else CPoly(den))
        if den.is_zero():
            raise ValueError("denominator is identically zero")
        if reduce:
            num, den = _cancel_common_roots(num, den)
        lead = den.lead
        self.num = num / lead
        self.den = den / lead
        self._poles = None

    @classmethod
    def polynomial(cls, coeffs):
        return cls(CPoly(coeffs))

    def __call__(self, z):
        return self.num(z) / self.den(z)

    def __repr__(self):
        return f"ComplexRationalField(num={self.num.coeffs.tolist()}, den={self.den.coeffs.tolist()})"

    def is_polynomial(self):
        return self.den.degree == 0

    def scalar(self):
        """Plain-Python evaluator for a single complex argument (fast path)."""
        num = [complex(c) for c in self.num.coeffs[::-1]]
        den = [complex(c) for c in self.den.coeffs[::-1]]
        if len(den) == 1:
            inv = 1.0 / den[0]
            num = [c * inv for c in num]

            def f(z):
                acc = 0j
                for c in num:
                    acc = acc * z + c
                return acc

            return f

        def g(z):
            a = 0j
            for c in num:
                a = a * z + c
            b = 0j
            for c in den:
                b = b * z + c
            return a / b

        return g

    def den_scalar(self):
        den = [complex(c) for c in self.den.coeffs[::-1]]

        def d(z):
            b = 0j
            for c in den:
                b = b * z + c
            return b

        return d

    def poles(self):
        if self._poles is None:
            self._poles = roots(self.den) if self.den.degree >= 1 else np.zeros(0, dtype=complex)
        return self._poles

    def deriv(self):
        n, d = self.num, self.den
        return ComplexRationalField(n.deriv() * d - n * d.deriv(), d * d)

    def allclose(self, other, tol=1e-10):
        return self.num.allclose(other.num, tol) and self.den.allclose(other.den, tol)

    def to_json(self):
        return {"num": self.num.to_json(), "den": self.den.to_json()}

    @classmethod
    def from_json(cls, data):
        den = data.get("den")
        return cls(CPoly.from_json(data["num"]), CPoly.from_json(den) if den else None)


def _cancel_common_roots(num, den, tol=1e-8):
    if num.is_zero():
        return CPoly([0.0]), CPoly([1.0])
    while den.degree >= 1 and num.degree >= 1:
        best = None
        nscale = np.abs(num.coeffs)
        for r in roots(den):
            mag = max(1.0, abs(r))
            resid = abs(num(r)) / float(np.sum(nscale * mag ** np.arange(len(nscale))))
            if resid < tol and (best is None or resid < best[0]):
                best = (resid, r)
        if best is None:
            break
        num = num.deflate(best[1])
        den = den.deflate(best[1])
    return num, den


# ---------------------------------------------------------------------------
# bivariate real polynomials


def _is_zero(c):
    return c == 0


class RPoly2:
    """Real polynomial in ``(x, y)`` stored as ``{(i, j): coeff}``.

    Coefficients may be floats, ints or Fractions; no zero entries are kept.
    """

    __slots__ = ("_d",)

    def __init__(self, coeffs=None):
        d = {}
        for key, c in (coeffs or {}).items():
            if not _is_zero(c):
                d[(int(key[0]), int(key[1]))] = c
        self._d = d

    @classmethod
    def const(cls, c):
        return cls({(0, 0): c})

    @classmethod
    def x(cls):
        return cls({(1, 0): 1})

    @classmethod
    def y(cls):
        return cls({(0, 1): 1})

    @classmethod
    def univariate(cls, coeffs):
        """Polynomial in ``x`` alone from ascending coefficients."""
        return cls({(i, 0): c for i, c in enumerate(coeffs)})

    @property
    def coeffs(self):
        return dict(self._d)

    def items(self):
        return self._d.items()

    def __getitem__(self, key):
        return self._d.get(key, 0)

    def is_zero(self):
        return not self._d

    def deg_x(self):
        return max((i for i, _ in self._d), default=-1)

    def deg_y(self):
        return max((j for _, j in self._d), default=-1)

    def total_degree(self):
        return max((i + j for i, j in self._d), default=-1)

    def is_univariate_x(self):
        return all(j == 0 for _, j in self._d)

    def __repr__(self):
        terms = sorted(self._d.items())
        return "RPoly2({" + ", ".join(f"{k}: {v}" for k, v in terms) + "})"

    def __eq__(self, other):
        if not isinstance(other, RPoly2):
            return NotImplemented
        return self._d == other._d

    def __hash__(self):
        return hash(frozenset(self._d.items()))

    def _coerce(self, other):
        return other if isinstance(other, RPoly2) else RPoly2.const(other)

    def __add__(self, other):
        other = self._coerce(other)
        d = dict(self._d)
        for k, c in other._d.items():
            d[k] = d.get(k, 0) + c
        return RPoly2(d)

    __radd__ = __add__

    def __neg__(self):
        return RPoly2({k: -c for k, c in self._d.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, RPoly2):
            return RPoly2({k: c * other for k, c in self._d.items()})
        d = {}
        for (i1, j1), c1 in self._d.items():
            for (i2, j2), c2 in other._d.items():
                k = (i1 + i2, j1 + j2)
                d[k] = d.get(k, 0) + c1 * c2
        return RPoly2(d)

    __rmul__ = __mul__

    def __pow__(self, k):
        out = RPoly2.const(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __call__(self, x, y=0):
        total = 0
        for (i, j), c in self._d.items():
            total = total + c * x**i * y**j
        return total

    def diff_x(self):
        return RPoly2({(i - 1, j): c * i for (i, j), c in self._d.items() if i > 0})

    def diff_y(self):
        return RPoly2({(i, j - 1): c * j for (i, j), c in self._d.items() if j > 0})

    def swap(self):
        """``p(y, x)``."""
        return RPoly2({(j, i): c for (i, j), c in self._d.items()})

    def map_coeffs(self, fn):
        return RPoly2({k: fn(c) for k, c in self._d.items()})

    def y_coeffs(self):
        """Coefficients in ``y`` as univariate polynomials in ``x``.

        Returns a list indexed by the power of ``y``; each entry is an
        ascending coefficient list in ``x``.
        """
        dy = self.deg_y()
        dx = self.deg_x()
        out = [[0] * (dx + 1) for _ in range(dy + 1)]
        for (i, j), c in self._d.items():
            out[j][i] = c
        return out

    def at_x(self, x0):
        """Univariate polynomial in ``y`` (ascending list) with ``x = x0``."""
        return [sum(c * x0**i for i, c in enumerate(row)) for row in self.y_coeffs()]

    def to_univariate(self):
        if not self.is_univariate_x():
            raise ValueError("polynomial depends on y")
        out = [0] * (self.deg_x() + 1)
        for (i, _), c in self._d.items():
            out[i] = c
        return out

    def divmod_x(self, divisor):
        """Division in ``Q[y][x]`` by a divisor whose leading ``x`` coefficient
        is a nonzero constant. Returns ``(quotient, remainder)``."""
        dx = divisor.deg_x()
        lead = divisor.y_coeffs_in_x()[dx]
        if not (lead.is_zero() is False and lead.deg_y() == 0 and lead.deg_x() <= 0):
            raise ValueError("divisor must have a constant leading x coefficient")
        lc = lead[(0, 0)]
        q = RPoly2()
        r = self
        while not r.is_zero() and r.deg_x() >= dx:
            k = r.deg_x()
            top = r.y_coeffs_in_x()[k]
            term = RPoly2({(k - dx, j): _div(c, lc) for (_, j), c in top.items()})
            q = q + term
            r = r - term * divisor
        return q, r

    def y_coeffs_in_x(self):
        """List indexed by power of ``x``; entries are polynomials in ``y``
        (stored with ``i = 0``)."""
        out = [RPoly2() for _ in range(self.deg_x() + 1)]
        acc = [dict() for _ in range(self.deg_x() + 1)]
        for (i, j), c in self._d.items():
            acc[i][(0, j)] = c
        return [RPoly2(a) for a in acc] if acc else out

    def to_json(self):
        return [{"i": i, "j": j, "c": _jsonable(c)} for (i, j), c in sorted(self._d.items())]

    @classmethod
    def from_json(cls, data):
        return cls({(t["i"], t["j"]): _from_jsonable(t["c"]) for t in data})


def _div(a, b):
    if isinstance(a, Rational) and isinstance(b, Rational):
        return Fraction(a) / Fraction(b)
    return a / b


def _jsonable(c):
    if isinstance(c, Fraction):
        return str(c) if c.denominator != 1 else int(c)
    if isinstance(c, int):
        return c
    return float(c)


def _from_jsonable(c):
    if isinstance(c, str):
        return Fraction(c)
    return c


def _exact(p):
    return all(isinstance(c, Rational) for _, c in p.items())


# ---------------------------------------------------------------------------
# exact univariate helpers on ascending integer / Fraction lists


def _ptrim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmul(a, b):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        for j, bj in enumerate(b):
            out[i + j] += ai * bj
    return _ptrim(out)


def _psub(a, b):
    n = max(len(a), len(b))
    out = [(a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0) for i in range(n)]
    return _ptrim(out)


def _pdivexact(a, b):
    """Exact quotient ``a / b`` in Z[x] or Q[x]; raises if not exact."""
    a = list(a)
    if not b:
        raise ZeroDivisionError
    if not a:
        return []
    db = len(b) - 1
    q = [0] * (len(a) - db) if len(a) - 1 >= db else []
    lb = b[-1]
    integral = all(isinstance(c, int) for c in a) and all(isinstance(c, int) for c in b)
    for k in range(len(a) - 1, db - 1, -1):
        if a[k] == 0:
            continue
        if integral:
            coef, rem = divmod(a[k], lb)
            if rem:
                raise ArithmeticError("inexact polynomial division")
        else:
            coef = Fraction(a[k]) / lb
        q[k - db] = coef
        for i in range(db + 1):
            a[k - db + i] -= coef * b[i]
    if any(c != 0 for c in a):
        raise ArithmeticError("inexact polynomial division")
    return _ptrim(q)


def bareiss_det(matrix):
    """Fraction-free determinant of a square matrix of exact polynomials.

    Entries are ascending coefficient lists over Z or Q; all divisions in the
    elimination are exact.
    """
    m = [[_ptrim(list(e)) for e in row] for row in matrix]
    n = len(m)
    sign = 1
    prev = [1]
    for k in range(n - 1):
        if not m[k][k]:
            for r in range(k + 1, n):
                if m[r][k]:
                    m[k], m[r] = m[r], m[k]
                    sign = -sign
                    break
            else:
                return []
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = _psub(_pmul(m[i][j], m[k][k]), _pmul(m[i][k], m[k][j]))
                m[i][j] = _pdivexact(num, prev)
            m[i][k] = []
        prev = m[k][k]
    det = m[n - 1][n - 1]
    return det if sign > 0 else [-c for c in det]


def sylvester_matrix(f_coeffs, g_coeffs):
    """Sylvester matrix of two polynomials given by descending-in-``y`` lists
    of arbitrary coefficient objects, with ``zero`` filling."""
    m = len(f_coeffs) - 1
    n = len(g_coeffs) - 1
    size = m + n
    rows = []
    for i in range(n):
        rows.append([None] * i + list(f_coeffs) + [None] * (size - m - 1 - i))
    for i in range(m):
        rows.append([None] * i + list(g_coeffs) + [None] * (size - n - 1 - i))
    return rows


def _lcm(a, b):
    return a * b // math.gcd(a, b)


def _integerize(p):
    """Scale an exact RPoly2 to integer coefficients; returns (scale, poly)."""
    den = 1
    for _, c in p.items():
        den = _lcm(den, Fraction(c).denominator)
    return den, RPoly2({k: int(Fraction(c) * den) for k, c in p.items()})


def resultant_y(f, g):
    """Resultant of ``f`` and ``g`` with respect to ``y`` as a polynomial in ``x``.

    Exact (Bareiss over Z[x]) when every coefficient is rational, otherwise
    evaluated at roots of unity with LU determinants and interpolated by FFT.
    The Sylvester matrix uses the formal ``y``-degrees of ``f`` and ``g``.
    """
    m, n = f.deg_y(), g.deg_y()
    if m <= 0 and n <= 0:
        raise ValueError("resultant undefined")
    if m < 0 or n < 0:
        return RPoly2()
    if m == 0:
        return f ** n
    if n == 0:
        return g ** m
    if _exact(f) and _exact(g):
        sf, fi = _integerize(f)
        sg, gi = _integerize(g)
        fy = fi.y_coeffs()[::-1]
        gy = gi.y_coeffs()[::-1]
        mat = sylvester_matrix(fy, gy)
        mat = [[[] if e is None else _ptrim(list(e)) for e in row] for row in mat]
        det = bareiss_det(mat)
        scale = Fraction(1, sf**n * sg**m)
        return RPoly2.univariate([Fraction(c) * scale for c in det])
    return _resultant_y_float(f, g)


def _resultant_y_float(f, g):
    m, n = f.deg_y(), g.deg_y()
    bound = n * max(f.deg_x(), 0) + m * max(g.deg_x(), 0)
    npts = bound + 1
    xs = np.exp(2j * np.pi * np.arange(npts) / npts)
    fy = [np.array(row, dtype=float) for row in f.y_coeffs()][::-1]
    gy = [np.array(row, dtype=float) for row in g.y_coeffs()][::-1]
    size = m + n
    vals = np.empty(npts, dtype=complex)
    for k, x0 in enumerate(xs):
        fv = [np.polyval(row[::-1], x0) if row.size else 0 for row in fy]
        gv = [np.polyval(row[::-1], x0) if row.size else 0 for row in gy]
        mat = np.zeros((size, size), dtype=complex)
        for i in range(n):
            mat[i, i : i + m + 1] = fv
        for i in range(m):
            mat[n + i, i : i + n + 1] = gv
        vals[k] = np.linalg.det(mat)
    # vals[k] = sum_j c_j w^{jk}, so the forward transform recovers c_j
    coeffs = np.fft.fft(vals) / npts
    real = coeffs.real
    tol = TRIM_RTOL * max(1.0, float(np.max(np.abs(real))))
    return RPoly2.univariate([c if abs(c) > tol else 0 for c in real])


def extract_factor(p, q, tol=1e-10):
    """Remove the largest power of ``q`` dividing ``p`` (both univariate in x).

    Returns ``(quotient, exact, k)``. With no exact division at all the
    quotient of a single division is returned with ``exact = False``.
    """
    if q.is_zero():
        raise ValueError("divisor is zero")
    pc = p.to_univariate()
    qc = q.to_univariate()
    exact = _exact(p) and _exact(q)
    k = 0
    cur = pc
    while True:
        quot, ok = _try_divide(cur, qc, exact, tol)
        if not ok or len(qc) == 1:
            break
        cur = quot
        k += 1
        if len(cur) < len(qc):
            break
    if k == 0:
        quot, _ = _try_divide(pc, qc, exact, tol)
        return RPoly2.univariate(quot), False, 0
    return RPoly2.univariate(cur), True, k


def _try_divide(a, b, exact, tol):
    a = _ptrim(list(a))
    b = _ptrim(list(b))
    if not a:
        return [], True
    if len(a) < len(b):
        return [], False
    db = len(b) - 1
    q = [0] * (len(a) - db)
    rem = list(a)
    for k in range(len(a) - 1, db - 1, -1):
        coef = _div(rem[k], b[-1]) if exact else rem[k] / b[-1]
        q[k - db] = coef
        for i in range(db + 1):
            rem[k - db + i] = rem[k - db + i] - coef * b[i]
    if exact:
        ok = all(c == 0 for c in rem)
    else:
        scale = max(abs(c) for c in a)
        ok = max((abs(c) for c in rem[:db]), default=0.0) <= tol * scale
    return q, ok
