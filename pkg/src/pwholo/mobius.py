"""Möbius maps acting on points, circles/lines and rational vector fields."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cpoly import CPoly, ComplexRationalField


class _Infinity:
    """Point at infinity of the Riemann sphere (a value, not an error)."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INFINITY"

    def __reduce__(self):
        return (_Infinity, ())


INFINITY = _Infinity()


def is_infinity(z):
    return z is INFINITY


class InvalidMobius(ValueError):
    pass


@dataclass(frozen=True)
class Circle:
    center: complex
    radius: float

    def to_json(self):
        c = complex(self.center)
        return {"kind": "circle", "center": [c.real, c.imag], "radius": float(self.radius)}


@dataclass(frozen=True)
class Line:
    """Line ``point + t * direction`` with ``|direction| = 1``."""

    point: complex
    direction: complex

    def to_json(self):
        p, d = complex(self.point), complex(self.direction)
        return {"kind": "line", "point": [p.real, p.imag], "direction": [d.real, d.imag]}


def circle_through(z1, z2, z3, tol=1e-12):
    """Circle (or line, when collinear) through three distinct points."""
    w = (z3 - z1) / (z2 - z1)
    if abs(w.imag) < tol * max(1.0, abs(w)):
        d = z2 - z1
        return Line(complex(z1), complex(d / abs(d)))
    c = z1 + (z2 - z1) * (w - abs(w) ** 2) / (2j * w.imag)
    return Circle(complex(c), float(abs(z1 - c)))


class MobiusMap:
    """``z -> (a z + b) / (c z + d)``, stored unnormalised."""

    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a, b, c, d, tol=1e-14):
        a, b, c, d = complex(a), complex(b), complex(c), complex(d)
        scale = max(abs(a), abs(b), abs(c), abs(d))
        if scale == 0 or abs(a * d - b * c) <= tol * scale * scale:
            raise InvalidMobius("degenerate Möbius map: ad - bc = 0")
        self.a, self.b, self.c, self.d = a, b, c, d

    @classmethod
    def identity(cls):
        return cls(1, 0, 0, 1)

    @classmethod
    def canonical(cls):
        """``(-z + i) / (i z - 1)``: unit circle to the real line, ``i`` to 0."""
        return cls(-1, 1j, 1j, -1)

    @classmethod
    def named(cls, name):
        if name == "canonical":
            return cls.canonical()
        if name == "canonical-inverse":
            return cls.canonical().inverse()
        if name == "identity":
            return cls.identity()
        raise KeyError(f"unknown map name {name!r}")

    @property
    def det(self):
        return self.a * self.d - self.b * self.c

    @property
    def pole(self):
        """Preimage of infinity."""
        if self.c == 0:
            return INFINITY
        return -self.d / self.c

    def matrix(self):
        return np.array([[self.a, self.b], [self.c, self.d]])

    def __repr__(self):
        return f"MobiusMap({self.a!r}, {self.b!r}, {self.c!r}, {self.d!r})"

    def __call__(self, z):
        return self.apply(z)

    def apply(self, z):
        if z is INFINITY:
            return INFINITY if self.c == 0 else self.a / self.c
        den = self.c * z + self.d
        if abs(den) < 1e-14 * (abs(self.a) + abs(self.b) + abs(self.c) + abs(self.d)):
            return INFINITY
        return (self.a * z + self.b) / den

    def apply_array(self, z):
        z = np.asarray(z, dtype=complex)
        return (self.a * z + self.b) / (self.c * z + self.d)

    def derivative(self, z):
        return self.det / (self.c * z + self.d) ** 2

    def compose(self, other):
        """``self ∘ other``."""
        m = self.matrix() @ other.matrix()
        return MobiusMap(*m.ravel())

    def __matmul__(self, other):
        return self.compose(other)

    def inverse(self):
        return MobiusMap(self.d, -self.b, -self.c, self.a)

    def equals(self, other, tol=1e-10):
        """Projective equality, tested on the images of 0, 1 and i."""
        for z in (0.0, 1.0, 1j):
            w1, w2 = self.apply(z), other.apply(z)
            if (w1 is INFINITY) != (w2 is INFINITY):
                return False
            if w1 is not INFINITY and abs(w1 - w2) > tol * max(1.0, abs(w1)):
                return False
        return True

    def pushforward(self, F):
        """Field ``G`` with ``phi`` conjugating ``z' = F(z)`` to ``w' = G(w)``.

        ``G(w) = (c w - a)^2 / (ad - bc) * F((-d w + b) / (c w - a))``.
        """
        if not isinstance(F, ComplexRationalField):
            F = ComplexRationalField(F)
        P = CPoly([self.b, -self.d])
        Q = CPoly([-self.a, self.c])
        num_t = _substitute(F.num, P, Q)
        den_t = _substitute(F.den, P, Q)
        e = 2 + max(F.den.degree, 0) - max(F.num.degree, 0)
        if e >= 0:
            num = num_t * Q**e
            den = den_t * self.det
        else:
            num = num_t
            den = den_t * Q ** (-e) * self.det
        return ComplexRationalField(num, den)

    def image_of_circle(self, center, radius):
        if radius <= 0:
            raise ValueError("radius must be positive")
        center = complex(center)
        pole = self.pole
        on_pole = pole is not INFINITY and abs(abs(pole - center) - radius) < 1e-12 * max(1.0, radius)
        angles = (0.3, 2.4, 4.4)
        if on_pole:
            # rotate sample points away from the pole
            base = np.angle(pole - center)
            angles = tuple(base + a for a in (1.1, 2.6, 4.2))
        pts = [self.apply(center + radius * np.exp(1j * t)) for t in angles]
        shape = circle_through(*pts)
        if on_pole and isinstance(shape, Circle):
            shape = _force_line(pts)
        return shape

    def image_of_line(self, point, direction):
        point, direction = complex(point), complex(direction)
        direction /= abs(direction)
        pole = self.pole
        if pole is INFINITY:
            p0 = self.apply(point)
            p1 = self.apply(point + direction)
            d = p1 - p0
            return Line(p0, d / abs(d))
        # the line passes through the pole iff its image is a line
        dist = abs(((pole - point) * np.conj(direction)).imag)
        if dist < 1e-12 * max(1.0, abs(pole)):
            offs = (pole - point) * np.conj(direction)
            t0 = offs.real
            pts = [self.apply(point + (t0 + s) * direction) for s in (-1.0, 1.0, 2.0)]
            return _force_line(pts)
        pts = [self.apply(point + s * direction) for s in (-1.0, 0.0, 1.0)]
        return circle_through(*pts)

    def image_of(self, shape):
        if isinstance(shape, Circle):
            return self.image_of_circle(shape.center, shape.radius)
        return self.image_of_line(shape.point, shape.direction)

    def to_json(self):
        return {k: [getattr(self, k).real, getattr(self, k).imag] for k in "abcd"}

    @classmethod
    def from_json(cls, data):
        if isinstance(data, str):
            return cls.named(data)
        return cls(*(complex(*data[k]) for k in "abcd"))


def _force_line(pts):
    p0, p1 = pts[0], pts[1]
    d = p1 - p0
    return Line(complex(p0), complex(d / abs(d)))


def _substitute(p, P, Q):
    """``Q^deg(p) * p(P/Q)`` as a polynomial."""
    n = max(p.degree, 0)
    out = CPoly([0.0])
    Ppow = CPoly([1.0])
    Qpows = [CPoly([1.0])]
    for _ in range(n):
        Qpows.append(Qpows[-1] * Q)
    for k, c in enumerate(p.coeffs):
        if c != 0:
            out = out + Ppow * Qpows[n - k] * c
        Ppow = Ppow * P
    return out
