"""Piecewise systems on a circle or line and Filippov boundary classification."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .cpoly import ComplexRationalField
from .mobius import INFINITY, Circle, Line, MobiusMap

CROSSING = "crossing"
SLIDING = "sliding"
ESCAPING = "escaping"
TANGENCY_PLUS = "tangency-plus"
TANGENCY_MINUS = "tangency-minus"

OUTER = "outer"
INNER = "inner"


class NotOnManifold(ValueError):
    pass


class SingularOnManifold(ValueError):
    pass


@dataclass(frozen=True)
class SwitchingManifold:
    """A circle or a line; the outer side is where ``signed_distance > 0``.

    For circles that is the exterior. For a line ``point + t * direction`` it
    is the half-plane to the left of ``direction`` (the side of ``i * direction``),
    so the real axis with direction 1 has the upper half-plane as outer side.
    """

    kind: str
    center: complex = 0j
    radius: float = 1.0
    point: complex = 0j
    direction: complex = 1 + 0j

    def __post_init__(self):
        if self.kind == "circle":
            if not self.radius > 0:
                raise ValueError("circle radius must be positive")
        elif self.kind == "line":
            if abs(abs(self.direction) - 1) > 1e-12:
                raise ValueError("line direction must have unit modulus")
        else:
            raise ValueError(f"unknown manifold kind {self.kind!r}")

    @classmethod
    def circle(cls, center=0j, radius=1.0):
        return cls("circle", center=complex(center), radius=float(radius))

    @classmethod
    def line(cls, point=0j, direction=1 + 0j):
        direction = complex(direction)
        direction /= abs(direction)
        point = complex(point)
        # store the foot of the perpendicular from the origin
        point = point - (np.conj(direction) * point).real * direction
        return cls("line", point=complex(point), direction=direction)

    @classmethod
    def unit_circle(cls):
        return cls.circle(0j, 1.0)

    @classmethod
    def real_axis(cls):
        return cls.line(0j, 1 + 0j)

    @classmethod
    def from_shape(cls, shape):
        if isinstance(shape, Circle):
            return cls.circle(shape.center, shape.radius)
        return cls.line(shape.point, shape.direction)

    def shape(self):
        if self.kind == "circle":
            return Circle(self.center, self.radius)
        return Line(self.point, self.direction)

    @property
    def is_circle(self):
        return self.kind == "circle"

    def signed_distance(self, z):
        if self.kind == "circle":
            return np.abs(z - self.center) - self.radius
        return (np.conj(self.direction) * (z - self.point)).imag

    def normal(self, p):
        """Outward unit normal at ``p`` (pointing into the outer region)."""
        if self.kind == "circle":
            d = p - self.center
            return d / abs(d)
        return 1j * self.direction

    def project(self, z):
        """Nearest point of the manifold."""
        if self.kind == "circle":
            d = z - self.center
            return self.center + self.radius * d / abs(d)
        t = (np.conj(self.direction) * (z - self.point)).real
        return self.point + t * self.direction

    def scale(self):
        if self.kind == "circle":
            return max(1.0, abs(self.center) + self.radius)
        return max(1.0, abs(self.point))

    def side(self, z):
        return OUTER if self.signed_distance(z) >= 0 else INNER

    def to_json(self):
        if self.kind == "circle":
            c = complex(self.center)
            return {"kind": "circle", "center": [c.real, c.imag], "radius": float(self.radius)}
        p, d = complex(self.point), complex(self.direction)
        return {"kind": "line", "point": [p.real, p.imag], "direction": [d.real, d.imag]}

    @classmethod
    def from_json(cls, data):
        kind = data["kind"]
        if kind == "circle":
            return cls.circle(complex(*data.get("center", [0, 0])), data.get("radius", 1.0))
        if kind == "line":
            return cls.line(complex(*data.get("point", [0, 0])), complex(*data.get("direction", [1, 0])))
        raise ValueError(f"unknown manifold kind {kind!r}")


class PiecewiseSystem:
    """Two rational fields glued along a switching manifold.

    ``outer`` acts on the closed outer region (``signed_distance >= 0``) and
    ``inner`` on the other side. With ``conjugated=True`` each side is the
    antiholomorphic field ``z' = conj(f(z))``.
    """

    def __init__(self, outer, inner, manifold=None, conjugated=False):
        self.outer = outer if isinstance(outer, ComplexRationalField) else ComplexRationalField(outer)
        self.inner = inner if isinstance(inner, ComplexRationalField) else ComplexRationalField(inner)
        self.manifold = manifold or SwitchingManifold.unit_circle()
        self.conjugated = bool(conjugated)

    def __repr__(self):
        return (
            f"PiecewiseSystem(outer={self.outer!r}, inner={self.inner!r}, "
            f"manifold={self.manifold!r}, conjugated={self.conjugated})"
        )

    def field(self, side):
        return self.outer if side == OUTER else self.inner

    def rhs(self, side):
        F = self.field(side)
        if self.conjugated:
            return lambda z: np.conj(F(z))
        return F

    def evaluate(self, side, z):
        v = self.field(side)(z)
        return np.conj(v) if self.conjugated else v

    def swapped(self):
        """The two fields exchanged across the same manifold."""
        return PiecewiseSystem(self.inner, self.outer, self.manifold, self.conjugated)

    def to_json(self):
        return {
            "manifold": self.manifold.to_json(),
            "outer": self.outer.to_json(),
            "inner": self.inner.to_json(),
            "conjugated": self.conjugated,
        }

    @classmethod
    def from_json(cls, data):
        return cls(
            ComplexRationalField.from_json(data["outer"]),
            ComplexRationalField.from_json(data["inner"]),
            SwitchingManifold.from_json(data["manifold"]),
            data.get("conjugated", False),
        )

    def dumps(self):
        return json.dumps(self.to_json(), indent=2)

    @classmethod
    def loads(cls, text):
        return cls.from_json(json.loads(text))


def normal_components(sys, p):
    """``(sigma_plus, sigma_minus, tau)`` at the boundary point ``p``."""
    m = sys.manifold
    if abs(m.signed_distance(p)) > 1e-10 * m.scale():
        raise NotOnManifold("point not on switching manifold")
    try:
        with np.errstate(divide="ignore", invalid="ignore"):
            fp = sys.evaluate(OUTER, p)
            fm = sys.evaluate(INNER, p)
    except ZeroDivisionError:
        raise SingularOnManifold("field singular on manifold") from None
    if not (np.isfinite(fp) and np.isfinite(fm)):
        raise SingularOnManifold("field singular on manifold")
    n = m.normal(p)
    sp = (np.conj(n) * fp).real
    sm = (np.conj(n) * fm).real
    tau = 1e-10 * max(1.0, abs(fp), abs(fm))
    return sp, sm, tau


def classify_boundary_point(sys, p):
    sp, sm, tau = normal_components(sys, p)
    if abs(sp) <= tau:
        return TANGENCY_PLUS
    if abs(sm) <= tau:
        return TANGENCY_MINUS
    if sp * sm > 0:
        return CROSSING
    if sp < 0 < sm:
        return SLIDING
    return ESCAPING


def sliding_field(sys, p):
    """Filippov convex combination tangent to the manifold at a sliding point."""
    sp, sm, tau = normal_components(sys, p)
    if not (sp < -tau and sm > tau):
        raise ValueError("sliding field undefined here")
    lam = sm / (sm - sp)
    v = lam * sys.evaluate(OUTER, p) + (1 - lam) * sys.evaluate(INNER, p)
    # remove the rounding residue of the normal component
    n = sys.manifold.normal(p)
    return v - (np.conj(n) * v).real * n


def _interior_probes(manifold):
    if manifold.kind == "circle":
        c, r = manifold.center, manifold.radius
        yield c
        for k in range(6):
            yield c + 0.5 * r * np.exp(1j * (0.7 + k))
    else:
        base, d = manifold.point, manifold.direction
        for s in (1.0, 0.5, 2.0, 3.0):
            yield base - 1j * d * s + 0.3 * d * s


def transform_system(sys, m):
    """Push both fields and the manifold forward by the Möbius map ``m``.

    A point known to lie on the inner side is mapped to decide which side of
    the image carries which field: a line image is oriented so the outer
    field stays outer, a circle image swaps the fields when the map turns
    the disk inside out.
    """
    if sys.conjugated:
        raise ValueError("Möbius pushforward is defined for holomorphic sides only")
    if m.b == 0 and m.c == 0 and m.a == m.d:
        # exact identity: skip the rounding of the three-point manifold image
        return PiecewiseSystem(sys.outer, sys.inner, sys.manifold)
    shape = m.image_of(sys.manifold.shape())
    outer = m.pushforward(sys.outer)
    inner = m.pushforward(sys.inner)
    probe_img = None
    for probe in _interior_probes(sys.manifold):
        img = m.apply(probe)
        if img is not INFINITY and abs(img) < 1e8:
            probe_img = img
            break
    if probe_img is None:
        raise ValueError("no finite interior probe")
    if isinstance(shape, Line):
        new = SwitchingManifold.line(shape.point, shape.direction)
        if new.signed_distance(probe_img) > 0:
            new = SwitchingManifold.line(shape.point, -shape.direction)
        return PiecewiseSystem(outer, inner, new)
    new = SwitchingManifold.circle(shape.center, shape.radius)
    if new.signed_distance(probe_img) > 0:
        outer, inner = inner, outer
    return PiecewiseSystem(outer, inner, new)
