"""Named systems used by the regression checks, demos and CLI."""

from __future__ import annotations

import math

from .cpoly import CPoly, ComplexRationalField
from .mobius import MobiusMap
from .normalform import normal_form_field
from .system import PiecewiseSystem, SwitchingManifold, transform_system


def _poly(*coeffs):
    return ComplexRationalField(CPoly(list(coeffs)))


def example_line():
    """Upper ``(-1 + i) w``, lower ``i (w - (1 - e^{-pi}) / 2)`` on the real axis.

    Its return map is ``Pi(w) = e^{-pi} (w - 1 + e^{-pi})`` with the stable
    fixed point ``-e^{-pi}``.
    """
    c = (1 - math.exp(-math.pi)) / 2
    return PiecewiseSystem(_poly(0, -1 + 1j), _poly(-1j * c, 1j), SwitchingManifold.real_axis())


def example_circle():
    return transform_system(example_line(), MobiusMap.canonical().inverse())


def algebraic_line():
    """Upper ``i w``, lower ``(3 + 2i/3) + i w - (3/4 - i/6) w^2``.

    The circle ``|w| = 2`` is an unstable algebraic limit cycle with return
    map ``pi(u) = (3u - 4) / (3 - u)``.
    """
    lower = _poly(3 + 2j / 3, 1j, -(0.75 - 1j / 6))
    return PiecewiseSystem(_poly(0, 1j), lower, SwitchingManifold.real_axis())


def algebraic_circle():
    return transform_system(algebraic_line(), MobiusMap.canonical().inverse())


def algebraic_integral(z):
    """``H = (x^2 + y^2 - 4) / (x/3 - 3y/2 + 1)``, conserved by the lower field."""
    x, y = z.real, z.imag
    return (x * x + y * y - 4) / (x / 3 - 1.5 * y + 1)


def fam1_circle(lam=1.0, s=0.0):
    """``(1 - i(lam + s)) + (lam + s + i) z`` outside, ``(1 + i lam) + (-lam + i) z`` inside."""
    return PiecewiseSystem(
        _poly(1 - 1j * (lam + s), lam + s + 1j),
        _poly(1 + 1j * lam, -lam + 1j),
        SwitchingManifold.unit_circle(),
    )


def fam1_line(lam=1.0, s=0.0):
    """Image of :func:`fam1_circle` under the canonical map: a weak focus at 0."""
    return PiecewiseSystem(
        _poly(0, 1j + lam + s, -1 + 1j * (lam + s)),
        _poly(0, 1j - lam, -1 - 1j * lam),
        SwitchingManifold.real_axis(),
    )


def linear_pair(lam_plus, lam_minus, omega_plus=1.0, omega_minus=1.0):
    """``(lam^+ + i omega^+) w`` above and ``(lam^- + i omega^-) w`` below the real axis."""
    return PiecewiseSystem(
        _poly(0, lam_plus + 1j * omega_plus),
        _poly(0, lam_minus + 1j * omega_minus),
        SwitchingManifold.real_axis(),
    )


def monomial(k, c=1.0):
    """``c z^k`` for an integer ``k`` (negative powers become poles)."""
    if k >= 0:
        return ComplexRationalField(CPoly.monomial(k, c))
    return ComplexRationalField(CPoly([c]), CPoly.monomial(-k))


def rigid_systems():
    """Ten unit-circle systems built from normal forms that exclude crossing cycles."""
    circle = SwitchingManifold.unit_circle()
    rest = _poly(1, 0.5, 1)
    pairs = [
        (_poly(0, 2 + 3j), monomial(3)),
        (normal_form_field(2, 1.5), rest),
        (rest, normal_form_field(2, -1.5)),
        (normal_form_field(3, 1.5), _poly(0.3j, 1, -0.2)),
        (_poly(0.5, 1j, 0.25), normal_form_field(3, -1.5)),
        (normal_form_field(2, 2.0), normal_form_field(4, -1.5)),
        (_poly(0, -0.4 + 1j), _poly(1 - 1j, 2, 0.5j)),
        (_poly(1 + 0.5j, -1), _poly(0, 0.7 - 2j)),
        (monomial(2), monomial(3)),
        (monomial(-1), monomial(2)),
    ]
    return [PiecewiseSystem(o, i, circle) for o, i in pairs]


NAMED = {
    "example-line": example_line,
    "example-circle": example_circle,
    "algebraic-line": algebraic_line,
    "algebraic-circle": algebraic_circle,
    "fam1-circle": fam1_circle,
    "fam1-line": fam1_line,
}


def named(name):
    try:
        return NAMED[name]()
    except KeyError:
        raise KeyError(f"unknown fixture {name!r}; known: {', '.join(sorted(NAMED))}") from None
