"""Local normal forms of holomorphic fields and rigidity checks on the unit circle.

A field ``F`` near ``w0`` is regular, a simple zero (``lambda = F'(w0)``), a
zero of order ``n >= 2`` with residue ``gamma = Res(1/F, w0)``, or a pole of
order ``n``. Some normal forms placed on one side of the unit circle rule out
crossing cycles; :func:`rigidity_check` recognises them and emits
certificates, and :func:`falsify_crossing_cycles` searches for cycles
numerically as an empirical cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .cpoly import CPoly, ComplexRationalField

REGULAR = "regular"
SIMPLE_ZERO = "simple-zero"
HIGHER_ZERO = "higher-zero"
POLE = "pole"

VALUATION_TOL = 1e-9
RESIDUE_TOL = 1e-8
SIGN_SAMPLES = 720

NO_CROSSING = "no-crossing-cycles"
INCONCLUSIVE = "inconclusive"


class InconsistencyError(AssertionError):
    pass


@dataclass(frozen=True)
class SingularityClass:
    tag: str
    n: int = 0
    lam: complex = 0j
    gamma: complex = 0j
    residue_contour: complex = 0j

    def __post_init__(self):
        if self.tag == HIGHER_ZERO and self.n < 2:
            raise ValueError("higher zero needs n >= 2")
        if self.tag == POLE and self.n < 1:
            raise ValueError("pole needs n >= 1")

    def to_json(self):
        out = {"tag": self.tag}
        if self.tag == SIMPLE_ZERO:
            out["lambda"] = [self.lam.real, self.lam.imag]
        if self.tag in (HIGHER_ZERO, POLE):
            out["n"] = self.n
        if self.tag == HIGHER_ZERO:
            out["gamma"] = [self.gamma.real, self.gamma.imag]
            g = self.gamma
            out["gamma_reciprocal"] = None if g == 0 else [(1 / g).real, (1 / g).imag]
        return out


def _valuation(p, w0):
    """Order of vanishing of ``p`` at ``w0`` and the shifted coefficients."""
    c = p.taylor_shift(w0).coeffs
    scale = max(float(np.max(np.abs(p.coeffs))), 1e-300) * max(1.0, abs(w0)) ** p.degree
    for k, v in enumerate(c):
        if abs(v) > VALUATION_TOL * scale:
            return k, c
    return len(c), c


def _series_div(a, b, n):
    """First ``n`` Taylor coefficients of ``a / b`` with ``b[0] != 0``."""
    a = list(a) + [0j] * n
    b = list(b) + [0j] * n
    out = []
    for k in range(n):
        s = a[k] - sum(out[j] * b[k - j] for j in range(max(0, k - len(b) + 1), k))
        out.append(s / b[0])
    return out


def residue_laurent(F, w0, n=None):
    """``Res(1/F, w0)`` from the Laurent expansion of ``den / num`` at ``w0``."""
    vn, cn = _valuation(F.num, w0)
    vd, cd = _valuation(F.den, w0)
    order = vn - vd if n is None else n
    if order <= 0:
        return 0j
    # 1/F = t^{-order} * (cd[vd:] / cn[vn:])
    ser = _series_div(cd[vd:], cn[vn:], order)
    return complex(ser[order - 1])


def residue_contour(F, w0, rho=None, m=512, max_halvings=12):
    """``Res(1/F, w0)`` by the trapezoid rule on circles about ``w0``.

    The default radius is half the distance to the other singularities of
    ``1/F`` (or 1 when there are none); an explicit ``rho`` is capped at that
    distance. Large radii keep the rounding of ``F`` near a multiple zero out
    of the sum, and the rule converges geometrically in ``m``. The radius is
    halved until two successive values agree to ``1e-9``.
    """
    # deflate the zero at w0 first: a multiple root splits under rounding
    rest = F.num
    for _ in range(_valuation(F.num, w0)[0]):
        rest = rest.deflate(w0)
    others = list(rest.roots()) if rest.degree > 0 else []
    cap = 0.5 * min(abs(r - w0) for r in others) if others else 1.0
    rho = cap if rho is None else min(rho, cap)
    t = np.exp(2j * np.pi * np.arange(m) / m)
    prev = None
    for _ in range(max_halvings):
        z = w0 + rho * t
        val = complex(np.mean(rho * t / F(z)))
        if prev is not None and abs(val - prev) <= 1e-9 * max(1.0, abs(val)):
            return val
        prev = val
        rho *= 0.5
    return prev


def classify(F, w0=0j):
    """Normal form class of ``F`` at ``w0``."""
    if not isinstance(F, ComplexRationalField):
        F = ComplexRationalField(F)
    if F.num.is_zero():
        raise ValueError("field is identically zero")
    w0 = complex(w0)
    vn, cn = _valuation(F.num, w0)
    vd, _ = _valuation(F.den, w0)
    if vn > 0 and vd > 0:
        raise ValueError("indeterminate; reduce field first")
    order = vn - vd
    if order < 0:
        return SingularityClass(POLE, n=-order)
    if order == 0:
        return SingularityClass(REGULAR)
    if order == 1:
        return SingularityClass(SIMPLE_ZERO, n=1, lam=complex(F.deriv()(w0)))
    g1 = residue_laurent(F, w0)
    g2 = residue_contour(F, w0)
    if abs(g1 - g2) > RESIDUE_TOL * max(1.0, abs(g1)):
        raise ArithmeticError(f"residue mismatch: laurent {g1} vs contour {g2}")
    return SingularityClass(HIGHER_ZERO, n=order, gamma=g1, residue_contour=g2)


def normal_form_field(n, gamma):
    """``F_gamma(z) = z^n / (1 + gamma z^(n-1))``."""
    den = [1.0] + [0.0] * (n - 2) + [gamma]
    return ComplexRationalField(CPoly.monomial(n), CPoly(den), reduce=False)


def radial_velocity(F, theta):
    """``Re(e^{-i theta} F(e^{i theta}))``: the radial speed on the unit circle."""
    z = complex(math.cos(theta), math.sin(theta))
    d = F.den(z)
    if abs(d) <= 1e-12 * max(1.0, float(np.max(np.abs(F.den.coeffs)))):
        raise ValueError("singular point on S¹")
    return float((np.conj(z) * F.num(z) / d).real)


def radial_velocity_closed(n, gamma, theta):
    phi = (n - 1) * theta
    return (math.cos(phi) + gamma) / abs(1 + gamma * complex(math.cos(phi), math.sin(phi))) ** 2


# ---------------------------------------------------------------------------
# recognisers for the exact normal forms at the origin


def _coeff_tol(c):
    return 1e-12 * max(1.0, float(np.max(np.abs(c))))


def _monomial(p):
    """``(k, c)`` when ``p = c z^k``, else ``None``."""
    c = p.coeffs
    nz = [k for k, v in enumerate(c) if abs(v) > _coeff_tol(c)]
    if len(nz) != 1:
        return None
    return nz[0], complex(c[nz[0]])


def as_linear(F):
    """``lambda`` when ``F = lambda z``."""
    num, den = _monomial(F.num), _monomial(F.den)
    if num is None or den is None or den[0] != 0 or num[0] != 1:
        return None
    return num[1] / den[1]


def as_monomial(F):
    """``k`` when ``F = c z^k`` with ``c > 0`` and integer ``k != 1``."""
    num, den = _monomial(F.num), _monomial(F.den)
    if num is None or den is None:
        return None
    k = num[0] - den[0]
    c = num[1] / den[1]
    if k == 1 or abs(c.imag) > _coeff_tol([c]) or c.real <= 0:
        return None
    return k


def as_rational_normal_form(F):
    """``(n, gamma)`` when ``F = z^n / (1 + gamma z^(n-1))`` with ``n >= 2``."""
    num = _monomial(F.num)
    if num is None or num[0] < 2:
        return None
    n = num[0]
    d = F.den.coeffs / num[1]
    if len(d) != n or abs(d[0] - 1) > 1e-12:
        return None
    if any(abs(v) > 1e-12 for v in d[1:-1]):
        return None
    return n, complex(d[-1])


# ---------------------------------------------------------------------------
# rigidity


@dataclass
class Certificate:
    name: str
    side: str
    detail: dict = field(default_factory=dict)

    def to_json(self):
        return {"name": self.name, "side": self.side, "detail": self.detail}


@dataclass
class RigidityResult:
    applicable: bool
    conclusion: str
    certificates: list
    classes: dict
    notes: list = field(default_factory=list)

    def names(self):
        return {c.name for c in self.certificates}

    def to_json(self):
        return {
            "applicable": self.applicable,
            "conclusion": self.conclusion,
            "certificates": [c.to_json() for c in self.certificates],
            "classes": {k: (v.to_json() if v is not None else None) for k, v in self.classes.items()},
            "notes": list(self.notes),
        }


def sign_certificate(F, samples=SIGN_SAMPLES):
    """Radial velocity sign on ``samples`` regular points of the unit circle.

    Returns ``(sign, values)`` with ``sign`` in ``{+1, -1}`` when every
    sampled value has that strict sign, else ``(0, values)``. Sample points
    within ``1e-9`` of a pole are skipped.
    """
    vals = []
    for k in range(samples):
        th = 2 * math.pi * (k + 0.5) / samples
        try:
            vals.append(radial_velocity(F, th))
        except ValueError:
            continue
    vals = np.array(vals)
    if len(vals) and np.all(vals > 0):
        return 1, vals
    if len(vals) and np.all(vals < 0):
        return -1, vals
    return 0, vals


def rigidity_check(sys):
    """Certificates that a piecewise system on the unit circle has no crossing cycles.

    Both fields are classified at the origin. A side equal to ``lambda z``
    gives the ``linear-J`` certificate (first integral ``J``); a positive
    monomial ``z^k`` side gives ``monomial-I`` (first integral ``I_k``),
    which only settles the question when both sides are monomials;
    a side equal to ``z^n / (1 + gamma z^(n-1))`` with real ``|gamma| >= 1``
    gives ``rational-sign`` once the radial velocity keeps its sign at all
    sampled points.
    """
    from .system import INNER, OUTER

    m = sys.manifold
    classes = {OUTER: None, INNER: None}
    if sys.conjugated or m.kind != "circle" or abs(m.center) > 1e-14 or abs(m.radius - 1) > 1e-14:
        return RigidityResult(False, INCONCLUSIVE, [], classes, ["requires a holomorphic system on the unit circle"])
    certs = []
    notes = []
    monomials = {}
    for side in (OUTER, INNER):
        F = sys.field(side)
        try:
            classes[side] = classify(F, 0j)
        except (ValueError, ArithmeticError) as exc:
            notes.append(f"{side}: {exc}")
        lam = as_linear(F)
        if lam is not None:
            certs.append(Certificate("linear-J", side, {"alpha": lam.real, "beta": lam.imag}))
            continue
        k = as_monomial(F)
        if k is not None:
            monomials[side] = k
            certs.append(Certificate("monomial-I", side, {"k": k}))
            continue
        nf = as_rational_normal_form(F)
        if nf is not None:
            n, g = nf
            if abs(g.imag) > 1e-12 or abs(g.real) < 1:
                notes.append(f"{side}: residue hypothesis fails (gamma = {g})")
                continue
            sign, vals = sign_certificate(F)
            if sign != 0:
                certs.append(
                    Certificate("rational-sign", side, {"n": n, "gamma": g.real, "sign": sign, "samples": int(len(vals))})
                )
            else:
                notes.append(f"{side}: radial velocity changes sign")
    if len(monomials) == 2:
        for c in certs:
            if c.name == "monomial-I":
                c.detail["sufficient"] = True
        if _has_continuum(sys):
            notes.append("center: continuum of crossing periodic orbits")
    else:
        for c in certs:
            if c.name == "monomial-I":
                c.detail["sufficient"] = False
    applicable = any(c.detail.get("sufficient", True) for c in certs)
    return RigidityResult(applicable, NO_CROSSING if applicable else INCONCLUSIVE, certs, classes, notes)


def _has_continuum(sys, grid=32):
    from .cycles import find_cycles

    try:
        return bool(find_cycles(sys, (-math.pi, math.pi), grid=grid, tmax=50.0).continuum)
    except ValueError:
        return False


@dataclass
class FalsifyResult:
    found: list
    clean: bool
    continuum: bool
    trials: int
    undefined: int

    def to_json(self):
        return {
            "found": [c.to_json() for c in self.found],
            "clean": self.clean,
            "continuum": self.continuum,
            "trials": self.trials,
            "undefined": self.undefined,
        }


def falsify_crossing_cycles(sys, trials=200, horizon=50.0, seed=0, rigidity=None):
    """Search for crossing cycles from ``trials`` random section coordinates.

    ``clean`` is true when no isolated crossing cycle is found. A cycle on a
    system certified by :func:`rigidity_check` raises
    :class:`InconsistencyError`.
    """
    from .cycles import SectionChart, cycles_on_grid

    rng = np.random.default_rng(seed)
    chart = SectionChart(sys.manifold, 0.0)
    if sys.manifold.kind == "circle":
        us = rng.uniform(-math.pi, math.pi, trials)
    else:
        us = rng.uniform(-10.0, 10.0, trials)
    found = cycles_on_grid(sys, us, chart, tmax=horizon)
    res = FalsifyResult(list(found), not found, bool(found.continuum), int(trials), len(found.skipped))
    if rigidity is None and sys.manifold.kind == "circle":
        rigidity = rigidity_check(sys)
    if rigidity is not None and rigidity.applicable and found:
        raise InconsistencyError("inconsistency: certified rigid system exhibits a numerical cycle")
    return res
