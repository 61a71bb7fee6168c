"""Return maps, limit cycle search and Lyapunov quantities of piecewise systems."""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .cpoly import ComplexRationalField
from .flow import NoReturn, flow_to_boundary
from .system import CROSSING, INNER, OUTER, PiecewiseSystem, classify_boundary_point

CYCLE_RTOL = 1e-12
CYCLE_ATOL = 1e-14
HYPERBOLIC_TOL = 1e-4
RESIDUAL_TOL = 1e-10
DEDUPE_DIGITS = 6


class SectionChart:
    """Real coordinate on the switching manifold.

    Lines use the signed arc length from the stored base point along the
    direction. Circles use the polar angle in ``(mid - pi, mid + pi]``; the
    chart cut sits opposite ``mid``.
    """

    def __init__(self, manifold, mid=0.0):
        self.manifold = manifold
        self.mid = float(mid)

    def point(self, u):
        m = self.manifold
        if m.kind == "circle":
            return complex(m.center + m.radius * complex(math.cos(u), math.sin(u)))
        return complex(m.point + u * m.direction)

    def coord(self, p):
        m = self.manifold
        if m.kind == "circle":
            a = math.atan2((p - m.center).imag, (p - m.center).real)
            return self.mid + _wrap(a - self.mid)
        return float((np.conj(m.direction) * (p - m.point)).real)

    def __repr__(self):
        return f"SectionChart({self.manifold.kind}, mid={self.mid})"


def _wrap(a):
    """Angle in ``(-pi, pi]``."""
    a = math.fmod(a + math.pi, 2 * math.pi)
    if a <= 0:
        a += 2 * math.pi
    return a - math.pi


def default_chart(sys, interval=None):
    mid = 0.0 if interval is None else 0.5 * (interval[0] + interval[1])
    return SectionChart(sys.manifold, mid)


def _reversed(sys):
    def neg(F):
        return ComplexRationalField(-F.num, F.den, reduce=False)

    return PiecewiseSystem(neg(sys.outer), neg(sys.inner), sys.manifold, sys.conjugated)


def entering_side(sys, p):
    """Side a crossing trajectory enters at ``p``, or ``None`` if not crossing."""
    if classify_boundary_point(sys, p) != CROSSING:
        return None
    n = sys.manifold.normal(p)
    return OUTER if (np.conj(n) * sys.evaluate(OUTER, p)).real > 0 else INNER


@dataclass(frozen=True)
class HalfReturn:
    u: float
    t: float
    z: complex
    kind: str


def half_return_full(sys, side, u, chart=None, rtol=CYCLE_RTOL, atol=CYCLE_ATOL, bound=1e3, tmax=200.0, backward=False):
    chart = chart or default_chart(sys)
    flow_sys = _reversed(sys) if backward else sys
    p = chart.point(u)
    if entering_side(flow_sys, p) != side:
        raise NoReturn(f"start point is not a crossing into the {side} region")
    hit = flow_to_boundary(flow_sys, side, p, tmax=tmax, rtol=rtol, atol=atol, bound=bound)
    return HalfReturn(chart.coord(hit.z), hit.t, hit.z, hit.kind)


def half_return(sys, side, u, chart=None, **kw):
    """Section coordinate of the next manifold hit through region ``side``.

    The landing point may be of any boundary class; the Poincaré map checks
    that it is a crossing before continuing through the other region.
    """
    return half_return_full(sys, side, u, chart, **kw).u


@dataclass(frozen=True)
class PoincareResult:
    u: float
    period: float
    points: tuple
    coords: tuple
    order: tuple


def poincare_full(sys, u, chart=None, rtol=CYCLE_RTOL, atol=CYCLE_ATOL, bound=1e3, tmax=200.0):
    chart = chart or default_chart(sys)
    p = chart.point(u)
    first = entering_side(sys, p)
    if first is None:
        raise NoReturn("section point is not a crossing point")
    second = INNER if first == OUTER else OUTER
    h1 = half_return_full(sys, first, u, chart, rtol, atol, bound, tmax)
    h2 = half_return_full(sys, second, h1.u, chart, rtol, atol, bound, tmax)
    return PoincareResult(h2.u, h1.t + h2.t, (p, h1.z), (u, h1.u), (first, second))


def poincare(sys, u, chart=None, **kw):
    """Composition of the two half-return maps in flow order from ``u``."""
    return poincare_full(sys, u, chart, **kw).u


def displacement(sys, u, chart=None, **kw):
    return poincare(sys, u, chart, **kw) - u


@dataclass
class CycleReport:
    section_points: list
    period: float
    multiplier: float
    stable: bool
    hyperbolic: bool
    residual: float
    boundary_points: list = field(default_factory=list)

    def to_json(self):
        return {
            "section_points": [float(u) for u in self.section_points],
            "period": float(self.period),
            "multiplier": float(self.multiplier),
            "stable": bool(self.stable),
            "hyperbolic": bool(self.hyperbolic),
            "residual": float(self.residual),
            "boundary_points": [[float(z.real), float(z.imag)] for z in self.boundary_points],
        }


class CycleList(list):
    """Found cycles, with search diagnostics.

    ``continuum`` is set when the displacement vanishes on the whole grid (a
    period annulus, so no isolated cycles); ``skipped`` lists grid
    coordinates where the return map is undefined.
    """

    continuum = False
    skipped = ()

    def hyperbolic(self):
        return [c for c in self if c.hyperbolic]


def multiplier(sys, u, chart=None, step=None, **kw):
    """Derivative of the Poincaré map by the 4-point central difference."""
    h = step if step is not None else 1e-6 * max(1.0, abs(u))
    P = lambda x: poincare(sys, x, chart, **kw)
    return (8 * (P(u + h) - P(u - h)) - (P(u + 2 * h) - P(u - 2 * h))) / (12 * h)


def _safe_disp(sys, u, chart, kw):
    try:
        return poincare(sys, u, chart, **kw) - u
    except (NoReturn, ValueError, ArithmeticError):
        return None


def find_cycles(sys, interval, grid=64, chart=None, rtol=CYCLE_RTOL, atol=CYCLE_ATOL, bound=1e3, tmax=200.0):
    """Locate isolated crossing cycles through the section ``interval``.

    The displacement is sampled on a uniform grid, every sign change is
    refined by Brent's method and each root becomes a :class:`CycleReport`.
    Roots that do not reach a residual of ``1e-10`` (jumps of the
    displacement rather than zeros) are discarded.
    """
    a, b = float(interval[0]), float(interval[1])
    if not b > a:
        raise ValueError("empty search interval")
    chart = chart or default_chart(sys, (a, b))
    return cycles_on_grid(sys, np.linspace(a, b, grid), chart, rtol=rtol, atol=atol, bound=bound, tmax=tmax)


def cycles_on_grid(sys, us, chart, rtol=CYCLE_RTOL, atol=CYCLE_ATOL, bound=1e3, tmax=200.0):
    """Cycle search over an arbitrary increasing sequence of section coordinates."""
    kw = dict(rtol=rtol, atol=atol, bound=bound, tmax=tmax)
    us = np.sort(np.asarray(us, dtype=float))
    ds = displacements(sys, us, chart, kw)
    out = CycleList()
    out.skipped = [float(u) for u, d in zip(us, ds) if d is None]
    valid = [(float(u), d) for u, d in zip(us, ds) if d is not None]
    if len(valid) >= 2 and max(abs(d) for _, d in valid) < 1e-9:
        out.continuum = True
        return out

    roots = []
    for (u0, d0), (u1, d1) in zip(valid, valid[1:]):
        if d0 == 0:
            roots.append(u0)
        elif d0 * d1 < 0:
            f = lambda x: _safe_disp(sys, x, chart, kw)
            try:
                r = brentq(lambda x: _nan_guard(f(x)), u0, u1, xtol=1e-14, rtol=1e-15, maxiter=200)
            except (ValueError, RuntimeError):
                continue
            roots.append(r)
    if valid and valid[-1][1] == 0:
        roots.append(valid[-1][0])

    seen = set()
    for r in roots:
        try:
            rep = cycle_report(sys, r, chart, **kw)
        except (NoReturn, ValueError, ArithmeticError):
            continue
        if rep.residual > RESIDUAL_TOL:
            continue
        key = _dedupe_key(rep, sys)
        if key in seen:
            continue
        seen.add(key)
        out.append(rep)
    return out


def worker_count():
    """Worker processes allowed by ``PWHOLO_THREADS`` (default 1: sequential)."""
    try:
        return max(1, int(os.environ.get("PWHOLO_THREADS", "1")))
    except ValueError:
        return 1


def _disp_chunk(args):
    text, mid, us, kw = args
    sys = PiecewiseSystem.loads(text)
    chart = SectionChart(sys.manifold, mid)
    return [_safe_disp(sys, u, chart, kw) for u in us]


def displacements(sys, us, chart, kw, workers=None):
    """Displacement at each coordinate (``None`` where undefined), in order.

    With more than one worker the grid is split into contiguous chunks that
    run in separate processes; results are reassembled in grid order, so the
    output does not depend on the worker count.
    """
    us = [float(u) for u in us]
    workers = worker_count() if workers is None else workers
    if workers <= 1 or len(us) < 2 * workers:
        return [_safe_disp(sys, u, chart, kw) for u in us]
    text = sys.dumps()
    chunks = [us[i::workers] for i in range(workers)]
    with ProcessPoolExecutor(workers) as pool:
        parts = list(pool.map(_disp_chunk, [(text, chart.mid, c, kw) for c in chunks]))
    out = [None] * len(us)
    for i, part in enumerate(parts):
        out[i::workers] = part
    return out


def _nan_guard(d):
    if d is None:
        raise ValueError("return map undefined inside bracket")
    return d


def _dedupe_key(rep, sys):
    # boundary points are chart independent
    pts = sorted((round(z.real, DEDUPE_DIGITS) + 0.0, round(z.imag, DEDUPE_DIGITS) + 0.0) for z in rep.boundary_points)
    return tuple(pts)


def cycle_report(sys, u, chart=None, rtol=CYCLE_RTOL, atol=CYCLE_ATOL, bound=1e3, tmax=200.0):
    chart = chart or default_chart(sys)
    kw = dict(rtol=rtol, atol=atol, bound=bound, tmax=tmax)
    res = poincare_full(sys, u, chart, **kw)
    m = multiplier(sys, u, chart, **kw)
    return CycleReport(
        section_points=[float(c) for c in res.coords],
        period=float(res.period),
        multiplier=float(m),
        stable=bool(abs(m) < 1),
        hyperbolic=bool(abs(m - 1) > HYPERBOLIC_TOL),
        residual=float(abs(res.u - u)),
        boundary_points=[complex(z) for z in res.points],
    )


# ---------------------------------------------------------------------------
# Lyapunov quantities


def v1_closed_form(lam_plus, lam_minus):
    """First Lyapunov quantity ``exp((lam_plus + lam_minus) pi) - 1``."""
    return math.expm1((lam_plus + lam_minus) * math.pi)


@dataclass
class LyapunovEstimate:
    coefficients: list
    radii: list
    values: list
    condition: float

    def __getitem__(self, k):
        return self.coefficients[k - 1]


def displacement_radius(sys, r, origin=0.0, side=-1, chart=None, variant="delta", rtol=CYCLE_RTOL, atol=None, bound=1e3):
    """Radial displacement at distance ``r`` from ``origin`` on the section.

    ``variant="delta"`` follows the flow from ``origin + side * r`` once
    around (first half, then second half) and returns the signed change of
    the distance. ``variant="delta1"`` starts at ``origin - side * r`` and
    compares the forward half return with the backward half return through
    the other region, both landing on the ``side`` half of the section.
    """
    chart = chart or default_chart(sys)
    atol = atol if atol is not None else 1e-14 * max(r, 1e-6)
    kw = dict(rtol=rtol, atol=atol, bound=bound)
    if variant == "delta":
        res = poincare_full(sys, origin + side * r, chart, **kw)
        return side * (res.u - origin) - r
    if variant == "delta1":
        u = origin - side * r
        p = chart.point(u)
        fwd_side = entering_side(sys, p)
        if fwd_side is None:
            raise NoReturn("section point is not a crossing point")
        back_side = INNER if fwd_side == OUTER else OUTER
        fwd = half_return_full(sys, fwd_side, u, chart, **kw)
        bwd = half_return_full(sys, back_side, u, chart, backward=True, **kw)
        return side * (bwd.u - origin) - side * (fwd.u - origin)
    raise ValueError(f"unknown displacement variant {variant!r}")


def lyapunov_numeric(sys, k_max, origin=0.0, side=-1, r0=1e-2, rho=0.8, npts=12, chart=None, variant="delta", **kw):
    """Leading displacement coefficients ``V_1 .. V_k_max`` by least squares.

    ``Delta(r)`` is sampled at ``r0 * rho**j`` and fitted by a polynomial of
    degree ``k_max + 2`` without constant term. Radii where the return map is
    undefined are dropped.
    """
    radii, vals = [], []
    for j in range(npts):
        r = r0 * rho**j
        try:
            vals.append(displacement_radius(sys, r, origin, side, chart, variant, **kw))
            radii.append(r)
        except (NoReturn, ValueError):
            continue
    deg = k_max + 2
    if len(radii) < k_max + 3:
        raise ValueError("insufficient data")
    r = np.array(radii)
    # scale columns so the fit is well conditioned
    V = np.column_stack([(r / r0) ** k for k in range(1, deg + 1)])
    coef, *_ = np.linalg.lstsq(V, np.array(vals), rcond=None)
    coef = coef / r0 ** np.arange(1, deg + 1)
    return LyapunovEstimate(list(coef[:k_max]), radii, vals, float(np.linalg.cond(V)))
