"""Adaptive integration of complex ODEs and Filippov trajectories.

The stepper is the Dormand-Prince 5(4) pair with a proportional-integral
step controller. Between accepted steps the solution is interpolated by the
cubic Hermite polynomial built from the end values and slopes. Boundary
crossings are bracketed on that interpolant and then polished by re-running
the Runge-Kutta step from the left end with the bracketed length, so event
points carry the full accuracy of the integrator.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .cpoly import ComplexRationalField
from .system import (
    CROSSING,
    ESCAPING,
    INNER,
    OUTER,
    SLIDING,
    TANGENCY_MINUS,
    TANGENCY_PLUS,
    classify_boundary_point,
)

DEFAULT_RTOL = 1e-10
DEFAULT_ATOL = 1e-12
POLE_GUARD = 1e-6
EVENT_TOL = 1e-12
MAX_BISECT = 200

# Dormand-Prince 5(4) tableau
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B = _A[6]
_E = (71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40)


class SingularityReached(RuntimeError):
    def __init__(self, t, trajectory=None):
        super().__init__(f"trajectory reached field singularity at t={t:.17g}")
        self.t = t
        self.trajectory = trajectory


class IntegrationStalled(RuntimeError):
    def __init__(self, t, trajectory=None):
        super().__init__(f"integration stalled at t={t:.17g}")
        self.t = t
        self.trajectory = trajectory


@dataclass(frozen=True)
class Event:
    t: float
    z: complex
    kind: str
    before: str
    after: str | None


@dataclass
class Trajectory:
    """Samples ``(t[i], z[i])`` with region segments and boundary events.

    ``segments`` holds ``(start, end, tag)`` index ranges (inclusive ends);
    consecutive segments share their boundary sample. ``status`` is
    ``"completed"`` or the reason integration stopped early.
    """

    t: np.ndarray
    z: np.ndarray
    segments: list = field(default_factory=list)
    events: list = field(default_factory=list)
    status: str = "completed"

    @property
    def final(self):
        return complex(self.z[-1])

    @property
    def duration(self):
        return float(self.t[-1] - self.t[0])

    def segment_samples(self, tag):
        """Concatenated ``(t, z)`` of all segments with the given tag."""
        ts, zs = [], []
        for a, b, g in self.segments:
            if g == tag:
                ts.append(self.t[a : b + 1])
                zs.append(self.z[a : b + 1])
        if not ts:
            return np.zeros(0), np.zeros(0, dtype=complex)
        return np.concatenate(ts), np.concatenate(zs)

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "re", "im", "region"])
        tags = [""] * len(self.t)
        for a, b, g in self.segments:
            for i in range(a, b + 1):
                tags[i] = tags[i] or g
        for t, z, g in zip(self.t, self.z, tags):
            w.writerow([f"{t:.17g}", f"{z.real:.17g}", f"{z.imag:.17g}", g])
        for ev in self.events:
            buf.write(
                f"# event,{ev.t:.17g},{ev.z.real:.17g},{ev.z.imag:.17g},{ev.kind},{ev.before},{ev.after or ''}\n"
            )
        buf.write(f"# status,{self.status}\n")
        return buf.getvalue()


# ---------------------------------------------------------------------------
# stepping core


def _rk_step(f, z, k1, h):
    k = [k1]
    for i in range(1, 7):
        acc = z
        for a, kk in zip(_A[i], k):
            if a:
                acc = acc + h * a * kk
        k.append(f(acc))
    znew = z + h * sum(b * kk for b, kk in zip(_B, k) if b)
    err = h * sum(e * kk for e, kk in zip(_E, k) if e)
    return znew, k[6], err


def _hermite(z0, f0, z1, f1, h, s):
    """Cubic Hermite interpolant at fraction ``s`` of the step."""
    s2 = s * s
    s3 = s2 * s
    h00 = 2 * s3 - 3 * s2 + 1
    h10 = s3 - 2 * s2 + s
    h01 = -2 * s3 + 3 * s2
    h11 = s3 - s2
    return h00 * z0 + h10 * h * f0 + h01 * z1 + h11 * h * f1


def _finite(z):
    return math.isfinite(z.real) and math.isfinite(z.imag)


@dataclass
class _Hit:
    index: int
    t: float
    z: complex


def _locate(f, g, sign, z0, f0, z1, f1, h):
    """Fraction of the step where ``sign * g`` first turns non-positive."""
    lo, hi = 0.0, 1.0
    for _ in range(MAX_BISECT):
        mid = 0.5 * (lo + hi)
        val = sign * g(_hermite(z0, f0, z1, f1, h, mid))
        if val > 0:
            lo = mid
        else:
            hi = mid
        if abs(val) < EVENT_TOL * 1e-2 or hi - lo < 1e-15:
            break
    est = 0.5 * (lo + hi)

    def true_g(s):
        if s <= 0:
            return sign * g(z0)
        return sign * g(_rk_step(f, z0, f0, s * h)[0])

    width = max(hi - lo, 1e-9)
    while True:
        a = max(est - width, 0.0)
        b = min(est + width, 1.0)
        ga = true_g(a) if a > 0 else 1.0
        gb = true_g(b)
        if ga > 0 and gb <= 0:
            if gb == 0:
                return b
            return brentq(true_g, a, b, xtol=1e-16, rtol=1e-15, maxiter=200)
        if a == 0.0 and b == 1.0:
            return est
        width *= 16


def _arc(f, z0, t0, t_end, rtol, atol, events=(), guard=None, max_steps=1_000_000, skip=0.0, h0=None):
    """Integrate one smooth arc until ``t_end`` or the first event.

    ``events`` is a sequence of ``(g, sign)`` pairs; an event fires when
    ``sign * g(z)`` becomes non-positive. Events within ``skip`` time units
    of the start are ignored. Returns ``(ts, zs, hit)``.
    """
    ts = [t0]
    zs = [complex(z0)]
    t, z = t0, complex(z0)
    total = t_end - t0
    if total <= 0:
        return ts, zs, None
    fz = f(z)
    if not _finite(fz):
        raise SingularityReached(t)
    if h0 is None:
        sc = atol + rtol * abs(z)
        d0, d1 = abs(z) / sc, abs(fz) / sc
        h = 1e-6 if (d0 < 1e-5 or d1 < 1e-5) else 0.01 * d0 / d1
        h = min(h, total, 0.1)
    else:
        h = min(h0, total)
    err_old = 1e-4
    rejected = False
    for _ in range(max_steps):
        if t_end - t <= 1e-13 * max(1.0, abs(t)):
            break
        h = min(h, t_end - t)
        if h < 1e-14 * max(1.0, abs(t)):
            raise IntegrationStalled(t)
        try:
            znew, fnew, err = _rk_step(f, z, fz, h)
            ok = _finite(znew) and _finite(fnew) and _finite(err)
        except (ZeroDivisionError, OverflowError):
            ok = False
        if not ok:
            h *= 0.25
            rejected = True
            continue
        sc = atol + rtol * max(abs(z), abs(znew))
        e = abs(err) / sc
        if e > 1.0:
            h *= max(0.2, 0.9 * e ** (-0.2))
            rejected = True
            continue
        # accepted
        e = max(e, 1e-10)
        fac = 0.9 * e ** (-0.14) * err_old**0.08
        fac = min(max(fac, 0.2), 1.0 if rejected else 5.0)
        err_old = e
        rejected = False
        tnew = t + h
        if events and tnew - t0 > skip:
            for idx, (g, sign) in enumerate(events):
                if sign * g(znew) <= 0:
                    s = _locate(f, g, sign, z, fz, znew, fnew, h)
                    if t + s * h - t0 <= skip:
                        continue
                    zev = _rk_step(f, z, fz, s * h)[0] if s < 1 else znew
                    hit = _Hit(idx, t + s * h, zev)
                    ts.append(hit.t)
                    zs.append(hit.z)
                    return ts, zs, hit
        t, z, fz = tnew, znew, fnew
        ts.append(t)
        zs.append(z)
        if guard is not None:
            guard(t, z)
        h *= fac
    else:
        raise IntegrationStalled(t)
    return ts, zs, None


class _Escaped(Exception):
    def __init__(self, t, z):
        self.t, self.z = t, z


def _make_guard(fields, bound=None):
    polesets = []
    dens = []
    for F in fields:
        dens.append((F.den_scalar(), float(np.sum(np.abs(F.den.coeffs)))))
        polesets.append([complex(p) for p in F.poles()])
    poles = [p for ps in polesets for p in ps]

    def guard(t, z):
        for p in poles:
            if abs(z - p) < POLE_GUARD:
                raise SingularityReached(t)
        for d, scale in dens:
            if abs(d(z)) < 1e-12 * scale:
                raise SingularityReached(t)
        if bound is not None and abs(z) > bound:
            raise _Escaped(t, z)

    return guard


def integrate_field(F, z0, tspan, rtol=DEFAULT_RTOL, atol=DEFAULT_ATOL):
    """Integrate ``z' = F(z)`` from ``z0`` for ``tspan`` time units."""
    if not isinstance(F, ComplexRationalField):
        F = ComplexRationalField(F)
    if rtol <= 0 or atol <= 0:
        raise ValueError("tolerances must be positive")
    f = F.scalar()
    guard = _make_guard([F])
    guard(0.0, complex(z0))
    ts, zs, _ = _arc(f, complex(z0), 0.0, float(tspan), rtol, atol, guard=guard)
    return Trajectory(np.array(ts), np.array(zs, dtype=complex), [(0, len(ts) - 1, "field")], [])


# ---------------------------------------------------------------------------
# piecewise integration


class _Fast:
    """Scalar evaluators for both sides of a system (cached per system)."""

    def __init__(self, sys):
        self.sys = sys
        self.m = sys.manifold
        fo, fi = sys.outer.scalar(), sys.inner.scalar()
        if sys.conjugated:
            self.f = {OUTER: lambda z: fo(z).conjugate(), INNER: lambda z: fi(z).conjugate()}
        else:
            self.f = {OUTER: fo, INNER: fi}
        m = self.m
        if m.kind == "circle":
            c, r = complex(m.center), float(m.radius)
            self.g = lambda z: abs(z - c) - r
            self.normal = lambda p: (p - c) / abs(p - c)
            self.chart = lambda s: c + r * complex(math.cos(s.real), math.sin(s.real))
            self.coord = lambda p: math.atan2((p - c).imag, (p - c).real)
            self.tangent = lambda s: 1j * r * complex(math.cos(s.real), math.sin(s.real))
        else:
            p0, d = complex(m.point), complex(m.direction)
            dc = d.conjugate()
            self.g = lambda z: (dc * (z - p0)).imag
            self.normal = lambda p: 1j * d
            self.chart = lambda s: p0 + s.real * d
            self.coord = lambda p: (dc * (p - p0)).real
            self.tangent = lambda s: d

    def sigma(self, side, p):
        return (self.normal(p).conjugate() * self.f[side](p)).real


def _fast(sys):
    cache = getattr(sys, "_fast_cache", None)
    if cache is None:
        cache = _Fast(sys)
        sys._fast_cache = cache
    return cache


@dataclass
class _Builder:
    t: list = field(default_factory=list)
    z: list = field(default_factory=list)
    segments: list = field(default_factory=list)
    events: list = field(default_factory=list)

    def add_segment(self, ts, zs, tag):
        if not self.t:
            self.t.extend(ts)
            self.z.extend(zs)
            self.segments.append((0, len(self.t) - 1, tag))
            return
        start = len(self.t) - 1
        # first sample of the new segment is the shared boundary sample
        self.t.extend(ts[1:])
        self.z.extend(zs[1:])
        self.segments.append((start, len(self.t) - 1, tag))

    def replace_last(self, z):
        self.z[-1] = z

    def build(self, status):
        t = np.array(self.t, dtype=float)
        z = np.array(self.z, dtype=complex)
        return Trajectory(t, z, list(self.segments), list(self.events), status)


def _side_after(sp, sm):
    """Destination side of a crossing point given both normal components."""
    return OUTER if sp > 0 else INNER


def integrate_pwcs(
    sys,
    z0,
    tspan,
    rtol=DEFAULT_RTOL,
    atol=DEFAULT_ATOL,
    bound=None,
    max_events=10_000,
    side=None,
):
    """Filippov trajectory of a piecewise system from ``z0``.

    Crossing points switch the active field; sliding points continue along
    the manifold with the convex-combination field until one of the normal
    components changes sign; escaping points and unresolved tangencies end
    the integration, recorded in ``status``.
    """
    if rtol <= 0 or atol <= 0:
        raise ValueError("tolerances must be positive")
    fast = _fast(sys)
    guard = _make_guard([sys.outer, sys.inner], bound)
    b = _Builder()
    t, z = 0.0, complex(z0)
    T = float(tspan)
    tol_on = EVENT_TOL * 100 * sys.manifold.scale()

    guard(t, z)
    mode = side
    if mode is None:
        if abs(fast.g(z)) <= tol_on:
            z = complex(sys.manifold.project(z))
            mode = _decide(sys, fast, z)
        else:
            mode = OUTER if fast.g(z) > 0 else INNER
    if mode in (ESCAPING, "tangency"):
        b.add_segment([t], [z], mode)
        b.events.append(Event(t, z, _tag_for(sys, z), "start", None))
        return b.build("escaping" if mode == ESCAPING else "tangency")

    skip = 0.0
    status = "completed"
    try:
        for _ in range(max_events):
            if t >= T:
                break
            if mode == SLIDING:
                ts, zs, hit = _slide(sys, fast, z, t, T, rtol, atol, guard)
                b.add_segment(ts, zs, SLIDING)
                t, z = ts[-1], zs[-1]
                if hit is None:
                    break
                new = OUTER if hit.index == 0 else INNER
                b.events.append(Event(t, z, "sliding-exit", SLIDING, new))
                mode = new
                skip = 1e-9
                continue
            sign = 1.0 if mode == OUTER else -1.0
            ts, zs, hit = _arc(
                fast.f[mode], z, t, T, rtol, atol, events=[(fast.g, sign)], guard=guard, skip=skip
            )
            skip = 0.0
            if hit is not None:
                zs[-1] = complex(sys.manifold.project(hit.z))
            b.add_segment(ts, zs, mode)
            t, z = ts[-1], zs[-1]
            if hit is None:
                break
            kind = _tag_for(sys, z)
            nxt = _after(sys, fast, z, kind, mode)
            b.events.append(Event(t, z, kind, mode, nxt if nxt in (OUTER, INNER, SLIDING) else None))
            if nxt == ESCAPING:
                status = "escaping"
                break
            if nxt == "tangency":
                status = "tangency"
                break
            mode = nxt
    except SingularityReached as exc:
        exc.trajectory = b.build("singular") if b.t else None
        raise
    except _Escaped:
        status = "escaped-bound"
    return b.build(status)


def _tag_for(sys, z):
    try:
        return classify_boundary_point(sys, z)
    except ValueError:
        return "singular"


def _decide(sys, fast, z):
    kind = _tag_for(sys, z)
    return _after(sys, fast, z, kind, None)


def _after(sys, fast, z, kind, mode):
    """Next mode at a boundary point of the given class."""
    if kind == CROSSING:
        return _side_after(fast.sigma(OUTER, z), fast.sigma(INNER, z))
    if kind == SLIDING:
        return SLIDING
    if kind == ESCAPING:
        return ESCAPING
    if kind in (TANGENCY_PLUS, TANGENCY_MINUS):
        return _probe(sys, fast, z, mode)
    return "tangency"


def _probe(sys, fast, z, mode):
    """Step slightly past a tangency along the active field and reclassify."""
    src = mode if mode in (OUTER, INNER) else OUTER
    v = fast.f[src](z)
    if abs(v) == 0:
        return "tangency"
    p = complex(sys.manifold.project(z + 1e-8 * v / abs(v)))
    kind = _tag_for(sys, p)
    if kind == CROSSING:
        return _side_after(fast.sigma(OUTER, p), fast.sigma(INNER, p))
    if kind == SLIDING:
        return SLIDING
    # a tangency with both fields leaving the manifold on the same side
    sp, sm = fast.sigma(OUTER, p), fast.sigma(INNER, p)
    if kind == TANGENCY_MINUS and sp > 0:
        return OUTER
    if kind == TANGENCY_PLUS and sm < 0:
        return INNER
    return "tangency"


def _slide(sys, fast, z, t, T, rtol, atol, guard=None):
    """Sliding motion in the manifold coordinate ``s``."""

    def vel(s):
        p = fast.chart(s)
        fp = fast.f[OUTER](p)
        fm = fast.f[INNER](p)
        n = fast.normal(p)
        sp = (n.conjugate() * fp).real
        sm = (n.conjugate() * fm).real
        den = sm - sp
        lam = sm / den if den != 0 else 0.5
        v = lam * fp + (1 - lam) * fm
        tan = fast.tangent(s)
        return complex((tan.conjugate() * v).real / abs(tan) ** 2, 0.0)

    s0 = complex(fast.coord(z), 0.0)
    events = [
        (lambda s: fast.sigma(OUTER, fast.chart(s)), -1.0),
        (lambda s: fast.sigma(INNER, fast.chart(s)), 1.0),
    ]
    sguard = None if guard is None else (lambda t_, s: guard(t_, fast.chart(s)))
    ts, ss, hit = _arc(vel, s0, t, T, rtol, atol, events=events, guard=sguard)
    zs = [complex(fast.chart(s)) for s in ss]
    return ts, zs, hit


# ---------------------------------------------------------------------------
# single-region flight used by return maps


@dataclass(frozen=True)
class BoundaryHit:
    t: float
    z: complex
    kind: str


class NoReturn(RuntimeError):
    pass


def flow_to_boundary(sys, side, z0, tmax=200.0, rtol=DEFAULT_RTOL, atol=DEFAULT_ATOL, bound=1e3):
    """Flow the field of ``side`` from ``z0`` until it meets the manifold again.

    Raises :class:`NoReturn` when the orbit leaves the disk of radius
    ``bound``, runs past ``tmax`` or reaches a singular point.
    """
    fast = _fast(sys)
    F = sys.field(side)
    guard = _make_guard([F], bound)
    sign = 1.0 if side == OUTER else -1.0
    try:
        ts, zs, hit = _arc(fast.f[side], complex(z0), 0.0, tmax, rtol, atol, events=[(fast.g, sign)], guard=guard)
    except _Escaped:
        raise NoReturn("orbit does not return: left the bounding disk") from None
    except SingularityReached:
        raise NoReturn("orbit does not return: reached a singular point") from None
    except IntegrationStalled:
        raise NoReturn("orbit does not return: integration stalled") from None
    if hit is None:
        raise NoReturn("orbit does not return within the time limit")
    p = complex(sys.manifold.project(hit.z))
    return BoundaryHit(hit.t, p, _tag_for(sys, p))


# ---------------------------------------------------------------------------
# first integrals


class FirstIntegral:
    """A scalar function of the state, evaluated along sampled trajectories."""

    def __init__(self, name, fn):
        self.name = name
        self._fn = fn

    def values(self, z):
        return np.asarray(self._fn(np.asarray(z, dtype=complex)), dtype=float)

    def __repr__(self):
        return f"FirstIntegral({self.name})"


def j_integral(alpha, beta):
    """``alpha * theta - beta * ln r`` for ``z' = (alpha + i beta) z``.

    The angle is unwrapped along the samples, so it is a real variable.
    """

    def fn(z):
        theta = np.unwrap(np.angle(z))
        return alpha * theta - beta * np.log(np.abs(z))

    return FirstIntegral(f"J({alpha}, {beta})", fn)


def ik_integral(k):
    """``r^(1-k) sin((1-k) theta) = Im(z^(1-k))`` for ``z' = z^k``."""
    if k == 1:
        raise ValueError("use j_integral for the linear case")

    def fn(z):
        return np.imag(z ** (1 - k))

    return FirstIntegral(f"I_{k}", fn)


def hamiltonian_integral(H):
    """Conserved polynomial ``H(x, y)`` (an :class:`RPoly2`)."""
    items = [(i, j, float(c)) for (i, j), c in H.items()]

    def fn(z):
        x, y = z.real, z.imag
        out = np.zeros_like(x)
        for i, j, c in items:
            out = out + c * x**i * y**j
        return out

    return FirstIntegral("H", fn)


def im_primitive_integral(primitive):
    """``Im(P(z))`` where ``P' = 1/F``, so ``P(z(t)) = t + const``.

    ``primitive`` may be a callable or a :class:`~pwholo.cpoly.CPoly`.
    """
    return FirstIntegral("Im P", lambda z: np.imag(primitive(z)))


def first_integral_drift(F, integral, traj):
    """Largest deviation of ``integral`` from its initial value along ``traj``.

    ``F`` names the field the trajectory was computed with; it is accepted
    for symmetry with the other helpers and not used in the measurement.
    """
    vals = integral.values(traj.z)
    return float(np.max(np.abs(vals - vals[0])))


__all__ = [
    "BoundaryHit",
    "Event",
    "FirstIntegral",
    "IntegrationStalled",
    "NoReturn",
    "SingularityReached",
    "Trajectory",
    "first_integral_drift",
    "flow_to_boundary",
    "hamiltonian_integral",
    "ik_integral",
    "im_primitive_integral",
    "integrate_field",
    "integrate_pwcs",
    "j_integral",
]
