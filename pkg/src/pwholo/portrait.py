"""Phase portraits of piecewise systems as standalone SVG."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .cycles import CYCLE_ATOL, CYCLE_RTOL, find_cycles
from .flow import IntegrationStalled, SingularityReached, integrate_pwcs

STYLE = """
.manifold { stroke: #222; stroke-width: 2; fill: none; }
.orbit { stroke: #4a7ab5; stroke-width: 1; fill: none; opacity: 0.75; }
.cycle { stroke: #d0312d; stroke-width: 3; fill: none; }
"""


@dataclass
class Portrait:
    window: tuple
    trajectories: list = field(default_factory=list)
    cycles: list = field(default_factory=list)
    reports: list = field(default_factory=list)
    skipped: int = 0


def default_window(sys):
    m = sys.manifold
    if m.kind == "circle":
        c, r = m.center, 2.0 * m.radius
        return (c.real - r, c.real + r, c.imag - r, c.imag + r)
    p = m.point
    return (p.real - 4, p.real + 4, p.imag - 4, p.imag + 4)


def default_interval(sys):
    if sys.manifold.kind == "circle":
        return (-math.pi, math.pi)
    return (-4.0, 4.0)


def cycle_curve(sys, report):
    """Closed polyline of a crossing cycle: the accepted steps over one period."""
    z0 = report.boundary_points[0]
    traj = integrate_pwcs(sys, z0, report.period, rtol=CYCLE_RTOL, atol=CYCLE_ATOL)
    return np.asarray(traj.z)


def compute_portrait(sys, window=None, grid=12, tspan=10.0, seed=None, interval=None, cycle_grid=64, rtol=1e-8, atol=1e-10):
    """Trajectories from a ``grid x grid`` seed lattice plus detected cycles.

    With ``seed`` the lattice points are jittered reproducibly by up to a
    quarter cell.
    """
    window = window or default_window(sys)
    x0, x1, y0, y1 = window
    pr = Portrait(window)
    if grid > 0:
        xs = x0 + (np.arange(grid) + 0.5) * (x1 - x0) / grid
        ys = y0 + (np.arange(grid) + 0.5) * (y1 - y0) / grid
        seeds = (xs[None, :] + 1j * ys[:, None]).ravel()
        if seed is not None:
            rng = np.random.default_rng(seed)
            cell = complex((x1 - x0) / grid, (y1 - y0) / grid)
            seeds = seeds + 0.25 * (rng.uniform(-1, 1, seeds.size) * cell.real + 1j * rng.uniform(-1, 1, seeds.size) * cell.imag)
        bound = 4 * max(abs(x0), abs(x1), abs(y0), abs(y1), 1.0)
        for z in seeds:
            try:
                traj = integrate_pwcs(sys, z, tspan, rtol=rtol, atol=atol, bound=bound, max_events=2000)
            except (SingularityReached, IntegrationStalled, ValueError, ArithmeticError) as exc:
                part = getattr(exc, "trajectory", None)
                if part is not None and len(part.z) > 1:
                    pr.trajectories.append(np.asarray(part.z))
                else:
                    pr.skipped += 1
                continue
            pr.trajectories.append(np.asarray(traj.z))
    interval = interval or default_interval(sys)
    found = find_cycles(sys, interval, grid=cycle_grid)
    for rep in found:
        try:
            pr.cycles.append(cycle_curve(sys, rep))
            pr.reports.append(rep)
        except (SingularityReached, IntegrationStalled, ValueError, ArithmeticError):
            pr.skipped += 1
    return pr


def _clip_view(zs, window, pad=0.5):
    x0, x1, y0, y1 = window
    w, h = x1 - x0, y1 - y0
    ok = (zs.real > x0 - pad * w) & (zs.real < x1 + pad * w) & (zs.imag > y0 - pad * h) & (zs.imag < y1 + pad * h)
    return zs[ok]


def _thin(zs, limit=400):
    if len(zs) <= limit:
        return zs
    idx = np.unique(np.linspace(0, len(zs) - 1, limit).round().astype(int))
    return zs[idx]


def _path(zs, tf, closed=False):
    pts = [tf(z) for z in _thin(np.asarray(zs))]
    if not pts:
        return ""
    d = "M" + " L".join(f"{x:.3f},{y:.3f}" for x, y in pts)
    return d + (" Z" if closed else "")


def render_svg(sys, pr, size=600):
    x0, x1, y0, y1 = pr.window
    sx = size / (x1 - x0)
    sy = size / (y1 - y0)

    def tf(z):
        return ((z.real - x0) * sx, (y1 - z.imag) * sy)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">',
        f"<!-- window {x0:.17g} {x1:.17g} {y0:.17g} {y1:.17g}; skipped seeds: {pr.skipped} -->",
        f"<style>{STYLE}</style>",
        f'<clipPath id="view"><rect x="0" y="0" width="{size}" height="{size}"/></clipPath>',
        '<g clip-path="url(#view)">',
    ]
    m = sys.manifold
    if m.kind == "circle":
        cx, cy = tf(m.center)
        out.append(f'<ellipse class="manifold" cx="{cx:.3f}" cy="{cy:.3f}" rx="{m.radius * sx:.3f}" ry="{m.radius * sy:.3f}"/>')
    else:
        L = 4 * max(x1 - x0, y1 - y0) + abs(m.point)
        a, b = tf(m.point - L * m.direction), tf(m.point + L * m.direction)
        out.append(f'<line class="manifold" x1="{a[0]:.3f}" y1="{a[1]:.3f}" x2="{b[0]:.3f}" y2="{b[1]:.3f}"/>')
    for zs in pr.trajectories:
        zs = _clip_view(np.asarray(zs), pr.window)
        if len(zs) > 1:
            out.append(f'<path class="orbit" d="{_path(zs, tf)}"/>')
    for zs, rep in zip(pr.cycles, pr.reports):
        label = "stable" if rep.stable else "unstable"
        out.append(
            f'<path class="cycle" data-period="{rep.period:.17g}" data-multiplier="{rep.multiplier:.17g}" '
            f'data-kind="{label}" d="{_path(zs, tf, closed=True)}"/>'
        )
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def portrait_svg(sys, **kw):
    pr = compute_portrait(sys, **kw)
    return render_svg(sys, pr), pr


def circle_fit(zs):
    """Least-squares circle through points: ``(center, radius, max_error)``."""
    zs = np.asarray(zs)
    A = np.column_stack([zs.real, zs.imag, np.ones(len(zs))])
    b = zs.real**2 + zs.imag**2
    (a, c, d), *_ = np.linalg.lstsq(A, b, rcond=None)
    center = complex(a / 2, c / 2)
    radius = math.sqrt(d + abs(center) ** 2)
    err = float(np.max(np.abs(np.abs(zs - center) - radius)))
    return center, radius, err
