import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pwholo.cycles import (
    SectionChart,
    displacement_radius,
    displacements,
    find_cycles,
    lyapunov_numeric,
    poincare,
    v1_closed_form,
)
from pwholo.fixtures import example_circle, example_line, linear_pair, algebraic_line
from pwholo.flow import NoReturn

E = math.exp(-math.pi)


@pytest.mark.parametrize("u", [-0.5, -0.3, -0.01])
def test_example_return_map_affine(u):
    assert abs(poincare(example_line(), u) - E * (u - 1 + E)) < 1e-10


@pytest.mark.parametrize("u", [0.97, 1.5])
def test_example_return_map_right_branch(u):
    # starting to the right of the escaping gap the upper half turn comes first
    assert abs(poincare(example_line(), u) - (1 - E + E * u)) < 1e-10


def test_example_cycle():
    found = find_cycles(example_line(), (-0.5, 0.5), grid=16)
    assert len(found) == 1
    rep = found[0]
    assert abs(rep.section_points[0] + E) < 1e-10
    assert abs(rep.multiplier - E) < 1e-6
    assert rep.stable and rep.hyperbolic
    assert abs(rep.period - 2 * math.pi) < 1e-8
    # the interval between the two crossings of the axis escapes
    assert all(0 < u < 1 - E for u in found.skipped)
    json.dumps(rep.to_json())


def test_example_circle_matches_line():
    line = find_cycles(example_line(), (-0.5, 0.5), grid=16)[0]
    circ = find_cycles(example_circle(), (-math.pi, math.pi), grid=32)
    assert len(circ) == 1
    assert abs(circ[0].period - line.period) < 1e-6
    assert abs(circ[0].multiplier - line.multiplier) < 1e-4


@pytest.mark.parametrize("u", [1.0, 1.5, 2.5, 2.9])
def test_algebraic_return_map(u):
    assert abs(poincare(algebraic_line(), u) - (3 * u - 4) / (3 - u)) < 1e-9


def test_algebraic_unstable_cycle():
    found = find_cycles(algebraic_line(), (0.5, 2.9), grid=32)
    assert len(found) == 1
    assert abs(found[0].section_points[0] - 2) < 1e-9
    assert abs(found[0].multiplier - 5) < 1e-4
    assert not found[0].stable


def test_empty_interval():
    with pytest.raises(ValueError):
        find_cycles(example_line(), (0.3, 0.3))


def test_center_reports_continuum():
    found = find_cycles(linear_pair(0.2, -0.2), (-2, -0.1), grid=8)
    assert found.continuum and len(found) == 0


def test_focus_has_no_cycle():
    found = find_cycles(linear_pair(0.2, 0.1), (-2, -0.1), grid=8)
    assert not found.continuum and len(found) == 0


def test_non_crossing_start():
    with pytest.raises(NoReturn):
        poincare(example_line(), 0.2)


@settings(max_examples=40, deadline=None)
@given(st.floats(-math.pi, math.pi), st.floats(-3, 3))
def test_circle_chart_roundtrip(mid, du):
    chart = SectionChart(example_circle().manifold, mid)
    u = mid + du
    assert abs(chart.coord(chart.point(u)) - u) < 1e-12


@settings(max_examples=40, deadline=None)
@given(st.floats(-5, 5))
def test_line_chart_roundtrip(u):
    chart = SectionChart(example_line().manifold)
    assert abs(chart.coord(chart.point(u)) - u) < 1e-12


@pytest.mark.parametrize("lp,lm", [(0.1, 0.2), (-0.3, 0.05), (0.25, -0.4)])
def test_v1_matches_numeric(lp, lm):
    est = lyapunov_numeric(linear_pair(lp, lm), 1)
    assert abs(est[1] - v1_closed_form(lp, lm)) < 1e-5


def test_linear_displacement_exactly_linear():
    sys = linear_pair(0.1, 0.2)
    for r in (0.01, 0.5, 2.0):
        assert abs(displacement_radius(sys, r) - v1_closed_form(0.1, 0.2) * r) < 1e-9 * max(1, r)


def test_delta_variants_exact():
    lp, lm, r = 0.1, 0.2, 0.3
    sys = linear_pair(lp, lm)
    d = displacement_radius(sys, r, variant="delta")
    d1 = displacement_radius(sys, r, variant="delta1")
    assert abs(d - r * math.expm1((lp + lm) * math.pi)) < 1e-10
    # backward half return through the lower side minus forward through the upper
    assert abs(d1 - r * (math.exp(-lm * math.pi) - math.exp(lp * math.pi))) < 1e-10
    with pytest.raises(ValueError):
        displacement_radius(sys, 0.3, variant="nope")


def test_parallel_displacements_identical():
    sys = example_line()
    chart = SectionChart(sys.manifold)
    us = np.linspace(-0.5, -0.05, 9)
    kw = dict(rtol=1e-12, atol=1e-14, bound=1e3, tmax=200.0)
    assert displacements(sys, us, chart, kw, workers=1) == displacements(sys, us, chart, kw, workers=3)
