import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pwholo.cpoly import CPoly, ComplexRationalField
from pwholo.fixtures import example_line, algebraic_integral, algebraic_line
from pwholo.flow import (
    FirstIntegral,
    NoReturn,
    SingularityReached,
    first_integral_drift,
    flow_to_boundary,
    hamiltonian_integral,
    ik_integral,
    im_primitive_integral,
    integrate_field,
    integrate_pwcs,
    j_integral,
)
from pwholo.antiholo import AntiholoSide, hamiltonian
from pwholo.system import INNER, OUTER, PiecewiseSystem, SwitchingManifold
from pwholo.verify import fixed_step_order_factors, tolerance_order_factors


def poly(*c):
    return ComplexRationalField(CPoly(list(c)))


@settings(max_examples=30, deadline=None)
@given(st.floats(-1, 1), st.floats(-3, 3), st.floats(0.1, 2))
def test_linear_flow_exact(a, b, T):
    lam = complex(a, b)
    tr = integrate_field(poly(0, lam), 1 + 0.5j, T)
    exact = (1 + 0.5j) * cmath.exp(lam * T)
    assert abs(tr.final - exact) < 1e-8 * max(1.0, abs(exact))
    assert tr.duration == pytest.approx(T)


def test_rejects_bad_tolerance():
    with pytest.raises(ValueError):
        integrate_field(poly(0, 1j), 1.0, 1.0, rtol=0)


def test_singularity_reached():
    # z' = 1 / (1 - z) from 0 hits the pole at t = 1/2
    F = ComplexRationalField(CPoly([1]), CPoly([1, -1]))
    with pytest.raises(SingularityReached) as info:
        integrate_field(F, 0.0, 2.0)
    assert abs(info.value.t - 0.5) < 1e-6


def test_crossing_half_maps():
    s = example_line()
    w0 = 0.5
    tr = integrate_pwcs(s, w0, 7.0)
    first, second = tr.events[0], tr.events[1]
    c = (1 - math.exp(-math.pi)) / 2
    assert first.kind == "crossing" and first.before == OUTER and first.after == INNER
    assert abs(first.t - math.pi) < 1e-8
    assert abs(first.z + math.exp(-math.pi) * w0) < 1e-9
    assert abs(second.z - (2 * c - first.z)) < 1e-9
    assert abs(second.t - 2 * math.pi) < 1e-8


def test_sliding_segment():
    s = PiecewiseSystem(poly(1 - 1j), poly(1 + 1j), SwitchingManifold.real_axis())
    tr = integrate_pwcs(s, 0.3, 1.0)
    assert [g for _, _, g in tr.segments] == ["sliding"]
    assert abs(tr.final - 1.3) < 1e-10
    assert np.all(np.abs(tr.z.imag) < 1e-12)


def test_sliding_exit():
    # the upper field turns upward once Re z > 1, so sliding ends there
    s = PiecewiseSystem(poly(1 - 1j, 1j), poly(1 + 1j), SwitchingManifold.real_axis())
    tr = integrate_pwcs(s, 0.0, 3.0)
    kinds = [e.kind for e in tr.events]
    assert "sliding-exit" in kinds
    ev = tr.events[kinds.index("sliding-exit")]
    assert abs(ev.z - 1.0) < 1e-8 and ev.after == OUTER
    assert tr.final.imag > 0


def test_escaping_status():
    tr = integrate_pwcs(example_line(), 0.1, 5.0)
    assert tr.status == "escaping"
    assert len(tr.t) == 1


def test_flow_to_boundary_and_no_return():
    hit = flow_to_boundary(example_line(), OUTER, 0.5)
    assert abs(hit.t - math.pi) < 1e-8 and hit.kind == "crossing"
    away = PiecewiseSystem(poly(1j), poly(-1j), SwitchingManifold.real_axis())
    with pytest.raises(NoReturn):
        flow_to_boundary(away, OUTER, 0.5j, tmax=5.0)


def test_csv_layout_and_determinism():
    a = integrate_pwcs(example_line(), 0.5, 4.0).to_csv()
    b = integrate_pwcs(example_line(), 0.5, 4.0).to_csv()
    assert a == b
    lines = a.splitlines()
    assert lines[0] == "t,re,im,region"
    assert lines[-1] == "# status,completed"
    assert any(line.startswith("# event,") and ",crossing,outer,inner" in line for line in lines)
    t, re, im, region = lines[1].split(",")
    assert float(t) == 0.0 and float(re) == 0.5 and region == OUTER


def test_segments_share_boundary_sample():
    tr = integrate_pwcs(example_line(), 0.5, 7.0)
    for (a0, b0, _), (a1, _, _) in zip(tr.segments, tr.segments[1:]):
        assert b0 == a1
    _, zo = tr.segment_samples(OUTER)
    _, zi = tr.segment_samples(INNER)
    assert np.all(zo.imag >= -1e-12) and np.all(zi.imag <= 1e-12)


@pytest.mark.parametrize("alpha,beta", [(0.0, 1.0), (-0.3, 2.0), (0.2, -1.5)])
def test_j_integral_drift(alpha, beta):
    F = poly(0, complex(alpha, beta))
    tr = integrate_field(F, 1 + 1j, 6.0)
    assert first_integral_drift(F, j_integral(alpha, beta), tr) < 1e-8


@pytest.mark.parametrize("k", [2, 3, -1])
def test_ik_integral_drift(k):
    F = poly(*([0] * k + [1])) if k >= 0 else ComplexRationalField(CPoly([1]), CPoly([0, 1]))
    tr = integrate_field(F, 0.6 + 0.8j, 0.4)
    assert first_integral_drift(F, ik_integral(k), tr) < 1e-8


def test_ik_rejects_linear():
    with pytest.raises(ValueError):
        ik_integral(1)


def test_im_primitive_drift():
    # F = z^2 has primitive of 1/F equal to -1/z
    F = poly(0, 0, 1)
    tr = integrate_field(F, 0.5 + 1j, 0.5)
    P = lambda z: -1 / z
    assert first_integral_drift(F, im_primitive_integral(P), tr) < 1e-9
    re = np.real(P(tr.z)) - tr.t
    assert np.ptp(re) < 1e-9


def test_hamiltonian_drift_antiholo():
    side = AntiholoSide.quadratic(1 + 0.5j, -0.25j, 0.5)
    H = hamiltonian(side)
    F = side.field()
    z0 = 0.3 + 0.2j
    traj = integrate_pwcs(
        PiecewiseSystem(F, F, SwitchingManifold.real_axis(), conjugated=True), z0, 0.5, side=OUTER
    )
    assert first_integral_drift(F, hamiltonian_integral(H), traj) < 1e-9


def test_algebraic_lower_integral():
    lower = algebraic_line().inner
    tr = integrate_field(lower, 1.0 - 0.5j, 0.8)
    assert first_integral_drift(lower, FirstIntegral("H", algebraic_integral), tr) < 1e-9


def test_fixed_step_fifth_order():
    factors, _ = fixed_step_order_factors()
    assert all(f > 30 for f in factors)
    assert abs(np.log2(factors[-1]) - 5) < 0.2


def test_adaptive_error_proportional_to_tolerance():
    """Halving the tolerance roughly halves the global error."""
    factors, errs = tolerance_order_factors()
    assert all(1.4 < f < 2.6 for f in factors)
    assert errs[-1] < errs[0]
