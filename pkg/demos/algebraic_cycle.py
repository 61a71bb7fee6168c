"""Unstable algebraic cycle |w| = 2 and its image circle under the inverse canonical map."""

import numpy as np

from pwholo.cycles import find_cycles, poincare
from pwholo.fixtures import algebraic_line
from pwholo.flow import integrate_pwcs
from pwholo.mobius import MobiusMap
from pwholo.portrait import circle_fit

line = algebraic_line()
for u in (1.0, 1.5, 2.5):
    print(f"P({u}) = {poincare(line, u):.12f}   (3u - 4)/(3 - u) = {(3 * u - 4) / (3 - u):.12f}")

rep = find_cycles(line, (0.5, 2.9), grid=32)[0]
print(f"fixed point {rep.section_points[0]:.12f}, multiplier {rep.multiplier:.8f}, stable {rep.stable}")

traj = integrate_pwcs(line, complex(rep.section_points[0]), rep.period, rtol=1e-12, atol=1e-14)
print(f"max ||w| - 2| along the cycle: {np.max(np.abs(np.abs(traj.z) - 2)):.1e}")

c, r, err = circle_fit(MobiusMap.canonical().inverse().apply_array(traj.z))
print(f"image circle: center {c.real:+.1e}{c.imag:+.12f}i, radius {r:.12f}, fit residual {err:.1e}")
print(f"expected:     center -5i/3, radius 4/3 = {4 / 3:.12f}")
