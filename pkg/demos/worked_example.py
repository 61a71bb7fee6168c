"""Crossing limit cycle of the worked example, on the line and on the circle.

Run: python demos/worked_example.py [out.svg]
"""

import math
import sys

from pwholo.cycles import find_cycles, poincare
from pwholo.fixtures import example_circle, example_line
from pwholo.portrait import portrait_svg

E = math.exp(-math.pi)

line = example_line()
for u in (-0.5, -0.2, -0.05):
    print(f"P({u:+.2f}) = {poincare(line, u):+.12f}   affine map gives {E * (u - 1 + E):+.12f}")

rep = find_cycles(line, (-0.5, 0.5), grid=64)[0]
print(f"line:   fixed point {rep.section_points[0]:+.12f} (expected {-E:+.12f}), multiplier {rep.multiplier:.10f}")

circ = find_cycles(example_circle(), (-math.pi, math.pi), grid=64)[0]
print(f"circle: period {circ.period:.10f}, multiplier {circ.multiplier:.10f}, stable {circ.stable}")

svg, _ = portrait_svg(example_circle(), grid=6, tspan=6.0, seed=0)
out = sys.argv[1] if len(sys.argv) > 1 else "worked_example.svg"
with open(out, "w") as fh:
    fh.write(svg)
print(f"portrait written to {out}")
