"""Averaged functions of a (3,2) perturbation and the cycles they predict."""

import numpy as np

from pwholo.averaging import (
    line_system,
    m1_closed,
    m2_closed,
    m2_zero_bound,
    positive_simple_zeros,
    search_m2_zeros,
    spec_with_m1_zeros,
)
from pwholo.cycles import find_cycles

target = [0.4, 0.7, 1.6]
spec = spec_with_m1_zeros(3, 2, target, eps=1e-3, scale=5.0)
print("first order zeros:", np.round(positive_simple_zeros(m1_closed(spec)), 10))
found = find_cycles(line_system(spec, spec.eps), (0.1, 3.0), grid=64)
print("simulated cycles: ", np.round(sorted(c.section_points[0] for c in found), 4))

# second order: first order identically zero, search for many simple zeros
for n in ((1, 1), (2, 1), (3, 2)):
    s, zeros = search_m2_zeros(*n)
    print(f"{n}: M2 zeros found {len(zeros)}, monomial bound {m2_zero_bound(*n)}")

s, zeros = search_m2_zeros(3, 2, target=5)
inside = [z for z in zeros if 0.15 < z < 2.5]
found = find_cycles(line_system(s, 1e-2), (0.15, 2.5), grid=40)
print("M2 zeros in window:", np.round(inside, 3))
print("cycles at eps=1e-2:", np.round(sorted(c.section_points[0] for c in found), 3))
print("M2 coefficients:  ", np.round(m2_closed(s).coeffs, 4))
