"""Resultant structure of antiholomorphic pairs and a pair with confirmed cycles."""

import numpy as np

from pwholo.antiholo import AntiholoSide, ResultantDegenerate, confirm_candidates, engineered_pair, resultant_bound

rng = np.random.default_rng(0)
for degree in (1, 2):
    rows = []
    while len(rows) < 10:
        try:
            rows.append(resultant_bound(AntiholoSide.random(rng, degree), AntiholoSide.random(rng, degree)))
        except ResultantDegenerate:
            continue
    print(
        f"degree {degree}: factor exponent {sorted({r.max_exponent for r in rows})}, "
        f"reduced degree <= {max(r.reduced_degree for r in rows)}, bound {rows[0].bound}"
    )

plus, minus, _ = engineered_pair(np.random.default_rng(1), 1)
for rep, (p0, p1) in confirm_candidates(plus, minus):
    print(f"confirmed cycle through {p0:.6f} and {p1:.6f}, multiplier {rep.multiplier:.6f}")
