"""Piecewise holomorphic planar systems.

Fields are complex rational functions on each side of a line or circle.
The package pushes systems through Möbius maps, integrates Filippov
trajectories, finds crossing limit cycles, evaluates averaged functions,
bounds cycles of antiholomorphic pairs and classifies holomorphic
singularities by normal form.
"""

from .cpoly import CPoly, ComplexRationalField, RPoly2, resultant_y, roots
from .mobius import INFINITY, InvalidMobius, MobiusMap
from .system import PiecewiseSystem, SwitchingManifold, classify_boundary_point, sliding_field, transform_system
from .flow import Trajectory, first_integral_drift, integrate_field, integrate_pwcs
from .cycles import CycleReport, find_cycles, lyapunov_numeric, poincare, v1_closed_form
from .averaging import PerturbationSpec, m1_closed, m1_numeric, m2_closed, m2_numeric
from .antiholo import AntiholoSide, alpha_poly, cycle_candidates, hamiltonian, resultant_bound
from .normalform import classify, falsify_crossing_cycles, radial_velocity, rigidity_check

__version__ = "0.1.0"

__all__ = [
    "INFINITY",
    "AntiholoSide",
    "CPoly",
    "ComplexRationalField",
    "CycleReport",
    "InvalidMobius",
    "MobiusMap",
    "PerturbationSpec",
    "PiecewiseSystem",
    "RPoly2",
    "SwitchingManifold",
    "Trajectory",
    "alpha_poly",
    "classify",
    "classify_boundary_point",
    "cycle_candidates",
    "falsify_crossing_cycles",
    "find_cycles",
    "first_integral_drift",
    "hamiltonian",
    "integrate_field",
    "integrate_pwcs",
    "lyapunov_numeric",
    "m1_closed",
    "m1_numeric",
    "m2_closed",
    "m2_numeric",
    "poincare",
    "radial_velocity",
    "resultant_bound",
    "resultant_y",
    "rigidity_check",
    "roots",
    "sliding_field",
    "transform_system",
    "v1_closed_form",
]
