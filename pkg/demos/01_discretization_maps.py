"""Discretization maps and the lifted scheme on the quadrotor-like example.

Run with ``python demos/01_discretization_maps.py``.
"""

import numpy as np

from flatdisc import alpha_map, check_axioms, lift_map
from flatdisc.paper_example import XI0, paper_quad, sample_tube
from flatdisc.scheme import build_generic_stepper, build_lifted_stepper, discretize_linear

quad = paper_quad()
h = 0.05

# %% alpha maps: alpha = 0 gives explicit Euler, 1/2 the midpoint rule
for alpha in (0.0, 0.5, 1.0):
    rep = check_axioms(alpha_map(alpha, 5), sample_tube(200, seed=1))
    print(f"alpha={alpha:.1f}  passed={rep.passed}  tangency={rep.max_tangency_defect:.1e}")

# %% the lifted map pulls the Euler map back through the linearizing chart
lifted_map = lift_map(alpha_map(0.0, 5), quad.phi)
print(check_axioms(lifted_map, sample_tube(200, seed=1)).as_text())

# %% two ways to take the same step
lind = discretize_linear(alpha_map(0.0, 5), quad.linear, h)
print("A_h =\n", lind.a_h)
print("B_h =\n", lind.b_h)
closed_form = build_lifted_stepper(quad.phi, lind)
newton = build_generic_stepper(lifted_map, quad.extended, h)

v = np.array([0.2, -0.1])
a, b = closed_form.step(XI0, v), newton.step(XI0, v)
print("closed form:", a)
print("newton     :", b)
print("difference :", np.max(np.abs(a - b)))
