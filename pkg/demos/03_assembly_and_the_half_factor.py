"""Assembling equations of motion, and why the coordinate level matters.

The single-loop circuit here is a charge-modulated meminductor (memory
inductance L_M(q) = 1 + q^2) against a unit capacitor.  Writing a
Lagrangian directly on the loop charge q fails: the Euler-Lagrange
machinery produces (1/2) L_M'(q) q_dot^2 where the true equation needs
L_M'(q) q_dot^2, an erroneous factor of one half.  One integration level
down, with the integrated charge sigma as coordinate (sigma_dot = q), the
assembled equation is exact and the erroneous term never appears.
"""

import numpy as np

from memlag import (
    Circuit,
    Element,
    ElementKind,
    Modulation,
    ScalarCurve,
    build_loop_system,
    extract_AB,
)
from memlag.lagrangian import naive_path_lagrangian

curve = ScalarCurve.poly((0.0, 1.0, 0.0, 1.0 / 3.0))
circuit = Circuit(name="ml_loop", formulation="loop", n_coords=1, elements=(
    Element(name="ML1", kind=ElementKind.MEMINDUCTOR,
            membership=((1, 1),), curve=curve,
            modulation=Modulation.CHARGE),
    Element(name="C1", kind=ElementKind.CAPACITOR,
            membership=((1, 1),), value=1.0),
))

# The correct route: coordinates are integrated charges.
system = build_loop_system(circuit)
ab = extract_AB(system)
x = np.array([0.7])   # sigma
v = np.array([0.4])   # q = sigma_dot
print("integrated-charge form at sigma=0.7, q=0.4:")
print(f"  inertia A = L_M(q) = {ab.A(x, v)[0, 0]:.6f}  (1 + q^2 = 1.16)")
print(f"  remainder B = sigma/C = {ab.B(x, v)[0]:.6f}")

# The naive route: a Lagrangian written directly on the loop charge.
naive = naive_path_lagrangian(circuit)
q, qd, qdd = 1.0, 1.0, 0.0
r_naive = naive.residual(np.array([q]), np.array([qd]),
                         np.array([qdd]), 0.0)[0]
r_true = (1 + q * q) * qdd + 2 * q * qd * qd + q
print(f"\nat q=1, q_dot=1, q_ddot=0:")
print(f"  naive charge-level residual : {r_naive:.6f}")
print(f"  true equation of motion     : {r_true:.6f}")
print(f"  discrepancy                 : {r_naive - r_true:+.6f}"
      f"  (= -L_M'(q) q_dot^2 / 2 = {-q * qd * qd:+.6f})")

rng = np.random.default_rng(1)
worst = 0.0
for _ in range(1000):
    q, qd, qdd = rng.uniform(-1.5, 1.5, 3)
    rn = naive.residual(np.array([q]), np.array([qd]),
                        np.array([qdd]), 0.0)[0]
    rt = (1 + q * q) * qdd + 2 * q * qd * qd + q
    worst = max(worst, abs((rn - rt) - (-q * qd * qd)))
print(f"\ndiscrepancy equals -L_M'(q) q_dot^2 / 2 at 1000 random points, "
      f"max deviation {worst:.2e}")

print("\nThe missing half cannot be patched inside a charge-level"
      "\nLagrangian: it would need the dissipative content"
      " L_M'(q) q_dot^3 / 6,\nwhich lives outside the Lagrangian"
      " formalism.  The integrated form\nneeds no patch at all.")
