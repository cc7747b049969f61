"""Constitutive curves, incremental values, and Legendre duality.

A memory element is a strictly increasing curve between two integrated
electrical variables.  Its derivative is the state-dependent incremental
value (memristance, meminductance, memcapacitance), its antiderivative is
the stored state function, and the antiderivative of the inverse curve is
the complementary co-state function.  The two state functions are Legendre
duals: F(x) + F*(y) = x*y on the curve.
"""

import numpy as np

from memlag import Element, ElementKind, Modulation, ScalarCurve
from memlag.constitutive import incremental_value, legendre_residual

# A cubic flux-charge curve phi-hat(q) = q + q^3/3 gives the memristance
# R_M(q) = 1 + q^2: a device whose resistance remembers the charge that
# has passed through it.
curve = ScalarCurve.poly((0.0, 1.0, 0.0, 1.0 / 3.0))
memristor = Element(name="RM1", kind=ElementKind.MEMRISTOR,
                    membership=((1, 1),), curve=curve,
                    modulation=Modulation.CHARGE)

print("memristance R_M(q) = 1 + q^2 sampled from the curve:")
for q in (0.0, 0.5, 1.0, 2.0):
    print(f"  q = {q:4.1f}: R_M = {incremental_value(memristor, q):.6f}")

# A conventional resistor is the degenerate case: constant slope.
resistor = Element(name="R1", kind=ElementKind.RESISTOR,
                   membership=((1, 1),), value=2.0)
print("\nconventional resistor, any state:",
      incremental_value(resistor, 123.0))

# The same machinery accepts tabulated curves.  This one has two slope
# levels, like a binary switching device.
pwl = ScalarCurve.pwl(((-3.0, -4.4), (-1.0, -0.4), (1.0, 0.4), (3.0, 4.4)))
print("\npiecewise-linear device, slopes by region:")
for q in (-2.0, 0.0, 2.0):
    print(f"  q = {q:4.1f}: slope = {pwl.deriv(q):.3f}")

# Legendre duality: stored function + co-stored function = x*y exactly,
# for both smooth and tabulated curves.
print("\nLegendre residual F(x) + F*(y) - x*y:")
for x in (0.3, 1.0, 1.7):
    print(f"  cubic at x = {x}: {legendre_residual(curve, x):+.3e}")
    print(f"  pwl   at x = {x}: {legendre_residual(pwl, x):+.3e}")

# The inverse direction round-trips through the curve.
y = curve.value(1.25)
print(f"\ninverse round trip: curve^-1(curve(1.25)) = {curve.inverse(y):.12f}")

rng = np.random.default_rng(0)
worst = max(abs(legendre_residual(curve, float(x)))
            for x in rng.uniform(-2.0, 2.0, 1000))
print(f"worst duality residual over 1000 random states: {worst:.3e}")
