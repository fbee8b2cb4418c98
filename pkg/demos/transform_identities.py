#!/usr/bin/env python3
"""Walk through the identities behind the weighted great-circle transforms.

1. The shifted transforms I_j(alpha) of a scalar satisfy
   I_j'' + j^2 I_j = j(j-1) I_{j-2}.  For F = cos along a pole arc the
   closed forms are I_2 = -(4/3) sin(alpha) and I_0 = -2 sin(alpha).
2. For an aradial tensor the level-r component integral equals (-1)^l times
   the weighted transform at weight l + r - 1.
3. A symmetrized derivative is invisible to the unweighted transform.

Run:  python demos/transform_identities.py
"""

import numpy as np

from scatxray import (
    GreatCircleArc, Polynomial, SymTensorField, aradial_basis, linear_combination, sample_arcs,
)
from scatxray.xray import component_form_value, ftc_kernel_check, shift_ode_check, shifted_xray, weighted_xray

n = 3
pole = GreatCircleArc(np.array([0.0, 0.0, 1.0]), np.array([1.0, 0.0, 0.0]))
cos_field = SymTensorField.scalar(Polynomial.variable(2, n))

print("shift ODE on F = cos along the pole arc")
print(f"{'alpha':>7} {'I_2':>12} {'-(4/3)sin':>12} {'defect':>10}")
for alpha in np.linspace(-1.2, 1.2, 5):
    i2 = shifted_xray(cos_field, pole, 2, alpha)
    _, _, defect = shift_ode_check(cos_field, pole, 2, alpha)
    print(f"{alpha:7.3f} {i2:12.8f} {-4 / 3 * np.sin(alpha):12.8f} {defect:10.2e}")

# random aradial tensors of each order
rng = np.random.default_rng(0)
arcs = sample_arcs(10, n, 0)
print("\ncomponent form vs weighted transform")
for l in range(4):
    basis = aradial_basis(n, l, 3)
    mu = linear_combination(basis, rng.standard_normal(len(basis)))
    worst = max(abs(component_form_value(mu, a, r) - (-1) ** l * weighted_xray(mu, a, l + r - 1))
                for a in arcs for r in (1, 2))
    print(f"  l={l}  basis size {len(basis):3d}  max defect {worst:.2e}")

# x1*x2 is even, so its boundary terms cancel and the transform of its derivative is zero
eta = SymTensorField.scalar(Polynomial.variable(0, n) * Polynomial.variable(1, n))
print("\nI_0 of the symmetrized derivative of x1*x2")
for a in arcs[:4]:
    integral, boundary, defect = ftc_kernel_check(eta, a)
    print(f"  integral {integral:+.2e}  boundary terms {boundary:+.2e}  defect {defect:.2e}")
