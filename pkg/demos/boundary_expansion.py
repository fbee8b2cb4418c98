#!/usr/bin/env python3
"""Exact formal expansions at infinity for the radial model.

Prints the indicial constants C_alpha, builds a formal outgoing solution
and its residual orders, then constructs an eigenfunction of Delta^2 + V
with a decaying phase and fits how fast the residual shrinks as x = 1/r
goes to zero.

Run:  python demos/boundary_expansion.py
"""

from fractions import Fraction

import numpy as np

from scatxray import boundary as bd

n, k, lam = 4, 2, Fraction(3, 2)
print("C_alpha for n=4, k=2, lambda=3/2:",
      ", ".join(str(bd.to_sympy(bd.c_alpha(n, k, lam, a))) for a in range(8)))

op = bd.RadialOperator(n, k, lam)
print("\nformal outgoing solution with unit lead")
for N in (1, 2, 4, 6):
    u = bd.formal_solution(n, k, lam, 1, N)
    coeffs = ", ".join(str(bd.to_sympy(c)) for c in u.terms.values())
    print(f"  N={N}  residual ~ x^{bd.residual_order(op, u)}   coefficients {coeffs}")

# the Q factorisation holds exactly for any series
rng = np.random.default_rng(0)
s = bd.RadialSeries("outgoing", n, lam, {b: complex(*rng.integers(-3, 4, 2)) for b in range(8)}, 7)
print("\nQ factorisation defect is zero:", all(bd.q_factorization_check(n, kk, lam, s).is_zero() for kk in (1, 2, 3)))

xs = np.geomspace(1e-3, 1e-2, 7)
print("\neigenfunction of Delta^2 + V_N with phase e^{-1/x}")
print(f"{'N':>3} {'order':>7} {'raw slope':>10} {'with V_N':>10}")
for N in range(5):
    e = bd.eigen_potential(n, 1, 1, N)
    raw = np.polyfit(np.log(xs), np.log([e.raw_residual(float(x)) for x in xs]), 1)[0]
    cor = np.polyfit(np.log(xs), np.log([e.relative_residual(float(x)) for x in xs]), 1)[0]
    print(f"{N:3d} {str(e.residual_order):>7} {raw:10.3f} {cor:10.3f}")

try:
    bd.eigen_potential(n, 1, Fraction(1, 10), 2, interval=(0, 5))
except bd.BracketVanishesError as exc:
    print("\nsmall tau on a wide interval:", exc)
