"""Quick invariant suite across all modules, used by ``scatxray check``.

Each check returns a measured defect and the tolerance it must stay under.
Exact checks have tolerance 0 and a defect that is 0 or 1.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import boundary
from .energy import EnergyGrid, separate_fields
from .polynomial import Polynomial
from .reconstruction import bases_for, forward_data, recover_all, synthesize
from .sphere import gauss_legendre, sample_arcs
from .tensors import SymTensorField, aradial_basis, is_aradial, radial_contraction, sym_derivative
from .transport import (
    CurvedODE, Forcing, endpoint_exponent, integrate_curved_transport,
    solve_curved_transport, solve_flat_transport,
)
from .xray import component_form_value, forward_matrix, ftc_kernel_check, shift_ode_check, weighted_xray


@dataclass
class CheckResult:
    name: str
    module: str
    value: float
    tolerance: float
    exact: bool
    seconds: float = 0.0

    def passed(self, scale=1.0):
        tol = self.tolerance if self.exact else self.tolerance * scale
        return bool(self.value <= tol)


def _arc_geometry(seed):
    arcs = sample_arcs(20, 5, seed)
    return max(max(abs(np.linalg.norm(a.omega) - 1), abs(np.linalg.norm(a.v) - 1),
                   abs(a.omega @ a.v)) for a in arcs)


def _aradial_basis(seed):
    basis = aradial_basis(3, 2, 2)
    return float(not all(is_aradial(b) for b in basis) or not basis)


def _shift_ode(seed):
    rng = np.random.default_rng([seed, 10])
    mu = SymTensorField.scalar(Polynomial.variable(0, 3) * Polynomial.variable(2, 3) ** 2)
    worst = 0.0
    for arc in sample_arcs(3, 3, seed):
        for j in (2, 3):
            worst = max(worst, shift_ode_check(mu, arc, j, float(rng.uniform(-1, 1)))[2])
    return worst


def _component_form(seed):
    rule = gauss_legendre()
    basis = aradial_basis(3, 1, 2)
    c = np.random.default_rng([seed, 11]).standard_normal(len(basis))
    mu = sum((b * float(x) for b, x in zip(basis[1:], c[1:])), basis[0] * float(c[0]))
    worst = 0.0
    for arc in sample_arcs(5, 3, seed):
        for r in (1, 2):
            lhs = component_form_value(mu, arc, r, rule)
            rhs = -weighted_xray(mu, arc, r, rule)
            worst = max(worst, abs(lhs - rhs))
    return worst


def _kernel_scalar(seed):
    eta = SymTensorField.scalar(Polynomial.variable(0, 3) * Polynomial.variable(1, 3))
    return max(ftc_kernel_check(eta, arc)[0].__abs__() for arc in sample_arcs(5, 3, seed))


def _contraction(seed):
    # the radial 1-form z . dz contracts to |z|^2, which is 1 on the sphere
    n = 3
    mu = sym_derivative(SymTensorField.scalar(
        sum((Polynomial.variable(i, n) ** 2 for i in range(n)), Polynomial.zero(n)) / 2))
    pts = np.random.default_rng([seed, 12]).standard_normal((10, n))
    pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    return float(np.max(np.abs(radial_contraction(mu).pair(pts, pts) - 1.0)))


def _endpoint(seed):
    mu = SymTensorField.scalar(Polynomial.constant(1.0, 3) + Polynomial.variable(0, 3))
    arc = sample_arcs(1, 3, seed)[0]
    return max(abs(endpoint_exponent(solve_flat_transport(Forcing(r, 1, {0: mu}), arc, 1.0)) + r)
               for r in (1, 2, 3))


def _curved(seed):
    ode = CurvedODE(4, lambda s: 0.3 + 0.2 * np.cos(s))
    exact = solve_curved_transport(ode)
    s = np.linspace(0.1, np.pi - 0.1, 15)
    num = integrate_curved_transport(ode, 0, 0.1, exact(0.1), s)
    return float(np.max(np.abs(num - exact(s))))


def _vandermonde(seed):
    rng = np.random.default_rng([seed, 13])
    worst = 0.0
    for l in range(4):
        c = rng.standard_normal((l + 1, 4))
        grid = EnergyGrid.default(l + 1)
        vals = np.vander(grid.lambdas, l + 1, increasing=True) @ c
        got = separate_fields(vals, grid, l).coefficients
        worst = max(worst, np.linalg.norm(got - c) / np.linalg.norm(c))
    return worst


def _round_trip(seed):
    n, k, l, d_max = 3, 2, 1, 2
    bases = bases_for(n, l, d_max)
    truth = synthesize(seed, n, k, l, [1], d_max, bases)
    arcs = sample_arcs(3 * max(len(b) for b in bases.values()), n, seed)
    data = forward_data(truth, arcs, EnergyGrid.default(l + 1))
    _, report = recover_all(data, n, k, l, d_max, truth=truth, bases=bases)
    return report["max_coeff_error"] if not report["failed_levels"] else np.inf


def _kernel_rank(seed):
    n = 3
    basis = aradial_basis(n, 1, 2)
    x = [Polynomial.variable(i, n) for i in range(n)]
    extra = sym_derivative(SymTensorField.scalar(x[0] * x[1]))
    arcs = sample_arcs(3 * (len(basis) + 1), n, seed)
    sv = np.linalg.svd(forward_matrix(basis + [extra], arcs, 0), compute_uv=False)
    return float(sv[-1] / sv[0])


def _c_zero(seed):
    return float(any(boundary.c_alpha(n, k, Fraction(3, 2), 0) != boundary.ZERO
                     for n in (3, 4, 5) for k in (1, 2, 3)))


def _c_nonzero(seed):
    return float(any(boundary.c_alpha(4, k, Fraction(3, 2), a) == boundary.ZERO
                     for k in (1, 2) for a in range(1, 11)))


def _q_defect(seed):
    rng = np.random.default_rng([seed, 14])
    terms = {b: complex(*rng.integers(-5, 6, 2)) for b in range(7)}
    series = boundary.RadialSeries("outgoing", 4, Fraction(3, 2), terms, 6)
    return float(any(not boundary.q_factorization_check(4, k, Fraction(3, 2), series).is_zero()
                     for k in (1, 2, 3)))


def _eigen_slope(seed):
    xs = np.geomspace(1e-3, 1e-2, 7)
    slopes = []
    for N in range(4):
        e = boundary.eigen_potential(4, 1, 1, N)
        slopes.append(np.polyfit(np.log(xs), np.log([e.raw_residual(float(x)) for x in xs]), 1)[0])
    return float(np.max(np.abs(np.diff(slopes) - 1.0)))


CHECKS = [
    ("arc_orthonormality", "sphere", _arc_geometry, 1e-12, False),
    ("aradial_basis_tangential", "tensor_fields", _aradial_basis, 0.0, True),
    ("radial_contraction", "tensor_fields", _contraction, 1e-12, False),
    ("shift_ode_identity", "xray_transform", _shift_ode, 1e-6, False),
    ("component_form_identity", "xray_transform", _component_form, 1e-8, False),
    ("scalar_even_kernel", "xray_transform", _kernel_scalar, 1e-10, False),
    ("endpoint_exponent", "transport_symbols", _endpoint, 0.05, False),
    ("curved_closed_form", "transport_symbols", _curved, 1e-8, False),
    ("vandermonde_round_trip", "multi_energy", _vandermonde, 1e-9, False),
    ("noiseless_round_trip", "reconstruction", _round_trip, 1e-6, False),
    ("potential_direction_singular", "reconstruction", _kernel_rank, 1e-8, False),
    ("c_zero_vanishes", "boundary_expansion", _c_zero, 0.0, True),
    ("c_alpha_nonzero", "boundary_expansion", _c_nonzero, 0.0, True),
    ("q_factorization", "boundary_expansion", _q_defect, 0.0, True),
    ("eigen_residual_slope", "boundary_expansion", _eigen_slope, 0.1, False),
]


def run_checks(seed=0, names=None):
    out = []
    for name, module, fn, tol, exact in CHECKS:
        if names is not None and name not in names:
            continue
        t0 = time.perf_counter()
        value = float(fn(seed))
        out.append(CheckResult(name, module, value, tol, exact, time.perf_counter() - t0))
    return out
