import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from scatxray.polynomial import Polynomial
from scatxray.sphere import GreatCircleArc, sample_arcs
from scatxray.tensors import SymTensorField, aradial_basis, linear_combination, multiply_poly, rotation_field
from scatxray.xray import (
    NotAradialError, TransformSample, component_form_value, forward_matrix, ftc_kernel_check,
    read_samples_csv, shift_ode_check, shifted_xray, transform_samples, weighted_xray,
    write_samples_csv,
)

from conftest import random_poly, random_tensor

N = 3
POLE_ARC = GreatCircleArc(np.array([0.0, 0.0, 1.0]), np.array([1.0, 0.0, 0.0]))


def var(i, n=N):
    return Polynomial.variable(i, n)


def test_symbolic_oracle_for_shifted_cosine():
    s, a = sp.symbols("s alpha", real=True)
    i2 = sp.integrate(sp.cos(s + a) * sp.sin(s) ** 2, (s, 0, sp.pi))
    i0 = sp.integrate(sp.cos(s + a), (s, 0, sp.pi))
    assert sp.simplify(i2 + sp.Rational(4, 3) * sp.sin(a)) == 0
    assert sp.simplify(i0 + 2 * sp.sin(a)) == 0
    # the shift identity holds symbolically for j = 2
    assert sp.simplify(sp.diff(i2, a, 2) + 4 * i2 - 2 * i0) == 0


def test_shifted_cosine_values():
    mu = SymTensorField.scalar(var(2))     # F(t) = cos t along the pole arc
    for alpha in (-0.4, 0.3, 1.2):
        assert abs(shifted_xray(mu, POLE_ARC, 2, alpha) + 4 / 3 * np.sin(alpha)) < 1e-10
        assert abs(shifted_xray(mu, POLE_ARC, 0, alpha) + 2 * np.sin(alpha)) < 1e-10
        lhs, rhs, defect = shift_ode_check(mu, POLE_ARC, 2, alpha)
        assert abs(rhs + 4 * np.sin(alpha)) < 1e-10 and defect < 1e-6


def test_weighted_xray_examples():
    assert weighted_xray(SymTensorField.zero(N, 2), POLE_ARC, 3) == 0
    c = SymTensorField.scalar(Polynomial.constant(2.5, N))
    assert abs(weighted_xray(c, POLE_ARC, 0) - 2.5 * np.pi) < 1e-12
    assert abs(weighted_xray(SymTensorField.scalar(var(2)), POLE_ARC, 0)) < 1e-12


def test_weighted_xray_symbolic_tensor_case():
    # mu = z_3 dz_1^2 along the pole arc: <mu, gamma'^2> = cos s * cos^2 s
    mu = SymTensorField(N, 2, {(2, 0, 0): var(2)})
    s = sp.Symbol("s")
    exact = sp.integrate(sp.cos(s) ** 3 * sp.sin(s) ** 2, (s, 0, sp.pi))
    assert abs(weighted_xray(mu, POLE_ARC, 2) - float(exact)) < 1e-12
    mu = SymTensorField(N, 2, {(2, 0, 0): var(0) ** 2})
    exact = sp.integrate(sp.sin(s) ** 2 * sp.cos(s) ** 2 * sp.sin(s) ** 3, (s, 0, sp.pi))
    assert abs(weighted_xray(mu, POLE_ARC, 3) - float(exact)) < 1e-12


def test_shifted_alpha_zero_and_periodicity(rng):
    mu = random_tensor(rng, N, 2, 2)
    arc = sample_arcs(1, N, 4)[0]
    base = weighted_xray(mu, arc, 3)
    assert shifted_xray(mu, arc, 3, 0.0) == base
    assert abs(shifted_xray(mu, arc, 3, 2 * np.pi) - base) < 1e-11


def test_shift_ode_zero_and_random_cubic(rng):
    assert shift_ode_check(SymTensorField.zero(N, 0), POLE_ARC, 2, 0.5)[2] == 0
    mu = SymTensorField.scalar(random_poly(rng, N, 3))
    arc = sample_arcs(1, N, 11)[0]
    assert shift_ode_check(mu, arc, 3, 0.3, h=1e-4)[2] < 1e-6
    with pytest.raises(ValueError):
        shift_ode_check(mu, arc, 1, 0.3)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10**6), st.integers(0, 2), st.integers(2, 5), st.floats(-1.5, 1.5))
def test_shift_ode_randomized(seed, l, j, alpha):
    rng = np.random.default_rng(seed)
    mu = random_tensor(rng, N, l, 2)
    arc = sample_arcs(1, N, seed)[0]
    lhs, rhs, defect = shift_ode_check(mu, arc, j, alpha)
    assert defect < 1e-6 * max(1.0, abs(rhs))


def test_component_form_plane_example():
    n = 2
    mu = SymTensorField(n, 1, {(0, 1): Polynomial.variable(0, n), (1, 0): -Polynomial.variable(1, n)})
    arc = GreatCircleArc(np.array([0.0, 1.0]), np.array([1.0, 0.0]))   # gamma = (sin s, cos s)
    s = np.linspace(0.1, 3.0, 7)
    pts = np.stack([np.sin(s), np.cos(s)], axis=-1)
    a10 = mu.component((1, 0))(pts)
    a01 = mu.component((0, 1))(pts)
    assert np.allclose(a01, np.sin(s))
    assert np.allclose(a10, -np.cos(s) / np.sin(s) * a01)
    for r in (1, 2, 3):
        lhs = component_form_value(mu, arc, r)
        assert abs(lhs - (-1) * weighted_xray(mu, arc, r)) < 1e-12


def test_component_form_scalar_and_zero():
    mu = SymTensorField.scalar(var(0) * var(2) + 1)
    arc = sample_arcs(1, N, 2)[0]
    assert abs(component_form_value(mu, arc, 2) - weighted_xray(mu, arc, 1)) < 1e-12
    assert component_form_value(SymTensorField.zero(N, 2), arc, 1) == 0


def test_component_form_rejects_non_aradial():
    with pytest.raises(NotAradialError):
        component_form_value(SymTensorField(N, 1, {(1, 0, 0): 1}), POLE_ARC, 1)
    with pytest.raises(ValueError):
        component_form_value(rotation_field(0, 1, N), POLE_ARC, 0)


@pytest.mark.parametrize("l", [1, 2, 3])
def test_component_form_identity_random(l, rng):
    basis = aradial_basis(N, l, 3)
    mu = linear_combination(basis, rng.standard_normal(len(basis)).tolist())
    for arc in sample_arcs(5, N, l):
        for r in (1, 2):
            lhs = component_form_value(mu, arc, r)
            rhs = (-1) ** l * weighted_xray(mu, arc, l + r - 1)
            assert abs(lhs - rhs) < 1e-8


def test_ftc_scalar_exact_and_even_cancels(rng):
    eta = SymTensorField.scalar(random_poly(rng, N, 3))
    arc = sample_arcs(1, N, 6)[0]
    integral, boundary, defect = ftc_kernel_check(eta, arc)
    assert abs(boundary - (eta.pair(-arc.omega, arc.v) - eta.pair(arc.omega, arc.v))) < 1e-14
    assert defect < 1e-10
    even = SymTensorField.scalar(var(0) * var(1) + var(2) ** 2)
    integral, boundary, defect = ftc_kernel_check(even, arc)
    assert abs(integral) < 1e-12 and abs(boundary) < 1e-14
    assert ftc_kernel_check(SymTensorField.zero(N, 1), arc) == (0, 0, 0)


def test_ftc_aradial_even_potential_vanishes():
    # eta = z_3^2 * (z_1 dz_2 - z_2 dz_1): aradial, even, not Killing
    eta = multiply_poly(var(2) ** 2, rotation_field(0, 1, N))
    for arc in sample_arcs(5, N, 8):
        integral, boundary, defect = ftc_kernel_check(eta, arc)
        assert defect < 1e-10 and abs(integral) < 1e-10


def test_forward_matrix_examples(rng):
    arcs = sample_arcs(6, N, 1)
    mat = forward_matrix([SymTensorField.zero(N, 1), rotation_field(0, 1, N)], arcs, 1)
    assert np.all(mat[:, 0] == 0)
    one = forward_matrix([SymTensorField.scalar(Polynomial.constant(1, N))], arcs[:1], 0)
    assert abs(one[0, 0] - np.pi) < 1e-12
    basis = aradial_basis(N, 1, 2)
    mat = forward_matrix(basis, arcs, 2)
    for m, b in enumerate(basis):
        col = [weighted_xray(b, a, 2) for a in arcs]
        assert np.allclose(mat[:, m], col, atol=1e-14)
    with pytest.raises(ValueError):
        forward_matrix([basis[0], SymTensorField.zero(N, 2)], arcs, 1)


def test_linearity(rng):
    m1, m2 = random_tensor(rng, N, 2, 2), random_tensor(rng, N, 2, 2)
    arc = sample_arcs(1, N, 3)[0]
    a, b = 0.7, -1.9
    lhs = weighted_xray(m1 * a + m2 * b, arc, 2)
    rhs = a * weighted_xray(m1, arc, 2) + b * weighted_xray(m2, arc, 2)
    assert abs(lhs - rhs) < 1e-12 * max(1, abs(rhs))


@pytest.mark.parametrize("l", [0, 1, 2, 3])
def test_antipodal_reversal(l, rng):
    mu = random_tensor(rng, N, l, 2)
    for arc in sample_arcs(3, N, 10 + l):
        a = weighted_xray(mu, arc.reversed(), 2)
        b = weighted_xray(mu, arc, 2)
        assert abs(a - (-1) ** l * b) < 1e-10


def test_samples_csv_round_trip(tmp_path, rng):
    mu = random_tensor(rng, N, 1, 2)
    samples = transform_samples(mu, sample_arcs(4, N, 0), 2, alpha=0.25)
    path = tmp_path / "s.csv"
    write_samples_csv(path, samples)
    assert path.read_text().splitlines()[0] == "omega_1,omega_2,omega_3,v_1,v_2,v_3,j,alpha,re,im"
    back = read_samples_csv(path)
    assert [(b.arc, b.j, b.alpha_shift, b.value) for b in back] == \
        [(s.arc, s.j, s.alpha_shift, s.value) for s in samples]
    with pytest.raises(ValueError):
        TransformSample(samples[0].arc, -1, 0.0, 1.0)
