from fractions import Fraction

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings

from scatxray.polynomial import Polynomial, monomials

from conftest import poly_to_sympy, polynomials

Z = sp.symbols("z0:3")


def test_zero_terms_never_stored():
    p = Polynomial(3, {(1, 0, 0): 2, (0, 1, 0): 0})
    assert p.terms == {(1, 0, 0): 2}
    assert (p - p).terms == {}
    assert Polynomial.zero(3).degree == -1


def test_evaluation_at_origin_is_constant_term():
    p = Polynomial(3, {(0, 0, 0): 5, (1, 2, 0): -3})
    assert p(np.zeros(3)) == p.constant_term() == 5


def test_exact_division():
    p = Polynomial.variable(0, 3) / 3
    assert p.coefficient((1, 0, 0)) == Fraction(1, 3)


def test_monomial_count():
    # C(d + n - 1, n - 1)
    assert len(list(monomials(3, 4))) == 15
    assert len(list(monomials(4, 2))) == 10


def test_json_round_trip():
    p = Polynomial(3, {(1, 0, 2): 1.5, (0, 0, 0): complex(0, 2)})
    q = Polynomial.from_json(3, p.to_json())
    assert q == p


@settings(max_examples=40, deadline=None)
@given(polynomials(), polynomials())
def test_ring_operations_match_sympy(p, q):
    assert poly_to_sympy(p * q, Z) == sp.expand(poly_to_sympy(p, Z) * poly_to_sympy(q, Z))
    assert poly_to_sympy(p + q, Z) == sp.expand(poly_to_sympy(p, Z) + poly_to_sympy(q, Z))
    assert poly_to_sympy(p.diff(1), Z) == sp.diff(poly_to_sympy(p, Z), Z[1])


@settings(max_examples=30, deadline=None)
@given(polynomials())
def test_batched_evaluation_matches_sympy(p):
    pts = np.random.default_rng(0).standard_normal((4, 3))
    f = sp.lambdify(Z, poly_to_sympy(p, Z))
    expected = [complex(f(*x)) for x in pts]
    assert np.allclose(p(pts), expected, atol=1e-10)


def test_degree_and_homogeneity():
    p = Polynomial(3, {(2, 0, 0): 1, (0, 1, 1): 4})
    assert p.degree == 2 and p.is_homogeneous()
    assert not (p + 1).is_homogeneous()
    with pytest.raises(ValueError):
        Polynomial(3, {(1, 0): 1})
