import sys
from fractions import Fraction

import numpy as np
import pytest
import sympy as sp
from hypothesis import strategies as st

from scatxray.polynomial import Polynomial, monomials
from scatxray.tensors import SymTensorField


def poly_to_sympy(p, syms):
    expr = sp.Integer(0)
    for exp, c in p.items():
        term = sp.nsimplify(c) if not isinstance(c, Fraction) else sp.Rational(c.numerator, c.denominator)
        for s, e in zip(syms, exp):
            term *= s**e
        expr += term
    return sp.expand(expr)


def random_poly(rng, n, max_degree, homogeneous=None, density=0.6):
    """Random polynomial with small integer coefficients (exact)."""
    degrees = [homogeneous] if homogeneous is not None else range(max_degree + 1)
    terms = {}
    for d in degrees:
        for exp in monomials(n, d):
            if rng.random() < density:
                terms[exp] = int(rng.integers(-4, 5))
    return Polynomial(n, terms)


def random_tensor(rng, n, l, max_degree):
    from itertools import combinations_with_replacement

    coeffs = {}
    for idx in combinations_with_replacement(range(n), l):
        alpha = tuple(idx.count(i) for i in range(n))
        coeffs[alpha] = random_poly(rng, n, max_degree)
    return SymTensorField(n, l, coeffs)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


small_ints = st.integers(min_value=-5, max_value=5)


@st.composite
def polynomials(draw, n=3, max_degree=3):
    terms = {}
    for d in range(max_degree + 1):
        for exp in monomials(n, d):
            if draw(st.booleans()):
                terms[exp] = draw(small_ints)
    return Polynomial(n, terms)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for i in sorted(mod.RESULTS):
        terminalreporter.write_line(mod._line(i, *mod.RESULTS[i]))
