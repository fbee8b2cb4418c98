"""Symmetric tensor fields on R^n with polynomial coefficients.

A symmetric l-tensor is stored in the symmetric-monomial basis

    mu = sum_{|alpha| = l} a_alpha(z) dz^alpha,

keyed by multi-indices ``alpha``.  Its pairing with ``w^{(x) l}`` is
``sum_alpha a_alpha(z) w^alpha``, so the whole tensor is captured by the
polynomial ``P(z, w)`` in ``2n`` variables.

Index-tuple components ``psi_{i_1 ... i_l}`` (the fully symmetric array with
``mu(w, ..., w) = sum psi_{i_1..i_l} w_{i_1} ... w_{i_l}``) are related by

    a_alpha = multinomial(alpha) * psi_{tuple(alpha)},
    multinomial(alpha) = l! / (alpha_1! ... alpha_n!).

:meth:`SymTensorField.index_components` and
:meth:`SymTensorField.from_index_components` convert between the two;
every formula written in index-tuple components (symmetrized derivative,
exchange sums) goes through that conversion rather than reusing
multi-index values directly.

Index tuples are 0-based throughout (``dz_1`` is index 0).
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from numbers import Number

import numpy as np

from .polynomial import Polynomial, monomials


def multinomial(alpha):
    alpha = tuple(alpha)
    out = math.factorial(sum(alpha))
    for a in alpha:
        out //= math.factorial(a)
    return out


def counts(index_tuple, n):
    """Multi-index counting how often each of ``0..n-1`` occurs."""
    c = [0] * n
    for i in index_tuple:
        c[i] += 1
    return tuple(c)


def _add_unit(alpha, i, step=1):
    a = list(alpha)
    a[i] += step
    return tuple(a)


class SymTensorField:
    """Symmetric ``l``-tensor field on ``R^n`` with polynomial coefficients."""

    __slots__ = ("n", "l", "_coeffs", "_flat")

    def __init__(self, n, l, coeffs=None):
        self.n = int(n)
        self.l = int(l)
        clean = {}
        for alpha, p in (coeffs or {}).items():
            alpha = tuple(int(a) for a in alpha)
            if len(alpha) != self.n or sum(alpha) != self.l or min(alpha) < 0:
                raise ValueError(f"multi-index {alpha} has wrong length or order")
            if isinstance(p, Number):
                p = Polynomial.constant(p, self.n)
            if p.nvars != self.n:
                raise ValueError("coefficient polynomial in wrong number of variables")
            if alpha in clean:
                p = clean[alpha] + p
            if p:
                clean[alpha] = p
            else:
                clean.pop(alpha, None)
        self._coeffs = clean
        self._flat = None

    @classmethod
    def zero(cls, n, l):
        return cls(n, l)

    @classmethod
    def scalar(cls, p):
        return cls(p.nvars, 0, {(0,) * p.nvars: p})

    @classmethod
    def from_index_components(cls, n, l, components):
        """Build from ``{index tuple: Polynomial}``.

        Missing tuples are zero.  The components are summed over each
        symmetry orbit, which for a symmetric array multiplies by
        ``multinomial(alpha)``; a non-symmetric array is thereby symmetrized.
        """
        coeffs = {}
        for idx, p in components.items():
            if len(idx) != l:
                raise ValueError("index tuple has the wrong length")
            alpha = counts(idx, n)
            coeffs[alpha] = coeffs.get(alpha, Polynomial.zero(n)) + p
        return cls(n, l, coeffs)

    # -- access -------------------------------------------------------------

    @property
    def coeffs(self):
        return dict(self._coeffs)

    def items(self):
        return self._coeffs.items()

    def component(self, alpha):
        return self._coeffs.get(tuple(alpha), Polynomial.zero(self.n))

    def index_component(self, idx):
        """``psi_{idx}`` for an index tuple of length ``l``."""
        alpha = counts(idx, self.n)
        p = self.component(alpha)
        return p / multinomial(alpha)

    def index_components(self):
        """All ``n**l`` index-tuple components (zero ones omitted)."""
        out = {}
        for idx in itertools.product(range(self.n), repeat=self.l):
            p = self.index_component(idx)
            if p:
                out[idx] = p
        return out

    def __bool__(self):
        return bool(self._coeffs)

    def __eq__(self, other):
        if isinstance(other, Number) and other == 0:
            return not self._coeffs
        if not isinstance(other, SymTensorField):
            return NotImplemented
        return (self.n, self.l, self._coeffs) == (other.n, other.l, other._coeffs)

    def __hash__(self):
        return hash((self.n, self.l, frozenset(self._coeffs.items())))

    def __repr__(self):
        body = ", ".join(f"{a}: {p!r}" for a, p in sorted(self._coeffs.items()))
        return f"SymTensorField(n={self.n}, l={self.l}, {{{body}}})"

    def degrees(self):
        """Set of total degrees occurring in the coefficients."""
        return {sum(e) for p in self._coeffs.values() for e, _ in p.items()}

    # -- linear structure ---------------------------------------------------

    def _same_space(self, other):
        if (self.n, self.l) != (other.n, other.l):
            raise ValueError("tensors of different order or dimension")

    def __add__(self, other):
        if isinstance(other, Number) and other == 0:
            return self
        if not isinstance(other, SymTensorField):
            return NotImplemented
        self._same_space(other)
        coeffs = dict(self._coeffs)
        for a, p in other._coeffs.items():
            coeffs[a] = coeffs[a] + p if a in coeffs else p
        return SymTensorField(self.n, self.l, coeffs)

    __radd__ = __add__

    def __neg__(self):
        return SymTensorField(self.n, self.l, {a: -p for a, p in self._coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, c):
        if not isinstance(c, Number):
            return NotImplemented
        return SymTensorField(self.n, self.l, {a: p * c for a, p in self._coeffs.items()})

    __rmul__ = __mul__

    # -- evaluation ---------------------------------------------------------

    def _flat_terms(self):
        # rows (alpha, exp, coefficient) of P(z, w) = sum c z^exp w^alpha
        if self._flat is None:
            ew, ez, cs = [], [], []
            for alpha, p in self._coeffs.items():
                for e, c in p.items():
                    ew.append(alpha)
                    ez.append(e)
                    cs.append(complex(c))
            ew = np.array(ew, dtype=int).reshape(-1, self.n)
            ez = np.array(ez, dtype=int).reshape(-1, self.n)
            cs = np.array(cs, dtype=complex)
            if not np.any(cs.imag):
                cs = cs.real.copy()
            self._flat = (ez, ew, cs)
        return self._flat

    def pair(self, z, w):
        """``<mu(z), w^{(x) l}> = sum_alpha a_alpha(z) w^alpha``, batched over leading axes."""
        z = np.asarray(z, dtype=float)
        w = np.asarray(w, dtype=float)
        ez, ew, cs = self._flat_terms()
        shape = np.broadcast_shapes(z.shape, w.shape)[:-1]
        if not len(cs):
            return np.zeros(shape) if shape else 0.0
        zz = np.prod(z[..., None, :] ** ez, axis=-1)
        ww = np.prod(w[..., None, :] ** ew, axis=-1)
        return (zz * ww) @ cs


def pair(mu, z, w):
    """Pairing ``<mu(z), w^{(x) l}>``; for ``l = 0`` this is just ``mu(z)``."""
    return mu.pair(z, w)


def multiply_poly(p, mu):
    """Componentwise product ``p * mu``."""
    if isinstance(p, Number):
        p = Polynomial.constant(p, mu.n)
    return SymTensorField(mu.n, mu.l, {a: p * q for a, q in mu.items()})


def linear_combination(tensors, weights):
    """``sum_m weights[m] * tensors[m]`` (all of one order)."""
    tensors = list(tensors)
    if not tensors:
        raise ValueError("empty combination")
    out = SymTensorField.zero(tensors[0].n, tensors[0].l)
    for t, c in zip(tensors, weights):
        out = out + t * c
    return out


def radial_contraction(mu):
    """Contraction ``mu(z, ., ..., .)`` of one slot with the position vector, an ``(l-1)``-tensor.

    In multi-index components the coefficient of ``w^beta`` is
    ``(1/l) sum_i (beta_i + 1) z_i a_{beta + e_i}``.
    """
    if mu.l == 0:
        raise ValueError("cannot contract a scalar (order 0) field")
    n = mu.n
    inv_l = Fraction(1, mu.l)
    out = {}
    for alpha, p in mu.items():
        for i in range(n):
            if alpha[i]:
                beta = _add_unit(alpha, i, -1)
                term = Polynomial.variable(i, n) * p * (inv_l * alpha[i])
                out[beta] = out[beta] + term if beta in out else term
    return SymTensorField(n, mu.l - 1, out)


_ARADIAL_SAMPLES = {}


def _aradial_samples(n):
    if n not in _ARADIAL_SAMPLES:
        rng = np.random.default_rng(20240 + n)
        theta = rng.standard_normal((200, n))
        theta /= np.linalg.norm(theta, axis=1, keepdims=True)
        w = rng.standard_normal((200, n))
        w /= np.linalg.norm(w, axis=1, keepdims=True)
        _ARADIAL_SAMPLES[n] = (theta, w)
    return _ARADIAL_SAMPLES[n]


def is_aradial(mu, tol=1e-10):
    """True iff the radial contraction vanishes (within ``tol``) on a fixed sample of the sphere.

    The test uses 200 deterministic sphere points paired with 200 unit
    vectors.  Every scalar field is aradial.
    """
    if mu.l == 0:
        return True
    theta, w = _aradial_samples(mu.n)
    vals = radial_contraction(mu).pair(theta, w)
    return bool(np.max(np.abs(vals), initial=0.0) <= tol)


def sym_derivative(eta):
    """Euclidean symmetrized derivative of an ``(l-1)``-tensor, an ``l``-tensor.

    Index-tuple form: ``psi_alpha = (1/l) sum_j d_{alpha_j} phi_{alpha minus slot j}``.
    In the symmetric-monomial basis this is ``P(z, w) -> sum_i w_i dP/dz_i``,
    i.e. ``a_alpha = sum_{i : alpha_i > 0} d_i b_{alpha - e_i}``; the
    multinomial factors cancel against the ``1/l``.
    """
    n = eta.n
    out = {}
    for beta, p in eta.items():
        for i in range(n):
            dp = p.diff(i)
            if dp:
                alpha = _add_unit(beta, i)
                out[alpha] = out[alpha] + dp if alpha in out else dp
    return SymTensorField(n, eta.l + 1, out)


def _partial(p, idx):
    for i in idx:
        p = p.diff(i)
    return p


def exchange_residual(mu, alpha, beta):
    """Signed sum over all exchanges between two index tuples.

    Returns ``sum_e sgn(e) d_{e(alpha,beta)^(2)} psi_{e(alpha,beta)^(1)}``
    where ``e`` swaps a subset of positions between ``alpha`` and ``beta``
    and ``sgn(e) = (-1)^(number of swaps)``.  The result is identically zero
    whenever ``mu`` is a symmetrized derivative.
    """
    alpha, beta = tuple(alpha), tuple(beta)
    if len(alpha) != mu.l or len(beta) != mu.l:
        raise ValueError("index tuples must both have length l")
    if any(not 0 <= i < mu.n for i in alpha + beta):
        raise ValueError("index out of range")
    total = Polynomial.zero(mu.n)
    for mask in itertools.product((False, True), repeat=mu.l):
        a = tuple(b if m else x for x, b, m in zip(alpha, beta, mask))
        b = tuple(x if m else y for x, y, m in zip(alpha, beta, mask))
        term = _partial(mu.index_component(a), b)
        total = total - term if sum(mask) % 2 else total + term
    return total


def parity(mu):
    """``"even"``, ``"odd"`` or ``"mixed"`` under the antipodal pullback.

    The pullback sends ``z -> -z`` and each ``dz_i -> -dz_i``, so a
    monomial ``z^e dz^alpha`` picks up ``(-1)^(|e| + l)``.  The tensor is
    even/odd when that sign is the same for every monomial.  The zero
    tensor is reported as even.
    """
    signs = {(sum(e) + mu.l) % 2 for p in mu._coeffs.values() for e, _ in p.items()}
    if len(signs) > 1:
        return "mixed"
    return "odd" if signs == {1} else "even"


def rotation_field(i, j, n):
    """Tangential 1-form ``z_i dz_j - z_j dz_i``."""
    ei = tuple(1 if k == i else 0 for k in range(n))
    ej = tuple(1 if k == j else 0 for k in range(n))
    return SymTensorField(n, 1, {
        ej: Polynomial.variable(i, n),
        ei: -Polynomial.variable(j, n),
    })


def _aradial_homogeneous(n, l, d):
    """Exact basis of aradial ``l``-tensors whose coefficients are homogeneous of degree ``d``.

    For homogeneous coefficients the contraction with ``z`` vanishes on the
    sphere iff it vanishes identically, so this is the nullspace of an
    exact rational matrix.
    """
    import sympy

    alphas = monomials(n, l)
    exps = monomials(n, d)
    unknowns = [(a, e) for a in alphas for e in exps]
    if l == 0:
        return [SymTensorField(n, 0, {alphas[0]: Polynomial.monomial(e)}) for e in exps]
    col = {u: k for k, u in enumerate(unknowns)}
    rows = {}
    # coefficient of w^beta z^q in (1/l) sum_i alpha_i z_i a_alpha, beta = alpha - e_i
    for a, e in unknowns:
        for i in range(n):
            if a[i]:
                key = (_add_unit(a, i, -1), _add_unit(e, i))
                rows.setdefault(key, {})[col[(a, e)]] = a[i]
    mat = sympy.zeros(len(rows), len(unknowns))
    for r, entries in enumerate(rows.values()):
        for c, v in entries.items():
            mat[r, c] = v
    basis = []
    for vec in mat.nullspace():
        coeffs = {}
        for k, val in enumerate(vec):
            if val != 0:
                a, e = unknowns[k]
                val = sympy.Rational(val)
                c = Fraction(int(val.p), int(val.q))
                coeffs[a] = coeffs.get(a, Polynomial.zero(n)) + Polynomial.monomial(e, c)
        basis.append(SymTensorField(n, l, coeffs))
    return basis


def aradial_basis(n, l, d_max, degrees=None):
    """Linearly independent aradial ``l``-tensors with homogeneous coefficients of degree <= ``d_max``.

    On the sphere ``|z|^2 = 1``, so homogeneous degree ``d`` already contains
    degrees ``d-2, d-4, ...``; the default therefore uses degrees ``d_max``
    and ``d_max - 1`` only, which are independent of each other because
    they have opposite antipodal parity.  Pass ``degrees`` to select a
    subset (e.g. a single parity class).

    Returns an empty list when no aradial tensors exist at those degrees.
    """
    if l < 0 or d_max < 0:
        raise ValueError("order and degree must be nonnegative")
    if degrees is None:
        degrees = [d for d in (d_max, d_max - 1) if d >= 0]
    out = []
    for d in sorted(degrees, reverse=True):
        if d > d_max:
            raise ValueError(f"degree {d} exceeds d_max={d_max}")
        out.extend(_aradial_homogeneous(n, l, d))
    return out


# -- serialisation ----------------------------------------------------------

def tensor_to_json(mu):
    return {
        "n": mu.n,
        "l": mu.l,
        "coeffs": [
            {"alpha": list(a), "poly": p.to_json()} for a, p in sorted(mu.items())
        ],
    }


def tensor_from_json(doc):
    n, l = int(doc["n"]), int(doc["l"])
    coeffs = {
        tuple(c["alpha"]): Polynomial.from_json(n, c["poly"]) for c in doc["coeffs"]
    }
    return SymTensorField(n, l, coeffs)
