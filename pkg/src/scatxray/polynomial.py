"""Sparse multivariate polynomials with exact coefficients.

Coefficients are whatever numbers the caller supplies: ``int`` and
``fractions.Fraction`` keep every operation exact, floats and complex
numbers are carried through unchanged.  Conversion to floating point
happens only in :meth:`Polynomial.__call__`.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Number

import numpy as np


def _key(exp):
    return tuple(int(e) for e in exp)


class Polynomial:
    """Polynomial in ``nvars`` variables stored as ``{exponent tuple: coefficient}``.

    Zero coefficients are never stored, so ``Polynomial(...) == 0`` tests for
    the zero polynomial exactly.
    """

    __slots__ = ("nvars", "_terms", "_eval_cache")

    def __init__(self, nvars, terms=None):
        self.nvars = int(nvars)
        clean = {}
        for exp, c in (terms or {}).items():
            exp = _key(exp)
            if len(exp) != self.nvars or min(exp, default=0) < 0:
                raise ValueError(f"bad exponent {exp} for {self.nvars} variables")
            if c != 0:
                clean[exp] = clean.get(exp, 0) + c
                if clean[exp] == 0:
                    del clean[exp]
        self._terms = clean
        self._eval_cache = None

    # -- constructors -------------------------------------------------------

    @classmethod
    def constant(cls, c, nvars):
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def variable(cls, i, nvars):
        exp = [0] * nvars
        exp[i] = 1
        return cls(nvars, {tuple(exp): 1})

    @classmethod
    def monomial(cls, exp, c=1):
        return cls(len(exp), {tuple(exp): c})

    @classmethod
    def zero(cls, nvars):
        return cls(nvars)

    # -- mapping protocol ---------------------------------------------------

    @property
    def terms(self):
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def coefficient(self, exp):
        return self._terms.get(_key(exp), 0)

    @property
    def degree(self):
        """Total degree; ``-1`` for the zero polynomial."""
        return max((sum(e) for e in self._terms), default=-1)

    def is_homogeneous(self):
        return len({sum(e) for e in self._terms}) <= 1

    def constant_term(self):
        return self._terms.get((0,) * self.nvars, 0)

    # -- arithmetic ---------------------------------------------------------

    def _check(self, other):
        if other.nvars != self.nvars:
            raise ValueError("polynomials in different numbers of variables")

    def _coerce(self, other):
        if isinstance(other, Polynomial):
            self._check(other)
            return other
        if isinstance(other, Number):
            return Polynomial.constant(other, self.nvars)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms = dict(self._terms)
        for e, c in other._terms.items():
            terms[e] = terms.get(e, 0) + c
        return Polynomial(self.nvars, terms)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.nvars, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Number):
            return Polynomial(self.nvars, {e: c * other for e, c in self._terms.items()})
        if not isinstance(other, Polynomial):
            return NotImplemented
        self._check(other)
        terms = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                terms[e] = terms.get(e, 0) + c1 * c2
        return Polynomial(self.nvars, terms)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Number):
            return NotImplemented
        if isinstance(other, int):
            other = Fraction(other)
        return Polynomial(self.nvars, {e: c / other for e, c in self._terms.items()})

    def __pow__(self, k):
        out = Polynomial.constant(1, self.nvars)
        for _ in range(int(k)):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, Number):
            other = Polynomial.constant(other, self.nvars)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.nvars == other.nvars and self._terms == other._terms

    def __hash__(self):
        return hash((self.nvars, frozenset(self._terms.items())))

    def diff(self, i, times=1):
        """Partial derivative in variable ``i``."""
        out = self
        for _ in range(times):
            terms = {}
            for e, c in out._terms.items():
                if e[i]:
                    ne = list(e)
                    ne[i] -= 1
                    terms[tuple(ne)] = c * e[i]
            out = Polynomial(self.nvars, terms)
        return out

    def map_coefficients(self, fn):
        return Polynomial(self.nvars, {e: fn(c) for e, c in self._terms.items()})

    # -- evaluation ---------------------------------------------------------

    def _arrays(self):
        if self._eval_cache is None:
            exps = np.array(list(self._terms), dtype=int).reshape(-1, self.nvars)
            coeffs = np.array([complex(c) for c in self._terms.values()], dtype=complex)
            if not np.any(coeffs.imag):
                coeffs = coeffs.real.copy()
            self._eval_cache = (exps, coeffs)
        return self._eval_cache

    def __call__(self, z):
        """Evaluate at a point ``(n,)`` or a batch of points ``(..., n)``."""
        z = np.asarray(z, dtype=float)
        exps, coeffs = self._arrays()
        if not len(coeffs):
            return np.zeros(z.shape[:-1]) if z.ndim > 1 else 0.0
        monos = np.prod(z[..., None, :] ** exps, axis=-1)
        return monos @ coeffs

    def __repr__(self):
        if not self._terms:
            return "Polynomial(0)"
        parts = []
        for e, c in sorted(self._terms.items(), reverse=True):
            mono = "*".join(
                f"z{i + 1}" + (f"^{p}" if p > 1 else "") for i, p in enumerate(e) if p
            )
            parts.append(f"({c})" + ("*" + mono if mono else ""))
        return "Polynomial(" + " + ".join(parts) + ")"

    # -- serialisation ------------------------------------------------------

    def to_json(self):
        out = []
        for e, c in sorted(self._terms.items()):
            c = complex(c)
            out.append({"exp": list(e), "re": c.real, "im": c.imag})
        return out

    @classmethod
    def from_json(cls, nvars, data):
        terms = {}
        for t in data:
            c = complex(t["re"], t["im"])
            terms[tuple(t["exp"])] = c.real if c.imag == 0 else c
        return cls(nvars, terms)


def monomials(nvars, degree):
    """All exponent tuples of total degree ``degree`` (lexicographically descending)."""
    if nvars == 0:
        return [()] if degree == 0 else []
    if nvars == 1:
        return [(degree,)]
    out = []
    for first in range(degree, -1, -1):
        for rest in monomials(nvars - 1, degree - first):
            out.append((first,) + rest)
    return out
