"""Exact formal boundary expansions for the radial model.

With ``x = 1/r`` the positive radial Laplacian on ``R^n`` is

    Delta = -d_r^2 - ((n-1)/r) d_r = -x^4 d_x^2 + (n-3) x^3 d_x,

and on a phase monomial ``E = e^{phi/x}``

    Delta(E x^m) = E [ -phi^2 x^m + phi (2m + 1 - n) x^(m+1) - m (m - n + 2) x^(m+2) ].

Series are ``E x^((n-1)/2) sum_beta c_beta x^beta`` with exact Gaussian
rational coefficients.  Phases:

* ``"outgoing"``: ``e^{-i lam / x} = e^{-i lam r}``  (phi = -i lam)
* ``"incoming"``: ``e^{+i lam / x}``                (phi = +i lam)
* ``"exponential"``: ``e^{-tau / x}``                (phi = -tau)

For the outgoing phase the offset ``alpha + 1`` term of
``(Delta^k - lam^2k)(E x^((n-1)/2 + alpha))`` is ``k lam^(2k-1) C_alpha``
with ``C_alpha = -2 i alpha``; the sign flips for the incoming phase.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

import sympy as sp
from sympy.polys.domains import QQ, QQ_I

PHASES = ("outgoing", "incoming", "exponential")

ZERO = QQ_I.zero
ONE = QQ_I.one


class BracketVanishesError(ValueError):
    """The truncated bracket ``1 + sum c_beta x^beta`` has a zero on the working interval."""


def _rational(value):
    if isinstance(value, (int, Fraction)):
        f = Fraction(value)
    elif isinstance(value, float):
        # decimal reading of the float, so 0.1 means 1/10
        f = Fraction(repr(value))
    elif isinstance(value, sp.Basic):
        q = sp.Rational(value)
        f = Fraction(int(q.p), int(q.q))
    else:
        f = Fraction(value)
    return QQ(f.numerator, f.denominator)


def exact(value):
    """Gaussian rational from an int, Fraction, float, complex or sympy number."""
    if isinstance(value, type(ZERO)):
        return value
    if isinstance(value, complex):
        return QQ_I(_rational(value.real), _rational(value.imag))
    if isinstance(value, sp.Basic):
        return QQ_I.from_sympy(sp.nsimplify(value, rational=True))
    return QQ_I(_rational(value), 0)


def to_sympy(c):
    return QQ_I.to_sympy(c)


def to_complex(c):
    return complex(float(c.x), float(c.y))


def base_exponent(n):
    return sp.Rational(n - 1, 2)


@dataclass
class RadialSeries:
    """``e^{phi/x} x^((n-1)/2) sum_{beta <= N} c_beta x^beta``.

    ``param`` is ``lam`` for the oscillatory phases and ``tau`` for the
    exponential one.  Zero coefficients are not stored.
    """

    phase: str
    n: int
    param: object
    terms: dict = field(default_factory=dict)
    N: int = 0

    def __post_init__(self):
        if self.phase not in PHASES:
            raise ValueError(f"unknown phase {self.phase!r}")
        self.param = exact(self.param)
        if self.param == ZERO:
            raise ValueError("spectral parameter must be nonzero")
        if self.phase == "exponential" and not (self.param.y == 0 and self.param.x > 0):
            raise ValueError("tau must be real and positive")
        clean = {}
        for beta, c in self.terms.items():
            if beta < 0:
                raise ValueError("offsets must be nonnegative")
            c = exact(c)
            if c != ZERO:
                clean[int(beta)] = c
        if clean and max(clean) > self.N:
            raise ValueError("term beyond the truncation order")
        self.terms = dict(sorted(clean.items()))

    @property
    def phi(self):
        if self.phase == "outgoing":
            return -QQ_I(0, 1) * self.param
        if self.phase == "incoming":
            return QQ_I(0, 1) * self.param
        return -self.param

    @property
    def base(self):
        return base_exponent(self.n)

    def coefficient(self, beta):
        return self.terms.get(beta, ZERO)

    def lowest_offset(self):
        return min(self.terms) if self.terms else None

    def is_zero(self):
        return not self.terms

    def like(self, terms, N):
        return RadialSeries(self.phase, self.n, self.param, terms, N)

    def bracket(self):
        """``sum c_beta x^beta`` as a sympy polynomial expression in ``x``."""
        x = sp.Symbol("x")
        return sum((to_sympy(c) * x**b for b, c in self.terms.items()), sp.Integer(0))

    def __eq__(self, other):
        if not isinstance(other, RadialSeries):
            return NotImplemented
        return (self.phase, self.n, self.param, self.terms) == (
            other.phase, other.n, other.param, other.terms)

    def to_json(self):
        return json.dumps(series_to_dict(self), sort_keys=True)


def series_to_dict(series):
    rows = []
    for beta, c in series.terms.items():
        rows.append({"beta": beta,
                     "re_num": int(c.x.numerator), "re_den": int(c.x.denominator),
                     "im_num": int(c.y.numerator), "im_den": int(c.y.denominator)})
    p = series.param
    return {"phase": series.phase, "n": series.n, "base": "(n-1)/2", "N": series.N,
            "param": {"re_num": int(p.x.numerator), "re_den": int(p.x.denominator),
                      "im_num": int(p.y.numerator), "im_den": int(p.y.denominator)},
            "terms": rows}


def series_from_dict(doc):
    def gq(d):
        return QQ_I(QQ(d["re_num"], d["re_den"]), QQ(d["im_num"], d["im_den"]))

    terms = {row["beta"]: gq(row) for row in doc["terms"]}
    N = doc.get("N", max(terms, default=0))
    return RadialSeries(doc["phase"], doc["n"], gq(doc["param"]), terms, N)


@dataclass(frozen=True)
class RadialOperator:
    """``Delta^k + V - (-phi^2)^k`` on series of a fixed phase.

    For the oscillatory phases ``(-phi^2)^k = lam^2k``; for the exponential
    phase with ``k = 2j`` it is ``tau^4j``.  ``potential`` maps offsets
    ``m >= 2`` to coefficients of a multiplication operator ``sum v_m x^m``.
    """

    n: int
    k: int
    param: object
    phase: str = "outgoing"
    potential: tuple = ()

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.phase not in PHASES:
            raise ValueError(f"unknown phase {self.phase!r}")
        object.__setattr__(self, "param", exact(self.param))
        if self.param == ZERO:
            raise ValueError("spectral parameter must be nonzero")
        pot = tuple(sorted((int(m), exact(v)) for m, v in dict(self.potential).items()))
        if any(m < 2 for m, _ in pot):
            raise ValueError("potential terms must vanish to second order")
        object.__setattr__(self, "potential", pot)

    @property
    def phi(self):
        return RadialSeries(self.phase, self.n, self.param).phi

    @property
    def spectral_value(self):
        return (-(self.phi**2)) ** self.k


def _laplacian_terms(terms, n, phi):
    """One application of Delta to ``E x^base sum c_beta x^beta``."""
    out = {}
    a = QQ_I.from_sympy(base_exponent(n))
    for beta, c in terms.items():
        m = a + beta
        for shift, factor in ((0, -(phi**2)), (1, phi * (2 * m + 1 - n)),
                              (2, -m * (m - n + 2))):
            if factor == ZERO:
                continue
            out[beta + shift] = out.get(beta + shift, ZERO) + factor * c
    return {b: c for b, c in out.items() if c != ZERO}


def _check(op, series):
    if series.phase != op.phase or series.n != op.n or series.param != op.param:
        raise ValueError("operator and series disagree on phase, dimension or parameter")


def laplacian(series, times=1):
    """``Delta^times`` applied exactly; the truncation order grows by ``2 * times``."""
    terms = dict(series.terms)
    for _ in range(times):
        terms = _laplacian_terms(terms, series.n, series.phi)
    return series.like(terms, series.N + 2 * times)


def _combine(*pairs):
    out = {}
    for scale, terms in pairs:
        for b, c in terms.items():
            out[b] = out.get(b, ZERO) + scale * c
    return {b: c for b, c in out.items() if c != ZERO}


def apply_operator(op, series):
    """``(Delta^k + V - (-phi^2)^k) series`` exactly, term by term."""
    _check(op, series)
    lap = laplacian(series, op.k)
    terms = _combine((ONE, lap.terms), (-op.spectral_value, series.terms))
    for m, v in op.potential:
        terms = _combine((ONE, terms), (v, {b + m: c for b, c in series.terms.items()}))
    top = series.N + max(2 * op.k, max((m for m, _ in op.potential), default=0))
    return series.like(terms, top)


def _monomial_image(op, beta):
    unit = RadialSeries(op.phase, op.n, op.param, {beta: ONE}, beta)
    return apply_operator(op, unit).terms


def lead_factor(op, beta):
    """Coefficient of offset ``beta + 1`` in the image of ``E x^(base + beta)``."""
    return _monomial_image(op, beta).get(beta + 1, ZERO)


def _k_prefactor(k, lam):
    return k * lam ** (2 * k - 1)


def c_alpha(n, k, lam, alpha, potential=()):
    """``C_alpha`` for the outgoing phase, read off from :func:`apply_operator`."""
    if alpha < 0:
        raise ValueError("alpha must be nonnegative")
    lam = exact(lam)
    if lam == ZERO:
        raise ValueError("lambda must be nonzero")
    op = RadialOperator(n, k, lam, "outgoing", dict(potential))
    return lead_factor(op, alpha) / _k_prefactor(k, lam)


def q_factorization_check(n, k, lam, series):
    """``(Delta^k - lam^2k) u - Q (Delta - lam^2) u`` with ``Q = sum_j lam^2j Delta^(k-j-1)``.

    ``lam^2`` is read as ``-phi^2`` of the series' phase.  Returns the
    defect series, which is identically zero.
    """
    lam = exact(lam)
    if series.param != lam:
        raise ValueError("series and check use different spectral parameters")
    op_k = RadialOperator(n, k, lam, series.phase)
    op_1 = RadialOperator(n, 1, lam, series.phase)
    lhs = apply_operator(op_k, series)
    inner = apply_operator(op_1, series)
    lam2 = -(series.phi**2)
    q_terms = {}
    for j in range(k):
        part = laplacian(inner, k - j - 1).terms
        q_terms = _combine((ONE, q_terms), (lam2**j, part))
    defect = _combine((ONE, lhs.terms), (-ONE, q_terms))
    return series.like(defect, max(lhs.N, inner.N + 2 * (k - 1)))


def _recursion(op, f_lead, N):
    f_lead = exact(f_lead)
    if N < 0:
        raise ValueError("truncation order must be nonnegative")
    coeffs = {0: f_lead} if f_lead != ZERO else {}
    if not coeffs:
        return coeffs
    images = {}
    residual = {}
    for beta in range(N + 1):
        if beta > 0:
            lead = images.setdefault(beta, _monomial_image(op, beta)).get(beta + 1, ZERO)
            if lead == ZERO:
                raise ZeroDivisionError(f"vanishing lead factor at offset {beta}")
            c = -residual.get(beta + 1, ZERO) / lead
            if c == ZERO:
                continue
            coeffs[beta] = c
        img = images.setdefault(beta, _monomial_image(op, beta))
        residual = _combine((ONE, residual), (coeffs[beta], img))
    return coeffs


def formal_solution(n, k, lam, f_lead, N, phase="outgoing", potential=()):
    """Series ``u`` with lead ``f_lead`` whose image has no terms below offset ``N + 2``.

    ``c_beta = -R_(beta+1) / (k lam^(2k-1) C_beta)`` where ``R`` is the image
    of the partial sum through ``beta - 1``.
    """
    lam = exact(lam)
    if lam == ZERO:
        raise ValueError("lambda must be nonzero")
    if N < 1:
        raise ValueError("truncation order N must be >= 1")
    op = RadialOperator(n, k, lam, phase, dict(potential))
    return RadialSeries(phase, n, lam, _recursion(op, f_lead, N), N)


def residual_order(op, series):
    """Exponent of the lowest surviving power in ``apply_operator(op, series)``."""
    img = apply_operator(op, series)
    low = img.lowest_offset()
    return None if low is None else series.base + low


def series_quotient(num, den, lowest, highest):
    """Coefficients of ``num / den`` as a power series, offsets ``lowest..highest``.

    ``den`` must have a nonzero constant term.
    """
    d0 = den.get(0, ZERO)
    if d0 == ZERO:
        raise ZeroDivisionError("denominator has zero constant term")
    q = {}
    for b in range(highest + 1):
        acc = num.get(b, ZERO)
        for i, c in den.items():
            if 0 < i <= b:
                acc -= c * q.get(b - i, ZERO)
        q[b] = acc / d0
    return {b: c for b, c in q.items() if lowest <= b and c != ZERO}


@dataclass
class EigenPotential:
    """Output of :func:`eigen_potential`.

    ``V`` holds the coefficients of the power series ``V_N(x)`` (no phase);
    ``g`` is the exact residual ``(Delta^2j - tau^4j) u``.
    """

    u: RadialSeries
    g: RadialSeries
    V: dict
    residual_order: object
    j: int
    N: int

    def bracket_values(self, x):
        return _evaluate(self.u.terms, x)

    def relative_residual(self, x):
        """``|(Delta^2j + V_N - tau^4j) u_N| / |u_N|`` at ``x``, evaluated exactly."""
        x = Fraction(repr(x)) if isinstance(x, float) else Fraction(x)
        g = _evaluate(self.g.terms, x)
        bracket = _evaluate(self.u.terms, x)
        v = _evaluate(self.V, x)
        return abs(to_complex(g + v * bracket)) / abs(to_complex(bracket))

    def raw_residual(self, x):
        """``|g_N| / |u_N|`` at ``x``: the part ``V_N`` has to absorb."""
        x = Fraction(repr(x)) if isinstance(x, float) else Fraction(x)
        return abs(to_complex(_evaluate(self.g.terms, x))) / abs(
            to_complex(_evaluate(self.u.terms, x)))


def _evaluate(terms, x):
    x = x if isinstance(x, type(ZERO)) else exact(Fraction(x))
    total = ZERO
    for b, c in terms.items():
        total += c * x**b
    return total


def bracket_roots(series, interval=(0, Fraction(1, 5))):
    """Number of real zeros of a real bracket in the half-open interval ``(a, b]``."""
    if any(c.y != 0 for c in series.terms.values()):
        raise ValueError("bracket has complex coefficients")
    x = sp.Symbol("x")
    poly = sp.Poly(series.bracket(), x)
    a, b = (sp.Rational(Fraction(v).numerator, Fraction(v).denominator) for v in interval)
    count = poly.count_roots(a, b)
    if poly.eval(a) == 0:
        count -= 1
    return int(count)


def eigen_potential(n, j, tau, N, quotient_terms=1, interval=(0, Fraction(1, 5))):
    """Formal eigenfunction of ``Delta^2j + V`` at eigenvalue ``tau^4j``.

    ``u_N = e^{-tau/x} x^((n-1)/2) (1 + sum_{1 <= beta <= N} c_beta x^beta)``
    by the formal recursion for ``Delta^2j - tau^4j``, ``g_N`` its exact image,
    and ``V_N = -g_N / u_N`` as a truncated series quotient keeping the
    ``quotient_terms`` lowest powers ``x^(N+2) ..``.  ``u_N`` and ``V_N``
    are both free of the phase, so ``V_N`` is a plain power series.  With
    that truncation ``(Delta^2j + V_N - tau^4j) u_N = O(u_N x^(N+2+quotient_terms))``.

    Raises :class:`BracketVanishesError` if the bracket has a zero in the
    working interval ``(0, 1/5]``.
    """
    if j < 1:
        raise ValueError("j must be a positive integer")
    tau = exact(tau)
    if not (tau.y == 0 and tau.x > 0):
        raise ValueError("tau must be real and positive")
    if N < 0 or quotient_terms < 1:
        raise ValueError("need N >= 0 and at least one quotient term")
    op = RadialOperator(n, 2 * j, tau, "exponential")
    u = RadialSeries("exponential", n, tau, _recursion(op, ONE, N), N)
    if bracket_roots(u, interval):
        raise BracketVanishesError(
            f"truncated bracket vanishes on ({interval[0]}, {interval[1]}] at N={N}")
    g = apply_operator(op, u)
    low = g.lowest_offset()
    if low is None:
        return EigenPotential(u, g, {}, None, j, N)
    V = series_quotient({b: -c for b, c in g.terms.items()}, u.terms,
                        low, low + quotient_terms - 1)
    return EigenPotential(u, g, V, u.base + low, j, N)
