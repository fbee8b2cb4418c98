"""Transport equations for scattering symbols.

Flat case.  On ``R^n`` the level-``r`` term of the symbol difference along a
half great circle from ``omega`` is

    b(s) = i / (2 k lam^(2k-1) sin(s)^r) * int_0^s W(gamma(s'), omega) sin(s')^(r-1) ds',

with the forcing ``W(theta, omega, lam) = sum_d lam^d <mu_d(theta), omega^d>``
(``mu_d`` collects the coefficients ``a_alpha`` with ``|alpha| = d``).  The
endpoint datum is

    symbol_transform = lam^-(2k-1) int_0^pi W(gamma(s), omega) sin(s)^(r-1) ds
                     = (2k / i) * lim_{s -> pi} sin(s)^r b(s).

Curved case.  Along a lifted geodesic the principal symbol solves

    sin(s) b' + ((1 - n)/2 + j) cos(s) b + i sin(s) d(s) b = source,

whose integrating factor is ``e^{i int_0^s d} sin(s)^((1-n)/2 + j)``.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np
from scipy.integrate import solve_ivp

from .sphere import gauss_legendre
from .tensors import SymTensorField
from .xray import arc_columns, arc_row

# endpoint correction threshold for the flat solution
_NEAR_PI = 1e-3


def _check_lambda(lam):
    if lam == 0:
        raise ValueError("energy lambda must be nonzero")


@dataclass(frozen=True)
class Forcing:
    """Lead coefficients of one homogeneity level of ``V1 - V2``.

    ``tensors[d]`` is the order-``d`` symmetric tensor ``sum_{|alpha|=d}
    a_{alpha,-r-1} dz^alpha``.  Coefficients are given by their values on
    the unit sphere; the factor ``|z|^(-r-1)`` is the ``homogeneity``
    metadata and never enters an integral.
    """

    level: int
    k: int
    tensors: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.level < 1:
            raise ValueError("level r must be >= 1")
        if self.k < 1:
            raise ValueError("operator order k must be >= 1")
        ns = set()
        for d, t in self.tensors.items():
            if not isinstance(t, SymTensorField) or t.l != d:
                raise ValueError(f"tensors[{d}] must be a symmetric {d}-tensor")
            if d > 2 * self.k - 1:
                raise ValueError(f"order {d} exceeds 2k-1 = {2 * self.k - 1}")
            ns.add(t.n)
        if len(ns) > 1:
            raise ValueError("tensors live in different dimensions")

    @property
    def homogeneity(self):
        return -self.level - 1

    @property
    def order(self):
        return max(self.tensors, default=0)

    def with_k(self, k):
        return replace(self, k=k)


def w_forcing(forcing, theta, omega, lam):
    """``W_{-r}(theta, omega, lam) = sum_d lam^d <mu_d(theta), omega^d>``; batches over leading axes."""
    _check_lambda(lam)
    theta = np.asarray(theta, dtype=float)
    omega = np.asarray(omega, dtype=float)
    shape = np.broadcast_shapes(theta.shape, omega.shape)[:-1]
    total = np.zeros(shape, dtype=complex)
    for d, mu in forcing.tensors.items():
        total = total + lam**d * mu.pair(theta, omega)
    return total if shape else complex(total)


def _sinc(x):
    # sin(x) / x, with the exact limit at 0
    return np.sinc(np.asarray(x) / np.pi)


def _sin_near_pi(s):
    s = np.asarray(s, dtype=float)
    return np.where(s > np.pi - _NEAR_PI, np.sin(np.pi - s), np.sin(s))


def solve_flat_transport(forcing, arc, lam, rule=None):
    """The level-``r`` flat transport solution along ``arc`` as a callable ``b(s)``.

    ``b`` is evaluated in the cancelled form

        (i / (2k lam^(2k-1))) * (s / sin s)^r * int_0^1 W(gamma(st)) t^(r-1) sinc(st)^(r-1) dt,

    which has no 0/0 at ``s = 0``; near ``s = pi`` the sine is taken of
    ``pi - s``.  It grows like ``(pi - s)^(-r)`` at the far endpoint.
    """
    _check_lambda(lam)
    r, k = forcing.level, forcing.k
    rule = rule or gauss_legendre()
    t = rule.nodes / np.pi
    wt = rule.weights / np.pi
    pref = 1j / (2 * k * lam ** (2 * k - 1))

    def b(s):
        shape = np.shape(s)
        s = np.atleast_1d(np.asarray(s, dtype=float))
        st = s[..., None] * t
        pts = np.cos(st)[..., None] * arc.omega + np.sin(st)[..., None] * arc.v
        wvals = w_forcing(forcing, pts, arc.omega, lam)
        inner = (wvals * t ** (r - 1) * _sinc(st) ** (r - 1)) @ wt
        ratio = np.where(s == 0, 1.0, s / np.where(s == 0, 1.0, _sin_near_pi(s)))
        out = (pref * ratio**r * inner).reshape(shape)
        return out if out.ndim else complex(out)

    return b


def symbol_transform(forcing, arc, lam, rule=None):
    """``lam^-(2k-1) int_0^pi W_{-r}(gamma(s), omega) sin(s)^(r-1) ds``."""
    return complex(symbol_transform_batch(forcing, [arc], lam, rule)[0])


def symbol_transform_batch(forcing, arcs, lam, rule=None):
    """:func:`symbol_transform` for each arc, as a complex array."""
    _check_lambda(lam)
    rule = rule or gauss_legendre()
    r, k = forcing.level, forcing.k
    s = rule.nodes
    weight = rule.weights * np.sin(s) ** (r - 1)
    omega = np.stack([a.omega for a in arcs])[:, None, :]
    v = np.stack([a.v for a in arcs])[:, None, :]
    out = np.zeros(len(arcs), dtype=complex)
    step = 16
    for i in range(0, len(arcs), step):
        om, vv = omega[i:i + step], v[i:i + step]
        pts = np.cos(s)[None, :, None] * om + np.sin(s)[None, :, None] * vv
        out[i:i + step] = w_forcing(forcing, pts, om, lam) @ weight
    return out / lam ** (2 * k - 1)


def endpoint_exponent(b, near=(1e-4, 1e-2), num=25):
    """Least-squares slope of ``log|b(s)|`` against ``log(pi - s)`` close to ``s = pi``."""
    eps = np.geomspace(near[0], near[1], num)
    vals = np.abs(np.asarray(b(np.pi - eps)))
    slope, _ = np.polyfit(np.log(eps), np.log(vals), 1)
    return float(slope)


def rescaled_hamiltonian_factor(k, lam):
    """``k lam^(2(k-1))``: order-``k`` Hamiltonian and subprincipal term over the ``k = 1`` ones."""
    _check_lambda(lam)
    if k < 1:
        raise ValueError("k must be >= 1")
    return k * lam ** (2 * (k - 1))


@dataclass(frozen=True)
class CurvedODE:
    """Transport data along one lifted geodesic.

    ``d`` is the subprincipal function and ``g`` the reduced source of the
    ``k = 1`` problem; both are vectorised callables of ``s``.  For order
    ``k`` the operator is ``rescaled_hamiltonian_factor(k, lam)`` times the
    ``k = 1`` operator.
    """

    n: int
    d: Callable
    g: Optional[Callable] = None
    k: int = 1
    lam: float = 1.0

    def __post_init__(self):
        _check_lambda(self.lam)


def _cumulative(f, s, nodes=64):
    """``int_0^s f`` by Gauss-Legendre on ``[0, s]`` for each entry of ``s``."""
    rule = gauss_legendre(nodes)
    sn, wn = rule.scaled(s)
    return np.sum(wn * f(sn), axis=-1)


def solve_curved_transport(ode, order_shift=0, C=1.0):
    """Closed-form solution ``b_j`` of the curved transport equation.

    ``e^{i D(s)} sin(s)^((1-n)/2 + j) b_j(s) = C + (1/f) int_0^s g``, with
    ``D = int_0^s d`` and ``f = rescaled_hamiltonian_factor(k, lam)``.  For
    ``g = 0`` and ``j = 0`` this is ``C sin(s)^((n-1)/2) e^{-i D(s)}``.
    """
    j = int(order_shift)
    if j < 0:
        raise ValueError("order shift must be nonnegative")
    fac = rescaled_hamiltonian_factor(ode.k, ode.lam)
    expo = (ode.n - 1) / 2 - j

    def b(s):
        shape = np.shape(s)
        s = np.atleast_1d(np.asarray(s, dtype=float))
        phase = np.exp(-1j * _cumulative(ode.d, s))
        amp = C
        if ode.g is not None:
            amp = C + _cumulative(ode.g, s) / fac
        out = (np.sin(s) ** expo * phase * amp).reshape(shape)
        return out if out.ndim else complex(out)

    return b


def integrate_curved_transport(ode, order_shift, s0, b0, s_eval, rtol=1e-11, atol=1e-13):
    """Integrate the raw transport ODE numerically (RK45) from ``b(s0) = b0``.

    The phase ``D = int_0^s d`` is carried as a second state variable, started
    from an adaptive quadrature value at ``s0``.  All points of ``s_eval`` must
    lie on one side of ``s0``.
    """
    from scipy.integrate import quad

    j = int(order_shift)
    fac = rescaled_hamiltonian_factor(ode.k, ode.lam)
    c_coef = (1 - ode.n) / 2 + j

    def rhs(s, y):
        b, D = y[0], y[1].real
        sn, cs = np.sin(s), np.cos(s)
        dval = complex(np.asarray(ode.d(np.array(s))))
        src = 0.0
        if ode.g is not None:
            gval = complex(np.asarray(ode.g(np.array(s))))
            src = gval / fac * np.exp(-1j * D) * sn ** ((ode.n + 1) / 2 - j)
        db = (-(1j * dval * sn + c_coef * cs) * b + src) / sn
        return [db, dval.real]

    d0 = quad(lambda x: float(np.real(ode.d(np.array(x)))), 0.0, s0, epsabs=1e-14, epsrel=1e-13)[0]
    s_eval = np.asarray(s_eval, dtype=float)
    end = s_eval[np.argmax(np.abs(s_eval - s0))]
    order = np.argsort(s_eval) if end > s0 else np.argsort(-s_eval)
    sol = solve_ivp(rhs, (s0, end), [complex(b0), complex(d0)], method="RK45",
                    t_eval=s_eval[order], rtol=rtol, atol=atol)
    if not sol.success:
        raise RuntimeError(sol.message)
    out = np.empty(len(s_eval), dtype=complex)
    out[order] = sol.y[0]
    return out


# -- CSV --------------------------------------------------------------------

def write_symbol_csv(path, rows):
    """Write ``(arc, lam, r, value)`` rows with the arc columns of the transform CSV."""
    rows = list(rows)
    n = rows[0][0].n if rows else 0
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(arc_columns(n) + ["lambda", "r", "re", "im"])
        for arc, lam, r, val in rows:
            val = complex(val)
            w.writerow(arc_row(arc) + [repr(float(lam)), str(int(r)),
                                       repr(val.real), repr(val.imag)])


def read_symbol_csv(path):
    from .xray import parse_arc

    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        n = sum(1 for c in reader.fieldnames if c.startswith("omega_"))
        return [
            (parse_arc(row, n), float(row["lambda"]), int(row["r"]),
             complex(float(row["re"]), float(row["im"])))
            for row in reader
        ]
