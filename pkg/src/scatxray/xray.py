"""Weighted geodesic X-ray transform of symmetric tensor fields on the sphere.

For an l-tensor ``mu`` and a half great circle ``gamma`` the basic quantity is

    I_j(mu, gamma) = int_0^pi <mu(gamma(s)), gamma'(s)^{(x) l}> sin(s)^j ds,

with the shifted family ``I_j(alpha) = int_0^pi F(s + alpha) sin(s)^j ds``,
``F(t) = <mu(gamma(t)), gamma'(t)^{(x) l}>``.  Two integrations by parts give,
for ``j >= 2``,

    I_j''(alpha) + j^2 I_j(alpha) = j (j - 1) I_{j-2}(alpha).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .sphere import GreatCircleArc, gamma, gauss_legendre, rotate_to_pole
from .tensors import is_aradial, sym_derivative

# arcs evaluated together in one batch; bounds the (arcs, nodes, terms, n) temporaries
_CHUNK = 16


class NotAradialError(ValueError):
    pass


@dataclass(frozen=True)
class TransformSample:
    arc: GreatCircleArc
    j: int
    alpha_shift: float
    value: complex

    def __post_init__(self):
        if self.j < 0:
            raise ValueError("weight exponent must be nonnegative")
        if not np.isfinite(self.value):
            raise ValueError("transform value is not finite")


def _integrate(mu, arcs, j, rule, shift=0.0, direction="tangent"):
    """Vector of transforms over ``arcs``.

    ``direction="tangent"`` pairs with ``gamma'(s)``; ``"omega"`` pairs with
    the fixed start point ``gamma(0)`` instead.
    """
    rule = rule or gauss_legendre()
    s = rule.nodes
    weight = rule.weights * np.sin(s) ** j
    out = np.zeros(len(arcs), dtype=complex)
    for start in range(0, len(arcs), _CHUNK):
        block = arcs[start:start + _CHUNK]
        omega = np.stack([a.omega for a in block])[:, None, :]
        v = np.stack([a.v for a in block])[:, None, :]
        t = (s + shift)[None, :, None]
        pts = np.cos(t) * omega + np.sin(t) * v
        if direction == "tangent":
            dirs = -np.sin(t) * omega + np.cos(t) * v
        else:
            dirs = np.broadcast_to(omega, pts.shape)
        vals = mu.pair(pts, dirs)
        out[start:start + len(block)] = vals @ weight
    return out


def _scalar(values):
    v = complex(values[0])
    return v.real if v.imag == 0 else v


def weighted_xray(mu, arc, j, rule=None):
    """``int_0^pi <mu(gamma(s)), gamma'(s)^l> sin(s)^j ds``."""
    if j < 0:
        raise ValueError("weight exponent must be nonnegative")
    return _scalar(_integrate(mu, [arc], j, rule))


def shifted_xray(mu, arc, j, alpha, rule=None):
    """``int_0^pi F(s + alpha) sin(s)^j ds``; ``alpha = 0`` is :func:`weighted_xray`."""
    if j < 0:
        raise ValueError("weight exponent must be nonnegative")
    return _scalar(_integrate(mu, [arc], j, rule, shift=alpha))


def shift_ode_check(mu, arc, j, alpha, rule=None, h=1e-4):
    """Check ``I_j'' + j^2 I_j = j(j-1) I_{j-2}`` at shift ``alpha``.

    The second derivative is a central difference with step ``h``.
    Returns ``(lhs, rhs, |lhs - rhs|)``.
    """
    if j < 2:
        raise ValueError("the shift identity needs j >= 2")
    i_minus, i_0, i_plus = (shifted_xray(mu, arc, j, alpha + d, rule) for d in (-h, 0.0, h))
    second = (i_plus - 2.0 * i_0 + i_minus) / h**2
    lhs = second + j**2 * i_0
    rhs = j * (j - 1) * shifted_xray(mu, arc, j - 2, alpha, rule)
    return lhs, rhs, abs(lhs - rhs)


def component_form_value(mu, arc, r, rule=None):
    """``int_0^pi a_(0,..,0,l)(gamma(s)) sin(s)^(r-1) ds`` in the frame where ``omega`` is the pole.

    The rotated component is ``<mu(R^T y), (R^T e_n)^l>`` at ``y = R gamma(s)``.
    For aradial ``mu`` this equals ``(-1)^l * weighted_xray(mu, arc, l + r - 1)``.
    """
    if r < 1:
        raise ValueError("level r must be >= 1")
    if not is_aradial(mu, tol=1e-8):
        raise NotAradialError("component form is only defined for aradial tensors")
    rule = rule or gauss_legendre()
    rot = rotate_to_pole(arc.omega)
    s = rule.nodes
    y = gamma(arc, s) @ rot.T
    pole = np.zeros(arc.n)
    pole[-1] = 1.0
    vals = mu.pair(y @ rot, rot.T @ pole)
    return _scalar([np.sum(rule.weights * np.sin(s) ** (r - 1) * vals)])


def ftc_kernel_check(eta, arc, rule=None):
    """Compare the ``j = 0`` transform of ``sym_derivative(eta)`` with its boundary terms.

    ``d/ds <eta(gamma), gamma'^(l-1)> = <grad_s eta(gamma), gamma'^l>
    - (l - 1) eta(gamma)(gamma, gamma', ...)``, so the defect vanishes for
    scalar and for aradial ``eta``; otherwise it is the integral of the
    radial term.  Returns ``(integral, boundary_difference, defect)``.
    """
    integral = weighted_xray(sym_derivative(eta), arc, 0, rule)
    end = eta.pair(-arc.omega, -arc.v)
    start = eta.pair(arc.omega, arc.v)
    boundary = _scalar([end - start])
    return integral, boundary, abs(integral - boundary)


def forward_matrix(basis, arcs, j, rule=None):
    """Matrix with entry ``(i, m) = weighted_xray(basis[m], arcs[i], j)``."""
    basis = list(basis)
    if len({(b.n, b.l) for b in basis}) > 1:
        raise ValueError("basis elements must share order and dimension")
    if j < 0:
        raise ValueError("weight exponent must be nonnegative")
    mat = np.zeros((len(arcs), len(basis)), dtype=complex)
    for m, b in enumerate(basis):
        mat[:, m] = _integrate(b, list(arcs), j, rule)
    if not np.any(mat.imag):
        mat = mat.real.copy()
    return mat


def transform_samples(mu, arcs, j, rule=None, alpha=0.0):
    """:class:`TransformSample` records of the shifted transform over ``arcs``."""
    vals = _integrate(mu, list(arcs), j, rule, shift=alpha)
    return [TransformSample(a, j, float(alpha), complex(v)) for a, v in zip(arcs, vals)]


# -- CSV --------------------------------------------------------------------

def arc_columns(n):
    return [f"omega_{i + 1}" for i in range(n)] + [f"v_{i + 1}" for i in range(n)]


def arc_row(arc):
    return [repr(float(x)) for x in arc.omega] + [repr(float(x)) for x in arc.v]


def parse_arc(row, n):
    omega = [float(row[f"omega_{i + 1}"]) for i in range(n)]
    v = [float(row[f"v_{i + 1}"]) for i in range(n)]
    return GreatCircleArc(np.array(omega), np.array(v))


def write_samples_csv(path, samples):
    samples = list(samples)
    n = samples[0].arc.n if samples else 0
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(arc_columns(n) + ["j", "alpha", "re", "im"])
        for smp in samples:
            v = complex(smp.value)
            w.writerow(arc_row(smp.arc) + [
                str(smp.j), repr(float(smp.alpha_shift)), repr(v.real), repr(v.imag)
            ])


def read_samples_csv(path):
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        n = sum(1 for c in reader.fieldnames if c.startswith("omega_"))
        return [
            TransformSample(parse_arc(row, n), int(row["j"]), float(row["alpha"]),
                            complex(float(row["re"]), float(row["im"])))
            for row in reader
        ]
