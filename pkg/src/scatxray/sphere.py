"""Points, half great circles and quadrature on the unit sphere.

Every transform in this package integrates over a half great circle

    gamma(s) = cos(s) * omega + sin(s) * v,    s in [0, pi],

running from ``omega`` to its antipode.  Arcs are stored rotation-free as
an orthonormal pair ``(omega, v)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

UNIT_TOL = 1e-12

DEFAULT_ORDER = 128


def as_sphere_point(coords, tol=UNIT_TOL):
    """Return ``coords`` as a float array, checking that it has unit norm."""
    p = np.array(coords, dtype=float)
    if p.ndim != 1:
        raise ValueError("a sphere point is a 1-d vector")
    if abs(np.linalg.norm(p) - 1.0) > tol:
        raise ValueError(f"|p| = {np.linalg.norm(p)!r} is not 1")
    return p


@dataclass(frozen=True, eq=False)
class GreatCircleArc:
    """Half great circle from ``omega`` to ``-omega`` with initial tangent ``v``."""

    omega: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        omega = as_sphere_point(self.omega)
        v = as_sphere_point(self.v)
        if omega.shape != v.shape:
            raise ValueError("omega and v live in different dimensions")
        if abs(omega @ v) > UNIT_TOL:
            raise ValueError("omega and v are not orthogonal")
        omega.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "v", v)

    @property
    def n(self):
        return self.omega.shape[0]

    def reversed(self):
        """The same half circle traversed from ``-omega`` back to ``omega``."""
        return GreatCircleArc(-self.omega, self.v)

    def antipodal(self):
        """Image of the arc under the antipodal map ``z -> -z``."""
        return GreatCircleArc(-self.omega, -self.v)

    def __eq__(self, other):
        if not isinstance(other, GreatCircleArc):
            return NotImplemented
        return (np.array_equal(self.omega, other.omega)
                and np.array_equal(self.v, other.v))

    def __hash__(self):
        return hash((self.omega.tobytes(), self.v.tobytes()))


def gamma(arc, s):
    """Point ``cos(s) omega + sin(s) v``; ``s`` may be an array (shape ``s.shape + (n,)``)."""
    s = np.asarray(s, dtype=float)[..., None]
    return np.cos(s) * arc.omega + np.sin(s) * arc.v


def gamma_dot(arc, s):
    """Unit tangent ``-sin(s) omega + cos(s) v``."""
    s = np.asarray(s, dtype=float)[..., None]
    return -np.sin(s) * arc.omega + np.cos(s) * arc.v


def rotate_to_pole(omega):
    """Orthogonal matrix ``R`` with ``R @ omega = e_n``.

    A Householder reflection through the bisector of ``omega`` and ``e_n``;
    the identity when ``omega`` already is the north pole.
    """
    omega = as_sphere_point(omega)
    n = omega.shape[0]
    pole = np.zeros(n)
    pole[-1] = 1.0
    u = omega - pole
    norm2 = u @ u
    if norm2 == 0.0:
        return np.eye(n)
    return np.eye(n) - 2.0 * np.outer(u, u) / norm2


def _orthonormal_pair(a, b):
    omega = a / np.linalg.norm(a)
    v = b - (b @ omega) * omega
    v /= np.linalg.norm(v)
    # one re-orthogonalisation pass keeps <omega, v> at roundoff level
    v -= (v @ omega) * omega
    v /= np.linalg.norm(v)
    return omega, v


def sample_arcs(count, n, seed):
    """Draw ``count`` arcs from the uniform distribution on orthonormal 2-frames.

    Arc ``i`` is generated from its own stream ``default_rng([seed, i])``
    so a batch is reproducible however it is split up.
    """
    if count < 1:
        raise ValueError("count must be positive")
    if n < 2:
        raise ValueError("need n >= 2 for a great circle")
    arcs = []
    for i in range(count):
        rng = np.random.default_rng([seed, i])
        g = rng.standard_normal((2, n))
        arcs.append(GreatCircleArc(*_orthonormal_pair(g[0], g[1])))
    return arcs


def sample_sphere(count, n, seed):
    """``count`` uniform random points on ``S^{n-1}``, shape ``(count, n)``."""
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((count, n))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """Gauss-Legendre nodes and weights mapped to ``[0, pi]``."""

    nodes: np.ndarray
    weights: np.ndarray
    order: int

    def __post_init__(self):
        if len(self.nodes) != len(self.weights):
            raise ValueError("nodes and weights differ in length")
        if np.any(self.weights <= 0):
            raise ValueError("weights must be positive")

    def scaled(self, b):
        """Nodes ``(k, len)`` and weights mapping the rule onto ``[0, b_k]`` for each ``b_k``.

        Used for cumulative integrals ``int_0^b f``.
        """
        b = np.asarray(b, dtype=float)[..., None]
        t = self.nodes / np.pi
        return b * t, b * (self.weights / np.pi)


_RULES = {}


def gauss_legendre(order=DEFAULT_ORDER):
    """Gauss-Legendre rule with ``order`` nodes on ``[0, pi]`` (cached)."""
    if order < 1:
        raise ValueError("order must be positive")
    rule = _RULES.get(order)
    if rule is None:
        x, w = np.polynomial.legendre.leggauss(order)
        nodes = 0.5 * np.pi * (x + 1.0)
        weights = 0.5 * np.pi * w
        nodes.setflags(write=False)
        weights.setflags(write=False)
        rule = _RULES[order] = QuadratureRule(nodes, weights, order)
    return rule


def weighted_quadrature(f, j, rule=None):
    """Approximate ``int_0^pi f(s) sin(s)**j ds``.

    ``f`` is called once with the array of nodes and must broadcast.
    """
    if j < 0:
        raise ValueError("weight exponent must be nonnegative")
    rule = rule or gauss_legendre()
    s = rule.nodes
    return np.sum(rule.weights * np.sin(s) ** j * f(s))
