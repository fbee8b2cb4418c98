"""Separating the polynomial dependence of symbol data on the energy.

The endpoint datum at level r is ``lam^-(2k-1) p(lam)`` with
``p(lam) = sum_{d=0}^{l} c_d lam^d``; ``c_d`` only involves the order-``d``
part of the perturbation.  Knowing ``p`` at ``l + 1`` distinct energies
recovers every ``c_d`` through a Vandermonde solve.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg


class SingularGridError(ValueError):
    """Energies are not pairwise distinct (or not positive)."""


class UnderdeterminedError(ValueError):
    """Fewer energies than polynomial coefficients."""


@dataclass(frozen=True, eq=False)
class EnergyGrid:
    lambdas: np.ndarray

    def __post_init__(self):
        lam = np.array(self.lambdas, dtype=float).ravel()
        if lam.size == 0:
            raise SingularGridError("empty energy grid")
        if np.any(lam <= 0) or not np.all(np.isfinite(lam)):
            raise SingularGridError("energies must be finite and positive")
        gaps = np.abs(lam[:, None] - lam[None, :])
        np.fill_diagonal(gaps, np.inf)
        if lam.size > 1 and np.min(gaps) <= 1e-9 * np.max(lam):
            raise SingularGridError("energies must be pairwise distinct")
        lam.setflags(write=False)
        object.__setattr__(self, "lambdas", lam)

    def __len__(self):
        return self.lambdas.size

    def __iter__(self):
        return iter(self.lambdas.tolist())

    @classmethod
    def default(cls, m):
        """``lam_i = 1 + i/2`` for ``i = 0..m-1``."""
        return cls(1.0 + 0.5 * np.arange(m))


def energies_required(l):
    """Number of energies that determine an order-``l`` perturbation: ``l + 1``."""
    if l < 0:
        raise ValueError("order must be nonnegative")
    return l + 1


@dataclass(frozen=True)
class Separation:
    coefficients: np.ndarray   # shape (degree + 1, ...), c_0 first
    condition_number: float


def vandermonde(grid, degree):
    return np.vander(grid.lambdas, degree + 1, increasing=True)


def separate_fields(values, grid, degree):
    """Solve ``values[i, ...] = sum_d c_d[...] lam_i^d`` independently for each trailing index.

    ``values`` has the energies on its first axis.  An exactly determined
    grid is solved directly, a larger one by QR least squares.
    """
    values = np.asarray(values)
    m = len(grid)
    if values.shape[0] != m:
        raise ValueError("first axis of values must match the energy grid")
    if m < degree + 1:
        raise UnderdeterminedError(
            f"{m} energies cannot separate {degree + 1} polynomial coefficients"
        )
    V = vandermonde(grid, degree)
    cond = float(np.linalg.cond(V))
    flat = values.reshape(m, -1)
    if m == degree + 1:
        coeffs = np.linalg.solve(V, flat)
    else:
        q, r = np.linalg.qr(V)
        coeffs = scipy.linalg.solve_triangular(r, q.T @ flat)
    return Separation(coeffs.reshape((degree + 1,) + values.shape[1:]), cond)


def separate_degrees(values, grid, degree):
    """Coefficients ``c_0..c_degree`` of ``p(lam)`` from samples ``p(lam_i)``."""
    values = np.asarray(values)
    if values.ndim != 1:
        raise ValueError("expected one value per energy")
    return separate_fields(values, grid, degree)
