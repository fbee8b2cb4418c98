"""Order-by-order recovery of aradial perturbation asymptotics from symbol data.

Pipeline for one homogeneity level ``r``:

1. multiply the data by ``lam^(2k-1)`` and separate the energy polynomial
   into ``c_0 .. c_l`` (:mod:`scatxray.energy`);
2. for each order ``d``, ``c_d(arc) = (-1)^d I_{d+r-1}(mu_d, arc)``, so
   ``mu_d`` is found by least squares against the forward matrix of the
   aradial basis of order ``d`` at weight ``d + r - 1``.

The data model at level ``r`` is the endpoint datum produced by the
transport solution, assuming all lower levels already agree.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .energy import EnergyGrid, UnderdeterminedError, separate_fields
from .polynomial import Polynomial
from .tensors import (
    SymTensorField, aradial_basis, is_aradial, linear_combination, parity, rotation_field,
    sym_derivative,
)
from .transport import Forcing, symbol_transform_batch
from .xray import forward_matrix

RANK_TOL = 1e-10


class EmptyBasisError(ValueError):
    pass


class RankDeficientError(np.linalg.LinAlgError):
    """Forward matrix without full column rank; carries the singular values."""

    def __init__(self, message, singular_values, degree=None):
        super().__init__(message)
        self.singular_values = np.asarray(singular_values)
        self.degree = degree


@dataclass
class PerturbationAsymptotics:
    """Lead terms of an aradial perturbation, level by level.

    ``levels[r][d]`` is the order-``d`` tensor at homogeneity level ``r``;
    ``coefficients[r][d]`` its coordinates on ``aradial_basis(n, d, d_max)``
    when it was built from that basis.
    """

    n: int
    k: int
    l: int
    d_max: int
    levels: dict
    coefficients: dict = field(default_factory=dict)

    def __post_init__(self):
        if not 0 <= self.l <= 2 * self.k - 1:
            raise ValueError(f"order l={self.l} outside 0..2k-1")
        for r, per in self.levels.items():
            for d, mu in per.items():
                if d > 2 * self.k - 1:
                    raise ValueError("order exceeds 2k-1")
                if mu.l != d or mu.n != self.n:
                    raise ValueError(f"level {r}: tensor of order {mu.l} stored under {d}")

    @property
    def r_levels(self):
        return sorted(self.levels)

    def aradial(self):
        """Per-level flag: every tensor of the level is aradial."""
        return {r: all(is_aradial(mu, 1e-8) for mu in per.values())
                for r, per in self.levels.items()}

    def forcing(self, r, k=None):
        return Forcing(r, self.k if k is None else k, dict(self.levels[r]))


def bases_for(n, l, d_max):
    """Aradial bases of orders ``0..l``, raising :class:`EmptyBasisError` if one is empty."""
    bases = {}
    for d in range(l + 1):
        b = aradial_basis(n, d, d_max)
        if not b:
            raise EmptyBasisError(
                f"no aradial {d}-tensors with coefficient degree <= {d_max} in R^{n}"
            )
        bases[d] = b
    return bases


def truth_rng(seed, r, d):
    return np.random.default_rng([seed, 1, r, d])


def synthesize(seed, n, k, l, r_levels, d_max, bases=None):
    """Random aradial ground truth with standard-normal coordinates on the aradial bases."""
    if n < 3:
        raise ValueError("the pipeline needs n >= 3")
    if not 0 <= l <= 2 * k - 1:
        raise ValueError(f"order l={l} outside 0..2k-1 for k={k}")
    if any(r < 1 for r in r_levels):
        raise ValueError("levels must be >= 1")
    bases = bases or bases_for(n, l, d_max)
    levels, coeffs = {}, {}
    for r in sorted(r_levels):
        levels[r], coeffs[r] = {}, {}
        for d in range(l + 1):
            c = truth_rng(seed, r, d).standard_normal(len(bases[d]))
            coeffs[r][d] = c
            levels[r][d] = linear_combination(bases[d], c.tolist())
    return PerturbationAsymptotics(n, k, l, d_max, levels, coeffs)


@dataclass
class SymbolDataSet:
    """``values[i, e, a]``: symbol transform at level ``r_levels[i]``, energy ``e``, arc ``a``."""

    r_levels: list
    grid: EnergyGrid
    arcs: list
    values: np.ndarray
    k: int

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        expected = (len(self.r_levels), len(self.grid), len(self.arcs))
        if self.values.shape != expected:
            raise ValueError(f"values have shape {self.values.shape}, expected {expected}")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("symbol data contain non-finite values")

    def level(self, r):
        return self.values[self.r_levels.index(r)]


def forward_data(truth, arcs, grid, rule=None, k=None):
    """Symbol transforms of every level of ``truth`` at every energy and arc."""
    k = truth.k if k is None else k
    arcs = list(arcs)
    vals = np.zeros((len(truth.r_levels), len(grid), len(arcs)), dtype=complex)
    for i, r in enumerate(truth.r_levels):
        f = truth.forcing(r, k)
        for e, lam in enumerate(grid):
            vals[i, e] = symbol_transform_batch(f, arcs, lam, rule)
    return SymbolDataSet(truth.r_levels, grid, arcs, vals, k)


@dataclass
class InjectivityReport:
    rank: int
    min_sv: float
    condition_number: float
    singular_values: np.ndarray


def _svd_report(mat, rank_tol=RANK_TOL):
    sv = np.linalg.svd(mat, compute_uv=False)
    if sv.size == 0 or sv[0] == 0:
        return InjectivityReport(0, 0.0, np.inf, sv)
    rank = int(np.sum(sv > rank_tol * sv[0]))
    cond = sv[0] / sv[-1] if sv[-1] > 0 else np.inf
    return InjectivityReport(rank, float(sv[-1]), float(cond), sv)


def injectivity_report(basis, arcs, j, rule=None, rank_tol=RANK_TOL):
    """Rank, smallest singular value and condition number of the forward matrix."""
    if len(arcs) < len(basis):
        raise ValueError("need at least as many arcs as basis elements")
    return _svd_report(forward_matrix(basis, arcs, j, rule), rank_tol)


@dataclass
class DegreeRecovery:
    d: int
    coefficients: np.ndarray
    residual: float
    cond: float
    rank: int
    min_sv: float


@dataclass
class LevelRecovery:
    r: int
    degrees: dict
    residual: float
    vandermonde_cond: float

    def tensors(self, bases):
        out = {}
        for d, rec in self.degrees.items():
            c = np.real_if_close(rec.coefficients, tol=1e6)
            out[d] = linear_combination(bases[d], c.tolist())
        return out


def _solve(mat, rhs, tikhonov):
    if tikhonov:
        lhs = mat.conj().T @ mat + tikhonov * np.eye(mat.shape[1])
        return np.linalg.solve(lhs, mat.conj().T @ rhs)
    return np.linalg.lstsq(mat, rhs, rcond=None)[0]


def recover_level(values, arcs, bases, grid, k, r, rule=None, tikhonov=0.0, rank_tol=RANK_TOL):
    """Recover the level-``r`` tensors from ``values[e, a]`` (energy x arc).

    ``bases[d]`` lists the basis tensors of order ``d``; the separation uses
    degrees ``0..max(bases)``.
    """
    values = np.asarray(values, dtype=complex)
    arcs = list(arcs)
    degree = max(bases)
    if len(arcs) < max(len(b) for b in bases.values()):
        raise ValueError("fewer arcs than basis elements")
    scale = grid.lambdas ** (2 * k - 1)
    sep = separate_fields(values * scale[:, None], grid, degree)
    out = {}
    num = den = 0.0
    for d in sorted(bases):
        mat = (-1) ** d * forward_matrix(bases[d], arcs, d + r - 1, rule)
        rep = _svd_report(mat, rank_tol)
        if rep.rank < mat.shape[1]:
            raise RankDeficientError(
                f"level {r}, order {d}: forward matrix has rank {rep.rank} < {mat.shape[1]}",
                rep.singular_values, degree=d,
            )
        rhs = sep.coefficients[d]
        x = _solve(mat, rhs, tikhonov)
        miss = np.linalg.norm(mat @ x - rhs)
        size = np.linalg.norm(rhs)
        num += miss**2
        den += size**2
        out[d] = DegreeRecovery(d, x, float(miss / size) if size else float(miss),
                                rep.condition_number, rep.rank, rep.min_sv)
    residual = float(np.sqrt(num / den)) if den else float(np.sqrt(num))
    return LevelRecovery(r, out, residual, sep.condition_number)


def relative_error(estimate, truth):
    estimate, truth = np.asarray(estimate), np.asarray(truth)
    scale = np.linalg.norm(truth)
    miss = np.linalg.norm(estimate - truth)
    return float(miss / scale) if scale else float(miss)


def _parity_counts(basis):
    # every element is constrained at the level's weight (full column rank was checked)
    out = {"even": 0, "odd": 0, "mixed": 0}
    for b in basis:
        out[parity(b)] += 1
    return out


def recover_all(dataset, n, k, l, d_max, rule=None, truth=None, bases=None,
                tikhonov=0.0, rank_tol=RANK_TOL):
    """Run :func:`recover_level` over all levels in increasing ``r``.

    A failing level (too few energies, rank deficiency) is recorded in the
    report and skipped.  Returns ``(PerturbationAsymptotics, report)``; the
    report is a JSON-ready dict.  ``k`` is the operator order the data were
    generated with.
    """
    bases = bases or bases_for(n, l, d_max)
    levels, coeffs, rows = {}, {}, []
    for r in sorted(dataset.r_levels):
        row = {"r": r}
        try:
            rec = recover_level(dataset.level(r), dataset.arcs, bases, dataset.grid,
                                k, r, rule, tikhonov, rank_tol)
        except UnderdeterminedError as exc:
            row.update(status="underdetermined", message=str(exc))
            rows.append(row)
            continue
        except RankDeficientError as exc:
            row.update(status="rank_deficient", message=str(exc), degree=exc.degree,
                       singular_values=[float(s) for s in exc.singular_values])
            rows.append(row)
            continue
        levels[r] = rec.tensors(bases)
        coeffs[r] = {d: dr.coefficients for d, dr in rec.degrees.items()}
        degrees = []
        for d, dr in sorted(rec.degrees.items()):
            err = None
            if truth is not None and r in truth.coefficients:
                err = relative_error(dr.coefficients, truth.coefficients[r][d])
            degrees.append({"d": d, "coeff_error": err, "residual": dr.residual,
                            "cond": dr.cond, "rank": dr.rank, "min_sv": dr.min_sv,
                            "basis_size": len(bases[d]),
                            "parity": _parity_counts(bases[d])})
        row.update(status="ok", degrees=degrees,
                   rank=min(x["rank"] for x in degrees),
                   min_sv=min(x["min_sv"] for x in degrees),
                   residual=rec.residual, vandermonde_cond=rec.vandermonde_cond)
        rows.append(row)
    recovered = PerturbationAsymptotics(n, k, l, d_max, levels, coeffs)
    errors = [x["coeff_error"] for row in rows for x in row.get("degrees", [])
              if x["coeff_error"] is not None]
    report = {
        "n": n, "k": k, "l": l, "d_max": d_max,
        "levels": rows,
        "max_coeff_error": max(errors) if errors else None,
        "failed_levels": [row["r"] for row in rows if row["status"] != "ok"],
    }
    return recovered, report


def radial_potential(n, d):
    """Potential ``d``-tensor invisible to every weighted transform.

    ``grad_s(|z|^2/2 * L^(d-1)) = (z . dz) L^(d-1)`` with ``L = z_1 dz_2 - z_2 dz_1``
    Killing, and it pairs to zero with every great-circle tangent because
    ``gamma . gamma' = 0``.  For ``d = 1`` it is ``grad_s(|z|^2 / 2)``.
    """
    if d < 1:
        raise ValueError("order must be >= 1")
    half_sq = sum((Polynomial.variable(i, n) ** 2 for i in range(n)), Polynomial.zero(n)) / 2
    eta = SymTensorField.scalar(half_sq)
    rot = rotation_field(0, 1, n)
    for _ in range(d - 1):
        eta = symmetric_product(eta, rot)
    return sym_derivative(eta)


def symmetric_product(a, b):
    """Symmetric product in the monomial basis: generating polynomials multiply."""
    if a.n != b.n:
        raise ValueError("dimension mismatch")
    coeffs = {}
    for al, p in a.items():
        for be, q in b.items():
            key = tuple(x + y for x, y in zip(al, be))
            coeffs[key] = coeffs[key] + p * q if key in coeffs else p * q
    return SymTensorField(a.n, a.l + b.l, coeffs)
