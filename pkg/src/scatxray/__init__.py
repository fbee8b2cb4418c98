"""Weighted X-ray transforms of tensor fields on the sphere, scattering-symbol
transport, multi-energy separation and recovery of aradial perturbations."""

from .boundary import (
    RadialOperator, RadialSeries, apply_operator, c_alpha, eigen_potential, formal_solution,
    q_factorization_check,
)
from .energy import EnergyGrid, SingularGridError, UnderdeterminedError, energies_required, separate_degrees, separate_fields
from .polynomial import Polynomial
from .reconstruction import (
    PerturbationAsymptotics, RankDeficientError, SymbolDataSet, bases_for, forward_data,
    injectivity_report, radial_potential, recover_all, recover_level, synthesize,
)
from .sphere import GreatCircleArc, gauss_legendre, sample_arcs
from .tensors import (
    SymTensorField, aradial_basis, is_aradial, linear_combination, pair, parity, radial_contraction,
    sym_derivative,
)
from .transport import Forcing, solve_curved_transport, solve_flat_transport, symbol_transform
from .xray import component_form_value, forward_matrix, shifted_xray, weighted_xray

__version__ = "0.1.0"

__all__ = [
    "EnergyGrid",
    "Forcing",
    "GreatCircleArc",
    "PerturbationAsymptotics",
    "Polynomial",
    "RadialOperator",
    "RadialSeries",
    "RankDeficientError",
    "SingularGridError",
    "SymTensorField",
    "SymbolDataSet",
    "UnderdeterminedError",
    "apply_operator",
    "aradial_basis",
    "bases_for",
    "c_alpha",
    "component_form_value",
    "eigen_potential",
    "energies_required",
    "formal_solution",
    "forward_data",
    "forward_matrix",
    "gauss_legendre",
    "injectivity_report",
    "is_aradial",
    "linear_combination",
    "pair",
    "parity",
    "q_factorization_check",
    "radial_contraction",
    "radial_potential",
    "recover_all",
    "recover_level",
    "sample_arcs",
    "separate_degrees",
    "separate_fields",
    "shifted_xray",
    "solve_curved_transport",
    "solve_flat_transport",
    "sym_derivative",
    "symbol_transform",
    "synthesize",
    "weighted_xray",
]
