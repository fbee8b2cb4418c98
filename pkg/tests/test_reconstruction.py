import numpy as np
import pytest

from scatxray.energy import EnergyGrid, UnderdeterminedError, separate_degrees
from scatxray.polynomial import Polynomial
from scatxray.reconstruction import (
    EmptyBasisError, PerturbationAsymptotics, RankDeficientError, SymbolDataSet, bases_for,
    forward_data, injectivity_report, radial_potential, recover_all, recover_level,
    relative_error, symmetric_product, synthesize,
)
from scatxray.sphere import sample_arcs
from scatxray.tensors import (
    SymTensorField, aradial_basis, multiply_poly, parity, rotation_field, sym_derivative,
)
from scatxray.xray import forward_matrix

N = 3


@pytest.fixture(scope="module")
def setup():
    n, k, l, d_max = N, 2, 1, 2
    bases = bases_for(n, l, d_max)
    truth = synthesize(3, n, k, l, [1, 2], d_max, bases)
    arcs = sample_arcs(3 * max(len(b) for b in bases.values()), n, 3)
    grid = EnergyGrid.default(l + 1)
    data = forward_data(truth, arcs, grid)
    return n, k, l, d_max, bases, truth, arcs, grid, data


def test_synthesize_deterministic_and_aradial():
    a = synthesize(1, N, 2, 2, [1, 3], 2)
    b = synthesize(1, N, 2, 2, [1, 3], 2)
    assert a.levels == b.levels
    assert all(a.aradial().values())
    assert sorted(a.levels) == [1, 3] and sorted(a.levels[1]) == [0, 1, 2]
    c = synthesize(2, N, 2, 2, [1, 3], 2)
    assert c.levels != a.levels


def test_synthesize_scalar_only_for_l0():
    t = synthesize(0, N, 1, 0, [1, 2], 3)
    assert all(set(per) == {0} for per in t.levels.values())
    assert all(mu.l == 0 for per in t.levels.values() for mu in per.values())


def test_synthesize_validation():
    with pytest.raises(ValueError):
        synthesize(0, N, 1, 2, [1], 2)        # l > 2k - 1
    with pytest.raises(ValueError):
        synthesize(0, 2, 1, 0, [1], 2)
    with pytest.raises(ValueError):
        synthesize(0, N, 1, 1, [0], 2)
    with pytest.raises(EmptyBasisError):
        synthesize(0, N, 2, 2, [1], 0)        # no aradial 1- or 2-tensors with constant coefficients


def test_basis_parity_classes_are_pure():
    for basis in bases_for(N, 2, 3).values():
        assert all(parity(b) in ("even", "odd") for b in basis)


def test_forward_zero_truth_and_single_level():
    zero = PerturbationAsymptotics(N, 1, 0, 1, {1: {0: SymTensorField.zero(N, 0)}})
    arcs = sample_arcs(4, N, 1)
    data = forward_data(zero, arcs, EnergyGrid.default(1))
    assert np.all(data.values == 0)
    basis = aradial_basis(N, 0, 1)
    truth = PerturbationAsymptotics(N, 1, 0, 1, {
        1: {0: basis[0]}, 2: {0: SymTensorField.zero(N, 0)}})
    data = forward_data(truth, arcs, EnergyGrid.default(1))
    assert np.all(data.level(2) == 0) and np.any(data.level(1) != 0)


def test_forward_linear_in_truth(setup):
    n, k, l, d_max, bases, truth, arcs, grid, data = setup
    other = synthesize(9, n, k, l, [1, 2], d_max, bases)
    comb = PerturbationAsymptotics(n, k, l, d_max, {
        r: {d: truth.levels[r][d] * 2.0 + other.levels[r][d] * (-3.0) for d in truth.levels[r]}
        for r in truth.levels})
    lhs = forward_data(comb, arcs, grid).values
    rhs = 2.0 * data.values - 3.0 * forward_data(other, arcs, grid).values
    assert np.max(np.abs(lhs - rhs)) < 1e-12 * max(1.0, np.max(np.abs(rhs)))


def test_dataset_validation(setup):
    *_, grid, data = setup
    with pytest.raises(ValueError):
        SymbolDataSet([1], grid, data.arcs, data.values, data.k)
    bad = data.values.copy()
    bad[0, 0, 0] = np.nan
    with pytest.raises(ValueError):
        SymbolDataSet(data.r_levels, grid, data.arcs, bad, data.k)


def test_recover_level_round_trip(setup):
    n, k, l, d_max, bases, truth, arcs, grid, data = setup
    rec = recover_level(data.level(1), arcs, bases, grid, k, 1)
    for d in bases:
        assert relative_error(rec.degrees[d].coefficients, truth.coefficients[1][d]) < 1e-6
        assert rec.degrees[d].rank == len(bases[d])
    assert rec.residual < 1e-10


def test_recover_level_zero_data(setup):
    n, k, l, d_max, bases, truth, arcs, grid, data = setup
    rec = recover_level(np.zeros_like(data.level(1)), arcs, bases, grid, k, 2)
    assert rec.residual == 0
    assert all(np.all(r.coefficients == 0) for r in rec.degrees.values())


def test_recover_level_rejects_too_few_arcs(setup):
    n, k, l, d_max, bases, truth, arcs, grid, data = setup
    with pytest.raises(ValueError):
        recover_level(data.level(1)[:, :3], arcs[:3], bases, grid, k, 1)


def test_out_of_span_tensor_leaves_residual(setup):
    n, k, l, d_max, bases, truth, arcs, grid, data = setup
    # an aradial 1-tensor with degree-4 coefficients is outside the d_max = 2 span
    x = Polynomial.variable(2, n)
    high = multiply_poly(x ** 3, rotation_field(0, 1, n))
    lvl = PerturbationAsymptotics(n, k, l, d_max, {1: {0: SymTensorField.zero(n, 0), 1: high}})
    vals = forward_data(lvl, arcs, grid).level(1)
    rec = recover_level(vals, arcs, bases, grid, k, 1)
    assert rec.degrees[1].residual > 1e-3


def test_recover_all_matches_recover_level(setup):
    n, k, l, d_max, bases, truth, arcs, grid, data = setup
    single = SymbolDataSet([1], grid, arcs, data.values[:1], k)
    recovered, report = recover_all(single, n, k, l, d_max, truth=truth, bases=bases)
    rec = recover_level(data.level(1), arcs, bases, grid, k, 1)
    for d in bases:
        assert np.array_equal(recovered.coefficients[1][d], rec.degrees[d].coefficients)
    row = report["levels"][0]
    assert row["status"] == "ok" and {"r", "degrees", "rank", "min_sv"} <= set(row)
    assert {"d", "coeff_error", "residual", "cond"} <= set(row["degrees"][0])


def test_recover_all_marks_underdetermined_and_continues(setup):
    n, k, l, d_max, bases, truth, arcs, grid, data = setup
    short = SymbolDataSet(data.r_levels, EnergyGrid.default(l), arcs, data.values[:, :l], k)
    _, report = recover_all(short, n, k, l, d_max, bases=bases)
    assert report["failed_levels"] == [1, 2]
    assert all(row["status"] == "underdetermined" for row in report["levels"])


def test_energy_count_sharpness():
    grid_short, grid_ok = EnergyGrid.default(2), EnergyGrid.default(3)
    with pytest.raises(UnderdeterminedError):
        separate_degrees(np.ones(2), grid_short, 2)
    separate_degrees(np.ones(3), grid_ok, 2)


def test_noise_degrades_within_condition_bound(setup):
    n, k, l, d_max, bases, truth, arcs, grid, data = setup
    sigma = 1e-8
    rng = np.random.default_rng(0)
    noise = sigma * (rng.standard_normal(data.values.shape) + 1j * rng.standard_normal(data.values.shape))
    noisy = SymbolDataSet(data.r_levels, grid, arcs, data.values + noise, k)
    _, report = recover_all(noisy, n, k, l, d_max, truth=truth, bases=bases)
    for i, row in enumerate(report["levels"]):
        ratio = np.linalg.norm(noise[i]) / np.linalg.norm(data.values[i])
        for x in row["degrees"]:
            bound = 10 * x["cond"] * row["vandermonde_cond"] * ratio
            assert x["coeff_error"] < bound
            assert x["coeff_error"] > 0


def test_tikhonov_option(setup):
    n, k, l, d_max, bases, truth, arcs, grid, data = setup
    rec = recover_level(data.level(1), arcs, bases, grid, k, 1, tikhonov=1e-12)
    assert relative_error(rec.degrees[1].coefficients, truth.coefficients[1][1]) < 1e-6


def test_injectivity_report_examples():
    arcs = sample_arcs(40, N, 5)
    rep = injectivity_report([rotation_field(0, 1, N)], arcs, 1)
    assert rep.rank == 1
    basis = aradial_basis(N, 1, 2)
    rep = injectivity_report(basis, sample_arcs(5 * len(basis), N, 6), 1)
    assert rep.rank == len(basis) and rep.min_sv > 0
    with pytest.raises(ValueError):
        injectivity_report(basis, arcs[:2], 1)


def test_potential_direction_at_zero_weight_is_detected():
    x = [Polynomial.variable(i, N) for i in range(N)]
    basis = aradial_basis(N, 1, 2)
    extra = sym_derivative(SymTensorField.scalar(x[0] * x[1]))
    rep = injectivity_report(basis + [extra], sample_arcs(5 * len(basis), N, 2), 0)
    assert rep.singular_values[-1] < 1e-8 * rep.singular_values[0]
    assert rep.rank == len(basis)


def test_radial_potential_is_invisible_and_a_potential():
    arcs = sample_arcs(8, N, 4)
    for d in (1, 2, 3):
        t = radial_potential(N, d)
        for j in (0, d, d + 2):
            assert np.max(np.abs(forward_matrix([t], arcs, j))) < 1e-13
    x = [Polynomial.variable(i, N) for i in range(N)]
    z_dz = SymTensorField(N, 1, {(1, 0, 0): x[0], (0, 1, 0): x[1], (0, 0, 1): x[2]})
    assert radial_potential(N, 1) == z_dz
    assert radial_potential(N, 2) == symmetric_product(z_dz, rotation_field(0, 1, N))


def test_injected_potential_raises_rank_deficiency(setup):
    n, k, l, d_max, bases, truth, arcs, grid, data = setup
    aug = {d: b + ([radial_potential(n, d)] if d else []) for d, b in bases.items()}
    with pytest.raises(RankDeficientError) as info:
        recover_level(data.level(1), arcs, aug, grid, k, 1)
    sv = info.value.singular_values
    assert sv[-1] < 1e-8 * sv[0] and info.value.degree == 1
    _, report = recover_all(data, n, k, l, d_max, bases=aug)
    assert [row["status"] for row in report["levels"]] == ["rank_deficient"] * 2
