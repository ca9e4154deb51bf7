"""Discretized transfer operator: exact cell masses, kernel structure,
evolution, TV distances, mixing-time search, worst-case distances, set
probabilities, and heatmap export.

Cell-mass references were computed with scipy.integrate.dblquad on the
unnormalized density and frozen (n = 50, a = 10); the operator itself
never uses quadrature.
"""

import json
import math

import numpy as np
import pytest

from diagonal_gibbs import (
    CORNER_BOXES,
    GridDistribution,
    GridError,
    MixingNotConverged,
    ModelParams,
    build_discretized_target,
    build_kernel_1d,
    evolve_2d,
    export_heatmap,
    find_mixing_time,
    point_mass,
    set_probability,
    tv_distance,
    worst_case_distance_d,
    worst_case_distance_dbar,
)


# ----------------------------------------------------------------------
# grid distribution bookkeeping
# ----------------------------------------------------------------------

def test_grid_distribution_validation():
    with pytest.raises(GridError):
        GridDistribution(4, np.full((4, 4), -1.0 / 16.0))
    with pytest.raises(GridError):
        GridDistribution(4, np.full((4, 4), 1.0))  # sums to 16
    with pytest.raises(GridError):
        GridDistribution(4, np.full((3, 3), 1.0 / 9.0))  # shape mismatch
    one_d = GridDistribution(5, np.full(5, 0.2))
    assert one_d.ndim == 1
    two_d = GridDistribution(2, np.full((2, 2), 0.25))
    assert two_d.ndim == 2


def test_point_mass_cell_selection():
    dist = point_mass(0.0, 0.999, 10)
    assert dist.weights[0, 9] == 1.0
    # the right edge belongs to the last cell
    dist = point_mass(1.0, 1.0, 10)
    assert dist.weights[9, 9] == 1.0


# ----------------------------------------------------------------------
# discretized target
# ----------------------------------------------------------------------

def test_target_uniform_limit():
    dist = build_discretized_target(ModelParams(1e-8), 40)
    assert np.max(np.abs(dist.weights - 1.0 / 1600.0)) < 1e-10 / 1600.0


def test_target_symmetries_exact():
    w = build_discretized_target(ModelParams(10.0), 64).weights
    assert np.array_equal(w, w.T)
    assert np.array_equal(w, w[::-1, ::-1])


def test_target_cell_masses_match_quadrature():
    # frozen oracle: dblquad of exp(-100 (u-v)^2) over the cell divided by
    # the dblquad normalizer over the square, n = 50
    w = build_discretized_target(ModelParams(10.0), 50).weights
    refs = {
        (0, 0): 0.002375877307547686,
        (5, 5): 0.0023758773075476833,
        (10, 3): 0.0003434176158171103,
    }
    for (i, j), ref in refs.items():
        assert w[i, j] == pytest.approx(ref, rel=1e-10)


def test_target_corner_set_has_stationary_mass():
    # the two corner squares hold at least 1/8 of the target at any a,
    # and their mass grows with concentration
    masses = []
    for a in (0.01, 1.0, 10.0, 50.0):
        target = build_discretized_target(ModelParams(a), 200)
        masses.append(set_probability(target, CORNER_BOXES))
    assert all(m >= 0.125 - 1e-12 for m in masses)
    assert all(b >= a - 1e-12 for a, b in zip(masses, masses[1:]))


def test_target_requires_valid_n():
    with pytest.raises(GridError):
        build_discretized_target(ModelParams(10.0), 1)


# ----------------------------------------------------------------------
# one-dimensional kernel
# ----------------------------------------------------------------------

def test_kernel_rows_stochastic():
    kernel = build_kernel_1d(ModelParams(10.0), 100)
    sums = kernel.matrix.sum(axis=1)
    assert np.max(np.abs(sums - 1.0)) < 1e-12


def test_kernel_uniform_limit():
    kernel = build_kernel_1d(ModelParams(1e-8), 50)
    assert np.max(np.abs(kernel.matrix - 0.02)) < 1e-10


def test_kernel_detailed_balance():
    kernel = build_kernel_1d(ModelParams(10.0), 80)
    flow = kernel.marginal[:, None] * kernel.matrix
    assert np.max(np.abs(flow - flow.T)) < 1e-12


def test_kernel_fixes_marginal():
    kernel = build_kernel_1d(ModelParams(10.0), 80)
    pushed = kernel.marginal @ kernel.matrix
    assert 0.5 * np.abs(pushed - kernel.marginal).sum() < 1e-12


# ----------------------------------------------------------------------
# two-dimensional evolution
# ----------------------------------------------------------------------

def test_stationarity_fixed_point_small():
    for a in (1.0, 10.0):
        params = ModelParams(a)
        target = build_discretized_target(params, 100)
        stepped = evolve_2d(target, 1, params)
        assert tv_distance(stepped, target) < 1e-12


def test_one_step_moves_exactly_one_coordinate():
    params = ModelParams(10.0)
    stepped = evolve_2d(point_mass(0.0, 0.0, 50), 1, params)
    w = stepped.weights
    on_cross = w[0, :].sum() + w[:, 0].sum() - w[0, 0]
    assert on_cross == pytest.approx(1.0, abs=1e-12)


def test_mass_conservation_without_renormalization():
    params = ModelParams(10.0)
    rng = np.random.default_rng(3)
    raw = rng.random((100, 100))
    dist = GridDistribution(100, raw / raw.sum())
    stepped = evolve_2d(dist, 1, params, renormalize=False)
    assert abs(stepped.weights.sum() - 1.0) < 1e-14


def test_evolution_keeps_normalization():
    params = ModelParams(10.0)
    rng = np.random.default_rng(4)
    raw = rng.random((60, 60))
    dist = GridDistribution(60, raw / raw.sum())
    out = evolve_2d(dist, 200, params)
    assert abs(out.weights.sum() - 1.0) < 1e-12
    assert np.all(out.weights >= 0.0)


# ----------------------------------------------------------------------
# TV distance
# ----------------------------------------------------------------------

def test_tv_identity_and_disjoint():
    p = point_mass(0.1, 0.1, 20)
    q = point_mass(0.9, 0.9, 20)
    assert tv_distance(p, p) == 0.0
    assert tv_distance(p, q) == 1.0


def test_tv_half_overlap():
    w1 = np.zeros(10)
    w1[2:4] = 0.5
    w2 = np.zeros(10)
    w2[3:5] = 0.5
    assert tv_distance(GridDistribution(10, w1), GridDistribution(10, w2)) == 0.5


def test_tv_shape_mismatch():
    p = point_mass(0.1, 0.1, 20)
    q = point_mass(0.1, 0.1, 30)
    with pytest.raises(GridError):
        tv_distance(p, q)


# ----------------------------------------------------------------------
# mixing-time search
# ----------------------------------------------------------------------

def test_mixing_time_validates_epsilon():
    with pytest.raises(GridError):
        find_mixing_time((0.0, 0.0), 0.0, ModelParams(10.0), 50, 100)
    with pytest.raises(GridError):
        find_mixing_time((0.0, 0.0), 1.0, ModelParams(10.0), 50, 100)


def test_mixing_time_immediate_when_flat():
    # near-uniform target: a point mass is 1 - 1/n^2 away, but one step
    # lands essentially at the target
    result = find_mixing_time((0.5, 0.5), 0.9999, ModelParams(1e-8), 20, 10)
    assert result.t_mix == 0


def test_mixing_time_matches_across_grids():
    # the a = 10 headline number is grid-stable
    r200 = find_mixing_time((0.0, 0.0), 0.25, ModelParams(10.0), 200, 2000)
    assert r200.t_mix == 71
    r301 = find_mixing_time((0.0, 0.0), 0.25, ModelParams(10.0), 301, 2000)
    assert abs(r301.t_mix - r200.t_mix) <= 2


def test_mixing_time_grid_convergence():
    # under 3% drift between n = 500 and n = 1000
    t500 = find_mixing_time((0.0, 0.0), 0.25, ModelParams(10.0), 500, 2000).t_mix
    t1000 = find_mixing_time((0.0, 0.0), 0.25, ModelParams(10.0), 1000, 2000).t_mix
    assert abs(t1000 - t500) / t500 < 0.03


def test_tv_curve_nonincreasing():
    result = find_mixing_time((0.0, 0.0), 0.25, ModelParams(10.0), 150, 2000)
    curve = np.asarray(result.tv_curve, dtype=float)
    assert np.all(np.diff(curve) <= 1e-10)
    assert curve[-1] <= 0.25


def test_mixing_not_converged_carries_curve():
    with pytest.raises(MixingNotConverged) as err:
        find_mixing_time((0.0, 0.0), 0.25, ModelParams(50.0), 100, 30)
    assert len(err.value.tv_curve) == 31
    assert err.value.tv_curve[-1] > 0.25


def test_mixing_result_serialization(tmp_path):
    result = find_mixing_time((0.0, 0.0), 0.25, ModelParams(10.0), 100, 2000)
    d = result.as_dict()
    assert d["t_mix"] == result.t_mix
    assert d["a"] == 10.0 and d["n"] == 100
    csv_path = tmp_path / "curve.csv"
    result.tv_curve_csv(csv_path)
    lines = csv_path.read_text().splitlines()
    assert lines[0] == "t,tv"
    assert len(lines) == result.t_mix + 2
    t_last, tv_last = lines[-1].split(",")
    assert int(t_last) == result.t_mix
    assert float(tv_last) <= 0.25


# ----------------------------------------------------------------------
# worst-case distances
# ----------------------------------------------------------------------

def test_worst_case_d_at_zero():
    params = ModelParams(10.0)
    kernel = build_kernel_1d(params, 100)
    expected = 1.0 - float(kernel.marginal.min())
    assert worst_case_distance_d(0, params, 100) == pytest.approx(expected, abs=1e-14)


def test_worst_case_d_nonincreasing():
    params = ModelParams(10.0)
    values = [worst_case_distance_d(t, params, 80) for t in (1, 2, 4, 8, 16)]
    assert all(b <= a + 1e-12 for a, b in zip(values, values[1:]))


def test_worst_case_d_decays_on_chain_scale():
    # d(10 a^2) is already below 4/9 at a = 10, n = 200
    params = ModelParams(10.0)
    assert worst_case_distance_d(1000, params, 200) < 4.0 / 9.0


def test_dbar_at_zero_and_sandwich():
    params = ModelParams(10.0)
    dbar_0, dbar_t, _ = worst_case_distance_dbar(0, 10, params, 60)
    assert dbar_0 == 1.0
    d_t = worst_case_distance_d(10, params, 60)
    assert d_t <= dbar_t + 1e-12
    assert dbar_t <= 2.0 * d_t + 1e-12


def test_dbar_submultiplicative_small():
    params = ModelParams(10.0)
    dbar_s, dbar_t, dbar_st = worst_case_distance_dbar(40, 60, params, 60)
    assert dbar_st <= dbar_s * dbar_t * (1.0 + 1e-9)


def test_dbar_rejects_large_grids():
    with pytest.raises(GridError):
        worst_case_distance_dbar(1, 1, ModelParams(10.0), 500)


# ----------------------------------------------------------------------
# set probabilities
# ----------------------------------------------------------------------

def test_set_probability_full_square():
    dist = build_discretized_target(ModelParams(10.0), 40)
    assert set_probability(dist, [(0.0, 1.0, 0.0, 1.0)]) == pytest.approx(1.0, abs=1e-12)


def test_set_probability_uniform_corners():
    uniform = GridDistribution(40, np.full((40, 40), 1.0 / 1600.0))
    assert set_probability(uniform, CORNER_BOXES) == pytest.approx(0.125, abs=1e-12)


def test_set_probability_partial_cells():
    # a box cutting cells in half is weighted proportionally
    uniform = GridDistribution(4, np.full((4, 4), 1.0 / 16.0))
    assert set_probability(uniform, [(0.0, 0.125, 0.0, 1.0)]) == pytest.approx(
        0.125, abs=1e-12
    )


def test_set_probability_rejects_bad_boxes():
    dist = build_discretized_target(ModelParams(10.0), 20)
    with pytest.raises(GridError):
        set_probability(dist, [(0.5, 0.4, 0.0, 1.0)])
    with pytest.raises(GridError):
        set_probability(dist, [(0.0, 1.5, 0.0, 1.0)])


# ----------------------------------------------------------------------
# heatmap export
# ----------------------------------------------------------------------

def test_heatmap_header_and_size(tmp_path):
    dist = build_discretized_target(ModelParams(10.0), 64)
    path = tmp_path / "target.pgm"
    export_heatmap(dist, path, ModelParams(10.0))
    raw = path.read_bytes()
    header = b"P5\n64 64\n65535\n"
    assert raw.startswith(header)
    assert len(raw) == len(header) + 2 * 64 * 64
    sidecar = json.loads((tmp_path / "target.pgm.json").read_text())
    assert sidecar["n"] == 64
    assert sidecar["a"] == 10.0
    assert "version" in sidecar


def test_heatmap_uniform_is_constant(tmp_path):
    uniform = GridDistribution(16, np.full((16, 16), 1.0 / 256.0))
    path = tmp_path / "flat.pgm"
    export_heatmap(uniform, path)
    raw = path.read_bytes()
    pixels = np.frombuffer(raw[raw.index(b"65535\n") + 6 :], dtype=">u2")
    assert pixels.size == 256
    assert np.all(pixels == pixels[0])


def test_heatmap_darker_is_higher(tmp_path):
    dist = build_discretized_target(ModelParams(10.0), 32)
    path = tmp_path / "band.pgm"
    export_heatmap(dist, path)
    raw = path.read_bytes()
    pixels = np.frombuffer(raw[raw.index(b"65535\n") + 6 :], dtype=">u2").reshape(32, 32)
    # the diagonal holds the highest density, hence the darkest pixels
    assert pixels[16, 16] < pixels[16, 0]
    assert pixels.min() == pixels.diagonal().min()


def test_heatmap_rejects_one_dimensional(tmp_path):
    one_d = GridDistribution(8, np.full(8, 0.125))
    with pytest.raises(GridError):
        export_heatmap(one_d, tmp_path / "bad.pgm")


def test_heatmap_diagonal_ridge_after_evolution(tmp_path):
    # high concentration from a corner start: the evolved density rides the
    # diagonal; row argmax stays within 3 cells of it for middle rows
    params = ModelParams(250.0)
    n = 250
    dist = evolve_2d(point_mass(0.0, 0.0, n), 10_000, params)
    path = tmp_path / "ridge.pgm"
    export_heatmap(dist, path, params)
    raw = path.read_bytes()
    pixels = np.frombuffer(raw[raw.index(b"65535\n") + 6 :], dtype=">u2").reshape(n, n)
    for i in range(n // 4, 3 * n // 4):
        assert abs(int(np.argmin(pixels[i])) - i) <= 3
