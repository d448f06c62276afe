import numpy as np
import pytest

from fraclangevin import (DegenerateDenominatorError, FractionalConfig,
                          LangevinParams, NoiseStream, Path, estimate_ah,
                          expected_fractional_velocity, fractional_velocity,
                          gaussian_increments, kernel_weights,
                          make_kernel_spec, normalized_residual_max, phi,
                          residual_refinement_study, simulate_ou_em,
                          simulate_ou_exact, transformed_langevin_residual,
                          uniform_grid)

SPEC7 = make_kernel_spec(0.7)
SPEC3 = make_kernel_spec(0.3)
PARAMS = LangevinParams(mass=1.0, friction=2.0, sigma=0.5, v0=1.0)

# 1 + int_0^1 K_H(1,s) ds for H = 0.7 (Fubini closed form, mpmath)
ONE_PLUS_KERNEL_MASS_07 = 1.972582966122813


def test_config_rejects_standard_regime():
    with pytest.raises(ValueError):
        FractionalConfig(make_kernel_spec(0.5), 1.0)


def test_phi_values():
    config = FractionalConfig(SPEC7, 2.0)
    assert phi(config, 1.0) == 2.0
    assert phi(config, 4.0) == pytest.approx(2.0 * 4.0**-0.2, rel=1e-14)
    assert phi(FractionalConfig(SPEC7, 0.0), 3.0) == 0.0


def test_phi_rejects_nonpositive_time():
    config = FractionalConfig(SPEC7, 1.0)
    with pytest.raises(ValueError):
        phi(config, 0.0)
    with pytest.raises(ValueError):
        phi(config, -1.0)


def test_transform_zero_amplitude_is_flat():
    grid = uniform_grid(1.0, 64)
    v = simulate_ou_exact(PARAMS, grid, NoiseStream(0))
    out = fractional_velocity(FractionalConfig(SPEC7, 0.0), v)
    assert np.array_equal(out.transformed.values, np.full(65, v.values[0]))


def test_transform_zero_velocity_is_zero():
    grid = uniform_grid(1.0, 64)
    v = Path(grid, np.zeros(65))
    out = fractional_velocity(FractionalConfig(SPEC3, 1.0), v)
    assert np.array_equal(out.transformed.values, np.zeros(65))


def test_transform_constant_velocity_golden():
    grid = uniform_grid(1.0, 1024)
    v = Path(grid, np.ones(1025))
    out = fractional_velocity(FractionalConfig(SPEC7, 1.0), v)
    assert out.transformed.values[0] == 1.0
    assert out.transformed.values[-1] == pytest.approx(
        ONE_PLUS_KERNEL_MASS_07, rel=1e-3)


def test_transform_starts_at_initial_velocity():
    grid = uniform_grid(1.0, 32)
    v = simulate_ou_exact(PARAMS, grid, NoiseStream(5))
    out = fractional_velocity(FractionalConfig(SPEC3, 2.0), v)
    assert out.transformed.values[0] == v.values[0]
    assert out.base is v


def test_transform_linearity():
    grid = uniform_grid(1.0, 64)
    p0 = LangevinParams(mass=1.0, friction=2.0, sigma=0.5, v0=0.0)
    v = simulate_ou_exact(p0, grid, NoiseStream(6))
    config = FractionalConfig(SPEC7, 1.3)
    one = fractional_velocity(config, v).transformed.values
    doubled = fractional_velocity(config, Path(grid, 2.0 * v.values))
    assert np.array_equal(doubled.transformed.values, 2.0 * one)
    tripled = fractional_velocity(config, Path(grid, 3.0 * v.values))
    assert np.allclose(tripled.transformed.values, 3.0 * one, rtol=1e-12)


def test_expected_transform_degenerate_cases():
    config = FractionalConfig(SPEC7, 1.0)
    zero_start = LangevinParams(mass=1.0, friction=2.0, sigma=0.5, v0=0.0)
    assert expected_fractional_velocity(config, zero_start, 1.0, 64) == 0.0
    flat = FractionalConfig(SPEC7, 0.0)
    assert expected_fractional_velocity(flat, PARAMS, 1.0, 64) == PARAMS.v0


def test_expected_transform_validates_input():
    config = FractionalConfig(SPEC7, 1.0)
    with pytest.raises(ValueError):
        expected_fractional_velocity(config, PARAMS, 0.0, 64)
    with pytest.raises(ValueError):
        expected_fractional_velocity(config, PARAMS, 1.0, 8)


def test_residual_noiseless_shrinks_with_refinement():
    quiet = LangevinParams(mass=1.0, friction=2.0, sigma=0.0, v0=1.0)
    maxima = {}
    for n in (128, 512):
        grid = uniform_grid(1.0, n)
        v = simulate_ou_em(quiet, grid, np.zeros(n))
        res = transformed_langevin_residual(SPEC7, quiet, v, np.zeros(n))
        maxima[n] = np.abs(res.values).max()
    # quadrature error of the noiseless identity decays like the mesh
    assert maxima[512] < maxima[128] / 2
    assert maxima[512] < 5e-3


def test_residual_normalized_small_at_desk_resolution():
    grid = uniform_grid(1.0, 1024)
    db = gaussian_increments(grid, NoiseStream(7))
    v = simulate_ou_em(PARAMS, grid, db)
    assert normalized_residual_max(SPEC7, PARAMS, v, db) <= 0.05


def test_residual_rejects_mismatched_increments():
    grid = uniform_grid(1.0, 64)
    v = simulate_ou_em(PARAMS, grid, np.zeros(64))
    with pytest.raises(ValueError):
        transformed_langevin_residual(SPEC7, PARAMS, v, np.zeros(63))


def test_residual_study_improves_with_refinement():
    study = residual_refinement_study(SPEC7, PARAMS, 1.0, [256, 1024], 8,
                                      NoiseStream(8))
    assert set(study) == {256, 1024}
    assert (study[1024] < study[256]).mean() >= 0.75
    assert study[1024].max() <= 0.05


def test_residual_study_rejects_nondivisible_counts():
    with pytest.raises(ValueError):
        residual_refinement_study(SPEC7, PARAMS, 1.0, [100, 1024], 4,
                                  NoiseStream(0))


@pytest.mark.parametrize("spec", [SPEC7, SPEC3])
def test_amplitude_round_trip(spec):
    grid = uniform_grid(1.0, 256)
    v = simulate_ou_exact(PARAMS, grid, NoiseStream(9))
    observed = fractional_velocity(FractionalConfig(spec, 1.0), v).transformed
    assert estimate_ah(spec, observed, v) == pytest.approx(1.0, rel=1e-6)


def test_amplitude_single_time_is_ratio_formula():
    grid = uniform_grid(0.5, 1)
    v = Path(grid, np.array([1.0, 0.8]))
    observed = Path(grid, np.array([1.0, 1.25]))
    est = estimate_ah(SPEC7, observed, v)
    vmid = 0.9
    w = kernel_weights(SPEC7, 0.5, grid).weights
    expect = 0.5 ** (0.7 - 0.5) * (1.25 - 1.0) / (w[0] * vmid)
    assert est == pytest.approx(expect, rel=1e-12)


def test_amplitude_robust_to_small_observation_noise():
    grid = uniform_grid(1.0, 256)
    errs = []
    for k in range(20):
        v = simulate_ou_exact(PARAMS, grid, NoiseStream(10, k))
        observed = fractional_velocity(FractionalConfig(SPEC7, 1.0), v).transformed
        noisy = observed.values * (
            1.0 + 1e-3 * NoiseStream(11, k).generator().standard_normal(257))
        noisy[0] = observed.values[0]
        est = estimate_ah(SPEC7, Path(grid, noisy), v)
        errs.append(abs(est - 1.0))
    assert max(errs) <= 0.01


def test_amplitude_degenerate_denominator():
    grid = uniform_grid(1.0, 16)
    zero = Path(grid, np.zeros(17))
    with pytest.raises(DegenerateDenominatorError, match="t="):
        estimate_ah(SPEC7, zero, zero)


def test_amplitude_rejects_grid_mismatch():
    v = Path(uniform_grid(1.0, 16), np.ones(17))
    observed = Path(uniform_grid(2.0, 16), np.ones(17))
    with pytest.raises(ValueError):
        estimate_ah(SPEC7, observed, v)
