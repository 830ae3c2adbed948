import math

import numpy as np
import pytest

from fnslab import besov as bz
from fnslab.construction import (
    InflationConfig,
    ParameterWarning,
    PlaneWave,
    build_u0,
    constraints_ok,
    heat_sum,
    initial_atoms,
    lacunarity_ratios,
    predicted_bounds,
    required_dims,
    smallness_indicator,
    validate_parameters,
    wave_vectors,
)
from fnslab.lattice import Lattice
from fnslab.spectral import divergence_linf, linf_norm


def test_plane_wave_invariants():
    w = PlaneWave((4, 0, 0), (0.0, 0.0, 1.0))
    assert w.modulus == 4.0
    with pytest.raises(ValueError):
        PlaneWave((4, 0, 0), (1.0, 0.0, 0.0))  # k.v != 0
    with pytest.raises(ValueError):
        PlaneWave((4, 0, 0), (0.0, 0.0, 2.0))  # not unit


def test_wave_vectors_doubling():
    kv = wave_vectors(3, 4)
    assert [tuple(k) for k, _ in kv] == [(4, 0, 0), (8, 0, 0), (16, 0, 0)]
    assert [tuple(kp) for _, kp in kv] == [(4, 0, 1), (8, 0, 1), (16, 0, 1)]


def test_wave_vectors_smallest():
    kv = wave_vectors(1, 1)
    assert tuple(kv[0][0]) == (1, 0, 0)
    assert tuple(kv[0][1]) == (1, 0, 1)


def test_orthogonality_table():
    v = np.array([0.0, 0.0, 1.0])
    vp = np.array([0.0, 1.0, 0.0])
    for k, kp in wave_vectors(4, 3):
        assert k @ v == 0
        assert kp @ vp == 0
        assert k @ vp == 0
        assert kp @ v == 1


def test_initial_data_weights():
    # r=1, K=2, beta=0.4: prefactor r^-beta = 1, both waves weighted |k1|^alpha
    cfg = InflationConfig(r=1, alpha=1.0, beta=0.4, K_override=2)
    lat = Lattice((16, 1, 8))
    u0 = build_u0(cfg, lat)
    assert u0.mode((2, 0, 0))[2].real == pytest.approx(1.0)   # 2 * 1/2
    assert u0.mode((2, 0, 1))[1].real == pytest.approx(1.0)   # |k1|^a, not |k1'|^a
    assert u0.mode((2, 0, 1))[2] == 0.0


def test_initial_data_solenoidal_and_mean_zero():
    cfg = InflationConfig(r=3, alpha=1.25, beta=0.45, K_override=4)
    lat = Lattice(required_dims(cfg))
    u0 = build_u0(cfg, lat)
    assert divergence_linf(u0) < 1e-12
    assert np.abs(u0.mean()).max() == 0.0


def test_initial_data_sup_bound_recorded():
    cfg = InflationConfig(r=2, alpha=1.0, beta=0.4, K_override=4)
    lat = Lattice(required_dims(cfg))
    u0 = build_u0(cfg, lat)
    bound = 2.0 * cfg.r ** (-cfg.beta) * sum(
        m ** cfg.alpha for m in cfg.wave_magnitudes
    )
    assert linf_norm(u0) <= bound * (1 + 1e-12)


def test_build_u0_unresolved_mode_reports_requirement():
    cfg = InflationConfig(r=4, alpha=1.0, beta=0.45, K_override=4)
    with pytest.raises(ValueError, match="need N1 >="):
        build_u0(cfg, Lattice((16, 1, 8)))


def test_atoms_superpose_to_initial_data():
    from fnslab.lattice import SpectralField

    cfg = InflationConfig(r=2, alpha=1.0, beta=0.45, K_override=4)
    lat = Lattice(required_dims(cfg))
    u0 = build_u0(cfg, lat)
    acc = SpectralField.zeros(lat)
    for w, atom in initial_atoms(cfg):
        acc.add_wave(atom.k, w * np.asarray(atom.v), phase=atom.phase)
    assert np.array_equal(acc.coeffs, u0.coeffs)


# ---------------------------------------------------------------------------
# parameter admissibility


def test_gamma_threshold_value():
    cfg = InflationConfig(r=4, alpha=1.0, beta=0.45)
    assert cfg.gamma_lower_bound == pytest.approx((1 - 0.9) / (1 - 0.5))
    assert cfg.gamma_lower_bound == pytest.approx(0.2)


def test_defaults_are_midpoints():
    cfg = InflationConfig(r=4, alpha=1.0, beta=0.45)
    assert cfg.zeta == pytest.approx(0.275)
    assert cfg.gamma == pytest.approx(0.5 * (0.2 + 0.55))


def test_sum_norm_inequality_default_ok():
    cfg = InflationConfig(r=4, alpha=1.0, beta=0.4, p=math.inf, K_override=4)
    reports = {rep.name: rep for rep in validate_parameters(cfg)}
    assert reports["3*beta >= 1 + 1/p"].satisfied
    assert reports["3*beta >= 1 + 1/p"].margin == pytest.approx(0.2)


def test_infeasible_small_beta_with_finite_p_is_raised():
    with pytest.warns(ParameterWarning):
        cfg = InflationConfig(r=4, alpha=1.0, beta=0.1, p=3.0)
    # beta was lifted to keep the final inequality valid
    assert cfg.beta == pytest.approx((1 + 1 / 3) / 3 + 0.01)
    reports = {rep.name: rep for rep in validate_parameters(cfg)}
    assert reports["3*beta >= 1 + 1/p"].satisfied


def test_k_rule_and_window_constraint():
    # default zeta at small r rounds K to 1 and the transfer window closes
    cfg = InflationConfig(r=2, alpha=1.0, beta=0.45)
    assert cfg.K == 1
    reports = {rep.name: rep for rep in validate_parameters(cfg)}
    assert not reports["K^(-2*alpha) < T"].satisfied
    assert not constraints_ok(validate_parameters(cfg))
    # overriding K restores a valid bench-scale configuration
    cfg4 = InflationConfig(r=2, alpha=1.0, beta=0.45, K_override=4)
    assert cfg4.k_rule_overridden
    assert constraints_ok(validate_parameters(cfg4))


def test_valid_family_without_override():
    for r in (2, 3, 4):
        cfg = InflationConfig(r=r, alpha=1.0, beta=0.40, zeta=0.59, gamma=0.79)
        assert cfg.K == 2
        assert constraints_ok(validate_parameters(cfg)), r


def test_smallness_indicator_formula():
    cfg = InflationConfig(r=4, alpha=1.0, beta=0.45, K_override=4)
    r, a, b = 4.0, 1.0, 0.45
    T, K = cfg.t_final, 4.0
    expected = (r ** (b - 1) * K ** a + r ** (-b) * T ** 0.0
                + r ** (1 - 2 * b) * T ** 0.5)
    assert smallness_indicator(cfg) == pytest.approx(expected)


def test_predicted_bounds_values():
    cfg = InflationConfig(r=16, alpha=1.0, beta=0.45, K_override=4)
    pb = predicted_bounds(cfg)
    assert pb["u0_besov_scale"] == pytest.approx(16.0 ** (-0.45))
    assert pb["u0_besov_scale"] == pytest.approx(0.2872, abs=2e-4)
    assert pb["inflation_floor_scale"] == pytest.approx(16.0 ** 0.1)


def test_predicted_bounds_degenerate_r1():
    cfg = InflationConfig(r=1, alpha=1.0, beta=0.45, K_override=2)
    pb = predicted_bounds(cfg)
    assert pb["u0_besov_scale"] == 1.0
    assert pb["inflation_floor_scale"] == 1.0


def test_lacunarity_exact_band():
    cfg = InflationConfig(r=8, alpha=1.0, K_override=4)
    ratios = lacunarity_ratios(cfg)
    # geometric series: sum_{j<i} 2^(j-1) / 2^(i-2) = 2 - 2^(2-i)
    assert all(1.0 <= x < 2.0 for x in ratios)
    assert ratios[0] == 1.0
    assert ratios[-1] == pytest.approx(2.0 - 2.0 ** (2 - 8))


@pytest.mark.parametrize("alpha", [1.0, 1.25])
def test_heat_sum_uniformly_bounded(alpha):
    ts = np.geomspace(1e-6, 10.0, 120)
    consts = []
    for r in (2, 4, 8, 16):
        cfg = InflationConfig(r=r, alpha=alpha, K_override=4)
        for g in (alpha, 2 * alpha):
            consts.append(heat_sum(cfg, g, ts).max())
    # one constant across the whole family
    assert max(consts) < 4.0


def test_u0_shell_norm_tracks_prediction():
    # measured norm / r^(1/p - beta) constant across r (exact for K = 4)
    beta = 0.45
    vals = []
    for r in (2, 4, 8):
        cfg = InflationConfig(r=r, alpha=1.0, beta=beta, K_override=4)
        lat = Lattice(required_dims(cfg, norms_only=True))
        u0 = build_u0(cfg, lat)
        idx = bz.BesovIndex(s=1.0, alpha=1.0)
        vals.append(bz.besov_norm_lp(u0, idx) * r ** beta)
    assert max(vals) / min(vals) == pytest.approx(1.0, rel=1e-12)
    assert vals[0] == pytest.approx(math.sqrt(2.0), rel=1e-12)


def test_required_dims_covers_first_generation():
    cfg = InflationConfig(r=5, alpha=1.0, beta=0.45, K_override=4)
    dims = required_dims(cfg)
    lat = Lattice(dims)
    kmax = cfg.wave_magnitudes[-1]
    assert lat.in_dealias_band((2 * kmax, 0, 1))
    assert dims[0] <= 512
