import math

import numpy as np
import pytest

from fnslab.closed_forms import ensemble_to_field, first_iterate
from fnslab.construction import InflationConfig, build_u0, required_dims
from fnslab.lattice import Lattice, SpectralField
from fnslab.solver import (
    BlowUpError,
    QuadratureWarning,
    TimeGrid,
    bilinear_duhamel,
    decompose,
    energy_series,
    gauss_legendre_nodes,
    heat_flow,
    mild_solve,
    quadrature_times,
    reconstruct_remainder,
    source_terms,
)
from fnslab.spectral import (
    FractionalParams,
    divergence_linf,
    heat_semigroup,
    linf_norm,
    random_solenoidal_field,
)

from conftest import E3, rel_err, single_wave


def pair_setup(alpha=1.0):
    cfg = InflationConfig(r=2, alpha=alpha, beta=0.4, K_override=4)
    lat = Lattice(required_dims(cfg))
    params = FractionalParams(alpha=alpha, nu=cfg.nu)
    return cfg, lat, params, build_u0(cfg, lat)


# ---------------------------------------------------------------------------
# time grid


def test_time_grid_validation():
    with pytest.raises(ValueError):
        TimeGrid(np.array([0.1, 0.2]))  # must start at 0
    with pytest.raises(ValueError):
        TimeGrid(np.array([0.0, 0.2, 0.2]))  # strictly increasing
    with pytest.raises(ValueError):
        TimeGrid(np.array([0.0, 1.0]), dt="sometimes")
    with pytest.raises(ValueError):
        TimeGrid(np.array([0.0, 1.0]), dt=-0.1)


def test_time_grid_merge():
    g = TimeGrid(np.array([0.0, 0.5, 1.0]))
    g2 = g.with_extra_times([0.25, 0.5])
    assert np.array_equal(g2.times, [0.0, 0.25, 0.5, 1.0])


def test_gauss_legendre_composite_integrates_polynomial():
    taus, w = gauss_legendre_nodes(2.0, panels=3, nodes_per_panel=4)
    assert np.sum(w * taus ** 6) == pytest.approx(2.0 ** 7 / 7, rel=1e-13)


# ---------------------------------------------------------------------------
# mild solve


@pytest.mark.parametrize("alpha", [1.0, 1.25])
def test_single_wave_decays_exactly(alpha):
    lat = Lattice((32, 1, 32))
    u0 = single_wave(lat, (2, 0, 0), E3)
    params = FractionalParams(alpha=alpha)
    traj = mild_solve(u0, params, TimeGrid(np.linspace(0.0, 1.0, 9)))
    rate = 4.0 ** alpha
    for t, f in zip(traj.times, traj.fields):
        expected = math.exp(-rate * float(t))
        assert linf_norm(f) == pytest.approx(expected, rel=1e-10)


def test_zero_data_stays_zero():
    lat = Lattice((16, 1, 8))
    traj = mild_solve(SpectralField.zeros(lat), FractionalParams(),
                      TimeGrid(np.array([0.0, 0.5])))
    assert traj.fields[-1].max_abs_coeff() == 0.0


def test_snapshots_at_exact_times():
    _, lat, params, u0 = pair_setup()
    times = np.array([0.0, 0.013, 0.11, 0.3])
    traj = mild_solve(u0, params, TimeGrid(times, dt="cfl"))
    assert np.array_equal(traj.times, times)
    assert traj.field_at(0.11) is traj.fields[2]
    with pytest.raises(KeyError):
        traj.field_at(0.05)


def test_linear_limit_is_exact():
    lat = Lattice((16, 1, 16))
    u0 = random_solenoidal_field(lat, seed=12)
    params = FractionalParams(alpha=1.25)
    t = 0.4
    traj = mild_solve(u0, params, TimeGrid(np.array([0.0, t]), dt=t / 128),
                      nonlinear=False)
    exact = heat_semigroup(u0, t, params)
    assert float(np.abs((traj.fields[-1] - exact).coeffs).max()) < 1e-13


def test_fixed_and_adaptive_policies_agree():
    _, lat, params, u0 = pair_setup()
    t = 0.05
    grid_a = TimeGrid(np.array([0.0, t]), dt="auto")
    grid_c = TimeGrid(np.array([0.0, t]), dt="cfl")
    ua = mild_solve(u0, params, grid_a).fields[-1]
    uc = mild_solve(u0, params, grid_c).fields[-1]
    assert rel_err(ua.coeffs, uc.coeffs) < 1e-8


def test_divergence_free_preserved_and_energy_decays():
    cfg, lat, params, u0 = pair_setup()
    traj = mild_solve(u0, params,
                      TimeGrid(np.linspace(0.0, cfg.t_final, 7), dt="cfl"))
    assert max(divergence_linf(f) for f in traj.fields) < 1e-10
    e = energy_series(traj)
    assert np.all(np.diff(e) <= e[:-1] * 1e-11)


def test_blow_up_guard_trips():
    _, lat, params, u0 = pair_setup()
    with pytest.raises(BlowUpError):
        mild_solve(u0, params, TimeGrid(np.array([0.0, 0.1]), dt="cfl"),
                   ceiling=1.0)


def test_out_of_band_data_rejected():
    lat = Lattice((16, 1, 8))
    u0 = single_wave(lat, (7, 0, 0), E3)  # beyond the 2/3 cut of N1=16
    with pytest.raises(ValueError, match="dealias"):
        mild_solve(u0, FractionalParams(), TimeGrid(np.array([0.0, 0.1])))


def test_dt_halving_fourth_order():
    _, lat, params, u0 = pair_setup()
    t = 0.1
    sols = [
        mild_solve(u0, params, TimeGrid(np.array([0.0, t]), dt=t / n)).fields[-1]
        for n in (100, 200, 400)
    ]
    e1 = linf_norm(sols[0] - sols[1])
    e2 = linf_norm(sols[1] - sols[2])
    assert 3.2 < math.log2(e1 / e2) < 4.8


# ---------------------------------------------------------------------------
# bilinear Duhamel integral


def test_bilinear_zero_time():
    _, lat, params, u0 = pair_setup()
    flow = heat_flow(u0, params)
    out = bilinear_duhamel(flow, flow, 0.0, params)
    assert out.max_abs_coeff() == 0.0


def test_bilinear_matches_closed_form():
    cfg, lat, params, u0 = pair_setup()
    flow = heat_flow(u0, params)
    ens = first_iterate(cfg).combined()
    for t in (1e-3, 1e-2, 1e-1):
        quad = bilinear_duhamel(flow, flow, t, params)
        closed = ensemble_to_field(ens, lat, t)
        assert linf_norm(quad - closed) / linf_norm(closed) < 1e-6


def test_bilinear_node_doubling_stable():
    cfg, lat, params, u0 = pair_setup()
    flow = heat_flow(u0, params)
    a = bilinear_duhamel(flow, flow, 0.1, params, nodes_per_panel=8)
    b = bilinear_duhamel(flow, flow, 0.1, params, nodes_per_panel=16)
    assert float(np.abs((a - b).coeffs).max()) / b.max_abs_coeff() < 1e-8


def test_bilinear_node_check_warns_when_underresolved():
    cfg, lat, params, u0 = pair_setup()
    flow = heat_flow(u0, params)
    with pytest.warns(QuadratureWarning):
        bilinear_duhamel(flow, flow, 0.5, params, panels=1, nodes_per_panel=1,
                         node_check=True)


# ---------------------------------------------------------------------------
# decomposition


def test_decompose_identities():
    cfg, lat, params, u0 = pair_setup()
    T = cfg.t_final
    traj = mild_solve(u0, params, TimeGrid(np.linspace(0.0, T, 6), dt="cfl"))
    dec = decompose(traj, cfg)
    assert linf_norm(dec.remainder[0]) == 0.0  # remainder starts at zero
    assert np.abs(dec.free[0].coeffs - u0.coeffs).max() == 0.0
    # u = free - first + remainder reassembles exactly
    for i in range(len(traj.times)):
        back = dec.free[i] - dec.first[i] + dec.remainder[i]
        assert rel_err(back.coeffs, traj.fields[i].coeffs) < 1e-14


def test_single_wave_has_trivial_decomposition():
    lat = Lattice((32, 1, 8))
    u0 = single_wave(lat, (4, 0, 0), E3)
    params = FractionalParams()
    traj = mild_solve(u0, params, TimeGrid(np.linspace(0.0, 0.5, 4)))
    cfg = InflationConfig(r=1, alpha=1.0, beta=0.45, K_override=4)
    # build a trajectory-compatible config whose first iterate vanishes:
    # a single wave never interacts with itself, so compare directly
    for t, f in zip(traj.times, traj.fields):
        free = heat_semigroup(u0, float(t), params)
        assert rel_err(f.coeffs, free.coeffs) < 1e-12


def test_source_terms_vanish_appropriately():
    cfg, lat, params, u0 = pair_setup()
    t = 0.02
    grid = TimeGrid(np.array([0.0, t, cfg.t_final]), dt="cfl")
    traj = mild_solve(u0, params, grid)
    # at t = 0 both the first iterate and the remainder vanish: no sources
    g0, g1, g2 = source_terms(traj, cfg, 0.0)
    assert g0.max_abs_coeff() == 0.0
    assert g1.max_abs_coeff() < 1e-12
    assert g2.max_abs_coeff() < 1e-14
    # at a positive time the iterate drives g0, and g2 stays quadratically
    # small in the remainder
    g0, g1, g2 = source_terms(traj, cfg, t)
    assert g0.max_abs_coeff() > 0.0
    assert g2.max_abs_coeff() < g1.max_abs_coeff() < g0.max_abs_coeff()


@pytest.mark.parametrize("alpha", [1.0, 1.25])
def test_remainder_reconstruction_consistency(alpha):
    cfg, lat, params, u0 = pair_setup(alpha)
    t = 0.5 * cfg.t_final
    grid = TimeGrid(np.array([0.0, t, cfg.t_final]), dt="cfl")
    grid = grid.with_extra_times(quadrature_times(t, params, lat))
    traj = mild_solve(u0, params, grid)
    dec = decompose(traj, cfg)
    i = int(np.argmin(np.abs(dec.times - t)))
    rebuilt = reconstruct_remainder(traj, cfg, t)
    rel = linf_norm(rebuilt - dec.remainder[i]) / linf_norm(dec.remainder[i])
    assert rel < 1e-4


def test_trajectory_parameter_mismatch_rejected():
    cfg, lat, params, u0 = pair_setup()
    traj = mild_solve(u0, params, TimeGrid(np.array([0.0, 0.01])))
    other = InflationConfig(r=2, alpha=1.25, beta=0.4, K_override=4)
    with pytest.raises(ValueError):
        decompose(traj, other)
