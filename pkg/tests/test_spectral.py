import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fnslab.lattice import Lattice, SpectralField
from fnslab.spectral import (
    FractionalParams,
    convect,
    divergence,
    divergence_linf,
    divergence_tensor,
    gradient,
    heat_semigroup,
    inner,
    leray_project,
    linf_norm,
    pad_spectrum,
    random_solenoidal_field,
    transform_forward,
    transform_inverse,
)

from conftest import E2, E3, rel_err, single_wave


# ---------------------------------------------------------------------------
# transforms


def test_constant_field_is_zero_mode():
    lat = Lattice((8, 8, 8))
    phys = np.ones((3, 8, 8, 8))
    f = transform_forward(phys, lat)
    assert f.mode((0, 0, 0)) == pytest.approx([1.0, 1.0, 1.0])
    off_mode = f.coeffs.copy()
    off_mode[:, 0, 0, 0] = 0.0
    assert np.abs(off_mode).max() == 0.0


def test_cosine_wave_coefficients():
    lat = Lattice((16, 1, 8))
    x1 = np.arange(16) * (2 * np.pi / 16)
    phys = np.zeros((3, 16, 1, 8))
    phys[2] = np.cos(4 * x1)[:, None, None]
    f = transform_forward(phys, lat)
    assert f.mode((4, 0, 0))[2] == pytest.approx(0.5, abs=1e-14)
    assert f.mode((-4, 0, 0))[2] == pytest.approx(0.5, abs=1e-14)


@pytest.mark.parametrize("dims", [(16, 16, 16), (16, 1, 12), (9, 5, 7), (32, 1, 32)])
def test_roundtrip_random(dims):
    lat = Lattice(dims)
    rng = np.random.default_rng(hash(dims) % 2**32)
    phys = rng.standard_normal((3,) + dims)
    back = transform_inverse(transform_forward(phys, lat))
    assert rel_err(back, phys) < 1e-12


def test_add_wave_matches_grid_synthesis():
    lat = Lattice((12, 1, 8))
    f = single_wave(lat, (3, 0, 1), E2, amplitude=0.7, phase="sin")
    x1, _, x3 = lat.grid()
    expected = np.zeros((3,) + lat.dims)
    expected[1] = 0.7 * np.sin(3 * x1 + x3)
    assert rel_err(transform_inverse(f), expected) < 1e-13


def test_pad_spectrum_interpolates_exactly():
    lat = Lattice((8, 1, 8))
    f = single_wave(lat, (2, 0, 1), E2)
    g = pad_spectrum(f, 2)
    assert g.lattice.dims == (16, 1, 16)
    x1, _, x3 = g.lattice.grid()
    expected = np.zeros((3,) + g.lattice.dims)
    expected[1] = np.cos(2 * x1 + x3)
    assert rel_err(transform_inverse(g), expected) < 1e-13


# ---------------------------------------------------------------------------
# semigroup


def test_heat_t0_identity(small_lattice):
    u = random_solenoidal_field(small_lattice, seed=1)
    out = heat_semigroup(u, 0.0, FractionalParams())
    assert np.array_equal(out.coeffs, u.coeffs)


@pytest.mark.parametrize("alpha", [1.0, 1.25])
def test_heat_plane_wave_decay_factor(alpha):
    lat = Lattice((16, 1, 8))
    u = single_wave(lat, (2, 0, 0), E3)
    t = 0.25
    out = heat_semigroup(u, t, FractionalParams(alpha=alpha))
    expected = 0.5 * math.exp(-(4.0 ** alpha) * t)
    assert out.mode((2, 0, 0))[2].real == pytest.approx(expected, rel=1e-14)


def test_heat_plane_wave_reference_value():
    # |k| = 2, alpha = 1, t = 0.25: factor e^-1
    lat = Lattice((16, 1, 8))
    u = single_wave(lat, (2, 0, 0), E3)
    out = heat_semigroup(u, 0.25, FractionalParams())
    assert out.mode((2, 0, 0))[2].real * 2.0 == pytest.approx(
        0.36787944117144233, rel=1e-14
    )


def test_heat_composition(small_lattice):
    u = random_solenoidal_field(small_lattice, seed=2)
    p = FractionalParams(alpha=1.25)
    ab = heat_semigroup(heat_semigroup(u, 0.2, p), 0.1, p)
    once = heat_semigroup(u, 0.3, p)
    assert float(np.abs(ab.coeffs - once.coeffs).max()) < 1e-14


def test_heat_negative_time_rejected(small_lattice):
    u = SpectralField.zeros(small_lattice)
    with pytest.raises(ValueError):
        heat_semigroup(u, -0.1, FractionalParams())


# ---------------------------------------------------------------------------
# projector


def test_leray_keeps_orthogonal_wave(cube_lattice):
    u = single_wave(cube_lattice, (4, 0, 0), E3)
    assert rel_err(leray_project(u).coeffs, u.coeffs) < 1e-15


def test_leray_kills_gradient(cube_lattice):
    # grad(sin(k.x)) = k cos(k.x)
    k = (2, 1, 3)
    u = single_wave(cube_lattice, k, np.array(k) / np.linalg.norm(k))
    assert leray_project(u).max_abs_coeff() < 1e-15


def test_leray_idempotent_and_self_adjoint(cube_lattice):
    rng = np.random.default_rng(5)
    raw = rng.standard_normal((3,) + cube_lattice.dims) \
        + 1j * rng.standard_normal((3,) + cube_lattice.dims)
    f = SpectralField(cube_lattice, raw)
    f = SpectralField(cube_lattice, 0.5 * (f.coeffs + f.conj_mirror()))
    g = SpectralField(cube_lattice, np.roll(f.coeffs, 2, axis=1))
    pf = leray_project(f)
    assert rel_err(leray_project(pf).coeffs, pf.coeffs) < 1e-13
    assert inner(pf, g) == pytest.approx(inner(f, leray_project(g)), rel=1e-13)


# ---------------------------------------------------------------------------
# nonlinear term


def test_convect_single_wave_vanishes():
    lat = Lattice((32, 1, 16))
    u = single_wave(lat, (3, 0, 0), E3)
    assert convect(u, u).max_abs_coeff() == 0.0


def test_convect_two_wave_closed_form():
    # (u1.grad)u2 = -cos(k1.x) sin(k2.x) (k2.v1) v2
    lat = Lattice((32, 1, 16))
    k1, v1 = (3, 0, 0), E3
    k2, v2 = (2, 0, 1), E2
    u1 = single_wave(lat, k1, v1)
    u2 = single_wave(lat, k2, v2)
    got = convect(u1, u2)
    x1, _, x3 = lat.grid()
    expected = np.zeros((3,) + lat.dims)
    expected[1] = -np.cos(3 * x1) * np.sin(2 * x1 + x3)  # k2.v1 = 1
    assert rel_err(transform_inverse(got), expected) < 1e-13


def test_convect_constant_field_is_zero():
    lat = Lattice((16, 1, 8))
    u = random_solenoidal_field(lat, seed=3)
    const = SpectralField.zeros(lat)
    const.coeffs[:, 0, 0, 0] = [0.3, -0.1, 2.0]
    assert convect(u, const).max_abs_coeff() < 1e-16


def test_divergence_form_matches_advective_for_solenoidal():
    lat = Lattice((16, 16, 8))
    u = random_solenoidal_field(lat, seed=8)
    v = random_solenoidal_field(lat, seed=9)
    a = convect(u, v)
    d = divergence_tensor(u, v)
    assert rel_err(d.coeffs, a.coeffs) < 1e-12


def test_convect_output_dealiased():
    lat = Lattice((16, 1, 8))
    u = random_solenoidal_field(lat, seed=4)
    out = convect(u, u)
    assert np.abs(out.coeffs * ~lat.dealias_mask).max() == 0.0


# ---------------------------------------------------------------------------
# norms and derivatives


def test_linf_of_aligned_wave_exact():
    lat = Lattice((16, 1, 8))
    assert linf_norm(single_wave(lat, (4, 0, 0), E3)) == pytest.approx(1.0, rel=1e-14)


def test_linf_zero_field(small_lattice):
    assert linf_norm(SpectralField.zeros(small_lattice)) == 0.0


def test_divergence_of_solenoidal_field(small_lattice):
    u = random_solenoidal_field(small_lattice, seed=6)
    assert divergence_linf(u) < 1e-12


def test_gradient_of_wave():
    lat = Lattice((16, 1, 8))
    u = single_wave(lat, (2, 0, 0), E3)
    g = gradient(u)  # d_l u_c
    x1, _, _ = lat.grid()
    expected = -2 * np.sin(2 * x1) * np.ones(lat.dims)
    assert rel_err(g[0, 2], expected) < 1e-13
    assert np.abs(g[1]).max() < 1e-14


def test_divergence_detects_gradient_field(cube_lattice):
    k = (2, 1, 3)
    u = single_wave(cube_lattice, k, np.array(k) / np.linalg.norm(k), phase="sin")
    div = divergence(u)
    assert np.abs(div).max() == pytest.approx(np.linalg.norm(k), rel=1e-12)


# ---------------------------------------------------------------------------
# symmetry properties


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 10_000), t=st.floats(0.0, 2.0),
       alpha=st.sampled_from([1.0, 1.25, 1.5]))
def test_operations_preserve_hermitian_symmetry(seed, t, alpha):
    lat = Lattice((8, 4, 6))
    u = random_solenoidal_field(lat, seed=seed)
    p = FractionalParams(alpha=alpha)
    for out in (heat_semigroup(u, t, p), leray_project(u), convect(u, u)):
        assert out.hermitian_defect() < 1e-12


@settings(max_examples=10, deadline=None)
@given(seed=st.integers(0, 10_000))
def test_inverse_transform_is_real(seed):
    lat = Lattice((8, 6, 4))
    u = random_solenoidal_field(lat, seed=seed)
    w = convect(u, leray_project(u))
    phys_c = np.fft.ifftn(w.coeffs, axes=(1, 2, 3)) * lat.npoints
    assert np.abs(phys_c.imag).max() < 1e-12 * max(np.abs(phys_c.real).max(), 1e-300)
