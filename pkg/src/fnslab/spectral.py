"""Exact linear operators and the pseudo-spectral nonlinear term.

Everything here is a pure function of its inputs.  Nonlinear products go
grid -> pointwise product -> spectrum and are sharply dealiased; linear
operators act mode by mode and are exact.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernel
from .lattice import Lattice, SpectralField

FFT_AXES = (1, 2, 3)


def fft_forward(arr, lattice, offset=1):
    """fftn over the lattice axes, skipping size-1 axes (identity there)."""
    axes = [offset + i for i, n in enumerate(lattice.dims) if n > 1]
    if not axes:
        return arr.astype(np.complex128, copy=True)
    return np.fft.fftn(arr, axes=axes)


def fft_inverse(arr, lattice, offset=1):
    """ifftn over the lattice axes, skipping size-1 axes.

    Size-1 axes contribute a unit factor to the 1/N normalization, so the
    result is identical to transforming all three axes.
    """
    axes = [offset + i for i, n in enumerate(lattice.dims) if n > 1]
    if not axes:
        return arr.astype(np.complex128, copy=True)
    return np.fft.ifftn(arr, axes=axes)


@dataclass(frozen=True)
class FractionalParams:
    """Dissipation exponent and viscosity of -nu*(-Laplace)^alpha."""

    alpha: float = 1.0
    nu: float = 1.0

    def __post_init__(self):
        if self.alpha < 1.0:
            raise ValueError(f"alpha must be >= 1, got {self.alpha}")
        if self.nu <= 0.0:
            raise ValueError(f"nu must be positive, got {self.nu}")


# ---------------------------------------------------------------------------
# transforms


def transform_forward(phys, lattice):
    """Grid samples (3, N1, N2, N3) -> SpectralField."""
    phys = np.asarray(phys)
    if phys.shape != (3,) + lattice.dims:
        raise ValueError(f"field shape {phys.shape} does not match lattice {lattice.dims}")
    coeffs = fft_forward(phys, lattice) / lattice.npoints
    return SpectralField(lattice, coeffs)


def transform_inverse(field):
    """SpectralField -> real grid samples (3, N1, N2, N3)."""
    out = fft_inverse(field.coeffs, field.lattice) * field.lattice.npoints
    return np.ascontiguousarray(out.real)


def pad_spectrum(field, factor):
    """Re-embed on a factor-times finer lattice (exact trig interpolation)."""
    if factor == 1:
        return field
    src = field.lattice
    dst = Lattice(tuple(n * factor if n > 1 else 1 for n in src.dims),
                  src.dealias_fraction)
    centered = np.fft.fftshift(field.coeffs, axes=FFT_AXES)
    pads = [(0, 0)]
    for n, nd in zip(src.dims, dst.dims):
        lo = nd // 2 - n // 2
        pads.append((lo, nd - n - lo))
    padded = np.pad(centered, pads)
    return SpectralField(dst, np.fft.ifftshift(padded, axes=FFT_AXES))


# ---------------------------------------------------------------------------
# linear operators


def heat_semigroup(field, t, params):
    """Multiply each mode by exp(-nu*|m|^(2*alpha)*t)."""
    if t < 0.0:
        raise ValueError(f"negative time {t}")
    out = field.copy()
    if t == 0.0:
        return out
    mult = np.exp((-params.nu * t) * field.lattice.ksq_pow(params.alpha))
    kernel.apply_multiplier(out.flat(), mult.ravel())
    return out


def leray_project(field):
    """Remove the gradient part: u(m) -> u(m) - m (m.u(m))/|m|^2."""
    out = field.copy()
    lat = out.lattice
    m1, m2, m3 = lat._mode_flat
    kernel.leray(out.flat(), m1, m2, m3, lat._inv_ksq_flat)
    return out


def dealias(field):
    out = field.copy()
    kernel.apply_multiplier(out.flat(), field.lattice._dealias_flat)
    return out


def gradient(field):
    """Physical derivative tensor d_l u_c, shape (3, 3, N1, N2, N3)."""
    lat = field.lattice
    n = lat.npoints
    dh = np.empty((3, 3) + lat.dims, dtype=np.complex128)
    m1, m2, m3 = lat._mode_flat
    kernel.spectral_gradient(field.flat(), m1, m2, m3, dh.reshape(9, n))
    return np.ascontiguousarray(
        (fft_inverse(dh, lat, offset=2) * lat.npoints).real
    )


def divergence(field):
    """Physical scalar field sum_c d_c u_c."""
    lat = field.lattice
    m1, m2, m3 = lat.modes
    dh = 1j * (m1 * field.coeffs[0] + m2 * field.coeffs[1] + m3 * field.coeffs[2])
    return (fft_inverse(dh, lat, offset=0) * lat.npoints).real


# ---------------------------------------------------------------------------
# nonlinear term


def convect(u, v):
    """(u . grad) v, computed pseudo-spectrally and sharply dealiased."""
    if u.lattice != v.lattice:
        raise ValueError("lattice mismatch")
    lat = u.lattice
    u_phys = transform_inverse(u)
    dv = gradient(v)
    w = np.empty_like(u_phys)
    n = lat.npoints
    kernel.advect(u_phys.reshape(3, n), dv.reshape(9, n), w.reshape(3, n))
    out = transform_forward(w, lat)
    kernel.apply_multiplier(out.flat(), lat._dealias_flat)
    return out


def divergence_tensor(u, v):
    """div(u (x) v), component c = sum_l d_l(u_l v_c), dealiased."""
    if u.lattice != v.lattice:
        raise ValueError("lattice mismatch")
    lat = u.lattice
    u_phys = transform_inverse(u)
    v_phys = u_phys if v is u else transform_inverse(v)
    prod = np.einsum("l...,c...->lc...", u_phys, v_phys)
    ph = fft_forward(prod, lat, offset=2) / lat.npoints
    m1, m2, m3 = lat.modes
    coeffs = 1j * (m1 * ph[0] + m2 * ph[1] + m3 * ph[2])
    out = SpectralField(lat, coeffs)
    kernel.apply_multiplier(out.flat(), lat._dealias_flat)
    return out


# ---------------------------------------------------------------------------
# norms and inner products


def linf_scalar(phys):
    return float(np.abs(phys).max())


def linf_norm(field, oversample=1):
    """Max over grid points of the pointwise Euclidean magnitude.

    A lower bound of the true sup; pass oversample=2 to evaluate on a
    refined grid via exact trigonometric interpolation.
    """
    f = pad_spectrum(field, oversample) if oversample > 1 else field
    phys = transform_inverse(f)
    mag_sq = phys[0] ** 2 + phys[1] ** 2 + phys[2] ** 2
    return float(np.sqrt(mag_sq.max()))


def l2_norm(field):
    return field.l2()


def inner(u, v):
    """Discrete L2 pairing sum_m conj(u(m)).v(m), real part."""
    u._check(v)
    return float(np.real(np.sum(np.conj(u.coeffs) * v.coeffs)))


def divergence_linf(field):
    return linf_scalar(divergence(field))


# ---------------------------------------------------------------------------
# random corpora for measured-constant checks


def random_solenoidal_field(lattice, seed, max_mode=None, amplitude=1.0):
    """Random real divergence-free field confined to the dealias band.

    With max_mode given, coefficients are drawn indexed by the mode itself,
    so any lattice resolving the band reproduces the identical trigonometric
    polynomial: refinement studies compare like with like.  The amplitude is
    fixed through the coefficient l2 norm, which is grid-free.
    """
    rng = np.random.default_rng(seed)
    if max_mode is not None:
        b = int(max_mode)
        side = 2 * b + 1
        block = rng.standard_normal((3, side, side, side)) \
            + 1j * rng.standard_normal((3, side, side, side))
        f = SpectralField.zeros(lattice)
        for i1 in range(-b, b + 1):
            for i2 in range(-b, b + 1):
                for i3 in range(-b, b + 1):
                    k = (i1, i2, i3)
                    if not lattice.resolves(k) or not lattice.in_dealias_band(k):
                        continue
                    f.coeffs[(slice(None),) + lattice.mode_index(k)] = \
                        block[:, i1 + b, i2 + b, i3 + b]
    else:
        raw = rng.standard_normal((3,) + lattice.dims) \
            + 1j * rng.standard_normal((3,) + lattice.dims)
        f = SpectralField(lattice, raw * lattice.dealias_mask)
    # symmetrize to a real field, drop the mean, project
    f = SpectralField(lattice, 0.5 * (f.coeffs + f.conj_mirror()))
    f.coeffs[:, 0, 0, 0] = 0.0
    f = leray_project(f)
    scale = f.l2()
    if scale > 0.0:
        f = f * (amplitude / scale)
    return f
