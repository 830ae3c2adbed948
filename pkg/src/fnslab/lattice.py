"""Truncated Fourier lattice and spectral vector fields on the 2*pi torus.

Fields are three-component, real-valued, represented by complex coefficients
c(m) with u(x) = sum_m c(m) exp(i m.x) over the resolved integer frequencies
{-floor(N/2), ..., ceil(N/2)-1} per axis.  Reality is kept as the Hermitian
symmetry c(-m) = conj(c(m)).
"""

from __future__ import annotations

import numpy as np

_DEALIAS_DEFAULT = 2.0 / 3.0


class Lattice:
    """Grid metadata plus the cached per-mode arrays every operator needs.

    dims may be anisotropic; a size-1 axis means the fields are constant in
    that direction and costs nothing.
    """

    def __init__(self, dims, dealias_fraction=_DEALIAS_DEFAULT):
        dims = tuple(int(n) for n in dims)
        if len(dims) != 3 or any(n < 1 for n in dims):
            raise ValueError(f"dims must be three positive integers, got {dims}")
        if not 0.0 < dealias_fraction <= 1.0:
            raise ValueError("dealias_fraction must lie in (0, 1]")
        self.dims = dims
        self.dealias_fraction = float(dealias_fraction)
        self.npoints = dims[0] * dims[1] * dims[2]

        # Integer frequencies in FFT storage order, one 1-d array per axis.
        self.freqs = tuple(
            np.rint(np.fft.fftfreq(n, 1.0 / n)).astype(np.int64) for n in dims
        )
        shapes = [(dims[0], 1, 1), (1, dims[1], 1), (1, 1, dims[2])]
        self.modes = tuple(
            f.reshape(s).astype(np.float64) for f, s in zip(self.freqs, shapes)
        )
        m1, m2, m3 = self.modes
        self.ksq = m1 * m1 + m2 * m2 + m3 * m3  # full (N1,N2,N3), exact ints

        # Sharp 2/3-style truncation, per axis, symmetric under m -> -m.
        cuts = [int(np.floor(dealias_fraction * n / 2.0)) for n in dims]
        self.dealias_cut = tuple(cuts)
        mask = np.ones(dims, dtype=bool)
        for ax, (f, cut, s) in enumerate(zip(self.freqs, cuts, shapes)):
            mask &= np.abs(f).reshape(s) <= cut
        self.dealias_mask = mask
        self._dealias_flat = mask.astype(np.float64).ravel()

        with np.errstate(divide="ignore"):
            inv = np.where(self.ksq > 0.0, 1.0 / self.ksq, 0.0)
        self._inv_ksq_flat = inv.ravel()
        self._mode_flat = tuple(np.broadcast_to(m, dims).ravel().copy()
                                for m in self.modes)
        self._ksq_pow = {}

    # -- cached helpers -------------------------------------------------

    def ksq_pow(self, alpha):
        """|m|^(2*alpha) as a full array; exact integers when alpha == 1."""
        key = float(alpha)
        out = self._ksq_pow.get(key)
        if out is None:
            out = self.ksq if key == 1.0 else self.ksq ** key
            self._ksq_pow[key] = out
        return out

    def max_mode(self):
        """Largest |m| over the resolved lattice."""
        return float(np.sqrt(self.ksq.max()))

    def max_mode_dealiased(self):
        """Largest |m| surviving the dealias truncation."""
        return float(np.sqrt(self.ksq[self.dealias_mask].max()))

    def grid(self):
        """Physical coordinates (x1, x2, x3), broadcastable to dims."""
        axes = [np.arange(n) * (2.0 * np.pi / n) for n in self.dims]
        shapes = [(self.dims[0], 1, 1), (1, self.dims[1], 1), (1, 1, self.dims[2])]
        return tuple(a.reshape(s) for a, s in zip(axes, shapes))

    # -- mode bookkeeping ------------------------------------------------

    def resolves(self, k):
        k = np.asarray(k, dtype=np.int64)
        return all(
            -(n // 2) <= int(kj) <= (n + 1) // 2 - 1
            for kj, n in zip(k, self.dims)
        )

    def in_dealias_band(self, k):
        return all(abs(int(kj)) <= c for kj, c in zip(k, self.dealias_cut))

    def mode_index(self, k):
        if not self.resolves(k):
            raise ValueError(f"mode {tuple(int(x) for x in k)} not resolved on dims {self.dims}")
        return tuple(int(kj) % n for kj, n in zip(k, self.dims))

    def __eq__(self, other):
        return (isinstance(other, Lattice) and self.dims == other.dims
                and self.dealias_fraction == other.dealias_fraction)

    def __hash__(self):
        return hash((self.dims, self.dealias_fraction))

    def __repr__(self):
        return f"Lattice(dims={self.dims}, dealias_fraction={self.dealias_fraction:.6g})"


class SpectralField:
    """Three-component coefficient array bound to a lattice."""

    __slots__ = ("lattice", "coeffs")

    def __init__(self, lattice, coeffs=None):
        self.lattice = lattice
        shape = (3,) + lattice.dims
        if coeffs is None:
            self.coeffs = np.zeros(shape, dtype=np.complex128)
        else:
            coeffs = np.asarray(coeffs, dtype=np.complex128)
            if coeffs.shape != shape:
                raise ValueError(f"coeffs shape {coeffs.shape} != {shape}")
            self.coeffs = np.ascontiguousarray(coeffs)

    @classmethod
    def zeros(cls, lattice):
        return cls(lattice)

    def copy(self):
        return SpectralField(self.lattice, self.coeffs.copy())

    def flat(self):
        """(3, nmodes) view for the kernel backend."""
        return self.coeffs.reshape(3, self.lattice.npoints)

    # -- construction ----------------------------------------------------

    def add_wave(self, k, amplitude, phase="cos"):
        """Add a real wave amplitude*trig(k.x) with vector amplitude.

        Both +-k coefficients are written so Hermitian symmetry is exact by
        construction.
        """
        k = np.asarray(k, dtype=np.int64)
        a = np.asarray(amplitude, dtype=np.float64)
        idx_p = self.lattice.mode_index(k)
        idx_m = self.lattice.mode_index(-k)
        if phase == "cos":
            cp = 0.5 * a
            cm = 0.5 * a
        elif phase == "sin":
            cp = -0.5j * a
            cm = 0.5j * a
        else:
            raise ValueError(f"phase must be 'cos' or 'sin', got {phase!r}")
        if idx_p == idx_m:  # k == 0 (or an unpaired self-conjugate mode)
            if phase == "sin":
                return
            self.coeffs[(slice(None),) + idx_p] += a
            return
        self.coeffs[(slice(None),) + idx_p] += cp
        self.coeffs[(slice(None),) + idx_m] += cm

    def mode(self, k):
        """Coefficient vector at integer frequency k."""
        return self.coeffs[(slice(None),) + self.lattice.mode_index(k)].copy()

    def mean(self):
        return self.mode((0, 0, 0))

    # -- diagnostics -----------------------------------------------------

    def conj_mirror(self):
        """conj(c(-m)) arranged on the same storage grid."""
        rev = self.coeffs[:, ::-1, ::-1, ::-1]
        return np.conj(np.roll(rev, shift=(1, 1, 1), axis=(1, 2, 3)))

    def hermitian_defect(self):
        return float(np.abs(self.coeffs - self.conj_mirror()).max())

    def max_abs_coeff(self):
        return float(np.abs(self.coeffs).max())

    def l2(self):
        """Root mean square amplitude, (2*pi)^{-3/2} times the L2 norm."""
        return float(np.sqrt(np.sum(np.abs(self.coeffs) ** 2)))

    # -- arithmetic (new objects; lattices must match) ---------------------

    def _check(self, other):
        if self.lattice != other.lattice:
            raise ValueError("lattice mismatch")

    def __add__(self, other):
        self._check(other)
        return SpectralField(self.lattice, self.coeffs + other.coeffs)

    def __sub__(self, other):
        self._check(other)
        return SpectralField(self.lattice, self.coeffs - other.coeffs)

    def __mul__(self, scalar):
        return SpectralField(self.lattice, self.coeffs * scalar)

    __rmul__ = __mul__

    def __neg__(self):
        return SpectralField(self.lattice, -self.coeffs)
