"""Pure-NumPy reference implementation of the per-mode hot kernels.

Mirrors the signatures of the compiled extension ``fnslab._kernel``; the
active backend is chosen in :mod:`fnslab.kernel`.  All functions operate on
flattened views: complex coefficient arrays of shape ``(ncomp, nmodes)`` and
real multiplier arrays of shape ``(nmodes,)``.
"""

import numpy as np

BACKEND = "python"


def apply_multiplier(coeffs, mult):
    """In-place ``coeffs[c, i] *= mult[i]`` for every component c."""
    coeffs *= mult[np.newaxis, :]


def leray(coeffs, m1, m2, m3, inv_ksq):
    """In-place divergence-free projection, one 3x3 projector per mode.

    ``inv_ksq`` must be 1/|m|^2 with the zero mode set to 0 so the mean is
    left untouched.
    """
    mdotc = m1 * coeffs[0] + m2 * coeffs[1] + m3 * coeffs[2]
    mdotc *= inv_ksq
    coeffs[0] -= m1 * mdotc
    coeffs[1] -= m2 * mdotc
    coeffs[2] -= m3 * mdotc


def advect(u, dv, out):
    """``out[c] = sum_l u[l] * dv[l*3 + c]`` on real grid-point arrays."""
    out[:] = 0.0
    for l in range(3):
        for c in range(3):
            out[c] += u[l] * dv[l * 3 + c]


def spectral_gradient(coeffs, m1, m2, m3, out):
    """``out[l*3 + c] = i * m_l * coeffs[c]`` (derivative coefficients)."""
    for l, m in enumerate((m1, m2, m3)):
        jm = 1j * m
        for c in range(3):
            np.multiply(coeffs[c], jm, out=out[l * 3 + c])


def if_stage(out, u, k, e_u, e_k, c):
    """Integrating-factor stage ``out = e_u*u + c*(e_k*k)``.

    Either exponential array may be None, meaning a factor of one.
    """
    if e_u is None:
        np.copyto(out, u)
    else:
        np.multiply(u, e_u[np.newaxis, :], out=out)
    if e_k is None:
        out += c * k
    else:
        out += (c * k) * e_k[np.newaxis, :]


def if_final(u, k1, k2, k3, k4, e_half, e_full, h):
    """Final integrating-factor RK4 combination, in place on ``u``."""
    w = h / 6.0
    u *= e_full[np.newaxis, :]
    u += (w * e_full)[np.newaxis, :] * k1
    u += (2.0 * w * e_half)[np.newaxis, :] * (k2 + k3)
    u += w * k4
