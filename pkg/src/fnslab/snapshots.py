"""Binary snapshot files: one field at one time, little-endian throughout.

Layout (all little-endian):
    bytes 0..3    magic  b"SFL1"
    uint32        format version (1)
    uint32 x 3    N1, N2, N3
    float64       alpha
    float64       nu
    float64       t
    float64       dealias fraction
    complex128[.] coefficients, C order, shape (3, N1, N2, N3),
                  each value stored as (real, imag) float64 pairs
"""

from __future__ import annotations

import struct

import numpy as np

from .lattice import Lattice, SpectralField
from .spectral import FractionalParams

MAGIC = b"SFL1"
VERSION = 1
_HEADER = struct.Struct("<4sI3IddddI")  # magic, ver, dims, a, nu, t, frac, pad


def write_snapshot(path, field, params, t):
    lat = field.lattice
    header = _HEADER.pack(
        MAGIC, VERSION, *lat.dims, params.alpha, params.nu, float(t),
        lat.dealias_fraction, 0,
    )
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(field.coeffs, dtype="<c16").tobytes())


def read_snapshot(path):
    """-> (SpectralField, FractionalParams, t)."""
    with open(path, "rb") as fh:
        header = fh.read(_HEADER.size)
        if len(header) != _HEADER.size:
            raise ValueError(f"{path}: truncated header")
        magic, version, n1, n2, n3, alpha, nu, t, frac, _pad = _HEADER.unpack(header)
        if magic != MAGIC:
            raise ValueError(f"{path}: bad magic {magic!r}")
        if version != VERSION:
            raise ValueError(f"{path}: unsupported version {version}")
        lat = Lattice((n1, n2, n3), dealias_fraction=frac)
        count = 3 * lat.npoints
        raw = np.frombuffer(fh.read(count * 16), dtype="<c16", count=count)
        coeffs = raw.astype(np.complex128).reshape((3,) + lat.dims)
    return (
        SpectralField(lat, coeffs),
        FractionalParams(alpha=alpha, nu=nu),
        float(t),
    )
