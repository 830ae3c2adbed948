# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled per-mode kernels: fused loops for the spectral hot path.

Same contract as fnslab._kernel_ref; see that module for documentation.
"""

import numpy as np

cimport cython

BACKEND = "compiled"


def apply_multiplier(double complex[:, ::1] coeffs, const double[::1] mult):
    cdef Py_ssize_t c, i
    cdef Py_ssize_t nc = coeffs.shape[0]
    cdef Py_ssize_t n = coeffs.shape[1]
    for c in range(nc):
        for i in range(n):
            coeffs[c, i] = coeffs[c, i] * mult[i]


def leray(double complex[:, ::1] coeffs, const double[::1] m1,
          const double[::1] m2, const double[::1] m3,
          const double[::1] inv_ksq):
    cdef Py_ssize_t i
    cdef Py_ssize_t n = coeffs.shape[1]
    cdef double complex mdotc
    for i in range(n):
        mdotc = (m1[i] * coeffs[0, i] + m2[i] * coeffs[1, i]
                 + m3[i] * coeffs[2, i]) * inv_ksq[i]
        coeffs[0, i] = coeffs[0, i] - m1[i] * mdotc
        coeffs[1, i] = coeffs[1, i] - m2[i] * mdotc
        coeffs[2, i] = coeffs[2, i] - m3[i] * mdotc


def advect(const double[:, ::1] u, const double[:, ::1] dv,
           double[:, ::1] out):
    cdef Py_ssize_t i
    cdef Py_ssize_t n = u.shape[1]
    for i in range(n):
        out[0, i] = u[0, i] * dv[0, i] + u[1, i] * dv[3, i] + u[2, i] * dv[6, i]
        out[1, i] = u[0, i] * dv[1, i] + u[1, i] * dv[4, i] + u[2, i] * dv[7, i]
        out[2, i] = u[0, i] * dv[2, i] + u[1, i] * dv[5, i] + u[2, i] * dv[8, i]


def spectral_gradient(const double complex[:, ::1] coeffs,
                      const double[::1] m1, const double[::1] m2,
                      const double[::1] m3, double complex[:, ::1] out):
    cdef Py_ssize_t c, i
    cdef Py_ssize_t n = coeffs.shape[1]
    cdef double complex j = 1j
    for c in range(3):
        for i in range(n):
            out[c, i] = j * m1[i] * coeffs[c, i]
            out[3 + c, i] = j * m2[i] * coeffs[c, i]
            out[6 + c, i] = j * m3[i] * coeffs[c, i]


def if_stage(double complex[:, ::1] out, const double complex[:, ::1] u,
             const double complex[:, ::1] k, e_u_obj, e_k_obj, double c):
    cdef Py_ssize_t comp, i
    cdef Py_ssize_t nc = out.shape[0]
    cdef Py_ssize_t n = out.shape[1]
    cdef const double[::1] e_u
    cdef const double[::1] e_k
    cdef bint has_eu = e_u_obj is not None
    cdef bint has_ek = e_k_obj is not None
    if has_eu:
        e_u = e_u_obj
    if has_ek:
        e_k = e_k_obj
    for comp in range(nc):
        if has_eu and has_ek:
            for i in range(n):
                out[comp, i] = e_u[i] * u[comp, i] + c * e_k[i] * k[comp, i]
        elif has_eu:
            for i in range(n):
                out[comp, i] = e_u[i] * u[comp, i] + c * k[comp, i]
        elif has_ek:
            for i in range(n):
                out[comp, i] = u[comp, i] + c * e_k[i] * k[comp, i]
        else:
            for i in range(n):
                out[comp, i] = u[comp, i] + c * k[comp, i]


def if_final(double complex[:, ::1] u, const double complex[:, ::1] k1,
             const double complex[:, ::1] k2, const double complex[:, ::1] k3,
             const double complex[:, ::1] k4, const double[::1] e_half,
             const double[::1] e_full, double h):
    cdef Py_ssize_t comp, i
    cdef Py_ssize_t nc = u.shape[0]
    cdef Py_ssize_t n = u.shape[1]
    cdef double w = h / 6.0
    for comp in range(nc):
        for i in range(n):
            u[comp, i] = (e_full[i] * (u[comp, i] + w * k1[comp, i])
                          + 2.0 * w * e_half[i] * (k2[comp, i] + k3[comp, i])
                          + w * k4[comp, i])
