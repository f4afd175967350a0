# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled RK4 integrator for small Lindblad problems (see ramanswap.kernel)."""

import numpy as np


cdef inline void _lindblad_rhs(int n, int nj, const double complex[:, ::1] heff,
                               const double complex[:, :, ::1] jumps,
                               const double complex[:, ::1] rho,
                               double complex[:, ::1] tmp,
                               double complex[:, ::1] out) noexcept nogil:
    # out = -i (H rho - rho H^dag) + sum_c c rho c^dag
    cdef int i, j, k, c
    cdef double complex s
    for i in range(n):
        for j in range(n):
            s = 0
            for k in range(n):
                s = s + heff[i, k] * rho[k, j] - rho[i, k] * heff[j, k].conjugate()
            out[i, j] = s.imag - 1j * s.real
    for c in range(nj):
        for i in range(n):
            for j in range(n):
                s = 0
                for k in range(n):
                    s = s + jumps[c, i, k] * rho[k, j]
                tmp[i, j] = s
        for i in range(n):
            for j in range(n):
                s = 0
                for k in range(n):
                    s = s + tmp[i, k] * jumps[c, j, k].conjugate()
                out[i, j] = out[i, j] + s


cdef inline void _assemble(int n, const double complex[:, ::1] heff0,
                           const double complex[:, ::1] hd,
                           const double complex[:, ::1] pin,
                           double om, double complex ain,
                           double complex[:, ::1] h) noexcept nogil:
    cdef int i, j
    cdef double complex ac = ain.conjugate()
    for i in range(n):
        for j in range(n):
            h[i, j] = heff0[i, j] + om * hd[i, j] + ain * pin[i, j] + ac * pin[j, i].conjugate()


def rk4_lindblad(rho0, heff0, hd, pin, jumps, om, ain, double h, int substeps):
    """Integrate ``n_out`` output intervals of ``substeps`` RK4 steps each.

    ``om`` (real) and ``ain`` (complex) are sampled on the half-step grid, so
    both have length ``2 * n_out * substeps + 1``. The Hamiltonian is
    ``heff0 + om*hd + ain*pin + conj(ain)*pin^dag``. Returns the density
    matrix at every output point, shape ``(n_out + 1, n, n)``.
    """
    cdef double complex[:, ::1] r = np.array(rho0, dtype=complex, order="C")
    cdef const double complex[:, ::1] H0 = np.ascontiguousarray(heff0, dtype=complex)
    cdef const double complex[:, ::1] HD = np.ascontiguousarray(hd, dtype=complex)
    cdef const double complex[:, ::1] PIN = np.ascontiguousarray(pin, dtype=complex)
    cdef const double complex[:, :, ::1] J = np.ascontiguousarray(jumps, dtype=complex).reshape(
        (-1,) + np.shape(rho0))
    cdef const double[::1] OM = np.ascontiguousarray(om, dtype=float)
    cdef const double complex[::1] AIN = np.ascontiguousarray(ain, dtype=complex)
    cdef int n = r.shape[0]
    cdef int nj = J.shape[0]
    cdef Py_ssize_t nsub = (OM.shape[0] - 1) // 2
    if OM.shape[0] != AIN.shape[0] or OM.shape[0] != 2 * nsub + 1:
        raise ValueError("om and ain must share an odd-length half-step grid")
    if nsub % substeps:
        raise ValueError("half-step grid length is not a multiple of substeps")
    cdef Py_ssize_t n_out = nsub // substeps
    out_np = np.empty((n_out + 1, n, n), dtype=complex)
    cdef double complex[:, :, ::1] out = out_np
    cdef double complex[:, ::1] hm = np.empty((n, n), dtype=complex)
    cdef double complex[:, ::1] tmp = np.empty((n, n), dtype=complex)
    cdef double complex[:, ::1] y = np.empty((n, n), dtype=complex)
    cdef double complex[:, ::1] k1 = np.empty((n, n), dtype=complex)
    cdef double complex[:, ::1] k2 = np.empty((n, n), dtype=complex)
    cdef double complex[:, ::1] k3 = np.empty((n, n), dtype=complex)
    cdef double complex[:, ::1] k4 = np.empty((n, n), dtype=complex)
    cdef Py_ssize_t s, q
    cdef int i, j
    with nogil:
        for i in range(n):
            for j in range(n):
                out[0, i, j] = r[i, j]
        for s in range(nsub):
            q = 2 * s
            _assemble(n, H0, HD, PIN, OM[q], AIN[q], hm)
            _lindblad_rhs(n, nj, hm, J, r, tmp, k1)
            _assemble(n, H0, HD, PIN, OM[q + 1], AIN[q + 1], hm)
            for i in range(n):
                for j in range(n):
                    y[i, j] = r[i, j] + 0.5 * h * k1[i, j]
            _lindblad_rhs(n, nj, hm, J, y, tmp, k2)
            for i in range(n):
                for j in range(n):
                    y[i, j] = r[i, j] + 0.5 * h * k2[i, j]
            _lindblad_rhs(n, nj, hm, J, y, tmp, k3)
            _assemble(n, H0, HD, PIN, OM[q + 2], AIN[q + 2], hm)
            for i in range(n):
                for j in range(n):
                    y[i, j] = r[i, j] + h * k3[i, j]
            _lindblad_rhs(n, nj, hm, J, y, tmp, k4)
            for i in range(n):
                for j in range(n):
                    r[i, j] = r[i, j] + h / 6.0 * (k1[i, j] + 2 * k2[i, j] + 2 * k3[i, j] + k4[i, j])
            if (s + 1) % substeps == 0:
                for i in range(n):
                    for j in range(n):
                        out[(s + 1) // substeps, i, j] = r[i, j]
    return out_np
