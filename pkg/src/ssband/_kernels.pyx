# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot loops in ``_kernels_py``.

Signatures and semantics are identical to the numpy fallback.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport floor, ceil, pow

cnp.import_array()


cdef inline Py_ssize_t _mod(Py_ssize_t a, Py_ssize_t n) nogil:
    cdef Py_ssize_t r = a % n
    if r < 0:
        r += n
    return r


def idwt_step(approx, detail, lowpass, highpass, Py_ssize_t offset):
    cdef const double[::1] a = np.ascontiguousarray(approx, dtype=np.float64)
    cdef const double[::1] d = np.ascontiguousarray(detail, dtype=np.float64)
    cdef const double[::1] h = np.ascontiguousarray(lowpass, dtype=np.float64)
    cdef const double[::1] g = np.ascontiguousarray(highpass, dtype=np.float64)
    cdef Py_ssize_t n = a.shape[0], n2 = 2 * a.shape[0], L = h.shape[0]
    out_arr = np.zeros(n2)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t k, m, idx
    with nogil:
        for m in range(L):
            for k in range(n):
                idx = _mod(2 * k + m - offset, n2)
                out[idx] += h[m] * a[k] + g[m] * d[k]
    return out_arr


def dwt_step(fine, lowpass, highpass, Py_ssize_t offset):
    cdef const double[::1] f = np.ascontiguousarray(fine, dtype=np.float64)
    cdef const double[::1] h = np.ascontiguousarray(lowpass, dtype=np.float64)
    cdef const double[::1] g = np.ascontiguousarray(highpass, dtype=np.float64)
    cdef Py_ssize_t n2 = f.shape[0], n = f.shape[0] // 2, L = h.shape[0]
    a_arr = np.zeros(n)
    d_arr = np.zeros(n)
    cdef double[::1] a = a_arr
    cdef double[::1] d = d_arr
    cdef Py_ssize_t k, m
    cdef double v
    with nogil:
        for m in range(L):
            for k in range(n):
                v = f[_mod(2 * k + m - offset, n2)]
                a[k] += h[m] * v
                d[k] += g[m] * v
    return a_arr, d_arr


def eval_points(samples, double x0, double inv_step, int level, coeffs, t):
    cdef const double[::1] s = np.ascontiguousarray(samples, dtype=np.float64)
    cdef const double[::1] c = np.ascontiguousarray(coeffs, dtype=np.float64)
    cdef const double[::1] tt = np.ascontiguousarray(t, dtype=np.float64)
    cdef Py_ssize_t npts = s.shape[0], nt = tt.shape[0]
    cdef Py_ssize_t size = (<Py_ssize_t>1) << level
    cdef double scale = pow(2.0, level)
    cdef int width = <int>ceil((npts - 1) / inv_step) + 1
    out_arr = np.zeros(nt)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i, k, i0
    cdef int o
    cdef double u, pos, frac, acc
    with nogil:
        for i in range(nt):
            u = tt[i] * scale
            acc = 0.0
            for o in range(width + 1):
                k = <Py_ssize_t>floor(u - x0) - o
                pos = (u - k - x0) * inv_step
                if pos < 0.0 or pos > npts - 1:
                    continue
                i0 = <Py_ssize_t>floor(pos)
                if i0 > npts - 2:
                    i0 = npts - 2
                frac = pos - i0
                acc += c[_mod(k, size)] * (s[i0] * (1.0 - frac) + s[i0 + 1] * frac)
            out[i] = acc
    return out_arr * 2.0 ** (level / 2.0)


def project_points(samples, double x0, double inv_step, int level, t, weights):
    cdef const double[::1] s = np.ascontiguousarray(samples, dtype=np.float64)
    cdef const double[::1] tt = np.ascontiguousarray(t, dtype=np.float64)
    cdef const double[::1] w = np.ascontiguousarray(weights, dtype=np.float64)
    cdef Py_ssize_t npts = s.shape[0], nt = tt.shape[0]
    cdef Py_ssize_t size = (<Py_ssize_t>1) << level
    cdef double scale = pow(2.0, level)
    cdef int width = <int>ceil((npts - 1) / inv_step) + 1
    out_arr = np.zeros(size)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i, k, i0
    cdef int o
    cdef double u, pos, frac
    with nogil:
        for i in range(nt):
            u = tt[i] * scale
            for o in range(width + 1):
                k = <Py_ssize_t>floor(u - x0) - o
                pos = (u - k - x0) * inv_step
                if pos < 0.0 or pos > npts - 1:
                    continue
                i0 = <Py_ssize_t>floor(pos)
                if i0 > npts - 2:
                    i0 = npts - 2
                frac = pos - i0
                out[_mod(k, size)] += w[i] * (s[i0] * (1.0 - frac) + s[i0 + 1] * frac)
    return out_arr * 2.0 ** (level / 2.0)
