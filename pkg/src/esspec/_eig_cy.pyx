# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled eigenvalue kernels: Householder Hessenberg reduction and
single-shift QR with Wilkinson shifts.  Mirrors esspec._eig_py exactly."""

import numpy as np

cimport cython
from libc.math cimport hypot, sqrt


ctypedef double complex zdouble


cdef inline double _cabs(zdouble z) noexcept:
    return hypot(z.real, z.imag)


def hessenberg(zdouble[:, ::1] a):
    """In-place Householder reduction to upper Hessenberg form."""
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t k, i, j
    cdef double norm2, norm, vnorm2, scale
    cdef zdouble v0, phase, alpha, acc
    cdef zdouble[::1] v = np.zeros(n, dtype=complex)
    cdef zdouble[::1] tmp = np.zeros(n, dtype=complex)

    for k in range(n - 2):
        norm2 = 0.0
        for i in range(k + 1, n):
            norm2 += a[i, k].real * a[i, k].real + a[i, k].imag * a[i, k].imag
        norm = sqrt(norm2)
        if norm == 0.0:
            continue
        v0 = a[k + 1, k]
        if _cabs(v0) > 0.0:
            phase = v0 / _cabs(v0)
        else:
            phase = 1.0
        alpha = -phase * norm
        for i in range(k + 1, n):
            v[i] = a[i, k]
        v[k + 1] = v[k + 1] - alpha
        vnorm2 = 0.0
        for i in range(k + 1, n):
            vnorm2 += v[i].real * v[i].real + v[i].imag * v[i].imag
        if vnorm2 <= 0.0:
            continue
        scale = 2.0 / vnorm2
        # Left update: rows k+1..n-1, columns k..n-1.
        for j in range(k, n):
            acc = 0
            for i in range(k + 1, n):
                acc += v[i].conjugate() * a[i, j]
            tmp[j] = acc * scale
        for i in range(k + 1, n):
            for j in range(k, n):
                a[i, j] = a[i, j] - v[i] * tmp[j]
        # Right update: all rows, columns k+1..n-1.
        for i in range(n):
            acc = 0
            for j in range(k + 1, n):
                acc += a[i, j] * v[j]
            tmp[i] = acc * scale
        for i in range(n):
            for j in range(k + 1, n):
                a[i, j] = a[i, j] - tmp[i] * v[j].conjugate()
        a[k + 1, k] = alpha
        for i in range(k + 2, n):
            a[i, k] = 0


cdef inline zdouble _csqrt(zdouble z) noexcept:
    # Principal square root; the larger-magnitude component is computed
    # first so (|z| -/+ Re z)/2 never cancels.
    cdef double mag = _cabs(z)
    cdef double sr, si
    if mag == 0.0:
        return 0
    if z.real >= 0.0:
        sr = sqrt(0.5 * (mag + z.real))
        si = 0.5 * z.imag / sr
    else:
        si = sqrt(0.5 * (mag - z.real))
        if z.imag < 0.0:
            si = -si
        sr = 0.5 * z.imag / si
        if sr < 0.0:
            sr = -sr
    return sr + 1j * si


cdef inline void _quad2x2(zdouble a, zdouble b, zdouble c, zdouble d,
                          zdouble *r1, zdouble *r2) noexcept:
    cdef zdouble tr = a + d
    cdef zdouble det = a * d - b * c
    cdef zdouble s = _csqrt(tr * tr - 4.0 * det)
    if (tr.conjugate() * s).real < 0.0:
        s = -s
    r1[0] = 0.5 * (tr + s)
    if r1[0] != 0:
        r2[0] = det / r1[0]
    else:
        r2[0] = tr - r1[0]


def qr_hessenberg_eigvals(zdouble[:, ::1] h, double qr_tol, int max_sweeps):
    """Shifted QR deflation loop; see the pure-Python twin for the contract."""
    cdef Py_ssize_t n = h.shape[0]
    eigs_arr = np.zeros(n, dtype=complex)
    cdef zdouble[::1] eigs = eigs_arr
    cdef int sweeps = 0, stagnation = 0
    cdef bint converged = True
    cdef double max_off = 0.0, e, off
    cdef Py_ssize_t hi = n - 1, lo, j
    cdef zdouble mu, r1, r2

    while hi >= 0:
        if hi == 0:
            eigs[0] = h[0, 0]
            break
        lo = hi
        while lo > 0:
            e = _cabs(h[lo, lo - 1])
            if e <= qr_tol * (_cabs(h[lo - 1, lo - 1]) + _cabs(h[lo, lo])):
                if e > max_off:
                    max_off = e
                h[lo, lo - 1] = 0
                break
            lo -= 1
        if lo == hi:
            eigs[hi] = h[hi, hi]
            hi -= 1
            stagnation = 0
            continue
        if lo == hi - 1:
            _quad2x2(h[hi - 1, hi - 1], h[hi - 1, hi],
                     h[hi, hi - 1], h[hi, hi], &r1, &r2)
            eigs[hi - 1] = r1
            eigs[hi] = r2
            hi -= 2
            stagnation = 0
            continue
        if sweeps >= max_sweeps:
            converged = False
            for j in range(hi + 1):
                eigs[j] = h[j, j]
            for j in range(1, hi + 1):
                off = _cabs(h[j, j - 1])
                if off > max_off:
                    max_off = off
            break
        sweeps += 1
        stagnation += 1
        if stagnation % 12 == 0:
            # Exceptional shift: breaks limit cycles on circulant-like input.
            mu = h[hi, hi] + 1.5 * (_cabs(h[hi, hi - 1]) + _cabs(h[hi - 1, hi - 2]))
        else:
            _quad2x2(h[hi - 1, hi - 1], h[hi - 1, hi],
                     h[hi, hi - 1], h[hi, hi], &r1, &r2)
            mu = r1 if _cabs(r1 - h[hi, hi]) <= _cabs(r2 - h[hi, hi]) else r2
        _qr_step(h, lo, hi, mu)

    return eigs_arr, sweeps, converged, max_off


cdef void _qr_step(zdouble[:, ::1] h, Py_ssize_t lo, Py_ssize_t hi,
                   zdouble mu) noexcept:
    cdef Py_ssize_t j, i, top
    cdef double af, ag, r
    cdef zdouble f, g, s, x, y
    cdef double c
    cdef Py_ssize_t m = hi - lo
    cs_arr = np.zeros(m, dtype=float)
    ss_arr = np.zeros(m, dtype=complex)
    cdef double[::1] cs = cs_arr
    cdef zdouble[::1] ss = ss_arr

    for j in range(lo, hi + 1):
        h[j, j] = h[j, j] - mu
    for j in range(lo, hi):
        f = h[j, j]
        g = h[j + 1, j]
        af = _cabs(f)
        ag = _cabs(g)
        if ag == 0.0:
            c = 1.0
            s = 0
        elif af == 0.0:
            c = 0.0
            s = g.conjugate() / ag
        else:
            r = hypot(af, ag)
            c = af / r
            s = (f / af) * g.conjugate() / r
        cs[j - lo] = c
        ss[j - lo] = s
        if s != 0 or c != 1.0:
            for i in range(j, hi + 1):
                x = h[j, i]
                y = h[j + 1, i]
                h[j, i] = c * x + s * y
                h[j + 1, i] = -s.conjugate() * x + c * y
            h[j + 1, j] = 0
    for j in range(lo, hi):
        c = cs[j - lo]
        s = ss[j - lo]
        if s == 0 and c == 1.0:
            continue
        top = j + 2
        if top > hi:
            top = hi
        for i in range(lo, top + 1):
            x = h[i, j]
            y = h[i, j + 1]
            h[i, j] = c * x + s.conjugate() * y
            h[i, j + 1] = -s * x + c * y
    for j in range(lo, hi + 1):
        h[j, j] = h[j, j] + mu
