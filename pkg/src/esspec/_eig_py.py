"""Pure-Python (numpy-vectorized) eigenvalue kernels.

Same algorithms as the compiled extension ``_eig_cy``: unblocked Householder
reduction to upper Hessenberg form followed by explicit single-shift QR with
Wilkinson shifts and relative-threshold deflation.  This module is the
fallback selected at import when the extension is unavailable; the benchmark
in ``benchmarks/bench_eig.py`` compares the two.
"""

from __future__ import annotations

import cmath
import math

import numpy as np


def hessenberg(a: np.ndarray) -> None:
    """In-place Householder reduction of a square complex matrix."""
    n = a.shape[0]
    for k in range(n - 2):
        col = a[k + 1:, k]
        norm = math.sqrt(float(np.sum(col.real ** 2 + col.imag ** 2)))
        if norm == 0.0:
            continue
        v0 = col[0]
        phase = v0 / abs(v0) if v0 != 0 else 1.0 + 0j
        alpha = -phase * norm
        v = col.copy()
        v[0] -= alpha
        vnorm2 = float(np.sum(v.real ** 2 + v.imag ** 2))
        if vnorm2 <= 0.0:
            continue
        scale = 2.0 / vnorm2
        # P = I - scale * v v^*; apply from the left then from the right.
        sub = a[k + 1:, k:]
        sub -= scale * np.outer(v, np.conj(v) @ sub)
        right = a[:, k + 1:]
        right -= scale * np.outer(right @ v, np.conj(v))
        a[k + 1, k] = alpha
        a[k + 2:, k] = 0.0


def _quad2x2(a: complex, b: complex, c: complex, d: complex) -> tuple[complex, complex]:
    """Eigenvalues of [[a, b], [c, d]] via the stable quadratic formula."""
    tr = a + d
    det = a * d - b * c
    disc = tr * tr - 4.0 * det
    s = cmath.sqrt(disc)
    if (tr.conjugate() * s).real < 0.0:
        s = -s
    r1 = 0.5 * (tr + s)
    r2 = det / r1 if r1 != 0 else tr - r1
    return r1, r2


def _wilkinson_shift(h: np.ndarray, hi: int) -> complex:
    a, b = h[hi - 1, hi - 1], h[hi - 1, hi]
    c, d = h[hi, hi - 1], h[hi, hi]
    r1, r2 = _quad2x2(a, b, c, d)
    return r1 if abs(r1 - d) <= abs(r2 - d) else r2


def qr_hessenberg_eigvals(h: np.ndarray, qr_tol: float,
                          max_sweeps: int) -> tuple[np.ndarray, int, bool, float]:
    """Shifted QR on an upper Hessenberg matrix; returns eigenvalues.

    Deflation zeroes a subdiagonal entry once it is below qr_tol times the
    sum of the magnitudes of its diagonal neighbours.  Returns
    (eigenvalues, sweeps, converged, max deflated subdiagonal magnitude).
    """
    n = h.shape[0]
    eigs = np.zeros(n, dtype=complex)
    sweeps = 0
    stagnation = 0
    max_off = 0.0
    converged = True
    hi = n - 1
    while hi >= 0:
        if hi == 0:
            eigs[0] = h[0, 0]
            break
        # Scan for a negligible subdiagonal entry above position hi.
        lo = hi
        while lo > 0:
            e = abs(h[lo, lo - 1])
            if e <= qr_tol * (abs(h[lo - 1, lo - 1]) + abs(h[lo, lo])):
                max_off = max(max_off, e)
                h[lo, lo - 1] = 0.0
                break
            lo -= 1
        if lo == hi:
            eigs[hi] = h[hi, hi]
            hi -= 1
            stagnation = 0
            continue
        if lo == hi - 1:
            eigs[hi - 1], eigs[hi] = _quad2x2(h[hi - 1, hi - 1], h[hi - 1, hi],
                                              h[hi, hi - 1], h[hi, hi])
            hi -= 2
            stagnation = 0
            continue
        if sweeps >= max_sweeps:
            converged = False
            for j in range(hi + 1):
                eigs[j] = h[j, j]
            max_off = max(max_off,
                          float(np.max(np.abs(np.diagonal(h[:hi + 1, :hi + 1], -1)))))
            break
        sweeps += 1
        stagnation += 1
        if stagnation % 12 == 0:
            # Exceptional shift: breaks the limit cycles a pure Wilkinson
            # shift can fall into on permutation-like (circulant) matrices.
            mu = h[hi, hi] + 1.5 * (abs(h[hi, hi - 1]) + abs(h[hi - 1, hi - 2]))
        else:
            mu = _wilkinson_shift(h, hi)
        _qr_step(h, lo, hi, mu)
    return eigs, sweeps, converged, max_off


def _qr_step(h: np.ndarray, lo: int, hi: int, mu: complex) -> None:
    """One explicit shifted QR sweep on the active block [lo..hi]."""
    idx = np.arange(lo, hi + 1)
    h[idx, idx] -= mu
    rotations = []
    for j in range(lo, hi):
        f, g = h[j, j], h[j + 1, j]
        af, ag = abs(f), abs(g)
        if ag == 0.0:
            c, s = 1.0, 0j
        elif af == 0.0:
            c, s = 0.0, g.conjugate() / ag
        else:
            r = math.hypot(af, ag)
            c = af / r
            s = (f / af) * g.conjugate() / r
        rotations.append((c, s))
        if s != 0 or c != 1.0:
            row_j = h[j, j:hi + 1].copy()
            row_j1 = h[j + 1, j:hi + 1]
            h[j, j:hi + 1] = c * row_j + s * row_j1
            h[j + 1, j:hi + 1] = -s.conjugate() * row_j + c * row_j1
            h[j + 1, j] = 0.0
    for j in range(lo, hi):
        c, s = rotations[j - lo]
        if s == 0 and c == 1.0:
            continue
        top = min(j + 2, hi)
        col_j = h[lo:top + 1, j].copy()
        col_j1 = h[lo:top + 1, j + 1]
        h[lo:top + 1, j] = c * col_j + s.conjugate() * col_j1
        h[lo:top + 1, j + 1] = -s * col_j + c * col_j1
    h[idx, idx] += mu
