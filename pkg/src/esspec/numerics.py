"""Dense complex eigenvalues and polynomial roots.

The eigensolver is unblocked Householder reduction to upper Hessenberg form
followed by single-shift QR with Wilkinson shifts (eigenvalues only, desk
scale n <= 2048).  The hot kernels live in a compiled extension
(``esspec._eig_cy``) with a numpy fallback (``esspec._eig_py``); whichever
imports first is used, see ``BACKEND``.

Polynomial roots use the stable quadratic formula up to degree 2 and
companion-matrix eigenvalues plus one Newton polish step beyond.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

try:  # pragma: no cover - depends on the build environment
    from . import _eig_cy as _kernels
    BACKEND = "compiled"
except ImportError:  # pragma: no cover
    from . import _eig_py as _kernels
    BACKEND = "python"

from . import _eig_py as _fallback_kernels


@dataclass
class EigenResult:
    """Eigenvalues plus QR bookkeeping.

    ``converged`` implies every deflated subdiagonal entry was below
    ``qr_tol`` times its diagonal neighbours, so ``max_offdiag_residual``
    is at most qr_tol * matrix norm.
    """

    eigenvalues: np.ndarray
    iterations: int
    converged: bool
    max_offdiag_residual: float


def as_complex_matrix(m) -> np.ndarray:
    """Validate and convert to a square, finite complex128 array."""
    a = np.array(m, dtype=complex, order="C")
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a.view(float))):
        raise ValueError("matrix has non-finite entries")
    return a


def eigenvalues(m, qr_tol: float = 1e-12, kernels=None) -> EigenResult:
    """All eigenvalues of a dense complex matrix (no eigenvectors).

    ``kernels`` overrides the backend module (used by the benchmark and the
    backend-agreement tests); sweeps are capped at 40 n.
    """
    k = kernels if kernels is not None else _kernels
    h = as_complex_matrix(m)
    n = h.shape[0]
    if n == 1:
        return EigenResult(np.array([h[0, 0]]), 0, True, 0.0)
    k.hessenberg(h)
    eigs, sweeps, converged, max_off = k.qr_hessenberg_eigvals(h, qr_tol, 40 * n)
    return EigenResult(np.asarray(eigs), int(sweeps), bool(converged), float(max_off))


def python_kernels():
    """The pure-Python kernel module (always available)."""
    return _fallback_kernels


def compiled_kernels():
    """The compiled kernel module, or None if the extension is not built."""
    return _kernels if BACKEND == "compiled" else None


# ---------------------------------------------------------------------------
# Polynomial roots

def _quadratic_roots(a: complex, b: complex, c: complex) -> list[complex]:
    """Roots of a y^2 + b y + c, larger-magnitude root computed first."""
    disc = b * b - 4.0 * a * c
    s = cmath.sqrt(disc)
    if (b.conjugate() * s).real < 0.0:
        s = -s
    qq = -0.5 * (b + s)
    r1 = qq / a
    r2 = c / qq if qq != 0 else -b / a - r1
    return [r1, r2]


def _polyval(coeffs_high_to_low, z: complex) -> complex:
    acc = 0j
    for c in coeffs_high_to_low:
        acc = acc * z + c
    return acc


def poly_roots(coeffs, newton_polish: bool = True,
               force_companion: bool = False) -> list[complex]:
    """All roots (with multiplicity) of a complex polynomial.

    ``coeffs`` are high-to-low degree.  Exact leading zeros are stripped;
    exact trailing zeros yield exact zero roots.  Degree 2 uses the stable
    quadratic formula unless ``force_companion`` is set (used by the
    agreement tests between the two code paths).
    """
    c = [complex(v) for v in coeffs]
    while c and c[0] == 0:
        c.pop(0)
    if not c:
        raise ValueError("zero polynomial has no well-defined roots")
    if len(c) == 1:
        raise ValueError("degree-0 polynomial has no roots")
    zero_roots = 0
    while c[-1] == 0:
        c.pop()
        zero_roots += 1
    roots: list[complex] = [0j] * zero_roots
    degree = len(c) - 1
    if degree == 0:
        return roots
    if degree == 1:
        return roots + [-c[1] / c[0]]
    if degree == 2 and not force_companion:
        return roots + _quadratic_roots(c[0], c[1], c[2])
    monic = np.asarray(c[1:], dtype=complex) / c[0]
    comp = np.zeros((degree, degree), dtype=complex)
    comp[0, :] = -monic
    for j in range(1, degree):
        comp[j, j - 1] = 1.0
    res = eigenvalues(comp)
    found = list(res.eigenvalues)
    if newton_polish:
        dcoeffs = [c[k] * (degree - k) for k in range(degree)]
        for j, r in enumerate(found):
            dp = _polyval(dcoeffs, r)
            if dp != 0:
                found[j] = r - _polyval(c, r) / dp
    return roots + found


# ---------------------------------------------------------------------------
# LU with partial pivoting (determinants and small dense solves)

def lu_factor(m) -> tuple[np.ndarray, np.ndarray, int]:
    """Return (LU, pivots, sign) for a square complex matrix."""
    a = as_complex_matrix(m)
    n = a.shape[0]
    piv = np.arange(n)
    sign = 1
    for k in range(n):
        j = k + int(np.argmax(np.abs(a[k:, k])))
        if a[j, k] == 0:
            continue
        if j != k:
            a[[k, j], :] = a[[j, k], :]
            piv[[k, j]] = piv[[j, k]]
            sign = -sign
        a[k + 1:, k] /= a[k, k]
        a[k + 1:, k + 1:] -= np.outer(a[k + 1:, k], a[k, k + 1:])
    return a, piv, sign


def lu_det(m) -> complex:
    """Determinant via LU with partial pivoting."""
    lu, _, sign = lu_factor(m)
    return complex(sign * np.prod(np.diagonal(lu)))


def lu_solve(m, rhs) -> np.ndarray:
    """Solve m x = rhs for one right-hand side."""
    lu, piv, _ = lu_factor(m)
    n = lu.shape[0]
    b = np.asarray(rhs, dtype=complex)[piv].copy()
    for k in range(n):
        b[k] -= lu[k, :k] @ b[:k]
    for k in range(n - 1, -1, -1):
        if lu[k, k] == 0:
            raise ValueError("singular matrix in lu_solve")
        b[k] = (b[k] - lu[k, k + 1:] @ b[k + 1:]) / lu[k, k]
    return b
