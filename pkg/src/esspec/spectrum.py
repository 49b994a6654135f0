"""Trace the essential-spectrum curve of the limiting pencil over a
frequency grid, label the two branches, and flag exceptional points.

Points near the sampled diagonal limit curves are flagged, never dropped:
the zero-set description makes no claim there, and the flags let consumers
apply exactly the intended set algebra.  The default grid is tanh-warped so
samples concentrate where the curve is inside the plot window; its span is
doubled until both branches exit the window (capped at 2^16).
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass

import numpy as np

from .schur import ExceptionalSet, SpectralPencil


@dataclass(frozen=True)
class Window:
    """Axis-aligned clipping box in the spectral plane."""

    re_min: float
    re_max: float
    im_min: float
    im_max: float

    def __post_init__(self):
        if not (self.re_min < self.re_max and self.im_min < self.im_max):
            raise ValueError("window bounds must satisfy min < max")

    def contains(self, lam: complex) -> bool:
        return (self.re_min <= lam.real <= self.re_max
                and self.im_min <= lam.imag <= self.im_max)

    @classmethod
    def parse(cls, text: str) -> "Window":
        parts = [float(p) for p in text.split(",")]
        if len(parts) != 4:
            raise ValueError("window must be re_min,re_max,im_min,im_max")
        return cls(*parts)


FIG_WINDOW = Window(-3.0, 0.2, -20.0, 20.0)
FIG_ZOOM_WINDOW = Window(-0.2, 0.1, -0.2, 0.2)


@dataclass(frozen=True)
class RootFlags:
    ok: bool
    near_sigma_d: bool
    near_sigma_a: bool
    in_lambda_set: bool
    clipped: bool


@dataclass(frozen=True)
class SpectrumSample:
    xi: float
    roots: tuple[complex, complex]
    flags: tuple[RootFlags, RootFlags]


@dataclass
class SpectrumCurve:
    xi_grid: np.ndarray
    samples: list[SpectrumSample]
    window: Window | None = None
    lambda_window: Window | None = None  # alias kept for the record layout

    def branch(self, index: int) -> np.ndarray:
        return np.array([s.roots[index] for s in self.samples])


def warped_grid(span: float, points: int = 2001, u_max: float = 3.0) -> np.ndarray:
    """Antisymmetric grid span*tanh(u)/tanh(u_max), u uniform on [-u_max, u_max]."""
    if points < 3 or points % 2 == 0:
        raise ValueError("points must be an odd number >= 3")
    half = (points - 1) // 2
    u = np.linspace(0.0, u_max, half + 1)
    pos = span * np.tanh(u) / math.tanh(u_max)
    return np.concatenate([-pos[:0:-1], pos])


def adaptive_span(pencil: SpectralPencil, window: Window | None,
                  start: float = 1.0, cap: float = 2.0 ** 16) -> float:
    """Double the grid span until both roots leave the window at the ends."""
    if window is None:
        return 16.0
    span = start
    while span < cap:
        outside = all(not window.contains(r)
                      for xi in (-span, span) for r in pencil.roots_at(xi))
        if outside:
            break
        span *= 2.0
    return span


def default_xi_grid(pencil: SpectralPencil, window: Window | None,
                    points: int = 2001) -> np.ndarray:
    return warped_grid(adaptive_span(pencil, window), points)


def trace_spectrum(pencil: SpectralPencil, exc: ExceptionalSet,
                   xi_grid: np.ndarray | None = None,
                   window: Window | None = None,
                   root_tol: float = 1e-10,
                   excl_tol: float = 1e-6) -> SpectrumCurve:
    """Roots of the pencil over the grid with branch labels and flags.

    Branch continuity uses minimal-sum pairing of the two roots between
    consecutive grid points (optimal for two elements).  Flags per root:
    ``ok`` (scaled pencil residual below root_tol), proximity to either
    sampled limit curve, membership in the refined exceptional set, and
    window clipping (clipped points are retained).
    """
    if xi_grid is None:
        xi_grid = default_xi_grid(pencil, window)
    xi_grid = np.asarray(xi_grid, dtype=float)
    lambda_pts = exc.lambda_values()

    samples: list[SpectrumSample] = []
    prev: tuple[complex, complex] | None = None
    for xi in xi_grid:
        roots = pencil.roots_at(float(xi))
        r = (roots[0], roots[1])
        if prev is None:
            r = tuple(sorted(r, key=lambda z: (z.real, z.imag)))
        else:
            keep = abs(r[0] - prev[0]) + abs(r[1] - prev[1])
            swap = abs(r[1] - prev[0]) + abs(r[0] - prev[1])
            if swap < keep:
                r = (r[1], r[0])
        prev = r
        flags = tuple(_root_flags(pencil, float(xi), z, exc, lambda_pts,
                                  window, root_tol, excl_tol) for z in r)
        samples.append(SpectrumSample(xi=float(xi), roots=r, flags=flags))
    return SpectrumCurve(xi_grid=xi_grid, samples=samples, window=window,
                         lambda_window=window)


def _root_flags(pencil: SpectralPencil, xi: float, root: complex,
                exc: ExceptionalSet, lambda_pts: list[complex],
                window: Window | None, root_tol: float,
                excl_tol: float) -> RootFlags:
    scale = pencil.residual_scale(root, xi)
    residual = abs(pencil(root, xi)) / max(scale, 1e-300)
    near_d = bool(np.min(np.abs(exc.curve_d - root)) <= excl_tol) \
        if exc.curve_d.size else False
    near_a = bool(np.min(np.abs(exc.curve_a - root)) <= excl_tol) \
        if exc.curve_a.size else False
    in_lam = any(abs(root - p) <= excl_tol for p in lambda_pts)
    clipped = window is not None and not window.contains(root)
    return RootFlags(ok=residual <= root_tol, near_sigma_d=near_d,
                     near_sigma_a=near_a, in_lambda_set=in_lam, clipped=clipped)


@dataclass(frozen=True)
class CurveReport:
    max_residual: float
    max_symmetry_defect: float
    max_branch_jump: float

    def to_json_dict(self) -> dict:
        return {"max_residual": self.max_residual,
                "max_symmetry_defect": self.max_symmetry_defect,
                "max_branch_jump": self.max_branch_jump}


def curve_invariant_check(curve: SpectrumCurve, pencil: SpectralPencil) -> CurveReport:
    """Scaled residual, conjugate-symmetry defect, and branch-jump extremes.

    The symmetry defect compares the root multiset at -xi with the
    conjugated multiset at xi; it is only expected to vanish when the
    pencil coefficients are real in the variable i*xi.
    """
    max_res = 0.0
    for s in curve.samples:
        for z in s.roots:
            scale = max(pencil.residual_scale(z, s.xi), 1e-300)
            max_res = max(max_res, abs(pencil(z, s.xi)) / scale)

    max_sym = 0.0
    k_last = len(curve.samples) - 1
    for k, s in enumerate(curve.samples):
        mirror = curve.samples[k_last - k]
        a = sorted(mirror.roots, key=lambda z: (z.real, z.imag))
        b = sorted((z.conjugate() for z in s.roots), key=lambda z: (z.real, z.imag))
        direct = max(abs(a[0] - b[0]), abs(a[1] - b[1]))
        crossed = max(abs(a[0] - b[1]), abs(a[1] - b[0]))
        max_sym = max(max_sym, min(direct, crossed))

    max_jump = 0.0
    for k in range(len(curve.samples) - 1):
        cur, nxt = curve.samples[k], curve.samples[k + 1]
        for i in (0, 1):
            max_jump = max(max_jump, abs(nxt.roots[i] - cur.roots[i]))
    return CurveReport(max_residual=max_res, max_symmetry_defect=max_sym,
                       max_branch_jump=max_jump)


# ---------------------------------------------------------------------------
# CSV emission

CSV_HEADER = "xi,branch,re_lambda,im_lambda,ok,near_sigma_d,near_sigma_a,in_lambda_set"


def curve_to_csv(curve: SpectrumCurve, header_comment: str | None = None) -> str:
    """Exact column order per the interface; floats in shortest
    round-trip decimal, booleans as 0/1, branches labelled 1 and 2."""
    out = io.StringIO()
    if header_comment:
        out.write(f"# {header_comment}\n")
    out.write(CSV_HEADER + "\n")
    for s in curve.samples:
        for branch in (0, 1):
            z = s.roots[branch]
            f = s.flags[branch]
            out.write(f"{s.xi!r},{branch + 1},{z.real!r},{z.imag!r},"
                      f"{int(f.ok)},{int(f.near_sigma_d)},"
                      f"{int(f.near_sigma_a)},{int(f.in_lambda_set)}\n")
    return out.getvalue()
