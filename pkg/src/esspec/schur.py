"""Schur-complement symbols, the limiting spectral pencil, stabilization,
exceptional sets, and the film-template damping condition.

For a spectral parameter lam off the resolvent-denominator curve, the first
Schur-complement symbol at a point (x, xi) is

    a(x,xi) - lam - b(x,xi) c(x,xi) / (d(x,xi) - lam),

and the second swaps the roles of a and d.  At x = infinity the entries are
the limiting polynomials, where pointwise multiplication is the exact
constant-coefficient composition.  Clearing the denominator of either
limiting symbol yields the same quadratic pencil

    P(lam, xi) = lam^2 + A(xi) lam + B(xi),
    A = -(a_lim + d_lim),  B = a_lim d_lim - b_lim c_lim,

whose lam-roots over real xi trace the essential-spectrum curve.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from . import numerics
from .ellipticity import CASE_BALANCED, CASE_DIAG, classify
from .symbols import (INFINITY, LimitingMatrix, OperatorMatrix, Polynomial,
                      eval_symbol, limiting_matrix, principal_symbol)

FIRST = "first"
SECOND = "second"


class PoleError(ArithmeticError):
    """The resolvent denominator vanishes (within tolerance) at the point."""


def schur_symbol(T: OperatorMatrix, which: str, lam: complex, x: float,
                 xi: float, params: dict[str, complex] | None = None,
                 pole_tol: float = 1e-12) -> complex:
    """First or second Schur-complement symbol at (x, xi).

    x may be ``INFINITY``, selecting the limiting polynomials.  Raises
    PoleError when the denominator entry is within pole_tol of lam.
    """
    if which not in (FIRST, SECOND):
        raise ValueError(f"which must be {FIRST!r} or {SECOND!r}")
    if x == INFINITY or x == -INFINITY:
        L = limiting_matrix(T)
        w = 1j * xi
        av, bv, cv, dv = L.a(w), L.b(w), L.c(w), L.d(w)
    else:
        av = eval_symbol(T.a, x, xi, params)
        bv = eval_symbol(T.b, x, xi, params)
        cv = eval_symbol(T.c, x, xi, params)
        dv = eval_symbol(T.d, x, xi, params)
    if which == FIRST:
        den = dv - lam
        if abs(den) <= pole_tol:
            raise PoleError(f"denominator entry within {pole_tol:.1e} of lam at xi={xi}")
        return av - lam - bv * cv / den
    den = av - lam
    if abs(den) <= pole_tol:
        raise PoleError(f"denominator entry within {pole_tol:.1e} of lam at xi={xi}")
    return dv - lam - cv * bv / den


def principal_schur_symbol(T: OperatorMatrix, x: float, xi: float,
                           params: dict[str, complex] | None = None,
                           pole_tol: float = 1e-12) -> complex:
    """Principal symbol of the first Schur complement (lam-independent).

    Diagonal-heavy case: principal of a.  Balanced: a_top - b_top c_top / d_top.
    Off-diagonal-heavy: -b_top c_top / d_top.
    """
    case = classify(T)
    pa = principal_symbol(T.a, x, xi, params)
    if case == CASE_DIAG:
        return pa
    pd = principal_symbol(T.d, x, xi, params)
    if abs(pd) <= pole_tol:
        raise PoleError(f"principal denominator vanishes at (x={x}, xi={xi})")
    cross = (principal_symbol(T.b, x, xi, params)
             * principal_symbol(T.c, x, xi, params) / pd)
    return pa - cross if case == CASE_BALANCED else -cross


# ---------------------------------------------------------------------------
# The limiting spectral pencil

@dataclass(frozen=True)
class SpectralPencil:
    """P(lam, xi) = lam^2 + lam_coeff(xi) * lam + const_coeff(xi)."""

    lam_coeff: Polynomial
    const_coeff: Polynomial

    def __call__(self, lam: complex, xi: float) -> complex:
        return lam * lam + self.lam_coeff.eval_xi(xi) * lam + self.const_coeff.eval_xi(xi)

    def residual_scale(self, lam: complex, xi: float) -> float:
        """Sum of |coefficient| * |lam|^k, the natural residual normalizer."""
        r = abs(lam)
        return r * r + abs(self.lam_coeff.eval_xi(xi)) * r + abs(self.const_coeff.eval_xi(xi))

    def roots_at(self, xi: float) -> list[complex]:
        return numerics.poly_roots(
            [1.0, self.lam_coeff.eval_xi(xi), self.const_coeff.eval_xi(xi)])

    def roots_grid(self, xi: np.ndarray) -> np.ndarray:
        """Vectorized roots over a xi array; shape (2, len(xi))."""
        b = np.asarray(self.lam_coeff.eval_xi(xi), dtype=complex)
        c = np.asarray(self.const_coeff.eval_xi(xi), dtype=complex)
        s = np.sqrt(b * b - 4.0 * c)
        s = np.where((np.conj(b) * s).real < 0.0, -s, s)
        qq = -0.5 * (b + s)
        with np.errstate(divide="ignore", invalid="ignore"):
            r2 = np.where(qq != 0, c / np.where(qq != 0, qq, 1.0), -b - qq)
        return np.stack([qq, r2])


def build_pencil(L: LimitingMatrix) -> SpectralPencil:
    """Exact polynomial arithmetic on the limiting entries."""
    return SpectralPencil(lam_coeff=-(L.a + L.d),
                          const_coeff=L.a * L.d - L.b * L.c)


def pencil_via_schur(T: OperatorMatrix, which: str = FIRST,
                     pole_tol: float = 1e-12) -> SpectralPencil:
    """Independent pencil construction: sample the limiting Schur symbol,
    clear its denominator numerically, and interpolate the coefficients.

    This path goes through schur_symbol evaluation only, never through the
    polynomial product used by build_pencil, so the two constructions
    cross-check each other.
    """
    L = limiting_matrix(T)
    deg_b = max(T.kappa, 0)
    deg_a = max(T.m, T.q)
    nodes = np.array([0.45 + 0.37 * j for j in range(deg_b + 1)])
    den_poly = L.d if which == FIRST else L.a
    lam_vals_a = []
    lam_vals_b = []
    for xi in nodes:
        den0 = den_poly.eval_xi(xi)
        radius = abs(den0) + 2.0
        # Antipodal probes +/- lam0: the quadratic's coefficients then come
        # from sum/difference formulas with no interpolation system.
        lam0 = max((radius * cmath.exp(1j * t) for t in (0.785, 0.449, 2.513)),
                   key=lambda z: min(abs(z - den0), abs(-z - den0)))
        g_plus = (den0 - lam0) * schur_symbol(T, which, lam0, INFINITY, xi,
                                              pole_tol=pole_tol)
        g_minus = (den0 + lam0) * schur_symbol(T, which, -lam0, INFINITY, xi,
                                               pole_tol=pole_tol)
        lam_vals_a.append((g_plus - g_minus) / (2.0 * lam0))
        lam_vals_b.append(0.5 * (g_plus + g_minus) - lam0 * lam0)
    w = 1j * nodes
    Va = np.vander(w[:deg_a + 1], deg_a + 1, increasing=True)
    Vb = np.vander(w, deg_b + 1, increasing=True)
    a_coeffs = _refined_solve(Va, np.asarray(lam_vals_a[:deg_a + 1]))
    b_coeffs = _refined_solve(Vb, np.asarray(lam_vals_b))
    return SpectralPencil(Polynomial(_chop(a_coeffs)), Polynomial(_chop(b_coeffs)))


def _refined_solve(V: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """LU solve plus two iterative-refinement steps (Vandermonde systems
    are mildly ill-conditioned and the agreement contract is tight)."""
    x = numerics.lu_solve(V, rhs)
    for _ in range(2):
        x = x + numerics.lu_solve(V, rhs - V @ x)
    return x


def _chop(coeffs: np.ndarray, rel: float = 1e-9) -> list[complex]:
    scale = float(np.max(np.abs(coeffs))) if len(coeffs) else 0.0
    return [0j if abs(c) <= rel * scale else complex(c) for c in coeffs]


# ---------------------------------------------------------------------------
# Stabilization at infinity

def default_stabilization_grid() -> np.ndarray:
    mags = np.logspace(0.0, 3.0, 120)
    inner = np.linspace(-0.975, 0.975, 40)
    return np.concatenate([-mags[::-1], inner, mags])


def default_probe(L: LimitingMatrix, xi_grid: np.ndarray) -> complex:
    """Spectral parameter to the right of the denominator curve.

    One more than the larger of 1 and twice the curve's magnitude on the
    unit xi ball, shifted past the right edge of the sampled curve's
    bounding box; keeps the resolvent denominator bounded away from zero.
    """
    unit = np.linspace(-1.0, 1.0, 41)
    mag = float(np.max(np.abs(L.d.eval_xi(unit))))
    right = float(np.max(L.d.eval_xi(np.asarray(xi_grid)).real))
    return complex(right + 1.0 + max(1.0, 2.0 * mag))


def stabilization_metric(T: OperatorMatrix, lam_probe: complex, x: float,
                         xi_grid: np.ndarray | None = None,
                         params: dict[str, complex] | None = None,
                         pole_guard: float = 0.5,
                         pole_tol: float = 1e-12) -> float:
    """Weighted sup-distance of the first Schur symbol from its limit.

    Returns sup over the grid of <xi>^(q-kappa) |S(lam,x,xi) - S(lam,inf,xi)|.
    The difference is evaluated through the coefficient perturbations, never
    by subtracting the two symbol values: the true difference decays like
    the perturbations (far below machine epsilon times the symbol size), so
    naive subtraction would floor at roundoff of the large common part.
    """
    if xi_grid is None:
        xi_grid = default_stabilization_grid()
    xi = np.asarray(xi_grid, dtype=float)
    L = limiting_matrix(T)
    w = 1j * xi
    d_inf = L.d(w)
    delta_d_poly = Polynomial(T.d.perturbation_values(x, params))
    d_fin = d_inf + delta_d_poly(w)
    if float(np.min(np.abs(d_inf - lam_probe))) < pole_guard:
        raise PoleError("probe too close to the limiting denominator curve")
    if float(np.min(np.abs(d_fin - lam_probe))) < pole_guard:
        raise PoleError("probe too close to the denominator curve at finite x")

    delta_a = Polynomial(T.a.perturbation_values(x, params))(w)
    delta_b = Polynomial(T.b.perturbation_values(x, params))(w)
    delta_c = Polynomial(T.c.perturbation_values(x, params))(w)
    delta_d = delta_d_poly(w)
    b_inf = L.b(w)
    c_inf = L.c(w)
    den_inf = d_inf - lam_probe
    num = (delta_b * c_inf + b_inf * delta_c + delta_b * delta_c) * den_inf \
        - b_inf * c_inf * delta_d
    diff = delta_a - num / ((d_fin - lam_probe) * den_inf)
    weight = (1.0 + xi * xi) ** (0.5 * (T.q - T.kappa))
    return float(np.max(weight * np.abs(diff)))


# ---------------------------------------------------------------------------
# Exceptional sets

@dataclass(frozen=True)
class LambdaPoint:
    lam: complex
    xi_a: float
    xi_d: float
    residual: float


@dataclass
class ExceptionalSet:
    """Sampled diagonal-entry limit curves and their refined intersections."""

    xi_grid: np.ndarray
    curve_a: np.ndarray
    curve_d: np.ndarray
    lambda_set: list[LambdaPoint] = field(default_factory=list)

    def lambda_values(self) -> list[complex]:
        return [pt.lam for pt in self.lambda_set]


def default_curve_grid(span: float = 100.0, points: int = 2001) -> np.ndarray:
    """Antisymmetric tanh-warped grid including 0 (dense near the origin)."""
    half = (points - 1) // 2
    u = np.linspace(0.0, 3.0, half + 1)
    pos = span * np.tanh(u) / math.tanh(3.0)
    return np.concatenate([-pos[:0:-1], pos])


def exceptional_sets(L: LimitingMatrix, xi_grid: np.ndarray | None = None,
                     coarse_tol: float = 1e-2,
                     refine_tol: float = 1e-10) -> ExceptionalSet:
    """Locate the intersection of the two diagonal limit curves.

    Coarse candidates come from a pairwise scan of the sampled curves plus,
    for every sample of one curve, the polynomial solutions of the other
    entry's equation restricted to (near-)real frequencies; the latter
    catches intersections that fall between grid points.  Candidates are
    refined by damped Newton on the two-real-unknowns system, with a
    coordinate-descent fallback when the Jacobian degenerates (tangential
    intersections), then deduplicated at 10x the refinement tolerance.
    """
    if xi_grid is None:
        xi_grid = default_curve_grid()
    xi = np.asarray(xi_grid, dtype=float)
    curve_a = np.asarray(L.a.eval_xi(xi), dtype=complex)
    curve_d = np.asarray(L.d.eval_xi(xi), dtype=complex)
    out = ExceptionalSet(xi_grid=xi, curve_a=curve_a, curve_d=curve_d)

    candidates: list[tuple[float, float]] = []
    chunk = 256
    for start in range(0, len(xi), chunk):
        rows = curve_a[start:start + chunk, None]
        dist = np.abs(rows - curve_d[None, :])
        jmin = np.argmin(dist, axis=1)
        ok = dist[np.arange(len(jmin)), jmin] <= coarse_tol
        for i in np.nonzero(ok)[0]:
            candidates.append((float(xi[start + i]), float(xi[jmin[i]])))
    for start in range(0, len(xi), chunk):
        cols = curve_d[start:start + chunk, None]
        dist = np.abs(cols - curve_a[None, :])
        imin = np.argmin(dist, axis=1)
        ok = dist[np.arange(len(imin)), imin] <= coarse_tol
        for j in np.nonzero(ok)[0]:
            candidates.append((float(xi[imin[j]]), float(xi[start + j])))

    spacing_d = np.abs(np.diff(curve_d))
    spacing_a = np.abs(np.diff(curve_a))
    candidates += _poly_candidates(L.a, L.d, xi, curve_d, spacing_d, coarse_tol,
                                   swap=False)
    candidates += _poly_candidates(L.d, L.a, xi, curve_a, spacing_a, coarse_tol,
                                   swap=True)

    refined: list[LambdaPoint] = []
    for xi1, xi2 in candidates:
        pt = _refine_intersection(L.a, L.d, xi1, xi2, refine_tol)
        if pt is not None:
            refined.append(pt)
    refined.sort(key=lambda pt: (pt.residual, pt.lam.real, pt.lam.imag))
    kept: list[LambdaPoint] = []
    for pt in refined:
        if all(abs(pt.lam - other.lam) > refine_tol * 10 for other in kept):
            kept.append(pt)
    kept.sort(key=lambda pt: (pt.lam.real, pt.lam.imag))
    out.lambda_set = kept
    return out


def _poly_candidates(solve_poly: Polynomial, other: Polynomial, xi: np.ndarray,
                     other_vals: np.ndarray, other_spacing: np.ndarray,
                     coarse_tol: float, swap: bool) -> list[tuple[float, float]]:
    """Roots of solve_poly(w) = other value, projected to real frequencies."""
    if solve_poly.degree is None or solve_poly.degree < 1:
        return []
    coeffs_high = list(solve_poly.coeffs[::-1])
    found = []
    for k, target in enumerate(other_vals):
        shifted = list(coeffs_high)
        shifted[-1] -= target
        try:
            roots = numerics.poly_roots(shifted)
        except ValueError:
            continue
        local = float(other_spacing[min(k, len(other_spacing) - 1)]) \
            if len(other_spacing) else 0.0
        accept = max(coarse_tol, 2.0 * local)
        for r in roots:
            if abs(r.real) > 0.1 * (1.0 + abs(r)):
                continue
            cand = float(r.imag)
            if abs(solve_poly.eval_xi(cand) - target) <= accept:
                pair = (cand, float(xi[k]))
                found.append((pair[1], pair[0]) if swap else pair)
    return found


def _refine_intersection(pa: Polynomial, pd: Polynomial, xi1: float, xi2: float,
                         refine_tol: float, max_iter: int = 60) -> LambdaPoint | None:
    da, dd = pa.derivative(), pd.derivative()

    def fval(u1: float, u2: float) -> complex:
        return pa.eval_xi(u1) - pd.eval_xi(u2)

    f = fval(xi1, xi2)
    for _ in range(max_iter):
        if abs(f) <= refine_tol:
            break
        ga = 1j * da.eval_xi(xi1)
        gd = -1j * dd.eval_xi(xi2)
        det = ga.real * gd.imag - gd.real * ga.imag
        scale = max(abs(ga), abs(gd), 1e-30)
        if abs(det) <= 1e-13 * scale * scale:
            xi1, xi2, f = _descend(pa, pd, xi1, xi2, refine_tol)
            break
        s1 = (-f.real * gd.imag + f.imag * gd.real) / det
        s2 = (-ga.real * f.imag + ga.imag * f.real) / det
        t = 1.0
        improved = False
        while t >= 1.0 / 4096.0:
            trial = fval(xi1 + t * s1, xi2 + t * s2)
            if abs(trial) < abs(f):
                xi1, xi2, f = xi1 + t * s1, xi2 + t * s2, trial
                improved = True
                break
            t *= 0.5
        if not improved:
            xi1, xi2, f = _descend(pa, pd, xi1, xi2, refine_tol)
            break
    if abs(f) <= refine_tol:
        lam = 0.5 * (pa.eval_xi(xi1) + pd.eval_xi(xi2))
        return LambdaPoint(lam=complex(lam), xi_a=xi1, xi_d=xi2, residual=abs(f))
    return None


def _descend(pa: Polynomial, pd: Polynomial, xi1: float, xi2: float,
             refine_tol: float, rounds: int = 80) -> tuple[float, float, complex]:
    """Coordinate-descent fallback for tangential or degenerate candidates."""
    h = 0.25
    f = pa.eval_xi(xi1) - pd.eval_xi(xi2)
    for _ in range(rounds):
        if abs(f) <= refine_tol:
            break
        for coord in (0, 1):
            base = xi1 if coord == 0 else xi2
            offsets = base + h * np.linspace(-1.0, 1.0, 9)
            if coord == 0:
                vals = np.abs(pa.eval_xi(offsets) - pd.eval_xi(xi2))
            else:
                vals = np.abs(pa.eval_xi(xi1) - pd.eval_xi(offsets))
            k = int(np.argmin(vals))
            if coord == 0:
                xi1 = float(offsets[k])
            else:
                xi2 = float(offsets[k])
        f = pa.eval_xi(xi1) - pd.eval_xi(xi2)
        h *= 0.55
    return xi1, xi2, f


# ---------------------------------------------------------------------------
# Film-template damping condition

class OmegaTemplateError(ValueError):
    """The operator does not match the film template."""


@dataclass(frozen=True)
class OmegaReport:
    omega1: float
    omega2: float
    bound: float
    holds: bool

    def to_json_dict(self) -> dict:
        return {"omega1": self.omega1, "omega2": self.omega2,
                "bound": self.bound, "holds": self.holds}


def omega_condition(T: OperatorMatrix, x_grid: np.ndarray | None = None,
                    params: dict[str, complex] | None = None) -> OmegaReport:
    """Sufficient condition for an empty exceptional set (film template).

    Requires a second-order first diagonal entry with a constant real
    positive leading coefficient kappa2 and a real-valued zero-order
    coefficient; then with omega1 = -sup Re(zero-order coefficient) and
    omega2 = sup |first-order coefficient| the condition is
    omega1 > 0 and omega2 < sqrt(2 kappa2 omega1).
    """
    if x_grid is None:
        x_grid = np.linspace(-50.0, 50.0, 201)
    if T.a.order != 2:
        raise OmegaTemplateError("omega-condition requires film-template operator "
                                 "(first diagonal entry of order 2)")
    lead = T.a.coeffs[2]
    if not lead.is_constant() or abs(lead.limit.imag) > 1e-12 or lead.limit.real <= 0:
        raise OmegaTemplateError("omega-condition requires film-template operator "
                                 "(constant real positive leading coefficient)")
    kappa2 = lead.limit.real
    coeff0 = T.a.coeffs[0]
    coeff1 = T.a.coeffs[1]
    vals0 = np.array([coeff0.value(x, params) for x in x_grid] + [coeff0.limit])
    vals1 = np.array([coeff1.value(x, params) for x in x_grid] + [coeff1.limit])
    if float(np.max(np.abs(vals0.imag))) > 1e-12 * max(1.0, float(np.max(np.abs(vals0)))):
        raise OmegaTemplateError("omega-condition requires film-template operator "
                                 "(real-valued zero-order coefficient)")
    omega1 = -float(np.max(vals0.real))
    omega2 = float(np.max(np.abs(vals1)))
    bound = math.sqrt(max(2.0 * kappa2 * omega1, 0.0))
    return OmegaReport(omega1=omega1, omega2=omega2, bound=bound,
                       holds=(omega1 > 0.0 and omega2 < bound))
