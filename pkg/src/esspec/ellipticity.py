"""Uniform ellipticity checks for the mixed-order 2x2 system.

The determinant condition bounds |det of the principal-symbol matrix| below
by the Japanese bracket to the power kappa = max{m+q, n+p}.  A finite sample
can never certify an asymptotic bound, so the reported margin is the minimum
of the sampled ratio |det| / <xi>^kappa over the (x, xi) grid (including the
coefficient limits as the x = +/-infinity row) and of the asymptotic tail
value, which is the modulus of the degree-kappa coefficient of the limiting
determinant (in the balanced case: of the combined degree-kappa coefficient,
minimized over the x grid).

The entrywise characterization applies only when the diagonal and
off-diagonal order sums differ: the system is uniformly elliptic iff both
diagonal entries are (diagonal-heavy case) or both off-diagonal entries are
(off-diagonal-heavy case).
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

import numpy as np

from .symbols import CoeffFn, DiffSymbol, OperatorMatrix

CASE_DIAG = "DIAG"
CASE_BALANCED = "BALANCED"
CASE_OFFDIAG = "OFFDIAG"


@dataclass(frozen=True)
class SampleGrid:
    """Spatial points and signed frequencies used by the margin scans."""

    x: np.ndarray
    xi: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        xi = np.asarray(self.xi, dtype=float)
        if x.size == 0 or xi.size == 0:
            raise ValueError("invalid grid: empty axis")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(xi))):
            raise ValueError("invalid grid: non-finite sample point")
        if np.any(xi == 0.0):
            raise ValueError("invalid grid: xi = 0 is outside the |xi| >= 1 regime")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "xi", xi)

    @classmethod
    def default(cls, x_max: float = 50.0, x_points: int = 201,
                xi_min: float = 1.0, xi_max: float = 1e3,
                xi_points: int = 200) -> "SampleGrid":
        # Odd x_points keeps x = 0 in the grid, where coefficient zeros of
        # the shipped failing examples sit.
        x = np.linspace(-x_max, x_max, x_points)
        mags = np.logspace(np.log10(xi_min), np.log10(xi_max), xi_points)
        xi = np.concatenate([-mags[::-1], mags])
        return cls(x, xi)


@dataclass
class EllipticityReport:
    kappa: int
    case: str
    dn_margin: float | None
    entry_margins: dict[str, float] = field(default_factory=dict)
    assumption_b_ok: bool = True
    passed: bool = False

    def to_json_dict(self) -> dict:
        return {
            "kappa": self.kappa,
            "case": self.case,
            "dn_margin": self.dn_margin,
            "entry_margins": dict(self.entry_margins),
            "assumption_b_ok": self.assumption_b_ok,
            "pass": self.passed,
        }


def classify(T: OperatorMatrix) -> str:
    dw, ow = T.diag_weight(), T.offdiag_weight()
    if dw > ow:
        return CASE_DIAG
    if dw < ow:
        return CASE_OFFDIAG
    return CASE_BALANCED


def assumption_b_orders(m: float, n: float, p: float, q: float) -> bool:
    """Off-diagonal order condition on raw orders.

    No condition when n and p share a sign; with opposite signs the
    diagonal order sum must dominate max{n, p}.  Stated on plain numbers
    because the general condition covers orders this artifact cannot
    represent as symbols (negative, fractional).
    """
    if min(n, p) >= 0 or max(n, p) <= 0:
        return True
    return m + q >= max(n, p)


def check_assumption_b(T: OperatorMatrix) -> bool:
    """Order condition on the off-diagonal entries (zero entries count <= 0)."""
    return assumption_b_orders(T.m, T.n, T.p, T.q)


def _leading_values(s: DiffSymbol, x: np.ndarray,
                    params: dict[str, complex] | None) -> np.ndarray:
    """Leading-coefficient values over the x grid plus the limit row."""
    if s.is_zero():
        return np.zeros(len(x) + 1, dtype=complex)
    lead = s.leading()
    vals = np.fromiter((lead.value(xk, params) for xk in x), dtype=complex,
                       count=len(x))
    return np.concatenate([vals, [complex(lead.limit)]])


def _bracket(xi: np.ndarray) -> np.ndarray:
    return np.sqrt(1.0 + xi * xi)


def _entry_margin(s: DiffSymbol, x: np.ndarray, xi: np.ndarray,
                  params: dict[str, complex] | None) -> float:
    """inf over the grid of |principal symbol| / <xi>^order."""
    lead = np.abs(_leading_values(s, x, params))
    ratio = (np.abs(xi) / _bracket(xi)) ** s.order
    return float(lead.min() * ratio.min())


def check_dn_ellipticity(T: OperatorMatrix, grid: SampleGrid | None = None,
                         margin_tol: float = 1e-8,
                         params: dict[str, complex] | None = None) -> EllipticityReport:
    """Determinant-based uniform ellipticity check over a sample grid."""
    grid = grid or SampleGrid.default()
    case = classify(T)
    kappa = T.kappa
    x, xi = grid.x, grid.xi
    w = 1j * xi

    diag_prod = _leading_values(T.a, x, params) * _leading_values(T.d, x, params)
    off_prod = _leading_values(T.b, x, params) * _leading_values(T.c, x, params)
    dw = T.m + T.q
    det = diag_prod[:, None] * w[None, :] ** dw
    if not (T.b.is_zero() or T.c.is_zero()):
        det = det - off_prod[:, None] * w[None, :] ** int(T.n + T.p)
    sampled = float(np.min(np.abs(det) / _bracket(xi)[None, :] ** kappa))

    if case == CASE_DIAG:
        tail = float(abs(diag_prod[-1]))
    elif case == CASE_OFFDIAG:
        tail = float(abs(off_prod[-1]))
    else:
        tail = float(np.min(np.abs(diag_prod - off_prod)))
    dn_margin = float(min(sampled, tail))

    entry_margins = {}
    if case == CASE_DIAG:
        entry_margins = {"a": _entry_margin(T.a, x, xi, params),
                         "d": _entry_margin(T.d, x, xi, params)}
    elif case == CASE_OFFDIAG:
        entry_margins = {"b": _entry_margin(T.b, x, xi, params),
                         "c": _entry_margin(T.c, x, xi, params)}

    b_ok = bool(check_assumption_b(T))
    return EllipticityReport(kappa=kappa, case=case, dn_margin=dn_margin,
                             entry_margins=entry_margins, assumption_b_ok=b_ok,
                             passed=bool(dn_margin >= margin_tol) and b_ok)


def check_entrywise(T: OperatorMatrix, grid: SampleGrid | None = None,
                    margin_tol: float = 1e-8,
                    params: dict[str, complex] | None = None) -> EllipticityReport:
    """Entrywise uniform-ellipticity characterization (order sums must differ)."""
    grid = grid or SampleGrid.default()
    case = classify(T)
    if case == CASE_BALANCED:
        raise ValueError(
            "entrywise characterization inapplicable for m+q == n+p; "
            "use check_dn_ellipticity")
    if case == CASE_DIAG:
        margins = {"a": _entry_margin(T.a, grid.x, grid.xi, params),
                   "d": _entry_margin(T.d, grid.x, grid.xi, params)}
    else:
        margins = {"b": _entry_margin(T.b, grid.x, grid.xi, params),
                   "c": _entry_margin(T.c, grid.x, grid.xi, params)}
    ok = all(v >= margin_tol for v in margins.values())
    return EllipticityReport(kappa=T.kappa, case=case, dn_margin=None,
                             entry_margins=margins,
                             assumption_b_ok=check_assumption_b(T), passed=ok)


# ---------------------------------------------------------------------------
# Random constant-coefficient systems for the equivalence suite

def _random_coeff(rng: random.Random, lo: float = 0.1, hi: float = 10.0) -> complex:
    mag = rng.uniform(lo, hi)
    phase = rng.uniform(0.0, 2.0 * np.pi)
    return mag * complex(np.cos(phase), np.sin(phase))


def _random_symbol(rng: random.Random, order: int) -> DiffSymbol:
    coeffs = []
    for j in range(order + 1):
        if j < order and rng.random() < 0.3:
            coeffs.append(CoeffFn(0.0))
        else:
            coeffs.append(CoeffFn(_random_coeff(rng)))
    return DiffSymbol(coeffs)


def random_constant_system(rng: random.Random,
                           degenerate_rate: float = 0.1) -> OperatorMatrix:
    """Random constant-coefficient system with m >= q > 0 and m+q != n+p.

    With probability ``degenerate_rate`` one case-relevant leading
    coefficient is scaled to the 1e-12 level, which drives both the
    determinant margin (through its asymptotic tail) and the corresponding
    entry margin decisively below any sane tolerance.  An exactly zero
    leading coefficient is impossible here: orders are inferred from the
    data, so zeroing the leading term would change the entry's order.
    """
    while True:
        m = rng.randint(1, 4)
        q = rng.randint(1, m)
        zero_b = rng.random() < 0.08
        zero_c = rng.random() < 0.08
        n = -np.inf if zero_b else rng.randint(1, 4)
        p = -np.inf if zero_c else rng.randint(1, 4)
        if m + q == n + p:
            continue
        if not assumption_b_orders(m, n, p, q):
            # Off-topic for the equivalence suite: the determinant report
            # folds the order condition into its verdict, the entrywise
            # report does not.
            continue
        a = _random_symbol(rng, m)
        d = _random_symbol(rng, q)
        b = DiffSymbol.zero() if zero_b else _random_symbol(rng, int(n))
        c = DiffSymbol.zero() if zero_c else _random_symbol(rng, int(p))
        entries = {"a": a, "b": b, "c": c, "d": d}
        T = OperatorMatrix(a, b, c, d, validate_decay=False)
        if rng.random() < degenerate_rate:
            case = classify(T)
            name = rng.choice(["a", "d"] if case == CASE_DIAG else ["b", "c"])
            coeffs = list(entries[name].coeffs)
            coeffs[-1] = CoeffFn(coeffs[-1].limit * 1e-12)
            entries[name] = DiffSymbol(coeffs)
            T = OperatorMatrix(entries["a"], entries["b"], entries["c"],
                               entries["d"], validate_decay=False)
        return T
