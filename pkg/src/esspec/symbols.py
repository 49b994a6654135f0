"""Differential symbols in one space dimension and the 2x2 operator matrix.

A symbol is a polynomial in ``w = i*xi`` whose coefficients are functions of
``x`` with a finite two-sided limit at infinity plus a decaying perturbation
(:class:`CoeffFn`).  The off-diagonal entries of the operator matrix may be
identically zero; both diagonal entries must be genuine symbols and the
diagonal orders must satisfy ``m >= q > 0``.

``x = math.inf`` is accepted wherever a spatial point is expected and selects
the coefficient limits (perturbations dropped).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .expr import Expr, ExprEvalError, eval_expr, print_expr

INFINITY = math.inf


class ValidationError(ValueError):
    """A domain-type invariant is violated."""


# ---------------------------------------------------------------------------
# Univariate complex polynomials in w = i*xi

class Polynomial:
    """Dense univariate complex polynomial; coefficients low-to-high in w."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        cs = [complex(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)

    @property
    def degree(self) -> int | None:
        """Polynomial degree, or None for the zero polynomial."""
        return len(self.coeffs) - 1 if self.coeffs else None

    def is_zero(self) -> bool:
        return not self.coeffs

    def __call__(self, w):
        """Horner evaluation at w (scalar or numpy array)."""
        acc = 0.0 * w
        for c in reversed(self.coeffs):
            acc = acc * w + c
        return acc

    def eval_xi(self, xi):
        """Evaluate at w = i*xi for real xi (scalar or array)."""
        return self(1j * xi)

    def derivative(self) -> "Polynomial":
        return Polynomial([k * c for k, c in enumerate(self.coeffs)][1:])

    def __add__(self, other: "Polynomial") -> "Polynomial":
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for k, c in enumerate(b):
            out[k] += c
        return Polynomial(out)

    def __neg__(self) -> "Polynomial":
        return Polynomial([-c for c in self.coeffs])

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        if self.is_zero() or other.is_zero():
            return Polynomial()
        out = [0j] * (len(self.coeffs) + len(other.coeffs) - 1)
        for j, a in enumerate(self.coeffs):
            for k, b in enumerate(other.coeffs):
                out[j + k] += a * b
        return Polynomial(out)

    def __eq__(self, other) -> bool:
        return isinstance(other, Polynomial) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self) -> str:
        return f"Polynomial({list(self.coeffs)!r})"


# ---------------------------------------------------------------------------
# Coefficient functions

@dataclass(frozen=True)
class CoeffFn:
    """One coefficient of x: complex limit at infinity plus decaying rest.

    ``perturbation`` is an expression in x (and bound parameters); absent
    means the coefficient is exactly constant.  The numerical decay check
    evaluates the perturbation at +/- x_far.
    """

    limit: complex
    perturbation: Expr | None = None
    params: dict[str, complex] = field(default_factory=dict)

    def value(self, x: float, params: dict[str, complex] | None = None) -> complex:
        if self.perturbation is None or x == INFINITY or x == -INFINITY:
            return self.limit
        env = self.params if params is None else {**self.params, **params}
        return self.limit + eval_expr(self.perturbation, x, env)

    def is_zero(self) -> bool:
        return self.limit == 0 and self.perturbation is None

    def is_constant(self) -> bool:
        return self.perturbation is None

    def check_decay(self, x_far: float = 50.0, decay_tol: float = 1e-6) -> None:
        """Raise ValidationError unless the perturbation decays at +/- x_far."""
        if self.perturbation is None:
            return
        try:
            worst = max(abs(self.value(s * x_far) - self.limit) for s in (-1.0, 1.0))
        except ExprEvalError as err:
            raise ValidationError(f"perturbation not evaluable at |x|={x_far}: {err}") from err
        if worst > decay_tol:
            raise ValidationError(
                f"perturbation {print_expr(self.perturbation)!r} does not decay: "
                f"|value| = {worst:.3e} > {decay_tol:.1e} at |x| = {x_far}")


ZERO_COEFF = CoeffFn(0.0)


# ---------------------------------------------------------------------------
# Differential symbols

class DiffSymbol:
    """Polynomial symbol sum_j coeff_j(x) * (i*xi)^j; possibly identically zero.

    The order is inferred from the coefficient list: trailing exactly-zero
    coefficients are trimmed, so the leading coefficient of a non-zero symbol
    is never identically zero.  The zero symbol has empty ``coeffs`` and, by
    convention, order -infinity (exposed as ``order is None``).
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        cs = list(coeffs)
        while cs and cs[-1].is_zero():
            cs.pop()
        self.coeffs = tuple(cs)

    @classmethod
    def zero(cls) -> "DiffSymbol":
        return cls(())

    @classmethod
    def from_powers(cls, terms: dict[int, CoeffFn]) -> "DiffSymbol":
        if not terms:
            return cls.zero()
        top = max(terms)
        return cls([terms.get(j, ZERO_COEFF) for j in range(top + 1)])

    @classmethod
    def constant_poly(cls, coeffs) -> "DiffSymbol":
        """Symbol with constant coefficients, low-to-high in (i*xi)."""
        return cls([CoeffFn(complex(c)) for c in coeffs])

    @property
    def order(self) -> int | None:
        return len(self.coeffs) - 1 if self.coeffs else None

    @property
    def order_key(self) -> float:
        """Order with the zero symbol counted as -infinity."""
        return float(self.order) if self.coeffs else -INFINITY

    def is_zero(self) -> bool:
        return not self.coeffs

    def leading(self) -> CoeffFn:
        if not self.coeffs:
            raise ValidationError("zero symbol has no leading coefficient")
        return self.coeffs[-1]

    def limit_poly(self) -> Polynomial:
        """Polynomial in w = i*xi obtained from the coefficient limits."""
        return Polynomial([c.limit for c in self.coeffs])

    def perturbation_values(self, x: float,
                            params: dict[str, complex] | None = None) -> list[complex]:
        """Per-power values of coeff_j(x) - limit_j (all zero at x = inf).

        Evaluated from the perturbation expressions directly: forming
        value(x) - limit would absorb perturbations smaller than one ulp of
        the limit, and the stabilization metric depends on exactly these
        tiny values.
        """
        if x == INFINITY or x == -INFINITY:
            return [0j] * len(self.coeffs)
        out = []
        for c in self.coeffs:
            if c.perturbation is None:
                out.append(0j)
            else:
                out.append(eval_expr(c.perturbation, x, c.params if params is None
                                     else {**c.params, **params}))
        return out

    def has_perturbation(self) -> bool:
        return any(c.perturbation is not None for c in self.coeffs)

    def validate(self, x_far: float = 50.0, decay_tol: float = 1e-6) -> None:
        for j, c in enumerate(self.coeffs):
            try:
                c.check_decay(x_far, decay_tol)
            except ValidationError as err:
                raise ValidationError(f"coefficient of power {j}: {err}") from err


def eval_symbol(s: DiffSymbol, x: float, xi: float,
                params: dict[str, complex] | None = None) -> complex:
    """Full symbol value sum_j coeff_j(x) (i*xi)^j; 0 for the zero symbol."""
    w = 1j * xi
    acc = 0j
    for c in reversed(s.coeffs):
        acc = acc * w + c.value(x, params)
    return acc


def principal_symbol(s: DiffSymbol, x: float, xi: float,
                     params: dict[str, complex] | None = None) -> complex:
    """Top-order term coeff_order(x) * (i*xi)^order."""
    if s.is_zero():
        raise ValidationError("zero symbol has no principal symbol")
    return s.leading().value(x, params) * (1j * xi) ** s.order


# ---------------------------------------------------------------------------
# The 2x2 operator matrix and its limit

class OperatorMatrix:
    """Mixed-order 2x2 system with entries a, b, c, d of orders m, n, p, q.

    Orders are inferred from the symbol data.  Construction enforces
    ``m >= q > 0`` and non-zero diagonal entries; coefficient decay is
    checked when ``validate_decay`` is true.
    """

    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a: DiffSymbol, b: DiffSymbol, c: DiffSymbol, d: DiffSymbol,
                 validate_decay: bool = True, x_far: float = 50.0,
                 decay_tol: float = 1e-6):
        if a.is_zero() or d.is_zero():
            raise ValidationError("both diagonal entries must be non-zero symbols")
        m, q = a.order, d.order
        if not (m >= q > 0):
            raise ValidationError(
                f"orders: requires m>=q>0, got m={m}, q={q}")
        self.a, self.b, self.c, self.d = a, b, c, d
        if validate_decay:
            for name in "abcd":
                try:
                    getattr(self, name).validate(x_far, decay_tol)
                except ValidationError as err:
                    raise ValidationError(f"entry {name}: {err}") from err

    @property
    def m(self) -> int:
        return self.a.order

    @property
    def n(self) -> float:
        return self.b.order_key

    @property
    def p(self) -> float:
        return self.c.order_key

    @property
    def q(self) -> int:
        return self.d.order

    @property
    def kappa(self) -> int:
        """max{m+q, n+p}; off-diagonal zero entries count as order -inf."""
        return int(max(self.m + self.q, self.n + self.p))

    def diag_weight(self) -> float:
        return self.m + self.q

    def offdiag_weight(self) -> float:
        return self.n + self.p

    def entries(self) -> dict[str, DiffSymbol]:
        return {"a": self.a, "b": self.b, "c": self.c, "d": self.d}

    def has_perturbation(self) -> bool:
        return any(s.has_perturbation() for s in (self.a, self.b, self.c, self.d))


@dataclass(frozen=True)
class LimitingMatrix:
    """Entrywise |x| -> infinity limit: polynomials in w = i*xi."""

    a: Polynomial
    b: Polynomial
    c: Polynomial
    d: Polynomial


def limiting_matrix(T: OperatorMatrix) -> LimitingMatrix:
    """Replace every coefficient by its limit; perturbations are dropped."""
    return LimitingMatrix(T.a.limit_poly(), T.b.limit_poly(),
                          T.c.limit_poly(), T.d.limit_poly())


def det_principal(T: OperatorMatrix, x: float, xi: float,
                  params: dict[str, complex] | None = None) -> complex:
    """Determinant of the principal-symbol matrix; zero entries contribute 0."""
    ad = principal_symbol(T.a, x, xi, params) * principal_symbol(T.d, x, xi, params)
    if T.b.is_zero() or T.c.is_zero():
        return ad
    return ad - principal_symbol(T.b, x, xi, params) * principal_symbol(T.c, x, xi, params)


# Conventional short name for the principal-symbol determinant.
det_M = det_principal
