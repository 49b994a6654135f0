import math
import random

import numpy as np
import pytest

from conftest import DELTA, ETA, C0, eval_limit_entry
from esspec.expr import parse_expr
from esspec.schur import (FIRST, SECOND, OmegaTemplateError, PoleError,
                          build_pencil, default_curve_grid, default_probe,
                          default_stabilization_grid, exceptional_sets,
                          omega_condition, pencil_via_schur,
                          principal_schur_symbol, schur_symbol,
                          stabilization_metric)
from esspec.symbols import (INFINITY, CoeffFn, DiffSymbol, OperatorMatrix,
                            limiting_matrix)


# ---------------------------------------------------------------------------
# schur_symbol

def test_zero_offdiagonal_reduces_to_diagonal_entry():
    a = DiffSymbol.constant_poly([1.0, 0.0, 2.0])
    d = DiffSymbol.constant_poly([0.0, 1.0])
    T = OperatorMatrix(a, DiffSymbol.zero(), DiffSymbol.zero(), d)
    lam = 0.7 - 0.2j
    for x in (0.0, INFINITY):
        got = schur_symbol(T, FIRST, lam, x, 1.3)
        expected = 1.0 + 2.0 * (1.3j) ** 2 - lam
        assert got == expected


def test_film_value_at_zero_frequency(film_cfg):
    # a_lim(0) - 1 - b_lim(0) c_lim(0) / (d_lim(0) - 1); c_lim(0) = 0
    got = schur_symbol(film_cfg.operator, FIRST, 1.0, INFINITY, 0.0)
    assert got == pytest.approx(-5 / (2 * DELTA) - 1.0, rel=1e-12)
    assert got == pytest.approx(-3.5510204, abs=1e-6)


def test_film_matches_pencil_representation(film_cfg):
    # (d_lim - lam) S = P(lam, xi), same shape as the closed-form symbol
    T = film_cfg.operator
    pencil = build_pencil(limiting_matrix(T))
    lam, xi = 0.4 - 2.2j, 1.7
    s = schur_symbol(T, FIRST, lam, INFINITY, xi)
    d_val = eval_limit_entry("d", xi)
    assert (d_val - lam) * s == pytest.approx(pencil(lam, xi), rel=1e-12)


def test_pole_error(film_cfg):
    T = film_cfg.operator
    lam = eval_limit_entry("d", 2.0)  # exactly on the denominator curve
    with pytest.raises(PoleError):
        schur_symbol(T, FIRST, lam, INFINITY, 2.0)


def test_second_schur_pole_and_value(film_cfg):
    T = film_cfg.operator
    lam = eval_limit_entry("a", 1.0)
    with pytest.raises(PoleError):
        schur_symbol(T, SECOND, lam, INFINITY, 1.0)
    got = schur_symbol(T, SECOND, 3.0, INFINITY, 0.5)
    a_val = eval_limit_entry("a", 0.5)
    b_val = eval_limit_entry("b", 0.5)
    c_val = eval_limit_entry("c", 0.5)
    d_val = eval_limit_entry("d", 0.5)
    assert got == pytest.approx(d_val - 3.0 - c_val * b_val / (a_val - 3.0),
                                rel=1e-12)


def test_which_argument_validated(film_cfg):
    with pytest.raises(ValueError):
        schur_symbol(film_cfg.operator, "third", 1.0, 0.0, 1.0)


# ---------------------------------------------------------------------------
# principal Schur symbol

def test_principal_offdiag_film(film_cfg):
    # -b_top c_top / d_top at xi = 1, by independent monomial arithmetic
    b_top = (5 / (6 * DELTA)) * 1j ** 3
    c_top = -1j
    d_top = C0 * 1j
    expected = -b_top * c_top / d_top
    got = principal_schur_symbol(film_cfg.operator, INFINITY, 1.0)
    assert got == pytest.approx(expected, rel=1e-12)
    assert abs(got) == pytest.approx(0.7394, abs=1e-4)


def test_principal_diag_case(diagonal_cfg):
    got = principal_schur_symbol(diagonal_cfg.operator, 0.0, 3.0)
    assert got == pytest.approx(9.0)  # -(i xi)^2 = xi^2


def test_principal_homogeneity_film(film_cfg):
    # order kappa - q = 3 for the film system
    v1 = principal_schur_symbol(film_cfg.operator, INFINITY, 1.3)
    v2 = principal_schur_symbol(film_cfg.operator, INFINITY, 2.6)
    assert v2 == pytest.approx(2 ** 3 * v1, rel=1e-12)


def test_principal_balanced_case():
    a = DiffSymbol.constant_poly([0, 0, 2.0])
    b = DiffSymbol.constant_poly([0, 0, 1.0])
    c = DiffSymbol.constant_poly([0, 3.0])
    d = DiffSymbol.constant_poly([0, 1.0])
    T = OperatorMatrix(a, b, c, d)
    xi = 1.4
    expected = 2.0 * (1j * xi) ** 2 - (1j * xi) ** 2 * (3j * xi) / (1j * xi)
    assert principal_schur_symbol(T, 0.0, xi) == pytest.approx(expected)


def test_principal_pole_of_denominator_entry():
    lead = CoeffFn(1.0, parse_expr("tanh(x)^2 - 1"))
    d = DiffSymbol([CoeffFn(0.0), lead])
    a = DiffSymbol.constant_poly([0, 0, 1.0])
    b = DiffSymbol.constant_poly([0, 0, 0, 1.0])
    c = DiffSymbol.constant_poly([0, 1.0])
    T = OperatorMatrix(a, b, c, d)
    with pytest.raises(PoleError):
        principal_schur_symbol(T, 0.0, 1.0)  # d_top vanishes at x = 0


def test_lambda_independence_of_top_order(film_cfg):
    T = film_cfg.operator
    order = T.kappa - T.q
    lam1, lam2 = 1.0, 2.0 + 0.5j

    # Weighted difference of the two probes converges to the -lam term.
    weighted = []
    for xi in np.logspace(1, 4, 7):
        s1 = schur_symbol(T, FIRST, lam1, INFINITY, xi)
        s2 = schur_symbol(T, FIRST, lam2, INFINITY, xi)
        bracket = math.sqrt(1.0 + xi * xi)
        weighted.append(bracket ** (-order) * abs(s1 - s2 - (lam2 - lam1)))
    assert all(weighted[k + 1] < weighted[k] for k in range(len(weighted) - 1))
    assert weighted[-1] < 1e-3 * weighted[0]

    # Two-point extraction at |xi| = 1e3 and 1e4 removes the O(1/xi)
    # sub-leading term; what remains is the lam-independent top coefficient.
    def top_coefficient(lam):
        t3 = schur_symbol(T, FIRST, lam, INFINITY, 1e3) / (1e3j) ** order
        t4 = schur_symbol(T, FIRST, lam, INFINITY, 1e4) / (1e4j) ** order
        return (10.0 * t4 - t3) / 9.0

    t1, t2 = top_coefficient(lam1), top_coefficient(lam2)
    assert abs(t1 - t2) <= 1e-6 * abs(t1)
    top = principal_schur_symbol(T, INFINITY, 1.0) / 1j ** order
    assert abs(t1 - top) <= 1e-5 * abs(top)


# ---------------------------------------------------------------------------
# pencil

def test_build_pencil_film_anchor_values(film_cfg):
    pencil = build_pencil(limiting_matrix(film_cfg.operator))
    lam = pencil.lam_coeff.coeffs
    assert lam[0] == pytest.approx(5 / (2 * DELTA), rel=1e-12)
    assert lam[0] == pytest.approx(2.5510204, abs=1e-6)
    assert lam[1] == pytest.approx(-(2 * C0 - 17 / 21), rel=1e-12)
    assert lam[1] == pytest.approx(-1.4904762, abs=1e-6)
    assert lam[2] == pytest.approx(-9 * ETA / (2 * DELTA), rel=1e-12)
    assert lam[2] == pytest.approx(-0.0459184, abs=1e-6)
    const = pencil.const_coeff.coeffs
    assert const[0] == 0
    assert const[1] == pytest.approx((5 / (2 * DELTA)) * (1 - C0), rel=1e-12)
    assert const[1] == pytest.approx(-0.3826531, abs=1e-6)
    assert const[2] == pytest.approx(1 / 7 + C0 * (C0 - 17 / 21), rel=1e-12)
    assert const[3] == pytest.approx((9 * ETA / (2 * DELTA)) * (C0 - 4 / 9),
                                     rel=1e-12)
    assert const[4] == pytest.approx(5 / (6 * DELTA), rel=1e-12)


def test_pencil_roots_of_diagonal_system(diagonal_cfg):
    pencil = build_pencil(limiting_matrix(diagonal_cfg.operator))
    for xi in (-2.0, 0.5, 3.0):
        roots = pencil.roots_at(xi)
        expected = [xi * xi, 1j * xi]
        pool = list(expected)
        for r in roots:
            j = min(range(len(pool)), key=lambda k: abs(pool[k] - r))
            assert abs(pool[j] - r) < 1e-12
            pool.pop(j)


def test_pencil_schur_identity_random_points(film_cfg):
    T = film_cfg.operator
    L = limiting_matrix(T)
    pencil = build_pencil(L)
    rng = random.Random(17)
    checked = 0
    while checked < 1000:
        xi = rng.uniform(-30.0, 30.0)
        lam = complex(rng.uniform(-30.0, 30.0), rng.uniform(-30.0, 30.0))
        d_val = L.d.eval_xi(xi)
        a_val = L.a.eval_xi(xi)
        if abs(d_val - lam) < 1e-3 or abs(a_val - lam) < 1e-3:
            continue
        p_ref = pencil(lam, xi)
        scale = pencil.residual_scale(lam, xi)
        first = (d_val - lam) * schur_symbol(T, FIRST, lam, INFINITY, xi)
        second = (a_val - lam) * schur_symbol(T, SECOND, lam, INFINITY, xi)
        assert abs(first - p_ref) <= 1e-12 * scale
        assert abs(second - p_ref) <= 1e-12 * scale
        checked += 1


def test_pencil_constructions_agree(film_cfg, diagonal_cfg):
    for cfg in (film_cfg, diagonal_cfg):
        T = cfg.operator
        direct = build_pencil(limiting_matrix(T))
        for which in (FIRST, SECOND):
            sampled = pencil_via_schur(T, which)
            for built, probed in ((direct.lam_coeff, sampled.lam_coeff),
                                  (direct.const_coeff, sampled.const_coeff)):
                a = list(built.coeffs)
                b = list(probed.coeffs)
                width = max(len(a), len(b))
                a += [0j] * (width - len(a))
                b += [0j] * (width - len(b))
                scale = max(max(abs(v) for v in a), 1.0)
                assert max(abs(x - y) for x, y in zip(a, b)) <= 1e-12 * scale


def test_pencil_roots_grid_matches_scalar(film_cfg):
    pencil = build_pencil(limiting_matrix(film_cfg.operator))
    xi = np.linspace(-5.0, 5.0, 101)
    grid_roots = pencil.roots_grid(xi)
    for k in (0, 17, 50, 100):
        scalar = pencil.roots_at(float(xi[k]))
        pool = [grid_roots[0, k], grid_roots[1, k]]
        for r in scalar:
            j = min(range(len(pool)), key=lambda i: abs(pool[i] - r))
            assert abs(pool[j] - r) < 1e-12
            pool.pop(j)


# ---------------------------------------------------------------------------
# stabilization

def test_constant_coefficients_metric_exactly_zero(film_cfg):
    L = limiting_matrix(film_cfg.operator)
    probe = default_probe(L, default_stabilization_grid())
    for x in (0.0, 5.0, 40.0):
        assert stabilization_metric(film_cfg.operator, probe, x) == 0.0


def test_perturbed_film_metric_decay(film_perturbed_cfg):
    T = film_perturbed_cfg.operator
    probe = default_probe(limiting_matrix(T), default_stabilization_grid())
    m3 = stabilization_metric(T, probe, 3.0)
    m6 = stabilization_metric(T, probe, 6.0)
    m10 = stabilization_metric(T, probe, 10.0)
    assert m3 > m6 > m10
    assert m10 <= 1e-30
    seq = [stabilization_metric(T, probe, x) for x in (5.0, 10.0, 20.0, 40.0)]
    assert all(seq[k + 1] <= seq[k] for k in range(3))


def test_probe_guard_raises_on_curve(film_perturbed_cfg):
    T = film_perturbed_cfg.operator
    lam_on_curve = eval_limit_entry("d", 1.0)  # purely imaginary point
    with pytest.raises(PoleError):
        stabilization_metric(T, lam_on_curve, 3.0)


def test_default_probe_value(film_cfg):
    # right edge 0 (imaginary-axis curve) + 1 + max(1, 2 max |c0 i xi|) = 3.3
    L = limiting_matrix(film_cfg.operator)
    probe = default_probe(L, default_stabilization_grid())
    assert probe == pytest.approx(1.0 + 2.0 * C0)


# ---------------------------------------------------------------------------
# exceptional sets

def test_film_exceptional_set_empty(film_cfg):
    exc = exceptional_sets(limiting_matrix(film_cfg.operator))
    assert exc.lambda_set == []
    assert len(exc.curve_a) == len(exc.xi_grid)
    # parabola stays in the open left half-plane
    assert float(np.max(exc.curve_a.real)) <= -5 / (2 * DELTA) + 1e-12


def test_diagonal_exceptional_set_is_origin(diagonal_cfg):
    exc = exceptional_sets(limiting_matrix(diagonal_cfg.operator))
    assert len(exc.lambda_set) == 1
    pt = exc.lambda_set[0]
    assert abs(pt.lam) <= 1e-8
    assert pt.residual <= 1e-10


def test_identical_curves_return_sampled_curve():
    a = DiffSymbol.constant_poly([0, 1.0])
    d = DiffSymbol.constant_poly([0, 1.0])
    T = OperatorMatrix(a, DiffSymbol.zero(), DiffSymbol.zero(), d)
    grid = default_curve_grid(span=3.0, points=101)
    exc = exceptional_sets(limiting_matrix(T), grid)
    assert len(exc.lambda_set) >= 90  # dedup keeps essentially every sample
    for pt in exc.lambda_set:
        assert pt.residual <= 1e-10


def test_offgrid_intersection_found():
    # a(xi) = xi^2 - 2i shifted: curves cross away from any grid point
    a = DiffSymbol.constant_poly([-0.437j, 0.0, -1.0])  # xi^2 - 0.437 i
    d = DiffSymbol.constant_poly([0, 1.0])              # i xi
    T = OperatorMatrix(a, DiffSymbol.zero(), DiffSymbol.zero(), d,
                       validate_decay=False)
    exc = exceptional_sets(limiting_matrix(T),
                           default_curve_grid(span=50.0, points=501))
    # intersection: xi1^2 = lam real part... solve xi2: i xi2 = xi1^2 - 0.437i
    # requires xi1^2 real = 0 -> xi1 = 0, lam = -0.437i, xi2 = -0.437
    assert len(exc.lambda_set) == 1
    assert exc.lambda_set[0].lam == pytest.approx(-0.437j, abs=1e-9)


def test_lambda_point_witnesses(diagonal_cfg):
    exc = exceptional_sets(limiting_matrix(diagonal_cfg.operator))
    pt = exc.lambda_set[0]
    L = limiting_matrix(diagonal_cfg.operator)
    assert abs(L.a.eval_xi(pt.xi_a) - pt.lam) <= 1e-8
    assert abs(L.d.eval_xi(pt.xi_d) - pt.lam) <= 1e-8


# ---------------------------------------------------------------------------
# omega condition

def test_omega_water_values(film_cfg):
    rep = omega_condition(film_cfg.operator)
    omega1 = 5 / (2 * DELTA)
    omega2 = abs(C0 - 17 / 21)
    bound = math.sqrt(9 * ETA * omega1 / DELTA)
    assert rep.omega1 == pytest.approx(omega1, abs=1e-9)
    assert rep.omega2 == pytest.approx(omega2, abs=1e-9)
    assert rep.bound == pytest.approx(bound, abs=1e-9)
    assert rep.omega1 == pytest.approx(2.5510204, abs=1e-6)
    assert rep.omega2 == pytest.approx(0.3404762, abs=1e-6)
    assert rep.bound == pytest.approx(0.4840221, abs=1e-6)
    assert rep.holds


def test_omega_zero_damping_fails():
    a = DiffSymbol([CoeffFn(0.0), CoeffFn(0.0), CoeffFn(0.5)])
    d = DiffSymbol.constant_poly([0, 1.0])
    T = OperatorMatrix(a, DiffSymbol.zero(), DiffSymbol.zero(), d)
    rep = omega_condition(T)
    assert rep.omega1 == 0.0
    assert not rep.holds


def test_omega_pure_damping_holds_for_any_positive_lead():
    for lead in (0.01, 0.5, 7.0):
        a = DiffSymbol([CoeffFn(-1.0), CoeffFn(0.0), CoeffFn(lead)])
        d = DiffSymbol.constant_poly([0, 1.0])
        T = OperatorMatrix(a, DiffSymbol.zero(), DiffSymbol.zero(), d)
        rep = omega_condition(T)
        assert rep.omega1 == 1.0 and rep.omega2 == 0.0
        assert rep.holds


def test_omega_template_mismatch():
    d = DiffSymbol.constant_poly([0, 1.0])
    # wrong order
    a1 = DiffSymbol.constant_poly([0, 1.0])
    with pytest.raises(OmegaTemplateError):
        omega_condition(OperatorMatrix(a1, DiffSymbol.zero(), DiffSymbol.zero(), d))
    # negative leading coefficient
    a2 = DiffSymbol.constant_poly([-1.0, 0.0, -1.0])
    with pytest.raises(OmegaTemplateError):
        omega_condition(OperatorMatrix(a2, DiffSymbol.zero(), DiffSymbol.zero(), d))
    # non-constant leading coefficient
    a3 = DiffSymbol([CoeffFn(-1.0), CoeffFn(0.0),
                     CoeffFn(1.0, parse_expr("0.5*exp(-x^2)"))])
    with pytest.raises(OmegaTemplateError):
        omega_condition(OperatorMatrix(a3, DiffSymbol.zero(), DiffSymbol.zero(), d))
    # complex-valued zero-order coefficient
    a4 = DiffSymbol([CoeffFn(-1.0 + 0.5j), CoeffFn(0.0), CoeffFn(1.0)])
    with pytest.raises(OmegaTemplateError):
        omega_condition(OperatorMatrix(a4, DiffSymbol.zero(), DiffSymbol.zero(), d))


def test_omega_perturbed_film_template_mismatch(film_perturbed_cfg):
    # every coefficient perturbed, including the leading one
    with pytest.raises(OmegaTemplateError):
        omega_condition(film_perturbed_cfg.operator)
