"""Contour functionals: indices, residues, Cauchy formulas, coefficients, roots."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cdfun.algebra import (
    CDNumber,
    basis_element,
    from_real,
    mul,
    random_unit_imaginary,
    zero,
)
from cdfun.contour import (
    ContourReport,
    IndexVector,
    ar_index,
    argument_principle,
    cauchy_derivative,
    cauchy_eval,
    coefficient_mode,
    find_root,
    is_central,
    laurent_coeffs,
    residue,
    residue_theorem_check,
    sample_residue_functional,
    sum_residues_check,
    taylor_coeffs,
    winding_index,
)
from cdfun.errors import (
    DomainError,
    LevelMismatchError,
    NonConvergenceError,
    PoleError,
    StepControlError,
    UnsupportedShapeError,
)
from cdfun.expressions import evaluate, parse
from cdfun.integrate import Path

E1 = basis_element(3, 1)
E2 = basis_element(3, 2)
E3 = basis_element(3, 3)
E5 = basis_element(3, 5)


def _vec(r, **comps):
    v = np.zeros(1 << r)
    for key, val in comps.items():
        v[int(key[1:])] = val
    return CDNumber(r, v)


# ---------------------------------------------------------------------------
# winding_index
# ---------------------------------------------------------------------------

def test_winding_two_turn_circle():
    iv = winding_index(zero(3), Path.circle(zero(3), 1.0, E1, 2.0))
    assert iv.entry(1) == 2
    # off-plane projections collapse onto segments through the origin
    assert iv.undefined == frozenset(range(2, 8))


def test_winding_non_enclosing_all_zero():
    center = from_real(3, 2.0)
    iv = winding_index(zero(3), Path.circle(center, 1.0, E1, 1.0))
    assert iv.undefined == frozenset()
    assert all(iv.per_plane[s] == 0 for s in range(1, 8))


def test_winding_off_center_point_inside():
    a = _vec(3, e0=0.2, e1=0.3)
    iv = winding_index(a, Path.circle(zero(3), 1.0, E1, 1.0))
    assert iv.entry(1) == 1


def test_winding_square_polyline():
    pts = [_vec(2, e0=s * 0.8, e2=t * 0.8) for s, t in
           [(1, 1), (-1, 1), (-1, -1), (1, -1), (1, 1)]]
    iv = winding_index(zero(2), Path.polyline(pts))
    assert iv.entry(2) == 1
    # the e1-plane projection collapses to a segment through the origin
    assert 1 in iv.undefined


def test_winding_reversed_circle_negative():
    iv = winding_index(zero(2), Path.circle(zero(2), 1.0, basis_element(2, 2), -1.0))
    assert iv.entry(2) == -1


def test_winding_undefined_entry_raises():
    iv = winding_index(zero(3), Path.circle(zero(3), 1.0, E1, 1.0))
    with pytest.raises(DomainError):
        iv.entry(2)


def test_winding_json_shape():
    iv = winding_index(zero(2), Path.circle(zero(2), 1.0, basis_element(2, 1), 1.0))
    js = iv.to_json()
    assert js["e1"] == 1 and set(js["undefined"]) == {"e2", "e3"}


def test_winding_level_mismatch():
    with pytest.raises(LevelMismatchError):
        winding_index(zero(2), Path.circle(zero(3), 1.0, E1, 1.0))


# ---------------------------------------------------------------------------
# ar_index
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("n", [-2, 1, 3])
@pytest.mark.parametrize("rho", [0.5, 2.0])
@pytest.mark.parametrize("r", [2, 3, 4])
def test_ar_index_circle_values(n, rho, r):
    rng = np.random.default_rng(1000 + 10 * n + r)
    for _ in range(2):
        m = random_unit_imaginary(r, rng)
        idx = ar_index(zero(r), Path.circle(zero(r), rho, m, float(n)), 1e-7)
        assert (idx - m * float(n)).norm() <= 1e-5


def test_ar_index_not_enclosing_vanishes():
    g = Path.circle(from_real(3, 3.0), 1.0, E2, 1.0)
    assert ar_index(zero(3), g, 1e-8).norm() <= 1e-8


def test_ar_index_shifted_center():
    a = _vec(3, e0=-0.2, e2=0.4)
    idx = ar_index(a, Path.circle(a, 0.7, E5, 1.0), 1e-8)
    assert (idx - E5).norm() <= 1e-7


# ---------------------------------------------------------------------------
# residue
# ---------------------------------------------------------------------------

def test_residue_sandwich_oracle():
    p = _vec(3, e0=0.3, e1=0.2)
    f = parse("e2*((z - (0.3+0.2*e1))^-1)*e3", 3)
    rng = np.random.default_rng(7)
    for _ in range(4):
        m = random_unit_imaginary(3, rng)
        got = residue(f, p, m, 0.4)
        assert (got - mul(mul(E2, m), E3)).norm() <= 1e-8


def test_residue_polynomial_zero():
    assert residue(parse("z^3 - 2*z", 3), zero(3), E1, 1.0).norm() <= 1e-9


def test_residue_second_order_pole_zero():
    f = parse("((z - 0.2)^-2)", 3)
    assert residue(f, from_real(3, 0.2), E2, 0.5).norm() <= 1e-8


def test_residue_radius_independence():
    p = _vec(3, e1=0.1)
    f = parse("e5*((z - (0.1*e1))^-1) + z^2", 3)
    a = residue(f, p, E2, 0.3, 1e-7)
    b = residue(f, p, E2, 1.7, 1e-7)
    assert (a - b).norm() <= 2e-7


def test_residue_direction_additivity():
    # res(p, f) is R-linear in the direction probe
    p = from_real(2, 0.1)
    f = parse("e2*((z - 0.1)^-1)*e3 + 1", 2)
    m1 = basis_element(2, 1)
    m2 = basis_element(2, 3)
    comb = (m1 + m2) * (1.0 / math.sqrt(2.0))
    lhs = residue(f, p, comb, 0.5) * math.sqrt(2.0)
    rhs = residue(f, p, m1, 0.5) + residue(f, p, m2, 0.5)
    assert (lhs - rhs).norm() <= 1e-5


def test_residue_functional_sampling():
    p = from_real(3, 0.0)
    f = parse("e2*(z^-1)*e3", 3)
    probes = [E1, E2, E5]
    fn = sample_residue_functional(f, p, probes, 0.5)
    assert fn.center == p
    for m in probes:
        assert (fn.probe(m) - mul(mul(E2, m), E3)).norm() <= 1e-8
    with pytest.raises(DomainError):
        fn.probe(E3)


def test_residue_rejects_non_unit_direction():
    with pytest.raises(DomainError):
        residue(parse("z^-1", 2), zero(2), from_real(2, 1.0), 0.5)


# ---------------------------------------------------------------------------
# cauchy_eval
# ---------------------------------------------------------------------------

def test_cauchy_eval_octonion_point():
    z0 = _vec(3, e1=0.3, e5=0.2)
    psi = Path.circle(zero(3), 1.0, E1, 1.0)
    f = parse("z^2", 3)
    got = cauchy_eval(f, z0, psi, 1e-6)
    want = mul(evaluate(f, z0), E1)
    assert (got - want).norm() <= 1e-6 * (1.0 + want.norm())


def test_cauchy_eval_recovery_r3():
    rng = np.random.default_rng(21)
    f = parse("z^3 - 2*z + 1", 3)
    psi = Path.circle(zero(3), 1.5, E2, 1.0)
    for _ in range(3):
        z0 = CDNumber(3, rng.normal(scale=0.25, size=8))
        got = mul(cauchy_eval(f, z0, psi, 1e-6), E2.conj())
        assert (got - evaluate(f, z0)).norm() <= 1e-5 * (1.0 + evaluate(f, z0).norm())


def test_cauchy_eval_noncentral_phrase():
    f = parse("e2*z^2*e3 + e1*z", 3)
    z0 = _vec(3, e0=0.1, e2=0.25, e4=0.15)
    psi = Path.circle(zero(3), 1.0, E5, 1.0)
    got = cauchy_eval(f, z0, psi, 1e-6)
    want = mul(evaluate(f, z0), E5)
    assert (got - want).norm() <= 1e-6 * (1.0 + want.norm())


def test_cauchy_eval_sedenion_central():
    r = 4
    m = basis_element(r, 9)
    z0 = CDNumber(r, np.r_[0.05, 0.2, np.zeros(13), 0.1])
    f = parse("z^2 + z", r)
    got = cauchy_eval(f, z0, Path.circle(zero(r), 1.0, m, 1.0), 1e-6)
    want = mul(evaluate(f, z0), m)
    assert (got - want).norm() <= 1e-5


def test_cauchy_eval_off_center_contour():
    f = parse("z^2", 2)
    e1q = basis_element(2, 1)
    psi = Path.circle(from_real(2, 0.3), 1.0, e1q, 1.0)
    z0 = _vec(2, e0=0.5, e1=-0.2)
    got = cauchy_eval(f, z0, psi, 1e-7)
    assert (got - mul(evaluate(f, z0), e1q)).norm() <= 1e-6


def test_cauchy_eval_outside_rejected():
    psi = Path.circle(zero(3), 0.5, E1, 1.0)
    with pytest.raises(DomainError):
        cauchy_eval(parse("z", 3), from_real(3, 0.9), psi)


def test_cauchy_eval_too_close_rejected():
    psi = Path.circle(zero(3), 1.0, E1, 1.0)
    z0 = _vec(3, e1=1.0 - 1e-9)
    with pytest.raises(DomainError):
        cauchy_eval(parse("z", 3), z0, psi)


def test_cauchy_eval_requires_circle():
    pts = [from_real(2, -1.0), from_real(2, 1.0), _vec(2, e1=1.0), from_real(2, -1.0)]
    with pytest.raises(UnsupportedShapeError):
        cauchy_eval(parse("z", 2), zero(2), Path.polyline(pts))


def test_cauchy_eval_requires_single_turn():
    psi = Path.circle(zero(2), 1.0, basis_element(2, 1), 2.0)
    with pytest.raises(DomainError):
        cauchy_eval(parse("z", 2), zero(2), psi)


# ---------------------------------------------------------------------------
# cauchy_derivative
# ---------------------------------------------------------------------------

def test_derivative_real_point():
    psi = Path.circle(zero(3), 1.0, E1, 1.0)
    z0 = from_real(3, 0.25)
    got = cauchy_derivative(parse("z^2", 3), z0, 1, psi, 1e-7)
    assert (got - mul(z0 * 2.0, E1)).norm() <= 1e-6


def test_derivative_in_plane_points():
    psi = Path.circle(zero(3), 1.2, E1, 1.0)
    z0 = _vec(3, e0=0.3, e1=0.4)
    d1 = cauchy_derivative(parse("z^2", 3), z0, 1, psi, 1e-7)
    assert (d1 - mul(z0 * 2.0, E1)).norm() <= 1e-6
    d2 = cauchy_derivative(parse("z^3", 3), z0, 2, psi, 1e-7)
    assert (d2 - mul(z0 * 6.0, E1)).norm() <= 1e-5


def test_derivative_order_exceeding_degree_vanishes():
    psi = Path.circle(zero(3), 1.0, E2, 1.0)
    got = cauchy_derivative(parse("z^2", 3), from_real(3, 0.1), 3, psi, 1e-7)
    assert got.norm() <= 1e-6


def test_derivative_radius_independent():
    z0 = _vec(2, e0=0.1, e1=0.2)
    f = parse("z^3 + z", 2)
    e1q = basis_element(2, 1)
    a = cauchy_derivative(f, z0, 1, Path.circle(zero(2), 1.0, e1q, 1.0), 1e-7)
    b = cauchy_derivative(f, z0, 1, Path.circle(zero(2), 2.5, e1q, 1.0), 1e-7)
    assert (a - b).norm() <= 2e-6


def test_derivative_rejects_nonpositive_order():
    psi = Path.circle(zero(2), 1.0, basis_element(2, 1), 1.0)
    with pytest.raises(DomainError):
        cauchy_derivative(parse("z", 2), zero(2), 0, psi)


# ---------------------------------------------------------------------------
# taylor / laurent coefficients
# ---------------------------------------------------------------------------

def test_taylor_monomial():
    psi = Path.circle(zero(3), 1.0, E1, 1.0)
    cs = taylor_coeffs(parse("z^2", 3), zero(3), 4, psi, 1e-8)
    for k, c in enumerate(cs):
        want = 1.0 if k == 2 else 0.0
        assert (c - from_real(3, want)).norm() <= 1e-7


def test_taylor_shifted_cubic():
    # expand 1 + 2z - z^3/2 about a = 0.2 by hand
    a = 0.2
    shifted = [1 + 2 * a - 0.5 * a**3, 2 - 1.5 * a**2, -1.5 * a, -0.5, 0.0]
    f = parse("1 + 2*z - (0.5)*z^3", 3)
    psi = Path.circle(from_real(3, a), 1.0, E2, 1.0)
    cs = taylor_coeffs(f, from_real(3, a), 5, psi, 1e-8)
    for c, want in zip(cs, shifted):
        assert (c - from_real(3, want)).norm() <= 1e-7


def test_taylor_left_constant_recovery():
    # e1*z^2 at level 2: the conj(M) recovery returns the left coefficient
    e1q = basis_element(2, 1)
    psi = Path.circle(zero(2), 1.0, e1q, 1.0)
    cs = taylor_coeffs(parse("e1*z^2", 2), zero(2), 3, psi, 1e-8)
    assert (cs[2] - e1q).norm() <= 1e-7
    assert cs[0].norm() <= 1e-8 and cs[1].norm() <= 1e-8


def test_taylor_center_must_match_contour():
    psi = Path.circle(from_real(3, 0.5), 1.0, E1, 1.0)
    with pytest.raises(DomainError):
        taylor_coeffs(parse("z", 3), zero(3), 2, psi)


def test_taylor_count_positive():
    psi = Path.circle(zero(3), 1.0, E1, 1.0)
    with pytest.raises(DomainError):
        taylor_coeffs(parse("z", 3), zero(3), 0, psi)


def test_coefficient_mode_detection():
    assert is_central(parse("z^2 - 1.5*z + 2", 4))
    assert not is_central(parse("e2*z^2", 4))
    assert coefficient_mode(parse("e2*z^2", 3)) == "value"
    assert coefficient_mode(parse("e2*z^2", 4)) == "functional"
    assert coefficient_mode(parse("z^2 - 1", 4)) == "value"


def test_laurent_pole_and_polynomial():
    a = from_real(3, 0.1)
    f = parse("3*((z - 0.1)^-2) + z", 3)
    cs = laurent_coeffs(f, a, -3, 2, 0.5, 2.0, 1e-8)
    want = {-3: 0.0, -2: 3.0, -1: 0.0, 0: 0.1, 1: 1.0, 2: 0.0}
    for c, k in zip(cs, range(-3, 3)):
        assert (c - from_real(3, want[k])).norm() <= 1e-7


def test_laurent_matches_residue_for_left_word():
    # left-multiplied simple pole: c_{-1}*M is the residue functional
    # value, and the recovery returns the left factor
    a = from_real(3, 0.1)
    f = parse("e5*((z - 0.1)^-1) + z^2", 3)
    cs = laurent_coeffs(f, a, -1, 0, 0.5, 2.0, 1e-8)
    res = residue(f, a, E1, 0.7, 1e-8)
    assert (mul(cs[0], E1) - res).norm() <= 1e-7
    assert (cs[0] - E5).norm() <= 1e-7


def test_laurent_polynomial_negative_coeffs_vanish():
    cs = laurent_coeffs(parse("z^3 - 2", 2), zero(2), -3, -1, 0.3, 1.5, 1e-8)
    assert all(c.norm() <= 1e-7 for c in cs)


def test_laurent_taylor_agree_on_holomorphic():
    f = parse("z^3 + 0.5*z - 2", 3)
    a = from_real(3, -0.2)
    psi = Path.circle(a, math.sqrt(0.5 * 2.0), E1, 1.0)
    ts = taylor_coeffs(f, a, 4, psi, 1e-8)
    ls = laurent_coeffs(f, a, 0, 3, 0.5, 2.0, 1e-8)
    for t, l in zip(ts, ls):
        assert (t - l).norm() <= 1e-7


def test_laurent_detects_pole_in_annulus():
    a = from_real(3, 0.1)
    for offset in (0.7, 1.0, 1.3):
        f = parse(f"((z - (0.1 + {offset}*e1))^-1)", 3)
        with pytest.raises(PoleError):
            laurent_coeffs(f, a, -1, 0, 0.5, 2.0, 1e-8)


def test_laurent_validates_inputs():
    with pytest.raises(DomainError):
        laurent_coeffs(parse("z", 2), zero(2), 1, 0, 0.5, 2.0)
    with pytest.raises(DomainError):
        laurent_coeffs(parse("z", 2), zero(2), -1, 1, 2.0, 0.5)


# ---------------------------------------------------------------------------
# theorem checks
# ---------------------------------------------------------------------------

def test_residue_theorem_two_poles():
    p1 = _vec(3, e0=0.3, e1=0.2)
    p2 = _vec(3, e0=-0.4, e2=0.3)
    f = parse(
        "e2*((z - (0.3+0.2*e1))^-1)*e3 + ((z - (-0.4+0.3*e2))^-1) + z^2", 3
    )
    rep = residue_theorem_check(f, [p1, p2], Path.circle(zero(3), 2.0, E1, 1.0), 1e-7)
    assert rep.diff <= 1e-6
    assert rep.mode == "value"


def test_residue_theorem_pole_outside_drops():
    p_in = from_real(3, 0.2)
    p_out = from_real(3, 5.0)
    f = parse("((z - 0.2)^-1) + ((z - 5)^-1)", 3)
    rep = residue_theorem_check(f, [p_in, p_out], Path.circle(zero(3), 1.0, E2, 1.0), 1e-7)
    assert rep.diff <= 1e-6
    assert (rep.rhs - E2 * (2.0 * math.pi)).norm() <= 1e-5


def test_residue_theorem_double_winding():
    p = from_real(2, 0.1)
    f = parse("((z - 0.1)^-1)", 2)
    e2q = basis_element(2, 2)
    rep = residue_theorem_check(f, [p], Path.circle(zero(2), 1.0, e2q, 2.0), 1e-7)
    assert rep.diff <= 1e-6
    assert (rep.lhs - e2q * (4.0 * math.pi)).norm() <= 1e-5


def test_residue_theorem_pole_on_path_rejected():
    f = parse("((z - 1)^-1)", 2)
    psi = Path.circle(zero(2), 1.0, basis_element(2, 1), 1.0)
    with pytest.raises(DomainError):
        residue_theorem_check(f, [from_real(2, 1.0)], psi)


def test_contour_report_json_schema():
    p = from_real(2, 0.0)
    f = parse("z^-1", 2)
    rep = residue_theorem_check(f, [p], Path.circle(zero(2), 1.0, basis_element(2, 1), 1.0), 1e-7)
    js = rep.to_json()
    assert set(js) == {"lhs", "rhs", "diff", "est_error", "mode"}
    assert len(js["lhs"]) == 4 and isinstance(js["diff"], float)


def test_sum_residues_two_plane_poles():
    f = parse("e2*((z - (0.3+0.2*e1))^-1)*e3 + ((z - (-0.4-0.5*e1))^-1)", 3)
    poles = [_vec(3, e0=0.3, e1=0.2), _vec(3, e0=-0.4, e1=-0.5)]
    assert sum_residues_check(f, poles, E1, 1e-7) <= 1e-6


def test_sum_residues_single_pole():
    f = parse("((z - 1)^-1)", 2)
    total = sum_residues_check(f, [from_real(2, 1.0)], basis_element(2, 1), 1e-7)
    assert total <= 1e-6


def test_sum_residues_quadratic_decay_no_finite_residue():
    f = parse("z^-2", 2)
    total = sum_residues_check(f, [zero(2)], basis_element(2, 1), 1e-7)
    assert total <= 1e-6


@pytest.mark.parametrize("n", [1, 2, 3])
def test_argument_principle_powers(n):
    rng = np.random.default_rng(40 + n)
    m = random_unit_imaginary(3, rng)
    g = Path.circle(zero(3), 1.0, m, 1.0)
    rep = argument_principle(parse(f"z^{n}", 3), g, [(zero(3), n)], 1e-7)
    assert rep.diff <= 1e-6
    assert (rep.lhs - m * float(n)).norm() <= 1e-6


def test_argument_principle_two_simple_zeros():
    f = parse("(z - 0.3)*(z + 0.5)", 3)
    g = Path.circle(zero(3), 1.0, E2, 1.0)
    zeros = [(from_real(3, 0.3), 1), (from_real(3, -0.5), 1)]
    rep = argument_principle(f, g, zeros, 1e-7)
    assert rep.diff <= 1e-6
    assert (rep.lhs - E2 * 2.0).norm() <= 1e-6


def test_argument_principle_zero_outside():
    f = parse("z - 3", 2)
    g = Path.circle(zero(2), 1.0, basis_element(2, 1), 1.0)
    rep = argument_principle(f, g, [], 1e-7)
    assert rep.lhs.norm() <= 1e-7 and rep.diff <= 1e-7


def test_argument_principle_zero_on_path_errors():
    f = parse("z - 1", 2)
    g = Path.circle(zero(2), 1.0, basis_element(2, 1), 1.0)
    with pytest.raises((PoleError, StepControlError)):
        argument_principle(f, g, [(from_real(2, 1.0), 1)], 1e-7)


# ---------------------------------------------------------------------------
# find_root
# ---------------------------------------------------------------------------

def test_find_root_linear():
    c = _vec(2, e0=0.4, e1=-0.3, e3=0.2)
    root = find_root(parse("z - (0.4-0.3*e1+0.2*e3)", 2), zero(2))
    assert (root - c).norm() <= 1e-8


@pytest.mark.parametrize("r", [2, 3])
def test_find_root_random_cubics(r):
    rng = np.random.default_rng(17 + r)
    for _ in range(5):
        c = rng.normal(scale=0.7, size=6)
        text = (
            f"z^3 + (({c[0]})+({c[1]})*e1+({c[2]})*e2)*z"
            f" + (({c[3]})+({c[4]})*e1+({c[5]})*e3)"
        )
        P = parse(text, r)
        z_star = find_root(P, from_real(r, 0.3), 200, 1e-10)
        assert evaluate(P, z_star).norm() <= 1e-8


def test_find_root_deterministic():
    P = parse("z^2 + e1*z - 2", 3)
    a = find_root(P, from_real(3, 0.5))
    b = find_root(P, from_real(3, 0.5))
    assert np.array_equal(a.coeffs, b.coeffs)


def test_find_root_reports_best_on_failure():
    P = parse("z^2 + 1", 2)
    with pytest.raises(NonConvergenceError) as info:
        find_root(P, from_real(2, 0.7), max_iter=1, tol=1e-14)
    assert info.value.best is not None
    assert evaluate(P, info.value.best).norm() < evaluate(P, from_real(2, 0.7)).norm()


def test_find_root_level_mismatch():
    with pytest.raises(LevelMismatchError):
        find_root(parse("z - 1", 2), zero(3))
