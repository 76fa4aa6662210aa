from fractions import Fraction

import pytest

from mazurtate.groupring import quadratic_character
from mazurtate.nt import units_mod
from mazurtate.theta import (
    adjudicate_norm_relations,
    check_norm_relation,
    integrality_report,
    theta_element,
    twisted_lvalue_avatar,
)


def test_theta_trivial_level(c37, c11, pair37, pair11):
    assert theta_element(c37, 1, pair37).is_zero()  # rank 1 forces L(E,1) = 0
    th = theta_element(c11, 1, pair11)
    assert not th.is_zero()
    # the minus part of r = 0 vanishes
    assert th.minus.coeffs[0] == 0


def test_theta_mod2_is_single_coefficient(c11, pair11):
    th = theta_element(c11, 2, pair11)
    assert list(th.element.coeffs) == [1]
    assert th.element.coeffs[1] == pair11[0].value(Fraction(1, 2)) + pair11[1].value(
        Fraction(1, 2)
    )


def test_theta_mod5_augmentation_matches_norm_relation(c11, pair11):
    # eval at the trivial character must be consistent with the ell = 5
    # relation pi(theta_5) = (a_5 - 2) theta_1, both sides independent
    th5 = theta_element(c11, 5, pair11)
    th1 = theta_element(c11, 1, pair11)
    lhs = th5.augmentation()
    a5 = c11.ap(5)
    assert lhs == (a5 - 2) * th1.element.coeffs[0]


@pytest.mark.parametrize("M", range(1, 31))
def test_conjugation_covariance(M, c11, pair11):
    th = theta_element(c11, M, pair11)
    for a in units_mod(M):
        assert th.element.coeffs[(-a) % M if M > 1 else 0] == (
            th.plus.coeffs[a] - th.minus.coeffs[a]
        )


@pytest.mark.parametrize("M", [1, 4, 7, 12])
def test_augmentation_is_trivial_character_value(M, c11, pair11):
    from mazurtate.groupring import eval_character, trivial_character

    th = theta_element(c11, M, pair11)
    assert eval_character(th.element, trivial_character(M)).rational_value() == (
        th.augmentation()
    )


def test_norm_relation_examples(c11, pair11):
    r1 = check_norm_relation(c11, 1, 3, pair11)
    r2 = check_norm_relation(c11, 1, 7, pair11)
    assert r1.status == "A" and r2.status == "A"
    r3 = check_norm_relation(c11, 3, 3, pair11)
    assert r3.branch == "ell | M" and r3.status == "A"


def test_norm_relation_vacuous_case(c37, pair37):
    # theta_Q(37a1) = 0 makes both variants hold trivially at M = 1
    rep = check_norm_relation(c37, 1, 3, pair37)
    assert rep.status == "indeterminate"


def test_adjudication_small_sweep(c11, c37):
    summary = adjudicate_norm_relations([c11, c37], max_product=40)
    assert summary.consistent and summary.variant == "A"
    assert all(r.status in ("A", "indeterminate") for r in summary.reports)
    assert any(r.status == "A" for r in summary.reports)


def test_twisted_avatar_matches_direct_sum(c11, pair11):
    chi = quadratic_character(5)
    tv = twisted_lvalue_avatar(c11, chi, pair11)
    th5 = theta_element(c11, 5, pair11)
    direct = None
    for a in units_mod(5):
        term = chi(a) * th5.element.coeffs[a]
        direct = term if direct is None else direct + term
    assert tv.value == direct
    assert tv.parity == 1 and tv.omega_sign() == "+"


def test_twisted_avatar_trivial_character(c11, pair11):
    from mazurtate.groupring import trivial_character

    tv = twisted_lvalue_avatar(c11, trivial_character(1), pair11)
    assert tv.value.rational_value() == theta_element(c11, 1, pair11).element.coeffs[0]


def test_twisted_avatar_conjugate_characters(c11, pair11):
    from mazurtate.groupring import all_characters

    chi = next(c for c in all_characters(5) if c.order() == 4)
    v1 = twisted_lvalue_avatar(c11, chi, pair11).value
    v2 = twisted_lvalue_avatar(c11, chi.conjugate(), pair11).value
    assert v1.conj() == v2  # coefficients are rational


def test_integrality_reports(c11, c37, pair11, pair37):
    assert integrality_report(c11, 3, 2, pair11).p_integral
    assert integrality_report(c11, 5, 1, pair11).p_integral
    assert integrality_report(c37, 3, 1, pair37).p_integral


def test_integrality_sees_calibration_denominator(c11):
    # in period-calibrated mode the 11a1 scalar is 1/10, so p = 5 sees
    # one power of 5 in the denominators
    from mazurtate.modsym import calibrate_periods
    from mazurtate.theta import eigen_pair

    plus, minus = eigen_pair(c11)
    calibrate_periods(plus, c11)
    try:
        minus.scaling_mode = "period-calibrated"
        minus.calibration_scalar = plus.calibration_scalar
        minus._value_cache.clear()
        rep = integrality_report(c11, 5, 1, (plus, minus))
        assert not rep.p_integral
        assert rep.clearing_exponent == 1
    finally:
        for eig in (plus, minus):
            eig.scaling_mode = "integral-normalized"
            eig.calibration_scalar = None
            eig._value_cache.clear()
