import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mazurtate.arith import CycElt, ModulusMismatch
from mazurtate.groupring import (
    GroupRingElement,
    all_characters,
    eval_character,
    gauss_sum,
    kolyvagin_derivative,
    norm_map,
    project,
    quadratic_character,
    telescoping_check,
    trivial_character,
)
from mazurtate.nt import euler_phi, is_primitive_root, primes_up_to, units_mod


def test_project_identity_element():
    x = GroupRingElement.delta(15, 1)
    assert project(x, 5) == GroupRingElement.delta(5, 1)


def test_project_norm_is_degree():
    x = GroupRingElement.delta(5, 1)
    assert project(norm_map(x, 15), 5) == x.scale(Fraction(2))  # phi(15)/phi(5) = 2


def test_project_constant_counts_fibers():
    allones = GroupRingElement.group_sum(15)
    proj = project(allones, 5)
    assert all(v == 2 for v in proj.coeffs.values())


def test_norm_map_from_trivial_level():
    nu = norm_map(GroupRingElement(1, {0: Fraction(3)}), 5)
    assert all(v == 3 for v in nu.coeffs.values())


@given(data=st.data())
@settings(max_examples=30, deadline=None)
def test_norm_additive_and_degree_property(data):
    m = data.draw(st.sampled_from([2, 3, 4, 5, 6, 7, 9, 10, 12]))
    mult = data.draw(st.sampled_from([2, 3, 5, 7]))
    coeffs_x = {a: Fraction(data.draw(st.integers(-9, 9))) for a in units_mod(m)}
    coeffs_y = {a: Fraction(data.draw(st.integers(-9, 9))) for a in units_mod(m)}
    x = GroupRingElement(m, coeffs_x)
    y = GroupRingElement(m, coeffs_y)
    target = m * mult
    assert norm_map(x + y, target) == norm_map(x, target) + norm_map(y, target)
    degree = euler_phi(target) // euler_phi(m)
    assert project(norm_map(x, target), m) == x.scale(Fraction(degree))


def test_modulus_mismatch_raises():
    with pytest.raises(ModulusMismatch):
        project(GroupRingElement.delta(15, 1), 4)
    with pytest.raises(ModulusMismatch):
        norm_map(GroupRingElement.delta(15, 1), 20)


# --- characters --------------------------------------------------------------


def test_eval_trivial_character_is_augmentation():
    x = GroupRingElement(5, {1: Fraction(2), 2: Fraction(-1), 3: Fraction(7), 4: Fraction(1)})
    assert eval_character(x, trivial_character(5)) == CycElt.rational(9)
    assert x.augmentation() == 9


def test_eval_character_on_delta():
    chi = quadratic_character(5)
    for a in units_mod(5):
        assert eval_character(GroupRingElement.delta(5, a), chi) == chi(a)


def test_quadratic_orthogonality():
    chi = quadratic_character(5)
    assert eval_character(GroupRingElement.group_sum(5), chi).is_zero()


def test_eval_character_commutes_with_projection():
    chi = quadratic_character(5)
    rng = random.Random(7)
    coeffs = {a: Fraction(rng.randint(-5, 5)) for a in units_mod(15)}
    x = GroupRingElement(15, coeffs)
    assert eval_character(project(x, 5), chi) == eval_character(x, chi)


def test_character_parity_and_conductor():
    chi = quadratic_character(5)
    assert chi.parity() == 1  # -1 = 4 is a square mod 5
    chi3 = quadratic_character(3)
    assert chi3.parity() == -1
    # imprimitive character mod 9 of order 2 does not exist; mod 12 exists
    prim = [c for c in all_characters(9) if c.is_primitive()]
    assert len(prim) == 4  # the order-6 and order-3 characters of conductor 9


def test_gauss_sum_quadratic_mod5():
    chi = quadratic_character(5)
    tau = gauss_sum(chi)
    assert tau * tau == CycElt.rational(5, tau.conductor)


@pytest.mark.parametrize("d", range(1, 14))
def test_gauss_sum_conjugate_identity(d):
    for chi in all_characters(d):
        if not chi.is_primitive():
            continue
        prod = gauss_sum(chi) * gauss_sum(chi.conjugate())
        assert prod == CycElt.rational(chi.parity() * d, prod.conductor)


def test_gauss_sum_requires_primitive():
    imprim = next(
        c for c in all_characters(6) if not c.is_primitive() and c.is_trivial()
    )
    with pytest.raises(ValueError, match="primitive"):
        gauss_sum(imprim)


def test_gauss_sum_trivial_modulus():
    assert gauss_sum(trivial_character(1)) == CycElt.one(1)


# --- Kolyvagin derivative -----------------------------------------------------


def test_kolyvagin_derivative_ell3():
    d3 = kolyvagin_derivative(3, 2)
    assert d3.coeffs == {1: Fraction(0), 2: Fraction(1)}


def test_kolyvagin_derivative_ell5_identity():
    d5 = kolyvagin_derivative(5, 2)
    lhs = d5.sigma_shift(2) - d5
    rhs = GroupRingElement.delta(5, 1).scale(Fraction(4)) - GroupRingElement.group_sum(5)
    assert lhs == rhs


def test_kolyvagin_derivative_validates_eta():
    with pytest.raises(ValueError, match="primitive root"):
        kolyvagin_derivative(7, 2)  # 2 has order 3 mod 7


@pytest.mark.parametrize("ell", [ell for ell in primes_up_to(100) if ell > 2])
def test_telescoping_identity_all_primitive_roots(ell):
    etas = [e for e in range(2, ell) if is_primitive_root(e, ell)]
    assert etas
    for eta in etas:
        assert telescoping_check(ell, eta)
