import random

import pytest

from mazurtate.arith import ModInt
from mazurtate.kurihara import (
    AdmissibilityError,
    discrete_log,
    ideal_valuation,
    kurihara_number,
    nonvanishing_search,
    sieve_admissible,
)
from mazurtate.nt import is_primitive_root

# regression fixture: first computed by the full sieve + search run,
# statuses invariant under primitive-root re-choice
ADMISSIBLE_37A1_P3 = [
    7, 31, 43, 67, 73, 109, 157, 181, 199, 211, 241, 271, 337, 367, 373, 409, 463,
]
VANISHING_37A1_P3 = {1, 43, 157, 337}


@pytest.fixture(scope="module")
def aset37(c37):
    return sieve_admissible(c37, 3, 1, 500)


@pytest.fixture(scope="module")
def aset11(c11):
    return sieve_admissible(c11, 3, 1, 500)


def test_sieve_rejects_7_for_11a1(c11, aset11):
    # a_7(11a1) = -2 = 1 mod 3 while ell + 1 = 8 = 2 mod 3
    assert c11.ap(7) == -2
    assert 7 not in aset11.eta


def test_sieve_congruence_by_construction(aset37):
    for ell in aset37.primes:
        assert (ell - 1) % 3 == 0
        assert is_primitive_root(aset37.eta[ell], ell)


def test_sieve_37a1_nonempty_and_frozen(aset37):
    assert aset37.primes == ADMISSIBLE_37A1_P3


def test_sieve_bound_check(c37):
    with pytest.raises(AdmissibilityError, match="bound"):
        sieve_admissible(c37, 3, 1, 10**6)


def test_discrete_log_examples():
    assert discrete_log(7, 3, 4) == ModInt(4, 6)
    assert pow(3, 4, 7) == 4  # exhaustive witness
    assert discrete_log(101, 2, 1) == ModInt(0, 100)
    assert discrete_log(101, 2, 2) == ModInt(1, 100)


def test_discrete_log_bsgs_matches_brute_force():
    ell, eta = 163, 2
    assert is_primitive_root(eta, ell)
    powers = {pow(eta, x, ell): x for x in range(ell - 1)}
    for a in (5, 77, 122, 162):
        assert discrete_log(ell, eta, a).residue == powers[a]


def test_discrete_log_rejects_bad_inputs():
    with pytest.raises(ValueError):
        discrete_log(7, 3, 0)
    with pytest.raises(ValueError, match="primitive"):
        discrete_log(7, 2, 3)


def test_kurihara_number_n1(c37, c11, aset37, aset11):
    assert kurihara_number(c37, 1, 3, 1, aset37).value == ModInt(0, 3)
    d = kurihara_number(c11, 1, 3, 1, aset11)
    from mazurtate.theta import eigen_pair

    assert d.value == ModInt(eigen_pair(c11)[0].value(0), 3)


def test_kurihara_number_validations(c37, aset37):
    with pytest.raises(AdmissibilityError, match="squarefree"):
        kurihara_number(c37, 49, 3, 1, aset37)
    with pytest.raises(AdmissibilityError, match="admissible"):
        kurihara_number(c37, 11, 3, 1, aset37)


def test_ideal_valuation(c37):
    # I_7 = (6, 1 - a_7 + 7): a_7(37a1) = -1, so (6, 9) has v_3 = 1
    assert c37.ap(7) == -1
    assert ideal_valuation(c37, 7, 3) == 1


def test_nonvanishing_table_regression(c37, aset37):
    table = nonvanishing_search(c37, 3, 1, 1, 500, aset37)
    assert table.found_nonvanishing
    got_vanishing = {r.n for r in table.rows if r.vanishes}
    assert got_vanishing == VANISHING_37A1_P3
    # nu = 0 row equals kurihara_number(n=1)
    row0 = next(r for r in table.rows if r.n == 1)
    assert row0.value == kurihara_number(c37, 1, 3, 1, aset37).value
    # determinism under a fixed prime set
    again = nonvanishing_search(c37, 3, 1, 1, 500, aset37)
    assert [(r.n, r.value) for r in again.rows] == [
        (r.n, r.value) for r in table.rows
    ]


def test_vanishing_invariant_under_root_rechoice(c37, aset37):
    rng = random.Random(2024)
    base = {r.n: r.vanishes for r in nonvanishing_search(c37, 3, 1, 1, 500, aset37).rows}
    for _ in range(3):
        eta = {}
        for ell in aset37.primes:
            roots = [x for x in range(2, ell) if is_primitive_root(x, ell)]
            eta[ell] = rng.choice(roots)
        redone = nonvanishing_search(
            c37, 3, 1, 1, 500, aset37.with_roots(eta)
        )
        assert {r.n: r.vanishes for r in redone.rows} == base


def test_composite_n_two_factors(c37, aset37):
    # nu(n) = 2 rows: the product-of-logs weighting over a genuinely
    # composite conductor, re-choice invariance included
    small = aset37.primes[:3]
    rng = random.Random(99)
    values = {}
    for i in range(len(small)):
        for j in range(i + 1, len(small)):
            n = small[i] * small[j]
            values[n] = kurihara_number(c37, n, 3, 1, aset37).value
    assert values  # three pairs
    eta = {
        ell: rng.choice([x for x in range(2, ell) if is_primitive_root(x, ell)])
        for ell in aset37.primes
    }
    rechosen = aset37.with_roots(eta)
    for n, v in values.items():
        again = kurihara_number(c37, n, 3, 1, rechosen).value
        assert again.is_zero() == v.is_zero()


def test_precision_compatibility(c37):
    # reduce from k = 2 to k = 1 agrees with direct computation at k = 1
    aset2 = sieve_admissible(c37, 3, 2, 500)
    assert aset2.primes == [109, 199]  # level-2 subset of the level-1 set
    for n in aset2.primes:
        d2 = kurihara_number(c37, n, 3, 2, aset2)
        aset1 = sieve_admissible(c37, 3, 1, 500).with_roots(aset2.eta)
        d1 = kurihara_number(c37, n, 3, 1, aset1)
        assert d2.value.reduce_to(3) == d1.value


class _ShiftedValues:
    """Symbol stub whose values at denominator ell are shifted by a constant.

    A constant shift is a full sigma-orbit move; it pairs with the logs to
    c * sum_a log(a) = c (ell-1)(ell-2)/2 = 0 mod p^k on admissible primes,
    so delta_ell must not see it.
    """

    scaling_mode = "integral-normalized"

    def __init__(self, base, shift):
        self.base = base
        self.shift = shift

    def values_mod(self, n):
        return {a: v + self.shift for a, v in self.base.values_mod(n).items()}


def test_well_definedness_under_constant_shift(c11, aset11):
    from mazurtate.theta import eigen_pair

    plus = eigen_pair(c11)[0]
    for ell in aset11.primes[:3]:
        # annihilation witness: the full log-orbit sum vanishes mod p^k
        assert (ell - 1) * (ell - 2) // 2 % 3 == 0
        d_orig = kurihara_number(c11, ell, 3, 1, aset11, plus)
        for shift in (1, 7, -4):
            d_shift = kurihara_number(
                c11, ell, 3, 1, aset11, _ShiftedValues(plus, shift)
            )
            assert d_shift.value == d_orig.value
