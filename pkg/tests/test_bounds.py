import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from qblock.bounds import (
    COEFFICIENT_TABLE,
    REFERENCE_BOUNDS,
    BoundsError,
    IntPolynomial,
    Q,
    bounds_table,
    check_reference_bounds,
    coefficient_sequence,
    density,
    f_opt,
    f_opt_argmins,
    f_small,
    f_star,
    f_star_poly,
    first_difference,
    further_better_admissible,
    further_better_diff,
    further_better_instances,
    k_star,
    known_upper,
    lex_compare,
    lower_main1,
    lower_schonheim_chain,
    lower_stdeq,
    lower_trivial,
    schedule_value,
    u_step,
    u_two_step,
    valid_pair,
)
from qblock.pgspace import gaussian_binomial

PRIME_POWERS = [2, 3, 4, 5, 7, 8, 9, 11, 13, 16]

coeff_lists = st.lists(st.integers(-50, 50), max_size=7)


@given(coeff_lists, coeff_lists, st.integers(-20, 20))
def test_polynomial_ring_operations_commute_with_evaluation(a, b, x):
    p, r = IntPolynomial(a), IntPolynomial(b)
    assert (p + r)(x) == p(x) + r(x)
    assert (p - r)(x) == p(x) - r(x)
    assert (p * r)(x) == p(x) * r(x)
    assert (3 - p)(x) == 3 - p(x)
    assert (p + 2)(x) == p(x) + 2
    assert (p ** 3)(x) == p(x) ** 3


def test_polynomial_basics():
    p = IntPolynomial([4, -5, 0, 1])
    assert p.coefficient_sequence() == (1, 0, -5, 4)
    assert p.degree == 3 and p.leading == 1
    assert IntPolynomial([0, 0]) == 0
    assert IntPolynomial([]).degree == -1
    assert (Q ** 5).coefficient_sequence() == (1, 0, 0, 0, 0, 0)
    assert str(IntPolynomial([4, -5, 0, 1])) == "q^3 - 5*q + 4"
    with pytest.raises(ValueError):
        Q ** -1


def test_lex_compare_and_first_difference():
    a = IntPolynomial([0, 0, 1])          # q^2
    b = IntPolynomial([1, 0, 1])          # q^2 + 1
    assert lex_compare(a, b) == -1 and lex_compare(b, a) == 1 and lex_compare(a, a) == 0
    assert first_difference(a, b) == (3, 1)
    assert first_difference(a, a) is None
    # different degrees compare by padded sequences
    assert lex_compare(IntPolynomial([5]), IntPolynomial([0, 1])) == 1


def largest_power_of_two_at_most(n):
    p = 1
    while p * 2 <= n:
        p *= 2
    return p


def test_k_star():
    for n in range(1, 200):
        k = k_star(n)
        assert k == n - largest_power_of_two_at_most(n)
        assert valid_pair(n, k) or n <= 2
    assert [k_star(n) for n in (5, 6, 7, 8, 9)] == [1, 2, 3, 0, 1]
    with pytest.raises(BoundsError):
        k_star(0)


def test_u_step_matches_definition():
    phi = {m: m * m + 1 for m in range(-1, 12)}
    for n in range(1, 12):
        for k in range(-1, (n - 1) // 2 + 1):
            if k == -1:
                expected = phi[n]
            else:
                tail = sum(5 ** i for i in range(k + 1)) * sum(5 ** j for j in range(k, n - 1))
                expected = 5 ** (2 * k + 2) * phi[n - k - 1] + phi[k] + tail
            assert u_step(phi, n, 5, k) == expected
    with pytest.raises(BoundsError):
        u_step(phi, 5, 2, 3)


def test_u_two_step_composes():
    phi = lambda m: f_star(m, 3)
    for n in range(3, 14):
        for k1 in range(-1, (n - 1) // 2 + 1):
            m = n - k1 - 1
            for k2 in range(-1, (m - 1) // 2 + 1):
                inner = u_step(phi, m, 3, k2)
                if k1 == -1:
                    outer = inner
                else:
                    tail = sum(3 ** i for i in range(k1 + 1)) * sum(3 ** j for j in range(k1, n - 1))
                    outer = 3 ** (2 * k1 + 2) * inner + phi(k1) + tail
                assert u_two_step(phi, n, 3, k1, k2) == outer


def test_f_small_values():
    assert [f_small(n, 2) for n in (-1, 0, 1, 2, 3, 4)] == [0, 0, 0, 1, 5, 27]
    assert f_small(4, 3) == 103


def test_f_star_matches_reference_upper_column():
    for q, ref in REFERENCE_BOUNDS.items():
        assert [f_star(n, q) for n in range(4, 10)] == list(ref["upper"])


def test_known_upper_matches_reference_column():
    for q, ref in REFERENCE_BOUNDS.items():
        assert [known_upper(n, q) for n in range(4, 10)] == list(ref["known"])


def test_known_minus_new_leading_term():
    for n in range(6, 16):
        assert (known_upper(n, Q) - f_star_poly(n)).leading_term() == (2 * n - 11, 1)


def test_schonheim_matches_reference_lower_column():
    for q, ref in REFERENCE_BOUNDS.items():
        assert [lower_schonheim_chain(n, q) for n in range(4, 10)] == list(ref["lower"])


def test_f_star_poly_evaluates_to_f_star():
    for n in range(-1, 16):
        p = f_star_poly(n)
        for q in PRIME_POWERS:
            assert p(q) == f_star(n, q)


def test_coefficient_table():
    for n, row in COEFFICIENT_TABLE.items():
        assert coefficient_sequence(n) == row
    for n in range(9, 41):
        assert coefficient_sequence(n)[:8] == (1, 0, 2, 2, 3, 3, 3, 3)
    with pytest.raises(BoundsError):
        coefficient_sequence(1)


def test_f_star_degree_and_lex_growth():
    for n in range(2, 30):
        p = f_star_poly(n)
        assert p.degree == 2 * n - 4 and p.leading == 1
        assert len(coefficient_sequence(n)) == 2 * n - 3
    for n in range(3, 25):
        for m in range(n + 1, 26):
            a, b = f_star_poly(n), f_star_poly(m)
            # align leading terms before comparing
            assert first_difference(a * Q ** (2 * (m - n)), b) == (n, 1)


def exact_ceil(num, den):
    return math.ceil(Fraction(num, den))


@pytest.mark.parametrize("q", PRIME_POWERS)
def test_lower_bound_formulas(q):
    for n in range(4, 12):
        assert lower_trivial(n, q) == exact_ceil((q ** (n + 1) - 1) * (q ** n - 1), (q ** 3 - 1) * (q ** 2 - 1))
        assert lower_stdeq(n, q) == exact_ceil((q ** (n + 1) - 1) * (q ** (n - 1) - 1), (q ** 2 - 1) ** 2)
        assert lower_main1(n, q) == exact_ceil(
            (q ** (n + 1) - 1) * (q ** n - 1) * (q ** 4 + 2 * q ** 2 + q + 1), (q ** 5 - 1) * (q ** 4 - 1))
        chain = f_small(4, q)
        for m in range(5, n + 1):
            chain = exact_ceil((q ** (m + 1) - 1) * chain, q ** (m - 1) - 1)
        assert lower_schonheim_chain(n, q) == chain


def test_lower_trivial_exact_division_case():
    # 728 * 242 = 176176 = 847 * 208, no rounding
    assert (3 ** 6 - 1) * (3 ** 5 - 1) == 847 * (3 ** 3 - 1) * (3 ** 2 - 1)
    assert lower_trivial(5, 3) == 847


@pytest.mark.parametrize("q", PRIME_POWERS)
def test_lower_not_above_upper(q):
    for n in range(4, 13):
        up = f_star(n, q)
        for low in (lower_trivial, lower_stdeq, lower_schonheim_chain, lower_main1):
            assert low(n, q) <= up


@pytest.mark.parametrize("q", PRIME_POWERS)
def test_f_opt_is_the_recursive_minimum(q):
    for n in range(5, 13):
        val, sched = f_opt(n, q)
        assert val <= f_star(n, q)
        per_k = [u_step(lambda m: f_opt(m, q)[0], n, q, k) for k in range(0, (n - 1) // 2 + 1)]
        assert val == min(per_k)
        assert sched[n] == per_k.index(val)
        assert schedule_value(n, q, sched) == val
        assert f_opt_argmins(n, q)[0] == sched[n]
    assert f_opt(4, q)[0] == f_small(4, q)


def test_schedule_value_defaults_to_f_star():
    for n in range(2, 12):
        assert schedule_value(n, 2, {}) == f_star(n, 2)


def test_density():
    for q in (2, 3):
        for n in (2, 3, 4):
            lo, hi = density(n, q)
            assert lo == hi == Fraction(f_small(n, q), gaussian_binomial(n + 1, 2, q))
        for n in range(5, 10):
            lo, hi = density(n, q)
            assert 0 < lo <= hi < 1


def test_further_better_examples():
    assert further_better_diff(1, 0, 0, -1, 1).leading_term() == (0, 1)
    assert further_better_diff(2, 1, 0, -1, 2).leading_term() == (2, 1)
    with pytest.raises(BoundsError):
        further_better_diff(1, 0, 1, 0, 1)  # k2 < l2 fails
    assert not further_better_admissible(0, 0, 0, -1, 1)


def test_further_better_instances_are_exhaustive():
    listed = set(further_better_instances(10))
    brute = {(n, k1, k2, l1, l2)
             for n in range(1, 10) for k1 in range(0, 10) for k2 in range(0, 10)
             for l1 in range(-1, 10) for l2 in range(0, 11)
             if n + k1 + k2 + 2 <= 10 and further_better_admissible(n, k1, k2, l1, l2)}
    assert listed == brute and listed


def test_bounds_table_rows():
    rows = bounds_table(2, 9)
    assert [r.n for r in rows] == list(range(4, 10))
    assert check_reference_bounds(rows) == []
    rec = rows[1].as_record()
    assert rec["upper_fstar"] == 122 and rec["lower_schonheim"] == 114
    broken = bounds_table(3, 9)
    broken[2].upper_fstar += 1
    assert len(check_reference_bounds(broken)) == 1
    with pytest.raises(BoundsError):
        bounds_table(2, 3)
