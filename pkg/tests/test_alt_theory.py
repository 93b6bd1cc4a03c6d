import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from unidom.alt_theory import (
    binom_check,
    binom_f,
    ell_bound,
    imprimitive_containment,
    in_H,
    is_prime_power,
    mu_alt_predicted,
    pgam_bracket,
    script_H,
    shape_for,
    totient,
)
from unidom.field import is_prime


def test_known_members():
    assert script_H(7).witnesses == ((2, 3),)
    assert script_H(13).witnesses == ((3, 3),)
    assert script_H(31).witnesses == ((5, 3), (2, 5))
    assert in_H(21) and in_H(6) and not in_H(11) and not in_H(19)
    for n in range(3, 400):
        script_H(n).check()


def test_brute_force_membership():
    hits = set()
    for q in range(2, 3000):
        if not is_prime_power(q):
            continue
        d = 2
        while (q**d - 1) // (q - 1) < 3000:
            hits.add((q**d - 1) // (q - 1))
            d += 1
    assert {n for n in range(3, 3000) if in_H(n)} == hits


def test_prime_witness_sets_are_small():
    primes = [r for r in range(3, 100_000) if is_prime(r)]
    for r in primes:
        w = script_H(r).witnesses
        assert len(w) < math.log2(r)
        # for prime r the exponent d is prime
        assert all(is_prime(d) for _q, d in w)
        if w:
            assert ell_bound(r) < r * math.log2(r)
    assert ell_bound(31) == 1 + 30 // 3 + 30 // 5


def test_ell_bound_rejects():
    with pytest.raises(ValueError):
        ell_bound(11)
    with pytest.raises(ValueError):
        ell_bound(21)


def test_shapes():
    assert shape_for(13) == [5, 5, 3]
    assert shape_for(9) == [5, 3, 1]
    assert shape_for(10) == [3, 7]
    assert shape_for(12) == [5, 7]
    for n in range(5, 200):
        assert sum(shape_for(n)) == n


def test_odd_shapes_escape_imprimitive_subgroups():
    for n in range(9, 100, 2):
        verdict, clause = imprimitive_containment(shape_for(n), n)
        assert not verdict, (n, clause)


def test_imprimitive_examples():
    assert imprimitive_containment([9], 9)[0]
    assert not imprimitive_containment([7], 7)[0]
    assert imprimitive_containment([4, 2], 6)[0]
    assert imprimitive_containment([2, 2, 4], 8)[0]
    assert imprimitive_containment([1, 1, 2], 4)[0]
    with pytest.raises(ValueError):
        imprimitive_containment([3, 3], 7)


def test_binom_all_small():
    for l in range(2, 41):
        for m in range(0, 4 * l + 1):
            assert binom_check(l, m) == (binom_f(l, m) >= math.comb(4 * l, m))
    assert binom_f(2, 0) == 1


@given(st.integers(min_value=1, max_value=5000))
def test_totient(n):
    assert totient(n) == sum(1 for k in range(1, n + 1) if math.gcd(k, n) == 1)


@settings(max_examples=50)
@given(st.integers(min_value=2, max_value=6), st.integers(min_value=2, max_value=4))
def test_pgam_bracket(a, d):
    q = 2**a
    n = (q**d - 1) // (q - 1)
    lo, hi = pgam_bracket(n, q, d, a)
    assert 0 < lo <= hi
    assert hi == lo * 2 * a


def test_mu_predictions():
    table = {5: 1, 6: 2, 7: 2, 8: 1, 9: 3, 10: 1, 11: 2, 12: 1, 13: 3, 17: 2, 19: 1, 23: 2, 25: 1, 29: 1}
    for n, mu in table.items():
        assert mu_alt_predicted(n) == mu, n


@pytest.mark.parametrize("n", [5, 6, 7, 8])
def test_mu_predictions_match_computation(n):
    from unidom.overgroups import mu
    from conftest import group

    assert mu(group(f"alt {n}")).value == mu_alt_predicted(n)
