from fractions import Fraction

import pytest

from unidom.prob import (
    NoConclusion,
    ProbProfile,
    lemma_bd,
    min_c,
    p_exact,
    q_exact_bound,
    q_hat,
    q_monte_carlo,
    wilson_interval,
)

from conftest import group


def profile(spec, label, with_p=True):
    G = group(spec)
    return ProbProfile.build(G, G.class_table().by_label(label).rep, with_p=with_p)


def test_a5_five_cycle():
    prof = profile("alt 5", "5a")
    F = {t.label: t.F for t in prof.terms}
    assert F == {"2a": Fraction(1, 3), "3a": 0, "5a": Fraction(1, 6), "5b": Fraction(1, 6)}
    assert q_hat(prof, 2) == Fraction(7, 3)
    assert q_hat(prof, 3) == Fraction(2, 3)
    assert min_c(prof) == 3


def test_p_methods_agree():
    for spec, label in [("alt 5", "5a"), ("alt 6", "5a"), ("psl2 11", "11a")]:
        G = group(spec)
        s = G.class_table().by_label(label).rep
        a = ProbProfile.build(G, s, with_p=True)
        b = ProbProfile.build(G, s, with_p=True, p_method="sweep")
        assert [t.P for t in a.terms] == [t.P for t in b.terms]


PROFILES = [("alt 5", "5a"), ("alt 5", "3a"), ("alt 6", "5a"), ("alt 6", "4a"), ("psl2 7", "7a"),
            ("psl2 7", "4a"), ("psl2 8", "9a"), ("psl2 11", "11a"), ("psl2 11", "6a"), ("sym 5", "6a")]


@pytest.mark.parametrize("spec,label", PROFILES)
def test_p_at_most_f(spec, label):
    prof = profile(spec, label)
    for t in prof.terms:
        assert 0 <= t.P <= t.F or t.F >= 1
        assert t.P <= 1


@pytest.mark.parametrize("spec,label", PROFILES)
def test_bounds_chain(spec, label):
    """Monte Carlo (within its interval) <= exact-P bound <= Q-hat."""
    prof = profile(spec, label)
    G = group(spec)
    for c in (2, 3, 4):
        qe, qh = q_exact_bound(prof, c), q_hat(prof, c)
        assert qe <= qh
        mc = q_monte_carlo(G, prof.element, c, trials=400, seed=c, ov=prof.overgroups)
        assert mc.interval[0] <= min(qe, 1)


@pytest.mark.parametrize("spec,label", PROFILES)
def test_monotone_in_c(spec, label):
    prof = profile(spec, label)
    vals = [q_hat(prof, c) for c in range(1, 7)]
    if all(t.F < 1 for t in prof.terms):
        assert vals == sorted(vals, reverse=True)
    res = min_c(prof, "q_exact")
    if isinstance(res, int):
        assert q_exact_bound(prof, res) < 1
        assert res == 1 or q_exact_bound(prof, res - 1) >= 1


def test_no_conclusion_when_f_reaches_one():
    prof = profile("alt 6", "4a", with_p=False)
    if any(t.F >= 1 for t in prof.terms):
        assert isinstance(min_c(prof), NoConclusion)


def test_lemma_bd():
    A = [Fraction(1, 2), Fraction(1, 4)]
    assert lemma_bd(A, 1, 2) == Fraction(9, 16)
    assert lemma_bd(A, Fraction(3, 4), 3) == Fraction(3, 4)
    # sum a_i^c <= B^(1-c) (sum a_i)^c whenever each a_i <= B
    for c in range(1, 6):
        assert sum(a**c for a in A) <= lemma_bd(A, max(A), c)
    with pytest.raises(ValueError):
        lemma_bd(A, 0, 2)


def test_p_exact_identity():
    G = group("alt 5")
    assert p_exact(G, G.identity, G.class_table().classes[1].rep) == 1


def test_wilson():
    lo, hi = wilson_interval(50, 100)
    assert lo < 0.5 < hi and hi - lo < 0.3
    assert wilson_interval(0, 100)[0] == 0.0
    assert wilson_interval(0, 0) == (0.0, 1.0)


def test_monte_carlo_reproducible():
    G = group("alt 5")
    s = G.class_table().by_label("5a").rep
    a = q_monte_carlo(G, s, 3, trials=300, seed=4)
    b = q_monte_carlo(G, s, 3, trials=300, seed=4)
    assert a == b and a.label == "ESTIMATE"
