import pytest

from unidom import kernels as K
from unidom.atlas import element_of_shape
from unidom.field import is_prime
from unidom.overgroups import (
    BudgetExceeded,
    CERTIFIED,
    ESTIMATED,
    certified_maximal_sample,
    maximal_overgroups,
    mu,
    overgroup_count_identity,
)
from unidom.structure import Subgroup, SubgroupPool

from conftest import group


def brute_force_maximals(G):
    """All maximal subgroups of a small group whose maximal subgroups are
    2-generated: close pairs (class rep, element), keep those passing the
    definition of maximality, and take conjugates."""
    pool = SubgroupPool()
    els = G.elements()
    for c in G.class_table().classes[1:]:
        for y in els:
            H = Subgroup(G, [c.rep, y], check=False)
            if not H.is_whole():
                pool.add(H)
    def is_maximal(H):
        return all(G.generated_order(H.gens + [g]) == G.order for g in els if not H.contains(g))

    tops = [H for H in pool if is_maximal(H)]
    allmax = SubgroupPool()
    for M in tops:
        for g in els:
            allmax.add(M.conjugate(g))
    return allmax.items


@pytest.mark.parametrize("spec", ["alt 5", "psl2 7", "alt 6"])
def test_certified_matches_brute_force(spec):
    G = group(spec)
    maxes = brute_force_maximals(G)
    for c in G.class_table().classes[1:]:
        got = maximal_overgroups(G, c.rep)
        want = [M for M in maxes if M.contains(c.rep)]
        assert sorted(got.orders()) == sorted(M.order for M in want), c.label
        for H in got:
            assert any(M.order == H.order and M.contains_subgroup(H) for M in want)


@pytest.mark.parametrize("spec,shape_or_label,orders", [
    ("alt 5", [5], [10]),
    ("alt 6", [5, 1], [60, 60]),
    ("alt 7", [7], [168, 168]),
    ("alt 8", [5, 3], [360]),
    ("M11", "11a", [660]),
    ("M12", "10a", [1440, 1440, 240]),
    ("psl2 11", "6a", [12]),
    ("psl2 13", "7a", [14]),
])
def test_known_overgroup_sets(spec, shape_or_label, orders):
    G = group(spec)
    if isinstance(shape_or_label, str):
        s = G.class_table().by_label(shape_or_label).rep
    else:
        s = element_of_shape(G.degree, shape_or_label).images
    ov = maximal_overgroups(G, s)
    assert ov.certified and ov.orders() == orders
    ov.check(samples=20)


@pytest.mark.parametrize("spec,label", [("alt 6", "5a"), ("M11", "11a"), ("psl2 11", "5a"), ("alt 7", "7a")])
def test_estimated_agrees_with_certified(spec, label):
    G = group(spec)
    s = G.class_table().by_label(label).rep
    cert = maximal_overgroups(G, s, CERTIFIED)
    est = maximal_overgroups(G, s, ESTIMATED, budget=20_000, seed=1)
    assert est.mode == ESTIMATED and not est.certified
    assert est.orders() == cert.orders()


def test_certified_sample_is_a_subset():
    G = group("M12")
    s = G.class_table().by_label("10a").rep
    full = maximal_overgroups(G, s)
    some = certified_maximal_sample(G, s, need=2, restarts=10)
    assert 1 <= len(some) <= len(full)
    for H in some:
        assert any(F.order == H.order and F.contains_subgroup(H) for F in full)


def test_identity_and_bad_input():
    G = group("alt 5")
    with pytest.raises(ValueError):
        maximal_overgroups(G, G.identity)
    with pytest.raises(ValueError):
        maximal_overgroups(G, (1, 0, 2, 3, 4))  # odd
    with pytest.raises(ValueError):
        maximal_overgroups(G, element_of_shape(5, [5]).images, mode="guess")


def test_budget_exceeded():
    G = group("M12")
    s = G.class_table().by_label("2a").rep
    with pytest.raises(BudgetExceeded):
        maximal_overgroups(G, s, budget=5)


@pytest.mark.parametrize("spec,expected", [("alt 5", 1), ("alt 6", 2), ("alt 7", 2), ("alt 8", 1), ("M11", 1),
                                           ("psl2 7", 1), ("psl2 9", 2)])
def test_mu_small(spec, expected):
    r = mu(group(spec))
    assert r.value == expected and r.certified
    assert len(r.overgroups) == expected


IDENTITY_TRIPLES = [("alt 5", "5a", 0), ("alt 6", "5a", 0), ("alt 6", "5a", 1), ("M11", "11a", 0),
                    ("M12", "10a", 0), ("M12", "10a", 2), ("psl2 11", "5a", 0), ("alt 7", "7a", 0),
                    ("psl2 13", "7a", 0), ("alt 8", "15a", 0)]


@pytest.mark.parametrize("spec,label,i", IDENTITY_TRIPLES)
def test_overgroup_count_identity(spec, label, i):
    """For self-normalising H, the number of conjugates of H containing s
    equals fpr(s, G/H) |G:H|."""
    G = group(spec)
    s = G.class_table().by_label(label).rep
    H = maximal_overgroups(G, s).subgroups[i]
    count, fixed, self_norm = overgroup_count_identity(G, s, H)
    assert self_norm  # maximal subgroups of simple groups
    assert count == fixed
    listed = sum(1 for L in maximal_overgroups(G, s) if L.order == H.order and L.fingerprint() == H.fingerprint())
    assert count <= listed


def test_conjugation_equivariance():
    G = group("alt 6")
    s = element_of_shape(6, [5, 1]).images
    g = G.random_images(__import__("random").Random(4))
    a = maximal_overgroups(G, s)
    b = maximal_overgroups(G, K.conj(s, g))
    assert a.orders() == b.orders()
    for H in a:
        Hg = H.conjugate(g)
        assert any(L.order == Hg.order and L.contains_subgroup(Hg) for L in b)
