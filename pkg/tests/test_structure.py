import pytest
from hypothesis import given, settings, strategies as st

from unidom import kernels as K
from unidom.atlas import element_of_shape
from unidom.perm import element_order, parse_cycles
from unidom.structure import (
    Subgroup,
    SubgroupPool,
    conjugacy_classes,
    conjugacy_orbit,
    intersection_is_trivial,
    join,
    power_covering_classes,
    prime_order_class_reps,
    subgroup_equal,
)

from conftest import group

# (group, number of classes) from the character tables
CLASS_COUNTS = [("alt 5", 5), ("alt 6", 7), ("alt 7", 9), ("psl2 7", 6), ("psl2 8", 9), ("psl2 11", 8), ("M11", 10),
                ("M12", 15), ("sym 5", 7)]


@pytest.mark.parametrize("spec,count", CLASS_COUNTS)
def test_class_counts(spec, count):
    tab = group(spec).class_table()
    assert len(tab) == count
    tab.check()


def test_a5_classes():
    tab = group("alt 5").class_table()
    assert [(c.label, c.size) for c in tab] == [("1a", 1), ("2a", 15), ("3a", 20), ("5a", 12), ("5b", 12)]
    assert tab.by_label("5a").centralizer_order == 5


@pytest.mark.parametrize("n", [5, 6, 7])
def test_cycle_type_table_matches_enumeration(n):
    G = group(f"alt {n}")
    a = conjugacy_classes(G, "cycle_type")
    b = conjugacy_classes(G, "enumerated")
    assert sorted((c.order, c.size) for c in a) == sorted((c.order, c.size) for c in b)
    # both tables classify every element the same way up to relabelling
    for g in G.elements()[:: max(1, len(G.elements()) // 300)]:
        assert a[a.classify(g)].size == b[b.classify(g)].size


def test_split_classes_in_a7():
    tab = group("alt 7").class_table()
    s = element_of_shape(7, [7]).images
    t = K.conj(s, parse_cycles("(1,2)", 7).images)  # S_7-conjugate, not A_7-conjugate
    assert not tab.same_class(s, t)
    assert tab.same_class(s, K.conj(s, parse_cycles("(1,2,3)", 7).images))


def test_power_map_and_covering():
    G = group("alt 5")
    tab = G.class_table()
    c5 = tab.by_label("5a").index
    assert tab[tab.power_map(c5, 2)].label == "5b"
    assert tab.power_map(c5, 5) == 0
    # 5a squared is 5b, so one 5-class covers both
    assert [c.label for c in power_covering_classes(G)] == ["5a", "3a", "2a"]


def test_prime_order_reps():
    reps = prime_order_class_reps(group("M11"))
    assert sorted(element_order(p) for p, _ in reps) == [2, 3, 5, 11, 11]


def test_conjugacy_orbit():
    G = group("M11")
    s = G.class_table().by_label("11a").rep
    assert len(conjugacy_orbit(G, s)) == 720


def test_subgroups():
    G = group("alt 5")
    s = element_of_shape(5, [5]).images
    S = Subgroup(G, [s])
    assert S.order == 5 and S.index == 12
    D = join(S, parse_cycles("(2,5)(3,4)", 5).images)
    assert D.order == 10 and D.contains_subgroup(S)
    assert subgroup_equal(D, join(S, parse_cycles("(1,5)(2,4)", 5).images))
    assert D.fingerprint()[0] == 10
    C = D.conjugate(parse_cycles("(1,2,3)", 5).images)
    assert C.order == 10
    assert not intersection_is_trivial([S, D])
    pool = SubgroupPool()
    assert pool.add(D)[1] and not pool.add(join(S, parse_cycles("(1,5)(2,4)", 5).images))[1]
    with pytest.raises(ValueError):
        Subgroup(G, [parse_cycles("(1,2)", 5).images])


@settings(max_examples=25, deadline=None)
@given(st.randoms(use_true_random=False))
def test_class_sizes_divide_order(rng):
    G = group("psl2 13")
    tab = G.class_table()
    g = G.random_images(rng)
    c = tab[tab.classify(g)]
    assert G.order % c.size == 0
    assert element_order(g) == c.order
    assert tab.same_class(g, K.conj(g, G.random_images(rng)))
