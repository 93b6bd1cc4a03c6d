import math
import random
from itertools import combinations

import pytest

from unidom import kernels as K
from unidom.atlas import element_of_shape
from unidom.domination import (
    ClassMasks,
    TDSCertificate,
    conjugate_overgroups,
    gamma_u_bracket,
    gamma_u_exhaustive_refute,
    gamma_u_lower,
    gamma_u_upper_random,
    generates,
    is_tds_criterion,
    is_tds_direct,
    neighbour_index,
    overgroup_base_sizes,
    verify_certificate,
)
from unidom.overgroups import maximal_overgroups
from unidom.perm import parse_cycles

from conftest import group


def five_cycle_class(G):
    return G.class_table().by_label("5a")


def test_generates():
    G = group("alt 5")
    s = parse_cycles("(1,2,3,4,5)", 5).images
    assert not generates(G, s, s)
    assert generates(G, s, parse_cycles("(1,2)(3,4)", 5).images)
    for y in G.elements():
        assert not generates(G, G.identity, y)


def test_singletons_never_dominate():
    G = group("alt 5")
    for c in G.class_table().classes[1:]:
        assert not is_tds_direct(G, [c.rep])
        ov = maximal_overgroups(G, c.rep)
        assert not is_tds_criterion([c.rep], [ov])


def test_a5_pairs_fail_triples_succeed():
    G = group("alt 5")
    C = five_cycle_class(G)
    cls = G.class_table().class_elements(C.index)
    assert all(not is_tds_direct(G, pair) for pair in combinations(cls, 2))
    cert = gamma_u_upper_random(G, C, 3, trials=500)
    assert cert is not None and cert.size == 3
    # exhaustive check over all 59 nonidentity elements
    S = cert.elements()
    assert all(any(generates(G, x, s) for s in S) for x in G.elements()[1:])


def test_pair_in_a_common_d10_fails_criterion():
    G = group("alt 5")
    s = parse_cycles("(1,2,3,4,5)", 5).images
    t = K.inv(s)
    sets = [maximal_overgroups(G, x) for x in (s, t)]
    assert not is_tds_criterion([s, t], sets)


SMALL = ["alt 4", "sym 4", "alt 5", "sym 5", "alt 6", "sym 6", "psl2 4", "psl2 5", "psl2 7", "psl2 8", "psl2 9",
         "psl2 11", "psl2 13"]


@pytest.mark.parametrize("spec", SMALL)
def test_criterion_equals_direct(spec):
    """200 random candidate sets of conjugates: the two tests agree."""
    G = group(spec)
    rng = random.Random(len(spec))
    tab = G.class_table()
    classes = tab.classes[1:]
    ovs = {c.index: maximal_overgroups(G, c.rep) for c in classes}
    agree = {True: 0, False: 0}
    for _ in range(200):
        c = classes[rng.randrange(len(classes))]
        size = rng.choice([2, 3, 4])
        gs = [G.random_images(rng) for _ in range(size)]
        S = [K.conj(c.rep, g) for g in gs]
        direct = is_tds_direct(G, S)
        crit = is_tds_criterion(S, [conjugate_overgroups(ovs[c.index], g) for g in gs])
        assert direct == crit
        agree[direct] += 1
    assert agree[False] > 0


@pytest.mark.parametrize("spec", ["alt 6", "psl2 11"])
def test_conjugation_invariance(spec):
    G = group(spec)
    rng = random.Random(9)
    C = G.class_table().classes[-1]
    for _ in range(20):
        S = [K.conj(C.rep, G.random_images(rng)) for _ in range(3)]
        g = G.random_images(rng)
        assert is_tds_direct(G, S) == is_tds_direct(G, [K.conj(x, g) for x in S])


def test_class_masks_match_direct():
    G = group("alt 6")
    C = five_cycle_class(G)
    ov = maximal_overgroups(G, C.rep)
    cm = ClassMasks(neighbour_index(G), ov)
    assert len(cm) == C.size
    rng = random.Random(2)
    for _ in range(30):
        pos = rng.sample(range(len(cm)), 4)
        assert cm.is_tds(pos) == is_tds_direct(G, [cm.elements[i] for i in pos])
    for t, g in zip(cm.elements[:20], cm.conjugators[:20]):
        assert K.conj(C.rep, g) == t


@pytest.mark.parametrize("spec,label,c,status", [("alt 5", "5a", 2, "refuted"), ("alt 5", "5a", 3, "found"),
                                                 ("alt 6", "5a", 3, "refuted"), ("alt 5", "3a", 1, "refuted")])
def test_refutation(spec, label, c, status):
    G = group(spec)
    r = gamma_u_exhaustive_refute(G, label, c)
    assert r.status == status
    if status == "refuted" and c >= 2:
        assert r.tuples_checked == r.expected
    if status == "found":
        ok, _ = verify_certificate(G, r.certificate)
        assert ok and r.certificate.size == c


def test_refutation_symmetry_reduction_counts():
    G = group("alt 6")
    C = five_cycle_class(G)
    full = gamma_u_exhaustive_refute(G, C, 3, symmetry=False)
    reduced = gamma_u_exhaustive_refute(G, C, 3)
    assert full.status == reduced.status == "refuted"
    assert full.tuples_checked == math.comb(C.size - 1, 2)
    assert reduced.tuples_checked < full.tuples_checked


def test_refutation_budget_inconclusive():
    G = group("alt 6")
    r = gamma_u_exhaustive_refute(G, "5a", 3, budget=10)
    assert r.status == "inconclusive"


def test_certificate_round_trip(tmp_path):
    G = group("alt 6")
    cert = gamma_u_upper_random(G, "5a", 4, trials=2000, seed=3)
    assert cert is not None
    again = TDSCertificate.from_json(cert.to_json())
    assert again.elements() == cert.elements()
    assert verify_certificate(G, again) == (True, "verified")
    assert verify_certificate(G, again, "criterion")[0]
    bad = TDSCertificate.from_json(cert.to_json())
    bad.conjugators[1] = bad.conjugators[2]
    assert not verify_certificate(G, bad)[0]
    assert not verify_certificate(group("alt 7"), again)[0]


@pytest.mark.parametrize("spec,label", [("M11", "11a"), ("alt 5", "5a")])
def test_unique_overgroup_base_size_is_minimal_tds(spec, label):
    """With M(G,s) = {H}, conjugates of s form a TDS exactly when the
    matching conjugates of H meet trivially, so the least size is b(G,G/H)."""
    G = group(spec)
    C = G.class_table().by_label(label)
    ov = maximal_overgroups(G, C.rep)
    assert len(ov) == 1
    (b,) = overgroup_base_sizes(G, ov)
    assert gamma_u_exhaustive_refute(G, C, b - 1).status == "refuted"
    assert gamma_u_upper_random(G, C, b, trials=3000) is not None


def test_lower_bound():
    assert gamma_u_lower(group("alt 5"))[0] == 3
    value, evidence = gamma_u_lower(group("psl2 7"))
    assert value >= 2 and all(e["certified"] for e in evidence)


@pytest.mark.parametrize("spec,bracket", [("alt 5", (3, 3)), ("alt 6", (4, 4)), ("psl2 7", (3, 3)),
                                          ("psl2 8", (3, 3)), ("psl2 11", (2, 2))])
def test_bracket(spec, bracket):
    rep = gamma_u_bracket(group(spec))
    assert (rep.lower, rep.upper) == bracket and rep.exact
    assert rep.lower <= rep.upper
    d = rep.to_json()
    assert d["bracket"] == list(bracket) and d["certificate"]["size"] == bracket[1]
