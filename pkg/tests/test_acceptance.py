"""Acceptance criteria 1-11.

Each test carries ``criterion(n)``; conftest prints one PASS/FAIL line per
criterion at the end of the run.  Optional long targets only run with
UNIDOM_SLOW=1 and do not count towards any criterion.
"""

import os
import subprocess
import sys
import time
from collections import Counter
from fractions import Fraction
from pathlib import Path

import pytest

from unidom import kernels as K
from unidom.actions import base_size, coset_action
from unidom.alt_theory import mu_alt_predicted, pgam_bracket
from unidom.atlas import element_of_shape
from unidom.domination import (
    gamma_u_bracket,
    gamma_u_exhaustive_refute,
    gamma_u_lower,
    gamma_u_upper_random,
    is_tds_criterion,
    verify_certificate,
)
from unidom.overgroups import CERTIFIED, ESTIMATED, maximal_overgroups, mu
from unidom.perm import element_order, parse_cycles
from unidom.prob import ProbProfile, min_c, q_hat

from conftest import group

SLOW = os.environ.get("UNIDOM_SLOW") == "1"
ROOT = Path(__file__).resolve().parent.parent


class timer:
    def __init__(self, limit):
        self.limit = limit

    def __enter__(self):
        self.t = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.t
        if exc[0] is None:
            assert self.elapsed <= self.limit, f"took {self.elapsed:.0f}s, limit {self.limit}s"


def shapes(res):
    return [sorted(shape, reverse=True) for _label, shape in res.ties]


@pytest.mark.criterion(1)
@pytest.mark.parametrize("n,value,shape,limit", [(5, 1, [5], 60), (7, 2, [7], 60), (9, 3, [5, 2, 2], 1800)])
def test_mu_odd_alternating(n, value, shape, limit):
    with timer(limit):
        res = mu(group(f"alt {n}"), ties=True)
    assert res.certified and res.value == value
    assert shape in shapes(res)
    assert mu_alt_predicted(n) == value


@pytest.mark.criterion(2)
def test_mu_a6_a8():
    with timer(600):
        r6 = mu(group("alt 6"))
        G = group("alt 6")
        ov = maximal_overgroups(G, element_of_shape(6, [5, 1]), CERTIFIED)
        r8 = mu(group("alt 8"))
    assert r6.certified and r6.value == 2
    assert ov.orders() == [60, 60]
    assert r8.certified and r8.value == 1
    assert mu_alt_predicted(6) == 2 and mu_alt_predicted(8) == 1


@pytest.mark.criterion(3)
@pytest.mark.parametrize("n,value,shape", [(11, 2, [11]), (13, 3, [9, 2, 2])])
def test_mu_estimated_large_alternating(n, value, shape):
    G = group(f"alt {n}")
    with timer(1800):
        res = mu(G, mode=ESTIMATED)
    assert res.mode == ESTIMATED and not res.certified
    assert res.value == value == mu_alt_predicted(n)
    # the tabulated shape attains the value
    assert len(maximal_overgroups(G, element_of_shape(n, shape), ESTIMATED)) == value


@pytest.mark.criterion(4)
def test_m11():
    G = group("M11")
    with timer(1200):
        s = G.class_table().by_label("11a").rep
        ov = maximal_overgroups(G, s, CERTIFIED)
        assert ov.orders() == [660]
        act = coset_action(G, ov.subgroups[0])
        cert = base_size(act, "exact")
        low, evidence = gamma_u_lower(G)
        tds = gamma_u_upper_random(G, "11a", 4, trials=5000)
    assert act.degree == 12 and cert.conclusive and cert.b == 4
    assert low == 4 and all(e["certified"] for e in evidence)
    assert tds is not None and verify_certificate(G, tds)[0]


@pytest.mark.criterion(5)
def test_m12():
    G = group("M12")
    with timer(3600):
        res = mu(G)
        s = G.class_table().by_label("10a").rep
        ov = maximal_overgroups(G, s, CERTIFIED)
        tds = gamma_u_upper_random(G, "10a", 4, trials=20000, overgroups=ov)
        low, evidence = gamma_u_lower(G)
    assert res.certified and res.value == 3
    assert ov.orders() == [1440, 1440, 240]
    assert tds is not None and tds.size == 4 and verify_certificate(G, tds)[0]
    assert low >= 3 and all(e["certified"] for e in evidence)


@pytest.mark.skipif(not SLOW, reason="set UNIDOM_SLOW=1 for the c = 3 refutation in M12")
def test_m12_gamma_exact_slow():
    r = gamma_u_bracket(group("M12"), c_max=4)
    assert (r.lower, r.upper) == (4, 4)


@pytest.mark.criterion(6)
def test_j1():
    G = group("J1")
    with timer(600):
        s = G.class_table().by_label("15a").rep
        est = maximal_overgroups(G, s, ESTIMATED)
        assert est.orders() == [60]
        H = est.subgroups[0]
        act = coset_action(G, H)
        cert = base_size(act, "exact")
        tds = gamma_u_upper_random(G, "15a", 2, trials=200, overgroups=est)
    assert act.degree == 2926 == G.order // 60
    assert cert.conclusive and cert.b == 2
    # a pair is a TDS, and no single element is: gamma_u = 2
    assert tds is not None and verify_certificate(G, tds, "direct")[0]


@pytest.mark.criterion(6)
def test_j1_certified():
    G = group("J1")
    with timer(7200):
        res = mu(G)
        ov = maximal_overgroups(G, G.class_table().by_label("15a").rep, CERTIFIED)
    assert res.certified and res.value == 1
    assert ov.orders() == [60]


@pytest.mark.criterion(7)
def test_gamma_alternating_small():
    with timer(600):
        a5 = gamma_u_bracket(group("alt 5"))
        a6 = gamma_u_bracket(group("alt 6"))
        r5 = gamma_u_exhaustive_refute(group("alt 5"), "5a", 2)
        r6 = gamma_u_exhaustive_refute(group("alt 6"), "5a", 3)
        c6 = gamma_u_upper_random(group("alt 6"), "5a", 4)
    assert (a5.lower, a5.upper) == (3, 3) and a5.certificate.size == 3
    assert (a6.lower, a6.upper) == (4, 4)
    assert r5.status == "refuted" and r6.status == "refuted"
    assert c6 is not None and verify_certificate(group("alt 6"), c6)[0]


@pytest.mark.criterion(7)
def test_gamma_a7():
    with timer(1800):
        r = gamma_u_bracket(group("alt 7"))
    assert r.lower >= 3 and r.upper <= 4
    assert (r.lower, r.upper) == (4, 4)


@pytest.mark.criterion(8)
@pytest.mark.parametrize("q", [4, 5, 7, 8, 9, 11, 13])
def test_psl2_sweep(q):
    G = group(f"psl2 {q}")
    r = gamma_u_bracket(G)
    assert r.exact and r.upper <= 4
    assert (r.upper == 4) == (q == 9)
    if q == 9:
        for C in G.class_table().classes[1:]:
            assert gamma_u_exhaustive_refute(G, C, 3).status == "refuted", C.label
    if q >= 11:
        d = 2 if q % 2 else 1
        k = (q + 1) // d
        C = next(c for c in G.class_table() if c.order == k)
        ov = maximal_overgroups(G, C.rep, CERTIFIED)
        assert ov.orders() == [2 * k]
        (H,) = ov.subgroups
        outside = [h for h in H.elements() if element_order(h) != 1 and not _in_cyclic(h, C.rep)]
        assert len(outside) == k and all(element_order(h) == 2 for h in outside)
        assert r.upper <= 3


def _in_cyclic(h, s):
    p = s
    while not K.is_identity(p):
        if p == h:
            return True
        p = K.mul(p, s)
    return False


@pytest.mark.criterion(9)
def test_probabilistic_a5():
    G = group("alt 5")
    s = parse_cycles("(1,2,3,4,5)", 5).images
    prof = ProbProfile.build(G, s)
    assert q_hat(prof, 2) == Fraction(7, 3)
    assert q_hat(prof, 3) == Fraction(2, 3)
    assert min_c(prof) == 3
    # oracle: count fixed cosets of the one maximal overgroup directly
    (H,) = prof.overgroups.subgroups
    act = coset_action(G, H)
    oracle = Fraction(0)
    for t in prof.terms:
        fixed = sum(1 for i, j in enumerate(act.image(t.rep)) if i == j)
        oracle += t.size * Fraction(fixed, act.degree) ** 3
    assert oracle == q_hat(prof, 3)
    assert gamma_u_bracket(G).upper == 3


@pytest.mark.criterion(10)
def test_a13_pair():
    G = group("alt 13")
    s = parse_cycles("(1,2,3,4,5,6,7,8,9,10,11,12,13)", 13).images
    t = parse_cycles("(1,2,3,4,5,6,8,9,12,7,11,10,13)", 13).images
    lo, hi = pgam_bracket(13, 3, 3, 1)
    with timer(1800):
        sets = [maximal_overgroups(G, x, ESTIMATED) for x in (s, t)]
        for ov in sets:
            count = Counter(ov.orders())
            assert set(count) == {5616, 78} and count[78] == 1
            assert lo <= count[5616] <= hi
        assert is_tds_criterion([s, t], sets)


PROPERTY_SUITES = [
    "tests/test_domination.py::test_criterion_equals_direct",
    "tests/test_actions.py::test_fpr_two_ways",
    "tests/test_actions.py::test_log_exact_greedy_chain",
    "tests/test_actions.py::test_halasi_bracket",
    "tests/test_alt_theory.py::test_binom_all_small",
    "tests/test_alt_theory.py::test_prime_witness_sets_are_small",
    "tests/test_overgroups.py::test_overgroup_count_identity",
    "tests/test_prob.py::test_bounds_chain",
    "tests/test_alt_theory.py::test_mu_predictions",
    "tests/test_alt_theory.py::test_mu_predictions_match_computation",
]


@pytest.mark.criterion(11)
def test_property_suites():
    with timer(7200):
        proc = subprocess.run([sys.executable, "-m", "pytest", "-q", "-p", "no:cacheprovider", *PROPERTY_SUITES],
                              cwd=ROOT, capture_output=True, text=True)
    assert proc.returncode == 0, proc.stdout[-3000:]
