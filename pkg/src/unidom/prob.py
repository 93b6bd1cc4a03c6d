"""Probabilistic bounds for total domination by random conjugates.

Q(G,s,c) is the probability that c independent uniform conjugates of s fail
to form a TDS.  A prime-order x escapes the tuple with probability
P(x,s)^c, where P(x,s) is the chance that a random conjugate of s does not
generate with x, so Q <= sum over prime-order classes of |x^G| P(x,s)^c.
Since P(x,s) <= F(x,s) = sum over H in M(G,s) of fpr(x, G/H), the weaker
but cheaper Q-hat uses F in place of P.  All of this is exact rational
arithmetic; only the Monte Carlo estimate uses floats.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from statistics import NormalDist
from typing import Sequence

from unidom import kernels as K
from unidom.chain import derive_rng
from unidom.field import is_prime
from unidom.group import PermGroup, images_of
from unidom.overgroups import CERTIFIED, ESTIMATED, OvergroupSet, maximal_overgroups
from unidom.structure import conjugacy_orbit

Q_HAT = "q_hat"
Q_EXACT = "q_exact"


def _frac(q: Fraction | None):
    return None if q is None else str(q)


@dataclass
class ClassTerm:
    label: str
    order: int
    size: int
    rep: tuple
    F: Fraction
    P: Fraction | None = None

    def to_json(self) -> dict:
        return {"class": self.label, "order": self.order, "size": self.size, "F": _frac(self.F), "P": _frac(self.P)}


@dataclass
class ProbProfile:
    group: PermGroup
    element: tuple
    overgroups: OvergroupSet
    terms: list[ClassTerm] = field(default_factory=list)

    @property
    def certified(self) -> bool:
        return self.overgroups.certified

    @classmethod
    def build(cls, G: PermGroup, s, ov: OvergroupSet | None = None, with_p: bool = False,
              p_method: str = "overgroups", cap: int | None = None) -> "ProbProfile":
        """F per prime-order class from the overgroups (each H counted once
        per listed subgroup), and optionally P."""
        s = images_of(s)
        if ov is None:
            ov = maximal_overgroups(G, s, CERTIFIED if G.enumerable() else ESTIMATED)
        tab = G.class_table()
        prime = [c for c in tab if is_prime(c.order)]
        hits = {c.index: Fraction(0) for c in prime}
        for H in ov.subgroups:
            counts = {c.index: 0 for c in prime}
            for h in H.elements():
                if K.is_identity(h):
                    continue
                k = tab.classify(h)
                if k in counts:
                    counts[k] += 1
            for k, n in counts.items():
                hits[k] += Fraction(n, tab[k].size)
        terms = [ClassTerm(c.label, c.order, c.size, c.rep, hits[c.index]) for c in prime]
        prof = cls(G, s, ov, terms)
        if with_p:
            for t in terms:
                if p_method == "sweep":
                    t.P = p_exact(G, t.rep, s, cap)
                else:
                    t.P = p_from_overgroups(G, t.rep, ov)
        return prof

    def to_json(self, c_values: Sequence[int] = (2, 3, 4)) -> dict:
        d = {
            "element": _cycles(self.element),
            "certified": self.certified,
            "classes": [t.to_json() for t in self.terms],
            "q_hat": {str(c): _frac(q_hat(self, c)) for c in c_values},
        }
        if all(t.P is not None for t in self.terms):
            d["q_exact_bound"] = {str(c): _frac(q_exact_bound(self, c)) for c in c_values}
        return d


def _cycles(p: tuple) -> str:
    from unidom.perm import format_cycles

    return format_cycles(p)


# -- P(x, s) -----------------------------------------------------------------


def p_exact(G: PermGroup, x, s, cap: int | None = None) -> Fraction:
    """Fraction of conjugates z of s with <x, z> != G, by sweeping s^G."""
    x, s = images_of(x), images_of(s)
    cls = conjugacy_orbit(G, s, cap)
    if K.is_identity(x):
        return Fraction(1)
    bad = sum(1 for z in cls if G.generated_order([x, z]) != G.order)
    return Fraction(bad, len(cls))


def p_from_overgroups(G: PermGroup, x, ov: OvergroupSet) -> Fraction:
    """|x^G & (union of M(G,s))| / |x^G|.

    Counting non-generating pairs in x^G times s^G both ways shows this
    equals P(x,s) whenever ``ov`` is the full set M(G,s).
    """
    x = images_of(x)
    tab = G.class_table()
    k = tab.classify(x)
    seen = set()
    for H in ov.subgroups:
        for h in H.elements():
            if h not in seen and tab.classify(h) == k:
                seen.add(h)
    return Fraction(len(seen), tab[k].size)


# -- bounds ------------------------------------------------------------------


def q_hat(prof: ProbProfile, c: int) -> Fraction:
    return sum((t.size * t.F**c for t in prof.terms), Fraction(0))


def q_exact_bound(prof: ProbProfile, c: int, cap: Fraction | None = None) -> Fraction:
    """sum |x^G| P(x,s)^c, using P where known and min(F, cap) otherwise."""
    total = Fraction(0)
    for t in prof.terms:
        if t.P is not None:
            p = t.P
        else:
            p = t.F if cap is None else min(t.F, cap)
        total += t.size * p**c
    return total


@dataclass
class NoConclusion:
    reason: str
    witness_class: str | None = None

    def to_json(self) -> dict:
        return {"no_conclusion": self.reason, "class": self.witness_class}


def min_c(prof: ProbProfile, method: str = Q_HAT, c_max: int = 10, cap: Fraction | None = None) -> int | NoConclusion:
    """Least c <= c_max whose bound is below 1."""
    if method == Q_HAT:
        bad = next((t for t in prof.terms if t.F >= 1), None)
        if bad is not None:
            return NoConclusion(f"F(x,s) = {bad.F} >= 1, so the bound never drops below 1", bad.label)
        f = lambda c: q_hat(prof, c)  # noqa: E731
    elif method == Q_EXACT:
        f = lambda c: q_exact_bound(prof, c, cap)  # noqa: E731
    else:
        raise ValueError(f"unknown method {method!r}")
    for c in range(1, c_max + 1):
        if f(c) < 1:
            return c
    return NoConclusion(f"bound still >= 1 at c = {c_max}")


def lemma_bd(A: Sequence[Fraction], B: Fraction, c: int) -> Fraction:
    """B^(1-c) (sum A)^c."""
    if c < 1:
        raise ValueError("c must be positive")
    B = Fraction(B)
    if B <= 0:
        raise ValueError("B must be positive")
    return B ** (1 - c) * sum((Fraction(a) for a in A), Fraction(0)) ** c


# -- Monte Carlo ---------------------------------------------------------------


def wilson_interval(k: int, n: int, confidence: float = 0.99) -> tuple[float, float]:
    if n == 0:
        return 0.0, 1.0
    z = NormalDist().inv_cdf(0.5 + confidence / 2)
    p = k / n
    den = 1 + z * z / n
    mid = (p + z * z / (2 * n)) / den
    half = z * ((p * (1 - p) / n + z * z / (4 * n * n)) ** 0.5) / den
    return max(0.0, mid - half), min(1.0, mid + half)


@dataclass
class MonteCarlo:
    estimate: float
    interval: tuple[float, float]
    failures: int
    trials: int
    label: str = "ESTIMATE"

    def to_json(self) -> dict:
        return {"estimate": self.estimate, "ci99": list(self.interval), "failures": self.failures,
                "trials": self.trials, "label": self.label}


def q_monte_carlo(G: PermGroup, s, c: int, trials: int = 10_000, seed: int = 0,
                  ov: OvergroupSet | None = None) -> MonteCarlo:
    """Fraction of uniform c-tuples of conjugates of s (with repetition)
    that are not a TDS, with a 99% Wilson interval."""
    from unidom.domination import _tester

    s = images_of(s)
    if ov is None and G.enumerable():
        ov = maximal_overgroups(G, s, CERTIFIED, seed=seed)
    test, _method, _cert = _tester(G, ov)
    if ov is None:
        from unidom.domination import is_tds_direct

        test = lambda gs: is_tds_direct(G, [K.conj(s, g) for g in gs])  # noqa: E731
    rng = derive_rng(seed, "montecarlo", c)
    fails = 0
    for _ in range(trials):
        gs = [G.random_images(rng) for _ in range(c)]
        if not test(gs):
            fails += 1
    return MonteCarlo(fails / trials, wilson_interval(fails, trials), fails, trials)
