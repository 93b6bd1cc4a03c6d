"""Maximal overgroups of an element and the invariant mu(G).

Certified mode explores the overgroup lattice of <s> upwards.  For a
subgroup K, every proper subgroup strictly above K contains some <K, g>,
and <K, g> only depends on the double coset K g K, so it suffices to join
K with one element per K-orbit on the right cosets G/K.  A subgroup none
of whose joins is proper is maximal; the maximal overgroups of K are the
union of those of its proper joins.  Results are memoised per subgroup.

Estimated mode climbs with sampled elements only: uniform elements,
random conjugates of prime-order class representatives, and elements of
the symmetric-group normaliser of <s> that happen to lie in G.  The last
two make overgroups that uniform sampling essentially never hits (for
instance the affine and projective overgroups of a long cycle) reachable.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from unidom import kernels as K
from unidom.actions import CosetSpace, DEFAULT_DEGREE_CAP
from unidom.chain import EnumerationCapError, derive_rng
from unidom.group import PermGroup, images_of
from unidom.perm import Permutation, cycles_of, element_order, format_cycles
from unidom.structure import Subgroup, SubgroupPool, TableUnavailable, join

CERTIFIED = "certified"
ESTIMATED = "estimated"
DEFAULT_CLIMB_BUDGET = 100_000


class BudgetExceeded(RuntimeError):
    pass


@dataclass
class OvergroupSet:
    group: PermGroup
    element: tuple
    subgroups: list[Subgroup]
    mode: str
    budget_used: int = 0
    stats: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.subgroups)

    def __iter__(self):
        return iter(self.subgroups)

    @property
    def certified(self) -> bool:
        return self.mode == CERTIFIED

    def orders(self) -> list[int]:
        return sorted((H.order for H in self.subgroups), reverse=True)

    def check(self, samples: int = 0, seed: int = 0) -> None:
        """Structural invariants; with ``samples`` also replay the
        maximality test on random elements."""
        s = self.element
        for H in self.subgroups:
            assert H.contains(s) and not H.is_whole()
        for i, H in enumerate(self.subgroups):
            for j, L in enumerate(self.subgroups):
                if i != j:
                    assert not L.contains_subgroup(H)
        rng = derive_rng(seed, "replay")
        G = self.group
        for _ in range(samples):
            g = G.random_images(rng)
            for H in self.subgroups:
                if not H.contains(g):
                    assert G.generated_order(H.gens + [g]) == G.order

    def to_json(self) -> dict:
        return {
            "element": format_cycles(self.element),
            "mode": self.mode,
            "subgroups": [H.to_json() for H in self.subgroups],
            "budget_used": self.budget_used,
        }


# -- samplers ----------------------------------------------------------------


def _prime_class_reps(G: PermGroup) -> list[tuple]:
    try:
        tab = G.class_table()
    except (TableUnavailable, EnumerationCapError):
        return []
    from unidom.field import is_prime

    return [c.rep for c in tab if is_prime(c.order)]


class _Sampler:
    """Mixture of uniform elements, conjugates of prime-order class
    representatives, set stabilisers of unions of orbits of the current
    subgroup, and symmetric-group normaliser elements of powers of s."""

    def __init__(self, G: PermGroup, s: tuple, rng: random.Random):
        self.G = G
        self.s = s
        self.rng = rng
        self.reps = _prime_class_reps(G)
        self.s_cycles = [c for c in cycles_of(s)]
        self.order = element_order(s)
        self._norm_fail = 0
        self._divisors = [d for d in range(1, self.order) if self.order % d == 0]
        p = Permutation(s, check=False)
        self._powers = {d: (p**d).images for d in self._divisors}

    def uniform(self) -> tuple:
        return self.G.random_images(self.rng)

    def conjugate(self) -> tuple:
        if not self.reps:
            return self.uniform()
        r = self.reps[self.rng.randrange(len(self.reps))]
        return K.conj(r, self.uniform())

    def normaliser(self) -> tuple | None:
        """A random c in Sym(n) normalising <t>, t a random nontrivial power
        of s, returned only if c lies in G."""
        if self._norm_fail > 400:
            return None
        rng = self.rng
        n = self.G.degree
        o = self.order
        divs = self._divisors
        d = divs[rng.randrange(len(divs))]
        t = self._powers[d]
        to = o // d
        while True:
            k = rng.randrange(1, to) if to > 1 else 1
            if math.gcd(k, to) == 1:
                break
        # t^c = t^k: map each cycle of t onto a cycle of t^k of equal length
        by_len: dict[int, list[tuple]] = {}
        for cyc in cycles_of(t):
            by_len.setdefault(len(cyc), []).append(cyc)
        c = list(range(n))
        moved = set()
        for length, cyc_list in by_len.items():
            targets = cyc_list[:]
            rng.shuffle(targets)
            for a, b in zip(cyc_list, targets):
                # the cycle of t^k through b[0] is b[0], b[k], b[2k], ...
                start = rng.randrange(length)
                img = [b[(start + i * k) % length] for i in range(length)]
                for x, y in zip(a, img):
                    c[x] = y
                    moved.add(x)
        fixed = [x for x in range(n) if x not in moved]
        shuffled = fixed[:]
        rng.shuffle(shuffled)
        for x, y in zip(fixed, shuffled):
            c[x] = y
        c = tuple(c)
        if self.G.contains(c):
            self._norm_fail = 0
            return c
        self._norm_fail += 1
        return None

    def orbit_union(self, H: Subgroup | None) -> tuple | None:
        """A random element of G stabilising a random union of H-orbits
        (the route into intransitive overgroups)."""
        if H is None:
            return None
        labels = H.orbit_labels()
        reps = sorted(set(labels))
        if len(reps) < 2:
            return None
        rng = self.rng
        for _ in range(8):
            pick = {r for r in reps if rng.random() < 0.5}
            if 0 < len(pick) < len(reps):
                break
        else:
            return None
        inside = [x for x in range(len(labels)) if labels[x] in pick]
        outside = [x for x in range(len(labels)) if labels[x] not in pick]
        c = list(range(len(labels)))
        for part in (inside, outside):
            img = part[:]
            rng.shuffle(img)
            for x, y in zip(part, img):
                c[x] = y
        c = tuple(c)
        return c if self.G.contains(c) else None

    def draw(self, H: Subgroup | None = None) -> tuple:
        u = self.rng.random()
        if u < 0.25:
            return self.uniform()
        if u < 0.6:
            return self.conjugate()
        if u < 0.8:
            c = self.orbit_union(H)
            if c is None:
                c = self.orbit_union(H)
            return c if c is not None else self.conjugate()
        c = self.normaliser()
        return c if c is not None else self.conjugate()


# -- certified lattice -------------------------------------------------------


class _Lattice:
    """Memoised maximal-overgroup computation for one group."""

    def __init__(self, G: PermGroup, degree_cap: int = DEFAULT_DEGREE_CAP, seed: int = 0):
        self.G = G
        self.pool = SubgroupPool()
        self.maxes: dict[int, list[Subgroup]] = {}
        self.joins: dict[int, list[Subgroup]] = {}
        self.certified_max: set[int] = set()
        self.not_max: set[int] = set()
        self.degree_cap = degree_cap
        self.seed = seed
        self.cosets_seen = 0
        self.join_count = 0

    def intern(self, H: Subgroup) -> Subgroup:
        return self.pool.add(H)[0]

    def proper_joins(self, Kg: Subgroup, first_only: bool = False, budget: int | None = None) -> list[Subgroup]:
        """Distinct proper subgroups <K, g> over double coset reps g."""
        key = id(Kg)
        if key in self.joins:
            return self.joins[key]
        G = self.G
        sp = CosetSpace(G, Kg, self.degree_cap)
        self.cosets_seen += len(sp)
        if budget is not None and self.cosets_seen > budget:
            raise BudgetExceeded(f"coset budget {budget} exhausted")
        found = SubgroupPool()
        for orb in sp.orbits_under(Kg.gens):
            if orb[0] == 0:
                continue
            g = sp.reps[orb[0]]
            self.join_count += 1
            L = Subgroup(G, Kg.gens + [g], seed=self.seed, check=False)
            if L.is_whole():
                continue
            L = self.intern(L)
            found.add(L)
            if first_only:
                return [L]
        out = _minimal(found.items)
        self.joins[key] = out
        if out:
            self.not_max.add(key)
        else:
            self.certified_max.add(key)
        return out

    def is_maximal(self, H: Subgroup) -> bool:
        H = self.intern(H)
        if id(H) in self.certified_max:
            return True
        if id(H) in self.not_max:
            return False
        return not self.proper_joins(H)

    def maximal_overgroups(self, H: Subgroup, budget: int | None = None) -> list[Subgroup]:
        H = self.intern(H)
        key = id(H)
        if key in self.maxes:
            return self.maxes[key]
        joins = self.proper_joins(H, budget=budget)
        if not joins:
            res = [H]
        else:
            acc = SubgroupPool()
            for L in joins:
                for M in self.maximal_overgroups(L, budget):
                    acc.add(M)
            res = sorted(acc.items, key=lambda M: (-M.order, M.key()))
        self.maxes[key] = res
        return res

    def climb_to_maximal(self, H: Subgroup, sampler: _Sampler, tries: int = 30) -> Subgroup:
        """Random ascent from H, finished with exact leaf tests."""
        H = self.intern(H)
        G = self.G
        while True:
            stepped = False
            for _ in range(tries):
                g = sampler.draw(H)
                if H.contains(g):
                    continue
                L = join(H, g, seed=self.seed)
                if not L.is_whole():
                    H = self.intern(L)
                    stepped = True
                    break
            if stepped:
                continue
            joins = self.proper_joins(H)
            if not joins:
                return H
            H = joins[sampler.rng.randrange(len(joins))]


def _minimal(subs: Sequence[Subgroup]) -> list[Subgroup]:
    """Inclusion-minimal members.  If L1 <= L2 then every maximal
    subgroup above L2 is above L1, so only the minimal joins matter."""
    subs = sorted(subs, key=lambda H: (H.order, H.key()))
    out: list[Subgroup] = []
    for H in subs:
        if not any(L.order < H.order and H.order % L.order == 0 and H.contains_subgroup(L) for L in out):
            out.append(H)
    return out


def _maximal(subs: Sequence[Subgroup]) -> list[Subgroup]:
    subs = sorted(subs, key=lambda H: (-H.order, H.key()))
    out: list[Subgroup] = []
    for H in subs:
        if not any(L.order > H.order and L.contains_subgroup(H) for L in out):
            out.append(H)
    return out


def _lattice(G: PermGroup, degree_cap: int = DEFAULT_DEGREE_CAP) -> _Lattice:
    lat = getattr(G, "_overgroup_lattice", None)
    if lat is None or lat.degree_cap != degree_cap:
        lat = _Lattice(G, degree_cap, G.seed)
        G._overgroup_lattice = lat
    return lat


# -- estimated climb ---------------------------------------------------------


class _SampledLattice:
    """The certified recursion with sampled elements in place of double
    coset representatives.  Every new proper join is explored as soon as
    it appears; a node other than <s> itself is taken as maximal once
    ``stall`` consecutive draws give no new proper join, while <s> keeps
    drawing until the budget is spent or ``need`` overgroups are known."""

    def __init__(self, G: PermGroup, sampler: _Sampler, seed: int, stall: int, budget: int, need: int | None):
        self.G = G
        self.sampler = sampler
        self.seed = seed
        self.stall = stall
        self.budget = budget
        self.need = need
        self.used = 0
        self.pool = SubgroupPool()
        self.seen: set[int] = set()
        self.tops = SubgroupPool()

    def satisfied(self) -> bool:
        return self.need is not None and len(_maximal(self.tops.items)) >= self.need

    def explore(self, H: Subgroup, root: bool = False) -> None:
        H = self.pool.add(H)[0]
        if id(H) in self.seen:
            return
        self.seen.add(id(H))
        local: set[int] = set()
        quiet = 0
        while self.used < self.budget and not self.satisfied():
            if not root and quiet >= self.stall:
                break
            g = self.sampler.draw(H)
            self.used += 1
            if H.contains(g):
                quiet += 1
                continue
            L = join(H, g, seed=self.seed)
            if L.is_whole():
                quiet += 1
                continue
            L = self.pool.add(L)[0]
            if id(L) in local:
                quiet += 1
                continue
            local.add(id(L))
            quiet = 0
            self.explore(L)
        if not local and not root:
            self.tops.add(H)


def _estimated(G: PermGroup, s: tuple, budget: int, seed: int, need: int | None = None,
               stall: int = 1500) -> tuple[list[Subgroup], int]:
    rng = derive_rng(seed, "estimated", s)
    lat = _SampledLattice(G, _Sampler(G, s, rng), seed, stall, budget, need)
    lat.explore(Subgroup(G, [s], check=False), root=True)
    return _maximal(lat.tops.items), lat.used


# -- public API --------------------------------------------------------------


def maximal_overgroups(
    G: PermGroup,
    s,
    mode: str = CERTIFIED,
    budget: int | None = None,
    seed: int = 0,
    degree_cap: int = DEFAULT_DEGREE_CAP,
    need: int | None = None,
) -> OvergroupSet:
    """The maximal subgroups of ``G`` containing ``s``.

    ``budget`` bounds the number of cosets visited (certified mode) or of
    sampled elements (estimated mode).  ``need`` lets the estimated search
    stop once that many overgroups are known.
    """
    s = images_of(s)
    if K.is_identity(s):
        raise ValueError("s must not be the identity")
    if not G.contains(s):
        raise ValueError(f"{format_cycles(s)} is not in {G.name or 'G'}")
    if mode == CERTIFIED:
        if G.order > G.cap:
            raise EnumerationCapError(G.order, G.cap)
        lat = _lattice(G, degree_cap)
        before = lat.cosets_seen
        S = Subgroup(G, [s], check=False)
        if S.is_whole():
            return OvergroupSet(G, s, [], CERTIFIED, 0, {"cyclic": True})
        res = lat.maximal_overgroups(S, budget)
        return OvergroupSet(G, s, list(res), CERTIFIED, lat.cosets_seen - before, {"lattice_size": len(lat.pool)})
    if mode == ESTIMATED:
        subs, used = _estimated(G, s, budget or DEFAULT_CLIMB_BUDGET, seed, need)
        return OvergroupSet(G, s, subs, ESTIMATED, used)
    raise ValueError(f"unknown mode {mode!r}")


def certified_maximal_sample(G: PermGroup, s, need: int, restarts: int, seed: int = 0) -> list[Subgroup]:
    """Up to ``need`` distinct certified maximal overgroups of ``s`` found by
    random ascents (a lower bound for |M(G,s)|, not the full set)."""
    s = images_of(s)
    lat = _lattice(G)
    rng = derive_rng(seed, "quick", s)
    sampler = _Sampler(G, s, rng)
    S = Subgroup(G, [s], check=False)
    found = SubgroupPool()
    quiet = 0
    for _ in range(restarts):
        M = lat.climb_to_maximal(S, sampler)
        _, new = found.add(M)
        quiet = 0 if new else quiet + 1
        if len(found) >= need or quiet > 2 * need + 4:
            break
    return found.items


@dataclass
class MuResult:
    value: int
    witness: tuple
    witness_label: str
    mode: str
    per_class: dict
    overgroups: OvergroupSet
    ties: list = field(default_factory=list)

    @property
    def certified(self) -> bool:
        return self.mode == CERTIFIED

    def tie_shapes(self) -> list[tuple[int, ...]]:
        return [shape for _, shape in self.ties]

    def to_json(self) -> dict:
        return {
            "mu": self.value,
            "mode": self.mode,
            "witness": format_cycles(self.witness),
            "witness_class": self.witness_label,
            "witness_shape": list(_shape(self.witness)),
            "overgroup_orders": self.overgroups.orders(),
            "attained_by": [{"class": lab, "shape": list(sh)} for lab, sh in self.ties],
            "per_class": self.per_class,
        }


def _shape(p: tuple) -> tuple[int, ...]:
    return tuple(sorted((len(c) for c in cycles_of(p)), reverse=True))


def mu(G: PermGroup, mode: str = CERTIFIED, budget: int | None = None, seed: int = 0, ties: bool = False) -> MuResult:
    """min over nonidentity s of |M(G, s)|, one representative per class.

    Certified: the first class (by decreasing element order) gets the full
    computation; each later class first tries to exhibit enough certified
    maximal overgroups to rule it out, and falls back to the full
    computation otherwise.  With ``ties`` every class attaining the
    minimum is determined (more full computations).
    """
    tab = G.class_table()
    classes = sorted(tab.classes[1:], key=lambda c: (-c.order, c.index))
    best = None
    best_set = None
    best_cls = None
    per: dict = {}
    counts: dict[str, int] = {}
    for c in classes:
        s = c.rep
        if mode == CERTIFIED:
            if best is not None:
                need = best + 1 if ties else best
                quick = certified_maximal_sample(G, s, need, restarts=6 * need + 12, seed=seed)
                if len(quick) >= need:
                    per[c.label] = {"at_least": len(quick)}
                    continue
            ov = maximal_overgroups(G, s, CERTIFIED, budget, seed)
            per[c.label] = {"exact": len(ov)}
        else:
            need = None if best is None else (best + 1 if ties else best)
            ov = maximal_overgroups(G, s, ESTIMATED, budget, seed, need=need)
            per[c.label] = {"found": len(ov)}
        counts[c.label] = len(ov)
        if len(ov) and (best is None or len(ov) < best):
            best, best_set, best_cls = len(ov), ov, c
        if best == 1 and not ties:
            break
    if best is None:
        raise ValueError("group has no nonidentity class with a proper overgroup (cyclic?)")
    tied = [(c.label, _shape(c.rep)) for c in classes if counts.get(c.label) == best]
    return MuResult(best, best_cls.rep, best_cls.label, mode, per, best_set, tied)


def overgroup_count_identity(G: PermGroup, s, H: Subgroup, degree_cap: int = DEFAULT_DEGREE_CAP) -> tuple[int, Fraction, bool]:
    """(number of G-conjugates of H containing s, fpr(s, G/H)*|G:H|,
    whether N_G(H) = H).  The first two agree when H is self-normalising."""
    s = images_of(s)
    if H.is_whole():
        raise ValueError("H must be proper")
    spH = CosetSpace(G, H, degree_cap)
    normal = [r for r in spH.reps if all(H.contains(K.conj(h, r)) for h in H.gens)]
    N = Subgroup(G, H.gens + [r for r in normal if not K.is_identity(r)], check=False)
    spN = spH if N.order == H.order else CosetSpace(G, N, degree_cap)
    # s lies in H^r = r^-1 H r iff r s r^-1 lies in H
    count = sum(1 for r in spN.reps if H.contains(K.mul(K.mul(r, s), K.inv(r))))
    fixed = sum(1 for r in spH.reps if H.contains(K.mul(K.mul(r, s), K.inv(r))))
    return count, Fraction(fixed, len(spH)) * len(spH), N.order == H.order
