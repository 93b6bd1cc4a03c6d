"""Coset actions, fixed point ratios and base sizes.

Right cosets ``H g`` are identified by a canonical element (the member of
the coset whose images of H's base points are least, level by level),
which is unique per coset, so no transversal choice leaks into the keys.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from unidom import kernels as K
from unidom.chain import StabilizerChain, build_chain, chain_with_base
from unidom.group import PermGroup, images_of
from unidom.perm import Permutation, cycle_type, format_cycles
from unidom.structure import Subgroup

DEFAULT_DEGREE_CAP = 100_000
DEFAULT_NODE_BUDGET = 100_000_000


class DegreeCapError(RuntimeError):
    def __init__(self, degree: int, cap: int):
        super().__init__(f"coset space of size {degree} exceeds the degree cap {cap}")
        self.degree = degree
        self.cap = cap


class CosetSpace:
    """Right cosets of ``H`` in ``G`` with canonical keys."""

    def __init__(self, G: PermGroup, H: Subgroup | StabilizerChain, cap: int = DEFAULT_DEGREE_CAP):
        self.G = G
        ch = H.chain if isinstance(H, Subgroup) else H
        self.hchain = ch
        index = G.order // ch.order
        if index > cap:
            raise DegreeCapError(index, cap)
        self._b, self._o, self._t = ch.base, ch.orbits, ch.trans
        ident = G.identity
        self.reps = [ident]
        self.keys = {self.canon(ident): 0}
        i = 0
        while i < len(self.reps):
            r = self.reps[i]
            for x in G.gens:
                y = K.mul(r, x)
                k = self.canon(y)
                if k not in self.keys:
                    self.keys[k] = len(self.reps)
                    self.reps.append(y)
            i += 1
        if len(self.reps) != index:
            raise RuntimeError(f"found {len(self.reps)} cosets, expected {index}")

    def canon(self, g: tuple) -> tuple:
        return K.coset_canon(self._b, self._o, self._t, g)

    def __len__(self) -> int:
        return len(self.reps)

    def locate(self, g) -> int:
        return self.keys[self.canon(images_of(g))]

    def act(self, i: int, x: tuple) -> int:
        """Index of the coset ``H r_i x``."""
        return self.keys[self.canon(K.mul(self.reps[i], x))]

    def image(self, x) -> tuple:
        x = images_of(x)
        return tuple(self.act(i, x) for i in range(len(self.reps)))

    def orbits_under(self, gens: Sequence[tuple]) -> list[list[int]]:
        """Orbits on cosets of the group generated by ``gens`` (acting on
        the right).  Orbit representatives index double cosets ``H g L``."""
        seen = [False] * len(self.reps)
        out = []
        for i in range(len(self.reps)):
            if seen[i]:
                continue
            seen[i] = True
            orb = [i]
            j = 0
            while j < len(orb):
                for x in gens:
                    k = self.act(orb[j], x)
                    if not seen[k]:
                        seen[k] = True
                        orb.append(k)
                j += 1
            out.append(orb)
        return out


@dataclass
class CosetAction:
    """``G`` acting on the right cosets of ``H``."""

    parent: PermGroup
    H: Subgroup
    space: CosetSpace
    gen_images: list[tuple]
    _group: PermGroup | None = field(default=None, repr=False)

    @property
    def degree(self) -> int:
        return len(self.space)

    @property
    def transversal(self) -> list[tuple]:
        return self.space.reps

    def image(self, x) -> tuple:
        return self.space.image(x)

    def group(self) -> PermGroup:
        """The image as a permutation group on ``degree`` points."""
        if self._group is None:
            G = self.parent
            # faithful for core-free H; the chain is then checked against |G|
            ch = build_chain(self.gen_images, self.degree, seed=G.seed, base_prefix=(0,), target_order=G.order)
            if ch.order != G.order:
                ch = build_chain(self.gen_images, self.degree, seed=G.seed, base_prefix=(0,))
            self._group = PermGroup(self.gen_images, self.degree, name=f"{G.name}/H", seed=G.seed, cap=G.cap, chain=ch)
        return self._group

    def fixed_points(self, x) -> int:
        x = images_of(x)
        H = self.H
        n = 0
        for r in self.space.reps:
            if H.contains(K.mul(K.mul(r, x), K.inv(r))):
                n += 1
        return n

    def is_transitive(self) -> bool:
        return len(set(K.orbits(self.gen_images, self.degree))) == 1

    def rank(self) -> int:
        """Number of H-orbits on cosets (2 means 2-transitive)."""
        return len(self.space.orbits_under(self.H.gens))


def coset_action(G: PermGroup, H: Subgroup, cap: int = DEFAULT_DEGREE_CAP) -> CosetAction:
    sp = CosetSpace(G, H, cap)
    imgs = [sp.image(x) for x in G.gens]
    return CosetAction(G, H, sp, imgs)


# -- fixed point ratios ------------------------------------------------------


def fpr(x, action: CosetAction, dual: bool = False) -> Fraction:
    """Fixed point ratio of ``x`` on the cosets.

    With ``dual`` the value is recomputed as ``|x^G & H| / |x^G|`` by
    sweeping H against the class table and the two are compared.
    """
    v = Fraction(action.fixed_points(x), action.degree)
    if dual:
        w = fpr_by_class(x, action.parent, action.H)
        if v != w:
            raise AssertionError(f"fpr mismatch: cosets give {v}, class sweep gives {w}")
    return v


def fpr_by_class(x, G: PermGroup, H: Subgroup) -> Fraction:
    tab = G.class_table()
    c = tab.classify(images_of(x))
    hits = sum(1 for h in H.elements() if tab.classify(h) == c)
    return Fraction(hits, tab[c].size)


def fpr_ksets(shape: Sequence[int], n: int, k: int) -> Fraction:
    """fpr of an element of cycle type ``shape`` on k-subsets of n points.

    ``shape`` may list fixed points or omit them.  For ``[d^r, 1^(n-dr)]``
    the closed form sum_i C(r,i) C(n-dr, k-id) / C(n,k) is used; otherwise
    each cycle lies wholly inside or outside a fixed k-set, which gives a
    generating-function count.
    """
    parts = [int(x) for x in shape]
    if any(x < 1 for x in parts) or sum(parts) > n:
        raise ValueError(f"shape {list(shape)} does not fit in {n} points")
    if not 1 <= k <= n:
        raise ValueError(f"k={k} out of range for n={n}")
    parts += [1] * (n - sum(parts))
    total = math.comb(n, k)
    moving = [x for x in parts if x > 1]
    if len(set(moving)) <= 1:
        d = moving[0] if moving else 1
        r = len(moving)
        f = n - d * r
        if d == 1:
            return Fraction(1)
        fixed = sum(math.comb(r, i) * math.comb(f, k - i * d) for i in range(r + 1) if 0 <= k - i * d <= f)
        return Fraction(fixed, total)
    return Fraction(ksets_fixed_count(parts, k), total)


def ksets_fixed_count(parts: Sequence[int], k: int) -> int:
    coeffs = [1] + [0] * k
    for x in parts:
        for j in range(k, x - 1, -1):
            coeffs[j] += coeffs[j - x]
    return coeffs[k]


def kset_action(n: int, k: int, gens: Sequence[tuple]) -> tuple[list[tuple[int, ...]], list[tuple]]:
    """The action of ``gens`` (degree n) on the k-subsets of range(n)."""
    sets = list(combinations(range(n), k))
    pos = {s: i for i, s in enumerate(sets)}
    imgs = [tuple(pos[tuple(sorted(g[a] for a in s))] for s in sets) for g in gens]
    return sets, imgs


# -- base sizes --------------------------------------------------------------


def log_bound(order: int, degree: int) -> int:
    """Least b with degree**b >= order (the bound b >= log|G|/log|Omega|)."""
    if order <= 1:
        return 0
    if degree <= 1:
        raise ValueError("degree must be at least 2 for a nontrivial group")
    b, p = 0, 1
    while p < order:
        p *= degree
        b += 1
    return b


@dataclass
class BaseCertificate:
    degree: int
    b: int | None
    witness: tuple[int, ...]
    lower: int
    upper: int
    lower_evidence: str
    strategy: str
    nodes: int = 0
    conclusive: bool = True

    def to_json(self) -> dict:
        return {
            "degree": self.degree,
            "b": self.b,
            "witness": [p + 1 for p in self.witness],
            "lower": self.lower,
            "upper": self.upper,
            "lower_evidence": self.lower_evidence,
            "strategy": self.strategy,
            "nodes": self.nodes,
            "conclusive": self.conclusive,
        }


class NodeBudgetExceeded(RuntimeError):
    pass


class _Stab:
    """Pointwise stabilizer with its chain and orbit partition."""

    __slots__ = ("chain", "order", "label", "sizes")

    def __init__(self, chain: StabilizerChain, degree: int):
        self.chain = chain
        self.order = chain.order
        self.label = K.orbits(chain.sgs or chain.gens, degree)
        self.sizes = Counter(self.label)

    def candidates(self) -> list[int]:
        """One point per nontrivial orbit, biggest orbit first, ties by point."""
        reps = [(-sz, p) for p, sz in self.sizes.items() if sz > 1]
        reps.sort()
        return [p for _, p in reps]

    def child(self, p: int, degree: int, seed: int) -> "_Stab":
        ch = chain_with_base(self.chain, [p], seed)
        sub = build_chain(ch.level_gens[1] if len(ch.level_gens) > 1 else [], degree, seed=seed, target_order=ch.order // len(ch.orbits[0]))
        return _Stab(sub, degree)


def _action_group(action) -> PermGroup:
    return action.group() if isinstance(action, CosetAction) else action


def base_size(action, strategy: str = "exact", node_budget: int = DEFAULT_NODE_BUDGET, seed: int = 0) -> BaseCertificate:
    """Base size of a permutation group (a PermGroup or a CosetAction).

    ``exact`` runs iterative deepening over orbit representatives of the
    current stabilizer, pruning when the stabilizer is too big to be killed
    by the remaining points; ``greedy`` gives an upper bound; ``log`` the
    order bound alone.
    """
    G = _action_group(action)
    n = G.degree
    lower = log_bound(G.order, n)
    if G.order == 1:
        return BaseCertificate(n, 0, (), 0, 0, "exhausted_smaller", strategy)
    if strategy == "log":
        return BaseCertificate(n, None, (), lower, n, "log_bound", strategy, conclusive=False)
    gw = _greedy(G, seed)
    if strategy == "greedy":
        return BaseCertificate(n, None, gw, lower, len(gw), "log_bound", strategy, conclusive=False)
    if strategy != "exact":
        raise ValueError(f"unknown strategy {strategy!r}")
    root = _Stab(G.chain, n)
    nodes = [0]
    best_lower = max(lower, 1)
    try:
        for b in range(best_lower, len(gw)):
            w = _search(root, b, (), n, seed, nodes, node_budget)
            if w is not None:
                return BaseCertificate(n, b, w, b, b, "exhausted_smaller", strategy, nodes[0])
            best_lower = b + 1
    except NodeBudgetExceeded:
        return BaseCertificate(n, None, gw, best_lower, len(gw), "exhausted_smaller" if best_lower > lower else "log_bound", strategy, nodes[0], conclusive=False)
    b = len(gw)
    ev = "exhausted_smaller" if b > lower else "log_bound"
    return BaseCertificate(n, b, gw, b, b, ev, strategy, nodes[0])


def _search(st: _Stab, remaining: int, prefix: tuple, n: int, seed: int, nodes: list, budget: int):
    if st.order == 1:
        return prefix
    if remaining == 0:
        return None
    biggest = max(st.sizes.values())
    if biggest**remaining < st.order:
        return None
    for p in st.candidates():
        nodes[0] += 1
        if nodes[0] > budget:
            raise NodeBudgetExceeded()
        if remaining == 1:
            # the last point must have a regular orbit
            if st.sizes[st.label[p]] == st.order:
                return prefix + (p,)
            continue
        w = _search(st.child(p, n, seed), remaining - 1, prefix + (p,), n, seed, nodes, budget)
        if w is not None:
            return w
    return None


def _greedy(G: PermGroup, seed: int) -> tuple[int, ...]:
    st = _Stab(G.chain, G.degree)
    out: list[int] = []
    while st.order > 1:
        p = st.candidates()[0]
        out.append(p)
        st = st.child(p, G.degree, seed)
    return tuple(out)


def verify_base(G: PermGroup, points: Sequence[int], seed: int = 0) -> bool:
    from unidom.chain import stabilizer_generators

    _, order = stabilizer_generators(G.chain, list(points), seed)
    return order == 1


# -- S_n on k-subsets --------------------------------------------------------


def ksets_base_size(n: int, k: int) -> tuple[int, tuple[tuple[int, ...], ...]]:
    """Exact base size of S_n on k-subsets, with a witness.

    The pointwise stabilizer of k-sets A_1..A_t is the Young subgroup of
    the partition of range(n) by membership pattern, so a base is a family
    of k-sets leaving every part of size at most one.  The search branches
    over how many points each current part contributes to the next set,
    which enumerates k-sets up to the stabilizer.
    """
    if not 1 <= k < n:
        raise ValueError("need 1 <= k < n")
    b = 0
    while True:
        w = _kset_search([n], k, b)
        if w is not None:
            return b, _kset_witness(n, w)
        b += 1


def _kset_search(parts: list[int], k: int, remaining: int):
    if all(p <= 1 for p in parts):
        return []
    if remaining == 0:
        return None
    # each new set at most doubles the number of parts
    if len(parts) * 2**remaining < sum(parts):
        return None
    parts = sorted(parts, reverse=True)
    for split in _splits(parts, k):
        new = []
        for p, a in zip(parts, split):
            new.extend(x for x in (a, p - a) if x)
        rest = _kset_search(new, k, remaining - 1)
        if rest is not None:
            return [(tuple(parts), split)] + rest
    return None


def _splits(parts: list[int], k: int):
    """Ways to take a_i points from part i with sum k (equal parts
    canonicalised to nonincreasing takes)."""
    out = []

    def rec(i, left, acc):
        if i == len(parts):
            if left == 0:
                out.append(tuple(acc))
            return
        p = parts[i]
        hi = min(p, left)
        if i and parts[i - 1] == p:
            hi = min(hi, acc[-1])
        if sum(parts[i:]) < left:
            return
        for a in range(hi, -1, -1):
            acc.append(a)
            rec(i + 1, left - a, acc)
            acc.pop()

    rec(0, k, [])
    return out


def _kset_witness(n: int, steps) -> tuple[tuple[int, ...], ...]:
    """Concrete k-sets realising the recorded splits."""
    blocks = [list(range(n))]
    sets = []
    for parts, split in steps:
        blocks.sort(key=len, reverse=True)
        chosen = []
        new_blocks = []
        for blk, a in zip(blocks, split):
            chosen.extend(blk[:a])
            new_blocks.extend(x for x in (blk[:a], blk[a:]) if x)
        sets.append(tuple(sorted(chosen)))
        blocks = new_blocks
    return tuple(sets)


def halasi_bracket(n: int, k: int) -> tuple[int, int]:
    """(ceil(log2 n), ceil(log_m n) * (m - 1)) with m = ceil(n/k)."""
    lo = (n - 1).bit_length()
    m = -(-n // k)
    e = 0
    p = 1
    while p < n:
        p *= m
        e += 1
    return lo, e * (m - 1)
