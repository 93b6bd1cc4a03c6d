"""Conjugacy class tables and subgroup objects.

Two table modes: ``enumerated`` (conjugation orbits over the full element
list) and ``cycle_type`` for groups known to be A_n or S_n, where classes
are cycle types and a split A_n class is told apart by the parity of an
S_n-conjugator from its first representative.  The centralizer in S_n of
an element with distinct odd cycle lengths lies in A_n, so that parity is
well defined.
"""

from __future__ import annotations

import math
import string
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

from unidom import kernels as K
from unidom.chain import EnumerationCapError, StabilizerChain, build_chain
from unidom.field import is_prime
from unidom.group import PermGroup, images_of
from unidom.perm import Permutation, cycle_type, cycles_of, element_order, format_cycles, sign

CENSUS_BOUND = 2000


class TableUnavailable(RuntimeError):
    pass


@dataclass(frozen=True)
class ConjugacyClass:
    index: int
    rep: tuple
    size: int
    order: int
    label: str
    cycle_type: tuple
    group_order: int

    @property
    def centralizer_order(self) -> int:
        return self.group_order // self.size

    def rep_perm(self) -> Permutation:
        return Permutation(self.rep, check=False)

    def to_json(self) -> dict:
        return {"label": self.label, "order": self.order, "size": self.size, "rep": format_cycles(self.rep)}


def _letters(k: int) -> str:
    s = ""
    k += 1
    while k:
        k, r = divmod(k - 1, 26)
        s = string.ascii_lowercase[r] + s
    return s


def _sorted_classes(group_order: int, raw: list[tuple[tuple, int]]) -> list[ConjugacyClass]:
    """Canonical order: element order, then size, then representative."""
    keyed = sorted(((element_order(r), n, r) for r, n in raw))
    out = []
    seen: Counter = Counter()
    for i, (o, n, r) in enumerate(keyed):
        label = f"{o}{_letters(seen[o])}"
        seen[o] += 1
        out.append(ConjugacyClass(i, r, n, o, label, cycle_type(r), group_order))
    return out


class ConjugacyTable:
    def __init__(self, group: PermGroup, mode: str, classes: list[ConjugacyClass], element_class=None):
        self.group = group
        self.mode = mode
        self.classes = classes
        self._element_class = element_class
        self._power: dict[tuple[int, int], int] = {}
        self._by_label = {c.label: c for c in classes}
        if mode == "cycle_type":
            self._by_shape: dict[tuple, list[int]] = {}
            for c in classes:
                self._by_shape.setdefault(c.cycle_type, []).append(c.index)

    def __len__(self) -> int:
        return len(self.classes)

    def __iter__(self):
        return iter(self.classes)

    def __getitem__(self, i: int) -> ConjugacyClass:
        return self.classes[i]

    def by_label(self, label: str) -> ConjugacyClass:
        try:
            return self._by_label[label]
        except KeyError:
            raise KeyError(f"no class {label!r}; have {', '.join(self._by_label)}") from None

    @property
    def has_element_index(self) -> bool:
        return self._element_class is not None

    def classify(self, x) -> int:
        """Index of the class containing ``x``."""
        x = images_of(x)
        if self._element_class is not None:
            i = self.group.index().get(x)
            if i is None:
                raise ValueError(f"{format_cycles(x)} is not in {self.group.name or 'the group'}")
            return self._element_class[i]
        ct = cycle_type(x)
        idx = self._by_shape.get(ct)
        if idx is None:
            raise ValueError(f"no class with cycle type {ct}")
        if len(idx) == 1:
            return idx[0]
        rep = self.classes[idx[0]].rep
        c = _shape_conjugator(rep, x)
        return idx[0] if sign(c) == 1 else idx[1]

    def same_class(self, x, y) -> bool:
        return self.classify(x) == self.classify(y)

    def power_map(self, c: int, k: int) -> int:
        key = (c, k % self.classes[c].order)
        if key not in self._power:
            rep = Permutation(self.classes[c].rep, check=False)
            self._power[key] = self.classify((rep ** key[1]).images)
        return self._power[key]

    def identity_class(self) -> int:
        return 0

    def class_elements(self, c: int, cap: int | None = None) -> list[tuple]:
        """All elements of class ``c``."""
        if self._element_class is not None:
            els = self.group.elements()
            return [els[i] for i, k in enumerate(self._element_class) if k == c]
        return conjugacy_orbit(self.group, self.classes[c].rep, cap)

    def check(self) -> None:
        n = self.group.order
        assert sum(c.size for c in self.classes) == n
        for c in self.classes:
            assert n % c.size == 0
            assert element_order(c.rep) == c.order

    def to_json(self) -> list[dict]:
        return [c.to_json() for c in self.classes]


def _shape_conjugator(rep: tuple, x: tuple) -> tuple:
    """Some c with ``c^-1 rep c == x`` (cycle types must agree)."""
    n = len(rep)
    rc = sorted(_all_cycles(rep), key=len)
    xc = sorted(_all_cycles(x), key=len)
    c = [0] * n
    for a, b in zip(rc, xc):
        for i, j in zip(a, b):
            c[i] = j
    return tuple(c)


def _all_cycles(p: Sequence[int]) -> list[tuple[int, ...]]:
    fixed = [(i,) for i in range(len(p)) if p[i] == i]
    return cycles_of(p) + fixed


def conjugacy_orbit(G: PermGroup, x, cap: int | None = None) -> list[tuple]:
    """The G-class of ``x`` by breadth-first conjugation with generators."""
    x = images_of(x)
    seen = {x: None}
    out = [x]
    i = 0
    while i < len(out):
        y = out[i]
        for g in G.gens:
            z = K.conj(y, g)
            if z not in seen:
                seen[z] = None
                out.append(z)
                if cap is not None and len(out) > cap:
                    raise EnumerationCapError(len(out), cap)
        i += 1
    return out


def _partitions(n: int, maxpart: int | None = None) -> Iterable[tuple[int, ...]]:
    if maxpart is None:
        maxpart = n
    if n == 0:
        yield ()
        return
    for k in range(min(n, maxpart), 0, -1):
        for rest in _partitions(n - k, k):
            yield (k,) + rest


def _shape_class_size(n: int, shape: tuple[int, ...]) -> int:
    den = 1
    for k, m in Counter(shape).items():
        den *= k**m * math.factorial(m)
    return math.factorial(n) // den


def is_split_shape(shape: Sequence[int]) -> bool:
    """Cycle lengths (fixed points included) all odd and distinct."""
    return all(x % 2 for x in shape) and len(set(shape)) == len(shape)


def _cycle_type_table(G: PermGroup) -> ConjugacyTable:
    kind, n = G.family
    from unidom.atlas import element_of_shape

    raw = []
    for shape in _partitions(n):
        even = sum(x - 1 for x in shape) % 2 == 0
        if kind == "alt" and not even:
            continue
        size = _shape_class_size(n, shape)
        rep = element_of_shape(n, shape, ambient="sym").images
        if kind == "alt" and is_split_shape(shape) and n > 1:
            t = list(range(n))
            t[0], t[1] = 1, 0
            raw.append((rep, size // 2))
            raw.append((K.conj(rep, tuple(t)), size // 2))
        else:
            raw.append((rep, size))
    classes = _sorted_classes(G.order, raw)
    # the first representative of a split pair must be the parity anchor
    tab = ConjugacyTable(G, "cycle_type", classes)
    for shape, idx in tab._by_shape.items():
        if len(idx) == 2:
            a, b = idx
            anchor = element_of_shape(n, shape, ambient="sym").images
            if classes[a].rep != anchor:
                idx.reverse()
    return tab


def _enumerated_table(G: PermGroup) -> ConjugacyTable:
    els = G.elements()
    index = G.index()
    N = len(els)
    cls = [-1] * N
    raw = []
    gens = G.gens
    nc = 0
    for i in range(N):
        if cls[i] >= 0:
            continue
        cls[i] = nc
        stack = [els[i]]
        best = els[i]
        size = 1
        while stack:
            y = stack.pop()
            for g in gens:
                z = K.conj(y, g)
                j = index[z]
                if cls[j] < 0:
                    cls[j] = nc
                    stack.append(z)
                    size += 1
                    if z < best:
                        best = z
        raw.append((best, size, nc))
        nc += 1
    classes = _sorted_classes(G.order, [(r, s) for r, s, _ in raw])
    remap = {}
    pos = {c.rep: c.index for c in classes}
    for r, _s, old in raw:
        remap[old] = pos[r]
    element_class = [remap[c] for c in cls]
    return ConjugacyTable(G, "enumerated", classes, element_class)


def conjugacy_classes(G: PermGroup, mode: str | None = None) -> ConjugacyTable:
    """Class table of ``G``.

    A_n and S_n (``G.family``) get the cycle-type table unless ``mode``
    asks for enumeration; any other group must be enumerable.
    """
    fam = G.family
    if mode is None:
        mode = "cycle_type" if fam and fam[0] in ("alt", "sym") and G.order > 1 else "enumerated"
    if mode == "cycle_type":
        if not fam or fam[0] not in ("alt", "sym"):
            raise TableUnavailable("cycle_type tables need a group flagged as A_n or S_n")
        return _cycle_type_table(G)
    if G.order > G.cap:
        raise TableUnavailable(
            f"{G.name or 'group'} of order {G.order} exceeds the enumeration cap {G.cap} and is not A_n/S_n"
        )
    return _enumerated_table(G)


def prime_order_class_reps(G: PermGroup) -> list[tuple[Permutation, int]]:
    tab = G.class_table()
    return [(c.rep_perm(), c.size) for c in tab if is_prime(c.order)]


def power_covering_classes(G: PermGroup) -> list[ConjugacyClass]:
    """Classes whose powers reach every nonidentity element.

    Greedy by decreasing element order: a class is taken unless it is
    already a power of a taken class.
    """
    tab = G.class_table()
    covered: set[int] = set()
    chosen = []
    for c in sorted(tab.classes[1:], key=lambda c: (-c.order, c.index)):
        if c.index in covered:
            continue
        chosen.append(c)
        for k in range(1, c.order):
            covered.add(tab.power_map(c.index, k))
    return chosen


def power_covering_reps(G: PermGroup) -> list[Permutation]:
    return [c.rep_perm() for c in power_covering_classes(G)]


# -- subgroups ---------------------------------------------------------------


class Subgroup:
    """A subgroup of ``parent`` given by generators, with its own chain."""

    def __init__(self, parent: PermGroup, gens: Iterable, chain: StabilizerChain | None = None, seed: int = 0, check: bool = True):
        self.parent = parent
        gl = [images_of(g) for g in gens]
        self.gens = list(dict.fromkeys(g for g in gl if not K.is_identity(g)))
        if check:
            for g in self.gens:
                if not parent.contains(g):
                    raise ValueError(f"{format_cycles(g)} is not in {parent.name or 'the parent group'}")
        self.chain = chain or build_chain(self.gens, parent.degree, seed=seed, stop_at_order=parent.order)
        if parent.order % self.chain.order:
            raise ValueError("subgroup order does not divide the parent order")
        self._fp = None
        self._orbits = None
        self._labels = None

    @property
    def order(self) -> int:
        return self.chain.order

    @property
    def index(self) -> int:
        return self.parent.order // self.order

    @property
    def degree(self) -> int:
        return self.parent.degree

    def is_whole(self) -> bool:
        return self.order == self.parent.order

    def contains(self, g) -> bool:
        return self.chain.contains(images_of(g))

    __contains__ = contains

    def orbit_labels(self) -> tuple[int, ...]:
        """Least point of the orbit of each point."""
        if self._labels is None:
            self._labels = tuple(K.orbits(self.gens, self.degree))
        return self._labels

    def orbit_lengths(self) -> tuple[int, ...]:
        if self._orbits is None:
            self._orbits = tuple(sorted(Counter(self.orbit_labels()).values(), reverse=True))
        return self._orbits

    def key(self) -> tuple:
        """Cheap invariant used to bucket subgroups before equality tests."""
        return (self.order, self.orbit_labels())

    def fingerprint(self) -> tuple:
        """``(order, orbit lengths, element-order census)``; the census is
        only taken for orders up to CENSUS_BOUND and is ``None`` above."""
        if self._fp is None:
            census = None
            if self.order <= CENSUS_BOUND:
                census = tuple(sorted(Counter(element_order(g) for g in self.chain.iter_images()).items()))
            self._fp = (self.order, self.orbit_lengths(), census)
        return self._fp

    def elements(self, cap: int | None = None):
        return self.chain.iter_images(cap if cap is not None else self.parent.cap)

    def contains_subgroup(self, other: "Subgroup") -> bool:
        return other.order <= self.order and self.order % other.order == 0 and all(self.contains(g) for g in other.gens)

    def conjugate(self, g) -> "Subgroup":
        g = images_of(g)
        return Subgroup(self.parent, [K.conj(h, g) for h in self.gens], check=False)

    def generators(self) -> list[Permutation]:
        return [Permutation(g, check=False) for g in self.gens]

    def to_json(self) -> dict:
        return {"order": self.order, "index": self.index, "generators": [format_cycles(g) for g in self.gens]}

    def __repr__(self) -> str:
        return f"<Subgroup order={self.order} index={self.index} of {self.parent.name or 'G'}>"


def join(H: Subgroup, g, seed: int = 0) -> Subgroup:
    """``<H, g>`` with a fresh chain."""
    g = images_of(g)
    if H.contains(g):
        return H
    return Subgroup(H.parent, H.gens + [g], seed=seed, check=False)


def subgroup_equal(H: Subgroup, L: Subgroup) -> bool:
    if H is L:
        return True
    if H.order != L.order:
        return False
    return all(L.contains(g) for g in H.gens) and all(H.contains(g) for g in L.gens)


def intersection_is_trivial(groups: Sequence[Subgroup], cap: int | None = None) -> bool:
    """Whether the intersection of ``groups`` is trivial.

    Enumerates the smallest subgroup and sifts its elements through the
    others, stopping at the first common nonidentity element.
    """
    if not groups:
        raise ValueError("empty list")
    gs = sorted(groups, key=lambda h: h.order)
    small, rest = gs[0], gs[1:]
    if small.order == 1:
        return True
    if cap is None:
        cap = small.parent.cap
    for g in small.chain.iter_images(cap):
        if K.is_identity(g):
            continue
        if all(h.contains(g) for h in rest):
            return False
    return True


class SubgroupPool:
    """Deduplicating store of subgroups (bucket by key, confirm by membership)."""

    def __init__(self):
        self._buckets: dict[tuple, list[Subgroup]] = {}
        self.items: list[Subgroup] = []

    def find(self, H: Subgroup) -> Subgroup | None:
        for L in self._buckets.get(H.key(), ()):
            if subgroup_equal(H, L):
                return L
        return None

    def add(self, H: Subgroup) -> tuple[Subgroup, bool]:
        """Returns the stored copy and whether ``H`` was new."""
        old = self.find(H)
        if old is not None:
            return old, False
        self._buckets.setdefault(H.key(), []).append(H)
        self.items.append(H)
        return H, True

    def __len__(self) -> int:
        return len(self.items)

    def __iter__(self):
        return iter(self.items)
