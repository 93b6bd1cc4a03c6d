"""Total domination in the generating graph by conjugate elements.

A set S of nonidentity elements is a total dominating set (TDS) when every
nonidentity x generates G together with some member of S.  It is enough to
check x of prime order: a prime-order power y of x has <y,s> <= <x,s>.

Two independent tests are provided.  The direct one runs generation tests.
The criterion one uses the maximal overgroups: <x,s> != G exactly when x
lies in some H in M(G,s), so S is a TDS iff every choice H_i in M(G,s_i)
has trivial intersection.  For enumerable groups the second test is run on
bitsets N(s) = (union of M(G,s)) restricted to prime-order elements.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from typing import Sequence

from unidom import kernels as K
from unidom.actions import DegreeCapError, base_size, coset_action
from unidom.chain import EnumerationCapError, derive_rng
from unidom.field import is_prime
from unidom.group import PermGroup, images_of
from unidom.overgroups import CERTIFIED, ESTIMATED, OvergroupSet, maximal_overgroups
from unidom.perm import element_order, format_cycles, parse_cycles
from unidom.structure import ConjugacyClass, Subgroup, TableUnavailable, power_covering_classes

DIRECT = "direct"
CRITERION = "criterion"
DEFAULT_TRIALS = 2000
DEFAULT_REFUTE_BUDGET = 50_000_000


def generates(G: PermGroup, x, y) -> bool:
    x, y = images_of(x), images_of(y)
    gens = [g for g in (x, y) if not K.is_identity(g)]
    if not gens:
        return G.order == 1
    return G.generated_order(gens) == G.order


def prime_order_elements(G: PermGroup, cap: int | None = None) -> list[tuple]:
    tab = G.class_table()
    out = []
    for c in tab:
        if is_prime(c.order):
            out.extend(tab.class_elements(c.index, cap))
    return out


def is_tds_direct(G: PermGroup, S: Sequence, cap: int | None = None) -> bool:
    """Every prime-order element generates G with some member of S."""
    S = [images_of(s) for s in S]
    if not S or any(K.is_identity(s) for s in S):
        return False
    cap = cap if cap is not None else G.cap
    try:
        xs = prime_order_elements(G, cap)
    except (TableUnavailable, EnumerationCapError) as e:
        raise EnumerationCapError(G.order, cap) from e
    for x in xs:
        if not any(generates(G, x, s) for s in S):
            return False
    return True


def _prime_elements_of(H: Subgroup) -> list[tuple]:
    return [h for h in H.elements() if not K.is_identity(h) and is_prime(element_order(h))]


def is_tds_criterion(S: Sequence, overgroup_sets: Sequence[OvergroupSet]) -> bool:
    """True iff every tuple (H_1, ..., H_c) in the product of the overgroup
    sets has trivial intersection.

    The intersection is tracked as its set of prime-order elements (a
    subgroup is trivial iff it has none), narrowed one factor at a time,
    and a branch is dropped as soon as it becomes empty.
    """
    if len(S) != len(overgroup_sets):
        raise ValueError("one overgroup set per element")
    sets = [list(ov.subgroups) for ov in overgroup_sets]
    if not sets or any(not hs for hs in sets):
        # an element with no proper overgroup generates G on its own
        return any(not hs for hs in sets)
    order = sorted(range(len(sets)), key=lambda i: min(H.order for H in sets[i]))
    sets = [sets[i] for i in order]

    def rec(i: int, common: list[tuple]) -> bool:
        if i == len(sets):
            return not common
        for H in sets[i]:
            narrowed = [x for x in common if H.contains(x)]
            if narrowed and not rec(i + 1, narrowed):
                return False
        return True

    for H in sets[0]:
        if not rec(1, _prime_elements_of(H)):
            return False
    return True


def conjugate_overgroups(ov: OvergroupSet, g) -> OvergroupSet:
    """M(G, s^g) = M(G, s)^g."""
    g = images_of(g)
    return OvergroupSet(ov.group, K.conj(ov.element, g), [H.conjugate(g) for H in ov.subgroups], ov.mode, 0)


# -- bitset index ---------------------------------------------------------------


class NeighbourIndex:
    """Prime-order elements of an enumerable group, numbered, plus the
    non-neighbour bitsets N(s) built from certified overgroup sets."""

    def __init__(self, G: PermGroup):
        self.G = G
        self.points = prime_order_elements(G)
        self.pos = {x: i for i, x in enumerate(self.points)}
        self.nbytes = (len(self.points) + 7) // 8

    def members(self, ov: OvergroupSet) -> list[int]:
        """Positions of prime-order elements in the union of ``ov``."""
        hit = set()
        pos = self.pos
        for H in ov.subgroups:
            for h in H.elements():
                i = pos.get(h)
                if i is not None:
                    hit.add(i)
        return sorted(hit)

    def mask(self, idx) -> int:
        buf = bytearray(self.nbytes)
        for i in idx:
            buf[i >> 3] |= 1 << (i & 7)
        return int.from_bytes(buf, "little")

    def conjugate_members(self, idx: Sequence[int], g: tuple) -> list[int]:
        pts, pos, conj = self.points, self.pos, K.conj
        return [pos[conj(pts[i], g)] for i in idx]


class ClassMasks:
    """N(t) for every t in the class of ``s``, with conjugators from s."""

    def __init__(self, index: NeighbourIndex, ov: OvergroupSet):
        if not ov.certified:
            raise ValueError("bitset masks need a certified overgroup set")
        G = index.G
        s = ov.element
        base = index.members(ov)
        ident = G.identity
        self.index = index
        self.elements = [s]
        self.conjugators = [ident]
        members = [base]
        self.masks = [index.mask(base)]
        seen = {s: 0}
        i = 0
        while i < len(self.elements):
            t, g, mem = self.elements[i], self.conjugators[i], members[i]
            for x in G.gens:
                u = K.conj(t, x)
                if u not in seen:
                    seen[u] = len(self.elements)
                    self.elements.append(u)
                    self.conjugators.append(K.mul(g, x))
                    m = index.conjugate_members(mem, x)
                    members.append(m)
                    self.masks.append(index.mask(m))
            members[i] = None
            i += 1
        self.pos = seen

    def __len__(self) -> int:
        return len(self.elements)

    def centralizer_orbit_reps(self) -> list[tuple[int, int]]:
        """Orbits of C_G(s) on the class minus s, as (rep position, size)."""
        G = self.index.G
        s = self.elements[0]
        cent = [g for g in G.elements() if K.conj(s, g) == s]
        gens = _small_generating_set(G, cent)
        label = [-1] * len(self.elements)
        out = []
        for i in range(1, len(self.elements)):
            if label[i] >= 0:
                continue
            label[i] = i
            stack, size = [i], 1
            while stack:
                j = stack.pop()
                for c in gens:
                    k = self.pos[K.conj(self.elements[j], c)]
                    if label[k] < 0:
                        label[k] = i
                        stack.append(k)
                        size += 1
            out.append((i, size))
        return out

    def is_tds(self, positions: Sequence[int]) -> bool:
        acc = -1
        for i in positions:
            acc &= self.masks[i]
            if not acc:
                return True
        return acc == 0


def _small_generating_set(G: PermGroup, elements: list[tuple]) -> list[tuple]:
    """A few of ``elements`` (a subgroup, as a list) generating all of it."""
    target = len(elements)
    gens: list[tuple] = []
    order = 1
    for g in elements:
        if order == target:
            break
        if K.is_identity(g):
            continue
        trial = gens + [g]
        o = G.generated_order(trial)
        if o > order:
            gens, order = trial, o
    return gens


_INDEX_ATTR = "_neighbour_index"


def neighbour_index(G: PermGroup) -> NeighbourIndex:
    idx = getattr(G, _INDEX_ATTR, None)
    if idx is None:
        idx = NeighbourIndex(G)
        setattr(G, _INDEX_ATTR, idx)
    return idx


# -- certificates ------------------------------------------------------------------


@dataclass
class TDSCertificate:
    group: str
    group_order: int
    degree: int
    element: tuple
    conjugators: list[tuple]
    verification: str
    certified: bool
    seed: int = 0
    budget: int = 0
    class_label: str = ""

    @property
    def size(self) -> int:
        return len(self.conjugators)

    def elements(self) -> list[tuple]:
        return [K.conj(self.element, g) for g in self.conjugators]

    def to_json(self) -> dict:
        return {
            "group": self.group,
            "group_order": self.group_order,
            "degree": self.degree,
            "class": self.class_label,
            "element": format_cycles(self.element),
            "conjugators": [format_cycles(g) for g in self.conjugators],
            "set": [format_cycles(t) for t in self.elements()],
            "size": self.size,
            "verification": self.verification,
            "certified": self.certified,
            "seed": self.seed,
            "budget": self.budget,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)

    @classmethod
    def from_json(cls, d: dict) -> "TDSCertificate":
        n = int(d["degree"])
        return cls(
            group=d["group"],
            group_order=int(d["group_order"]),
            degree=n,
            element=parse_cycles(d["element"], n).images,
            conjugators=[parse_cycles(g, n).images for g in d["conjugators"]],
            verification=d.get("verification", DIRECT),
            certified=bool(d.get("certified", False)),
            seed=int(d.get("seed", 0)),
            budget=int(d.get("budget", 0)),
            class_label=d.get("class", ""),
        )


def verify_certificate(G: PermGroup, cert: TDSCertificate, method: str | None = None, seed: int = 0,
                       budget: int | None = None) -> tuple[bool, str]:
    """Re-check a certificate against ``G``.  Returns (ok, reason)."""
    if cert.degree != G.degree or cert.group_order != G.order:
        return False, "certificate is for a different group"
    if len(cert.conjugators) < 2:
        return False, "a total dominating set has at least two elements"
    for g in [cert.element] + cert.conjugators:
        if not G.contains(g):
            return False, f"{format_cycles(g)} is not in the group"
    S = cert.elements()
    if len(set(S)) != len(S):
        return False, "repeated elements"
    method = method or (DIRECT if G.enumerable() else CRITERION)
    if method == DIRECT:
        ok = is_tds_direct(G, S)
    else:
        mode = CERTIFIED if G.enumerable() else ESTIMATED
        ov = maximal_overgroups(G, cert.element, mode, budget, seed)
        sets = [conjugate_overgroups(ov, g) for g in cert.conjugators]
        ok = is_tds_criterion(S, sets)
        if ok and mode == ESTIMATED:
            return True, "criterion holds for estimated overgroup sets"
    return ok, "verified" if ok else "some prime-order element is not dominated"


# -- searches ------------------------------------------------------------------


def _class_of(G: PermGroup, cls) -> ConjugacyClass:
    tab = G.class_table()
    if isinstance(cls, ConjugacyClass):
        return cls
    if isinstance(cls, str):
        return tab.by_label(cls)
    if isinstance(cls, int):
        return tab[cls]
    return tab[tab.classify(images_of(cls))]


def _tester(G: PermGroup, ov: OvergroupSet | None):
    """A function taking conjugators of s and deciding TDS, plus its label."""
    if ov is not None and ov.certified and G.enumerable():
        idx = neighbour_index(G)
        base = idx.members(ov)

        def by_mask(gs):
            acc = -1
            for g in gs:
                acc &= idx.mask(idx.conjugate_members(base, g))
                if not acc:
                    return True
            return acc == 0

        return by_mask, CRITERION, True
    if ov is not None and ov.subgroups:
        s = ov.element

        def by_criterion(gs):
            sets = [conjugate_overgroups(ov, g) for g in gs]
            return is_tds_criterion([K.conj(s, g) for g in gs], sets)

        return by_criterion, CRITERION, ov.certified
    s = ov.element if ov is not None else None

    def direct(gs):
        return is_tds_direct(G, [K.conj(s, g) for g in gs])

    return direct, DIRECT, True


def gamma_u_upper_random(G: PermGroup, cls, c: int, trials: int = DEFAULT_TRIALS, seed: int = 0,
                         overgroups: OvergroupSet | None = None) -> TDSCertificate | None:
    """Random c-sets of conjugates of the class representative s, always
    containing s itself.  Returns the first verified set, or None."""
    if c < 2:
        return None
    C = _class_of(G, cls)
    s = C.rep
    if overgroups is None and G.enumerable():
        overgroups = maximal_overgroups(G, s, CERTIFIED, seed=seed)
    if overgroups is not None and overgroups.element != s:
        raise ValueError("overgroup set is not for the class representative")
    test, method, certified = _tester(G, overgroups)
    if overgroups is None:
        test = lambda gs: is_tds_direct(G, [K.conj(s, g) for g in gs])  # noqa: E731
    rng = derive_rng(seed, "tds", C.label, c)
    ident = G.identity
    for _ in range(trials):
        gs = [ident]
        seen = {s}
        while len(gs) < c:
            g = G.random_images(rng)
            t = K.conj(s, g)
            if t not in seen:
                seen.add(t)
                gs.append(g)
        if test(gs):
            return TDSCertificate(G.name, G.order, G.degree, s, gs, method, certified, seed, trials, C.label)
    return None


@dataclass
class Refutation:
    status: str  # refuted | found | inconclusive
    class_label: str
    c: int
    tuples_checked: int
    expected: int
    certificate: TDSCertificate | None = None

    def to_json(self) -> dict:
        d = {"status": self.status, "class": self.class_label, "c": self.c,
             "tuples_checked": self.tuples_checked, "expected": self.expected}
        if self.certificate is not None:
            d["certificate"] = self.certificate.to_json()
        return d


def gamma_u_exhaustive_refute(G: PermGroup, cls, c: int, budget: int = DEFAULT_REFUTE_BUDGET,
                              overgroups: OvergroupSet | None = None, symmetry: bool = True) -> Refutation:
    """Decide whether some c-set of conjugates of s containing s is a TDS.

    Fixing s loses nothing: if T is a TDS then so is T^g for every g, and
    some conjugate of T contains s.  With ``symmetry`` the second member
    ranges over orbit representatives of C_G(s) only (again no loss, since
    C_G(s) fixes s).  ``expected`` is the number of (c-1)-sets the
    enumeration is bound to visit when nothing is found.
    """
    C = _class_of(G, cls)
    if c < 2:
        return Refutation("refuted", C.label, c, 0, 0)
    ov = overgroups or maximal_overgroups(G, C.rep, CERTIFIED)
    cm = ClassMasks(neighbour_index(G), ov)
    m = len(cm)
    if c > m:
        return Refutation("inconclusive", C.label, c, 0, 0)
    if symmetry:
        reps = cm.centralizer_orbit_reps()
        expected = len(reps) * math.comb(m - 2, c - 2)
    else:
        reps = [(i, 1) for i in range(1, m)]
        expected = math.comb(m - 1, c - 1)
    if expected > budget:
        return Refutation("inconclusive", C.label, c, 0, expected)
    masks = cm.masks
    m0 = masks[0]
    checked = 0

    def found(pos):
        gs = [cm.conjugators[i] for i in (0,) + tuple(pos)]
        cert = TDSCertificate(G.name, G.order, G.degree, cm.elements[0], gs, CRITERION, True, 0, budget, C.label)
        return Refutation("found", C.label, c, checked, expected, cert)

    for r, _size in reps:
        a = m0 & masks[r]
        # orbit reps need every other tail; plain enumeration takes sets in order
        rest = [i for i in range(1, m) if i != r] if symmetry else list(range(r + 1, m))
        if c == 2:
            checked += 1
            if not a:
                return found((r,))
            continue
        if c == 3:
            for j in rest:
                checked += 1
                if not (a & masks[j]):
                    return found((r, j))
            continue
        for combo in itertools.combinations(rest, c - 2):
            checked += 1
            acc = a
            for j in combo:
                acc &= masks[j]
                if not acc:
                    break
            if not acc:
                return found((r,) + combo)
    return Refutation("refuted", C.label, c, checked, expected)


# -- lower bounds and the bracket -----------------------------------------------


def overgroup_base_sizes(G: PermGroup, ov: OvergroupSet, stop_at: int | None = None, seed: int = 0,
                         degree_cap: int | None = None) -> list[int]:
    """b(G, G/H) for H in ``ov`` (stopping early once one reaches ``stop_at``).

    Any TDS inside the class of s has at least max_H b(G, G/H) members:
    the point stabilizers H^{g_i} of the members must meet trivially.
    """
    out = []
    for H in ov.subgroups:
        act = coset_action(G, H) if degree_cap is None else coset_action(G, H, degree_cap)
        cert = base_size(act, "exact", seed=seed)
        out.append(cert.b if cert.conclusive else cert.lower)
        if stop_at is not None and out[-1] >= stop_at:
            break
    return out


def gamma_u_lower(G: PermGroup, seed: int = 0, mode: str | None = None) -> tuple[int, list[dict]]:
    """min over power-covering representatives s of max over H in M(G,s)
    of b(G, G/H).  Each record carries ``certified``."""
    mode = mode or (CERTIFIED if G.enumerable() else ESTIMATED)
    best = None
    evidence = []
    for C in sorted(power_covering_classes(G), key=lambda c: (-c.order, c.index)):
        ov = maximal_overgroups(G, C.rep, mode, seed=seed)
        bs = overgroup_base_sizes(G, ov, stop_at=best, seed=seed)
        v = max(bs) if bs else 1
        evidence.append({"class": C.label, "overgroups": ov.orders(), "base_sizes": bs,
                         "value": v, "certified": ov.certified, "partial": best is not None and v >= best})
        if best is None or v < best:
            best = v
    return max(best or 2, 2), evidence


@dataclass
class BoundReport:
    group: str
    group_order: int
    lower: int
    upper: int | None
    lower_source: str
    upper_source: str
    certified_lower: bool
    certified_upper: bool
    classes: list[dict] = field(default_factory=list)
    refutations: list[dict] = field(default_factory=list)
    certificate: TDSCertificate | None = None

    @property
    def exact(self) -> bool:
        return self.upper is not None and self.lower == self.upper and self.certified_lower and self.certified_upper

    def to_json(self) -> dict:
        return {
            "group": self.group,
            "group_order": self.group_order,
            "bracket": [self.lower, self.upper],
            "lower_source": self.lower_source,
            "upper_source": self.upper_source,
            "certified_lower": self.certified_lower,
            "certified_upper": self.certified_upper,
            "exact": self.exact,
            "classes": self.classes,
            "refutations": self.refutations,
            "certificate": self.certificate.to_json() if self.certificate else None,
        }


def gamma_u_bracket(G: PermGroup, seed: int = 0, trials: int = DEFAULT_TRIALS, c_max: int = 6,
                    refute_budget: int = DEFAULT_REFUTE_BUDGET, mode: str | None = None,
                    climb_budget: int | None = None, with_prob: bool = True) -> BoundReport:
    """Narrowest bracket for gamma_u(G) within the given budgets.

    Only power-covering classes are examined: a TDS of conjugates of y^l
    yields one of conjugates of y, so gamma_u is attained on them.
    """
    from unidom.prob import NoConclusion, ProbProfile, min_c

    mode = mode or (CERTIFIED if G.enumerable() else ESTIMATED)
    classes = sorted(power_covering_classes(G), key=lambda c: (-c.order, c.index))
    records = []
    ovs = {}
    for C in classes:
        ov = maximal_overgroups(G, C.rep, mode, climb_budget, seed)
        ovs[C.label] = ov
        rec = {"class": C.label, "order": C.order, "size": C.size, "overgroup_mode": ov.mode,
               "overgroups": ov.orders()}
        if with_prob:
            try:
                prof = ProbProfile.build(G, C.rep, ov)
                qc = min_c(prof, "q_hat", c_max)
                rec["q_hat_min_c"] = qc if not isinstance(qc, NoConclusion) else None
            except (TableUnavailable, EnumerationCapError, DegreeCapError):
                rec["q_hat_min_c"] = None
        records.append(rec)

    # upper bound first: a pair settles everything
    upper, cert = None, None
    for c in range(2, c_max + 1):
        for C in classes:
            cert = gamma_u_upper_random(G, C, c, trials, seed, ovs[C.label])
            if cert is not None:
                upper = c
                rec = next(r for r in records if r["class"] == C.label)
                rec["random_search_upper"] = c
                break
        if upper is not None:
            break
    certified_upper = cert is not None and cert.certified
    upper_source = f"random search in class {cert.class_label} ({cert.verification})" if cert else "none"

    lower, lower_source, certified_lower = 2, "trivial: a single element never dominates", True
    refutations = []
    if upper is None or upper > 2:
        lower_src = []
        best = None
        cert_all = True
        for C, rec in zip(classes, records):
            ov = ovs[C.label]
            try:
                bs = overgroup_base_sizes(G, ov, seed=seed)
            except DegreeCapError:
                bs = []
            v = max(bs) if bs else 2
            rec["base_size_lower"] = v
            cert_all = cert_all and ov.certified
            lower_src.append(v)
            best = v if best is None else min(best, v)
        if best is not None and best > lower:
            lower, lower_source, certified_lower = best, "base sizes of maximal overgroups", cert_all
        if G.enumerable() and mode == CERTIFIED and upper is not None:
            c = lower
            while c < upper:
                outcome = "refuted"
                for C, rec in zip(classes, records):
                    if rec.get("base_size_lower", 2) > c:
                        refutations.append({"status": "skipped", "class": C.label, "c": c,
                                            "reason": "base-size lower bound exceeds c"})
                        continue
                    r = gamma_u_exhaustive_refute(G, C, c, refute_budget, ovs[C.label])
                    refutations.append(r.to_json())
                    if r.status == "found":
                        upper, cert = c, r.certificate
                        certified_upper, upper_source = True, f"exhaustive search in class {C.label}"
                        outcome = "found"
                        break
                    if r.status == "inconclusive":
                        outcome = "inconclusive"
                        break
                if outcome != "refuted":
                    break
                c += 1
                lower, lower_source = c, "exhaustive refutation"
    return BoundReport(G.name, G.order, lower, upper, lower_source, upper_source, certified_lower,
                       certified_upper, records, refutations, cert)
