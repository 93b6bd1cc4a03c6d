"""Stabilizer chains (base and strong generating sets).

Construction is a seeded random Schreier-Sims phase followed by a
deterministic pass that sifts every Schreier generator, so the chain is
exact.  When the caller already knows the order of the group generated
(``target_order``), the random phase stops as soon as the basic orbits
multiply up to it; a partial chain never overshoots the true order, so
that exit is also exact.
"""

from __future__ import annotations

import hashlib
import itertools
import math
import random
from typing import Iterable, Iterator, Sequence

from unidom import kernels as K
from unidom.perm import Permutation

DEFAULT_ENUMERATION_CAP = 2_000_000


class EnumerationCapError(RuntimeError):
    def __init__(self, order: int, cap: int):
        super().__init__(f"group order {order} exceeds enumeration cap {cap}")
        self.order = order
        self.cap = cap


def derive_rng(seed: int, *labels) -> random.Random:
    """A reproducible stream derived from a master seed and labels."""
    h = hashlib.sha256(repr((seed,) + labels).encode()).digest()
    return random.Random(int.from_bytes(h[:8], "big"))


def _as_images(g) -> tuple[int, ...]:
    return g.images if isinstance(g, Permutation) else tuple(g)


class _ProductReplacement:
    """Product replacement random elements of ``<gens>``."""

    def __init__(self, gens: Sequence[tuple], degree: int, rng: random.Random, warmup: int = 12):
        ident = tuple(range(degree))
        st = list(gens) or [ident]
        while len(st) < 6:
            st = st + st[: 6 - len(st)]
        self.state = st
        self.acc = ident
        self.rng = rng
        for _ in range(warmup):
            self.next()

    def next(self) -> tuple:
        st = self.state
        rnd = self.rng.random
        n = len(st)
        i = int(rnd() * n)
        j = int(rnd() * (n - 1))
        if j >= i:
            j += 1
        if rnd() < 0.5:
            st[i] = K.mul(st[i], st[j])
            self.acc = K.mul(self.acc, st[i])
        else:
            st[i] = K.mul(st[j], st[i])
            self.acc = K.mul(st[i], self.acc)
        return self.acc


class StabilizerChain:
    """Base, strong generators, basic orbits and transversals.

    Immutable after construction.  ``levels`` are indexed by base
    position; ``trans[i][x]`` maps ``base[i]`` to ``x``.
    """

    def __init__(self, degree: int, gens: Sequence[tuple]):
        self.degree = degree
        self.gens = [g for g in gens]
        self.base: list[int] = []
        self.sgs: list[tuple] = []
        self.level_gens: list[list[tuple]] = []
        self.orbits: list[list[int]] = []
        self.trans: list[dict] = []
        self.tinv: list[dict] = []
        self._order: int | None = None

    # -- construction helpers -------------------------------------------

    def _add_level(self, point: int) -> None:
        self.base.append(point)
        i = len(self.base) - 1
        prefix = self.base[:i]
        lg = [s for s in self.sgs if all(s[b] == b for b in prefix)]
        self.level_gens.append(lg)
        orb, tr, ti = K.orbit_transversal(lg, point, self.degree)
        self.orbits.append(orb)
        self.trans.append(tr)
        self.tinv.append(ti)

    def _add_strong_gen(self, h: tuple, depth: int) -> None:
        """Add ``h`` (fixing base[:depth]) to levels 0..depth."""
        if depth == len(self.base):
            for x in range(self.degree):
                if h[x] != x:
                    break
            self.sgs.append(h)
            self._add_level(x)
            depth = len(self.base) - 1
            # _add_level already saw h at the new level
            upto = depth
        else:
            self.sgs.append(h)
            upto = depth + 1
        for i in range(upto):
            self.level_gens[i].append(h)
            K.extend_transversal(self.level_gens[i], [h], self.orbits[i], self.trans[i], self.tinv[i])
        self._order = None

    def _current_order(self) -> int:
        return math.prod(len(o) for o in self.orbits)

    # -- queries ---------------------------------------------------------

    @property
    def order(self) -> int:
        if self._order is None:
            self._order = self._current_order()
        return self._order

    def sift(self, g) -> tuple[tuple, int]:
        return K.sift(self.base, self.tinv, _as_images(g))

    def contains(self, g) -> bool:
        g = _as_images(g)
        if len(g) != self.degree:
            raise ValueError(f"degree mismatch: {len(g)} vs {self.degree}")
        r, i = K.sift(self.base, self.tinv, g)
        return i == len(self.base) and K.is_identity(r)

    __contains__ = contains

    def random_images(self, rng: random.Random) -> tuple:
        g = tuple(range(self.degree))
        for i in range(len(self.base) - 1, -1, -1):
            orb = self.orbits[i]
            if len(orb) > 1:
                g = K.mul(g, self.trans[i][orb[rng.randrange(len(orb))]])
        return g

    def random_element(self, rng: random.Random) -> Permutation:
        """Exactly uniform element (one transversal pick per level)."""
        return Permutation(self.random_images(rng), check=False)

    def iter_images(self, cap: int = DEFAULT_ENUMERATION_CAP) -> Iterator[tuple]:
        if self.order > cap:
            raise EnumerationCapError(self.order, cap)
        ident = tuple(range(self.degree))
        levels = [list(self.trans[i].values()) for i in range(len(self.base)) if len(self.orbits[i]) > 1]
        if not levels:
            yield ident
            return
        # element = u_{k-1} * ... * u_0
        levels.reverse()
        for combo in itertools.product(*levels):
            g = combo[0]
            for u in combo[1:]:
                g = K.mul(g, u)
            yield g

    def elements(self, cap: int = DEFAULT_ENUMERATION_CAP) -> Iterator[Permutation]:
        for g in self.iter_images(cap):
            yield Permutation(g, check=False)

    def strong_generators(self) -> list[Permutation]:
        return [Permutation(s, check=False) for s in self.sgs]

    def generators(self) -> list[Permutation]:
        return [Permutation(s, check=False) for s in self.gens]

    def is_trivial(self) -> bool:
        return self.order == 1

    def check(self) -> None:
        """Assert the structural invariants (used by tests)."""
        assert self.order == math.prod(len(o) for o in self.orbits)
        for i, lg in enumerate(self.level_gens):
            for s in lg:
                assert all(s[b] == b for b in self.base[:i])
        for s in self.gens:
            assert self.contains(s)

    def __repr__(self) -> str:
        return f"<StabilizerChain degree={self.degree} order={self.order} base={[b + 1 for b in self.base]}>"


def build_chain(
    gens: Iterable,
    degree: int | None = None,
    seed: int = 0,
    base_prefix: Sequence[int] = (),
    target_order: int | None = None,
    stop_at_order: int | None = None,
) -> StabilizerChain:
    """Stabilizer chain of ``<gens>``.

    ``target_order`` is the known order of ``<gens>``: the random phase
    then terminates exactly.  ``stop_at_order`` is an order the caller
    only wants to detect (typically the parent group order): reaching it
    ends construction early, with a complete chain.
    """
    gl = [_as_images(g) for g in gens]
    if degree is None:
        if not gl:
            raise ValueError("degree required for an empty generator list")
        degree = len(gl[0])
    for g in gl:
        if len(g) != degree:
            raise ValueError(f"degree mismatch: generator of degree {len(g)} in degree {degree}")
    gl = list(dict.fromkeys(g for g in gl if not K.is_identity(g)))
    ch = StabilizerChain(degree, gl)
    for b in base_prefix:
        ch._add_level(b)
    if not gl:
        ch._order = 1
        return ch
    if target_order is not None and stop_at_order is None:
        stop_at_order = target_order
    # seed the chain with the generators themselves
    for g in gl:
        r, j = ch.sift(g)
        if not K.is_identity(r):
            ch._add_strong_gen(r, j)
    if stop_at_order is not None and ch._current_order() >= stop_at_order:
        return ch
    rng = random.Random(seed)
    pr = _ProductReplacement(gl, degree, rng)
    quiet = 0
    need = 12 if target_order is None else 400
    while quiet < need:
        r, j = ch.sift(pr.next())
        if K.is_identity(r):
            quiet += 1
            continue
        quiet = 0
        ch._add_strong_gen(r, j)
        if stop_at_order is not None and ch._current_order() >= stop_at_order:
            return ch
    _verify(ch, stop_at_order)
    return ch


def _verify(ch: StabilizerChain, stop_at_order: int | None) -> None:
    """Deterministic Schreier-Sims pass: every Schreier generator sifts."""
    i = len(ch.base) - 1
    while i >= 0:
        restart = None
        base, tinvs = ch.base, ch.tinv
        for p in list(ch.orbits[i]):
            u = ch.trans[i][p]
            for s in list(ch.level_gens[i]):
                q = s[p]
                h = K.mul(K.mul(u, s), ch.tinv[i][q])
                if K.is_identity(h):
                    continue
                r, j = K.sift(base, tinvs, h, i + 1)
                if j == len(base) and K.is_identity(r):
                    continue
                ch._add_strong_gen(r, j)
                if stop_at_order is not None and ch._current_order() >= stop_at_order:
                    return
                restart = min(j, len(ch.base) - 1)
                break
            if restart is not None:
                break
        if restart is None:
            i -= 1
        else:
            i = restart


def chain_with_base(ch: StabilizerChain, prefix: Sequence[int], seed: int = 0) -> StabilizerChain:
    """Same group, base starting with ``prefix`` (exact, order-guided)."""
    if list(ch.base[: len(prefix)]) == list(prefix):
        return ch
    return build_chain(ch.sgs or ch.gens, ch.degree, seed=seed, base_prefix=prefix, target_order=ch.order)


def stabilizer_generators(ch: StabilizerChain, points: Sequence[int], seed: int = 0) -> tuple[list[tuple], int]:
    """Generators and order of the pointwise stabilizer of ``points``."""
    c2 = chain_with_base(ch, points, seed)
    k = len(points)
    gens = c2.level_gens[k] if k < len(c2.level_gens) else []
    order = math.prod(len(o) for o in c2.orbits[k:])
    return gens, order
