"""Permutation groups: a generator list with its stabilizer chain and
lazily built element index and class table."""

from __future__ import annotations

import random
from typing import Iterable, Sequence

from unidom import kernels as K
from unidom.chain import (
    DEFAULT_ENUMERATION_CAP,
    EnumerationCapError,
    StabilizerChain,
    build_chain,
)
from unidom.perm import Permutation, format_cycles


def images_of(g) -> tuple:
    return g.images if isinstance(g, Permutation) else tuple(g)


class PermGroup:
    """A finite permutation group.

    ``family`` is ``("alt", n)`` or ``("sym", n)`` when the group is known
    to be the full alternating or symmetric group on its points; class
    tables then use cycle types instead of enumeration.
    """

    def __init__(
        self,
        gens: Iterable,
        degree: int | None = None,
        name: str = "",
        family: tuple[str, int] | None = None,
        seed: int = 0,
        cap: int = DEFAULT_ENUMERATION_CAP,
        order: int | None = None,
        chain: StabilizerChain | None = None,
    ):
        gl = [images_of(g) for g in gens]
        if degree is None:
            if not gl:
                raise ValueError("degree required for the trivial group")
            degree = len(gl[0])
        self.degree = degree
        self.gens = [g for g in gl if not K.is_identity(g)]
        self.name = name
        self.family = family
        self.seed = seed
        self.cap = cap
        self.chain = chain or build_chain(self.gens, degree, seed=seed, target_order=order)
        if order is not None and self.chain.order != order:
            raise ValueError(f"{name or 'group'}: chain order {self.chain.order} != expected {order}")
        self._elements: list[tuple] | None = None
        self._index: dict[tuple, int] | None = None
        self._classes = None

    @property
    def order(self) -> int:
        return self.chain.order

    @property
    def identity(self) -> tuple:
        return tuple(range(self.degree))

    def generators(self) -> list[Permutation]:
        return [Permutation(g, check=False) for g in self.gens]

    def contains(self, g) -> bool:
        return self.chain.contains(images_of(g))

    __contains__ = contains

    def random_images(self, rng: random.Random) -> tuple:
        return self.chain.random_images(rng)

    def random_element(self, rng: random.Random) -> Permutation:
        return self.chain.random_element(rng)

    def enumerable(self) -> bool:
        return self.order <= self.cap

    # -- element index ----------------------------------------------------

    def elements(self) -> list[tuple]:
        """All elements (cached), identity first."""
        if self._elements is None:
            if self.order > self.cap:
                raise EnumerationCapError(self.order, self.cap)
            els = list(self.chain.iter_images(self.cap))
            ident = self.identity
            els.sort(key=lambda g: g != ident)
            self._elements = els
        return self._elements

    def index(self) -> dict[tuple, int]:
        if self._index is None:
            self._index = {g: i for i, g in enumerate(self.elements())}
        return self._index

    # -- subgroups ----------------------------------------------------------

    def is_full(self, chain: StabilizerChain) -> bool:
        return chain.order == self.order

    def generated_order(self, gens: Sequence, seed: int = 0) -> int:
        """Order of ``<gens>`` (a subgroup of this group), with an early
        exit once it reaches the full group order."""
        ch = build_chain([images_of(g) for g in gens], self.degree, seed=seed, stop_at_order=self.order)
        return ch.order

    def class_table(self):
        if self._classes is None:
            from unidom.structure import conjugacy_classes

            self._classes = conjugacy_classes(self)
        return self._classes

    def describe(self) -> str:
        return f"{self.name or 'G'} (degree {self.degree}, order {self.order})"

    def __repr__(self) -> str:
        gs = ", ".join(format_cycles(g) for g in self.gens[:3])
        more = ", ..." if len(self.gens) > 3 else ""
        return f"<PermGroup {self.name!r} degree={self.degree} order={self.order} gens=[{gs}{more}]>"
