"""Permutations and cycle notation.

Points are 0-based internally and 1-based in every printed or parsed form.
"""

from __future__ import annotations

import math
import re
from functools import reduce
from typing import Iterable, Sequence

from unidom import kernels as K


class CycleParseError(ValueError):
    """Malformed cycle notation; ``token`` names the offending piece."""

    def __init__(self, message: str, token: str = ""):
        super().__init__(message)
        self.token = token


class Permutation:
    """An immutable permutation of ``{0, ..., degree-1}``.

    Multiplication is left to right: ``(p * q)(i) = q(p(i))``, so
    ``x ** g`` style conjugation is ``g**-1 * x * g``.
    """

    __slots__ = ("images", "_hash")

    def __init__(self, images: Sequence[int], check: bool = True):
        t = tuple(images)
        if check and sorted(t) != list(range(len(t))):
            raise ValueError("images do not form a bijection")
        self.images = t
        self._hash = None

    @classmethod
    def identity(cls, degree: int) -> "Permutation":
        return cls(range(degree), check=False)

    @classmethod
    def from_cycles(cls, cycles: Iterable[Sequence[int]], degree: int) -> "Permutation":
        """Build from 0-based cycles."""
        img = list(range(degree))
        for c in cycles:
            c = list(c)
            for a, b in zip(c, c[1:] + c[:1]):
                img[a] = b
        return cls(img)

    @property
    def degree(self) -> int:
        return len(self.images)

    def __call__(self, i: int) -> int:
        return self.images[i]

    def __mul__(self, other: "Permutation") -> "Permutation":
        if other.degree != self.degree:
            raise ValueError("degree mismatch")
        return Permutation(K.mul(self.images, other.images), check=False)

    def __invert__(self) -> "Permutation":
        return Permutation(K.inv(self.images), check=False)

    def inverse(self) -> "Permutation":
        return ~self

    def __pow__(self, k: int) -> "Permutation":
        base = self if k >= 0 else ~self
        k = abs(k)
        result = Permutation.identity(self.degree).images
        b = base.images
        while k:
            if k & 1:
                result = K.mul(result, b)
            b = K.mul(b, b)
            k >>= 1
        return Permutation(result, check=False)

    def conjugate(self, g: "Permutation") -> "Permutation":
        """``g^-1 self g``."""
        return Permutation(K.conj(self.images, g.images), check=False)

    def is_identity(self) -> bool:
        return K.is_identity(self.images)

    def __eq__(self, other) -> bool:
        return isinstance(other, Permutation) and self.images == other.images

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self.images)
        return self._hash

    def __lt__(self, other: "Permutation") -> bool:
        return self.images < other.images

    def cycles(self) -> list[tuple[int, ...]]:
        return cycles_of(self.images)

    def cycle_type(self) -> tuple[int, ...]:
        return cycle_type(self.images)

    def order(self) -> int:
        return element_order(self)

    def sign(self) -> int:
        return sign(self.images)

    def __repr__(self) -> str:
        return f"Permutation({format_cycles(self)!r}, degree={self.degree})"

    def __str__(self) -> str:
        return format_cycles(self)


def cycles_of(images: Sequence[int]) -> list[tuple[int, ...]]:
    """Nontrivial cycles, each starting at its least point, sorted by start."""
    seen = [False] * len(images)
    out = []
    for i in range(len(images)):
        if seen[i] or images[i] == i:
            continue
        c = [i]
        seen[i] = True
        j = images[i]
        while j != i:
            seen[j] = True
            c.append(j)
            j = images[j]
        out.append(tuple(c))
    return out


def cycle_type(images: Sequence[int]) -> tuple[int, ...]:
    """All cycle lengths including fixed points, in decreasing order."""
    seen = [False] * len(images)
    lens = []
    for i in range(len(images)):
        if seen[i]:
            continue
        n = 0
        j = i
        while not seen[j]:
            seen[j] = True
            j = images[j]
            n += 1
        lens.append(n)
    return tuple(sorted(lens, reverse=True))


def sign(images: Sequence[int]) -> int:
    ct = cycle_type(images)
    return -1 if sum(c - 1 for c in ct) % 2 else 1


def element_order(p: Permutation | Sequence[int]) -> int:
    images = p.images if isinstance(p, Permutation) else p
    return reduce(math.lcm, cycle_type(images), 1)


def format_cycles(p: Permutation | Sequence[int]) -> str:
    images = p.images if isinstance(p, Permutation) else p
    cs = cycles_of(images)
    if not cs:
        return "()"
    return "".join("(" + ",".join(str(x + 1) for x in c) + ")" for c in cs)


_CYCLE = re.compile(r"\(([^()]*)\)")


def parse_cycles(text: str, degree: int) -> Permutation:
    """Parse a product of disjoint cycles over 1-based points.

    Whitespace is ignored; ``()`` is the identity.  Raises
    :class:`CycleParseError` naming the offending token.
    """
    s = "".join(text.split())
    if s == "":
        raise CycleParseError("empty input", "")
    pos = 0
    img = list(range(degree))
    used: set[int] = set()
    while pos < len(s):
        m = _CYCLE.match(s, pos)
        if m is None:
            raise CycleParseError(f"malformed cycle notation at {s[pos:pos + 12]!r}", s[pos:pos + 12])
        body = m.group(1)
        pos = m.end()
        if body == "":
            continue
        pts = []
        for tok in body.split(","):
            if not tok.isdigit():
                raise CycleParseError(f"bad point {tok!r}", tok)
            x = int(tok)
            if not 1 <= x <= degree:
                raise CycleParseError(f"point {x} out of range 1..{degree}", tok)
            if x in used:
                raise CycleParseError(f"point {x} repeated", tok)
            used.add(x)
            pts.append(x - 1)
        for a, b in zip(pts, pts[1:] + pts[:1]):
            img[a] = b
    return Permutation(img, check=False)
