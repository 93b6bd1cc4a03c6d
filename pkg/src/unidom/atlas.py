"""Constructors for the concrete groups: alternating and symmetric groups,
PSL(2, q) on the projective line, and generator files (bundled sporadic
groups or user supplied)."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Sequence

from unidom.field import FieldError, SmallField, factor_prime_power
from unidom.group import PermGroup
from unidom.perm import CycleParseError, Permutation, format_cycles, parse_cycles

BUNDLED = ("M11", "M12", "M22", "M23", "J1")


class GroupLoadError(ValueError):
    pass


@dataclass(frozen=True)
class GroupSpec:
    name: str
    degree: int
    generators: tuple[Permutation, ...]
    expected_order: int | None = None
    provenance: str = "builtin"
    family: tuple[str, int] | None = None
    source: str = ""
    notes: dict = field(default_factory=dict, compare=False)

    def group(self, seed: int = 0, cap: int | None = None) -> PermGroup:
        kw = {} if cap is None else {"cap": cap}
        g = PermGroup(
            [p.images for p in self.generators],
            self.degree,
            name=self.name,
            family=self.family,
            seed=seed,
            order=self.expected_order,
            **kw,
        )
        return g

    def digest(self) -> str:
        import hashlib

        h = hashlib.sha256()
        h.update(f"{self.name}|{self.degree}|".encode())
        for p in self.generators:
            h.update(format_cycles(p).encode() + b";")
        return h.hexdigest()[:16]


def _cycle(points: Sequence[int], degree: int) -> Permutation:
    return Permutation.from_cycles([list(points)], degree)


def alternating(n: int) -> GroupSpec:
    """A_n from a 3-cycle and an n-cycle (n odd) or (n-1)-cycle (n even)."""
    if n < 3:
        raise ValueError("alternating(n) needs n >= 3")
    three = _cycle([0, 1, 2], n)
    long = _cycle(range(n), n) if n % 2 else _cycle(range(1, n), n)
    gens = (three,) if n == 3 else (three, long)
    return GroupSpec(f"A{n}", n, gens, math.factorial(n) // 2, "builtin", ("alt", n))


def symmetric(n: int) -> GroupSpec:
    if n < 3:
        raise ValueError("symmetric(n) needs n >= 3")
    gens = (_cycle([0, 1], n), _cycle(range(n), n))
    return GroupSpec(f"S{n}", n, gens, math.factorial(n), "builtin", ("sym", n))


def psl2(q: int) -> GroupSpec:
    """L_2(q) acting on the q+1 points of the projective line.

    Points ``0..q-1`` are field elements in the integer encoding of
    :class:`SmallField`; point ``q`` is infinity.
    """
    try:
        p, a = factor_prime_power(q)
    except FieldError as e:
        raise ValueError(str(e)) from None
    if q < 4:
        raise ValueError("psl2(q) needs q >= 4")
    F = SmallField(q)
    inf = q

    def affine(mult: int, add: int) -> Permutation:
        img = [F.add(F.mul(mult, x), add) for x in range(q)] + [inf]
        return Permutation(img)

    lam = F.primitive_element
    gens = [affine(1, 1)]
    if a > 1:
        gens.append(affine(1, F.x))
    gens.append(affine(F.mul(lam, lam), 0))
    inversion = [inf if x == 0 else F.neg(F.inv(x)) for x in range(q)] + [0]
    gens.append(Permutation(inversion))
    gens = tuple(g for g in gens if not g.is_identity())
    order = q * (q * q - 1) // math.gcd(2, q - 1)
    return GroupSpec(f"L2({q})", q + 1, gens, order, "builtin", ("psl2", q), notes={"field": F})


def element_of_shape(n: int, shape: Sequence[int], ambient: str = "alt") -> Permutation:
    """Cycles of the given lengths on consecutive points, longest first."""
    parts = sorted((int(x) for x in shape), reverse=True)
    if any(x < 1 for x in parts) or sum(parts) != n:
        raise ValueError(f"shape {list(shape)} does not partition {n}")
    if ambient == "alt" and sum(x - 1 for x in parts) % 2:
        raise ValueError(f"shape {list(shape)} is an odd permutation, not in A_{n}")
    cycles = []
    start = 0
    for x in parts:
        cycles.append(list(range(start, start + x)))
        start += x
    return Permutation.from_cycles(cycles, n)


# -- generator files ---------------------------------------------------------


def parse_generator_text(text: str, provenance: str = "file", source: str = "") -> GroupSpec:
    name = None
    degree = None
    order = None
    gens = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key = line.split(None, 1)[0].lower()
        if key == "name" and name is None:
            name = line.split(None, 1)[1].strip() if len(line.split(None, 1)) > 1 else ""
        elif key == "degree" and degree is None:
            try:
                degree = int(line.split()[1])
            except (IndexError, ValueError):
                raise GroupLoadError(f"line {lineno}: bad degree line {raw!r}") from None
        elif key == "order" and order is None and degree is not None and not gens:
            try:
                order = int(line.split()[1])
            except (IndexError, ValueError):
                raise GroupLoadError(f"line {lineno}: bad order line {raw!r}") from None
        else:
            if degree is None:
                raise GroupLoadError(f"line {lineno}: permutation before the degree line")
            try:
                gens.append(parse_cycles(line, degree))
            except CycleParseError as e:
                raise GroupLoadError(f"line {lineno}: {e}") from None
    if name is None or degree is None:
        raise GroupLoadError("generator file needs 'name' and 'degree' lines")
    return GroupSpec(name, degree, tuple(gens), order, provenance, source=source)


def parse_generator_json(text: str, provenance: str = "file", source: str = "") -> GroupSpec:
    try:
        d = json.loads(text)
        degree = int(d["degree"])
        gens = tuple(parse_cycles(s, degree) for s in d.get("generators", []))
        order = d.get("order")
        return GroupSpec(str(d["name"]), degree, gens, None if order is None else int(order), provenance, source=source)
    except (KeyError, ValueError, TypeError) as e:
        raise GroupLoadError(f"bad JSON generator file: {e}") from None


def load_generators(path: str | Path, check: bool = True) -> GroupSpec:
    """Read a generator file; with ``check`` the declared order is verified."""
    p = Path(path)
    text = p.read_text()
    if text.lstrip().startswith("{"):
        spec = parse_generator_json(text, source=str(p))
    else:
        spec = parse_generator_text(text, source=str(p))
    if check:
        verify_order(spec)
    return spec


def verify_order(spec: GroupSpec) -> int:
    from unidom.chain import build_chain

    ch = build_chain([g.images for g in spec.generators], spec.degree)
    if spec.expected_order is not None and ch.order != spec.expected_order:
        raise GroupLoadError(f"{spec.name}: declared order {spec.expected_order} but generators give {ch.order}")
    return ch.order


def bundled(name: str, check: bool = True) -> GroupSpec:
    key = {n.lower(): n for n in BUNDLED}.get(name.lower())
    if key is None:
        raise GroupLoadError(f"no bundled group {name!r}; available: {', '.join(BUNDLED)}")
    text = resources.files("unidom.data").joinpath(f"{key}.gens").read_text()
    spec = parse_generator_text(text, provenance="builtin", source=f"unidom/data/{key}.gens")
    if check:
        verify_order(spec)
    return spec


def resolve(spec: str) -> GroupSpec:
    """Group from a short text spec: ``alt 5``, ``sym 6``, ``psl2 9``,
    ``file path/to/gens``, or a bundled name such as ``M11``."""
    parts = spec.replace(":", " ").split()
    if not parts:
        raise GroupLoadError("empty group spec")
    kind = parts[0].lower()
    try:
        if kind in ("alt", "a") and len(parts) == 2:
            return alternating(int(parts[1]))
        if kind in ("sym", "s") and len(parts) == 2:
            return symmetric(int(parts[1]))
        if kind in ("psl2", "l2") and len(parts) == 2:
            return psl2(int(parts[1]))
    except ValueError as e:
        raise GroupLoadError(str(e)) from None
    if kind == "file" and len(parts) >= 2:
        path = " ".join(parts[1:])
        p = Path(path)
        if not p.exists():
            stem = p.name.split(".")[0]
            if stem.upper() in BUNDLED or stem.lower() in (b.lower() for b in BUNDLED):
                return bundled(stem)
            raise GroupLoadError(f"no such file: {path}")
        return load_generators(p)
    if len(parts) == 1:
        s = parts[0]
        if s.lower().startswith(("alt", "sym")) and s[3:].isdigit():
            return resolve(f"{s[:3]} {s[3:]}")
        if s.upper().startswith("A") and s[1:].isdigit():
            return alternating(int(s[1:]))
        if s.upper().startswith("S") and s[1:].isdigit():
            return symmetric(int(s[1:]))
        if s.upper().startswith("L2(") and s.endswith(")"):
            return psl2(int(s[3:-1]))
        return bundled(s)
    raise GroupLoadError(f"cannot parse group spec {spec!r}")
