"""Pure-Python hot kernels.

Permutations are plain tuples ``p`` with ``p[i]`` the image of point ``i``.
Products act left to right: ``mul(p, q)`` applies ``p`` first, then ``q``.
The compiled twin in ``_kernels.pyx`` exposes the same functions.
"""

from __future__ import annotations

__all__ = [
    "mul",
    "inv",
    "conj",
    "is_identity",
    "orbit_transversal",
    "extend_transversal",
    "sift",
    "coset_canon",
    "orbits",
    "fixed_count",
]


def mul(p, q):
    return tuple(map(q.__getitem__, p))


def inv(p):
    r = [0] * len(p)
    for i, j in enumerate(p):
        r[j] = i
    return tuple(r)


def conj(p, g):
    """``g^-1 p g``: the image of ``p`` under relabelling by ``g``."""
    r = [0] * len(p)
    for i, j in enumerate(p):
        r[g[i]] = g[j]
    return tuple(r)


def is_identity(p):
    for i, j in enumerate(p):
        if i != j:
            return False
    return True


def orbit_transversal(gens, point, degree):
    """Breadth-first orbit of ``point``.

    Returns ``(orbit, trans, tinv)`` where ``trans[x]`` maps ``point`` to
    ``x`` and ``tinv[x]`` is its inverse.
    """
    ident = tuple(range(degree))
    trans = {point: ident}
    tinv = {point: ident}
    orbit = [point]
    _grow(gens, orbit, trans, tinv, 0)
    return orbit, trans, tinv


def extend_transversal(gens, new_gens, orbit, trans, tinv):
    """Grow an existing orbit after ``new_gens`` were appended to ``gens``.

    Old orbit points only need the new generators; points discovered
    afterwards see every generator.
    """
    old = len(orbit)
    for y in orbit[:old]:
        u = trans[y]
        for s in new_gens:
            z = s[y]
            if z not in trans:
                v = tuple(map(s.__getitem__, u))
                trans[z] = v
                tinv[z] = inv(v)
                orbit.append(z)
    _grow(gens, orbit, trans, tinv, old)


def _grow(gens, orbit, trans, tinv, start):
    i = start
    while i < len(orbit):
        y = orbit[i]
        u = trans[y]
        for s in gens:
            z = s[y]
            if z not in trans:
                v = tuple(map(s.__getitem__, u))
                trans[z] = v
                tinv[z] = inv(v)
                orbit.append(z)
        i += 1


def sift(base, tinvs, g, start=0):
    """Strip ``g`` through levels ``start..``.

    Returns ``(residue, level)``; ``level == len(base)`` means every level
    was passed and ``residue`` fixes the whole base.
    """
    k = len(base)
    i = start
    while i < k:
        t = tinvs[i].get(g[base[i]])
        if t is None:
            return g, i
        g = tuple(map(t.__getitem__, g))
        i += 1
    return g, k


def coset_canon(base, orbits_, transs, g):
    """Lexicographically least element of the right coset ``H g``.

    ``H`` is given by its chain (base, level orbits, transversals).  The
    result is unique for the coset, so its image tuple is a coset key.
    """
    for i in range(len(base)):
        orb = orbits_[i]
        if len(orb) == 1:
            continue
        best = None
        bval = len(g)
        for a in orb:
            v = g[a]
            if v < bval:
                bval = v
                best = a
        if best != base[i]:
            u = transs[i][best]
            g = tuple(map(g.__getitem__, u))
    return g


def orbits(gens, degree):
    """Orbit label for every point (label = least point of the orbit)."""
    label = [-1] * degree
    for p in range(degree):
        if label[p] >= 0:
            continue
        label[p] = p
        stack = [p]
        while stack:
            y = stack.pop()
            for s in gens:
                z = s[y]
                if label[z] < 0:
                    label[z] = p
                    stack.append(z)
    return label


def fixed_count(p):
    n = 0
    for i, j in enumerate(p):
        if i == j:
            n += 1
    return n
