"""Arithmetic around maximal overgroups of elements of A_n.

H is the set of point counts of projective spaces, n = (q^d - 1)/(q - 1)
with q a prime power and d >= 2.  An n-cycle with n prime lies in a
primitive proper subgroup other than AGL_1 exactly when n is in H.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from unidom.field import FieldError, factor_prime_power, is_prime


def is_prime_power(q: int) -> bool:
    try:
        factor_prime_power(q)
    except FieldError:
        return False
    return True


@dataclass(frozen=True)
class HWitness:
    n: int
    witnesses: tuple[tuple[int, int], ...]

    def __bool__(self) -> bool:
        return bool(self.witnesses)

    def check(self) -> None:
        for q, d in self.witnesses:
            assert is_prime_power(q) and d >= 2
            assert (q**d - 1) // (q - 1) == self.n


def _proj_points(q: int, d: int) -> int:
    return (q**d - 1) // (q - 1)


def script_H(n: int) -> HWitness:
    """All (q, d) with n = (q^d - 1)/(q - 1), q a prime power, d >= 2."""
    if n < 3:
        raise ValueError("n must be at least 3")
    out = []
    for d in range(2, n.bit_length() + 1):
        # the count is increasing in q, so bisect on q in [2, n]
        lo, hi = 2, n
        while lo < hi:
            mid = (lo + hi) // 2
            if _proj_points(mid, d) < n:
                lo = mid + 1
            else:
                hi = mid
        if _proj_points(lo, d) == n and is_prime_power(lo):
            out.append((lo, d))
    return HWitness(n, tuple(out))


def in_H(n: int) -> bool:
    return bool(script_H(n))


def ell_bound(r: int) -> int:
    """1 + sum over (q,d) in H_r of (r-1)/d."""
    if not is_prime(r):
        raise ValueError(f"{r} is not prime")
    w = script_H(r)
    if not w:
        raise ValueError(f"{r} is not in H")
    total = Fraction(1) + sum(Fraction(r - 1, d) for _q, d in w.witnesses)
    if total.denominator != 1:
        raise ArithmeticError(f"non-integral bound {total} for r={r}")
    value = int(total)
    assert value < r * math.log2(r)
    return value


def shape_for(n: int) -> list[int]:
    """The cycle shape used for A_n: three near-equal cycles for odd n,
    [k, n-k] with k = m - gcd(m-1, 2) for n = 2m."""
    if n < 5:
        raise ValueError("n must be at least 5")
    if n % 2 == 0:
        m = n // 2
        k = m - math.gcd(m - 1, 2)
        return [k, n - k]
    m, r = divmod(n, 3)
    if r == 0:
        shape = [m + 2, m, m - 2]
    elif r == 1:
        shape = [m + 1, m + 1, m - 1]
    else:
        shape = [m + 2, m, m]
    return [x for x in shape if x > 0]


def imprimitive_containment(shape: Sequence[int], n: int) -> tuple[bool, str]:
    """Whether an element of this shape (cycle lengths summing to n, fixed
    points included) lies in some imprimitive subgroup of S_n.

    Returns the verdict and the clause that decided it.
    """
    ls = [int(x) for x in shape]
    if sum(ls) != n or any(x < 1 for x in ls):
        raise ValueError(f"shape {list(shape)} does not partition {n}")
    if len(ls) == 1:
        return (not is_prime(n)), "n-cycle: contained iff n is composite"
    if len(ls) == 2:
        g = math.gcd(*ls)
        return g > 1, f"two cycles: gcd = {g}"
    if len(ls) == 3:
        g = math.gcd(*ls)
        if g > 1:
            return True, f"three cycles: common gcd {g}"
        for i, j, k in ((0, 1, 2), (0, 2, 1), (1, 2, 0)):
            gij = math.gcd(ls[i], ls[j])
            for d in range(1, gij + 1):
                if gij % d == 0 and ls[k] % ((ls[i] + ls[j]) // d) == 0:
                    return True, f"three cycles: ({ls[i]}+{ls[j]})/{d} divides {ls[k]}"
        return False, "three cycles: no block system"
    raise ValueError("only shapes with at most three cycles are covered")


def binom_f(l: int, m: int) -> int:
    """sum_{j <= min(l, m//2)} C(l, j) C(4l, 2m - 4j)  (C(a,b) = 0 for b > a)."""
    if l < 2 or not 0 <= m <= 4 * l:
        raise ValueError("need l >= 2 and 0 <= m <= 4l")
    return sum(math.comb(l, j) * math.comb(4 * l, 2 * m - 4 * j) for j in range(min(l, m // 2) + 1))


def binom_check(l: int, m: int) -> bool:
    return binom_f(l, m) >= math.comb(4 * l, m)


def _factor(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def totient(n: int) -> int:
    v = n
    for p in _factor(n):
        v = v // p * (p - 1)
    return v


def _prime_or_square(n: int) -> bool:
    f = _factor(n)
    return len(f) == 1 and next(iter(f.values())) in (1, 2)


def _rs_or_cube(n: int) -> bool:
    f = _factor(n)
    if 2 in f:
        return False
    if len(f) == 2:
        return all(e == 1 for e in f.values())
    return len(f) == 1 and next(iter(f.values())) == 3


def mu_alt_predicted(n: int) -> int:
    """The value of mu(A_n) from the classification."""
    if n < 5:
        raise ValueError("n must be at least 5")
    h = in_H(n)
    if n == 5 or (n >= 8 and n % 2 == 0) or (_prime_or_square(n) and n not in (11, 23) and not h):
        return 1
    if n in (6, 7, 11, 17, 23) or (_rs_or_cube(n) and not h):
        return 2
    return 3


def pgam_bracket(n: int, q: int, d: int, f: int) -> tuple[Fraction, Fraction]:
    """phi(n)/(2df) <= N <= phi(n)/d for the number N of PGammaL_d(q)
    subgroups of A_n containing a given n-cycle."""
    p, a = factor_prime_power(q)
    if a != f:
        raise ValueError(f"q = {q} is {p}^{a}, not p^{f}")
    if d < 2 or _proj_points(q, d) != n:
        raise ValueError(f"{n} != ({q}^{d}-1)/({q}-1)")
    phi = totient(n)
    return Fraction(phi, 2 * d * f), Fraction(phi, d)
