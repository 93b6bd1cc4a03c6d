"""Small finite fields GF(p^a) with elements encoded as integers.

An element ``c_0 + c_1 x + ... + c_{a-1} x^{a-1}`` is stored as the
integer ``sum c_i p^i``.  Arithmetic goes through precomputed tables.
"""

from __future__ import annotations

import itertools
from functools import cached_property

# Least monic irreducible per (p, a), coefficients (c_0, ..., c_{a-1}) of
# x^a + c_{a-1} x^{a-1} + ... + c_0, ordered by sum c_i p^i.
IRREDUCIBLE_MODULI: dict[tuple[int, int], tuple[int, ...]] = {
    (2, 2): (1, 1),
    (2, 3): (1, 1, 0),
    (2, 4): (1, 1, 0, 0),
    (2, 5): (1, 0, 1, 0, 0),
    (2, 6): (1, 1, 0, 0, 0, 0),
    (3, 2): (1, 0),
    (3, 3): (1, 2, 0),
    (3, 4): (2, 1, 0, 0),
    (5, 2): (2, 0),
    (7, 2): (1, 0),
}


class FieldError(ValueError):
    pass


def factor_prime_power(q: int) -> tuple[int, int]:
    """``(p, a)`` with ``q = p**a``; raises FieldError otherwise."""
    if q < 2:
        raise FieldError(f"{q} is not a prime power")
    p = next(d for d in itertools.count(2) if q % d == 0)
    a = 0
    r = q
    while r % p == 0:
        r //= p
        a += 1
    if r != 1:
        raise FieldError(f"{q} is not a prime power")
    return p, a


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def _poly_has_root_or_factor(p: int, coeffs: tuple[int, ...]) -> bool:
    """True if the monic polynomial with low coefficients ``coeffs`` is reducible."""
    a = len(coeffs)
    f = list(coeffs) + [1]
    # trial division by every monic polynomial of degree 1..a//2
    for d in range(1, a // 2 + 1):
        for low in itertools.product(range(p), repeat=d):
            g = list(low) + [1]
            r = f[:]
            for i in range(len(r) - 1, d - 1, -1):
                c = r[i]
                if c:
                    for j in range(d + 1):
                        r[i - d + j] = (r[i - d + j] - c * g[j]) % p
            if not any(r[:d]):
                return True
    return False


def is_irreducible(p: int, coeffs: tuple[int, ...]) -> bool:
    return not _poly_has_root_or_factor(p, coeffs)


def least_irreducible(p: int, a: int) -> tuple[int, ...]:
    """Brute-force search in the documented order (used to audit the table)."""
    for v in range(p**a):
        coeffs = tuple((v // p**i) % p for i in range(a))
        if is_irreducible(p, coeffs):
            return coeffs
    raise FieldError("no irreducible polynomial found")


class SmallField:
    """GF(p^a).  Zero is 0 and one is 1 in the integer encoding."""

    def __init__(self, q: int):
        p, a = factor_prime_power(q)
        if not is_prime(p):
            raise FieldError(f"{q} is not a prime power")
        self.p, self.a, self.q = p, a, q
        if a == 1:
            self.modulus: tuple[int, ...] = ()
        else:
            mod = IRREDUCIBLE_MODULI.get((p, a)) or least_irreducible(p, a)
            if not is_irreducible(p, mod):
                raise FieldError(f"modulus {mod} is reducible over GF({p})")
            self.modulus = mod
        self._build_tables()

    def _digits(self, v: int) -> list[int]:
        return [(v // self.p**i) % self.p for i in range(self.a)]

    def _from_digits(self, d) -> int:
        return sum(c * self.p**i for i, c in enumerate(d))

    def _build_tables(self) -> None:
        p, a, q = self.p, self.a, self.q
        digits = [self._digits(v) for v in range(q)]
        self.add_table = [[self._from_digits([(x + y) % p for x, y in zip(digits[u], digits[v])]) for v in range(q)] for u in range(q)]
        self.neg_table = [self._from_digits([(-x) % p for x in digits[u]]) for u in range(q)]
        mul = [[0] * q for _ in range(q)]
        for u in range(q):
            for v in range(u, q):
                prod = [0] * (2 * a - 1)
                for i, x in enumerate(digits[u]):
                    if x:
                        for j, y in enumerate(digits[v]):
                            prod[i + j] = (prod[i + j] + x * y) % p
                # reduce with x^a = -(c_0 + ... + c_{a-1} x^{a-1})
                for k in range(len(prod) - 1, a - 1, -1):
                    c = prod[k]
                    if c:
                        prod[k] = 0
                        for i, m in enumerate(self.modulus):
                            prod[k - a + i] = (prod[k - a + i] - c * m) % p
                w = self._from_digits(prod[:a])
                mul[u][v] = mul[v][u] = w
        self.mul_table = mul
        self.inv_table = [0] * q
        for u in range(1, q):
            for v in range(1, q):
                if mul[u][v] == 1:
                    self.inv_table[u] = v
                    break

    def add(self, u: int, v: int) -> int:
        return self.add_table[u][v]

    def neg(self, u: int) -> int:
        return self.neg_table[u]

    def mul(self, u: int, v: int) -> int:
        return self.mul_table[u][v]

    def inv(self, u: int) -> int:
        if u == 0:
            raise ZeroDivisionError("inverse of zero")
        return self.inv_table[u]

    def mult_order(self, u: int) -> int:
        k, x = 1, u
        while x != 1:
            x = self.mul(x, u)
            k += 1
        return k

    @cached_property
    def primitive_element(self) -> int:
        """Least (in the encoding) generator of the multiplicative group."""
        for u in range(2, self.q) if self.q > 2 else [1]:
            if self.mult_order(u) == self.q - 1:
                return u
        return 1

    @property
    def x(self) -> int:
        """The class of the indeterminate (generates the field over GF(p))."""
        return self.p if self.a > 1 else 1

    def __repr__(self) -> str:
        return f"GF({self.q})"
