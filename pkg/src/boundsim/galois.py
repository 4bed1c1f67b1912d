"""Finite fields GF(p^n) with full addition and multiplication lookup tables.

Elements are encoded as integers ``0 .. p^n - 1`` whose base-``p`` digits are
the polynomial coefficients, least significant digit = constant term.  So in
GF(4) with modulus ``x^2 + x + 1`` the element ``2`` is ``x`` and ``3`` is
``x + 1``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import NotPrime, TooLarge

MAX_ORDER = 16


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    return all(p % k for k in range(2, int(p**0.5) + 1))


def prime_power(d: int) -> tuple[int, int] | None:
    """Return ``(p, n)`` with ``d == p**n`` or ``None`` if ``d`` is no prime power."""
    if d < 2:
        return None
    for p in range(2, d + 1):
        if d % p == 0:
            n, rest = 0, d
            while rest % p == 0:
                rest //= p
                n += 1
            return (p, n) if rest == 1 else None
    return None


def _poly_mod(a: list[int], mod: list[int], p: int) -> list[int]:
    """Remainder of ``a`` divided by the monic polynomial ``mod`` (low-to-high coefficients)."""
    a = [x % p for x in a]
    deg = len(mod) - 1
    while len(a) > deg:
        lead = a[-1]
        if lead:
            shift = len(a) - len(mod)
            for i, m in enumerate(mod):
                a[shift + i] = (a[shift + i] - lead * m) % p
        a.pop()
    return a + [0] * (deg - len(a))


def _is_irreducible(poly: list[int], p: int) -> bool:
    n = len(poly) - 1
    for deg in range(1, n // 2 + 1):
        for tail in itertools.product(range(p), repeat=deg):
            if not any(_poly_mod(poly, list(tail) + [1], p)):
                return False
    return True


def smallest_irreducible(p: int, n: int) -> list[int]:
    """Lexicographically smallest monic irreducible polynomial of degree ``n`` over Z_p.

    Candidates ``x^n + a_{n-1} x^{n-1} + ... + a_0`` are ordered by the tuple
    ``(a_{n-1}, ..., a_0)``.  Returned low-to-high, including the leading 1.
    """
    for high_to_low in itertools.product(range(p), repeat=n):
        poly = list(reversed(high_to_low)) + [1]
        if _is_irreducible(poly, p):
            return poly
    raise AssertionError("no irreducible polynomial found")  # unreachable for prime p


@dataclass(frozen=True)
class GaloisField:
    p: int
    n: int
    modulus: tuple[int, ...]
    add: np.ndarray = field(repr=False)
    mul: np.ndarray = field(repr=False)

    @property
    def order(self) -> int:
        return self.p**self.n

    def neg(self, a: int) -> int:
        return int(np.flatnonzero(self.add[a] == 0)[0])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("0 has no multiplicative inverse")
        return int(np.flatnonzero(self.mul[a] == 1)[0])

    def digits(self, a: int) -> list[int]:
        return [(a // self.p**j) % self.p for j in range(self.n)]

    def trace(self, a: int) -> int:
        """Absolute trace ``a + a^p + ... + a^(p^(n-1))``, an element of the prime field."""
        total, x = 0, a
        for _ in range(self.n):
            total = int(self.add[total, x])
            y = 1
            for _ in range(self.p):
                y = int(self.mul[y, x])
            x = y
        return total


def gf_make(p: int, n: int = 1) -> GaloisField:
    """Build GF(p^n) with exhaustive lookup tables (p^n <= 16)."""
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")
    if n < 1:
        raise TooLarge(f"extension degree must be >= 1, got {n}")
    d = p**n
    if d > MAX_ORDER:
        raise TooLarge(f"field order {d} exceeds {MAX_ORDER}")
    modulus = smallest_irreducible(p, n) if n > 1 else [0, 1]
    add = np.zeros((d, d), dtype=np.int64)
    mul = np.zeros((d, d), dtype=np.int64)

    def encode(coeffs):
        return sum(int(c) * p**j for j, c in enumerate(coeffs))

    digits = [[(a // p**j) % p for j in range(n)] for a in range(d)]
    for a in range(d):
        for b in range(d):
            add[a, b] = encode([(x + y) % p for x, y in zip(digits[a], digits[b])])
            prod = [0] * (2 * n - 1)
            for i, x in enumerate(digits[a]):
                for j, y in enumerate(digits[b]):
                    prod[i + j] += x * y
            mul[a, b] = encode(_poly_mod(prod, modulus, p)) if n > 1 else (prod[0] % p)
    add.setflags(write=False)
    mul.setflags(write=False)
    return GaloisField(p, n, tuple(modulus), add, mul)
