"""Prime field helpers: primitive roots, discrete logs, power residues."""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd

MAX_PRIME = 97


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    k = 3
    while k * k <= n:
        if n % k == 0:
            return False
        k += 2
    return True


def check_prime(p: int) -> None:
    """Raise ValueError unless p is a prime with 3 < p <= MAX_PRIME."""
    if not isinstance(p, int) or isinstance(p, bool):
        raise ValueError(f"p must be an integer, got {p!r}")
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if p <= 3:
        raise ValueError(f"p must exceed 3, got {p}")
    if p > MAX_PRIME:
        raise ValueError(f"p={p} is above the supported ceiling {MAX_PRIME}")


def multiplicative_order(x: int, p: int) -> int:
    x %= p
    if x == 0:
        raise ValueError("0 has no multiplicative order")
    k, y = 1, x
    while y != 1:
        y = y * x % p
        k += 1
    return k


def find_primitive_root(p: int) -> int:
    """Smallest positive integer generating the multiplicative group mod p."""
    check_prime(p)
    for g in range(2, p):
        if multiplicative_order(g, p) == p - 1:
            return g
    raise AssertionError("unreachable: F_p^* is cyclic")


@dataclass(frozen=True)
class PrimeField:
    p: int
    w: int = field(default=0)
    _log: tuple = field(default=(), repr=False, compare=False)

    def __post_init__(self):
        check_prime(self.p)
        w = self.w or find_primitive_root(self.p)
        if multiplicative_order(w, self.p) != self.p - 1:
            raise ValueError(f"{w} is not a primitive root mod {self.p}")
        log = [-1] * self.p
        y = 1
        for k in range(self.p - 1):
            log[y] = k
            y = y * w % self.p
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "_log", tuple(log))

    def exp_map(self, x: int) -> int:
        """Discrete log base w; -1 for zero."""
        return self._log[x % self.p]

    def inv(self, x: int) -> int:
        x %= self.p
        if x == 0:
            raise ZeroDivisionError("inverse of 0 in F_p")
        return pow(x, self.p - 2, self.p)

    def power_of_w(self, k: int) -> int:
        return pow(self.w, k % (self.p - 1), self.p)

    def positive_half(self) -> frozenset:
        """The set {w^a : 0 <= a < (p-1)/2}."""
        return frozenset(self.power_of_w(a) for a in range((self.p - 1) // 2))

    def is_square(self, x: int) -> bool:
        x %= self.p
        return x != 0 and self._log[x] % 2 == 0


def exp_map(x: int, fld: PrimeField) -> int:
    return fld.exp_map(x)


def power_residue_index(a: int, p: int) -> int:
    """Index of the image of x -> x^a in F_p^*, i.e. gcd(a, p-1)."""
    if a < 1:
        raise ValueError("exponent must be positive")
    return gcd(a, p - 1)

