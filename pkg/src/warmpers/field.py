"""Exact arithmetic over the prime field Z/p.

Matrix code stores coefficients as plain reduced integers and keeps a single
PrimeField per matrix universe; FieldElement is the checked value type for
callers that want operator syntax and modulus validation.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import UsageError


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p < 4:
        return True
    if p % 2 == 0:
        return False
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


class PrimeField:
    """The field Z/p for a prime p. Elements are ints in [0, p)."""

    __slots__ = ("p", "_inv_table")

    def __init__(self, p: int = 2):
        if not isinstance(p, int) or not _is_prime(p):
            raise UsageError(f"field modulus must be prime, got {p!r}")
        self.p = p
        # small table keeps inversions out of hot loops; p is tiny in practice
        if p <= 1 << 16:
            self._inv_table = [0] * p
            for a in range(1, p):
                self._inv_table[a] = pow(a, p - 2, p)
        else:
            self._inv_table = None

    def normalize(self, x: int) -> int:
        return x % self.p

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.p

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.p

    def mul(self, a: int, b: int) -> int:
        return (a * b) % self.p

    def neg(self, a: int) -> int:
        return (-a) % self.p

    def inv(self, a: int) -> int:
        a %= self.p
        if a == 0:
            raise ZeroDivisionError("inverse of 0 in Z/%d" % self.p)
        if self._inv_table is not None:
            return self._inv_table[a]
        return pow(a, self.p - 2, self.p)

    def div(self, a: int, b: int) -> int:
        return (a * self.inv(b)) % self.p

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("PrimeField", self.p))

    def __repr__(self):
        return f"PrimeField({self.p})"


GF2 = PrimeField(2)


@dataclass(frozen=True)
class FieldElement:
    """A fully reduced residue together with its modulus."""

    value: int
    p: int

    def __post_init__(self):
        if not _is_prime(self.p):
            raise UsageError(f"field modulus must be prime, got {self.p!r}")
        object.__setattr__(self, "value", self.value % self.p)

    def _check(self, other: "FieldElement") -> None:
        if self.p != other.p:
            raise UsageError(f"modulus mismatch: {self.p} vs {other.p}")

    def __add__(self, other: "FieldElement") -> "FieldElement":
        self._check(other)
        return FieldElement((self.value + other.value) % self.p, self.p)

    def __sub__(self, other: "FieldElement") -> "FieldElement":
        self._check(other)
        return FieldElement((self.value - other.value) % self.p, self.p)

    def __mul__(self, other: "FieldElement") -> "FieldElement":
        self._check(other)
        return FieldElement((self.value * other.value) % self.p, self.p)

    def __neg__(self) -> "FieldElement":
        return FieldElement(-self.value % self.p, self.p)

    def inverse(self) -> "FieldElement":
        if self.value == 0:
            raise ZeroDivisionError("inverse of 0 in Z/%d" % self.p)
        return FieldElement(pow(self.value, self.p - 2, self.p), self.p)

    def __truediv__(self, other: "FieldElement") -> "FieldElement":
        self._check(other)
        return self * other.inverse()

    def __bool__(self) -> bool:
        return self.value != 0


def field_add(a: FieldElement, b: FieldElement) -> FieldElement:
    return a + b


def field_mul(a: FieldElement, b: FieldElement) -> FieldElement:
    return a * b


def field_inv(a: FieldElement) -> FieldElement:
    return a.inverse()
