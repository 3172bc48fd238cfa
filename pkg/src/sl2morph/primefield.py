"""Exact arithmetic in the prime field Z/pZ and exponent utilities.

The field here is the reference side of everything downstream: the black box
field oracle is tested against it, and the square root run over it is the
desk-checkable twin of the black-box version.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

_MAX_PRIME = 1 << 61  # products must fit comfortably in native big-int fast path

_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, valid far beyond the supported prime range."""
    if n < 2:
        return False
    for q in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % q == 0:
            return n == q
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class PrimeModulus:
    """An odd prime p >= 13, validated at construction."""

    p: int

    def __post_init__(self):
        if not isinstance(self.p, int):
            raise TypeError(f"modulus must be an int, got {type(self.p).__name__}")
        if self.p >= _MAX_PRIME:
            raise ValueError(f"modulus {self.p} exceeds the supported width (< 2**61)")
        if self.p % 2 == 0 or self.p < 13:
            raise ValueError(f"modulus must be an odd prime >= 13, got {self.p}")
        if not is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")


class PFElement:
    """Element of Z/pZ; value kept reduced to [0, p)."""

    __slots__ = ("value", "mod")

    def __init__(self, value: int, mod: PrimeModulus):
        self.value = value % mod.p
        self.mod = mod

    def _check(self, other: "PFElement") -> None:
        if self.mod.p != other.mod.p:
            raise ValueError(f"modulus mismatch: {self.mod.p} vs {other.mod.p}")

    def __add__(self, other):
        self._check(other)
        return PFElement(self.value + other.value, self.mod)

    def __sub__(self, other):
        self._check(other)
        return PFElement(self.value - other.value, self.mod)

    def __mul__(self, other):
        self._check(other)
        return PFElement(self.value * other.value, self.mod)

    def __neg__(self):
        return PFElement(-self.value, self.mod)

    def inv(self) -> "PFElement":
        if self.value == 0:
            raise ZeroDivisionError(f"0 has no inverse mod {self.mod.p}")
        return PFElement(pow(self.value, self.mod.p - 2, self.mod.p), self.mod)

    def pow(self, n: int) -> "PFElement":
        if n < 0:
            return self.inv().pow(-n)
        return PFElement(pow(self.value, n, self.mod.p), self.mod)

    def __eq__(self, other):
        if isinstance(other, PFElement):
            return self.value == other.value and self.mod.p == other.mod.p
        if isinstance(other, int):
            return self.value == other % self.mod.p
        return NotImplemented

    def __hash__(self):
        return hash((self.value, self.mod.p))

    def __int__(self):
        return self.value

    def __repr__(self):
        return f"PF({self.value} mod {self.mod.p})"


class PrimeField:
    """Field-oracle facade over PFElement, shaped like the black box field.

    Matrix code takes any object with this surface (zero, one, add, sub, mul,
    neg, inv, eq, from_int), so the same matrix routines run over Z/pZ and
    over the black box field.
    """

    def __init__(self, mod: Union[PrimeModulus, int]):
        if isinstance(mod, int):
            mod = PrimeModulus(mod)
        self.mod = mod
        self.p = mod.p
        self.zero = PFElement(0, mod)
        self.one = PFElement(1, mod)

    def from_int(self, n: int) -> PFElement:
        return PFElement(n, self.mod)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def inv(self, a):
        return a.inv()

    def eq(self, a, b) -> bool:
        return a == b

    def random(self, rng) -> PFElement:
        return PFElement(rng.randrange(self.p), self.mod)

    def random_nonzero(self, rng) -> PFElement:
        return PFElement(rng.randrange(1, self.p), self.mod)

    def __repr__(self):
        return f"PrimeField({self.p})"


def pf_arith(a: PFElement, b: PFElement, kind: str) -> PFElement:
    if kind == "add":
        return a + b
    if kind == "sub":
        return a - b
    if kind == "mul":
        return a * b
    raise ValueError(f"unknown arithmetic kind {kind!r}")


def pf_inv(a: PFElement) -> PFElement:
    return a.inv()


def pf_pow(a: PFElement, n: int) -> PFElement:
    return a.pow(n)


class _NonResidue:
    """Sentinel result of a square root applied to a quadratic non-residue."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "NonResidue"


NON_RESIDUE = _NonResidue()


@dataclass(frozen=True)
class ExponentData:
    """E = odd * 2**two_valuation with the binary expansion of the odd part."""

    E: int
    odd: int
    two_valuation: int
    bits: tuple

    def __post_init__(self):
        if self.odd << self.two_valuation != self.E or self.odd % 2 == 0:
            raise ValueError("inconsistent exponent decomposition")


def odd_part(E: int) -> ExponentData:
    """Split E >= 1 into odd * 2**v and record the odd part's bits, msb first."""
    if E < 1:
        raise ValueError(f"exponent must be positive, got {E}")
    v = 0
    odd = E
    while odd % 2 == 0:
        odd //= 2
        v += 1
    bits = tuple(int(ch) for ch in bin(odd)[2:])
    return ExponentData(E=E, odd=odd, two_valuation=v, bits=bits)


def sl2_exponent(p) -> int:
    """An exponent of SL2(p): lcm(2p, p-1, p+1).

    Accepts a PrimeModulus or a bare odd prime (so small primes can be used
    in cross-checks even though the main pipeline requires p >= 13).
    """
    pv = p.p if isinstance(p, PrimeModulus) else int(p)
    if pv < 3 or not is_prime(pv):
        raise ValueError(f"need an odd prime, got {pv}")
    return math.lcm(2 * pv, pv - 1, pv + 1)


def pow_by_bits(a: PFElement, bits) -> PFElement:
    """Left-to-right square and multiply driven by a msb-first bit sequence."""
    acc = PFElement(1, a.mod)
    for bit in bits:
        acc = acc * acc
        if bit:
            acc = acc * a
    return acc


def pf_sqrt(a: PFElement):
    """Square root in Z/pZ via Tonelli-Shanks, or NON_RESIDUE.

    Of the two roots +-r the one with the smaller integer representative is
    returned, so results are deterministic.
    """
    p = a.mod.p
    if a.value == 0:
        return a
    if pow(a.value, (p - 1) // 2, p) != 1:
        return NON_RESIDUE
    exp = odd_part(p - 1)
    q, s = exp.odd, exp.two_valuation
    # find a non-residue to seed the 2-group corrections
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1
    c = pow(z, q, p)
    x = pow(a.value, (q + 1) // 2, p)
    t = pow(a.value, q, p)
    m = s
    while t != 1:
        i = 0
        t2 = t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        x = x * b % p
        t = t * b % p * b % p
        c = b * b % p
        m = i
    root = min(x, p - x)
    return PFElement(root, a.mod)
