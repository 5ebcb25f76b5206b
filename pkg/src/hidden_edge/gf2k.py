"""Arithmetic in GF(2^k) for 2 <= k <= 32.

Elements are polynomials over GF(2) stored as k-bit integers.  Each degree
uses the fixed reduction polynomial in ``REDUCTION``: the irreducible
trinomial x^k + x^a + 1 with the smallest a when one exists, otherwise the
lexicographically smallest irreducible pentanomial.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

MIN_K, MAX_K = 2, 32

REDUCTION: dict[int, int] = {
    2: 0x7,
    3: 0xB,
    4: 0x13,
    5: 0x25,
    6: 0x43,
    7: 0x83,
    8: 0x11B,
    9: 0x203,
    10: 0x409,
    11: 0x805,
    12: 0x1009,
    13: 0x201B,
    14: 0x4021,
    15: 0x8003,
    16: 0x1002B,
    17: 0x20009,
    18: 0x40009,
    19: 0x80027,
    20: 0x100009,
    21: 0x200005,
    22: 0x400003,
    23: 0x800021,
    24: 0x100001B,
    25: 0x2000009,
    26: 0x400001B,
    27: 0x8000027,
    28: 0x10000003,
    29: 0x20000005,
    30: 0x40000003,
    31: 0x80000009,
    32: 0x10000008D,
}


@dataclass(frozen=True)
class FieldElement:
    bits: int
    k: int

    def __post_init__(self) -> None:
        if not MIN_K <= self.k <= MAX_K:
            raise ValueError(f"field degree {self.k} outside [{MIN_K}, {MAX_K}]")
        if not 0 <= self.bits < 1 << self.k:
            raise ValueError(f"{self.bits} is not a {self.k}-bit value")

    def __int__(self) -> int:
        return self.bits


def _same_field(x: FieldElement, y: FieldElement) -> int:
    if x.k != y.k:
        raise ValueError(f"elements of GF(2^{x.k}) and GF(2^{y.k}) cannot be combined")
    return x.k


def mul_bits(a: int, b: int, k: int) -> int:
    """Carry-less product of k-bit ints reduced modulo ``REDUCTION[k]``."""
    poly = REDUCTION[k]
    top = 1 << k
    acc = 0
    while b:
        if b & 1:
            acc ^= a
        b >>= 1
        a <<= 1
        if a & top:
            a ^= poly
    return acc


def inv_bits(a: int, k: int) -> int:
    """a^(2^k - 2) by square-and-multiply."""
    if a == 0:
        raise ZeroDivisionError("0 has no inverse in GF(2^k)")
    result, base, e = 1, a, (1 << k) - 2
    while e:
        if e & 1:
            result = mul_bits(result, base, k)
        base = mul_bits(base, base, k)
        e >>= 1
    return result


def add(x: FieldElement, y: FieldElement) -> FieldElement:
    return FieldElement(x.bits ^ y.bits, _same_field(x, y))


def mul(x: FieldElement, y: FieldElement) -> FieldElement:
    k = _same_field(x, y)
    return FieldElement(mul_bits(x.bits, y.bits, k), k)


def inv(x: FieldElement) -> FieldElement:
    return FieldElement(inv_bits(x.bits, x.k), x.k)


@lru_cache(maxsize=None)
def inverse_table(k: int) -> np.ndarray:
    """``table[a] = a^-1`` for every nonzero a (entry 0 is 0), computed by exponentiation."""
    if not MIN_K <= k <= 20:
        raise ValueError("inverse tables are only built for 2 <= k <= 20")
    base = np.arange(1 << k, dtype=np.int64)
    table = np.ones(1 << k, dtype=np.int64)
    e = (1 << k) - 2
    while e:
        if e & 1:
            table = mul_array(table, base, k)
        base = mul_array(base, base, k)
        e >>= 1
    table[0] = 0
    table.setflags(write=False)
    return table


def degree_for(count: int) -> int:
    """Smallest k >= 2 with at least ``count`` nonzero elements, i.e. ceil(log2(count + 1))."""
    k = max(MIN_K, count.bit_length())
    if k > MAX_K:
        raise ValueError(f"{count} labels exceed GF(2^{MAX_K})")
    return k


def mul_array(a: np.ndarray, b: np.ndarray, k: int) -> np.ndarray:
    """Elementwise ``mul_bits`` over int64 arrays."""
    a = np.array(a, dtype=np.int64)
    b = np.array(b, dtype=np.int64)
    poly = REDUCTION[k]
    top = 1 << k
    acc = np.zeros(np.broadcast(a, b).shape, dtype=np.int64)
    for _ in range(k):
        acc ^= np.where(b & 1, a, 0)
        b = b >> 1
        a = a << 1
        a = np.where(a & top, a ^ poly, a)
    return acc
