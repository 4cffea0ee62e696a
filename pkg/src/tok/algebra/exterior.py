"""Exterior algebra on circle generators with polynomial coefficients.

Monomials are bitmasks: bit ``i`` set means generator ``a_{i+1}`` is a factor,
and the factors are always written in increasing index order.
"""

from __future__ import annotations

from typing import Iterable, Mapping

from .poly import Poly


def popcount(x: int) -> int:
    return bin(x).count("1")


def wedge_sign(m1: int, m2: int) -> int:
    """Sign of ``m1 ^ m2`` rewritten in sorted order, or 0 if they share a factor."""
    if m1 & m2:
        return 0
    inversions = 0
    rest = m2
    while rest:
        low = rest & -rest
        # factors of m1 with larger index than this factor of m2 must pass it
        inversions += popcount(m1 & ~((low << 1) - 1))
        rest ^= low
    return -1 if inversions & 1 else 1


def left_gen_sign(i: int, m: int) -> int:
    """Sign of ``a_{i+1} ^ m`` in sorted order (0-based ``i``), 0 if already present."""
    if m >> i & 1:
        return 0
    return -1 if popcount(m & ((1 << i) - 1)) & 1 else 1


def relabel_sign(indices: Iterable[int]) -> tuple[int, int]:
    """Sort a product of distinct generators; returns ``(mask, sign)``, or ``(0, 0)`` on repeats."""
    seq = list(indices)
    mask = 0
    for i in seq:
        if mask >> i & 1:
            return 0, 0
        mask |= 1 << i
    inv = 0
    for a in range(len(seq)):
        for b in range(a + 1, len(seq)):
            if seq[a] > seq[b]:
                inv += 1
    return mask, (-1 if inv & 1 else 1)


def mask_indices(m: int) -> list[int]:
    out = []
    i = 0
    while m:
        if m & 1:
            out.append(i)
        m >>= 1
        i += 1
    return out


def mono_str(m: int) -> str:
    if not m:
        return "1"
    return "".join(f"a{i + 1}" for i in mask_indices(m))


class ExtElement:
    """Element of the exterior algebra on ``k`` generators over Z[x]."""

    __slots__ = ("k", "terms")

    def __init__(self, k: int, terms: Mapping[int, Poly | int] | None = None):
        self.k = k
        self.terms: dict[int, Poly] = {}
        for m, c in (terms or {}).items():
            if m >> k:
                raise ValueError(f"monomial {mono_str(m)} outside {k} generators")
            c = Poly._coerce(c)
            if c:
                self.terms[m] = c

    @classmethod
    def one(cls, k: int) -> "ExtElement":
        return cls(k, {0: 1})

    @classmethod
    def gen(cls, k: int, i: int, coeff: Poly | int = 1) -> "ExtElement":
        """``coeff * a_i`` with 1-based ``i``."""
        if not 1 <= i <= k:
            raise IndexError(f"generator a{i} out of range for k={k}")
        return cls(k, {1 << (i - 1): coeff})

    @classmethod
    def monomial(cls, k: int, indices: Iterable[int], coeff: Poly | int = 1) -> "ExtElement":
        """``coeff * a_{i1} a_{i2} ...`` with 1-based indices in the order given."""
        mask, sign = relabel_sign(i - 1 for i in indices)
        if sign == 0:
            return cls(k)
        return cls(k, {mask: Poly._coerce(coeff) * sign})

    def __add__(self, other: "ExtElement") -> "ExtElement":
        self._check(other)
        terms = dict(self.terms)
        for m, c in other.terms.items():
            terms[m] = terms.get(m, Poly()) + c
        return ExtElement(self.k, terms)

    def __neg__(self) -> "ExtElement":
        return ExtElement(self.k, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "ExtElement") -> "ExtElement":
        return self + (-other)

    def scale(self, p: Poly | int) -> "ExtElement":
        return ExtElement(self.k, {m: c * p for m, c in self.terms.items()})

    def __mul__(self, other: "ExtElement") -> "ExtElement":
        return ext_mul(self, other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ExtElement):
            return NotImplemented
        return self.k == other.k and self.terms == other.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def _check(self, other: "ExtElement") -> None:
        if self.k != other.k:
            raise ValueError(f"ambient mismatch: k={self.k} vs k={other.k}")

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for m in sorted(self.terms, key=lambda m: (popcount(m), mask_indices(m))):
            c = self.terms[m]
            parts.append(f"({c})*{mono_str(m)}")
        return " + ".join(parts)


def ext_mul(u: ExtElement, v: ExtElement) -> ExtElement:
    u._check(v)
    terms: dict[int, Poly] = {}
    for m1, c1 in u.terms.items():
        for m2, c2 in v.terms.items():
            s = wedge_sign(m1, m2)
            if s:
                m = m1 | m2
                terms[m] = terms.get(m, Poly()) + c1 * c2 * s
    return ExtElement(u.k, terms)


def left_mult(w: Poly | int, i: int, v: ExtElement) -> ExtElement:
    """``(w a_i) ^ v`` with 1-based ``i``; multiplication on the left."""
    if not 1 <= i <= v.k:
        raise IndexError(f"generator a{i} out of range for k={v.k}")
    w = Poly._coerce(w)
    terms: dict[int, Poly] = {}
    for m, c in v.terms.items():
        s = left_gen_sign(i - 1, m)
        if s:
            terms[m | 1 << (i - 1)] = c * w * s
    return ExtElement(v.k, terms)
