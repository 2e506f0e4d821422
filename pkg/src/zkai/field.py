"""
Prime-field arithmetic.

Every constraint, polynomial and group exponent in the proving system lives
in the scalar field of a pairing-friendly curve. The default modulus is the
254-bit BN254 scalar prime; a different prime can be passed explicitly for
small-field experiments.

Hot loops elsewhere in the package (polynomials, witnesses, QAP evaluation)
work on plain ``int`` values already reduced modulo ``P``; ``FieldElement``
is the typed wrapper used at API boundaries.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .errors import DivisionByZero, MalformedEncoding

P = 21888242871839275222246405745257275088548364400416034343698204186575808495617

HEX_WIDTH = 64


@dataclass(frozen=True, slots=True)
class FieldElement:
    value: int
    modulus: int = P

    def __post_init__(self):
        if not 0 <= self.value < self.modulus:
            object.__setattr__(self, "value", self.value % self.modulus)

    def _coerce(self, other: Union["FieldElement", int]) -> int:
        if isinstance(other, FieldElement):
            if other.modulus != self.modulus:
                raise ValueError("field elements from different moduli")
            return other.value
        if isinstance(other, int):
            return other % self.modulus
        return NotImplemented  # type: ignore[return-value]

    def _new(self, v: int) -> "FieldElement":
        return FieldElement(v % self.modulus, self.modulus)

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self._new(self.value + o)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self._new(self.value - o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self._new(o - self.value)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self._new(self.value * o)

    __rmul__ = __mul__

    def __neg__(self):
        return self._new(-self.value)

    def inverse(self) -> "FieldElement":
        if self.value == 0:
            raise DivisionByZero("inverse of zero")
        return FieldElement(pow(self.value, -1, self.modulus), self.modulus)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * FieldElement(o, self.modulus).inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        return FieldElement(pow(self.value, k, self.modulus), self.modulus)

    def __int__(self) -> int:
        return self.value

    def signed(self) -> int:
        """Centered representative in (-p/2, p/2]."""
        return self.value - self.modulus if self.value > self.modulus // 2 else self.value

    def to_hex(self) -> str:
        return to_hex(self.value)

    @classmethod
    def from_hex(cls, s: str, modulus: int = P) -> "FieldElement":
        return cls(from_hex(s, modulus), modulus)

    def __repr__(self) -> str:
        if self.modulus == P:
            return f"FieldElement({self.value})"
        return f"FieldElement({self.value}, mod {self.modulus})"


def fp_ops(a: FieldElement, b: FieldElement | None, op: str) -> FieldElement:
    """Dispatch one of ``add, sub, mul, inv, neg``; unary ops ignore ``b``."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "inv":
        return a.inverse()
    if op == "neg":
        return -a
    raise ValueError(f"unknown field op {op!r}")


def inv(a: int, p: int = P) -> int:
    a %= p
    if a == 0:
        raise DivisionByZero("inverse of zero")
    return pow(a, -1, p)


_HEX_DIGITS = frozenset("0123456789abcdef")


def to_hex(v: int) -> str:
    """Fixed-width 64-char lowercase big-endian hex."""
    return format(v, "064x")


def from_hex(s: str, p: int = P) -> int:
    # strict: exact width, lowercase only, canonical (< p)
    if len(s) != HEX_WIDTH or not _HEX_DIGITS.issuperset(s):
        raise MalformedEncoding(f"bad field hex {s!r}")
    v = int(s, 16)
    if v >= p:
        raise MalformedEncoding("non-canonical field element")
    return v


def to_bytes32(v: int) -> bytes:
    return v.to_bytes(32, "big")


def from_bytes32(b: bytes, p: int = P) -> int:
    if len(b) != 32:
        raise MalformedEncoding("field element must be 32 bytes")
    v = int.from_bytes(b, "big")
    if v >= p:
        raise MalformedEncoding("non-canonical field element")
    return v
