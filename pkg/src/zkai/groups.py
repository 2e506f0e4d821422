"""
Group and pairing abstraction.

Only the reference "exponent-tracking" engine ships: an element g^k of a
source group is stored as ``k mod p``, the group law is exponent addition and
the pairing multiplies exponents. Discrete logs are therefore trivial and the
engine offers no security whatsoever; what it does offer is an exactly
bilinear map, so every verification equation can be checked with equality
instead of heuristics.

Group operations are written additively (``a + b``, ``k * a``), matching the
way proof components are assembled from linear combinations. The target group
is written multiplicatively (``e1 * e2``).
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import EngineMismatch, MalformedEncoding
from .field import P, from_bytes32, to_bytes32

G1 = "G1"
G2 = "G2"
GT = "GT"

REFERENCE = "ref"
ENGINE_TAGS = {REFERENCE: 1}
ENGINE_BY_TAG = {v: k for k, v in ENGINE_TAGS.items()}

ELEMENT_BYTES = 32


@dataclass(frozen=True, slots=True)
class GroupElement:
    engine: str
    group: str
    exponent: int

    def _same(self, other: "GroupElement"):
        if not isinstance(other, GroupElement):
            raise EngineMismatch(f"cannot combine GroupElement with {type(other).__name__}")
        if other.engine != self.engine or other.group != self.group:
            raise EngineMismatch(
                f"{self.engine}/{self.group} vs {other.engine}/{other.group}")

    def __add__(self, other: "GroupElement") -> "GroupElement":
        self._same(other)
        return GroupElement(self.engine, self.group, (self.exponent + other.exponent) % P)

    def __neg__(self) -> "GroupElement":
        return GroupElement(self.engine, self.group, -self.exponent % P)

    def __sub__(self, other: "GroupElement") -> "GroupElement":
        return self + (-other)

    def __rmul__(self, k) -> "GroupElement":
        return group_exp(self, k)

    def is_identity(self) -> bool:
        return self.exponent == 0

    def to_bytes(self) -> bytes:
        return to_bytes32(self.exponent)


@dataclass(frozen=True, slots=True)
class PairingOutput:
    engine: str
    exponent: int

    def __mul__(self, other: "PairingOutput") -> "PairingOutput":
        if not isinstance(other, PairingOutput) or other.engine != self.engine:
            raise EngineMismatch("target elements from different engines")
        return PairingOutput(self.engine, (self.exponent + other.exponent) % P)

    def is_identity(self) -> bool:
        return self.exponent == 0


def generator(group: str, engine: str = REFERENCE) -> GroupElement:
    _check_engine(engine)
    return GroupElement(engine, group, 1)


def identity(group: str, engine: str = REFERENCE) -> GroupElement:
    _check_engine(engine)
    return GroupElement(engine, group, 0)


def group_exp(base: GroupElement, k) -> GroupElement:
    """``base`` raised to the scalar ``k`` (written ``k * base``)."""
    if not isinstance(base, GroupElement):
        raise EngineMismatch(f"not a group element: {type(base).__name__}")
    return GroupElement(base.engine, base.group, base.exponent * (int(k) % P) % P)


def pairing(a: GroupElement, b: GroupElement) -> PairingOutput:
    """e: G1 x G2 -> GT, exactly bilinear under the reference engine."""
    if not (isinstance(a, GroupElement) and isinstance(b, GroupElement)):
        raise EngineMismatch("pairing needs two group elements")
    if a.engine != b.engine:
        raise EngineMismatch(f"pairing across engines {a.engine} and {b.engine}")
    if a.group != G1 or b.group != G2:
        raise EngineMismatch(f"pairing expects (G1, G2), got ({a.group}, {b.group})")
    return PairingOutput(a.engine, a.exponent * b.exponent % P)


def target_identity(engine: str = REFERENCE) -> PairingOutput:
    return PairingOutput(engine, 0)


def multi_exp(bases, scalars) -> GroupElement:
    """Sum of ``k_i * B_i``; bases must be non-empty and share a group."""
    bases = list(bases)
    first = bases[0]
    acc = 0
    for b, k in zip(bases, scalars):
        if b.engine != first.engine or b.group != first.group:
            raise EngineMismatch("multi_exp over mixed groups")
        acc += b.exponent * (int(k) % P)
    return GroupElement(first.engine, first.group, acc % P)


def decode_element(engine: str, group: str, raw: bytes) -> GroupElement:
    _check_engine(engine)
    if len(raw) != ELEMENT_BYTES:
        raise MalformedEncoding("group element must be 32 bytes")
    return GroupElement(engine, group, from_bytes32(raw))


def _check_engine(engine: str):
    if engine not in ENGINE_TAGS:
        raise EngineMismatch(f"unknown engine {engine!r}")
