"""Dense univariate polynomials over the prime field, lowest degree first."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import DivisionByZero, DuplicateEvaluationPoint
from .field import P, FieldElement


def _trim(coeffs: Sequence[int]) -> tuple[int, ...]:
    n = len(coeffs)
    while n and coeffs[n - 1] == 0:
        n -= 1
    return tuple(coeffs[:n])


@dataclass(frozen=True, slots=True)
class Polynomial:
    """Coefficients are stored as reduced ints; ``coefficients`` exposes them typed.

    The zero polynomial has no coefficients and degree -1.
    """

    coeffs: tuple[int, ...] = ()
    modulus: int = P

    def __post_init__(self):
        p = self.modulus
        object.__setattr__(self, "coeffs", _trim([int(c) % p for c in self.coeffs]))

    @classmethod
    def of(cls, coeffs: Iterable[int | FieldElement], modulus: int = P) -> "Polynomial":
        return cls(tuple(int(c) for c in coeffs), modulus)

    @classmethod
    def constant(cls, c: int, modulus: int = P) -> "Polynomial":
        return cls((c,), modulus)

    @classmethod
    def x(cls, modulus: int = P) -> "Polynomial":
        return cls((0, 1), modulus)

    @property
    def coefficients(self) -> tuple[FieldElement, ...]:
        return tuple(FieldElement(c, self.modulus) for c in self.coeffs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __call__(self, x: int | FieldElement) -> int:
        p = self.modulus
        x = int(x) % p
        acc = 0
        for c in reversed(self.coeffs):
            acc = (acc * x + c) % p
        return acc

    def evaluate(self, x: int | FieldElement) -> FieldElement:
        return FieldElement(self(x), self.modulus)

    def _check(self, other: "Polynomial"):
        if other.modulus != self.modulus:
            raise ValueError("polynomials over different fields")

    def __add__(self, other: "Polynomial") -> "Polynomial":
        self._check(other)
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return Polynomial(tuple(out), self.modulus)

    def __neg__(self) -> "Polynomial":
        return Polynomial(tuple(-c for c in self.coeffs), self.modulus)

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def __mul__(self, other: "Polynomial | int | FieldElement") -> "Polynomial":
        if isinstance(other, (int, FieldElement)):
            return self.scale(int(other))
        self._check(other)
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Polynomial((), self.modulus)
        p = self.modulus
        out = [0] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            if ai == 0:
                continue
            for j, bj in enumerate(b):
                out[i + j] += ai * bj
        return Polynomial(tuple(c % p for c in out), p)

    __rmul__ = __mul__

    def scale(self, k: int) -> "Polynomial":
        return Polynomial(tuple(c * k for c in self.coeffs), self.modulus)

    def __divmod__(self, other: "Polynomial"):
        return poly_divmod(self, other)

    def __repr__(self) -> str:
        if not self.coeffs:
            return "Polynomial(0)"
        terms = []
        for i, c in enumerate(self.coeffs):
            if c:
                terms.append(f"{c}" if i == 0 else f"{c}*x^{i}")
        return "Polynomial(" + " + ".join(terms) + ")"


def poly_divmod(num: Polynomial, den: Polynomial) -> tuple[Polynomial, Polynomial]:
    """Euclidean division: ``num = den * q + r`` with ``deg r < deg den``."""
    num._check(den)
    if den.is_zero():
        raise DivisionByZero("division by the zero polynomial")
    p = num.modulus
    rem = list(num.coeffs)
    dd = den.degree
    lead_inv = pow(den.coeffs[-1], -1, p)
    if len(rem) <= dd:
        return Polynomial((), p), num
    quot = [0] * (len(rem) - dd)
    for k in range(len(rem) - 1, dd - 1, -1):
        c = rem[k] % p
        if c == 0:
            continue
        q = c * lead_inv % p
        quot[k - dd] = q
        for j, dj in enumerate(den.coeffs):
            rem[k - dd + j] -= q * dj
    return Polynomial(tuple(quot), p), Polynomial(tuple(rem[:dd]), p)


def vanishing_poly(domain: Iterable[int], modulus: int = P) -> Polynomial:
    """Product of (x - d) over the domain."""
    out = Polynomial((1,), modulus)
    for d in domain:
        out = out * Polynomial((-d, 1), modulus)
    return out


def lagrange_basis(xs: Sequence[int], modulus: int = P) -> list[Polynomial]:
    """Basis polynomials L_j with L_j(x_k) = [j == k]."""
    p = modulus
    xs = [int(x) % p for x in xs]
    if len(set(xs)) != len(xs):
        raise DuplicateEvaluationPoint("x-coordinates must be distinct")
    full = vanishing_poly(xs, p)
    basis = []
    for xj in xs:
        numer, _ = poly_divmod(full, Polynomial((-xj, 1), p))
        denom = numer(xj)
        basis.append(numer.scale(pow(denom, -1, p)))
    return basis


def lagrange_interpolate(points: Sequence[tuple[int | FieldElement, int | FieldElement]],
                         modulus: int = P) -> Polynomial:
    """Unique polynomial of degree < len(points) through the given points."""
    if not points:
        return Polynomial((), modulus)
    xs = [int(x) for x, _ in points]
    ys = [int(y) for _, y in points]
    out = Polynomial((), modulus)
    for y, lj in zip(ys, lagrange_basis(xs, modulus)):
        if y % modulus:
            out = out + lj.scale(y)
    return out
