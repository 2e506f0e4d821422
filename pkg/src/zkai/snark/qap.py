"""R1CS to QAP: interpolate each wire's constraint columns over {1, ..., m}."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from ..circuit import R1CSSystem, Witness
from ..field import P
from ..poly import Polynomial, lagrange_basis, poly_divmod, vanishing_poly


@dataclass(frozen=True)
class QapInstance:
    v: tuple[Polynomial, ...]  # A columns
    w: tuple[Polynomial, ...]  # B columns
    y: tuple[Polynomial, ...]  # C columns
    t: Polynomial
    num_instance: int
    num_witness: int

    @property
    def m(self) -> int:
        return self.t.degree

    @property
    def num_wires(self) -> int:
        return self.num_instance + self.num_witness

    @property
    def domain(self) -> range:
        return range(1, self.m + 1)


def r1cs_to_qap(sys: R1CSSystem) -> QapInstance:
    m = sys.num_constraints
    if m < 1:
        raise ValueError("QAP needs at least one constraint")
    domain = list(range(1, m + 1))
    basis = lagrange_basis(domain)
    cols = [[[] for _ in range(sys.num_wires)] for _ in range(3)]
    for j, rows in enumerate(sys.constraints):
        for which, row in enumerate(rows):
            for wire, coeff in row.items():
                cols[which][wire].append((j, coeff))

    def interpolate(entries) -> Polynomial:
        acc = [0] * m
        for j, coeff in entries:
            for k, c in enumerate(basis[j].coeffs):
                acc[k] += coeff * c
        return Polynomial(tuple(acc))

    v, w, y = (tuple(interpolate(e) for e in cols[k]) for k in range(3))
    return QapInstance(v, w, y, vanishing_poly(domain), sys.num_instance, sys.num_witness)


def combine(polys: Sequence[Polynomial], z: Sequence[int]) -> Polynomial:
    """sum_i z_i * polys[i], accumulated coefficient-wise."""
    width = max((len(p.coeffs) for p in polys), default=0)
    acc = [0] * width
    for p, zi in zip(polys, z):
        if zi % P == 0:
            continue
        for k, c in enumerate(p.coeffs):
            acc[k] += zi * c
    return Polynomial(tuple(acc))


def witness_polys(qap: QapInstance, z: Witness | Sequence[int]):
    assignment = z.assignment if isinstance(z, Witness) else tuple(z)
    if len(assignment) != qap.num_wires:
        raise ValueError("assignment length does not match QAP wire count")
    return combine(qap.v, assignment), combine(qap.w, assignment), combine(qap.y, assignment)


def p_poly(qap: QapInstance, z) -> Polynomial:
    """p(x) = V(x) * W(x) - Y(x) for the assignment z."""
    V, W, Y = witness_polys(qap, z)
    return V * W - Y


def quotient(qap: QapInstance, z) -> tuple[Polynomial, Polynomial]:
    """(h, remainder) of p / t; the assignment satisfies the QAP iff remainder is 0."""
    return poly_divmod(p_poly(qap, z), qap.t)


def divides(qap: QapInstance, z) -> bool:
    return quotient(qap, z)[1].is_zero()
