"""
Trusted setup: a multi-party powers-of-tau accumulator followed by a
circuit-specific phase that evaluates the QAP polynomials in the exponent.

Each participant multiplies the accumulated secret by its own ``s_j`` and
then forgets it. The combined secret is the product of every ``s_j``, so the
setup stays sound as long as one participant discarded their share. A
:class:`Trapdoor` holding that product exists only when the caller asks for
it explicitly (tests and the zero-knowledge simulator); the normal path never
materializes it.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Iterable

from ..errors import DegreeOverflow, InvalidAccumulator
from ..field import P
from ..groups import (G1, G2, REFERENCE, GroupElement, generator, group_exp,
                      identity, multi_exp, pairing)
from ..poly import Polynomial
from .qap import QapInstance


@dataclass(frozen=True)
class PowersOfTau:
    engine: str
    g1_powers: tuple[GroupElement, ...]  # g1^(s^k), k = 0..degree
    g2_powers: tuple[GroupElement, ...]
    contributions: tuple[bytes, ...] = ()

    @property
    def degree(self) -> int:
        return len(self.g1_powers) - 1

    def state_digest(self) -> bytes:
        h = hashlib.sha256(b"zkai/pot")
        for g in (*self.g1_powers, *self.g2_powers):
            h.update(g.to_bytes())
        return h.digest()


@dataclass(frozen=True)
class Trapdoor:
    s: int
    contributions: tuple[bytes, ...] = ()

    def __post_init__(self):
        if self.s % P == 0:
            raise ValueError("trapdoor must be nonzero")


def new_accumulator(degree: int, engine: str = REFERENCE) -> PowersOfTau:
    """Accumulator with secret 1: every power is the generator."""
    if degree < 1:
        raise ValueError("degree must be >= 1")
    return PowersOfTau(engine, (generator(G1, engine),) * (degree + 1),
                       (generator(G2, engine),) * (degree + 1))


def check_accumulator(acc: PowersOfTau):
    """Pairing checks that both power ladders come from one secret."""
    g1s, g2s = acc.g1_powers, acc.g2_powers
    if len(g1s) != len(g2s) or len(g1s) < 2:
        raise InvalidAccumulator("power ladders have mismatched or too-short lengths")
    if g1s[0] != generator(G1, acc.engine) or g2s[0] != generator(G2, acc.engine):
        raise InvalidAccumulator("first power is not the generator")
    if g1s[1] == identity(G1, acc.engine):
        raise InvalidAccumulator("accumulated secret is zero")
    try:
        for k in range(1, len(g1s)):
            if pairing(g1s[k], g2s[0]) != pairing(g1s[k - 1], g2s[1]):
                raise InvalidAccumulator(f"G1 power {k} is not consecutive")
            if pairing(g1s[k], g2s[0]) != pairing(g1s[0], g2s[k]):
                raise InvalidAccumulator(f"G2 power {k} disagrees with G1")
    except InvalidAccumulator:
        raise
    except Exception as exc:  # wrong engine/group in a slot
        raise InvalidAccumulator(str(exc)) from exc


def secret_from_entropy(entropy: bytes) -> int:
    if len(entropy) != 32:
        raise ValueError("contribution entropy must be 32 bytes")
    ctr = 0
    while True:
        s = int.from_bytes(hashlib.sha256(b"zkai/tau" + bytes([ctr]) + entropy).digest(), "big") % P
        if s:
            return s
        ctr += 1


def _apply_secret(acc: PowersOfTau, s: int) -> PowersOfTau:
    check_accumulator(acc)
    s %= P
    if s == 0:
        raise ValueError("contribution secret must be nonzero")
    g1s, g2s, sk = [], [], 1
    for a, b in zip(acc.g1_powers, acc.g2_powers):
        g1s.append(group_exp(a, sk))
        g2s.append(group_exp(b, sk))
        sk = sk * s % P
    new = PowersOfTau(acc.engine, tuple(g1s), tuple(g2s), acc.contributions)
    # commitment to this participant's share plus the resulting state
    digest = hashlib.sha256(group_exp(generator(G1, acc.engine), s).to_bytes()
                            + new.state_digest()).digest()
    return PowersOfTau(new.engine, new.g1_powers, new.g2_powers,
                       acc.contributions + (digest,))


def ceremony_contribute(acc: PowersOfTau, entropy: bytes) -> PowersOfTau:
    """One participant's turn; the derived share is dropped on return."""
    return _apply_secret(acc, secret_from_entropy(entropy))


def accumulator_from_secret(degree: int, s: int, engine: str = REFERENCE) -> PowersOfTau:
    """Single-shot setup with a known secret."""
    return _apply_secret(new_accumulator(degree, engine), s)


def run_ceremony(degree: int, entropies: Iterable[bytes], keep_trapdoor: bool = False,
                 engine: str = REFERENCE) -> tuple[PowersOfTau, Trapdoor | None]:
    acc = new_accumulator(degree, engine)
    s = 1
    for e in entropies:
        acc = ceremony_contribute(acc, e)
        if keep_trapdoor:
            s = s * secret_from_entropy(e) % P
    if not acc.contributions:
        raise ValueError("ceremony needs at least one contribution")
    return acc, (Trapdoor(s, acc.contributions) if keep_trapdoor else None)


@dataclass(frozen=True)
class ProvingKey:
    engine: str
    num_instance: int
    num_witness: int
    m: int
    g1_powers: tuple[GroupElement, ...]
    g2_powers: tuple[GroupElement, ...]
    a_enc: tuple[GroupElement, ...]  # g1^(v_i(s))
    b_enc: tuple[GroupElement, ...]  # g2^(w_i(s))
    c_enc: tuple[GroupElement, ...]  # g1^(y_i(s))
    t_g1: GroupElement
    t_g2: GroupElement


@dataclass(frozen=True)
class VerificationKey:
    engine: str
    num_instance: int
    g1: GroupElement
    g2: GroupElement
    t_g1: GroupElement
    a_inst: tuple[GroupElement, ...]
    b_inst: tuple[GroupElement, ...]
    c_inst: tuple[GroupElement, ...]


@dataclass(frozen=True)
class CommonReferenceString:
    pk: ProvingKey
    vk: VerificationKey


def eval_in_exponent(poly: Polynomial, powers: tuple[GroupElement, ...]) -> GroupElement:
    """g^(poly(s)) from the ladder g^(s^k)."""
    if poly.degree >= len(powers):
        raise DegreeOverflow(f"degree {poly.degree} needs more than {len(powers)} powers")
    if poly.is_zero():
        p0 = powers[0]
        return GroupElement(p0.engine, p0.group, 0)
    return multi_exp(powers[:len(poly.coeffs)], poly.coeffs)


def phase2_specialize(acc: PowersOfTau, qap: QapInstance) -> CommonReferenceString:
    m = qap.m
    if acc.degree < 2 * m:
        raise DegreeOverflow(f"accumulator degree {acc.degree} < 2m = {2 * m}")
    check_accumulator(acc)
    g1p = acc.g1_powers[:2 * m + 1]
    g2p = acc.g2_powers[:2 * m + 1]
    a_enc = tuple(eval_in_exponent(p, g1p) for p in qap.v)
    b_enc = tuple(eval_in_exponent(p, g2p) for p in qap.w)
    c_enc = tuple(eval_in_exponent(p, g1p) for p in qap.y)
    t_g1 = eval_in_exponent(qap.t, g1p)
    t_g2 = eval_in_exponent(qap.t, g2p)
    ni = qap.num_instance
    pk = ProvingKey(acc.engine, ni, qap.num_witness, m, g1p, g2p,
                    a_enc, b_enc, c_enc, t_g1, t_g2)
    vk = VerificationKey(acc.engine, ni, g1p[0], g2p[0], t_g1,
                         a_enc[:ni], b_enc[:ni], c_enc[:ni])
    return CommonReferenceString(pk, vk)


def setup(qap: QapInstance, entropies: Iterable[bytes], keep_trapdoor: bool = False,
          engine: str = REFERENCE) -> tuple[CommonReferenceString, Trapdoor | None]:
    acc, trap = run_ceremony(2 * qap.m, entropies, keep_trapdoor, engine)
    return phase2_specialize(acc, qap), trap
