"""
Proving, verification and the zero-knowledge simulator.

A proof carries the private-wire parts of the three QAP commitments plus a
commitment to the quotient ``h = p / t``:

    A_pi = sum_{i private} z_i g1^(v_i(s)) + d_v g1^(t(s))
    B_pi = sum_{i private} z_i g2^(w_i(s)) + d_w g2^(t(s))
    C_pi = sum_{i private} z_i g1^(y_i(s)) + d_y g1^(t(s))
    H    = g2^(h'(s)),  h' = h + d_v W + d_w V + d_v d_w t - d_y

The verifier adds the statement wires from the verification key and checks

    e(A, B) = e(C, g2) * e(g1^(t(s)), H)

which is the pairing identity ``V(s) W(s) - Y(s) = h(s) t(s)`` with the
blinding terms cancelling.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from ..circuit import Witness
from ..errors import (EngineMismatch, MalformedEncoding, MalformedProof,
                      TrapdoorUnavailable, UnsatisfiedWitness, DimensionError)
from ..field import P, FieldElement
from ..groups import GroupElement, group_exp, multi_exp, pairing
from ..poly import Polynomial, poly_divmod, vanishing_poly
from ..seeds import derive_int
from .qap import QapInstance, witness_polys
from .setup import (CommonReferenceString, ProvingKey, Trapdoor, VerificationKey,
                    eval_in_exponent, setup)


@dataclass(frozen=True)
class SnarkProof:
    a: GroupElement  # G1
    b: GroupElement  # G2
    c: GroupElement  # G1
    h: GroupElement  # G2

    @property
    def engine(self) -> str:
        return self.a.engine


def _assignment(z) -> tuple[int, ...]:
    return z.assignment if isinstance(z, Witness) else tuple(int(v) % P for v in z)


def _private_sum(enc: tuple[GroupElement, ...], z: Sequence[int], start: int) -> GroupElement:
    return multi_exp(enc[start:], z[start:])


def _build(pk: ProvingKey, qap: QapInstance, z: tuple[int, ...], h: Polynomial,
           seed) -> SnarkProof:
    V, W, _ = witness_polys(qap, z)
    dv, dw, dy = (derive_int(seed, "blind", k) for k in ("v", "w", "y"))
    hb = h + W.scale(dv) + V.scale(dw) + qap.t.scale(dv * dw % P) - Polynomial((dy,))
    ni = pk.num_instance
    return SnarkProof(
        _private_sum(pk.a_enc, z, ni) + group_exp(pk.t_g1, dv),
        _private_sum(pk.b_enc, z, ni) + group_exp(pk.t_g2, dw),
        _private_sum(pk.c_enc, z, ni) + group_exp(pk.t_g1, dy),
        eval_in_exponent(hb, pk.g2_powers),
    )


def prove(crs: CommonReferenceString, qap: QapInstance, witness, seed) -> SnarkProof:
    """Honest prover; refuses assignments that do not satisfy the QAP."""
    z = _assignment(witness)
    if len(z) != qap.num_wires or z[0] != 1:
        raise UnsatisfiedWitness("assignment shape does not match the circuit")
    V, W, Y = witness_polys(qap, z)
    h, rem = poly_divmod(V * W - Y, qap.t)
    if not rem.is_zero():
        raise UnsatisfiedWitness("t(x) does not divide p(x)")
    return _build(crs.pk, qap, z, h, seed)


def forge_proof(crs: CommonReferenceString, qap: QapInstance, witness, seed) -> SnarkProof:
    """Adversarial prover: same algebra, remainder silently discarded.

    Used for fault injection so the verifier sees what a cheating developer
    would submit.
    """
    z = _assignment(witness)
    V, W, Y = witness_polys(qap, z)
    h, _ = poly_divmod(V * W - Y, qap.t)
    return _build(crs.pk, qap, z, h, seed)


def _statement(vk: VerificationKey, public_inputs) -> list[int]:
    if len(public_inputs) != vk.num_instance - 1:
        raise DimensionError(f"expected {vk.num_instance - 1} public inputs, "
                             f"got {len(public_inputs)}")
    return [1] + [int(v) % P for v in public_inputs]


def verify(vk: VerificationKey, public_inputs: Sequence[FieldElement | int],
           proof: SnarkProof | bytes) -> bool:
    if isinstance(proof, (bytes, bytearray)):
        from .encoding import PROOF_LEN, deserialize_proof
        if len(proof) != PROOF_LEN:
            raise MalformedProof(f"proof must be {PROOF_LEN} bytes, got {len(proof)}")
        try:
            proof = deserialize_proof(bytes(proof))
        except MalformedEncoding:
            return False
    x = _statement(vk, public_inputs)
    try:
        if proof.engine != vk.engine:
            return False
        a = multi_exp(vk.a_inst, x) + proof.a
        b = multi_exp(vk.b_inst, x) + proof.b
        c = multi_exp(vk.c_inst, x) + proof.c
        return pairing(a, b) == pairing(c, vk.g2) * pairing(vk.t_g1, proof.h)
    except EngineMismatch:
        return False


def simulator_setup(qap: QapInstance, seed, contributions: int = 1):
    """S1: a CRS together with its trapdoor."""
    entropies = [derive_int(seed, "sim-setup", j).to_bytes(32, "big") for j in range(contributions)]
    crs, trap = setup(qap, entropies, keep_trapdoor=True)
    return crs, trap


def simulate_proof(crs: CommonReferenceString, trapdoor: Trapdoor | None,
                   public_inputs: Sequence[FieldElement | int], seed) -> SnarkProof:
    """S2: an accepting proof built from the trapdoor alone, no witness."""
    if trapdoor is None:
        raise TrapdoorUnavailable("simulation needs the setup trapdoor")
    vk, pk = crs.vk, crs.pk
    x = _statement(vk, public_inputs)
    alpha, beta, eta = (derive_int(seed, "sim", k) for k in ("a", "b", "h"))
    t_s = vanishing_poly(range(1, pk.m + 1))(trapdoor.s)
    a_full = group_exp(vk.g1, alpha)
    b_full = group_exp(vk.g2, beta)
    c_full = group_exp(vk.g1, (alpha * beta - t_s * eta) % P)
    return SnarkProof(
        a_full - multi_exp(vk.a_inst, x),
        b_full - multi_exp(vk.b_inst, x),
        c_full - multi_exp(vk.c_inst, x),
        group_exp(vk.g2, eta),
    )
