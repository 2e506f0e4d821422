"""Shared builders for proving-system tests."""

import random

from zkai.circuit import compile_linear, generate_witness
from zkai.model import LinearModel, quantize, quantize_inputs
from zkai.snark import r1cs_to_qap, setup


def random_instance(r: random.Random, n: int, bits: int = 16):
    """(system, qap, witness) for a random model and random normalized input."""
    sys = compile_linear(n)
    qap = r1cs_to_qap(sys)
    model = LinearModel(tuple(f"f{i}" for i in range(n)),
                        tuple(r.uniform(-2, 2) for _ in range(n)), r.uniform(-2, 2))
    z = generate_witness(sys, quantize(model, bits), quantize_inputs([r.random() for _ in range(n)], bits))
    return sys, qap, z


def entropies(r: random.Random, k: int):
    return [r.getrandbits(256).to_bytes(32, "big") for _ in range(k)]


def full_setup(r: random.Random, n: int, contributions: int = 2, keep_trapdoor: bool = False):
    sys, qap, z = random_instance(r, n)
    crs, trap = setup(qap, entropies(r, contributions), keep_trapdoor=keep_trapdoor)
    return sys, qap, z, crs, trap


def serialized_statement(r: random.Random, n: int = 2):
    """(vk_bytes, proof_bytes, public_inputs) for an honest random instance."""
    from zkai.snark import prove, serialize_proof, serialize_vk
    sys, qap, z, crs, _ = full_setup(r, n)
    pub = [v.value for v in z.public_inputs(sys)]
    return serialize_vk(crs.vk), serialize_proof(prove(crs, qap, z, seed=1)), pub
