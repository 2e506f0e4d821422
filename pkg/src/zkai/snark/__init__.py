"""QAP-based proving system over the reference pairing engine."""

from .encoding import (PROOF_LEN, crs_from_json, crs_to_json, deserialize_proof,
                       deserialize_vk, serialize_proof, serialize_vk, vk_length)
from .proof import (SnarkProof, forge_proof, prove, simulate_proof,
                    simulator_setup, verify)
from .qap import QapInstance, divides, p_poly, quotient, r1cs_to_qap
from .setup import (CommonReferenceString, PowersOfTau, ProvingKey, Trapdoor,
                    VerificationKey, accumulator_from_secret, ceremony_contribute,
                    check_accumulator, new_accumulator, phase2_specialize,
                    run_ceremony, secret_from_entropy, setup)

__all__ = [
    "PROOF_LEN", "crs_from_json", "crs_to_json", "deserialize_proof", "deserialize_vk",
    "serialize_proof", "serialize_vk", "vk_length", "SnarkProof", "forge_proof", "prove",
    "simulate_proof", "simulator_setup", "verify", "QapInstance", "divides", "p_poly",
    "quotient", "r1cs_to_qap", "CommonReferenceString", "PowersOfTau", "ProvingKey",
    "Trapdoor", "VerificationKey", "accumulator_from_secret", "ceremony_contribute",
    "check_accumulator", "new_accumulator", "phase2_specialize", "run_ceremony",
    "secret_from_entropy", "setup",
]
