"""
Wire formats.

Proof (fixed 263 bytes)::

    b"ZKAI1" | version:u8 | engine:u8 | hex64(A) hex64(B) hex64(C) hex64(H)

Verification key::

    b"ZKVK1" | version:u8 | engine:u8 | num_instance:u32le | body_len:u32le |
    body = g1 g2 t_g1 (a_i b_i c_i for each instance wire), 32-byte big-endian each

Hex fields are lowercase and must be canonical field elements, so any bit
flip either changes a value or fails to decode.
"""

from __future__ import annotations

import json
import struct

from ..errors import MalformedEncoding
from ..field import from_hex, to_hex
from ..groups import (ELEMENT_BYTES, ENGINE_BY_TAG, ENGINE_TAGS, G1, G2,
                      GroupElement, decode_element)
from .proof import SnarkProof
from .setup import CommonReferenceString, ProvingKey, VerificationKey

VERSION = 1
PROOF_MAGIC = b"ZKAI1"
VK_MAGIC = b"ZKVK1"
_PROOF_HEAD = len(PROOF_MAGIC) + 2
PROOF_LEN = _PROOF_HEAD + 4 * 64
_VK_HEAD = len(VK_MAGIC) + 2 + 8


def _engine_from_tag(tag: int) -> str:
    try:
        return ENGINE_BY_TAG[tag]
    except KeyError:
        raise MalformedEncoding(f"unknown engine tag {tag}") from None


def serialize_proof(proof: SnarkProof) -> bytes:
    body = "".join(to_hex(g.exponent) for g in (proof.a, proof.b, proof.c, proof.h))
    return PROOF_MAGIC + bytes([VERSION, ENGINE_TAGS[proof.engine]]) + body.encode("ascii")


def deserialize_proof(raw: bytes) -> SnarkProof:
    if len(raw) != PROOF_LEN:
        raise MalformedEncoding(f"proof must be {PROOF_LEN} bytes, got {len(raw)}")
    if raw[:len(PROOF_MAGIC)] != PROOF_MAGIC:
        raise MalformedEncoding("bad proof magic")
    if raw[len(PROOF_MAGIC)] != VERSION:
        raise MalformedEncoding("unsupported proof version")
    engine = _engine_from_tag(raw[len(PROOF_MAGIC) + 1])
    try:
        text = raw[_PROOF_HEAD:].decode("ascii")
    except UnicodeDecodeError:
        raise MalformedEncoding("proof body is not ascii hex") from None
    vals = [from_hex(text[i:i + 64]) for i in range(0, 256, 64)]
    groups = (G1, G2, G1, G2)
    a, b, c, h = (GroupElement(engine, g, v) for g, v in zip(groups, vals))
    return SnarkProof(a, b, c, h)


def vk_length(num_instance: int) -> int:
    return _VK_HEAD + ELEMENT_BYTES * (3 + 3 * num_instance)


def serialize_vk(vk: VerificationKey) -> bytes:
    parts = [vk.g1, vk.g2, vk.t_g1]
    for a, b, c in zip(vk.a_inst, vk.b_inst, vk.c_inst):
        parts += [a, b, c]
    body = b"".join(g.to_bytes() for g in parts)
    return (VK_MAGIC + bytes([VERSION, ENGINE_TAGS[vk.engine]])
            + struct.pack("<II", vk.num_instance, len(body)) + body)


def deserialize_vk(raw: bytes) -> VerificationKey:
    if len(raw) < _VK_HEAD:
        raise MalformedEncoding("verification key truncated")
    if raw[:len(VK_MAGIC)] != VK_MAGIC:
        raise MalformedEncoding("bad verification key magic")
    if raw[len(VK_MAGIC)] != VERSION:
        raise MalformedEncoding("unsupported verification key version")
    engine = _engine_from_tag(raw[len(VK_MAGIC) + 1])
    ni, body_len = struct.unpack_from("<II", raw, len(VK_MAGIC) + 2)
    body = raw[_VK_HEAD:]
    if ni < 1 or body_len != ELEMENT_BYTES * (3 + 3 * ni) or len(body) != body_len:
        raise MalformedEncoding("verification key length mismatch")

    def el(k: int, group: str) -> GroupElement:
        return decode_element(engine, group, body[k * ELEMENT_BYTES:(k + 1) * ELEMENT_BYTES])

    a, b, c = [], [], []
    for i in range(ni):
        base = 3 + 3 * i
        a.append(el(base, G1))
        b.append(el(base + 1, G2))
        c.append(el(base + 2, G1))
    return VerificationKey(engine, ni, el(0, G1), el(1, G2), el(2, G1),
                           tuple(a), tuple(b), tuple(c))


# proving key / CRS as JSON (hex exponents); never contains a trapdoor

def _hexes(gs) -> list[str]:
    return [to_hex(g.exponent) for g in gs]


def _els(engine: str, group: str, hs) -> tuple[GroupElement, ...]:
    return tuple(GroupElement(engine, group, from_hex(h)) for h in hs)


def crs_to_json(crs: CommonReferenceString) -> str:
    pk = crs.pk
    doc = {
        "format": "zkai-crs-1", "engine": pk.engine,
        "num_instance": pk.num_instance, "num_witness": pk.num_witness, "m": pk.m,
        "g1_powers": _hexes(pk.g1_powers), "g2_powers": _hexes(pk.g2_powers),
        "a_enc": _hexes(pk.a_enc), "b_enc": _hexes(pk.b_enc), "c_enc": _hexes(pk.c_enc),
        "t_g1": to_hex(pk.t_g1.exponent), "t_g2": to_hex(pk.t_g2.exponent),
    }
    return json.dumps(doc, indent=1)


def crs_from_json(text: str) -> CommonReferenceString:
    try:
        d = json.loads(text)
        if d.get("format") != "zkai-crs-1":
            raise MalformedEncoding("not a zkai CRS document")
        e = d["engine"]
        if e not in ENGINE_TAGS:
            raise MalformedEncoding(f"unknown engine {e!r}")
        pk = ProvingKey(
            e, d["num_instance"], d["num_witness"], d["m"],
            _els(e, G1, d["g1_powers"]), _els(e, G2, d["g2_powers"]),
            _els(e, G1, d["a_enc"]), _els(e, G2, d["b_enc"]), _els(e, G1, d["c_enc"]),
            GroupElement(e, G1, from_hex(d["t_g1"])), GroupElement(e, G2, from_hex(d["t_g2"])),
        )
    except (KeyError, TypeError, json.JSONDecodeError) as exc:
        raise MalformedEncoding(f"bad CRS document: {exc}") from exc
    ni = pk.num_instance
    vk = VerificationKey(e, ni, pk.g1_powers[0], pk.g2_powers[0], pk.t_g1,
                         pk.a_enc[:ni], pk.b_enc[:ni], pk.c_enc[:ni])
    return CommonReferenceString(pk, vk)
