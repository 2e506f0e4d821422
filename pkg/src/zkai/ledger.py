"""
Simulated chain: a single ordered transaction stream, ETH gas accounting in
wei, subscription balances in 18-decimal LINK units, and a verifier contract
that stores verification keys and a hash-chained log of verification records.

All balances are integers; nothing monetary ever passes through a float.
"""

from __future__ import annotations

import hashlib
import json
import threading
from dataclasses import asdict, dataclass
from decimal import Decimal, localcontext
from typing import Sequence

from .errors import (InsufficientFunds, InsufficientLink, MalformedEncoding,
                     UnknownSubscription, UnknownVerifier)
from .field import P, to_bytes32

UNIT = 10 ** 18  # wei per ETH, juels per LINK
ZERO_HASH = bytes(32)

DEFAULT_BALANCE = 100 * UNIT


def to_units(amount: str | Decimal | int) -> int:
    """Decimal string -> 18-decimal fixed point; rejects sub-unit precision."""
    with localcontext() as ctx:
        ctx.prec = 100
        d = Decimal(str(amount)) * UNIT
    if d != d.to_integral_value():
        raise ValueError(f"{amount} has more than 18 decimals")
    return int(d)


def format_units(v: int) -> str:
    sign = "-" if v < 0 else ""
    whole, frac = divmod(abs(v), UNIT)
    return f"{sign}{whole}.{frac:018d}".rstrip("0").rstrip(".") if frac else f"{sign}{whole}"


@dataclass(frozen=True)
class FeeSchedule:
    # 286_000 gas at 2 gwei = 0.000572 ETH per report submission
    gas_price: int = 2_000_000_000
    gas_deploy_vk: int = 1_250_000
    gas_submit_report: int = 286_000
    gas_fund: int = 46_000

    def __post_init__(self):
        if min(self.gas_price, self.gas_deploy_vk, self.gas_submit_report, self.gas_fund) <= 0:
            raise ValueError("fee schedule entries must be positive")

    def gas_for(self, kind: str) -> int:
        return {"deploy_vk": self.gas_deploy_vk, "submit_report": self.gas_submit_report,
                "fund_subscription": self.gas_fund}[kind]


@dataclass(frozen=True)
class LedgerTx:
    tx_id: int
    sender: str
    kind: str
    payload: bytes
    gas_used: int
    fee: int  # wei

    def to_dict(self) -> dict:
        return {"tx_id": self.tx_id, "sender": self.sender, "kind": self.kind,
                "payload": self.payload.hex(), "gas_used": self.gas_used,
                "fee": str(self.fee)}

    @classmethod
    def from_dict(cls, d: dict) -> "LedgerTx":
        return cls(d["tx_id"], d["sender"], d["kind"], bytes.fromhex(d["payload"]),
                   d["gas_used"], int(d["fee"]))


@dataclass(frozen=True)
class Subscription:
    sub_id: int
    owner: str
    balance: int = 0  # juels (1e-18 LINK)

    def __post_init__(self):
        if self.balance < 0:
            raise InsufficientLink("subscription balance cannot go negative")


@dataclass(frozen=True)
class VerificationRecord:
    request_id: int
    vk_digest: str
    inputs_digest: str
    verified: bool
    tx_id: int
    prev_hash: str

    def to_bytes(self) -> bytes:
        return json.dumps(asdict(self), sort_keys=True, separators=(",", ":")).encode()

    @classmethod
    def from_bytes(cls, raw: bytes) -> "VerificationRecord":
        try:
            d = json.loads(raw.decode())
            rec = cls(**d)
        except (UnicodeDecodeError, json.JSONDecodeError, TypeError) as exc:
            raise MalformedEncoding(f"bad record bytes: {exc}") from exc
        if rec.to_bytes() != raw:
            raise MalformedEncoding("record bytes are not canonical")
        return rec


def inputs_digest(public_inputs: Sequence[int]) -> str:
    h = hashlib.sha256()
    for v in public_inputs:
        h.update(to_bytes32(int(v) % P))
    return h.hexdigest()


class Ledger:
    def __init__(self, fees: FeeSchedule | None = None):
        self.fees = fees or FeeSchedule()
        self.accounts: dict[str, int] = {}
        self.subscriptions: dict[int, Subscription] = {}
        self.vks: dict[str, bytes] = {}
        self.txs: list[LedgerTx] = []
        self.records: list[bytes] = []
        self.head = ZERO_HASH
        self._by_request: dict[int, int] = {}
        self._lock = threading.RLock()

    # accounts and subscriptions

    def create_account(self, address: str, balance: int = DEFAULT_BALANCE):
        with self._lock:
            self.accounts[address] = self.accounts.get(address, 0) + balance

    def balance(self, address: str) -> int:
        return self.accounts.get(address, 0)

    def create_subscription(self, owner: str) -> int:
        with self._lock:
            sub_id = len(self.subscriptions) + 1
            self.subscriptions[sub_id] = Subscription(sub_id, owner, 0)
            return sub_id

    def subscription(self, sub_id: int) -> Subscription:
        try:
            return self.subscriptions[sub_id]
        except KeyError:
            raise UnknownSubscription(sub_id) from None

    def put_subscription(self, sub: Subscription):
        with self._lock:
            self.subscription(sub.sub_id)
            self.subscriptions[sub.sub_id] = sub

    # transactions

    def _charge(self, sender: str, kind: str, payload: bytes) -> LedgerTx:
        gas = self.fees.gas_for(kind)
        fee = gas * self.fees.gas_price
        if self.accounts.get(sender, 0) < fee:
            raise InsufficientFunds(f"{sender} cannot pay {format_units(fee)} ETH")
        self.accounts[sender] -= fee
        tx = LedgerTx(len(self.txs) + 1, sender, kind, payload, gas, fee)
        self.txs.append(tx)
        return tx

    def deploy_vk(self, sender: str, vk_bytes: bytes) -> str:
        from .snark.encoding import deserialize_vk
        deserialize_vk(vk_bytes)
        digest = hashlib.sha256(vk_bytes).hexdigest()
        with self._lock:
            self._charge(sender, "deploy_vk", vk_bytes)
            self.vks.setdefault(digest, bytes(vk_bytes))
        return digest

    def has_vk(self, digest: str) -> bool:
        return digest in self.vks

    def get_vk(self, digest: str) -> bytes:
        try:
            return self.vks[digest]
        except KeyError:
            raise UnknownVerifier(digest) from None

    def submit_report(self, sender: str, report, proof_bytes: bytes,
                      public_inputs: Sequence[int]) -> LedgerTx:
        """Record the ledger's own verdict; the oracle verdict is advisory only."""
        from .snark.encoding import deserialize_vk
        from .snark.proof import verify
        vk_raw = self.get_vk(report.vk_digest)
        try:
            verified = bool(verify(deserialize_vk(vk_raw), list(public_inputs), proof_bytes))
        except (MalformedEncoding, ValueError):
            verified = False
        payload = json.dumps({
            "request_id": report.request_id, "vk_digest": report.vk_digest,
            "oracle_verdict": bool(report.verified), "proof": bytes(proof_bytes).hex(),
            "public_inputs": [format(int(v) % P, "x") for v in public_inputs],
        }, sort_keys=True).encode()
        with self._lock:
            tx = self._charge(sender, "submit_report", payload)
            rec = VerificationRecord(report.request_id, report.vk_digest,
                                     inputs_digest(public_inputs), verified, tx.tx_id,
                                     self.head.hex())
            blob = rec.to_bytes()
            self.records.append(blob)
            self._by_request[report.request_id] = len(self.records) - 1
            self.head = hashlib.sha256(blob).digest()
        return tx

    def query_record(self, request_id: int) -> VerificationRecord | None:
        idx = self._by_request.get(request_id)
        return None if idx is None else VerificationRecord.from_bytes(self.records[idx])

    def fund_subscription(self, sender: str, sub_id: int, amount: int) -> LedgerTx:
        if amount <= 0:
            raise ValueError("funding amount must be positive")
        with self._lock:
            sub = self.subscription(sub_id)
            payload = json.dumps({"sub_id": sub_id, "amount": str(amount)}).encode()
            tx = self._charge(sender, "fund_subscription", payload)
            self.subscriptions[sub_id] = Subscription(sub_id, sub.owner, sub.balance + amount)
        return tx

    # integrity and export

    def validate_chain(self) -> bool:
        prev = ZERO_HASH
        for blob in self.records:
            try:
                rec = VerificationRecord.from_bytes(blob)
            except MalformedEncoding:
                return False
            if rec.prev_hash != prev.hex():
                return False
            prev = hashlib.sha256(blob).digest()
        return prev == self.head

    def total_fees(self) -> int:
        return sum(tx.fee for tx in self.txs)

    def export_jsonl(self) -> str:
        lines = [json.dumps({"type": "tx", **tx.to_dict()}, sort_keys=True) for tx in self.txs]
        for blob in self.records:
            lines.append(json.dumps({"type": "record", "bytes": blob.decode(),
                                     "hash": hashlib.sha256(blob).hexdigest()}, sort_keys=True))
        return "\n".join(lines) + ("\n" if lines else "")

    def to_json(self) -> str:
        return json.dumps({
            "fees": asdict(self.fees),
            "accounts": {k: str(v) for k, v in self.accounts.items()},
            "subscriptions": [{"sub_id": s.sub_id, "owner": s.owner, "balance": str(s.balance)}
                              for s in self.subscriptions.values()],
            "vks": {k: v.hex() for k, v in self.vks.items()},
            "txs": [tx.to_dict() for tx in self.txs],
            "records": [b.decode() for b in self.records],
            "head": self.head.hex(),
        }, indent=1, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "Ledger":
        d = json.loads(text)
        led = cls(FeeSchedule(**d["fees"]))
        led.accounts = {k: int(v) for k, v in d["accounts"].items()}
        led.subscriptions = {s["sub_id"]: Subscription(s["sub_id"], s["owner"], int(s["balance"]))
                             for s in d["subscriptions"]}
        led.vks = {k: bytes.fromhex(v) for k, v in d["vks"].items()}
        led.txs = [LedgerTx.from_dict(t) for t in d["txs"]]
        led.records = [r.encode() for r in d["records"]]
        led.head = bytes.fromhex(d["head"])
        for i, blob in enumerate(led.records):
            led._by_request[VerificationRecord.from_bytes(blob).request_id] = i
        if not led.validate_chain():
            raise MalformedEncoding("ledger snapshot fails hash-chain validation")
        return led
