"""
Simulated decentralized oracle network.

A buyer submits a verification request against a funded subscription. Every
node receives a :class:`SandboxTask` (verification key bytes, proof bytes and
an input descriptor) plus a data-source handle, and nothing else: no ledger,
no filesystem beyond what the source itself exposes. Each node fetches the
raw feature values, scales and quantizes them exactly as the prover did, runs
the verifier, and emits a digest-bound report. Reports are folded into one
aggregated report (majority verdict, per-coordinate lower median of the
fetched inputs), LINK is debited, and the result is delivered to the ledger.
"""

from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import asdict, dataclass, replace
from pathlib import Path
from typing import Callable, Mapping, Protocol, Sequence

import numpy as np

from .data import ScalerParams, clean, load_csv
from .errors import (DimensionError, FetchError, InsufficientLink,
                     MalformedEncoding, QuorumFailure, UnknownVerifier)
from .field import P
from .ledger import Ledger, LedgerTx, Subscription, to_units
from .model import quantize_inputs
from .seeds import derive_rng
from .snark.encoding import deserialize_vk
from .snark.proof import verify

log = logging.getLogger(__name__)

DEFAULT_NODES = 4

PENDING, FULFILLED, FAILED_BILLING, FAILED_QUORUM = (
    "Pending", "Fulfilled", "Failed-Billing", "Failed-Quorum")

FAULTS = ("flip", "lie-true", "lie-false", "garbage-inputs", "offline", "silent")


@dataclass(frozen=True)
class LinkFees:
    base_fee: int = to_units("0.10")
    per_node_fee: int = to_units("0.05")

    def cost(self, quorum: int) -> int:
        if quorum < 1:
            raise ValueError("quorum must be >= 1")
        return self.base_fee + self.per_node_fee * quorum


@dataclass(frozen=True)
class InputSpec:
    """Where the statement's public inputs come from and how to encode them."""
    source: str
    row: int
    feature_names: tuple[str, ...]
    mins: tuple[float, ...]
    maxs: tuple[float, ...]
    scale_bits: int
    claimed_output: int  # field element, product scale

    def to_dict(self) -> dict:
        d = asdict(self)
        d["feature_names"] = list(self.feature_names)
        d["mins"], d["maxs"] = list(self.mins), list(self.maxs)
        return d


@dataclass(frozen=True)
class OracleRequest:
    subscription_id: int
    vk_digest: str
    proof: bytes
    inputs: InputSpec
    requester: str
    gas_limit: int = 300_000
    request_id: int = 0  # assigned on submission


@dataclass(frozen=True)
class SandboxTask:
    request_id: int
    vk_bytes: bytes
    proof: bytes
    inputs: InputSpec

    def digest(self) -> bytes:
        h = hashlib.sha256(b"zkai/task")
        h.update(self.request_id.to_bytes(8, "big"))
        h.update(hashlib.sha256(self.vk_bytes).digest())
        h.update(hashlib.sha256(self.proof).digest())
        h.update(json.dumps(self.inputs.to_dict(), sort_keys=True).encode())
        return h.digest()


def report_digest(task: SandboxTask, fetched: Sequence[int], verified: bool,
                  error: str | None) -> str:
    h = hashlib.sha256(task.digest())
    h.update(json.dumps({"fetched": [format(v, "x") for v in fetched],
                         "verified": verified, "error": error}, sort_keys=True).encode())
    return h.hexdigest()


@dataclass(frozen=True)
class NodeReport:
    node_id: int
    request_id: int
    verified: bool
    fetched_inputs: tuple[int, ...]
    error: str | None
    digest: str

    @property
    def ok(self) -> bool:
        return self.error is None


@dataclass(frozen=True)
class AggregatedReport:
    request_id: int
    vk_digest: str
    quorum: int
    verified: bool
    fetched_inputs: tuple[int, ...]
    node_ids: tuple[int, ...]
    link_cost: int

    def to_dict(self) -> dict:
        return {"request_id": self.request_id, "vk_digest": self.vk_digest,
                "quorum": self.quorum, "verified": self.verified,
                "fetched_inputs": [format(v, "x") for v in self.fetched_inputs],
                "node_ids": list(self.node_ids), "link_cost": str(self.link_cost)}


# data sources

class DataSource(Protocol):
    def fetch(self, row: int, feature_names: Sequence[str]) -> list[float]: ...


class FixtureSource:
    """Rows from a dataset CSV, cleaned the same way the training side cleans."""

    def __init__(self, path: str | Path, target_name: str):
        self.path = Path(path)
        self.target_name = target_name
        self._data = None

    def fetch(self, row: int, feature_names: Sequence[str]) -> list[float]:
        try:
            if self._data is None:
                self._data = clean(load_csv(self.path, self.target_name))
            return [float(v) for v in self._data.select(feature_names).features[row]]
        except (OSError, IndexError, ValueError) as exc:
            raise FetchError(f"{self.path}: {exc}") from exc


class StubSource:
    """Injected responder: a mapping ``row -> {feature: value}`` or a callable."""

    def __init__(self, responder: Mapping[int, Mapping[str, float]] | Callable):
        self.responder = responder

    def fetch(self, row: int, feature_names: Sequence[str]) -> list[float]:
        try:
            if callable(self.responder):
                values = self.responder(row, tuple(feature_names))
                return [float(v) for v in values]
            rec = self.responder[row]
            return [float(rec[n]) for n in feature_names]
        except FetchError:
            raise
        except Exception as exc:
            raise FetchError(f"stub source: {exc!r}") from exc


def encode_public_inputs(raw: Sequence[float], spec: InputSpec) -> list[int]:
    """Min-max scale with the published scaler, then fixed-point encode."""
    if len(raw) != len(spec.feature_names):
        raise DimensionError("fetched row width does not match the input spec")
    scaled = ScalerParams(spec.feature_names, spec.mins, spec.maxs).apply(np.asarray(raw))
    return [f.value for f in quantize_inputs(scaled, spec.scale_bits)]


def node_execute(node_id: int, task: SandboxTask, source: DataSource,
                 fault: str | None = None) -> NodeReport | None:
    """One node's sandboxed run. Fetch failures become error reports."""
    if fault == "silent":
        return None
    spec = task.inputs
    fetched: list[int] = []
    verified = False
    error = None
    try:
        if fault == "offline":
            raise FetchError(f"node {node_id} cannot reach {spec.source}")
        fetched = encode_public_inputs(source.fetch(spec.row, spec.feature_names), spec)
        try:
            verified = verify(deserialize_vk(task.vk_bytes), fetched + [spec.claimed_output],
                              task.proof)
        except (MalformedEncoding, DimensionError):
            verified = False
    except FetchError as exc:
        error = str(exc)
    except Exception as exc:  # a broken descriptor must not take the round down
        error = f"{type(exc).__name__}: {exc}"

    if fault == "flip":
        verified = not verified
    elif fault == "lie-true":
        verified = True
    elif fault == "lie-false":
        verified = False
    elif fault == "garbage-inputs":
        rng = derive_rng("byzantine", node_id, task.request_id)
        fetched = [rng.randrange(P) for _ in fetched]
        verified = rng.random() < 0.5
    return NodeReport(node_id, task.request_id, verified, tuple(fetched), error,
                      report_digest(task, fetched, verified, error))


def _signed(v: int) -> int:
    return v - P if v > P // 2 else v


def lower_median(values: Sequence, key=None):
    """Middle element for odd counts, the lower of the two middles otherwise."""
    if not values:
        raise ValueError("median of nothing")
    ordered = sorted(values, key=key)
    return ordered[(len(ordered) - 1) // 2]


def majority_threshold(n_nodes: int) -> int:
    return n_nodes // 2 + 1


def aggregate(reports: Sequence[NodeReport | None], n_nodes: int, *,
              vk_digest: str = "", fees: LinkFees | None = None) -> AggregatedReport:
    fees = fees or LinkFees()
    by_node: dict[int, NodeReport] = {}
    for r in reports:
        if r is not None and r.ok and r.node_id not in by_node:
            by_node[r.node_id] = r
    valid = [by_node[k] for k in sorted(by_node)]
    need = majority_threshold(n_nodes)
    if len(valid) < need:
        raise QuorumFailure(f"{len(valid)} usable reports, need {need} of {n_nodes}")
    request_ids = {r.request_id for r in valid}
    if len(request_ids) != 1:
        raise ValueError("reports belong to different requests")
    verified = sum(r.verified for r in valid) >= need

    widths = [len(r.fetched_inputs) for r in valid]
    width = lower_median(widths)
    rows = [r.fetched_inputs for r in valid if len(r.fetched_inputs) == width]
    fetched = tuple(lower_median([row[j] for row in rows], key=_signed) for j in range(width))
    return AggregatedReport(request_ids.pop(), vk_digest, len(valid), verified, fetched,
                            tuple(r.node_id for r in valid), fees.cost(len(valid)))


def bill_link(sub: Subscription, report: AggregatedReport) -> Subscription:
    if report.quorum < 1:
        raise ValueError("cannot bill a report without a quorum")
    if report.link_cost > sub.balance:
        raise InsufficientLink(f"subscription {sub.sub_id} holds {sub.balance}, "
                               f"request costs {report.link_cost}")
    return replace(sub, balance=sub.balance - report.link_cost)


@dataclass
class RoundResult:
    request: OracleRequest
    reports: list[NodeReport | None]
    aggregated: AggregatedReport
    tx: LedgerTx


class OracleNetwork:
    def __init__(self, ledger: Ledger, sources: Mapping[str, DataSource],
                 n_nodes: int = DEFAULT_NODES, fees: LinkFees | None = None,
                 faults: Mapping[int, str] | None = None, reporter: str = "oracle",
                 audit_path: str | Path | None = None):
        if n_nodes < 1:
            raise ValueError("need at least one node")
        for f in (faults or {}).values():
            if f not in FAULTS:
                raise ValueError(f"unknown fault {f!r}")
        self.ledger = ledger
        self.sources = dict(sources)
        self.n_nodes = n_nodes
        self.fees = fees or LinkFees()
        self.faults = dict(faults or {})
        self.reporter = reporter
        self.audit_path = Path(audit_path) if audit_path else None
        self.requests: dict[int, OracleRequest] = {}
        self.states: dict[int, str] = {}
        self.audit: list[dict] = []
        self._next_id = 1
        if reporter not in ledger.accounts:
            ledger.create_account(reporter)

    def _log(self, event: str, **fields):
        entry = {"event": event, **fields}
        self.audit.append(entry)
        if self.audit_path:
            with open(self.audit_path, "a") as fh:
                fh.write(json.dumps(entry, sort_keys=True) + "\n")

    def estimate_cost(self) -> int:
        return self.fees.cost(self.n_nodes)

    def submit_request(self, req: OracleRequest) -> int:
        sub = self.ledger.subscription(req.subscription_id)
        if not self.ledger.has_vk(req.vk_digest):
            raise UnknownVerifier(req.vk_digest)
        estimate = self.estimate_cost()
        log.info("request estimate %d juels against balance %d", estimate, sub.balance)
        if sub.balance < estimate:
            raise InsufficientLink(f"balance {sub.balance} below estimate {estimate}")
        rid = self._next_id
        self._next_id += 1
        req = replace(req, request_id=rid)
        self.requests[rid] = req
        self.states[rid] = PENDING
        self._log("submit", request_id=rid, subscription_id=req.subscription_id,
                  vk_digest=req.vk_digest, estimate=str(estimate))
        return rid

    def task_for(self, request_id: int) -> SandboxTask:
        req = self.requests[request_id]
        return SandboxTask(request_id, self.ledger.get_vk(req.vk_digest), req.proof, req.inputs)

    def node_execute(self, node_id: int, request_id: int) -> NodeReport | None:
        if self.states.get(request_id) != PENDING:
            raise ValueError(f"request {request_id} is not pending")
        task = self.task_for(request_id)
        source = self.sources.get(task.inputs.source)
        if source is None:
            source = StubSource(lambda *_: (_ for _ in ()).throw(
                FetchError(f"no data source {task.inputs.source!r}")))
        return node_execute(node_id, task, source, self.faults.get(node_id))

    def run_round(self, request_id: int) -> RoundResult:
        req = self.requests[request_id]
        reports = [self.node_execute(k, request_id) for k in range(self.n_nodes)]
        for r in reports:
            if r is not None:
                self._log("report", request_id=request_id, node_id=r.node_id,
                          verified=r.verified, error=r.error, digest=r.digest)
        try:
            agg = aggregate(reports, self.n_nodes, vk_digest=req.vk_digest, fees=self.fees)
        except QuorumFailure:
            self.states[request_id] = FAILED_QUORUM
            self._log("quorum-failure", request_id=request_id)
            raise
        try:
            sub = bill_link(self.ledger.subscription(req.subscription_id), agg)
        except InsufficientLink:
            self.states[request_id] = FAILED_BILLING
            self._log("billing-failure", request_id=request_id)
            raise
        self.ledger.put_subscription(sub)
        statement = list(agg.fetched_inputs) + [req.inputs.claimed_output]
        tx = self.ledger.submit_report(self.reporter, agg, req.proof, statement)
        self.states[request_id] = FULFILLED
        self._log("fulfilled", request_id=request_id, aggregated=agg.to_dict(), tx_id=tx.tx_id)
        return RoundResult(req, reports, agg, tx)

    def audit_jsonl(self) -> str:
        return "".join(json.dumps(e, sort_keys=True) + "\n" for e in self.audit)
