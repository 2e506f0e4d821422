"""
End-to-end orchestration: data to model to circuit to proof to oracle to ledger.

Every stage is timed with a wall clock and wrapped so a failure surfaces as a
:class:`StageError` naming the stage. All randomness (ceremony entropy, proof
blinding, evaluation row) derives from one root seed, so two runs with the
same config differ only in their timings.
"""

from __future__ import annotations

import hashlib
import json
import logging
import statistics
import time
from contextlib import contextmanager
from dataclasses import asdict, dataclass, field, fields, replace
from importlib import resources
from pathlib import Path
from typing import Sequence

from .circuit import check_r1cs, compile_linear, generate_witness
from .data import (Dataset, clean, correlate, load_csv, normalize, select_features,
                   synthetic_dataset, train_eval_split)
from .errors import StageError, ZkaiError
from .ledger import Ledger, to_units
from .model import (DEFAULT_SCALE_BITS, dequantize_value, evaluate_mse,
                    fit, quantize, quantized_predict)
from .oracle import (FixtureSource, InputSpec, OracleNetwork, OracleRequest,
                     StubSource, encode_public_inputs)
from .seeds import derive_bytes, derive_rng
from .snark import (ceremony_contribute, crs_to_json, forge_proof, new_accumulator,
                    phase2_specialize, prove, r1cs_to_qap, serialize_proof,
                    serialize_vk, verify)

log = logging.getLogger(__name__)

FAULT_KINDS = ("tamper-proof", "tamper-witness", "tamper-input", "byzantine-node")
TIMED_STAGES = ("compile", "witness", "pot", "ceremony", "phase2", "zkey", "proof",
                "verify", "oracle_overhead", "ledger_overhead")
GENERATION_STAGES = TIMED_STAGES[:7]


def bundled_dataset() -> Path:
    return Path(str(resources.files("zkai") / "data" / "sample_onchain.csv"))


@dataclass(frozen=True)
class PipelineConfig:
    dataset: str | None = None  # None: the bundled sample
    target: str = "price"
    features: tuple[str, ...] | None = None
    n_features: int | None = None  # strongest n, ignoring the threshold
    threshold: float = 0.5
    scale_bits: int = DEFAULT_SCALE_BITS
    nodes: int = 4
    contributions: int = 2
    seed: int = 42
    fault: str | None = None
    synthetic: int | None = None  # feature count of a generated dataset
    synthetic_rows: int = 120
    train_fraction: float = 0.8
    funding: str = "2.0"  # LINK

    def __post_init__(self):
        if self.fault is not None and self.fault not in FAULT_KINDS:
            raise ValueError(f"unknown fault {self.fault!r}; choose from {FAULT_KINDS}")
        if self.contributions < 1:
            raise ValueError("ceremony needs at least one contribution")
        if self.nodes < 1:
            raise ValueError("need at least one oracle node")
        if self.synthetic is not None and self.synthetic < 1:
            raise ValueError("synthetic feature count must be >= 1")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["features"] = list(self.features) if self.features else None
        return d


@dataclass
class StageTimings:
    compile: float = 0.0
    witness: float = 0.0
    pot: float = 0.0
    ceremony: float = 0.0
    phase2: float = 0.0
    zkey: float = 0.0
    proof: float = 0.0
    verify: float = 0.0
    oracle_overhead: float = 0.0
    ledger_overhead: float = 0.0

    @property
    def total_generation(self) -> float:
        return sum(getattr(self, s) for s in GENERATION_STAGES)

    def to_dict(self) -> dict:
        d = {f.name: getattr(self, f.name) for f in fields(self)}
        d["total_generation"] = self.total_generation
        return d


@dataclass
class BenchReport:
    run_id: str
    seed: int
    n: int
    features: tuple[str, ...]
    fault: str | None
    timings: StageTimings
    proof_len: int
    vk_len: int
    eth_fee: int  # wei per submit_report
    link_cost: int  # juels per request
    local_verified: bool
    oracle_verified: bool
    verified: bool  # the ledger record
    request_id: int
    claimed_output: int
    predicted: float
    mse: float
    num_constraints: int
    record: str  # canonical record bytes

    def to_dict(self, timings: bool = True) -> dict:
        d = {f.name: getattr(self, f.name) for f in fields(self) if f.name != "timings"}
        d["features"] = list(self.features)
        for k in ("eth_fee", "link_cost", "claimed_output"):
            d[k] = str(d[k])
        if timings:
            d["timings"] = self.timings.to_dict()
        return d

    def canonical_bytes(self) -> bytes:
        """Everything except wall-clock durations, in a fixed encoding."""
        return json.dumps(self.to_dict(timings=False), sort_keys=True,
                          separators=(",", ":")).encode()

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=1)


class _Clock:
    def __init__(self):
        self.timings = StageTimings()

    @contextmanager
    def stage(self, name: str):
        t0 = time.perf_counter()
        try:
            yield
        except StageError:
            raise
        except Exception as exc:
            raise StageError(name, exc) from exc
        finally:
            if name in TIMED_STAGES:
                setattr(self.timings, name,
                        getattr(self.timings, name) + time.perf_counter() - t0)


def run_id_for(cfg: PipelineConfig) -> str:
    return hashlib.sha256(json.dumps(cfg.to_dict(), sort_keys=True).encode()).hexdigest()[:16]


def load_inputs(cfg: PipelineConfig) -> tuple[Dataset, str, object]:
    """(cleaned dataset, source name, data source) for a config."""
    if cfg.synthetic is not None:
        rows = max(cfg.synthetic_rows, 4 * cfg.synthetic + 8)
        ds, _, _ = synthetic_dataset(cfg.synthetic, rows, cfg.seed, noise=0.01)
        return ds, "synthetic", StubSource(
            lambda row, names: ds.select(names).features[row].tolist())
    path = Path(cfg.dataset) if cfg.dataset else bundled_dataset()
    return clean(load_csv(path, cfg.target)), "fixture", FixtureSource(path, cfg.target)


def choose_features(ds: Dataset, cfg: PipelineConfig) -> list[str]:
    if cfg.features:
        return list(cfg.features)
    if cfg.synthetic is not None and cfg.n_features is None:
        return list(ds.feature_names)
    report = correlate(ds)
    if cfg.n_features is not None:
        return select_features(report, 0.0)[:cfg.n_features]
    chosen = select_features(report, cfg.threshold)
    if not chosen:
        raise ValueError(f"no feature reaches |correlation| >= {cfg.threshold}")
    return chosen


def train_model(ds: Dataset, names: Sequence[str], cfg: PipelineConfig):
    """Fit on the training split in scaled units; returns (model, train, eval, claim)."""
    train, held = train_eval_split(ds.select(names), cfg.train_fraction)
    scaled, scaler = normalize(train)
    model = replace(fit(scaled), scaler=scaler)
    held_scaled = Dataset(held.feature_names, scaler.apply(held.features), held.target,
                          held.target_name)
    return model, train, held, evaluate_mse(model, held_scaled, cfg.scale_bits)


def choose_row(ds: Dataset, cfg: PipelineConfig) -> int:
    cut = train_eval_split(ds, cfg.train_fraction)[0].n_rows
    return cut + derive_rng(cfg.seed, "row").randrange(ds.n_rows - cut)


def ceremony_entropies(seed, k: int) -> list[bytes]:
    return [derive_bytes(seed, "ceremony", j) for j in range(k)]


def _tamper_bytes(raw: bytes) -> bytes:
    b = bytearray(raw)
    b[-1] = ord("0") if b[-1] != ord("0") else ord("1")
    return bytes(b)


def run_pipeline(cfg: PipelineConfig) -> BenchReport:
    clock = _Clock()
    with clock.stage("ingest"):
        ds, source_name, source = load_inputs(cfg)
    with clock.stage("analyze"):
        names = choose_features(ds, cfg)
    with clock.stage("train"):
        model, _, _, claim = train_model(ds, names, cfg)
        qmodel = quantize(model, cfg.scale_bits)
        row = choose_row(ds, cfg)
        spec = InputSpec(source_name, row, tuple(names), model.scaler.mins,
                         model.scaler.maxs, cfg.scale_bits, 0)
        xq = encode_public_inputs(source.fetch(row, names), spec)
        claimed = quantized_predict(qmodel, xq).value
        spec = replace(spec, claimed_output=claimed)

    with clock.stage("compile"):
        sys = compile_linear(len(names))
        qap = r1cs_to_qap(sys)
    with clock.stage("witness"):
        z = generate_witness(sys, qmodel, xq)
        if not check_r1cs(sys, z):
            raise ValueError("generated witness does not satisfy the constraints")
    with clock.stage("pot"):
        acc = new_accumulator(2 * qap.m)
    with clock.stage("ceremony"):
        for e in ceremony_entropies(cfg.seed, cfg.contributions):
            acc = ceremony_contribute(acc, e)
    with clock.stage("phase2"):
        crs = phase2_specialize(acc, qap)
    with clock.stage("zkey"):
        vk_bytes = serialize_vk(crs.vk)
        crs_to_json(crs)
    with clock.stage("proof"):
        proof_seed = derive_bytes(cfg.seed, "proof")
        if cfg.fault == "tamper-witness":
            bad = z.perturbed(sys.num_wires - 1)
            proof = serialize_proof(forge_proof(crs, qap, bad, seed=proof_seed))
        else:
            proof = serialize_proof(prove(crs, qap, z, seed=proof_seed))
        if cfg.fault == "tamper-proof":
            proof = _tamper_bytes(proof)
        if cfg.fault == "tamper-input":
            spec = replace(spec, claimed_output=(claimed + 1))
    with clock.stage("verify"):
        local_ok = verify(crs.vk, list(xq) + [spec.claimed_output], proof)

    with clock.stage("ledger_overhead"):
        ledger = Ledger()
        ledger.create_account("developer")
        ledger.create_account("buyer")
        digest = ledger.deploy_vk("developer", vk_bytes)
        sub = ledger.create_subscription("buyer")
        ledger.fund_subscription("buyer", sub, to_units(cfg.funding))
    with clock.stage("oracle_overhead"):
        faults = {0: "flip"} if cfg.fault == "byzantine-node" else {}
        net = OracleNetwork(ledger, {source_name: source}, n_nodes=cfg.nodes, faults=faults)
        rid = net.submit_request(OracleRequest(sub, digest, proof, spec, "buyer"))
        result = net.run_round(rid)
    with clock.stage("ledger_overhead"):
        record = ledger.query_record(rid)

    return BenchReport(
        run_id=run_id_for(cfg), seed=cfg.seed, n=len(names), features=tuple(names),
        fault=cfg.fault, timings=clock.timings, proof_len=len(proof), vk_len=len(vk_bytes),
        eth_fee=result.tx.fee, link_cost=result.aggregated.link_cost,
        local_verified=bool(local_ok), oracle_verified=result.aggregated.verified,
        verified=record.verified, request_id=rid, claimed_output=spec.claimed_output,
        predicted=dequantize_value(spec.claimed_output, 2 * cfg.scale_bits),
        mse=claim.mse, num_constraints=sys.num_constraints, record=record.to_bytes().decode())


@dataclass
class SweepResult:
    reports: list[BenchReport] = field(default_factory=list)
    failures: list[dict] = field(default_factory=list)

    @property
    def proof_lengths(self) -> set[int]:
        return {r.proof_len for r in self.reports}

    def phase2_medians(self) -> dict[int, float]:
        by_n: dict[int, list[float]] = {}
        for r in self.reports:
            by_n.setdefault(r.n, []).append(r.timings.phase2)
        return {n: statistics.median(v) for n, v in sorted(by_n.items())}

    def to_csv(self) -> str:
        cols = ["run_id", "n", "repeat", "verified", "proof_len", "vk_len", "eth_fee",
                "link_cost", *TIMED_STAGES, "total_generation"]
        lines = [",".join(cols)]
        repeat: dict[int, int] = {}
        for r in self.reports:
            k = repeat[r.n] = repeat.get(r.n, -1) + 1
            t = r.timings.to_dict()
            vals = [r.run_id, r.n, k, r.verified, r.proof_len, r.vk_len, r.eth_fee,
                    r.link_cost, *(f"{t[s]:.6f}" for s in (*TIMED_STAGES, "total_generation"))]
            lines.append(",".join(str(v) for v in vals))
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        return json.dumps({"reports": [r.to_dict() for r in self.reports],
                           "failures": self.failures,
                           "phase2_medians": {str(k): v for k, v in self.phase2_medians().items()}},
                          indent=1, sort_keys=True)


def run_bench(n_list: Sequence[int], repeats: int = 5, base: PipelineConfig | None = None,
              out_dir: str | Path | None = None) -> SweepResult:
    """One synthetic pipeline per (n, repeat); failures are recorded, not raised."""
    if any(n < 1 for n in n_list):
        raise ValueError("every n must be >= 1")
    base = base or PipelineConfig()
    res = SweepResult()
    for n in n_list:
        for k in range(repeats):
            cfg = replace(base, synthetic=n, features=None, n_features=None)
            try:
                res.reports.append(run_pipeline(cfg))
            except ZkaiError as exc:
                log.warning("bench n=%d repeat=%d failed: %s", n, k, exc)
                res.failures.append({"n": n, "repeat": k, "error": str(exc)})
    if len(res.proof_lengths) > 1:
        raise ZkaiError(f"proof length varies across the sweep: {sorted(res.proof_lengths)}")
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "bench.csv").write_text(res.to_csv())
        (out / "bench.json").write_text(res.to_json())
    return res
