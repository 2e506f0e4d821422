"""
Command-line entry point.

Step commands (ingest, analyze, train, compile, setup, prove, verify, deploy,
request) read and write artifacts in the ``--out`` directory, so the flow can
be driven one step at a time. ``pipeline`` runs all of them in one process,
``bench`` sweeps model sizes and ``report`` summarizes recorded runs.

Exit status is 0 on success; for verify, request and pipeline it is 0 iff the
proof was accepted.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

from .circuit import compile_linear, dump_r1cs, generate_witness, parse_r1cs
from .data import correlate
from .errors import StageError, ZkaiError
from .ledger import Ledger, format_units, to_units
from .model import load_model, quantize, quantized_predict, save_model
from .oracle import (FixtureSource, InputSpec, OracleNetwork, OracleRequest,
                     encode_public_inputs)
from .pipeline import (FAULT_KINDS, PipelineConfig, bundled_dataset, ceremony_entropies,
                       choose_features, choose_row, load_inputs, run_bench,
                       run_pipeline, train_model)
from .report import FORMATS, append_runs, load_runs, render
from .seeds import derive_bytes, seed_from_env
from .snark import (crs_from_json, crs_to_json, deserialize_vk, prove, r1cs_to_qap,
                    serialize_proof, serialize_vk, setup, verify)
log = logging.getLogger("zkai")

COMMANDS = ("ingest", "analyze", "train", "compile", "setup", "prove", "verify",
            "deploy", "request", "pipeline", "bench", "report")
DEFAULT_OUT = "zkai-out"


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--dataset", help="CSV with a date column (default: bundled sample)")
    p.add_argument("--target", default="price")
    p.add_argument("--features", help="comma-separated feature names")
    p.add_argument("--n-features", type=int, help="keep the n strongest features")
    p.add_argument("--threshold", type=float, default=0.5)
    p.add_argument("--scale-bits", type=int, default=16)
    p.add_argument("--nodes", type=int, default=4)
    p.add_argument("--contributions", type=int, default=2)
    p.add_argument("--seed", type=int, help="root seed (default: $ZKAI_SEED or 42)")
    p.add_argument("--fault", choices=FAULT_KINDS)
    p.add_argument("--out", default=DEFAULT_OUT, help="artifact directory")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="zkai", description="Verifiable linear-model claims.")
    sub = ap.add_subparsers(dest="command", required=True)
    common = _common()
    helps = {
        "ingest": "load and clean a dataset", "analyze": "correlations and feature selection",
        "train": "fit and save the model", "compile": "model to constraint system",
        "setup": "ceremony and key generation", "prove": "prove one inference",
        "verify": "check a proof locally", "deploy": "publish the verification key",
        "request": "oracle verification round", "pipeline": "all steps end to end",
        "bench": "sweep model sizes", "report": "summarize recorded runs",
    }
    cmds = {name: sub.add_parser(name, parents=[common], help=helps[name]) for name in COMMANDS}
    cmds["prove"].add_argument("--row", type=int, help="dataset row (default: seed-derived)")
    cmds["request"].add_argument("--funding", default="2.0", help="LINK to fund")
    cmds["bench"].add_argument("--n-list", default="1,2,4,8",
                               help="comma-separated feature counts")
    cmds["bench"].add_argument("--repeats", type=int, default=5)
    cmds["report"].add_argument("--format", default="markdown", choices=FORMATS)
    return ap


def _config(args) -> PipelineConfig:
    feats = tuple(f.strip() for f in args.features.split(",")) if args.features else None
    return PipelineConfig(dataset=args.dataset, target=args.target, features=feats,
                          n_features=args.n_features, threshold=args.threshold,
                          scale_bits=args.scale_bits, nodes=args.nodes,
                          contributions=args.contributions, seed=args.seed, fault=args.fault)


def _write(out: Path, name: str, data: str | bytes) -> Path:
    out.mkdir(parents=True, exist_ok=True)
    p = out / name
    p.write_bytes(data) if isinstance(data, bytes) else p.write_text(data)
    return p


def _dump(obj) -> str:
    return json.dumps(obj, indent=1, sort_keys=True) + "\n"


# step commands

def cmd_ingest(args, cfg, out):
    ds, _, _ = load_inputs(cfg)
    doc = {"rows": ds.n_rows, "features": list(ds.feature_names), "target": ds.target_name,
           "digest": ds.digest().hex(), "notes": list(ds.notes)}
    _write(out, "ingest.json", _dump(doc))
    print(f"{ds.n_rows} rows, {len(ds.feature_names)} features")
    return 0


def cmd_analyze(args, cfg, out):
    ds, _, _ = load_inputs(cfg)
    chosen = choose_features(ds, cfg)
    doc = {"correlations": correlate(ds).to_dict(), "threshold": cfg.threshold,
           "selected": chosen}
    _write(out, "analysis.json", _dump(doc))
    print("selected: " + ", ".join(chosen))
    return 0


def _selected(cfg, out, ds):
    if cfg.features is None and cfg.n_features is None and (out / "analysis.json").exists():
        return json.loads((out / "analysis.json").read_text())["selected"]
    return choose_features(ds, cfg)


def cmd_train(args, cfg, out):
    ds, _, _ = load_inputs(cfg)
    model, _, _, claim = train_model(ds, _selected(cfg, out, ds), cfg)
    out.mkdir(parents=True, exist_ok=True)
    save_model(model, out / "model.json", cfg.scale_bits)
    _write(out, "evaluation.json", _dump(claim.to_dict()))
    print(f"trained on {len(model.feature_names)} features, held-out mse {claim.mse:.6g}")
    return 0


def cmd_compile(args, cfg, out):
    model, _ = load_model(out / "model.json")
    sys_ = compile_linear(model.n_features)
    _write(out, "circuit.r1cs", dump_r1cs(sys_))
    print(f"{sys_.num_constraints} constraints, {sys_.num_wires} wires")
    return 0


def cmd_setup(args, cfg, out):
    qap = r1cs_to_qap(parse_r1cs((out / "circuit.r1cs").read_text()))
    crs, _ = setup(qap, ceremony_entropies(cfg.seed, cfg.contributions))
    _write(out, "crs.json", crs_to_json(crs))
    _write(out, "vk.bin", serialize_vk(crs.vk))
    print(f"ceremony with {cfg.contributions} contributions; vk {len(serialize_vk(crs.vk))} bytes")
    return 0


def cmd_prove(args, cfg, out):
    model, bits = load_model(out / "model.json")
    sys_ = compile_linear(model.n_features)
    if dump_r1cs(sys_) != (out / "circuit.r1cs").read_text():
        raise ZkaiError("circuit.r1cs does not match the saved model")
    crs = crs_from_json((out / "crs.json").read_text())
    ds, name, source = load_inputs(cfg)
    row = args.row if args.row is not None else choose_row(ds, cfg)
    names = model.feature_names
    spec = InputSpec(name, row, names, model.scaler.mins, model.scaler.maxs, bits, 0)
    q = quantize(model, bits)
    xq = encode_public_inputs(source.fetch(row, names), spec)
    spec = replace(spec, claimed_output=quantized_predict(q, xq).value)
    proof = serialize_proof(prove(crs, r1cs_to_qap(sys_), generate_witness(sys_, q, xq),
                                  seed=derive_bytes(cfg.seed, "proof")))
    _write(out, "proof.bin", proof)
    _write(out, "statement.json", _dump({
        "inputs": spec.to_dict(), "claimed_output": str(spec.claimed_output),
        "public_inputs": [format(int(v), "x") for v in xq] + [format(spec.claimed_output, "x")]}))
    print(f"proof {len(proof)} bytes for row {row}")
    return 0


def _statement(out: Path):
    doc = json.loads((out / "statement.json").read_text())
    d = dict(doc["inputs"])
    d["claimed_output"] = int(doc["claimed_output"])
    spec = InputSpec(**{**d, "feature_names": tuple(d["feature_names"]),
                        "mins": tuple(d["mins"]), "maxs": tuple(d["maxs"])})
    return spec, [int(v, 16) for v in doc["public_inputs"]]


def cmd_verify(args, cfg, out):
    _, pub = _statement(out)
    ok = verify(deserialize_vk((out / "vk.bin").read_bytes()), pub, (out / "proof.bin").read_bytes())
    print("verified" if ok else "rejected")
    return 0 if ok else 1


def _ledger(out: Path) -> Ledger:
    p = out / "ledger.json"
    return Ledger.from_json(p.read_text()) if p.exists() else Ledger()


def cmd_deploy(args, cfg, out):
    led = _ledger(out)
    if "developer" not in led.accounts:
        led.create_account("developer")
    digest = led.deploy_vk("developer", (out / "vk.bin").read_bytes())
    _write(out, "ledger.json", led.to_json())
    _write(out, "deploy.json", _dump({"vk_digest": digest}))
    print(f"vk deployed: {digest}")
    return 0


def cmd_request(args, cfg, out):
    led = _ledger(out)
    digest = json.loads((out / "deploy.json").read_text())["vk_digest"]
    spec, _ = _statement(out)
    if "buyer" not in led.accounts:
        led.create_account("buyer")
    sub = led.create_subscription("buyer")
    led.fund_subscription("buyer", sub, to_units(args.funding))
    path = Path(cfg.dataset) if cfg.dataset else bundled_dataset()
    net = OracleNetwork(led, {spec.source: FixtureSource(path, cfg.target)}, n_nodes=cfg.nodes,
                        audit_path=out / "audit.jsonl")
    rid = net.submit_request(OracleRequest(sub, digest, (out / "proof.bin").read_bytes(),
                                           spec, "buyer"))
    res = net.run_round(rid)
    _write(out, "ledger.json", led.to_json())
    rec = led.query_record(rid)
    print(f"request {rid}: oracle={res.aggregated.verified} ledger={rec.verified} "
          f"fee={format_units(res.tx.fee)} ETH link={format_units(res.aggregated.link_cost)}")
    return 0 if rec.verified else 1


def cmd_pipeline(args, cfg, out):
    rep = run_pipeline(cfg)
    _write(out, "report.json", rep.to_json())
    append_runs(out / "runs.jsonl", [rep])
    t = rep.timings
    print(f"n={rep.n} verified={rep.verified} proof={rep.proof_len}B vk={rep.vk_len}B "
          f"generation={t.total_generation:.3f}s fee={format_units(rep.eth_fee)} ETH "
          f"link={format_units(rep.link_cost)}")
    return 0 if rep.verified else 1


def cmd_bench(args, cfg, out):
    n_list = [int(v) for v in args.n_list.split(",")]
    res = run_bench(n_list, args.repeats, cfg, out)
    append_runs(out / "runs.jsonl", res.reports)
    for n, med in res.phase2_medians().items():
        print(f"n={n:3d} phase2 median {med:.6f}s")
    print(f"proof length {sorted(res.proof_lengths)}; {len(res.failures)} failures")
    return 0 if not res.failures else 1


def cmd_report(args, cfg, out):
    sys.stdout.write(render(load_runs(out / "runs.jsonl"), args.format))
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.seed is None:
        args.seed = seed_from_env(42)
    out = Path(args.out)
    try:
        cfg = _config(args)
        return globals()[f"cmd_{args.command}"](args, cfg, out)
    except StageError as exc:
        print(f"error in stage {exc.stage}: {exc.cause}", file=sys.stderr)
        return 2
    except (ZkaiError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
