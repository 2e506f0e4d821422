import itertools
import random
from dataclasses import replace

import pytest
from hypothesis import given, strategies as st

from zkai.circuit import compile_linear, generate_witness
from zkai.errors import (FetchError, InsufficientLink, QuorumFailure,
                         UnknownVerifier)
from zkai.field import P
from zkai.ledger import Ledger, to_units
from zkai.model import LinearModel, quantize, quantized_predict
from zkai.oracle import (FAILED_BILLING, FULFILLED, PENDING, AggregatedReport,
                         FixtureSource, InputSpec, LinkFees, NodeReport,
                         OracleNetwork, OracleRequest, SandboxTask, StubSource,
                         aggregate, bill_link, encode_public_inputs,
                         lower_median, node_execute, report_digest)
from zkai.snark import prove, r1cs_to_qap, serialize_proof, serialize_vk, setup, verify
from zkai.snark.encoding import deserialize_vk

NAMES = ("hashrate", "volume")
RAW = {0: {"hashrate": 150.0, "volume": 3.2e9}, 1: {"hashrate": 180.0, "volume": 1.1e9}}
MINS, MAXS = (100.0, 1e9), (200.0, 5e9)


def _build(row=0, seed=0):
    model = LinearModel(NAMES, (0.75, -0.3), 0.125)
    q = quantize(model, 16)
    spec0 = InputSpec("stub", row, NAMES, MINS, MAXS, 16, 0)
    xq = encode_public_inputs([RAW[row][n] for n in NAMES], spec0)
    sys = compile_linear(len(NAMES))
    qap = r1cs_to_qap(sys)
    z = generate_witness(sys, q, xq)
    crs, _ = setup(qap, [bytes([seed + 1]) * 32, bytes([seed + 2]) * 32])
    proof = serialize_proof(prove(crs, qap, z, seed=seed))
    spec = replace(spec0, claimed_output=quantized_predict(q, xq).value)
    return serialize_vk(crs.vk), proof, spec


@pytest.fixture(scope="module")
def built():
    return _build()


def _task(built, proof=None, rid=1):
    vk, pr, spec = built
    return SandboxTask(rid, vk, pr if proof is None else proof, spec)


def _tamper(proof):
    b = bytearray(proof)
    b[-1] = ord("0") if b[-1] != ord("0") else ord("1")
    return bytes(b)


def test_encoded_inputs_match_prover(built):
    vk, proof, spec = built
    pub = encode_public_inputs([RAW[0][n] for n in NAMES], spec) + [spec.claimed_output]
    assert verify(deserialize_vk(vk), pub, proof)


def test_node_honest_and_tampered(built):
    src = StubSource(RAW)
    assert node_execute(0, _task(built), src).verified
    assert not node_execute(0, _task(built, _tamper(built[1])), src).verified


def test_node_wrong_row_rejects(built):
    vk, proof, spec = built
    task = SandboxTask(1, vk, proof, replace(spec, row=1))
    assert not node_execute(0, task, StubSource(RAW)).verified


def test_fetch_failure_is_error_report(built):
    r = node_execute(2, _task(built), StubSource({}))
    assert r.error and not r.ok and not r.verified


def test_report_digest_recomputable(built):
    task = _task(built)
    r = node_execute(1, task, StubSource(RAW))
    assert r.digest == report_digest(task, r.fetched_inputs, r.verified, r.error)
    assert r.digest != report_digest(task, r.fetched_inputs, not r.verified, r.error)


def test_sandbox_task_has_only_declared_fields():
    assert set(SandboxTask.__dataclass_fields__) == {"request_id", "vk_bytes", "proof", "inputs"}


def test_lower_median_example():
    assert lower_median([812.3, 812.5, 812.4, 900.0]) == 812.4
    assert lower_median([3, 1, 2]) == 2
    with pytest.raises(ValueError):
        lower_median([])


@given(st.lists(st.integers(-1000, 1000), min_size=1, max_size=9))
def test_lower_median_order(xs):
    m = lower_median(xs)
    below = sum(x < m for x in xs)
    at_most = sum(x <= m for x in xs)
    assert below <= (len(xs) - 1) // 2 < at_most


def _reports(truth, pattern, rid=1):
    out = []
    for k, kind in enumerate(pattern):
        if kind == "silent":
            out.append(None)
            continue
        verdict = truth if kind == "honest" else not truth
        out.append(NodeReport(k, rid, verdict, (5, P - 3), None, f"{k}"))
    return out


@pytest.mark.parametrize("truth", [True, False])
def test_exhaustive_fault_patterns_four_nodes(truth):
    for pattern in itertools.product(("honest", "flip", "silent"), repeat=4):
        reps = _reports(truth, pattern)
        live = [r for r in reps if r is not None]
        if len(live) < 3:
            with pytest.raises(QuorumFailure):
                aggregate(reps, 4)
            continue
        agg = aggregate(reps, 4)
        assert agg.verified == (sum(r.verified for r in live) >= 3), pattern
        assert agg.quorum == len(live)
        if pattern.count("flip") <= 1 and truth is False:
            assert agg.verified is False
        if pattern.count("flip") == 0 and truth is True:
            assert agg.verified is True


def test_aggregate_permutation_invariant():
    r = random.Random(0)
    reps = [NodeReport(k, 1, r.random() < 0.6, (r.randrange(P), r.randrange(P)), None, str(k))
            for k in range(7)]
    base = aggregate(reps, 7)
    for _ in range(20):
        r.shuffle(reps)
        assert aggregate(reps, 7) == base


def test_aggregate_signed_median():
    reps = [NodeReport(k, 1, True, (v,), None, "") for k, v in enumerate((P - 1, 2, 1, P - 5))]
    assert aggregate(reps, 4).fetched_inputs == (P - 1,)


def test_duplicate_node_counts_once():
    reps = [NodeReport(0, 1, True, (), None, "")] * 3
    with pytest.raises(QuorumFailure):
        aggregate(reps, 4)


def test_billing():
    fees = LinkFees()
    assert fees.cost(3) == to_units("0.25")
    assert fees.cost(4) == to_units("0.30")
    from zkai.ledger import Subscription
    agg = AggregatedReport(1, "", 3, True, (), (0, 1, 2), fees.cost(3))
    sub = bill_link(Subscription(1, "a", to_units(1)), agg)
    assert sub.balance == to_units("0.75")
    with pytest.raises(InsufficientLink):
        bill_link(Subscription(1, "a", to_units("0.2")), agg)
    with pytest.raises(ValueError):
        bill_link(sub, replace(agg, quorum=0))


def _network(built, faults=None, fund="2.0", n_nodes=4):
    led = Ledger()
    led.create_account("buyer")
    digest = led.deploy_vk("buyer", built[0])
    sub = led.create_subscription("buyer")
    if fund:
        led.fund_subscription("buyer", sub, to_units(fund))
    net = OracleNetwork(led, {"stub": StubSource(RAW)}, n_nodes=n_nodes, faults=faults)
    req = OracleRequest(sub, digest, built[1], built[2], "buyer")
    return net, led, req


def test_round_end_to_end(built):
    net, led, req = _network(built)
    rid = net.submit_request(req)
    assert net.states[rid] == PENDING
    res = net.run_round(rid)
    assert res.aggregated.verified and led.query_record(rid).verified
    assert net.states[rid] == FULFILLED
    assert led.subscription(req.subscription_id).balance == to_units("1.70")
    assert [e["event"] for e in net.audit][0] == "submit"


def test_round_agrees_with_direct_verify(built):
    vk, proof, spec = built
    for pr in (proof, _tamper(proof)):
        net, led, req = _network(built)
        rid = net.submit_request(replace(req, proof=pr))
        res = net.run_round(rid)
        direct = verify(deserialize_vk(vk), encode_public_inputs(
            [RAW[0][n] for n in NAMES], spec) + [spec.claimed_output], pr)
        assert res.aggregated.verified == direct == led.query_record(rid).verified


def test_byzantine_minority_tolerated(built):
    net, led, req = _network(built, faults={3: "garbage-inputs"})
    res = net.run_round(net.submit_request(req))
    assert res.aggregated.verified and led.query_record(res.aggregated.request_id).verified


def test_lying_majority_overruled_by_ledger(built):
    net, led, req = _network(built, faults={0: "lie-true", 1: "lie-true", 2: "lie-true"})
    rid = net.submit_request(replace(req, proof=_tamper(built[1])))
    res = net.run_round(rid)
    assert res.aggregated.verified is True
    assert led.query_record(rid).verified is False


def test_quorum_failure(built):
    net, _, req = _network(built, faults={0: "offline", 1: "silent"})
    rid = net.submit_request(req)
    with pytest.raises(QuorumFailure):
        net.run_round(rid)


def test_unfunded_and_unknown(built):
    net, _, req = _network(built, fund=None)
    with pytest.raises(InsufficientLink):
        net.submit_request(req)
    net, _, req = _network(built)
    with pytest.raises(UnknownVerifier):
        net.submit_request(replace(req, vk_digest="ab" * 32))


def test_balance_drained_between_rounds(built):
    net, led, req = _network(built, fund="0.5")
    rid1 = net.submit_request(req)
    rid2 = net.submit_request(req)
    net.run_round(rid1)
    with pytest.raises(InsufficientLink):
        net.run_round(rid2)
    assert net.states[rid2] == FAILED_BILLING
    assert led.subscription(req.subscription_id).balance == to_units("0.20")


def test_request_ids_sequential(built):
    net, _, req = _network(built, fund="5")
    assert [net.submit_request(req) for _ in range(3)] == [1, 2, 3]


def test_audit_log_file(built, tmp_path):
    net, _, req = _network(built)
    net.audit_path = tmp_path / "audit.jsonl"
    net.run_round(net.submit_request(req))
    assert net.audit_path.read_text() == net.audit_jsonl()


def test_unknown_fault_rejected(built):
    with pytest.raises(ValueError):
        _network(built, faults={0: "meteor"})


def test_fixture_source(tmp_path):
    p = tmp_path / "d.csv"
    p.write_text("date,hashrate,volume,price\n2020-01-01,1,10,5\n2020-01-02,2,30,6\n")
    src = FixtureSource(p, "price")
    assert src.fetch(1, ["volume", "hashrate"]) == [30.0, 2.0]
    with pytest.raises(FetchError):
        src.fetch(5, ["volume"])
    with pytest.raises(FetchError):
        FixtureSource(tmp_path / "missing.csv", "price").fetch(0, ["x"])
