"""Acceptance suite: one test per shipped quality gate.

Each test prints a single PASS/FAIL line (run with -s to watch them) and
then asserts, so the suite doubles as a report. Gates that need the full
21-sensor benchmark share one module-scoped setup.
"""

import itertools
import json
import time
from pathlib import Path

import numpy as np
import pytest

import sensorval as sv
from sensorval.benchmarks import reference_benchmark, tree21_benchmark
from sensorval.cli import main
from sensorval.isolation import CORRECT, FAULTY, apparent_name, root_name
from conftest import (FIXTURES, REFERENCE_EMB, WORKED_EXAMPLE_ROWS,
                      random_binary_net, random_emb_table, random_evidence)


def report(name: str, ok: bool, detail: str = ""):
    print(f"\nACCEPTANCE {name}: {'PASS' if ok else 'FAIL'}"
          + (f" ({detail})" if detail else ""))


BENCH_CRITERION = sv.DetectionCriterion("pvalue", 0.01)


@pytest.fixture(scope="module")
def bench21():
    return tree21_benchmark(calibration=BENCH_CRITERION)


@pytest.fixture(scope="module")
def policy_profiles(bench21):
    b = bench21
    return sv.compare_selection_policies(
        b.net, b.discretizer, b.iso, b.test, 260, seed=5,
        criterion=BENCH_CRITERION)


def test_worked_example_reproduction(ref_iso):
    """All 25 fault-probability entries of the five-step worked example,
    within +/-0.01 per entry, in under a second."""
    start = time.perf_counter()
    findings = {}
    worst = 0.0
    for (sensor, status), expected in WORKED_EXAMPLE_ROWS:
        findings[sensor] = status
        pf = sv.fault_belief(ref_iso, findings)
        for s, want in expected.items():
            worst = max(worst, abs(pf[s] - want))
    elapsed = time.perf_counter() - start
    ok = worst <= 0.01 and elapsed < 1.0
    report("worked-example-reproduction", ok,
           f"max deviation {worst:.4f}, {elapsed * 1000:.0f} ms")
    assert worst <= 0.01
    assert elapsed < 1.0


def test_oracle_equivalence():
    """Exact inference equals joint enumeration within 1e-9 on >= 200
    random binary networks of up to 12 variables, in under a minute."""
    start = time.perf_counter()
    rng = np.random.default_rng(101)
    worst = 0.0
    for k in range(200):
        net = random_binary_net(rng, int(rng.integers(2, 13)))
        target = net.names()[int(rng.integers(len(net.names())))]
        evidence = random_evidence(rng, net, target)
        try:
            got = sv.posterior_marginal(net, evidence, target)
        except sv.InconsistentEvidenceError:
            continue
        want = sv.brute_force_posterior(net, evidence, target)
        worst = max(worst, float(np.abs(
            got.probabilities - want.probabilities).max()))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-9 and elapsed < 60.0
    report("oracle-equivalence", ok,
           f"200 networks, max deviation {worst:.2e}, {elapsed:.1f} s")
    assert worst <= 1e-9
    assert elapsed < 60.0


def test_markov_blanket_screening():
    """Blanket-only evidence gives the same posterior as full evidence on
    >= 100 random small networks, within 1e-9."""
    rng = np.random.default_rng(103)
    worst = 0.0
    for k in range(100):
        net = random_binary_net(rng, int(rng.integers(3, 9)))
        target = net.names()[int(rng.integers(len(net.names())))]
        full = {}
        for n in net.names():
            if n != target:
                states = net.variable(n).states
                full[n] = states[int(rng.integers(len(states)))]
        blanket = {n: s for n, s in full.items()
                   if n in sv.markov_blanket(net, target)}
        try:
            a = sv.posterior_marginal(net, full, target)
        except sv.InconsistentEvidenceError:
            continue
        b = sv.posterior_marginal(net, blanket, target)
        worst = max(worst, float(np.abs(
            a.probabilities - b.probabilities).max()))
    ok = worst <= 1e-9
    report("markov-blanket-screening", ok, f"max deviation {worst:.2e}")
    assert worst <= 1e-9


def test_noisy_or_correctness():
    """Expanded noisy-OR tables match the inhibitor-product law by direct
    enumeration up to 8 parents; one active cause yields exactly 0.99."""
    rng = np.random.default_rng(104)
    worst = 0.0
    for n_parents in range(1, 9):
        causes = tuple(f"c{i}" for i in range(n_parents))
        strengths = {(c, "e"): float(rng.uniform(0.05, 0.99)) for c in causes}
        params = sv.NoisyOrParams(strengths)
        for bits in itertools.product((False, True), repeat=n_parents):
            assignment = dict(zip(causes, bits))
            got = sv.noisy_or_row(params, "e", causes, assignment)
            want = 1.0
            for c, active in assignment.items():
                if active:
                    want *= 1.0 - strengths[(c, "e")]
            want = 1.0 - want
            worst = max(worst, abs(got - want))
    single = sv.noisy_or_row(
        sv.NoisyOrParams({("c0", "e"): 0.99, ("c1", "e"): 0.99}), "e",
        ("c0", "c1"), {"c0": True, "c1": False})
    ok = worst <= 1e-12 and single == 0.99
    report("noisy-or-correctness", ok,
           f"max deviation {worst:.2e}, single-cause {single}")
    assert worst <= 1e-12
    assert single == 0.99


def test_entropy_and_quality_endpoints():
    """Exact entropy endpoints and symmetry; exact quality endpoints."""
    checks = [
        sv.binary_entropy(0.5) == 1.0,
        sv.binary_entropy(0.0) == 0.0,
        sv.binary_entropy(1.0) == 0.0,
        all(abs(sv.binary_entropy(p) - sv.binary_entropy(1 - p)) < 1e-12
            for p in np.linspace(0.001, 0.999, 101)),
        sv.quality({"a": 0.5, "b": 0.5}) == 0.0,
        sv.quality({"a": 0.0, "b": 1.0}) == 1.0,
    ]
    report("entropy-quality-endpoints", all(checks), f"{checks}")
    assert all(checks)


def test_tree_contracts(ref_iso):
    """The compiled full tree reproduces on-line selection on every outcome
    path (exhaustive, n=5); pruned trees respect the n(n+1) node bound on
    the reference table and on random tables up to n=10."""
    tree = sv.compile_decision_tree(ref_iso)
    equivalent = True
    for bits in itertools.product((FAULTY, CORRECT), repeat=5):
        node = tree.root
        findings = {}
        unvalidated = set(ref_iso.sensors)
        for status in bits:
            want = sv.select_next_sensor(ref_iso, findings, unvalidated)
            if node.sensor != want:
                equivalent = False
            findings[node.sensor] = status
            unvalidated.discard(node.sensor)
            node = node.faulty if status == FAULTY else node.ok

    emb = sv.EmbTable(REFERENCE_EMB)
    pruned = sv.prune_single_fault(tree, emb)
    sizes_ok = pruned.node_count() <= 5 * 6
    rng = np.random.default_rng(106)
    for _ in range(8):
        n = int(rng.integers(2, 11))
        table = random_emb_table(rng, n)
        iso = sv.build_isolation_network(table)
        compact = sv.compile_decision_tree(iso, emb=table)
        if compact.node_count() > n * (n + 1):
            sizes_ok = False
    ok = equivalent and sizes_ok
    report("tree-contracts", ok,
           f"online-equivalent={equivalent}, pruned nodes "
           f"{pruned.node_count()} <= 30, random tables ok={sizes_ok}")
    assert equivalent
    assert sizes_ok


def test_single_fault_identifiability(ref):
    """For every sensor of the reference net, a severe injected fault runs
    through the full cycle and ends with the faulted sensor above 0.99 and
    every other sensor below 0.05, in at least 95 of 100 seeded trials.

    Known limitation, shipped failing: the worked-example dynamics force
    nested blankets (p's inside m's; g's and a's inside t's), and a sensor
    whose blanket lies inside the faulty set is an indistinguishable free
    rider that keeps prior-level probability, so faults in m and t cannot
    satisfy the every-other-sensor clause. See README (Known limitations)
    and the per-sensor rates this test prints.
    """
    iso = sv.build_isolation_network(ref.emb)  # defaults: c=0.99, prior=0.5
    criterion = sv.DetectionCriterion("sigma", 3.0)
    rng = np.random.default_rng(2024)
    rows = rng.integers(0, len(ref.test), size=100)
    passes = {s: 0 for s in iso.sensors}
    for trial in range(100):
        reading = ref.test.row(int(rows[trial]))
        for r in iso.sensors:
            faulted = sv.inject_fault(reading, sv.FaultSpec(r, "severe"),
                                      ref.discretizer)
            records = list(sv.run_anytime_validation(
                ref.net, ref.discretizer, iso, None, faulted, criterion))
            pf = records[-1].pf
            if pf[r] > 0.99 and all(v < 0.05 for s, v in pf.items() if s != r):
                passes[r] += 1
    ok = all(v >= 95 for v in passes.values())
    report("single-fault-identifiability", ok, f"trial passes {passes}")
    assert all(v >= 95 for v in passes.values()), passes


def test_policy_dominance(policy_profiles):
    """On the 21-sensor benchmark with 260 single-fault experiments, mean
    quality under entropy selection is at least the random-selection mean
    at every step and strictly greater at the midpoint, inside 10 min."""
    start = time.perf_counter()
    entropy_q, random_q = policy_profiles
    mid = len(entropy_q) // 2
    every = bool(np.all(entropy_q >= random_q - 1e-9))
    strict = bool(entropy_q[mid] > random_q[mid])
    elapsed = time.perf_counter() - start
    ok = every and strict and elapsed < 600
    report("policy-dominance", ok,
           f"midpoint {entropy_q[mid]:.3f} vs {random_q[mid]:.3f}, "
           f"min margin {float(np.min(entropy_q - random_q)):+.4f}")
    assert every
    assert strict
    assert elapsed < 600


def test_error_rate_envelope(bench21):
    """On the 21-sensor benchmark with the p=0.01 criterion: severe faults
    within type II <= 5% and type I <= 10%; mild faults within 25%/25%."""
    b = bench21
    step = max(1, len(b.test) // 12)
    sub = sv.Dataset(b.test.sensors, b.test.values[::step][:12])
    records = sv.run_fault_experiments(
        b.net, b.discretizer, b.iso, None, sub, [BENCH_CRITERION],
        declare_threshold=0.9, seed=0)
    rep = sv.evaluate_errors(records)
    label = sv.harness.criterion_label(BENCH_CRITERION)
    rates = {(sev, kind): rep.rate(label, sev, kind)
             for sev in ("severe", "mild") for kind in ("type1", "type2")}
    ok = (rates[("severe", "type2")] <= 0.05
          and rates[("severe", "type1")] <= 0.10
          and rates[("mild", "type1")] <= 0.25
          and rates[("mild", "type2")] <= 0.25)
    report("error-rate-envelope", ok,
           "severe I/II = {:.1%}/{:.1%}, mild I/II = {:.1%}/{:.1%}".format(
               rates[("severe", "type1")], rates[("severe", "type2")],
               rates[("mild", "type1")], rates[("mild", "type2")]))
    assert rates[("severe", "type2")] <= 0.05
    assert rates[("severe", "type1")] <= 0.10
    assert rates[("mild", "type1")] <= 0.25
    assert rates[("mild", "type2")] <= 0.25


def test_expected_anytime_profile(policy_profiles):
    """Mean quality over the 260 entropy-policy experiments never drops by
    more than 0.01 between consecutive steps."""
    entropy_q, _ = policy_profiles
    drops = np.diff(entropy_q)
    worst = float(drops.min()) if len(drops) else 0.0
    ok = worst >= -0.01
    report("expected-anytime-profile", ok, f"worst step delta {worst:+.4f}")
    assert worst >= -0.01


def test_determinism_cmd_simulate(tmp_path):
    """Two cmd_simulate runs with the same configuration and seed write
    byte-identical reports."""
    net = str(FIXTURES / "reference_net.json")
    disc = str(FIXTURES / "reference_net.disc.json")
    readings = Path(FIXTURES / "reference_readings.csv").read_text()
    data = tmp_path / "rows.csv"
    data.write_text("\n".join(readings.splitlines()[:4]) + "\n")
    blobs = []
    for name in ("a.csv", "b.csv"):
        out = tmp_path / name
        rc = main(["simulate", "--network", net, "--discretizer", disc,
                   "--data", str(data), "--criterion", "pvalue",
                   "--seed", "13", "--out", str(out)])
        assert rc == 0
        blobs.append(out.read_bytes())
    ok = blobs[0] == blobs[1]
    report("determinism-cmd-simulate", ok,
           f"{len(blobs[0])} bytes each")
    assert ok
