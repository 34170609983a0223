"""Acceptance suite. Each test prints one PASS/FAIL line (visible without -s)."""

import contextlib
import io
import itertools
import json
import time

import numpy as np
import pytest

from clusterbell import cli, expsim, nonlocality, pauli, photonics, qstate
from clusterbell.nonlocality import SC_TERMS

from conftest import dense_expectation, schmidt_entropy


@pytest.fixture
def report(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}")
        assert ok, detail

    return emit


def test_ideal_bell_value(report):
    buf = io.StringIO()
    t0 = time.perf_counter()
    with contextlib.redirect_stdout(buf):
        code = cli.main(["bell", "target"])
    elapsed = time.perf_counter() - t0
    s_c = json.loads(buf.getvalue())["s_c"]
    ok = code == 0 and abs(s_c - 4.0) <= 1e-9 and elapsed < 1.0
    report(1, ok, f"bell target S_C = {s_c:.12f} (|dev| {abs(s_c - 4):.1e}), {elapsed:.3f} s")


def test_stabilizer_census(report):
    t0 = time.perf_counter()
    stabs = pauli.enumerate_stabilizers(qstate.linear_cluster(4))
    elapsed = time.perf_counter() - t0
    signed = {p.unsigned(): s for p, s in stabs}
    group = {multiply_signed(p, s) for p, s in stabs}
    closed = all(
        pauli.multiply(a, b) in group or pauli.multiply(a, b) == pauli.PauliString.identity(4)
        for a, b in itertools.product(group, repeat=2)
    )
    quad = all(signed.get(pauli.PauliString.parse(p)) == s for p, s in nonlocality.PRIMED_QUADRUPLE)
    ok = len(stabs) == 15 and closed and quad and elapsed < 1.0
    report(
        2, ok,
        f"{len(stabs)} stabilizers, closed={closed}, ZYYZ/ZYXY/IZXZ/IZYY signs ok={quad}, {elapsed:.3f} s",
    )


def multiply_signed(p, s):
    return p if s == 1 else pauli.multiply(pauli.PauliString.parse("-" + "I" * p.n), p)


def test_lhv_bound(report):
    t0 = time.perf_counter()
    best, _ = nonlocality.lhv_maximum(SC_TERMS)
    values = nonlocality.strategy_values(SC_TERMS)
    primed = nonlocality.ghz_argument_check(nonlocality.PRIMED_QUADRUPLE)
    target = nonlocality.ghz_argument_check(nonlocality.TARGET_QUADRUPLE)
    elapsed = time.perf_counter() - t0
    ok = (
        len(values) == 128 and best == 2 and max(values) == 2
        and not primed.satisfiable and not target.satisfiable and elapsed < 1.0
    )
    report(
        3, ok,
        f"max over {len(values)} strategies = {best}; primed satisfiable={primed.satisfiable}, "
        f"target satisfiable={target.satisfiable}, {elapsed:.3f} s",
    )


def test_ghz_non_violation(report):
    g = qstate.ghz(4)
    s_c = nonlocality.bell_parameter_of_state(g)
    e = {str(t.pauli): dense_expectation(g.vector, str(t.pauli)).real for t in SC_TERMS}
    oracle = abs(e["XYYX"] + e["XYXY"]) + abs(e["IZXX"] - e["IZYY"])
    ok = s_c <= 2 + 1e-12 and abs(s_c - oracle) <= 1e-12
    report(4, ok, f"S_C(GHZ4) = {s_c:.15f}, dense oracle {oracle:.15f}")


def test_optics_circuit(report):
    t0 = time.perf_counter()
    fixed = photonics.simulate_source()
    equal = photonics.SourceConfig(forward=1.0, backward=1.0, double_forward=1.0, double_backward=1.0)
    unfixed = photonics.simulate_source(equal, fix=False)
    elapsed = time.perf_counter() - t0
    flipped = np.zeros(16)
    flipped[[0, 3, 12, 15]] = [0.5, -0.5, 0.5, -0.5]
    ov = qstate.overlap(qstate.target_cluster(), fixed.state)
    ov_flip = abs(np.vdot(flipped, unfixed.state.vector))
    ok = ov >= 1 - 1e-9 and ov_flip >= 1 - 1e-9 and elapsed < 1.0
    report(5, ok, f"|<C4|out>| = {ov:.12f}, unfixed |<flipped|out>| = {ov_flip:.12f}, {elapsed:.3f} s")


def test_reduced_states(report):
    c = qstate.target_cluster()
    devs = [
        np.abs(qstate.partial_trace(c, [q]).density_matrix() - np.eye(2) / 2).max() for q in range(1, 5)
    ]
    ok = max(devs) <= 1e-12
    report(6, ok, f"max |rho_q - I/2| over q=1..4 = {max(devs):.1e}")


def test_experiment_reproduction(report):
    cal = expsim.calibrate_mean_counts(visibility=expsim.REFERENCE_VISIBILITY, runs=50, sweep=())
    cfg = expsim.ExperimentConfig(visibility=expsim.REFERENCE_VISIBILITY, mean_counts=cal["mean_counts"], seed=7)
    t0 = time.perf_counter()
    runs = expsim.run_many(None, cfg, 1000)
    elapsed = time.perf_counter() - t0
    summ = expsim.summarize(runs)
    # the calibration target of 0.04-0.05 per correlation is approximate
    per_stderr = float(np.mean(summ["stderr"]))
    ok = (
        2.49 <= summ["s_c"] <= 2.69
        and 0.06 <= summ["s_c_err"] <= 0.10
        and 5 <= summ["sigma_violation"] <= 9
        and 0.035 <= per_stderr <= 0.055
        and elapsed < 60
    )
    report(
        7, ok,
        f"{summ['runs']} runs at V={cfg.visibility}, counts={cfg.mean_counts:g}: "
        f"S_C = {summ['s_c']:.3f} +- {summ['s_c_err']:.3f}, {summ['sigma_violation']:.2f} sigma, "
        f"per-correlation stderr {per_stderr:.4f}, {elapsed:.2f} s",
    )


def test_estimator_soundness(report):
    big = expsim.ExperimentConfig(mean_counts=1e6, seed=11)
    prep = expsim.prepare(None, big)
    analytic = [pauli.expectation(prep.state, t.pauli) for t in SC_TERMS]
    run = expsim.run_experiment(None, big)
    z = [abs(e.value - a) / e.stderr for e, a in zip(run.estimates, analytic)]

    runs = expsim.run_many(None, expsim.ExperimentConfig(seed=12), 1000)
    summ = expsim.summarize(runs)
    ratios = [sp / se for sp, se in zip(summ["correlation_spread"], summ["stderr"])]
    ratios.append(summ["s_c_spread"] / summ["s_c_err"])
    ok = max(z) <= 3 and all(abs(r - 1) <= 0.2 for r in ratios)
    report(
        8, ok,
        f"max |E - E_exact|/stderr at 1e6 counts = {max(z):.2f}; "
        f"spread/stderr over 1000 runs = {', '.join(f'{r:.3f}' for r in ratios)}",
    )


def test_bell_projection(report):
    c = qstate.linear_cluster(4)
    entropies = []
    for o2, o3 in itertools.product((1, -1), repeat=2):
        s, p2 = qstate.project_qubit(c, 2, "X", o2)
        s, p3 = qstate.project_qubit(s, 3, "X", o3)
        # qubits 2 and 3 are now in product eigenstates; pull out qubits 1 and 4
        t = s.vector.reshape(2, 2, 2, 2)
        plus_minus = {1: np.array([1, 1]) / np.sqrt(2), -1: np.array([1, -1]) / np.sqrt(2)}
        pair = np.einsum("ajkd,j,k->ad", t, plus_minus[o2].conj(), plus_minus[o3].conj())
        entropies.append(schmidt_entropy(pair.reshape(-1), 2))
    ok = all(abs(h - 1) <= 1e-9 for h in entropies)
    report(9, ok, f"Schmidt entropies for outcomes ++,+-,-+,-- = {[round(h, 12) for h in entropies]}")
