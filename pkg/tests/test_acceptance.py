"""Acceptance criteria, one test each; the summary prints one PASS/FAIL line per criterion."""

import math
import subprocess
import sys
import time
from pathlib import Path

import numpy as np
import pytest

from qmud.bounds import bounds_row, default_fig2_delta, fig2_sweep, resolving_accuracy
from qmud.cdma import enumerate_database, qregister_size
from qmud.counting import (
    grover_outcome_distribution,
    max_accuracy,
    outcome_amplitude,
    outcome_distribution,
    simulate_counting_circuit,
    t_register_size,
)
from qmud.detector import Detector, run_trials
from qmud.grover import GroverOperator, dense_grover_matrix, grover_angle, optimal_iterations, success_probability
from qmud.qsim import DenseUnitary, QState
from qmud.scenario import load_scenario

ROOT = Path(__file__).resolve().parents[1]
DESK = ROOT / "scenarios" / "desk_k3.toml"


def dft_kernel(l):
    """``exp(-2j pi i k / 2**l)`` with the exponent reduced mod ``2**l`` before scaling."""
    n = 1 << l
    idx = np.arange(n)
    return np.exp(-2j * np.pi * (np.outer(idx, idx) % n) / n)


@pytest.mark.criterion(1, "closed-form amplitudes match the brute-force sum (l=1..10, 100 phases, < 1e-11, < 30 s)")
def test_amplitude_closed_form_vs_brute_force():
    start = time.perf_counter()
    deltas = np.arange(100) / 100.0
    worst = 0.0
    for l in range(1, 11):
        n = 1 << l
        k = np.arange(n)
        tones = np.exp(2j * np.pi * np.outer(k, deltas))
        brute = dft_kernel(l) @ tones / n
        for j, delta in enumerate(deltas):
            closed = outcome_amplitude(k, l, delta)
            worst = max(worst, float(np.max(np.abs(closed - brute[:, j]))))
    elapsed = time.perf_counter() - start
    print(f"max deviation {worst:.3e}, {elapsed:.2f} s")
    assert worst < 1e-11
    assert elapsed < 30.0


@pytest.mark.criterion(2, "dyadic phases give an exact indicator distribution (within 1e-12)")
def test_dyadic_determinism():
    worst = 0.0
    for l in range(1, 11):
        n = 1 << l
        for z in range(n):
            dist = outcome_distribution(l, z / n)
            dist[z] -= 1.0
            worst = max(worst, float(np.max(np.abs(dist))))
    print(f"max deviation {worst:.3e}")
    assert worst <= 1e-12


CIRCUIT_CASES = [(3, [5], 4), (4, [1, 2, 9], 5), (5, [0, 31], 5), (6, [17], 6), (6, list(range(0, 64, 4)), 4)]


@pytest.mark.criterion(3, "state-vector counting circuit matches the analytic distributions (within 1e-10)")
@pytest.mark.parametrize("n,marked,l", CIRCUIT_CASES)
def test_circuit_vs_analytic(n, marked, l):
    mask = np.zeros(1 << n, dtype=bool)
    mask[marked] = True
    g = dense_grover_matrix(mask)
    theta = grover_angle(len(marked), 1 << n)
    dense = DenseUnitary(g)

    vals, vecs = np.linalg.eig(g)
    for sign in (1, -1):
        j = int(np.argmin(np.abs(vals - np.exp(sign * 1j * theta))))
        eig = QState.from_vector(vecs[:, j], normalize=True)
        out = simulate_counting_circuit(dense, l, eig)
        expected = outcome_distribution(l, (sign * theta / (2 * math.pi)) % 1.0)
        assert np.max(np.abs(out.distribution - expected)) < 1e-10

    out = simulate_counting_circuit(dense, l)
    assert np.max(np.abs(out.distribution - grover_outcome_distribution(l, theta))) < 1e-10


@pytest.mark.criterion(4, "N=4, M=1: theta = 60 degrees, one iteration, success probability 1")
def test_grover_exact_case():
    assert math.degrees(grover_angle(1, 4)) == pytest.approx(60.0, abs=1e-12)
    assert optimal_iterations(1, 4) == 1
    for x in range(4):
        mask = np.zeros(4, dtype=bool)
        mask[x] = True
        assert abs(success_probability(GroverOperator(mask), 1) - 1.0) < 1e-12


@pytest.mark.criterion(5, "exact error never exceeds the tight or classic bound (l<=12, C<=l-2, 200 phases)")
def test_bound_domination():
    deltas = np.arange(1, 201) / 200.0 * 0.25
    violations = rows = 0
    for l in range(2, 13):
        for C in range(l - 1):
            for delta in deltas:
                r = bounds_row(l, C, float(delta))
                rows += 1
                violations += (r.p_exact > r.p_tight + 1e-12) + (r.p_exact > r.p_classic + 1e-12)
    print(f"{rows} rows, {violations} violations")
    assert violations == 0


@pytest.mark.criterion(6, "error sweep for the worst-case phase: tight < classic early, exact <= tight, exact < 1e-3 within 3 bits")
def test_fig2_reproduction():
    start = time.perf_counter()
    for n_qreg in (8, 10, 12):
        delta = default_fig2_delta(n_qreg)
        report = fig2_sweep(delta, 8, m=resolving_accuracy(delta))
        rows = report.rows
        for r in rows[:2]:
            assert r.tight_valid and r.p_tight < r.p_classic
        for r in rows:
            assert r.p_exact <= r.p_tight
        first = next((r.C for r in rows if r.p_exact < 1e-3), None)
        print(f"N_qreg={n_qreg}: delta={delta:.6g}, exact below 1e-3 from C={first}")
        assert first is not None and first <= 3
        assert rows[-1].p_exact < rows[0].p_exact
    assert time.perf_counter() - start < 10.0


@pytest.mark.criterion(7, "sizing formulas: m=4, eps=1/4 gives l=8; N_qreg=6 gives m=2")
def test_sizing():
    assert t_register_size(4, 0.25) == 8
    assert max_accuracy(6) == 2


@pytest.mark.criterion(8, "10^4 desk-scale trials: false-absent rate within prediction + 3 SE (< 2 min)")
def test_monte_carlo():
    start = time.perf_counter()
    scenario, grid = load_scenario(DESK)
    D = grid.delay_slots(scenario.Ts)
    assert (scenario.K, scenario.PG, grid.Nn, D) == (3, 4, 1, 3)
    assert qregister_size(scenario.K, grid.Nn, D) == 6
    assert len(enumerate_database(scenario, grid, 0, 1)) == 64
    l = t_register_size(max_accuracy(6), 0.25)
    summary = run_trials(Detector(scenario, grid, 0, l), 10_000, seed=0)
    elapsed = time.perf_counter() - start
    print(
        f"l={l}: rate {summary.false_absent_rate:.5f} vs predicted {summary.predicted_false_absent:.5f}"
        f" + 3 x {summary.standard_error:.5f}, {elapsed:.1f} s"
    )
    assert summary.within_prediction
    assert elapsed < 120.0


CLI_RUNS = [
    ["detect", "--scenario", str(DESK), "--bits", "1,-1,1", "--noise", "-1", "--delay", "1", "--seed", "11"],
    ["trials", "--scenario", str(DESK), "--trials", "300", "--seed", "5"],
    ["fig2", "--scenario", str(DESK)],
    ["fig2", "--nqreg", "10", "--l", "12", "--cmax", "6"],
    ["sweep", "--delta", "0.013", "--l", "10"],
]


@pytest.mark.criterion(9, "every CLI subcommand is byte-identical across repeated runs")
@pytest.mark.parametrize("argv", CLI_RUNS, ids=lambda a: a[0])
def test_cli_determinism(argv, tmp_path):
    def run(*extra):
        proc = subprocess.run([sys.executable, "-m", "qmud", *argv, *extra], capture_output=True, check=False)
        assert proc.returncode in (0, 2), proc.stderr.decode()
        return proc.returncode, proc.stdout

    printed = [run(), run()]
    written = []
    for i in range(2):
        target = tmp_path / f"out{i}"
        code, _ = run("--out", str(target))
        written.append((code, target.read_bytes()))
    assert printed[0][1]
    assert printed[0] == printed[1] == written[0] == written[1]
