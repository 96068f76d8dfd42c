"""End-to-end quantum-counting detection of one user's symbol.

For each hypothesis ``b`` in (+1, -1) the received signal is searched in the
database built for ``b``: the Grover operator marks matching entries, the
counting circuit is simulated exactly and one t-register outcome is sampled.
A bit is detected when exactly one hypothesis reports "present"; both or
neither present is undecidable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bounds import p_error_exact
from .cdma import (
    CdmaScenario,
    Database,
    QuantGrid,
    QuantizedSignal,
    enumerate_database,
    qregister_size,
    synthesize_received,
)
from .counting import CountingOutcome, Presence, decide_presence, simulate_counting_circuit
from .errors import DomainError
from .grover import GroverOperator, grover_angle

HYPOTHESES = (1, -1)


@dataclass(frozen=True)
class HypothesisResult:
    bit: int
    M: int
    measured: int
    decision: Presence

    @property
    def truly_present(self) -> bool:
        return self.M > 0

    @property
    def false_absent(self) -> bool:
        return self.M > 0 and self.decision is Presence.ABSENT


@dataclass(frozen=True)
class Detection:
    results: tuple[HypothesisResult, HypothesisResult]
    detected: int | None

    @property
    def undecidable(self) -> bool:
        return self.detected is None


class Detector:
    """Detector for user ``user`` with a t-register of ``l`` qubits.

    Databases are built once.  The counting distribution for a uniform start
    state depends on the marked set only through ``M``, so it is simulated
    once per distinct ``M`` and reused.
    """

    def __init__(self, scenario: CdmaScenario, grid: QuantGrid, user: int, l: int, window_bits: int = 0):
        if not 0 <= window_bits < l:
            raise DomainError(f"window of {window_bits} bits does not fit l={l}")
        self.scenario = scenario
        self.grid = grid
        self.user = user
        self.l = l
        self.window_bits = window_bits
        self.databases: dict[int, Database] = {b: enumerate_database(scenario, grid, user, b) for b in HYPOTHESES}
        self._outcomes: dict[int, CountingOutcome] = {}

    @property
    def n_qreg(self) -> int:
        return qregister_size(self.scenario.K, self.grid.Nn, self.grid.delay_slots(self.scenario.Ts))

    def outcome(self, marked: np.ndarray) -> CountingOutcome:
        M = int(marked.sum())
        if M not in self._outcomes:
            self._outcomes[M] = simulate_counting_circuit(GroverOperator(marked), self.l)
        return self._outcomes[M]

    def check_hypothesis(self, b: int, received: QuantizedSignal, rng: np.random.Generator) -> HypothesisResult:
        marked = self.databases[b].marked(received)
        i = self.outcome(marked).sample(rng)
        return HypothesisResult(b, int(marked.sum()), i, decide_presence(i, self.l, self.window_bits))

    def detect(self, received: QuantizedSignal, rng: np.random.Generator) -> Detection:
        results = tuple(self.check_hypothesis(b, received, rng) for b in HYPOTHESES)
        present = [r.bit for r in results if r.decision is Presence.PRESENT]
        return Detection(results, present[0] if len(present) == 1 else None)

    def predicted_false_absent(self, M: int) -> float:
        """Exact error probability for ``M`` matches in the single-phase model."""
        N = len(self.databases[1])
        delta = grover_angle(M, N) / (2.0 * math.pi)
        return p_error_exact(self.l, self.window_bits, delta)


@dataclass(frozen=True)
class TrialSummary:
    trials: int
    checks: int
    false_absent: int
    wrong_decisions: int
    undecidable: int
    predicted_false_absent: float
    variance_sum: float

    @property
    def false_absent_rate(self) -> float:
        return self.false_absent / self.checks if self.checks else 0.0

    @property
    def standard_error(self) -> float:
        """Binomial standard error of the false-absent rate under the per-check predictions."""
        return math.sqrt(self.variance_sum) / self.checks if self.checks else 0.0

    @property
    def within_prediction(self) -> bool:
        """Empirical false-absent rate at most the prediction plus three standard errors."""
        return self.false_absent_rate <= self.predicted_false_absent + 3.0 * self.standard_error


def trial_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng([seed, index])


def draw_config(scenario: CdmaScenario, grid: QuantGrid, rng: np.random.Generator):
    """Uniform random user bits, noise index and delay index."""
    bits = rng.choice((-1, 1), size=scenario.K)
    noise = int(rng.integers(-grid.Nn, grid.Nn + 1))
    delay = int(rng.integers(0, grid.delay_slots(scenario.Ts) + 1))
    return bits, noise, delay


def run_trials(detector: Detector, trials: int, seed: int = 0) -> TrialSummary:
    if trials < 1:
        raise DomainError("need at least one trial")
    checks = false_absent = wrong = undecidable = 0
    predicted = variance = 0.0
    for t in range(trials):
        rng = trial_rng(seed, t)
        bits, noise, delay = draw_config(detector.scenario, detector.grid, rng)
        received = synthesize_received(detector.scenario, detector.grid, bits, noise, delay)
        det = detector.detect(received, rng)
        for r in det.results:
            if r.truly_present:
                checks += 1
                false_absent += r.false_absent
                p = detector.predicted_false_absent(r.M)
                predicted += p
                variance += p * (1.0 - p)
        if det.undecidable:
            undecidable += 1
        elif det.detected != bits[detector.user]:
            wrong += 1
    return TrialSummary(
        trials=trials,
        checks=checks,
        false_absent=false_absent,
        wrong_decisions=wrong,
        undecidable=undecidable,
        predicted_false_absent=predicted / checks if checks else 0.0,
        variance_sum=variance,
    )
