"""Quantum-counting multiuser detection for uplink DS-CDMA."""

from .bounds import (
    BoundsReport,
    fig2_sweep,
    min_C_for_target,
    p_error_classic,
    p_error_exact,
    p_error_tight,
)
from .cdma import (
    CdmaScenario,
    QuantGrid,
    QuantizedSignal,
    SignalConfig,
    enumerate_database,
    match_count,
    qregister_size,
    synthesize_received,
)
from .counting import (
    CountingSpec,
    Presence,
    decide_presence,
    max_accuracy,
    outcome_amplitude,
    outcome_distribution,
    simulate_counting_circuit,
    t_register_size,
)
from .detector import Detector, run_trials
from .grover import GroverOperator, GroverSpec, build_grover_operator, grover_angle, optimal_iterations
from .scenario import load_scenario

__version__ = "0.1.0"
