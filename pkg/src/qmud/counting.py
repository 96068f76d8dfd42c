"""Quantum counting: t-register sizing, outcome amplitudes and the counting circuit.

The t-register holds ``l`` qubits.  Qubit ``j`` of the t-register (qubit 0
most significant) controls ``G**(2**(l-1-j))`` so that an eigenvector with
eigenvalue ``exp(2j pi delta)`` leaves the register in
``2**(-l/2) sum_k exp(2j pi k delta) |k>``; the inverse QFT then peaks at
``i = delta * 2**l``.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ResourceError
from .grover import GroverOperator
from .qsim import (
    MAX_QUBITS,
    QState,
    UnitaryOp,
    apply_controlled_power,
    inverse_qft,
    measure_distribution,
    product_state,
    sample_index,
    uniform_state,
)

MAX_T_QUBITS = 14
MAX_DB_QUBITS = 10
DYADIC_TOL = 1e-12


def pad_bits(epsilon: float, rule: str = "conservative") -> int:
    """Extra t-register bits for failure budget ``epsilon``.

    ``rule="conservative"`` keeps the additional ``ld(pi)`` term,
    ``rule="standard"`` is the textbook ``ceil(ld(2 + 1/(2 eps)))``.
    """
    if not 0.0 < epsilon < 1.0:
        raise DomainError(f"epsilon={epsilon} outside (0, 1)")
    base = math.log2(2.0 + 1.0 / (2.0 * epsilon))
    if rule == "conservative":
        return math.ceil(base + math.log2(math.pi))
    if rule == "standard":
        return math.ceil(base)
    raise ValueError(f"unknown sizing rule {rule!r}")


def t_register_size(m: int, epsilon: float, rule: str = "conservative") -> int:
    return m + pad_bits(epsilon, rule)


def max_accuracy(n_qreg: int) -> int:
    """``ceil(N_qreg/2 - 1)``: accuracy bits suited to the smallest angle (M = 1)."""
    if n_qreg < 1:
        raise DomainError("register size must be positive")
    m = (n_qreg - 1) // 2
    if m < 1:
        warnings.warn(f"N_qreg={n_qreg} gives accuracy m={m}, which is unusable", stacklevel=2)
    return m


def worst_case_theta(n_qreg: int) -> float:
    """Small-angle rotation for a single match, ``2**(1 - N_qreg/2)``."""
    return 2.0 ** (1.0 - n_qreg / 2.0)


def worst_case_delta(n_qreg: int) -> float:
    return worst_case_theta(n_qreg) / (2.0 * math.pi)


@dataclass(frozen=True)
class CountingSpec:
    m: int
    epsilon: float | None
    pad_bits: int
    l: int

    def __post_init__(self):
        if self.m < 1 or self.pad_bits < 0 or self.l != self.m + self.pad_bits:
            raise DomainError(f"inconsistent counting sizes m={self.m}, pad={self.pad_bits}, l={self.l}")

    @classmethod
    def classic(cls, m: int, epsilon: float, rule: str = "conservative") -> "CountingSpec":
        p = pad_bits(epsilon, rule)
        return cls(m, epsilon, p, m + p)

    @classmethod
    def tight(cls, m: int, C: int) -> "CountingSpec":
        return cls(m, None, C, m + C)


def _check_l(l: int) -> None:
    if l < 1:
        raise DomainError(f"t-register size l={l} must be positive")


def outcome_amplitude(i, l: int, delta: float):
    """Amplitude of outcome ``i`` after the inverse QFT for eigenphase fraction ``delta``.

    Evaluates the geometric series
    ``2**-l * (exp(2j pi delta 2**l) - 1) / (exp(2j pi (delta - i/2**l)) - 1)``
    in half-angle form, ``sin(pi x) / sin(pi u / 2**l)`` with ``x = delta 2**l``
    and ``u = x - i``, both reduced to their offsets from the nearest
    integer (resp. multiple of ``2**l``), which avoids cancellation near the
    singularity.  At
    dyadic phases the limit (1 at ``i = x``, 0 elsewhere) is returned exactly.
    """
    _check_l(l)
    scalar = np.ndim(i) == 0
    i = np.asarray(i, dtype=np.int64)
    size = 1 << l
    if np.any((i < 0) | (i >= size)):
        raise DomainError(f"outcome index outside 0..{size - 1}")
    delta = float(delta) % 1.0
    x = math.ldexp(delta, l)
    nearest = round(x)
    r = x - nearest
    if abs(r) < DYADIC_TOL:
        amp = np.where(i == nearest % size, 1.0 + 0j, 0j)
    else:
        # x and its offsets are exact in binary, so r and u carry full precision;
        # the integer parts of x and u cancel between sine and phase
        u = x - i.astype(float)
        u = u - size * np.round(u / size)
        ratio = math.sin(math.pi * r) / np.sin(np.pi * u / size) / size
        amp = ratio * np.exp(1j * (math.pi * r - np.pi * u / size))
    return complex(amp) if scalar else amp


def outcome_distribution(l: int, delta: float) -> np.ndarray:
    amp = outcome_amplitude(np.arange(1 << l), l, delta)
    return np.abs(amp) ** 2


def grover_outcome_distribution(l: int, theta: float) -> np.ndarray:
    """Outcome distribution for the uniform start state of a Grover operator.

    The uniform state has weight 1/2 on each of the eigenvectors with phases
    ``+theta`` and ``-theta`` (for ``0 < M < N``); at ``theta`` equal to 0 or
    pi both components coincide.
    """
    delta = theta / (2.0 * math.pi)
    return 0.5 * (outcome_distribution(l, delta) + outcome_distribution(l, 1.0 - delta))


@dataclass(frozen=True)
class CountingOutcome:
    distribution: np.ndarray
    l: int

    @property
    def index(self) -> int:
        return int(np.argmax(self.distribution))

    @property
    def delta_hat(self) -> float:
        return self.index / (1 << self.l)

    @property
    def theta_hat(self) -> float:
        return 2.0 * math.pi * self.delta_hat

    def sample(self, rng: np.random.Generator) -> int:
        return sample_index(self.distribution, rng)


def simulate_counting_circuit(u: UnitaryOp, l: int, initial: QState | None = None) -> CountingOutcome:
    """Hadamards on the t-register, controlled powers of ``u``, inverse QFT, exact readout."""
    _check_l(l)
    n_db = u.dim.bit_length() - 1
    if l > MAX_T_QUBITS or n_db > MAX_DB_QUBITS or l + n_db > MAX_QUBITS:
        raise ResourceError(
            f"counting circuit with l={l}, {n_db} database qubits exceeds the simulation guard"
        )
    if initial is None:
        initial = uniform_state(n_db)
    if initial.dim != u.dim:
        raise DomainError(f"initial state dim {initial.dim} does not match operator dim {u.dim}")

    state = product_state(uniform_state(l), initial)
    targets = range(l, l + n_db)
    for j in range(l):
        state = apply_controlled_power(state, u, j, targets, 1 << (l - 1 - j))
    state = inverse_qft(state, range(l))
    dist = measure_distribution(state, range(l))
    return CountingOutcome(dist, l)


def count_grover(op: GroverOperator, l: int) -> CountingOutcome:
    return simulate_counting_circuit(op, l)


class Presence(str, enum.Enum):
    PRESENT = "present"
    ABSENT = "absent"


def decide_presence(i: int, l: int, window_bits: int = 0) -> Presence:
    """Absent iff the estimated phase reads zero.

    With ``window_bits = C`` only the leading ``l - C`` bits are read, so
    every ``i < 2**C`` reads as zero; the default reads all bits.
    """
    if not 0 <= i < 1 << l:
        raise DomainError(f"outcome {i} outside 0..{(1 << l) - 1}")
    if not 0 <= window_bits < l:
        raise DomainError(f"window of {window_bits} bits does not fit l={l}")
    return Presence.ABSENT if i >> window_bits == 0 else Presence.PRESENT
