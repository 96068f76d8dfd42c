"""Discrete uplink DS-CDMA signal model and detection databases.

Time is sampled once per chip (chip duration normalised to 1).  A user's
signature is its code row under a rectangular chip waveform, repeated
cyclically with period ``PG`` so a delayed symbol wraps around the symbol
boundary.  A delay ``tau`` is realised by sample-and-hold at chip starts:
chip ``t`` of the delayed signature is ``code[floor(t - tau) mod PG]``.

All users share one delay and one scalar noise level per symbol, which is
what the register-size formula counts.  Received samples are stored as
integer quantisation levels ``round(value / nR)`` with halves rounded away
from zero.

Database index layout, most significant bits first::

    [ interferer bits (K-1) | noise/delay slot (Q bits) ]

Interferers are the users other than the detected one in ascending order;
a bit of 1 means the symbol +1.  The slot is the mixed-radix value
``(noise_index + Nn) * (D + 1) + delay_index`` with ``D = Ts / tauR`` and
``Q = ceil(ld((2 Nn + 1) (D + 1)))``.  Slot values past the last valid
configuration are padding and never match a received signal.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DomainError, ResourceError, ShapeError
from .qsim import MAX_QUBITS

_SNAP = 1e-9


@dataclass(frozen=True)
class CdmaScenario:
    """Users, spreading codes, energies and path gains of one cell."""

    codes: np.ndarray
    energies: np.ndarray
    gains: np.ndarray
    Ts: float

    def __post_init__(self):
        codes = np.array(self.codes, dtype=np.int64)
        if codes.ndim != 2 or codes.shape[0] < 1 or codes.shape[1] < 1:
            raise ShapeError(f"codes must be a non-empty K x PG matrix, got shape {codes.shape}")
        if not np.all(np.abs(codes) == 1):
            raise DomainError("code chips must all be +1 or -1")
        K = codes.shape[0]
        energies = np.array(self.energies, dtype=float).reshape(-1)
        gains = np.array(self.gains, dtype=float).reshape(-1)
        for name, arr in (("energies", energies), ("gains", gains)):
            if arr.size != K:
                raise ShapeError(f"{name} has {arr.size} entries for {K} users")
            if not np.all(arr > 0):
                raise DomainError(f"{name} must be positive")
        if abs(float(self.Ts) - codes.shape[1]) > _SNAP:
            raise DomainError(f"Ts={self.Ts} must equal PG={codes.shape[1]} chip durations")
        for arr in (codes, energies, gains):
            arr.flags.writeable = False
        object.__setattr__(self, "codes", codes)
        object.__setattr__(self, "energies", energies)
        object.__setattr__(self, "gains", gains)
        object.__setattr__(self, "Ts", float(self.Ts))

    @property
    def K(self) -> int:
        return self.codes.shape[0]

    @property
    def PG(self) -> int:
        return self.codes.shape[1]

    @property
    def amplitudes(self) -> np.ndarray:
        """Per-user received amplitude ``sqrt(E_k) * a_k``."""
        return np.sqrt(self.energies) * self.gains

    def interferers(self, k: int) -> list[int]:
        self._check_user(k)
        return [u for u in range(self.K) if u != k]

    def _check_user(self, k: int) -> None:
        if not 0 <= k < self.K:
            raise DomainError(f"user index {k} outside 0..{self.K - 1}")


@dataclass(frozen=True)
class QuantGrid:
    """Linear quantisation of noise (``i * nR``) and delay (``j * tauR``)."""

    Nn: int
    nR: float
    tauR: float

    def __post_init__(self):
        if int(self.Nn) != self.Nn or self.Nn < 0:
            raise DomainError(f"Nn={self.Nn} must be a non-negative integer")
        if not self.nR > 0 or not self.tauR > 0:
            raise DomainError("nR and tauR must be positive")
        object.__setattr__(self, "Nn", int(self.Nn))

    def delay_slots(self, Ts: float) -> int:
        """``D = Ts / tauR``; delay indices run over ``0..D``."""
        ratio = Ts / self.tauR
        D = int(round(ratio))
        if D < 1 or abs(ratio - D) > _SNAP * max(1.0, ratio):
            raise DomainError(f"Ts/tauR = {ratio} is not a positive integer")
        return D

    @property
    def noise_levels(self) -> int:
        return 2 * self.Nn + 1


@dataclass(frozen=True)
class SignalConfig:
    """One database entry: interferer symbols, noise index and delay index."""

    interferer_bits: tuple[int, ...]
    noise_index: int
    delay_index: int


@dataclass(frozen=True)
class QuantizedSignal:
    """Quantisation levels of the PG chip samples of one symbol period."""

    chips: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "chips", tuple(int(c) for c in self.chips))

    def __len__(self):
        return len(self.chips)


def qregister_size(K: int, Nn: int, Ts_over_tauR: int) -> int:
    """``(K-1) + ceil(ld(2 Nn + 1) + ld(Ts/tauR + 1))`` in exact integer arithmetic."""
    if K < 1:
        raise DomainError("need at least one user")
    return (K - 1) + _slot_bits(Nn, Ts_over_tauR)


def _slot_bits(Nn: int, D: int) -> int:
    slots = (2 * Nn + 1) * (D + 1)
    return (slots - 1).bit_length()


def _round_half_away(x: np.ndarray) -> np.ndarray:
    x = np.round(x, 9)
    return (np.sign(x) * np.floor(np.abs(x) + 0.5)).astype(np.int64)


def _shifted_codes(scenario: CdmaScenario, D: int) -> np.ndarray:
    """Signatures at every delay index, shape (D + 1, K, PG)."""
    PG = scenario.PG
    t = np.arange(PG)
    tau = np.arange(D + 1)[:, None] * (scenario.Ts / D)
    pos = np.floor(t[None, :] - tau + _SNAP).astype(np.int64) % PG
    return scenario.codes[:, pos].transpose(1, 0, 2)


def _synthesize(scenario, grid, bits, noise_index, delay_index) -> np.ndarray:
    """Vectorised received-signal levels; bits (n, K), indices (n,)."""
    D = grid.delay_slots(scenario.Ts)
    signatures = _shifted_codes(scenario, D)[delay_index]
    weights = np.asarray(bits, dtype=float) * scenario.amplitudes
    values = np.einsum("nk,nkt->nt", weights, signatures)
    values = values + (np.asarray(noise_index, dtype=float) * grid.nR)[:, None]
    return _round_half_away(values / grid.nR)


def synthesize_received(
    scenario: CdmaScenario,
    grid: QuantGrid,
    bits: Sequence[int],
    noise_index: int,
    delay_index: int,
) -> QuantizedSignal:
    """Quantised received symbol for given user bits, noise index and delay index."""
    bits = np.asarray(bits, dtype=np.int64).reshape(-1)
    if bits.size != scenario.K or not np.all(np.abs(bits) == 1):
        raise DomainError(f"bits must be {scenario.K} values of +1/-1")
    D = grid.delay_slots(scenario.Ts)
    if not -grid.Nn <= noise_index <= grid.Nn:
        raise DomainError(f"noise index {noise_index} outside [-{grid.Nn}, {grid.Nn}]")
    if not 0 <= delay_index <= D:
        raise DomainError(f"delay index {delay_index} outside [0, {D}]")
    levels = _synthesize(scenario, grid, bits[None, :], [noise_index], [delay_index])
    return QuantizedSignal(levels[0])


def pack_config(config: SignalConfig, scenario: CdmaScenario, grid: QuantGrid) -> int:
    K1 = scenario.K - 1
    D = grid.delay_slots(scenario.Ts)
    bits = tuple(config.interferer_bits)
    if len(bits) != K1 or any(b not in (0, 1) for b in bits):
        raise DomainError(f"interferer pattern must be {K1} bits of 0/1")
    if not -grid.Nn <= config.noise_index <= grid.Nn:
        raise DomainError(f"noise index {config.noise_index} out of range")
    if not 0 <= config.delay_index <= D:
        raise DomainError(f"delay index {config.delay_index} out of range")
    head = 0
    for b in bits:
        head = (head << 1) | b
    slot = (config.noise_index + grid.Nn) * (D + 1) + config.delay_index
    return (head << _slot_bits(grid.Nn, D)) | slot


def unpack_config(x: int, scenario: CdmaScenario, grid: QuantGrid) -> SignalConfig | None:
    """Inverse of :func:`pack_config`; ``None`` for padding indices."""
    K1 = scenario.K - 1
    D = grid.delay_slots(scenario.Ts)
    Q = _slot_bits(grid.Nn, D)
    if not 0 <= x < 1 << (K1 + Q):
        raise DomainError(f"index {x} outside the register")
    slot = x & ((1 << Q) - 1)
    if slot >= grid.noise_levels * (D + 1):
        return None
    head = x >> Q
    bits = tuple((head >> (K1 - 1 - j)) & 1 for j in range(K1))
    return SignalConfig(bits, slot // (D + 1) - grid.Nn, slot % (D + 1))


@dataclass(frozen=True)
class Database:
    """All received-signal configurations for user ``user`` sending ``bit``.

    ``signals[x]`` holds the levels stored at basis index ``x``; rows with
    ``valid[x] == False`` are padding.
    """

    scenario: CdmaScenario
    grid: QuantGrid
    user: int
    bit: int
    signals: np.ndarray = field(repr=False)
    valid: np.ndarray = field(repr=False)

    @property
    def n_qubits(self) -> int:
        return self.signals.shape[0].bit_length() - 1

    def __len__(self) -> int:
        return self.signals.shape[0]

    def __getitem__(self, x: int) -> QuantizedSignal | None:
        if not self.valid[x]:
            return None
        return QuantizedSignal(self.signals[x])

    def items(self):
        for x in range(len(self)):
            if self.valid[x]:
                yield x, QuantizedSignal(self.signals[x])

    def marked(self, received: QuantizedSignal) -> np.ndarray:
        """Boolean mask of indices whose stored signal equals ``received``."""
        target = np.asarray(received.chips, dtype=np.int64)
        if target.size != self.signals.shape[1]:
            raise ShapeError(f"received signal has {target.size} chips, expected {self.signals.shape[1]}")
        return self.valid & np.all(self.signals == target, axis=1)


def enumerate_database(scenario: CdmaScenario, grid: QuantGrid, k: int, b: int) -> Database:
    """Build the detection database for user ``k`` under hypothesis ``b``."""
    scenario._check_user(k)
    if b not in (1, -1):
        raise DomainError(f"hypothesis bit must be +1 or -1, got {b}")
    K1 = scenario.K - 1
    D = grid.delay_slots(scenario.Ts)
    Q = _slot_bits(grid.Nn, D)
    n_qubits = K1 + Q
    if n_qubits > MAX_QUBITS:
        raise ResourceError(f"database register of {n_qubits} qubits exceeds {MAX_QUBITS}")

    x = np.arange(1 << n_qubits)
    slot = x & ((1 << Q) - 1)
    valid = slot < grid.noise_levels * (D + 1)
    head = x >> Q
    bits = np.empty((x.size, scenario.K), dtype=np.int64)
    bits[:, k] = b
    for j, u in enumerate(scenario.interferers(k)):
        bits[:, u] = 2 * ((head >> (K1 - 1 - j)) & 1) - 1
    noise = np.where(valid, slot // (D + 1) - grid.Nn, 0)
    delay = np.where(valid, slot % (D + 1), 0)
    signals = _synthesize(scenario, grid, bits, noise, delay)
    signals[~valid] = 0
    signals.flags.writeable = False
    valid.flags.writeable = False
    return Database(scenario, grid, k, b, signals, valid)


def match_count(database: Database, received: QuantizedSignal) -> int:
    """Classical exhaustive count of entries equal to ``received``."""
    return int(database.marked(received).sum())
