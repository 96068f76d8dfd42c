"""Minimal exact state-vector simulator.

Qubit 0 is the most significant bit of the basis-state index everywhere in
this package: for an n-qubit register the basis label ``x`` has qubit ``q``
equal to ``(x >> (n - 1 - q)) & 1``.  A sub-register given as a range of
qubits is read the same way, its first qubit being the most significant.

States are immutable; every operation returns a new :class:`QState`.
"""

from __future__ import annotations

import abc
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import ResourceError, ShapeError

MAX_QUBITS = 24
NORM_TOL = 1e-10
UNITARY_TOL = 1e-10
DENSE_MAX_DIM = 64


@dataclass(frozen=True)
class QState:
    """Unit-norm complex amplitude vector over ``2**n_qubits`` basis states."""

    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if not 1 <= self.n_qubits <= MAX_QUBITS:
            raise ResourceError(
                f"register of {self.n_qubits} qubits outside 1..{MAX_QUBITS}"
            )
        amps = np.array(self.amplitudes, dtype=np.complex128).reshape(-1)
        if amps.size != 1 << self.n_qubits:
            raise ShapeError(
                f"{amps.size} amplitudes for {self.n_qubits} qubits"
            )
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1.0) > NORM_TOL:
            raise ShapeError(f"state norm {norm!r} differs from 1")
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_vector(cls, vector, normalize: bool = False) -> "QState":
        vec = np.asarray(vector, dtype=np.complex128).reshape(-1)
        n = vec.size.bit_length() - 1
        if vec.size != 1 << n:
            raise ShapeError(f"length {vec.size} is not a power of two")
        if normalize:
            vec = vec / np.linalg.norm(vec)
        return cls(n, vec)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def tensor(self) -> np.ndarray:
        """Writable copy shaped ``(2,) * n_qubits``."""
        return self.amplitudes.reshape((2,) * self.n_qubits).copy()


def _from_tensor(psi: np.ndarray, n_qubits: int) -> QState:
    return QState(n_qubits, psi.reshape(-1))


def basis_state(n_qubits: int, index: int = 0) -> QState:
    if not 0 <= index < (1 << n_qubits):
        raise ShapeError(f"basis index {index} outside {n_qubits}-qubit register")
    amps = np.zeros(1 << n_qubits, dtype=np.complex128)
    amps[index] = 1.0
    return QState(n_qubits, amps)


def uniform_state(n_qubits: int) -> QState:
    """Equal superposition, i.e. a Hadamard on every qubit of ``|0...0>``."""
    if not 1 <= n_qubits <= MAX_QUBITS:
        raise ResourceError(f"register of {n_qubits} qubits outside 1..{MAX_QUBITS}")
    dim = 1 << n_qubits
    return QState(n_qubits, np.full(dim, dim ** -0.5, dtype=np.complex128))


def product_state(*states: QState) -> QState:
    """Kronecker product; the first factor occupies the leading qubits."""
    amps = np.ones(1, dtype=np.complex128)
    n = 0
    for s in states:
        n += s.n_qubits
        if n > MAX_QUBITS:
            raise ResourceError(f"product register of {n} qubits exceeds {MAX_QUBITS}")
        amps = np.kron(amps, s.amplitudes)
    return QState(n, amps)


def _register(qubits: Iterable[int], n_qubits: int, contiguous: bool = True) -> list[int]:
    reg = [int(q) for q in qubits]
    if not reg:
        raise ShapeError("empty sub-register")
    if len(set(reg)) != len(reg):
        raise ShapeError(f"repeated qubits in {reg}")
    if min(reg) < 0 or max(reg) >= n_qubits:
        raise ShapeError(f"qubits {reg} outside {n_qubits}-qubit register")
    if contiguous and reg != list(range(reg[0], reg[0] + len(reg))):
        raise ShapeError(f"qubits {reg} are not an ascending contiguous range")
    return reg


class UnitaryOp(abc.ABC):
    """Unitary acting on a register of dimension ``dim``.

    Subclasses implement :meth:`apply` on a batch of row vectors, which lets
    structured operators compute large powers without forming a matrix.
    """

    dim: int

    @abc.abstractmethod
    def apply(self, vectors: np.ndarray, power: int = 1) -> np.ndarray:
        """Return ``vectors @ (U**power).T``; ``vectors`` has shape (..., dim)."""

    def matrix(self) -> np.ndarray:
        if self.dim > DENSE_MAX_DIM:
            raise ResourceError(f"dense matrix of dim {self.dim} exceeds {DENSE_MAX_DIM}")
        return self.apply(np.eye(self.dim, dtype=np.complex128)).T


class DenseUnitary(UnitaryOp):
    """Unitary given as an explicit matrix. Intended as a test oracle."""

    def __init__(self, matrix):
        mat = np.array(matrix, dtype=np.complex128)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ShapeError(f"matrix of shape {mat.shape} is not square")
        dim = mat.shape[0]
        if dim & (dim - 1):
            raise ShapeError(f"dimension {dim} is not a power of two")
        if dim > DENSE_MAX_DIM:
            raise ResourceError(f"dense matrix of dim {dim} exceeds {DENSE_MAX_DIM}")
        err = np.max(np.abs(mat @ mat.conj().T - np.eye(dim)))
        if err > UNITARY_TOL:
            raise ShapeError(f"matrix is not unitary (max deviation {err:.3g})")
        mat.flags.writeable = False
        self._matrix = mat
        self.dim = dim

    def matrix(self) -> np.ndarray:
        return self._matrix

    def apply(self, vectors: np.ndarray, power: int = 1) -> np.ndarray:
        if power < 0:
            raise ShapeError("negative powers are not supported")
        up = np.linalg.matrix_power(self._matrix, power)
        return vectors @ up.T


def apply_unitary(state: QState, u: UnitaryOp, target_qubits: Sequence[int], power: int = 1) -> QState:
    """Apply ``u**power`` to a contiguous sub-register."""
    targets = _register(target_qubits, state.n_qubits)
    if 1 << len(targets) != u.dim:
        raise ShapeError(f"operator dim {u.dim} does not match {len(targets)} target qubits")
    n = state.n_qubits
    a, t = targets[0], len(targets)
    psi = state.amplitudes.reshape(1 << a, 1 << t, 1 << (n - a - t))
    block = np.moveaxis(psi, 1, -1)
    out = np.moveaxis(u.apply(block, power), -1, 1)
    return QState(n, out.reshape(-1))


def apply_controlled_power(
    state: QState,
    u: UnitaryOp,
    control_qubit: int,
    target_qubits: Sequence[int],
    power: int,
) -> QState:
    """Apply ``u**power`` to the targets on the branch where the control is 1."""
    n = state.n_qubits
    targets = _register(target_qubits, n)
    if not 0 <= control_qubit < n:
        raise ShapeError(f"control qubit {control_qubit} outside register")
    if control_qubit in targets:
        raise ShapeError("control qubit lies inside the target register")
    if 1 << len(targets) != u.dim:
        raise ShapeError(f"operator dim {u.dim} does not match {len(targets)} target qubits")
    if power < 0:
        raise ShapeError("negative powers are not supported")

    psi = state.tensor()
    index = [slice(None)] * n
    index[control_qubit] = 1
    branch = psi[tuple(index)]
    axes = [q - (q > control_qubit) for q in targets]
    moved = np.moveaxis(branch, axes, range(n - 1 - len(axes), n - 1))
    shape = moved.shape
    moved[...] = u.apply(moved.reshape(-1, u.dim), power).reshape(shape)
    return _from_tensor(psi, n)


def apply_gate(state: QState, gate, qubit: int) -> QState:
    """Apply a 2x2 gate to one qubit."""
    gate = np.asarray(gate, dtype=np.complex128)
    if gate.shape != (2, 2):
        raise ShapeError(f"single-qubit gate has shape {gate.shape}")
    n = state.n_qubits
    _register([qubit], n)
    psi = np.tensordot(gate, state.tensor(), axes=([1], [qubit]))
    return _from_tensor(np.moveaxis(psi, 0, qubit), n)


HADAMARD = np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2)


def hadamard(state: QState, qubits: Iterable[int]) -> QState:
    for q in _register(qubits, state.n_qubits, contiguous=False):
        state = apply_gate(state, HADAMARD, q)
    return state


def _fourier(state: QState, qubits: Sequence[int], inverse: bool) -> QState:
    reg = _register(qubits, state.n_qubits)
    n, a, t = state.n_qubits, reg[0], len(reg)
    psi = state.amplitudes.reshape(1 << a, 1 << t, 1 << (n - a - t))
    # numpy's forward FFT carries the exp(-2j*pi*k*i/2**t) kernel of the inverse QFT
    out = np.fft.fft(psi, axis=1, norm="ortho") if inverse else np.fft.ifft(psi, axis=1, norm="ortho")
    return QState(n, out.reshape(-1))


def inverse_qft(state: QState, qubits: Sequence[int]) -> QState:
    """``b_i = 2**(-l/2) * sum_k exp(-2j*pi*k*i/2**l) a_k`` on a contiguous sub-register."""
    return _fourier(state, qubits, inverse=True)


def qft(state: QState, qubits: Sequence[int]) -> QState:
    return _fourier(state, qubits, inverse=False)


def measure_distribution(state: QState, qubits: Sequence[int]) -> np.ndarray:
    """Marginal outcome probabilities of ``qubits``; pattern index uses the given order."""
    n = state.n_qubits
    reg = _register(qubits, n, contiguous=False)
    probs = state.probabilities().reshape((2,) * n)
    others = tuple(q for q in range(n) if q not in reg)
    marginal = probs.sum(axis=others) if others else probs
    remaining = [q for q in range(n) if q in reg]
    marginal = np.transpose(marginal, [remaining.index(q) for q in reg])
    return marginal.reshape(-1)


def sample_index(probabilities: np.ndarray, rng: np.random.Generator) -> int:
    p = np.clip(np.asarray(probabilities, dtype=float), 0.0, None)
    return int(rng.choice(p.size, p=p / p.sum()))


def equal_up_to_phase(a, b, atol: float = 1e-10) -> bool:
    """Compare two amplitude vectors ignoring a global unit-modulus factor."""
    a = np.asarray(getattr(a, "amplitudes", a), dtype=np.complex128)
    b = np.asarray(getattr(b, "amplitudes", b), dtype=np.complex128)
    if a.shape != b.shape:
        return False
    overlap = np.vdot(a, b)
    phase = overlap / abs(overlap) if abs(overlap) > 0 else 1.0
    return bool(np.max(np.abs(a * phase - b)) <= atol)
