"""Grover operator over a database predicate and its angle arithmetic."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cdma import Database, QuantizedSignal
from .errors import DomainError, ResourceError, ShapeError
from .qsim import DENSE_MAX_DIM, QState, UnitaryOp, apply_unitary, uniform_state


def grover_angle(M: int, N: int, mode: str = "exact") -> float:
    """Rotation angle per Grover step: ``2 asin(sqrt(M/N))`` or its small-angle form ``2 sqrt(M/N)``."""
    if N < 1 or M < 0:
        raise DomainError(f"need N >= 1 and M >= 0, got M={M}, N={N}")
    if M > N:
        raise DomainError(f"match count M={M} exceeds database size N={N}")
    if mode == "exact":
        return 2.0 * math.asin(math.sqrt(M / N))
    if mode == "approx":
        return 2.0 * math.sqrt(M / N)
    raise ValueError(f"unknown mode {mode!r}")


def optimal_iterations(M: int, N: int) -> int:
    """Nearest integer to ``acos(sqrt(M/N)) / theta``, halves rounded down."""
    if M < 1:
        raise DomainError("optimal iteration count is undefined without marked entries")
    theta = grover_angle(M, N)
    ratio = math.acos(math.sqrt(M / N)) / theta
    return max(0, math.ceil(ratio - 0.5 - 1e-12))


def rotation_state(d: int, theta: float) -> tuple[float, float]:
    """Amplitudes on the unmarked and marked directions after ``d`` Grover steps."""
    if not 0.0 <= theta <= math.pi:
        raise DomainError(f"theta={theta} outside [0, pi]")
    half = (2 * d + 1) * theta / 2.0
    return math.cos(half), math.sin(half)


@dataclass(frozen=True)
class GroverSpec:
    N: int
    M: int
    theta: float
    theta_approx: float
    delta: float
    d_opt: int | None

    @classmethod
    def from_counts(cls, M: int, N: int) -> "GroverSpec":
        if N < 1 or N & (N - 1):
            raise DomainError(f"database size {N} is not a power of two")
        theta = grover_angle(M, N, "exact")
        return cls(
            N=N,
            M=M,
            theta=theta,
            theta_approx=grover_angle(M, N, "approx"),
            delta=theta / (2.0 * math.pi),
            d_opt=optimal_iterations(M, N) if M > 0 else None,
        )


class GroverOperator(UnitaryOp):
    """``G = D O``: oracle sign flip on marked entries, then inversion about the mean.

    Powers are evaluated in closed form.  On the plane spanned by the uniform
    superposition over unmarked entries (alpha) and over marked entries (beta)
    ``G`` is a rotation by ``theta``.  The rest of the space splits into
    zero-sum vectors supported on unmarked entries, where ``G = -1``, and
    zero-sum vectors supported on marked entries, where ``G = +1``.
    """

    def __init__(self, marked):
        marked = np.array(marked, dtype=bool).reshape(-1)
        N = marked.size
        if N < 2 or N & (N - 1):
            raise ShapeError(f"database size {N} is not a power of two >= 2")
        marked.flags.writeable = False
        self.marked = marked
        self.dim = N
        self.spec = GroverSpec.from_counts(int(marked.sum()), N)

    @property
    def M(self) -> int:
        return self.spec.M

    @property
    def theta(self) -> float:
        return self.spec.theta

    def apply(self, vectors: np.ndarray, power: int = 1) -> np.ndarray:
        if power < 0:
            raise ShapeError("negative powers are not supported")
        v = np.asarray(vectors, dtype=np.complex128)
        N, M = self.dim, self.M
        mk = self.marked
        a = v[..., ~mk].sum(axis=-1) / math.sqrt(N - M) if M < N else np.zeros(v.shape[:-1])
        b = v[..., mk].sum(axis=-1) / math.sqrt(M) if M > 0 else np.zeros(v.shape[:-1])

        c, s = math.cos(power * self.theta), math.sin(power * self.theta)
        a_new = c * a - s * b
        b_new = s * a + c * b

        out = np.empty_like(v)
        if M < N:
            alpha = 1.0 / math.sqrt(N - M)
            rest_u = v[..., ~mk] - (a * alpha)[..., None]
            sign = -1.0 if power % 2 else 1.0
            out[..., ~mk] = sign * rest_u + (a_new * alpha)[..., None]
        if M > 0:
            beta = 1.0 / math.sqrt(M)
            rest_m = v[..., mk] - (b * beta)[..., None]
            out[..., mk] = rest_m + (b_new * beta)[..., None]
        return out


def dense_grover_matrix(marked) -> np.ndarray:
    """Explicit ``(2/N J - I) diag(+-1)`` for small databases."""
    marked = np.asarray(marked, dtype=bool).reshape(-1)
    N = marked.size
    if N > DENSE_MAX_DIM:
        raise ResourceError(f"dense Grover matrix of dim {N} exceeds {DENSE_MAX_DIM}")
    diffusion = np.full((N, N), 2.0 / N) - np.eye(N)
    oracle = np.diag(np.where(marked, -1.0, 1.0))
    return (diffusion @ oracle).astype(np.complex128)


def build_grover_operator(db: Database, received: QuantizedSignal) -> GroverOperator:
    if len(db) == 0:
        raise DomainError("empty database")
    return GroverOperator(db.marked(received))


def grover_search(op: GroverOperator, d: int) -> QState:
    """State after ``d`` Grover steps from the uniform superposition."""
    n = op.dim.bit_length() - 1
    return apply_unitary(uniform_state(n), op, range(n), power=d)


def success_probability(op: GroverOperator, d: int) -> float:
    state = grover_search(op, d)
    return float(state.probabilities()[op.marked].sum())
