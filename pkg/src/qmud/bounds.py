"""Probability that counting reads zero although ``theta != 0``.

For a t-register of ``l`` qubits read through a window of ``C`` low bits
(every outcome ``i < 2**C`` decides "absent") three quantities are offered:

* ``exact``   sum of ``|a_i|**2`` over the window,
* ``tight``   per-term bound from the refined numerator and denominator bounds,
* ``classic`` per-term bound from ``|numerator| <= 2`` and ``|e^{jb} - 1| >= 2|b|/pi``.

Sweeps come in two flavours.  With a fixed register ``l`` the window grows
inside it.  With a base accuracy ``m`` every added bit enlarges the register,
``l = m + C``, while the window keeps covering phases below ``2**-m``; this is
the setting in which extra bits drive the error down.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .counting import outcome_amplitude, worst_case_delta
from .errors import DomainError, ValidityError

SQRT2 = math.sqrt(2.0)
DELTA_MAX_TIGHT = 0.25
METHODS = ("exact", "tight", "classic")


def _check(l: int, C: int, delta: float) -> None:
    if l < 1:
        raise DomainError(f"register size l={l} must be positive")
    if not 0 <= C < l:
        raise DomainError(f"window bits C={C} must satisfy 0 <= C < l={l}")
    if not 0.0 <= delta < 1.0:
        raise DomainError(f"delta={delta} outside [0, 1)")


def _clamp(p: float) -> float:
    return min(1.0, max(0.0, float(p)))


def p_error_exact(l: int, C: int, delta: float) -> float:
    _check(l, C, delta)
    if delta == 0.0:
        return 0.0
    amp = outcome_amplitude(np.arange(1 << C), l, delta)
    return _clamp(np.sum(np.abs(amp) ** 2))


def numerator_bound(l: int, delta: float) -> float:
    """``min(2, max(pi u, pi - pi u))`` with ``u = frac(2**(l+1) delta)``."""
    if not delta > 0.0:
        raise DomainError("numerator bound needs delta > 0")
    x = math.ldexp(delta, l + 1)
    u = x - math.floor(x)
    return min(2.0, max(math.pi * u, math.pi - math.pi * u))


def denominator_bound(l: int, i: int, delta: float) -> float:
    """``4 sqrt(2) (delta - i/2**l)``, a lower bound on ``|exp(j beta) - 1|`` for ``0 < beta <= pi/2``."""
    if not 0.0 < delta <= DELTA_MAX_TIGHT:
        raise ValidityError(f"denominator bound needs 0 < delta <= 1/4, got {delta}")
    gap = delta - math.ldexp(i, -l)
    if not gap > 0.0:
        raise ValidityError(f"delta - i/2**l = {gap} is not positive for i={i}, l={l}")
    return 4.0 * SQRT2 * gap


def tight_valid(l: int, C: int, delta: float) -> bool:
    return (
        0.0 < delta <= DELTA_MAX_TIGHT
        and 0 <= C <= l - 2
        and delta - math.ldexp((1 << C) - 1, -l) > 0.0
    )


def p_error_tight(l: int, C: int, delta: float) -> float:
    _check(l, C, delta)
    if C > l - 2:
        raise ValidityError(f"tight bound needs C <= l - 2, got C={C}, l={l}")
    num = numerator_bound(l, delta)
    den = np.array([denominator_bound(l, i, delta) for i in range(1 << C)])
    scaled = math.ldexp(1.0, l)
    return _clamp(np.sum((num / (scaled * den)) ** 2))


def p_error_classic(l: int, C: int, delta: float) -> float:
    _check(l, C, delta)
    i = np.arange(1 << C)
    beta = 2.0 * math.pi * (delta - i / float(1 << l))
    beta = np.pi - np.mod(np.pi - beta, 2.0 * np.pi)  # into (-pi, pi]
    with np.errstate(divide="ignore"):
        terms = (2.0 / ((1 << l) * 2.0 * np.abs(beta) / np.pi)) ** 2
    terms = np.where(np.abs(beta) < 1e-15, 1.0, terms)
    return _clamp(np.sum(terms))


def p_error(l: int, C: int, delta: float, method: str) -> float:
    if method == "exact":
        return p_error_exact(l, C, delta)
    if method == "tight":
        return p_error_tight(l, C, delta)
    if method == "classic":
        return p_error_classic(l, C, delta)
    raise ValueError(f"unknown method {method!r}")


@dataclass(frozen=True)
class BoundsRow:
    C: int
    l: int
    p_classic: float
    p_tight: float
    p_exact: float
    tight_valid: bool


def bounds_row(l: int, C: int, delta: float) -> BoundsRow:
    """All three values at one point; outside its validity the tight column repeats the classic value."""
    classic = p_error_classic(l, C, delta)
    valid = tight_valid(l, C, delta)
    tight = p_error_tight(l, C, delta) if valid else classic
    return BoundsRow(C, l, classic, tight, p_error_exact(l, C, delta), valid)


CSV_HEADER = ("C", "p_classic", "p_tight", "p_exact", "tight_valid")


def fmt(x: float) -> str:
    return f"{x:.12g}"


@dataclass(frozen=True)
class BoundsReport:
    rows: tuple[BoundsRow, ...]
    delta: float
    m: int | None = None
    l: int | None = None

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for r in self.rows:
            writer.writerow([r.C, fmt(r.p_classic), fmt(r.p_tight), fmt(r.p_exact), str(r.tight_valid).lower()])
        return buf.getvalue()

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.rows])


def _registers(C_max: int, m: int | None, l: int | None) -> list[int]:
    if (m is None) == (l is None):
        raise DomainError("give exactly one of m (growing register) or l (fixed register)")
    if C_max < 0:
        raise DomainError("C_max must be non-negative")
    if l is not None:
        if C_max > l - 2:
            raise DomainError(f"C_max={C_max} must not exceed l - 2 = {l - 2}")
        return [l] * (C_max + 1)
    if m < 1:
        raise DomainError(f"base accuracy m={m} must be positive")
    return [m + C for C in range(C_max + 1)]


def fig2_sweep(delta: float, C_max: int, *, m: int | None = None, l: int | None = None) -> BoundsReport:
    """Rows ``C = 0..C_max`` of classic, tight and exact error probabilities.

    ``m`` selects the growing register ``l = m + C``; ``l`` a fixed register.
    """
    regs = _registers(C_max, m, l)
    rows = tuple(bounds_row(reg, C, delta) for C, reg in enumerate(regs))
    return BoundsReport(rows, delta, m, l)


def resolving_accuracy(delta: float, guard_bits: int = 1) -> int:
    """Smallest ``m`` with ``2**-m <= delta`` plus ``guard_bits``.

    Below this accuracy the zero window ``[0, 2**-m)`` contains ``delta``
    and no number of extra bits separates it from zero.
    """
    if not 0.0 < delta < 1.0:
        raise DomainError(f"delta={delta} outside (0, 1)")
    return max(1, math.ceil(-math.log2(delta) - 1e-12) + guard_bits)


def default_fig2_delta(n_qreg: int) -> float:
    return worst_case_delta(n_qreg)


@dataclass(frozen=True)
class MinC:
    """Result of :func:`min_C_for_target`; ``C is None`` when the target is unattainable."""

    C: int | None
    value: float | None
    method: str

    @property
    def attainable(self) -> bool:
        return self.C is not None


def min_C_for_target(
    delta: float,
    target: float,
    method: str = "tight",
    *,
    m: int | None = None,
    l: int | None = None,
    C_max: int | None = None,
) -> MinC:
    """Smallest window size whose error value is at most ``target``.

    Scans ``C`` upwards without assuming monotonicity.  With a fixed ``l``
    the scan covers ``0..l-2``; with a base accuracy ``m`` it covers
    ``0..C_max`` (default 16).  Tight values outside their validity count as
    not meeting the target.
    """
    if not 0.0 < target <= 1.0:
        raise DomainError(f"target={target} outside (0, 1]")
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}")
    if C_max is None:
        C_max = l - 2 if l is not None else 16
    for C, reg in enumerate(_registers(C_max, m, l)):
        if method == "tight" and not tight_valid(reg, C, delta):
            continue
        value = p_error(reg, C, delta, method)
        if value <= target:
            return MinC(C, value, method)
    return MinC(None, None, method)
