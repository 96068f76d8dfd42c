import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qmud.bounds import (
    CSV_HEADER,
    bounds_row,
    default_fig2_delta,
    denominator_bound,
    fig2_sweep,
    min_C_for_target,
    numerator_bound,
    p_error,
    p_error_classic,
    p_error_exact,
    p_error_tight,
    resolving_accuracy,
    tight_valid,
)
from qmud.counting import max_accuracy
from qmud.errors import DomainError, ValidityError


def window_sum(l, C, delta):
    """Partial sum of the full outcome distribution, from the direct geometric series."""
    n = 1 << l
    k = np.arange(n)
    amps = [np.exp(2j * np.pi * k * (delta - i / n)).sum() / n for i in range(1 << C)]
    return float(np.sum(np.abs(amps) ** 2))


def test_exact_dyadic_outside_window_is_zero():
    assert p_error_exact(6, 2, 9 / 64) == 0.0


def test_exact_dyadic_inside_window_is_one():
    assert p_error_exact(6, 2, 3 / 64) == 1.0


def test_exact_zero_phase():
    assert p_error_exact(6, 3, 0.0) == 0.0


def test_exact_single_term_window():
    # C = 0 keeps the single outcome i = 0
    assert p_error_exact(6, 0, 0.1) == pytest.approx(window_sum(6, 0, 0.1), abs=1e-14)
    assert p_error_exact(6, 0, 0.1) > 0


def test_exact_cross_check_l6_c2():
    assert p_error_exact(6, 2, 1 / 48) == pytest.approx(window_sum(6, 2, 1 / 48), abs=1e-13)
    assert p_error_exact(6, 2, 1 / 48) == pytest.approx(0.9252433720013482, abs=1e-12)


@pytest.mark.parametrize("l", [1, 4, 9])
def test_exact_grid_matches_window_sum(l):
    for delta in np.linspace(0.0007, 0.999, 23):
        for C in range(l):
            assert p_error_exact(l, C, delta) == pytest.approx(window_sum(l, C, delta), abs=1e-12)


def test_numerator_bound_cases():
    # frac(2**(l+1) delta) = 1/2
    assert numerator_bound(3, 3 / 32) == pytest.approx(math.pi / 2)
    # frac = 0 caps at 2
    assert numerator_bound(3, 1 / 16) == 2.0


def test_numerator_bound_soundness_grid():
    l = 5
    for delta in np.linspace(1e-4, 0.25, 1000):
        true = abs(np.exp(2j * np.pi * delta * (1 << l)) - 1)
        assert numerator_bound(l, delta) >= true - 1e-12
    assert numerator_bound(5, 0.013) >= 2 * abs(math.sin(math.pi * 0.013 * 32))


def test_denominator_bound_examples():
    assert denominator_bound(5, 0, 0.25) == pytest.approx(math.sqrt(2))
    assert abs(np.exp(1j * math.pi / 2) - 1) == pytest.approx(math.sqrt(2))
    b = denominator_bound(5, 1, 1 / 8)
    assert b == pytest.approx(4 * math.sqrt(2) * 3 / 32)
    assert b == pytest.approx(0.5303300858899107, abs=1e-15)
    true = abs(np.exp(2j * math.pi * 3 / 32) - 1)
    # 2 sin(3 pi / 32)
    assert true == pytest.approx(0.5805693545089247, abs=1e-15)
    assert b <= true


def test_denominator_bound_errors():
    with pytest.raises(ValidityError):
        denominator_bound(5, 0, 0.3)
    with pytest.raises(ValidityError):
        denominator_bound(5, 4, 1 / 8)


@settings(max_examples=200, deadline=None)
@given(l=st.integers(2, 12), i=st.integers(0, 1023), delta=st.floats(1e-6, 0.25))
def test_denominator_bound_soundness(l, i, delta):
    i = i % (1 << (l - 1))
    gap = delta - i / (1 << l)
    if gap <= 0:
        return
    true = abs(np.exp(2j * np.pi * gap) - 1)
    assert denominator_bound(l, i, delta) <= true + 1e-12


def test_classic_examples():
    assert p_error_classic(8, 0, 2 ** -6) == pytest.approx(1 / 64, rel=1e-12)
    assert p_error_classic(8, 1, 2 ** -6) == pytest.approx(1 / 64 + 1 / 36, rel=1e-12)


def test_classic_dyadic_term_is_one():
    assert p_error_classic(6, 2, 2 / 64) == 1.0


def test_tight_below_classic_at_valid_point():
    t = p_error_tight(8, 2, 2 ** -6)
    c = p_error_classic(8, 2, 2 ** -6)
    assert math.isfinite(t) and t < c
    # numerator capped at 2 and a denominator bound sqrt(2) times the chord
    # bound's make every tight term half the classic one
    assert t == pytest.approx(c / 2, rel=1e-12)


def test_tight_invalid_when_window_reaches_phase():
    # delta = 4/256 but the window i <= 7 crosses it
    assert not tight_valid(8, 3, 2 ** -6)
    with pytest.raises(ValidityError):
        p_error_tight(8, 3, 2 ** -6)
    with pytest.raises(ValidityError):
        p_error_tight(6, 5, 0.01)


def test_method_dispatch():
    assert p_error(6, 1, 0.01, "exact") == p_error_exact(6, 1, 0.01)
    with pytest.raises(ValueError):
        p_error(6, 1, 0.01, "median")
    with pytest.raises(DomainError):
        p_error_exact(6, 6, 0.01)


@settings(max_examples=200, deadline=None)
@given(l=st.integers(2, 12), data=st.data(), delta=st.floats(1e-6, 0.25))
def test_domination_property(l, data, delta):
    C = data.draw(st.integers(0, l - 2))
    row = bounds_row(l, C, delta)
    assert row.p_exact <= row.p_classic + 1e-12
    assert row.p_exact <= row.p_tight + 1e-12
    # below the clamp at 1 each tight term is at most half the classic one
    if row.tight_valid and row.p_classic < 1.0:
        assert row.p_tight <= row.p_classic / 2 + 1e-12


def test_invalid_rows_fall_back_to_classic():
    row = bounds_row(8, 3, 2 ** -6)
    assert not row.tight_valid and row.p_tight == row.p_classic


def test_min_c_trivial():
    assert min_C_for_target(0.01, 1.0, "classic", l=8).C == 0
    res = min_C_for_target(4 / 1024, 1e-3, "exact", l=10)
    assert res.C == 0 and res.value == 0.0
    with pytest.raises(DomainError):
        min_C_for_target(0.01, 0.0, l=8)


def test_min_c_growing_register_orders_methods():
    tight = min_C_for_target(2 ** -8, 1e-3, "tight", m=10)
    classic = min_C_for_target(2 ** -8, 1e-3, "classic", m=10)
    assert tight.attainable and classic.attainable
    assert (tight.C, classic.C) == (4, 5)
    assert tight.C <= classic.C
    assert tight.value <= 1e-3 and classic.value <= 1e-3


def test_min_c_fixed_register_unattainable():
    # inside one register every window sum only grows with C
    for method in ("tight", "classic"):
        res = min_C_for_target(2 ** -8, 1e-3, method, l=10)
        assert not res.attainable and res.value is None


def test_sweep_shape_and_csv():
    rep = fig2_sweep(default_fig2_delta(8), 6, m=7)
    lines = rep.to_csv().splitlines()
    assert lines[0] == ",".join(CSV_HEADER)
    assert len(lines) == 8
    assert [r.l for r in rep.rows] == list(range(7, 14))
    assert set(line.rsplit(",", 1)[1] for line in lines[1:]) <= {"true", "false"}


def test_sweep_argument_errors():
    with pytest.raises(DomainError):
        fig2_sweep(0.01, 3)
    with pytest.raises(DomainError):
        fig2_sweep(0.01, 3, m=4, l=8)
    with pytest.raises(DomainError):
        fig2_sweep(0.01, 7, l=8)


def test_fixed_register_sweep_is_nondecreasing():
    rep = fig2_sweep(0.013, 8, l=10)
    exact = rep.column("p_exact")
    assert np.all(np.diff(exact) >= -1e-15)


def test_sweep_domination_every_row():
    for n in (8, 10, 12):
        delta = default_fig2_delta(n)
        for rep in (fig2_sweep(delta, 8, m=resolving_accuracy(delta)), fig2_sweep(delta, 6, l=12)):
            for r in rep.rows:
                assert r.p_exact <= r.p_tight + 1e-12 and r.p_exact <= r.p_classic + 1e-12


def test_resolving_accuracy():
    assert resolving_accuracy(0.25) == 3
    assert resolving_accuracy(0.2) == 4
    assert resolving_accuracy(default_fig2_delta(8)) == 7


def test_max_accuracy_does_not_resolve_worst_case_phase():
    # the accuracy from max_accuracy leaves the worst-case phase inside
    # the zero window, so extra bits drive the error towards one
    for n in (8, 10, 12):
        delta = default_fig2_delta(n)
        m = max_accuracy(n)
        assert delta < 2.0 ** -m
        rep = fig2_sweep(delta, 6, m=m)
        assert rep.rows[-1].p_exact > 0.9
