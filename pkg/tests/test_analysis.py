"""Expansion oracle, Lyapunov decay, envelopes, and event statistics."""

import math
import random

import pytest

from etseek import (
    EventEntry,
    EventLog,
    avg_run,
    check_decay,
    decay_rate,
    demodulate,
    dither,
    escore,
    eval_map,
    event_statistics,
    gradient_expansion,
    lyapunov_sequence,
    convergence_envelopes,
    truncated_gradient,
)
from helpers import draw_specs, reference_specs

# Frozen from a decimal evaluation of (a*h/2)*sin(1.26)*0.1^2 at the
# reference parameters.
QUADRATIC_K1_TT01 = -0.0003332316195566805


def _demodulated(map_spec, loop, k, theta_tilde):
    theta = map_spec.theta_star + theta_tilde + dither(loop, k)
    return demodulate(loop, k, eval_map(map_spec, theta))


def test_expansion_vanishes_at_origin_iteration():
    map_spec, loop, _ = reference_specs()
    terms = gradient_expansion(map_spec, loop, 0, -2.5)
    assert terms.linear_term == 0.0
    assert terms.quadratic_term == 0.0
    assert terms.delta_k == 0.0
    assert terms.total() == 0.0
    assert terms.delta_h == -map_spec.h_star  # cos(0) = 1
    assert _demodulated(map_spec, loop, 0, -2.5) == 0.0


def test_expansion_zero_error_reduces_to_residue():
    map_spec, loop, _ = reference_specs()
    for k in (1, 7, 113):
        terms = gradient_expansion(map_spec, loop, k, 0.0)
        assert terms.linear_term == 0.0
        assert terms.quadratic_term == 0.0
        assert terms.total() == terms.delta_k


def test_expansion_matches_demodulation_at_reference_point():
    map_spec, loop, _ = reference_specs()
    total = gradient_expansion(map_spec, loop, 1, -2.5).total()
    assert total == pytest.approx(_demodulated(map_spec, loop, 1, -2.5),
                                  abs=1e-12)


def test_expansion_rejects_negative_iteration():
    map_spec, loop, _ = reference_specs()
    with pytest.raises(ValueError, match="k >= 0"):
        gradient_expansion(map_spec, loop, -1, 0.0)


def test_expansion_delta_h_formula():
    map_spec, loop, _ = reference_specs()
    for k in range(0, 50, 7):
        terms = gradient_expansion(map_spec, loop, k, 1.0)
        assert terms.delta_h == -map_spec.h_star * math.cos(
            2.0 * loop.omega * loop.epsilon * k)


def test_expansion_exactness_property():
    # the decomposition is an algebraic identity for the quadratic map:
    # sin^2 and sin^3 reduced to harmonics, nothing truncated
    map_spec, loop, _ = reference_specs()
    rng = random.Random(301)
    for _ in range(1500):
        k = rng.randrange(0, 10_001)
        tt = rng.uniform(-10.0, 10.0)
        g = _demodulated(map_spec, loop, k, tt)
        total = gradient_expansion(map_spec, loop, k, tt).total()
        assert abs(total - g) <= 1e-12 * max(1.0, abs(g))
    for _ in range(500):
        m, l, _ = draw_specs(rng)
        k = rng.randrange(0, 10_001)
        tt = rng.uniform(-10.0, 10.0)
        g = _demodulated(m, l, k, tt)
        total = gradient_expansion(m, l, k, tt).total()
        assert abs(total - g) <= 1e-12 * max(1.0, abs(g))


def test_truncation_drops_only_the_quadratic_term():
    map_spec, loop, _ = reference_specs()
    assert truncated_gradient(map_spec, loop, 9, 0.0) == \
        gradient_expansion(map_spec, loop, 9, 0.0).total()
    assert truncated_gradient(map_spec, loop, 0, 3.3) == \
        gradient_expansion(map_spec, loop, 0, 3.3).total()
    terms = gradient_expansion(map_spec, loop, 1, 0.1)
    assert terms.quadratic_term == pytest.approx(QUADRATIC_K1_TT01, rel=1e-12)
    residual = terms.total() - truncated_gradient(map_spec, loop, 1, 0.1)
    assert residual == pytest.approx(QUADRATIC_K1_TT01, rel=1e-10)


def test_truncation_residual_property():
    map_spec, loop, _ = reference_specs()
    rng = random.Random(302)
    for _ in range(1000):
        k = rng.randrange(0, 10_001)
        tt = rng.uniform(-10.0, 10.0)
        full = gradient_expansion(map_spec, loop, k, tt)
        residual = full.total() - truncated_gradient(map_spec, loop, k, tt)
        formula = (0.5 * loop.amplitude_a * map_spec.h_star
                   * math.sin(loop.omega * loop.epsilon * k) * (tt * tt))
        assert abs(residual - formula) <= 1e-14


def test_lyapunov_sequence_examples():
    assert lyapunov_sequence([0.0, 0.0, 0.0]) == [0.0, 0.0, 0.0]
    assert lyapunov_sequence([2.0]) == [4.0]
    assert lyapunov_sequence([-3.0]) == [9.0]


def test_lyapunov_sequence_from_avg_trajectory():
    traj = avg_run(*reference_specs(), -2.5, 20)
    seq = lyapunov_sequence(traj)
    assert seq == [r.g_av * r.g_av for r in traj.records]
    assert seq[0] == 1.75 * 1.75


def test_decay_rate_reference_value():
    map_spec, loop, trig = reference_specs()
    rho = decay_rate(map_spec, loop, trig)
    # 1 - (1 - 0.8488^2)(1 - 0.7)/2, frozen by decimal evaluation
    assert rho == pytest.approx(0.958069216, abs=1e-15)
    assert rho < 1.0


def test_check_decay_trivial_and_fabricated_cases():
    map_spec, loop, trig = reference_specs()
    report = check_decay([0.0] * 10, map_spec, loop, trig)
    assert report.passed and report.checked == 9
    assert report.first_violation_k is None

    report = check_decay([1.0, 1.0], map_spec, loop, trig)
    assert not report.passed
    assert report.first_violation_k == 0
    assert report.max_excess == pytest.approx(1.0 - 0.958069216, rel=1e-9)

    report = check_decay([4.0, 2.0, 1.0], map_spec, loop, trig)
    assert report.passed


def test_check_decay_reference_average_run():
    map_spec, loop, trig = reference_specs()
    traj = avg_run(map_spec, loop, trig, -2.5, 1000)
    report = check_decay(lyapunov_sequence(traj), map_spec, loop, trig)
    assert report.passed
    assert report.checked == 999


def test_envelopes_reference_average_run():
    map_spec, loop, trig = reference_specs()
    traj = avg_run(map_spec, loop, trig, -2.5, 1000)
    report = convergence_envelopes(traj, map_spec, loop, trig)
    assert report.passed
    assert [c.name for c in report.checks] == ["g_av", "theta_tilde_av"]


def test_envelopes_true_run_reports_the_frozen_loop():
    # the reference true loop never updates its hold, so the estimate stays
    # at its initial error and the geometric envelope is violated once the
    # bound has contracted below it; the report carries that, nothing raises
    map_spec, loop, trig = reference_specs()
    traj, _ = escore.run(map_spec, loop, trig, 0.5, 1000)
    report = convergence_envelopes(traj, map_spec, loop, trig,
                                   offset_constant=0.3)
    assert not report.passed
    theta_check = report.checks[0]
    assert theta_check.name == "theta"
    assert theta_check.first_violation_k == 8
    assert theta_check.max_excess == pytest.approx(2.3, abs=0.01)


def test_envelope_bound_sequence_non_increasing():
    map_spec, loop, trig = reference_specs()
    rho = decay_rate(map_spec, loop, trig)
    bounds = [rho ** (0.5 * k) * 1.75 for k in range(500)]
    assert all(b >= c for b, c in zip(bounds, bounds[1:]))


def test_envelopes_reject_negative_offset():
    map_spec, loop, trig = reference_specs()
    traj = avg_run(map_spec, loop, trig, -2.5, 10)
    with pytest.raises(ValueError, match="offset_constant >= 0"):
        convergence_envelopes(traj, map_spec, loop, trig, offset_constant=-0.1)


def _log(ks, epsilon=0.18, horizon=1000):
    entries = tuple(EventEntry(index=i, k=k, gradient=0.1, control=24.0)
                    for i, k in enumerate(ks))
    return EventLog(entries=entries, horizon=horizon, epsilon=epsilon)


def test_event_statistics_example():
    stats = event_statistics(_log([0, 100, 300]))
    assert stats.count == 3
    assert stats.mean_gap_iters == 150.0
    assert stats.mean_gap_seconds == pytest.approx(27.0, rel=1e-15)
    assert stats.min_gap_iters == 100
    assert stats.max_gap_iters == 200


def test_event_statistics_single_event():
    stats = event_statistics(_log([0]))
    assert stats.count == 1
    assert stats.mean_gap_iters is None
    assert stats.mean_gap_seconds is None
    assert stats.min_gap_iters is None
    assert stats.max_gap_iters is None


def test_event_log_invariants():
    with pytest.raises(ValueError, match="initial event"):
        EventLog(entries=(), horizon=10, epsilon=0.18)
    with pytest.raises(ValueError, match="start at k = 0"):
        _log([5, 10])
    with pytest.raises(ValueError, match="strictly increasing"):
        _log([0, 7, 7])
