from __future__ import annotations

import io
import math

import numpy as np
import pytest

from tetracode.lattice import Chain
from tetracode.noise_sim import (CSV_COLUMNS, Crossing, NoiseModel, RunStats, estimate_crossing, logical_failure,
                                 probability_grid, read_csv, run_trials, sample_iid_error, standard_error,
                                 sweep_probabilities, to_csv, trial_rng)
from tetracode.xdecoder import DecodeOutcome, FailureStage


def _row(d, p, p_fail, se, trials=1000):
    return RunStats(d=d, n_qubits=0, beta=1.0, error_type="z", p=p, trials=trials, failures=round(p_fail * trials),
                    heralded_failures=0, p_fail=p_fail, std_err=se, seed=0)


def test_noise_model_validation():
    assert NoiseModel("X", 0.1).error_type.value == "x"
    for p in (-0.1, 1.5):
        with pytest.raises(ValueError):
            NoiseModel("x", p)


def test_sampling_extremes():
    rng = trial_rng(1, 0)
    assert sample_iid_error(15, NoiseModel("x", 0.0), rng) == frozenset()
    assert sample_iid_error(15, NoiseModel("x", 1.0), rng) == frozenset(range(15))


def test_sampling_mean_weight():
    model = NoiseModel("z", 0.1)
    weights = np.array([len(sample_iid_error(15, model, trial_rng(3, i))) for i in range(100_000)])
    sigma = math.sqrt(15 * 0.1 * 0.9 / len(weights))
    assert abs(weights.mean() - 1.5) <= 3 * sigma


def test_trial_streams_are_independent_of_order():
    a = trial_rng(9, 5).random(4)
    trial_rng(9, 4).random(4)
    assert np.array_equal(a, trial_rng(9, 5).random(4))
    assert not np.array_equal(a, trial_rng(9, 6).random(4))


def test_logical_failure_examples(code3):
    n = code3.n_qubits
    ok = DecodeOutcome(Chain(3, frozenset({1, 2})))
    assert not logical_failure(code3, {1, 2}, ok, "x", check=True)
    stab = code3.x_stabilizers[0]
    assert not logical_failure(code3, stab, DecodeOutcome(Chain(3)), "x", check=True)
    assert logical_failure(code3, range(n), DecodeOutcome(Chain(3)), "z", check=True)
    herald = DecodeOutcome(Chain(3), True, FailureStage.SWEEP)
    assert logical_failure(code3, [], herald, "x")


def test_standard_error():
    assert standard_error(0.5, 100) == pytest.approx(0.05)
    assert standard_error(0.0, 10) == 0


def test_run_trials_zero_noise(code3):
    stats = run_trials(code3, NoiseModel("z", 0.0), 50, seed=1)
    assert stats.failures == 0 and stats.p_fail == 0 and stats.std_err == 0


def test_run_trials_full_noise(code3):
    stats = run_trials(code3, NoiseModel("z", 1.0), 20, seed=1)
    assert stats.p_fail == 1.0 and stats.failures == 20


def test_oracle_mode_agrees(code5):
    # check=True asserts the syndrome round trip and the parity shortcut on every trial
    for kind, p in (("x", 0.08), ("z", 0.03)):
        a = run_trials(code5, NoiseModel(kind, p), 300, seed=4, check=True)
        b = run_trials(code5, NoiseModel(kind, p), 300, seed=4)
        assert (a.failures, a.heralded_failures) == (b.failures, b.heralded_failures)


def test_workers_do_not_change_counts(code5):
    model = NoiseModel("x", 0.1)
    serial = run_trials(code5, model, 600, seed=8, workers=1)
    parallel = run_trials(code5, model, 600, seed=8, workers=3)
    assert serial.failures == parallel.failures
    assert serial.heralded_failures == parallel.heralded_failures


def test_sweep_rows(code3):
    rows = sweep_probabilities([code3], "z", [0.05], 200, seed=2)
    single = run_trials(code3, NoiseModel("z", 0.05), 200, seed=2)
    assert len(rows) == 1 and rows[0].csv_row() == single.csv_row()
    twice = sweep_probabilities([code3, code3], "z", [0.05], 200, seed=2)
    assert twice[0].csv_row() == twice[1].csv_row()
    with pytest.raises(ValueError):
        sweep_probabilities([code3], "z", [], 10, seed=2)


def test_csv_format_roundtrip(code3):
    rows = sweep_probabilities([code3], "x", [0.01, 1 / 3], 100, seed=5)
    text = to_csv(rows)
    lines = text.splitlines()
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert len(lines) == 3
    assert lines[2].split(",")[4] == "0.3333333333"
    again = read_csv(io.StringIO(text))
    assert [r.csv_row() for r in again] == [r.csv_row() for r in rows]


def test_probability_grid():
    grid = probability_grid(0.002, 0.02, 8)
    assert len(grid) == 8 and grid[0] == pytest.approx(0.002) and grid[-1] == pytest.approx(0.02)
    ratios = [b / a for a, b in zip(grid, grid[1:])]
    assert max(ratios) == pytest.approx(min(ratios))
    assert probability_grid(0.1, 0.3, 3, log=False) == pytest.approx([0.1, 0.2, 0.3])
    with pytest.raises(ValueError):
        probability_grid(0.0, 0.1, 3)


def test_crossing_at_grid_point():
    ps = [0.01, 0.02, 0.04]
    a = [_row(5, p, f, 0.001) for p, f in zip(ps, [0.1, 0.2, 0.3])]
    b = [_row(7, p, f, 0.001) for p, f in zip(ps, [0.05, 0.2, 0.35])]
    c = estimate_crossing(a, b)
    assert c.p == pytest.approx(0.02)
    assert c.low < 0.02 < c.high
    assert math.log(0.02) - math.log(c.low) == pytest.approx(math.log(c.high) - math.log(0.02), rel=0.2)


def test_crossing_between_points():
    ps = [0.01, 0.04]
    a = [_row(5, p, f, 0.0) for p, f in zip(ps, [0.1, 0.3])]
    b = [_row(7, p, f, 0.0) for p, f in zip(ps, [0.0, 0.4])]
    c = estimate_crossing(a, b)
    assert c == Crossing(pytest.approx(0.02), pytest.approx(0.02), pytest.approx(0.02))


def test_no_crossing():
    ps = [0.01, 0.02, 0.04]
    a = [_row(5, p, f, 0.001) for p, f in zip(ps, [0.1, 0.2, 0.3])]
    b = [_row(7, p, f + 0.05, 0.001) for p, f in zip(ps, [0.1, 0.2, 0.3])]
    assert estimate_crossing(a, b) is None


def test_crossing_needs_shared_grid():
    a = [_row(5, 0.01, 0.1, 0.0)]
    b = [_row(7, 0.02, 0.1, 0.0)]
    with pytest.raises(ValueError):
        estimate_crossing(a, b)


def test_equal_zero_tail_is_not_a_crossing():
    ps = [0.01, 0.02, 0.04, 0.08]
    a = [_row(5, p, f, se) for p, f, se in zip(ps, [0.0, 0.001, 0.01, 0.1], [0.0, 0.0003, 0.001, 0.003])]
    b = [_row(7, p, f, se) for p, f, se in zip(ps, [0.0, 0.0, 0.005, 0.12], [0.0, 0.0, 0.0007, 0.003])]
    c = estimate_crossing(a, b)
    assert c is not None and 0.04 < c.p < 0.08


def test_run_of_zeros_between_signs():
    ps = [0.01, 0.02, 0.04, 0.08]
    a = [_row(5, p, f, 0.0) for p, f in zip(ps, [0.2, 0.3, 0.3, 0.3])]
    b = [_row(7, p, f, 0.0) for p, f in zip(ps, [0.1, 0.3, 0.3, 0.4])]
    assert estimate_crossing(a, b).p == pytest.approx(math.sqrt(0.02 * 0.04))
