import numpy as np
import pytest

from ncwalk.center import psi, psi_sub
from ncwalk.exactalg import MultiPoly
from ncwalk.surface import (InterlacedArray, InterlacingError, densely_packed, mc_expectation,
                            parse_schedule, power_sum_obs, ring, run, simulate_batch,
                            validate_schedule)
from ncwalk.ugln import apply_pt, state


def test_densely_packed():
    assert densely_packed(1).levels == ((0,),)
    assert densely_packed(2).levels == ((0,), (0, -1))
    assert densely_packed(3).level(3) == (0, -1, -2)


def test_interlacing_rejected():
    with pytest.raises(InterlacingError):
        InterlacedArray(((0,), (0, 0)))
    with pytest.raises(InterlacingError):
        InterlacedArray(((2,), (1, -1)))


def test_push_on_first_ring():
    lv = [[0], [0, -1]]
    assert ring(lv, 1, 1)
    assert lv == [[1], [1, -1]]


def test_block_below_right():
    lv = [[0], [1, -1]]
    assert not ring(lv, 2, 2)
    assert lv == [[0], [1, -1]]


def test_schedule_validation():
    assert parse_schedule("(2,1);(1,2.5)") == [(2, 1.0), (1, 2.5)]
    with pytest.raises(ValueError):
        validate_schedule([(1, 2), (1, 1)], 2)
    with pytest.raises(ValueError):
        validate_schedule([(3, 1)], 2)


def test_interlacing_holds_for_many_events():
    trace = []
    run(densely_packed(5), [(5, 7000.0)], seed=4, check=True, trace=trace)
    assert len(trace) >= 100_000


def test_positions_monotone_and_counts_fixed():
    snaps = run(densely_packed(4), [(4, 1.0), (4, 2.0), (4, 5.0)], seed=9)
    assert all(len(s) == 4 for s in snaps)
    for a, b in zip(snaps, snaps[1:]):
        assert all(x <= y for x, y in zip(a, b))


def test_determinism():
    args = (densely_packed(3), [(3, 1.0), (2, 2.0)])
    a = simulate_batch(*args, replicas=5000, seed=17)
    b = simulate_batch(*args, replicas=5000, seed=17)
    assert all(np.array_equal(x, y) for x, y in zip(a, b))
    r1 = mc_expectation(*args, [power_sum_obs(1, 3), power_sum_obs(2, 2)], 5000, 17)
    r2 = mc_expectation(*args, [power_sum_obs(1, 3), power_sum_obs(2, 2)], 5000, 17)
    assert r1 == r2
    assert run(*args, seed=3, replica=2) == run(*args, seed=3, replica=2)


def test_level_one_is_poisson():
    r = mc_expectation(densely_packed(1), [(1, 2.0)], [power_sum_obs(1, 1)], 50_000, 5)
    assert abs(r.mean - 2) < 4 * r.stderr


def test_engines_agree():
    ini, sched = densely_packed(2), [(2, 1.0)]
    obs = power_sum_obs(1, 2) ** 2
    vals = [sum(run(ini, sched, seed=7, replica=r)[0]) ** 2 for r in range(20_000)]
    scalar_mean = np.mean(vals)
    scalar_se = np.std(vals, ddof=1) / np.sqrt(len(vals))
    batch = mc_expectation(ini, sched, [obs], 200_000, 8)
    assert abs(scalar_mean - batch.mean) < 4 * np.hypot(scalar_se, batch.stderr)


def test_spacelike_prediction():
    target = float(state(psi(1, 2) * apply_pt(psi_sub(1, 1, 2), 1), 1).to_fraction())
    r = mc_expectation(densely_packed(2), [(2, 1.0), (1, 2.0)],
                       [power_sum_obs(1, 2), power_sum_obs(1, 1)], 200_000, 12)
    assert abs(r.mean - target) < 4 * r.stderr


def test_observable_level_mismatch():
    with pytest.raises(ValueError):
        mc_expectation(densely_packed(2), [(1, 1.0)], [power_sum_obs(1, 2)], 10, 1)


def test_polynomial_observable():
    x1 = MultiPoly.symbol("x1")
    r = mc_expectation(densely_packed(1), [(1, 1.0)], [x1 * x1 - x1], 50_000, 2)
    assert abs(r.mean - 1) < 4 * r.stderr  # factorial moment t^2
