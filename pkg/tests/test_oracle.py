import random
from fractions import Fraction

import pytest

from ncwalk.center import evaluate_at, psi
from ncwalk.exactalg import MultiPoly
from ncwalk.oracle import (OracleError, ctmc_expectation, detform_n2, detform_n2_exact,
                           state_diff_oracle)
from ncwalk.surface import InterlacedArray, densely_packed, mc_expectation, power_sum_obs
from ncwalk.ugln import apply_pt, state_word

t = MultiPoly.symbol("t")


def test_detform_5453():
    assert abs(detform_n2(4, 2, 3, 4, 50) - 5453) < 1e-6
    assert abs(detform_n2_exact(4, 2, 3, 4, 80) - 5453) < Fraction(1, 10 ** 12)


def test_detform_first_moment_matches_symbolic():
    assert abs(detform_n2(4, 2, 3, 1, 50) - float(evaluate_at(apply_pt(psi(1, 2), 3), (4, 2)))) < 1e-9


def test_detform_small_time_limit():
    # only b = x, a = y survives: p_k(x, y - 1)
    v = detform_n2_exact(5, 3, Fraction(1, 10 ** 15), 3, 5)
    assert abs(v - (5 ** 3 + 2 ** 3)) < Fraction(1, 10 ** 9)


def test_detform_guards():
    with pytest.raises(OracleError):
        detform_n2(1, 2, 1, 1, 10)
    with pytest.raises(OracleError):
        detform_n2(4, 2, 1, 1, 3)


def test_state_oracle_examples():
    assert state_diff_oracle([(2, 1), (1, 2), (2, 1), (1, 2)]) == 2 * t ** 2 + t
    assert state_diff_oracle([(1, 1), (1, 2)]) == 0
    assert state_diff_oracle([]) == 1
    with pytest.raises(OracleError):
        state_diff_oracle([(1, 1)] * 9)


def test_state_oracle_random_words():
    rng = random.Random(1)
    for _ in range(300):
        w = tuple((rng.randint(1, 4), rng.randint(1, 4)) for _ in range(rng.randint(1, 6)))
        assert state_diff_oracle(w) == state_word(w, "t")


def test_ctmc_examples():
    r = ctmc_expectation(densely_packed(1), [(1, 2)], [power_sum_obs(1, 1)])
    assert abs(r.value - 2) <= r.error_bound + 1e-12
    r = ctmc_expectation(densely_packed(2), [(2, 1)], [power_sum_obs(1, 2)])
    assert abs(r.value - 1) <= r.error_bound + 1e-12


def test_ctmc_bound_and_guards():
    with pytest.raises(OracleError):
        ctmc_expectation(densely_packed(4), [(1, 1)], [power_sum_obs(1, 1)])
    with pytest.raises(OracleError):
        ctmc_expectation(densely_packed(1), [(1, 50)], [power_sum_obs(1, 1)], tol=1e-9, max_events_cap=60)


def test_ctmc_matches_monte_carlo():
    ini = InterlacedArray(((0,), (1, -1)))
    sched = [(2, 1.0), (1, 1.5)]
    obs = [power_sum_obs(2, 2), power_sum_obs(1, 1)]
    o = ctmc_expectation(ini, sched, obs, tol=1e-5)
    m = mc_expectation(ini, sched, obs, 200_000, 21)
    assert abs(o.value - m.mean) <= o.error_bound + 4 * m.stderr


def test_ctmc_gibbs_mixture_matches_single_level():
    # averaging the level-1 start over its interlacing range restores the Markov property of level 2
    target = float(evaluate_at(apply_pt(psi(2, 2), 1), (1, 0)))
    vals = [ctmc_expectation(InterlacedArray(((a,), (1, -1))), [(2, 1)], [power_sum_obs(2, 2)]) for a in (0, 1)]
    assert abs(sum(v.value for v in vals) / 2 - target) < 1e-5
