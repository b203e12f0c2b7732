from fractions import Fraction

import pytest

from ncwalk.center import (NotCentralError, ShiftedSymPoly, asymptotic_coeffs, enum_paths,
                           evaluate_at, evaluate_levels, first_return, harish_chandra, hc_project,
                           partitions, powersum_decompose, psi, psi_sub, pt_expand, reconstruct)
from ncwalk.exactalg import MultiPoly
from ncwalk.ugln import apply_pt, is_central, normal_form, parse_element

t = MultiPoly.symbol("t")


def test_paths_and_first_return():
    paths = enum_paths(2, 3)
    assert len(paths) == 4
    assert all(p[0] == p[-1] == 2 for p in paths)
    assert first_return((2, 1, 2, 1, 2)) == 2
    assert first_return((2, 2)) == 1


def test_psi_small():
    assert normal_form(psi(1, 2)) == normal_form(parse_element("E[1,1] + E[2,2] - 1"))
    for N in (1, 2, 3):
        for k in (1, 2, 3):
            assert is_central(psi(k, N))


def test_harish_chandra_power_sums():
    assert str(harish_chandra(psi(2, 2)).poly) == "x1^2 + x2^2"
    with pytest.raises(NotCentralError):
        harish_chandra(parse_element("E[1,2]"))


def test_hc_fast_path_agrees():
    for k in (1, 2, 3):
        x = apply_pt(psi(k, 3), t)
        assert hc_project(x).poly == harish_chandra(x).poly


def test_pt_expand_matches_printed_cubic():
    N = 4
    exp = pt_expand(3, N)
    assert exp[(3,)] == 1
    assert exp[(2,)] == 3 * t
    assert exp[(1,)] == 3 * (t ** 2 + N * t)
    assert exp[()] == N * (t ** 3 + 3 * t ** 2 * N + Fraction(1, 2) * t * (N ** 2 + 1))


def test_the_5453_value():
    assert evaluate_at(apply_pt(psi(4, 2), 3), (4, 2)) == 5453


def test_evaluate_at_symbolic_time():
    v = evaluate_at(apply_pt(psi(1, 2), t), (4, 2))
    assert v == 5 + 2 * t


def test_two_level_evaluation():
    x = apply_pt(psi(1, 2) * psi_sub(1, 1, 2), 1)
    assert evaluate_levels(x, {2: (1, 0), 1: (0,)}) == 3


def test_powersum_decompose_round_trip_and_degree_guard():
    p = harish_chandra(apply_pt(psi(2, 3), t))
    dec = powersum_decompose(p)
    assert reconstruct(dec, 3) == p.poly
    x1, x2 = MultiPoly.symbol("x1"), MultiPoly.symbol("x2")
    with pytest.raises(ValueError):
        powersum_decompose(ShiftedSymPoly(2, x1 ** 3 + x2 ** 3))


def test_partitions():
    assert partitions(4) == sorted(partitions(4), key=lambda r: partitions(4).index(r))
    assert len(partitions(5)) == 7
    assert all(max(r) <= 2 for r in partitions(4, 2))


def test_asymptotics_cubic():
    tau, eta = MultiPoly.symbol("tau"), MultiPoly.symbol("eta")
    c = asymptotic_coeffs(3)
    assert c[(2,)] == 3 * tau
    assert c[(1,)] == 3 * (tau ** 2 + eta * tau)
