import random
from fractions import Fraction

import pytest

from ncwalk.covariance import (BranchError, PathPoint, cov, cov_spacelike, cov_timelike,
                               ou_rescale_compare, random_positive_rational, residue_pair, solve_ckl,
                               verify_timelike_identity)
from ncwalk.exactalg import LaurentPoly, three_term


def test_residue_pair_kernel():
    F = LaurentPoly("z", {1: 2, 2: 3})
    G = LaurentPoly("w", {-1: 5, -2: 7, 0: 11})
    assert residue_pair(F, G) == 1 * 2 * 5 + 2 * 3 * 7


def test_first_moment_covariance_both_branches():
    a = cov(PathPoint(1, 2, 1), PathPoint(1, 1, 2))
    b = cov(PathPoint(1, 1, 1), PathPoint(1, 2, 2))
    assert a == b == 1  # tau_1 * min(eta)


def test_auto_swaps_time_order():
    i, j = PathPoint(2, 3, Fraction(5, 2)), PathPoint(1, 1, 1)
    assert cov(i, j) == cov(j, i)


def test_branch_preconditions():
    with pytest.raises(BranchError):
        cov_spacelike(PathPoint(1, 1, 1), PathPoint(1, 2, 2))
    with pytest.raises(BranchError):
        cov_timelike(PathPoint(1, 2, 1), PathPoint(1, 1, 2))
    with pytest.raises(ValueError):
        PathPoint(1, 1, 0)
    assert PathPoint.parse("3, 1/2, 2") == PathPoint(3, Fraction(1, 2), 2)


def test_variance_of_psi2():
    # sum_r r F[z^r] F[w^-r] with F = (eta/z + tau + tau z)^2
    eta, tau = Fraction(2), Fraction(3)
    v = cov(PathPoint(2, eta, tau), PathPoint(2, eta, tau))
    F = three_term("z", eta, tau, tau) ** 2
    assert v == F.coeff(1).to_fraction() * F.coeff(-1).to_fraction() + 2 * F.coeff(2).to_fraction() * F.coeff(-2).to_fraction()


def test_ckl_values():
    assert solve_ckl(3, 1, 3, 2) == [24, 6, 1]
    with pytest.raises(ZeroDivisionError):
        solve_ckl(2, 1, 2, 0)


def test_timelike_identity_random():
    rng = random.Random(5)
    for _ in range(10):
        a, b, h = (random_positive_rational(rng) for _ in range(3))
        for k in range(1, 6):
            assert verify_timelike_identity(k, a, a + b, h)


def test_ou_rescaling():
    for ki in (1, 2, 3):
        for kj in (1, 2, 3):
            assert ou_rescale_compare(PathPoint(ki, 3, 1), PathPoint(kj, 1, 2))
            assert ou_rescale_compare(PathPoint(ki, 1, 1), PathPoint(kj, 3, 2))
    with pytest.raises(BranchError):
        ou_rescale_compare(PathPoint(1, 1, 2), PathPoint(1, 1, 1))
