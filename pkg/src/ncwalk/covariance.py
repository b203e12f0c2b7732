"""Exact covariances of the limiting Gaussian field by residue calculus.

Every covariance here is a double contour integral over |z| > |w| of a
Laurent polynomial F(z) G(w) against (z - w)^-2.  Expanding
(z - w)^-2 = sum_n (n + 1) w^n z^(-n-2) and taking residues reduces it to
the finite sum sum_{r >= 1} r F[z^r] G[w^-r], which is computed exactly.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .exactalg import LaurentPoly, MultiPoly, solve_linear, three_term


class BranchError(ValueError):
    pass


@dataclass(frozen=True)
class PathPoint:
    """Observation point: level N = eta L, time t = tau L, observable Psi_k."""

    k: int
    eta: Fraction
    tau: Fraction

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be a positive integer")
        object.__setattr__(self, "eta", Fraction(self.eta))
        object.__setattr__(self, "tau", Fraction(self.tau))
        if self.eta < 0 or self.tau <= 0:
            raise ValueError("need eta >= 0 and tau > 0")

    @classmethod
    def parse(cls, text: str) -> "PathPoint":
        k, eta, tau = (s.strip() for s in text.split(","))
        return cls(int(k), Fraction(eta), Fraction(tau))


def residue_pair(F: LaurentPoly, G: LaurentPoly) -> MultiPoly:
    """sum_{r>=1} r F[z^r] G[w^-r]: the |z|>|w| double integral against (z-w)^-2."""
    total = MultiPoly()
    for r, c in F.terms.items():
        if r >= 1:
            g = G.coeff(-r)
            if g:
                total = total + c * g * r
    return total


def _value(p: MultiPoly):
    return p.constant_term() if p.is_constant() else p


def spacelike_integrand(i: PathPoint, j: PathPoint) -> tuple[LaurentPoly, LaurentPoly]:
    F = three_term("z", i.eta, i.tau, i.tau) ** i.k
    G = three_term("w", j.eta, j.tau, j.tau) ** j.k
    return F, G


def timelike_integrand(i: PathPoint, j: PathPoint) -> tuple[LaurentPoly, LaurentPoly]:
    F = three_term("z", j.eta * j.tau / i.tau, j.tau, i.tau) ** j.k
    G = three_term("w", i.eta, i.tau, i.tau) ** i.k
    return F, G


def cov_spacelike(i: PathPoint, j: PathPoint):
    """Covariance when eta_i >= eta_j and tau_i <= tau_j (point i on the larger contour)."""
    if not (i.eta >= j.eta and i.tau <= j.tau):
        raise BranchError("space-like branch needs eta_i >= eta_j and tau_i <= tau_j")
    return _value(residue_pair(*spacelike_integrand(i, j)))


def cov_timelike(i: PathPoint, j: PathPoint):
    """Covariance when eta_i < eta_j and tau_i <= tau_j."""
    if not (i.eta < j.eta and i.tau <= j.tau):
        raise BranchError("time-like branch needs eta_i < eta_j and tau_i <= tau_j")
    return _value(residue_pair(*timelike_integrand(i, j)))


def cov(i: PathPoint, j: PathPoint, branch: str = "auto"):
    """Dispatch on the ordering; with tau_i > tau_j the points are swapped first."""
    if branch == "auto":
        if i.tau > j.tau:
            i, j = j, i
        return cov_spacelike(i, j) if i.eta >= j.eta else cov_timelike(i, j)
    if branch == "spacelike":
        return cov_spacelike(i, j)
    if branch == "timelike":
        return cov_timelike(i, j)
    raise ValueError(f"unknown branch {branch!r}")


# -- c_{kl} coefficients ---------------------------------------------------


def solve_ckl(k: int, tau1, tau2, eta) -> list[Fraction]:
    """c_{k1}, ..., c_{kk} matching negative Laurent coefficients r = -1..-k.

    Column l, (eta/w + tau1 + tau1 w)^l, has lowest exponent -l, so the
    system is triangular with diagonal eta^l.
    """
    tau1, tau2, eta = Fraction(tau1), Fraction(tau2), Fraction(eta)
    if k < 1:
        raise ValueError("k must be positive")
    if eta == 0:
        raise ZeroDivisionError("singular c_kl system: eta = 0")
    base = three_term("w", eta, tau1, tau1)
    powers = [base ** l for l in range(1, k + 1)]
    target = three_term("w", eta, tau2, tau2) ** k
    rows = [[p.coeff(-r).to_fraction() for p in powers] for r in range(1, k + 1)]
    rhs = [target.coeff(-r) for r in range(1, k + 1)]
    return [c.to_fraction() for c in solve_linear(rows, rhs)]


def timelike_identity_sides(k: int, tau1, tau2, eta, c=None) -> list[tuple[Fraction, Fraction]]:
    tau1, tau2, eta = Fraction(tau1), Fraction(tau2), Fraction(eta)
    c = solve_ckl(k, tau1, tau2, eta) if c is None else c
    base = three_term("z", eta, tau1, tau1)
    rhs_poly = three_term("z", eta * tau2 / tau1, tau2, tau1) ** k
    sides = []
    power = LaurentPoly("z", {0: 1})
    lhs_terms = []
    for l in range(1, k + 1):
        power = power * base
        lhs_terms.append(power)
    for r in range(1, k + 1):
        lhs = sum((cl * p.coeff(r).to_fraction() for cl, p in zip(c, lhs_terms)), Fraction(0))
        sides.append((lhs, rhs_poly.coeff(r).to_fraction()))
    return sides


def verify_timelike_identity(k: int, tau1, tau2, eta) -> bool:
    """Check sum_l c_kl (eta/z + tau1 + tau1 z)^l [z^r] = (eta tau2/tau1 /z + tau2 + tau1 z)^k [z^r], r = 1..k."""
    return all(lhs == rhs for lhs, rhs in timelike_identity_sides(k, tau1, tau2, eta))


def random_positive_rational(rng: random.Random, hi: int = 9) -> Fraction:
    return Fraction(rng.randint(1, hi * 4), rng.randint(1, 4))


# -- Ornstein-Uhlenbeck rescaling -------------------------------------------

_A = MultiPoly.symbol("a")  # e^{tau_i}
_Q = MultiPoly.symbol("q")  # e^{tau_j - tau_i}


def _brownian_ou(i: PathPoint, j: PathPoint, branch: str) -> MultiPoly:
    """a^{k_i} b^{k_j} times the Brownian branch formula at times a^2, b^2 (b = a q)."""
    a2 = _A * _A
    b = _A * _Q
    b2 = b * b
    if branch == "spacelike":
        F = three_term("z", i.eta, a2, a2) ** i.k
        G = three_term("w", j.eta, b2, b2) ** j.k
    else:
        # eta_j tau_j / tau_i = eta_j q^2 after the substitution
        F = three_term("z", j.eta * _Q * _Q, b2, a2) ** j.k
        G = three_term("w", i.eta, a2, a2) ** i.k
    return residue_pair(F, G)


def _ou_unified(hi: tuple, lo: tuple, scale: int) -> MultiPoly:
    """q^scale times the OU formula with the higher level on the z-contour.

    ``hi``/``lo`` are (eta, e^tau, k).  The kernel is q (q z - w)^-2, whose
    residue sum is sum_r r q^{-r} F[z^r] G[w^-r].
    """
    (eh, th, kh), (el, tl, kl) = hi, lo
    F = three_term("z", eh, th, 1) ** kh
    G = three_term("w", el, tl, 1) ** kl
    total = MultiPoly()
    for r, c in F.terms.items():
        if r >= 1:
            g = G.coeff(-r)
            if g:
                total = total + c * g * r * _Q ** (scale - r)
    return total


def ou_rescale_compare(i: PathPoint, j: PathPoint) -> bool:
    """Compare the OU-rescaled branch formula with the single OU formula.

    tau -> e^{2 tau} with prefactor e^{-tau_i k_i - tau_j k_j} is applied to
    whichever Brownian branch the ordering selects.  The result must equal
    the OU integral in which the higher-level point (eta_i in the space-like
    case, eta_j in the time-like case) sits on the larger z-contour with its
    own e^tau and k.  The check is an exact polynomial identity in the
    symbols a = e^{tau_i} and q = e^{tau_j - tau_i}.
    """
    if i.tau > j.tau:
        raise BranchError("ou_rescale_compare needs tau_i <= tau_j")
    b = _A * _Q
    scale = max(i.k, j.k)
    if i.eta >= j.eta:
        brownian = _brownian_ou(i, j, "spacelike")
        unified = _ou_unified((i.eta, _A, i.k), (j.eta, b, j.k), scale)
    else:
        brownian = _brownian_ou(i, j, "timelike")
        unified = _ou_unified((j.eta, b, j.k), (i.eta, _A, i.k), scale)
    # unified carries q^scale; brownian needs the same factor
    return brownian * _Q ** scale == unified * (_A ** i.k) * (b ** j.k)


def ou_branch_values(i: PathPoint, j: PathPoint) -> dict:
    """Both OU-rescaled branch formulas (as polynomials in a, q), whatever the ordering."""
    return {
        "spacelike": _brownian_ou(i, j, "spacelike"),
        "timelike": _brownian_ou(i, j, "timelike"),
        "prefactor": "a^-k_i (a q)^-k_j",
    }
