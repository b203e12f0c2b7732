"""Independent reference computations used to cross-check the main code paths.

* ``detform_n2``: the N = 2 single-level determinantal formula, summed exactly.
* ``state_diff_oracle``: the state of a word computed by differentiating
  exp(t Tr(U - Id)) with explicit matrix products instead of set partitions.
* ``ctmc_expectation``: exact expectation for the particle dynamics on a
  small array by uniformization, with a rigorous truncation bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .exactalg import MultiPoly
from .surface import InterlacedArray, ring, validate_schedule

MAX_ORACLE_DEGREE = 8
MAX_CTMC_RANK = 3


class OracleError(ValueError):
    pass


# -- N = 2 determinantal formula -------------------------------------------


def _inv_fact(n: int) -> Fraction:
    """1/n!, taken to be 0 for negative n."""
    return Fraction(0) if n < 0 else Fraction(1, math.factorial(n))


def detform_n2_exact(x: int, y: int, t, k: int, b_max: int) -> Fraction:
    """Ratio of the two truncated double sums over b = x..b_max, a = y..b.

    Every matrix entry is a reciprocal factorial; the lower-right entry is
    read as 1/(a-y)!.
    """
    t = Fraction(t)
    if x < y:
        raise OracleError("need x >= y")
    if b_max < x:
        raise OracleError("need b_max >= x")
    num = Fraction(0)
    den = Fraction(0)
    for b in range(x, b_max + 1):
        row0 = (_inv_fact(b - x), _inv_fact(b - (y - 1)))
        for a in range(y, b + 1):
            det = row0[0] * _inv_fact(a - y) - row0[1] * _inv_fact(a - 1 - x)
            if not det:
                continue
            w = (b - a + 1) * t ** (b + a) * det
            den += w
            num += (b ** k + (a - 1) ** k) * w
    if den == 0:
        raise ZeroDivisionError("determinantal formula: denominator is zero")
    return num / den


def detform_n2(x: int, y: int, t, k: int, b_max: int) -> float:
    return float(detform_n2_exact(x, y, t, k, b_max))


# -- differentiation-based state ---------------------------------------------


def _matmul(A, B, n):
    """Product of matrices whose entries are {bitmask: int} multilinear polynomials."""
    out = [[{} for _ in range(n)] for _ in range(n)]
    for i in range(n):
        for l in range(n):
            a = A[i][l]
            if not a:
                continue
            for j in range(n):
                b = B[l][j]
                if not b:
                    continue
                cell = out[i][j]
                for ma, ca in a.items():
                    for mb, cb in b.items():
                        if ma & mb:
                            continue
                        cell[ma | mb] = cell.get(ma | mb, 0) + ca * cb
    return out


def state_diff_oracle(word: Sequence, time="t", rank: int | None = None) -> MultiPoly:
    """Mixed partial d/dx_1 ... d/dx_m of exp(t Tr(prod_b (Id + x_b E_b) - Id)) at x = 0."""
    word = [(int(i), int(j)) for i, j in word]
    m = len(word)
    if m > MAX_ORACLE_DEGREE:
        raise OracleError(f"degree {m} exceeds oracle cap {MAX_ORACLE_DEGREE}")
    t = MultiPoly.coerce(time)
    if m == 0:
        return MultiPoly.const(1)
    n = rank or max(max(g) for g in word)
    M = [[({0: 1} if i == j else {}) for j in range(n)] for i in range(n)]
    for b, (i, j) in enumerate(word):
        F = [[({0: 1} if r == c else {}) for c in range(n)] for r in range(n)]
        F[i - 1][j - 1][1 << b] = F[i - 1][j - 1].get(1 << b, 0) + 1
        M = _matmul(M, F, n)
    Y: dict[int, int] = {}
    for i in range(n):
        for mask, c in M[i][i].items():
            if mask:
                Y[mask] = Y.get(mask, 0) + c
    # exp(tY) truncated at total degree m, keeping only square-free monomials
    full = (1 << m) - 1
    total = Fraction(0) * t
    power = {0: Fraction(1)}
    for p in range(1, m + 1):
        nxt: dict[int, Fraction] = {}
        for ma, ca in power.items():
            for mb, cb in Y.items():
                if ma & mb:
                    continue
                nxt[ma | mb] = nxt.get(ma | mb, 0) + ca * cb
        power = nxt
        c = power.get(full, 0)
        if c:
            total = total + t ** p * (Fraction(c) / math.factorial(p))
    return total


# -- uniformized CTMC ---------------------------------------------------------


@dataclass(frozen=True)
class CtmcResult:
    value: float
    error_bound: float
    max_events: int
    states: int

    def as_dict(self) -> dict:
        return {"value": self.value, "error_bound": self.error_bound,
                "max_events": self.max_events, "states": self.states}


def _poly_bound(poly: MultiPoly, R: float) -> float:
    """max |poly| over the box |x_i| <= R."""
    return sum(abs(float(c)) * R ** sum(e for _, e in mono) for mono, c in poly.terms.items())


def _eval_level(poly: MultiPoly, level: Sequence[int]) -> float:
    return float(poly.evaluate({f"x{m}": v for m, v in enumerate(level, start=1)}))


def _poisson_pmf(mu: float, n: int) -> float:
    if mu == 0:
        return 1.0 if n == 0 else 0.0
    return math.exp(-mu + n * math.log(mu) - math.lgamma(n + 1))


def _tail_bound(mu: float, R0: int, polys, n_max: int) -> float:
    """sum_{n > n_max} Pois(mu; n) g(n) with g(n) = prod_j bound_j(R0 + n).

    Each event moves every particle by at most one step, so after n events
    all positions lie in |x| <= R0 + n.  The ratio of consecutive terms is
    decreasing in n, so once it drops below 1/2 the rest is at most the
    last term.
    """
    if mu == 0:
        return 0.0
    g = lambda n: math.prod(_poly_bound(p, R0 + n) for p in polys)
    total = 0.0
    n = n_max + 1
    term = _poisson_pmf(mu, n) * g(n)
    while True:
        total += term
        nxt = _poisson_pmf(mu, n + 1) * g(n + 1)
        if term == 0 or (nxt <= term / 2 and mu / (n + 2) < 0.5):
            return total + nxt * 2
        term, n = nxt, n + 1


def ctmc_expectation(initial: InterlacedArray, schedule, observables, tol: float = 1e-6,
                     max_events_cap: int = 200) -> CtmcResult:
    """E[prod_j obs_j(level n_j at time t_j)] by uniformization on the reachable states.

    The chain is run at total rate M (one rate-1 clock per particle, a
    blocked ring being a self-loop) and paths are truncated once the total
    number of events exceeds ``max_events``, chosen as the smallest count
    whose tail bound is below ``tol``.
    """
    if initial.N > MAX_CTMC_RANK:
        raise OracleError(f"ctmc oracle supports N <= {MAX_CTMC_RANK}")
    sched = validate_schedule(schedule, initial.N)
    polys = [getattr(o, "poly", o) for o in observables]
    if len(polys) != len(sched):
        raise OracleError("need one observable per schedule point")
    N = initial.N
    M = N * (N + 1) // 2
    particles = [(n, i) for n in range(1, N + 1) for i in range(1, n + 1)]
    horizon = sched[-1][1]
    mu = M * horizon
    R0 = max(abs(v) for lvl in initial.levels for v in lvl)
    n_max = int(mu)
    while _tail_bound(mu, R0, polys, n_max) > tol:
        n_max += 1
        if n_max > max_events_cap:
            raise OracleError(f"truncation bound {tol} not achievable within {max_events_cap} events")
    bound = _tail_bound(mu, R0, polys, n_max)

    succ_cache: dict = {}

    def successors(s):
        out = succ_cache.get(s)
        if out is None:
            out = []
            for n, i in particles:
                lv = [list(l) for l in s]
                ring(lv, n, i)
                out.append(tuple(tuple(l) for l in lv))
            succ_cache[s] = out
        return out

    dist = {(initial.levels, 0): 1.0}
    prev_t = 0.0
    for (n_snap, t_snap), poly in zip(sched, polys):
        dt = t_snap - prev_t
        prev_t = t_snap
        if dt > 0:
            new: dict = {}
            cur = dist
            steps = 0
            while cur:
                w_n = _poisson_pmf(M * dt, steps)
                for key, w in cur.items():
                    new[key] = new.get(key, 0.0) + w_n * w
                nxt: dict = {}
                for (s, c), w in cur.items():
                    if c >= n_max:
                        continue
                    share = w / M
                    for s2 in successors(s):
                        k2 = (s2, c + 1)
                        nxt[k2] = nxt.get(k2, 0.0) + share
                cur = nxt
                steps += 1
            dist = new
        values: dict = {}
        for (s, c), w in dist.items():
            level = s[n_snap - 1]
            f = values.get(level)
            if f is None:
                f = values[level] = _eval_level(poly, level)
            dist[(s, c)] = w * f
    value = math.fsum(dist.values())
    return CtmcResult(value, bound, n_max, len(succ_cache))
