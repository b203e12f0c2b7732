"""Central elements Psi_k, the Harish-Chandra projection and Psi-basis expansions.

Psi_k^{(N)} is the sum over m = 1..N of E(pi) over closed walks pi of length
k at vertex m in the complete digraph with loops on {1..m}.  Each edge
(i, j), i != j, is labelled E_ij, each loop (i, i) is labelled E_ii - m + 1,
and the product is weighted by the time of first return to m.

The Harish-Chandra image is written in shifted variables ``x1..xN`` with
x_m = lambda_m - m + 1, so Psi_k maps to the power sum x_1^k + ... + x_N^k.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Sequence

from .exactalg import MultiPoly, interpolate, solve_linear
from .ugln import NCElement, apply_pt, gen_key, is_central, normal_form

Partition = tuple  # weakly decreasing positive ints; () is the constant


class NotCentralError(ValueError):
    pass


class ConsistencyError(RuntimeError):
    """An internal identity that must hold (symmetry, reconstruction) failed."""


class InterpolationError(RuntimeError):
    pass


def xvar(m: int) -> str:
    return f"x{m}"


# -- paths ---------------------------------------------------------------------


def enum_paths(m: int, k: int) -> list[tuple[int, ...]]:
    """All closed walks of length k at vertex m on {1..m} (loops allowed)."""
    if m < 1 or k < 1:
        raise ValueError("enum_paths needs m >= 1 and k >= 1")
    return [(m, *mid, m) for mid in itertools.product(range(1, m + 1), repeat=k - 1)]


def first_return(path: Sequence[int]) -> int:
    start = path[0]
    return next(i for i in range(1, len(path)) if path[i] == start)


def e_of_path(path: Sequence[int], m: int, rank: int | None = None) -> NCElement:
    rank = m if rank is None else rank
    if path[0] != m or path[-1] != m or len(path) < 2:
        raise ValueError(f"{path} is not a closed walk at vertex {m}")
    out = NCElement.scalar(first_return(path), rank)
    for a, b in zip(path, path[1:]):
        label = NCElement.gen(a, b, rank)
        if a == b:
            label = label - (m - 1)
        out = out * label
    return out


@lru_cache(maxsize=None)
def psi(k: int, N: int) -> NCElement:
    """The central element Psi_k in U(gl_N)."""
    if k < 1 or N < 1:
        raise ValueError("psi needs k >= 1 and N >= 1")
    total = NCElement(N)
    for m in range(1, N + 1):
        for p in enum_paths(m, k):
            total = total + e_of_path(p, m, rank=N)
    return total


def psi_sub(k: int, M: int, N: int) -> NCElement:
    """Psi_k^{(M)} seen inside U(gl_N) through the inclusion gl_M -> gl_N."""
    if M > N:
        raise ValueError(f"cannot embed gl_{M} into gl_{N}")
    return psi(k, M).with_rank(N)


def psi_product(rho: Partition, N: int, level: int | None = None) -> NCElement:
    """Psi_rho = prod Psi_{rho_i} at the given level, embedded at rank N."""
    level = N if level is None else level
    out = NCElement.one(N)
    for part in rho:
        out = out * psi_sub(part, level, N)
    return out


# -- shifted symmetric polynomials -------------------------------------------


@dataclass(frozen=True)
class ShiftedSymPoly:
    rank: int
    poly: MultiPoly

    @property
    def xvars(self) -> list[str]:
        return [xvar(m) for m in range(1, self.rank + 1)]

    def is_symmetric(self) -> bool:
        names = self.xvars
        for a, b in zip(names, names[1:]):
            swapped = self.poly.substitute({a: MultiPoly.symbol(b), b: MultiPoly.symbol(a)})
            if swapped != self.poly:
                return False
        return True

    def evaluate(self, xs: Sequence) -> MultiPoly:
        if len(xs) != self.rank:
            raise ValueError(f"expected {self.rank} shifted coordinates, got {len(xs)}")
        return self.poly.substitute(dict(zip(self.xvars, xs)))

    def x_degree(self) -> int:
        return max((sum(e for s, e in m if s in set(self.xvars)) for m in self.poly.terms), default=-1)

    def __str__(self):
        return str(self.poly)


def power_sum(k: int, N: int) -> MultiPoly:
    if k == 0:
        return MultiPoly.const(N)
    return sum((MultiPoly.symbol(xvar(m)) ** k for m in range(1, N + 1)), MultiPoly())


def power_sum_product(rho: Partition, N: int) -> MultiPoly:
    out = MultiPoly.const(1)
    for part in rho:
        out = out * power_sum(part, N)
    return out


def _diag_word_poly(w) -> MultiPoly:
    out = MultiPoly.const(1)
    for m, _ in w:
        out = out * (MultiPoly.symbol(xvar(m)) + (m - 1))
    return out


def harish_chandra(x: NCElement, check_central: bool = True) -> ShiftedSymPoly:
    """Project onto U(h) along n_- U + U n_+ and rewrite in shifted variables.

    The element is PBW normal-ordered (lower < diagonal < upper) and only
    purely diagonal words survive; E_mm becomes lambda_m = x_m + m - 1.
    """
    if check_central and not is_central(x):
        raise NotCentralError("Harish-Chandra projection needs a central element")
    nf = normal_form(x)
    poly = MultiPoly()
    for w, c in nf.terms.items():
        if all(i == j for i, j in w):
            poly = poly + c * _diag_word_poly(w)
    image = ShiftedSymPoly(x.rank, poly)
    if not image.is_symmetric():
        raise ConsistencyError(f"Harish-Chandra image is not symmetric: {poly}")
    return image


@lru_cache(maxsize=None)
def _highest_weight_value(w) -> MultiPoly:
    """<v*, w v> for the highest weight vector v, as a polynomial in x1..xN.

    Upper generators kill v, lower generators kill v* from the left; a lower
    generator at the right end is commuted leftwards, which only leaves
    bracket terms of smaller degree.  This agrees with the diagonal part of
    the PBW normal form without computing the whole normal form.
    """
    if not w:
        return MultiPoly.const(1)
    i, j = w[-1]
    if i < j or (w[0][0] > w[0][1]):
        return MultiPoly()
    if i == j:
        return _highest_weight_value(w[:-1]) * (MultiPoly.symbol(xvar(i)) + (i - 1))
    g = w[-1]
    u = w[:-1]
    out = MultiPoly()
    for p, y in enumerate(u):
        (a, b), (k, l) = y, g
        if b == k:
            out = out + _highest_weight_value(u[:p] + ((a, l),) + u[p + 1:])
        if a == l:
            out = out - _highest_weight_value(u[:p] + ((k, b),) + u[p + 1:])
    return out


def hc_project(x: NCElement) -> ShiftedSymPoly:
    """Harish-Chandra projection via highest-weight matrix coefficients (no centrality check)."""
    poly = MultiPoly()
    for w, c in x.terms.items():
        v = _highest_weight_value(w)
        if v:
            poly = poly + c * v
    return ShiftedSymPoly(x.rank, poly)


def evaluate_at(x: NCElement, lam: Sequence[int], check_central: bool = True):
    """Scalar by which a central element acts on the irreducible module of highest weight lam."""
    if len(lam) != x.rank:
        raise ValueError(f"highest weight must have length {x.rank}")
    image = harish_chandra(x, check_central=check_central)
    value = image.evaluate([l - m + 1 for m, l in enumerate(lam, start=1)])
    return value.constant_term() if value.is_constant() else value


# -- power-sum decomposition --------------------------------------------------


def partitions(n: int, max_part: int | None = None) -> list[Partition]:
    max_part = n if max_part is None else max_part
    if n == 0:
        return [()]
    out = []
    for first in range(min(n, max_part), 0, -1):
        for rest in partitions(n - first, first):
            out.append((first,) + rest)
    return out


def weight(rho: Partition) -> int:
    return sum(rho) + len(rho)


def _split_x(poly: MultiPoly, N: int) -> dict:
    """Map x-exponent vectors to their coefficient polynomials in the remaining symbols."""
    names = {xvar(m): m for m in range(1, N + 1)}
    out: dict = {}
    for mono, c in poly.terms.items():
        ex = [0] * N
        rest = []
        for s, e in mono:
            if s in names:
                ex[names[s] - 1] = e
            else:
                rest.append((s, e))
        key = tuple(ex)
        out[key] = out.get(key, MultiPoly()) + MultiPoly({tuple(rest): c})
    return out


def powersum_decompose(p: ShiftedSymPoly) -> dict:
    """Coefficients c_rho with p = sum_rho c_rho prod_i p_{rho_i}(x); needs degree <= rank."""
    N = p.rank
    split = _split_x(p.poly, N)
    deg = max((sum(k) for k in split), default=0)
    if deg > N:
        raise ValueError(f"degree {deg} exceeds rank {N}: power sums are not independent")
    result: dict = {}
    for d in range(deg + 1):
        rhos = partitions(d)
        mus = [tuple(list(mu) + [0] * (N - len(mu))) for mu in rhos]
        matrix = []
        for mu in mus:
            row = []
            for rho in rhos:
                row.append(power_sum_product(rho, N).terms.get(_mono_for(mu), Fraction(0)))
            matrix.append(row)
        rhs = [split.get(mu, MultiPoly()) for mu in mus]
        for rho, c in zip(rhos, solve_linear(matrix, rhs)):
            if c:
                result[rho] = c
    if reconstruct(result, N) != p.poly:
        raise ConsistencyError("input is not symmetric: power-sum reconstruction failed")
    return result


def _mono_for(exps: Sequence[int]):
    return tuple(sorted((xvar(m), e) for m, e in enumerate(exps, start=1) if e))


def reconstruct(expansion: Mapping[Partition, MultiPoly], N: int) -> MultiPoly:
    out = MultiPoly()
    for rho, c in expansion.items():
        out = out + c * power_sum_product(rho, N)
    return out


def psi_expansion_element(expansion: Mapping[Partition, object], N: int) -> NCElement:
    """sum_rho c_rho Psi_rho as an element of U(gl_N)."""
    out = NCElement(N)
    for rho, c in expansion.items():
        out = out + psi_product(rho, N) * MultiPoly.coerce(c)
    return out


# -- Gelfand-Tsetlin subalgebra ------------------------------------------------


def gt_basis(levels: Sequence[int], max_degree: int, rank: int) -> list[tuple]:
    """Monomials prod_n Psi_{rho^(n)}^{(n)} with parts <= n and total degree <= max_degree."""
    levels = sorted(set(levels), reverse=True)
    per_level = []
    for n in levels:
        opts = [rho for d in range(max_degree + 1) for rho in partitions(d, max_part=n)]
        per_level.append(opts)
    basis = []
    for combo in itertools.product(*per_level):
        if sum(sum(r) for r in combo) <= max_degree:
            basis.append(tuple(zip(levels, combo)))
    return basis


def gt_element(key: tuple, rank: int) -> NCElement:
    out = NCElement.one(rank)
    for level, rho in key:
        out = out * psi_product(rho, rank, level=level)
    return out


def gt_decompose(x: NCElement, levels: Sequence[int]) -> dict:
    """Write x as a combination of products of Psi's from Z(gl_n), n in levels.

    Both sides are compared in PBW normal form; raises if x is not in the
    span of the candidate monomials.
    """
    rank = x.rank
    target = normal_form(x)
    keys = gt_basis(levels, max(target.degree(), 0), rank)
    cols = [normal_form(gt_element(k, rank)).terms for k in keys]
    words = sorted({w for col in cols for w in col} | set(target.terms),
                   key=lambda w: (len(w), [gen_key(g) for g in w]))
    rows = [[col.get(w, MultiPoly()).to_fraction() for col in cols] for w in words]
    rhs = [target.terms.get(w, MultiPoly()) for w in words]
    coeffs = _solve_consistent(rows, rhs)
    out = {k: c for k, c in zip(keys, coeffs) if c}
    check = NCElement(rank)
    for k, c in out.items():
        check = check + gt_element(k, rank) * c
    if normal_form(check) != target:
        raise ConsistencyError("element is not in the Gelfand-Tsetlin span of the given levels")
    return out


def _solve_consistent(rows: list[list[Fraction]], rhs: list[MultiPoly]) -> list[MultiPoly]:
    """Solve an overdetermined but consistent system with independent columns."""
    n_cols = len(rows[0]) if rows else 0
    a = [list(r) for r in rows]
    b = list(rhs)
    pivot_rows = []
    r = 0
    for col in range(n_cols):
        piv = next((i for i in range(r, len(a)) if a[i][col] != 0), None)
        if piv is None:
            raise ConsistencyError("basis elements are linearly dependent")
        a[r], a[piv] = a[piv], a[r]
        b[r], b[piv] = b[piv], b[r]
        inv = 1 / a[r][col]
        a[r] = [v * inv for v in a[r]]
        b[r] = b[r] * inv
        for i in range(len(a)):
            if i != r and a[i][col] != 0:
                f = a[i][col]
                a[i] = [u - f * v for u, v in zip(a[i], a[r])]
                b[i] = b[i] - b[r] * f
        pivot_rows.append(r)
        r += 1
    if any(b[i] for i in range(r, len(a))):
        raise ConsistencyError("element is not in the span of the basis")
    return [b[i] for i in pivot_rows]


def evaluate_levels(x: NCElement, weights: Mapping[int, Sequence[int]]):
    """Evaluate an element of the Gelfand-Tsetlin algebra at highest weights lambda^(n), one per level."""
    expansion = gt_decompose(x, list(weights))
    shifted = {n: [l - m + 1 for m, l in enumerate(lam, start=1)] for n, lam in weights.items()}
    total = MultiPoly()
    for key, c in expansion.items():
        term = MultiPoly.coerce(c)
        for level, rho in key:
            term = term * power_sum_product(rho, level).substitute(
                {xvar(m): v for m, v in enumerate(shifted[level], start=1)})
        total = total + term
    return total.constant_term() if total.is_constant() else total


# -- P_t expansions and asymptotics -----------------------------------------


def pt_expand(k: int, N: int, time="t") -> dict:
    """P_t Psi_k at rank N expanded in products of Psi's (needs k <= N)."""
    image = hc_project(apply_pt(psi(k, N), MultiPoly.coerce(time)))
    return powersum_decompose(image)


def asymptotic_coeffs_of(rho: Partition, depth: int | None = None) -> dict:
    """Leading coefficients c'_{rho,sigma}(tau, eta) of P_{tau L} Psi_rho with N = eta L.

    P_t Psi_rho is computed exactly for several ranks N, decomposed in the
    power-sum basis, each coefficient is interpolated as a polynomial in N
    (with one extra rank as a degree witness), and then t = tau L, N = eta L
    is substituted.  The coefficient of Psi_sigma is returned at order
    L^{wt(rho) - wt(sigma)}.
    """
    rho = tuple(sorted(rho, reverse=True))
    w = weight(rho)
    samples = w + 1 if depth is None else depth
    if samples < w + 1:
        raise InterpolationError(f"need at least {w + 1} samples for degree {w} in N")
    Ns = list(range(sum(rho) + 1, sum(rho) + 1 + samples + 1))
    t = MultiPoly.symbol("t")
    per_rank = []
    for N in Ns:
        image = hc_project(apply_pt(psi_product(rho, N), t))
        per_rank.append(powersum_decompose(image))
    sigmas = sorted({s for e in per_rank for s in e}, key=lambda s: (-weight(s), s))
    result = {}
    L, tau, eta = (MultiPoly.symbol(s) for s in ("L", "tau", "eta"))
    for sigma in sigmas:
        vals = [e.get(sigma, MultiPoly()) for e in per_rank]
        poly_n = interpolate(zip(Ns[:-1], vals[:-1]), "N")
        if poly_n.substitute({"N": Ns[-1]}) != vals[-1]:
            raise InterpolationError(f"coefficient of Psi_{sigma} is not of the assumed degree in N; raise depth")
        scaled = poly_n.substitute({"t": tau * L, "N": eta * L})
        order = w - weight(sigma)
        if scaled.degree_in("L") > order:
            raise ConsistencyError(f"coefficient of Psi_{sigma} grows faster than L^{order}")
        c = scaled.coeff_in("L", order)
        if c:
            result[sigma] = c
    return result


def asymptotic_coeffs(k: int, depth: int | None = None) -> dict:
    if k < 1:
        raise ValueError("k must be positive")
    return asymptotic_coeffs_of((k,), depth)
