"""Continuous-time push/block dynamics on interlaced particle arrays.

Level n (1..N) holds n particles X^(n)_1 > ... > X^(n)_n with the
interlacing X^(n+1)_{i+1} < X^(n)_i <= X^(n+1)_i.  Every particle carries an
independent rate-1 exponential clock.  When X^(n)_i rings it tries to step
right; the move is suppressed if i >= 2 and the target equals X^(n-1)_{i-1}
(blocked by the particle below and to the right).  Otherwise it moves and
pushes X^(m)_i, m = n+1, n+2, ..., up to the moved position until no push is
needed.  Positions are the shifted coordinates x_i = lambda_i - i + 1.

Two engines are provided.  ``run`` keeps one next-ring time per particle in a
heap and is used for single trajectories and invariant checks.  The Monte
Carlo estimator uses ``simulate_batch``, which advances many replicas at
once with numpy by superposing the clocks: events arrive at total rate M (the
number of particles) and each picks a uniformly random particle.  Both
describe the same continuous-time chain.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .exactalg import MultiPoly

DEFAULT_SEED = 20260101
CHUNK = 1 << 16


class InterlacingError(RuntimeError):
    pass


@dataclass(frozen=True)
class InterlacedArray:
    levels: tuple  # levels[n-1] = (X^(n)_1, ..., X^(n)_n)

    def __post_init__(self):
        object.__setattr__(self, "levels", tuple(tuple(int(v) for v in lvl) for lvl in self.levels))
        check_interlacing(self.levels)

    @property
    def N(self) -> int:
        return len(self.levels)

    def level(self, n: int) -> tuple:
        return self.levels[n - 1]

    def as_array(self) -> np.ndarray:
        out = np.zeros((self.N, self.N), dtype=np.int64)
        for n, lvl in enumerate(self.levels):
            out[n, : len(lvl)] = lvl
        return out


def check_interlacing(levels: Sequence[Sequence[int]]) -> None:
    for n, lvl in enumerate(levels, start=1):
        if len(lvl) != n:
            raise InterlacingError(f"level {n} has {len(lvl)} particles, expected {n}")
        if any(a <= b for a, b in zip(lvl, lvl[1:])):
            raise InterlacingError(f"level {n} is not strictly decreasing: {lvl}")
    for n in range(1, len(levels)):
        lo, hi = levels[n - 1], levels[n]
        for i in range(n):
            if not (hi[i + 1] < lo[i] <= hi[i]):
                raise InterlacingError(
                    f"interlacing broken between levels {n} and {n + 1} at i={i + 1}: {lo} vs {hi}"
                )


def densely_packed(N: int) -> InterlacedArray:
    if N < 1:
        raise ValueError("N must be at least 1")
    return InterlacedArray(tuple(tuple(-i + 1 for i in range(1, n + 1)) for n in range(1, N + 1)))


def parse_schedule(text: str) -> list[tuple[int, float]]:
    """``"(2,1);(1,2)"`` -> [(2, 1.0), (1, 2.0)]."""
    out = []
    for chunk in text.split(";"):
        chunk = chunk.strip().strip("()")
        if not chunk:
            continue
        n, t = chunk.split(",")
        out.append((int(n), float(t)))
    return out


def validate_schedule(schedule, N: int) -> list[tuple[int, float]]:
    sched = [(int(n), float(t)) for n, t in schedule]
    if not sched:
        raise ValueError("schedule is empty")
    prev = 0.0
    for n, t in sched:
        if not 1 <= n <= N:
            raise ValueError(f"schedule level {n} outside 1..{N}")
        if t < prev:
            raise ValueError("schedule times must be non-negative and weakly increasing")
        prev = t
    return sched


def replica_rng(seed: int, stream: int) -> np.random.Generator:
    """Counter-based Philox stream keyed by (seed, stream index)."""
    key = np.array([seed & 0xFFFFFFFFFFFFFFFF, stream & 0xFFFFFFFFFFFFFFFF], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


# -- single-trajectory engine ----------------------------------------------------


def ring(levels: list[list[int]], n: int, i: int) -> bool:
    """Apply one clock ring of X^(n)_i in place; returns False if the jump was blocked."""
    lvl = levels[n - 1]
    target = lvl[i - 1] + 1
    if i >= 2 and target == levels[n - 2][i - 2]:
        return False
    lvl[i - 1] = target
    m = n + 1
    while m <= len(levels) and levels[m - 1][i - 1] < levels[m - 2][i - 1]:
        levels[m - 1][i - 1] = levels[m - 2][i - 1]
        m += 1
    return True


def run(initial: InterlacedArray, schedule, seed: int = DEFAULT_SEED, replica: int = 0,
        check: bool = False, trace: list | None = None) -> list[tuple]:
    """Simulate one trajectory and return the requested level at each scheduled time.

    With ``check=True`` interlacing is verified after every event.  If
    ``trace`` is a list, ``(time, n, i, moved)`` is appended per event.
    """
    sched = validate_schedule(schedule, initial.N)
    rng = replica_rng(seed, replica)
    levels = [list(lvl) for lvl in initial.levels]
    heap = [(rng.exponential(), n, i) for n in range(1, initial.N + 1) for i in range(1, n + 1)]
    heapq.heapify(heap)
    out = []
    for n_snap, t_snap in sched:
        while heap[0][0] <= t_snap:
            t, n, i = heapq.heappop(heap)
            moved = ring(levels, n, i)
            if check:
                check_interlacing(levels)
            if trace is not None:
                trace.append((t, n, i, moved))
            # a blocked ring still consumes the clock
            heapq.heappush(heap, (t + rng.exponential(), n, i))
        out.append(tuple(levels[n_snap - 1]))
    return out


# -- batched engine ----------------------------------------------------------


def _apply_events(X: np.ndarray, rows: np.ndarray, pn: np.ndarray, pi: np.ndarray) -> None:
    """Vectorised ring of particle (pn, pi) (0-based) in replicas ``rows``."""
    N = X.shape[1]
    cur = X[rows, pn, pi]
    has_below = pi >= 1
    below = X[rows, np.maximum(pn - 1, 0), np.maximum(pi - 1, 0)]
    blocked = has_below & (cur + 1 == below)
    move = ~blocked
    r, lvl, ii = rows[move], pn[move], pi[move]
    X[r, lvl, ii] += 1
    while r.size:
        nxt = lvl + 1
        keep = nxt < N
        r, lvl, ii, nxt = r[keep], lvl[keep], ii[keep], nxt[keep]
        if not r.size:
            break
        src = X[r, lvl, ii]
        push = X[r, nxt, ii] < src
        r, ii, nxt, src = r[push], ii[push], nxt[push], src[push]
        X[r, nxt, ii] = src
        lvl = nxt


def simulate_batch(initial: InterlacedArray, schedule, replicas: int, seed: int = DEFAULT_SEED,
                   chunk: int = CHUNK) -> list[np.ndarray]:
    """Snapshots for many replicas: element j has shape (replicas, n_j)."""
    sched = validate_schedule(schedule, initial.N)
    N = initial.N
    M = N * (N + 1) // 2
    pn = np.array([n for n in range(N) for _ in range(n + 1)], dtype=np.int64)
    pi = np.array([i for n in range(N) for i in range(n + 1)], dtype=np.int64)
    base = initial.as_array()
    snaps = [np.empty((replicas, n), dtype=np.int64) for n, _ in sched]
    for c, start in enumerate(range(0, replicas, chunk)):
        size = min(chunk, replicas - start)
        rng = replica_rng(seed, c)
        X = np.broadcast_to(base, (size, N, N)).copy()
        next_t = rng.exponential(1.0 / M, size)
        for j, (n_snap, t_snap) in enumerate(sched):
            rows = np.flatnonzero(next_t <= t_snap)
            while rows.size:
                p = rng.integers(0, M, rows.size)
                _apply_events(X, rows, pn[p], pi[p])
                next_t[rows] += rng.exponential(1.0 / M, rows.size)
                rows = rows[next_t[rows] <= t_snap]
            snaps[j][start:start + size] = X[:, n_snap - 1, :n_snap]
    return snaps


# -- Monte Carlo ---------------------------------------------------------------


@dataclass(frozen=True)
class McResult:
    mean: float
    stderr: float
    replicas: int
    seed: int

    def as_dict(self) -> dict:
        return {"mean": self.mean, "stderr": self.stderr, "replicas": self.replicas, "seed": self.seed}


def _poly_of(obs) -> MultiPoly:
    return getattr(obs, "poly", obs)


def evaluate_observable(obs, positions: np.ndarray) -> np.ndarray:
    """Evaluate a polynomial in x1..xn row-wise on integer positions of shape (R, n)."""
    poly = _poly_of(obs)
    n = positions.shape[1]
    names = {f"x{m}": m - 1 for m in range(1, n + 1)}
    cols = positions.astype(np.float64)
    out = np.zeros(positions.shape[0], dtype=np.float64)
    for mono, c in poly.terms.items():
        term = np.full(positions.shape[0], float(c))
        for s, e in mono:
            if s not in names:
                raise ValueError(f"observable uses {s!r}, not a coordinate of a level with {n} particles")
            term = term * cols[:, names[s]] ** e
        out += term
    return out


def power_sum_obs(k: int, n: int) -> MultiPoly:
    return sum((MultiPoly.symbol(f"x{m}") ** k for m in range(1, n + 1)), MultiPoly())


def parse_observable(text: str, n: int) -> MultiPoly:
    """``p2`` is the power sum of squares at a level with n particles; anything else parses as a polynomial in x1..xn."""
    text = text.strip()
    if text.startswith("p") and text[1:].isdigit():
        return power_sum_obs(int(text[1:]), n)
    return MultiPoly.parse(text)


def mc_expectation(initial: InterlacedArray, schedule, observables, replicas: int,
                   seed: int = DEFAULT_SEED) -> McResult:
    """Mean and standard error of prod_j obs_j(snapshot_j) over independent replicas."""
    if replicas < 1:
        raise ValueError("replicas must be >= 1")
    sched = validate_schedule(schedule, initial.N)
    if len(observables) != len(sched):
        raise ValueError("need one observable per schedule point")
    snaps = simulate_batch(initial, sched, replicas, seed)
    values = np.ones(replicas, dtype=np.float64)
    for obs, snap in zip(observables, snaps):
        values *= evaluate_observable(obs, snap)
    mean = math.fsum(values) / replicas
    if replicas > 1:
        var = math.fsum((values - mean) ** 2) / (replicas - 1)
        stderr = math.sqrt(var / replicas)
    else:
        stderr = float("nan")
    return McResult(mean, stderr, replicas, seed)
