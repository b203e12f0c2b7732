"""The universal enveloping algebra U(gl_N) and the time-t state on it.

Elements are finite linear combinations of words in the generators
``E[i,j]`` (stored as tuples of ``(i, j)`` pairs) with ``MultiPoly``
coefficients.  Multiplication is free concatenation; ``normal_form`` applies
the commutation relation

    E_ij E_kl - E_kl E_ij = delta_jk E_il - delta_il E_kj

until every word is sorted in PBW order: strictly lower generators first,
then diagonal, then strictly upper, lexicographic within each class.  With
this order the Harish-Chandra projection is a filter on diagonal words.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Mapping

from ._parse import ParseError, parse_with
from .exactalg import MultiPoly

Gen = tuple  # (i, j)
Word = tuple  # tuple of Gen

DEFAULT_MAX_DEGREE = 12


class RankMismatch(ValueError):
    pass


class DegreeLimitError(ValueError):
    pass


def gen_key(g: Gen) -> tuple:
    i, j = g
    cls = 0 if i > j else (1 if i == j else 2)
    return (cls, i, j)


def is_sorted_word(w: Word) -> bool:
    return all(gen_key(a) <= gen_key(b) for a, b in zip(w, w[1:]))


def word_str(w: Word) -> str:
    return "".join(f"E[{i},{j}]" for i, j in w) if w else "1"


def _word_sort_key(w: Word):
    return (len(w), [gen_key(g) for g in w])


class NCElement:
    """Element of U(gl_N) in the free word representation."""

    __slots__ = ("rank", "_terms")

    def __init__(self, rank: int, terms: Mapping[Word, object] | None = None):
        self.rank = int(rank)
        self._terms = {}
        for w, c in (terms or {}).items():
            c = MultiPoly.coerce(c)
            if c:
                self._terms[tuple(w)] = c

    @classmethod
    def _raw(cls, rank, terms):
        obj = cls.__new__(cls)
        obj.rank = rank
        obj._terms = {w: c for w, c in terms.items() if c}
        return obj

    # -- constructors -------------------------------------------------------

    @classmethod
    def gen(cls, i: int, j: int, rank: int) -> "NCElement":
        if not (1 <= i <= rank and 1 <= j <= rank):
            raise ValueError(f"E[{i},{j}] is outside gl_{rank}")
        return cls(rank, {((i, j),): 1})

    @classmethod
    def one(cls, rank: int) -> "NCElement":
        return cls(rank, {(): 1})

    @classmethod
    def scalar(cls, c, rank: int) -> "NCElement":
        return cls(rank, {(): c})

    @classmethod
    def word(cls, w, rank: int, coeff=1) -> "NCElement":
        w = tuple(tuple(g) for g in w)
        for i, j in w:
            if not (1 <= i <= rank and 1 <= j <= rank):
                raise ValueError(f"E[{i},{j}] is outside gl_{rank}")
        return cls(rank, {w: coeff})

    @classmethod
    def parse(cls, text: str, rank: int) -> "NCElement":
        return parse_element(text, rank)

    # -- inspection ---------------------------------------------------------

    @property
    def terms(self) -> dict:
        return self._terms

    def __bool__(self):
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def degree(self) -> int:
        return max((len(w) for w in self._terms), default=-1)

    def coeff(self, w) -> MultiPoly:
        return self._terms.get(tuple(w), MultiPoly())

    def scalar_part(self) -> MultiPoly:
        return self.coeff(())

    def with_rank(self, rank: int) -> "NCElement":
        """Reinterpret under a different ambient rank (indices must fit)."""
        for w in self._terms:
            for i, j in w:
                if i > rank or j > rank:
                    raise ValueError(f"E[{i},{j}] does not fit in gl_{rank}")
        return NCElement._raw(rank, dict(self._terms))

    def map_coeffs(self, f) -> "NCElement":
        return NCElement(self.rank, {w: f(c) for w, c in self._terms.items()})

    def substitute(self, bindings) -> "NCElement":
        return self.map_coeffs(lambda c: c.substitute(bindings))

    # -- arithmetic ---------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, NCElement):
            if other.rank != self.rank:
                raise RankMismatch(f"rank {self.rank} vs rank {other.rank}")
            return other
        if isinstance(other, (int, Fraction, MultiPoly)):
            return NCElement.scalar(other, self.rank)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        out = dict(self._terms)
        for w, c in other._terms.items():
            out[w] = out[w] + c if w in out else c
        return NCElement._raw(self.rank, out)

    __radd__ = __add__

    def __neg__(self):
        return NCElement._raw(self.rank, {w: -c for w, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, MultiPoly)):
            return NCElement._raw(self.rank, {w: c * other for w, c in self._terms.items()})
        if not isinstance(other, NCElement):
            return NotImplemented
        return nc_mul(self, other)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, MultiPoly)):
            return NCElement._raw(self.rank, {w: other * c for w, c in self._terms.items()})
        return NotImplemented

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("element power needs a non-negative integer exponent")
        out = NCElement.one(self.rank)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, NCElement):
            return self.rank == other.rank and self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self == NCElement.scalar(other, self.rank)
        return NotImplemented

    __hash__ = None

    def normal_form(self) -> "NCElement":
        return normal_form(self)

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for w in sorted(self._terms, key=_word_sort_key):
            c = self._terms[w]
            cs = str(c)
            if not w:
                parts.append(cs if c.is_constant() else f"({cs})")
            elif c == 1:
                parts.append(word_str(w))
            elif c == -1:
                parts.append("-" + word_str(w))
            elif c.is_constant():
                parts.append(f"{cs}*{word_str(w)}")
            else:
                parts.append(f"({cs})*{word_str(w)}")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self):
        return f"NCElement(rank={self.rank}, {str(self)!r})"


def nc_mul(a: NCElement, b: NCElement) -> NCElement:
    """Free (concatenation) product, extended bilinearly; no normalization."""
    if a.rank != b.rank:
        raise RankMismatch(f"cannot multiply rank {a.rank} by rank {b.rank}")
    out: dict = {}
    for wa, ca in a._terms.items():
        for wb, cb in b._terms.items():
            w = wa + wb
            c = ca * cb
            out[w] = out[w] + c if w in out else c
    return NCElement._raw(a.rank, out)


# -- PBW normal ordering ---------------------------------------------------


def _bracket(x: Gen, g: Gen) -> list[tuple[Gen, int]]:
    """[E_ij, E_kl] = delta_jk E_il - delta_il E_kj as (generator, sign) pairs."""
    (i, j), (k, l) = x, g
    out = []
    if j == k:
        out.append(((i, l), 1))
    if i == l:
        out.append(((k, j), -1))
    return out


@lru_cache(maxsize=None)
def _insert(s: Word, g: Gen) -> dict:
    """Normal form of ``s * g`` where ``s`` is already PBW-sorted."""
    if not s or gen_key(s[-1]) <= gen_key(g):
        return {s + (g,): 1}
    head, x = s[:-1], s[-1]
    out: dict = {}
    # head * x * g = head * g * x + head * [x, g]
    for u, c in _insert(head, g).items():
        for v, d in _insert(u, x).items():
            out[v] = out.get(v, 0) + c * d
    for h, sign in _bracket(x, g):
        for v, d in _insert(head, h).items():
            out[v] = out.get(v, 0) + sign * d
    return {v: c for v, c in out.items() if c}


@lru_cache(maxsize=None)
def normal_form_word(w: Word) -> dict:
    """PBW normal form of a single word as ``{sorted_word: integer coefficient}``."""
    if is_sorted_word(w):
        return {w: 1}
    out: dict = {}
    for u, c in normal_form_word(w[:-1]).items():
        for v, d in _insert(u, w[-1]).items():
            out[v] = out.get(v, 0) + c * d
    return {v: c for v, c in out.items() if c}


def normal_form(x: NCElement) -> NCElement:
    """Rewrite every word of ``x`` into PBW order (unique normal form)."""
    acc: dict = {}
    for w, c in x._terms.items():
        for v, d in normal_form_word(w).items():
            acc.setdefault(v, []).append((c, d))
    out = {}
    for v, contribs in acc.items():
        total = MultiPoly()
        for c, d in contribs:
            total = total + c * d
        if total:
            out[v] = total
    return NCElement._raw(x.rank, out)


def commutator(a: NCElement, b: NCElement) -> NCElement:
    return normal_form(a * b - b * a)


def is_central(x: NCElement) -> bool:
    """True iff ``x`` commutes with every generator of gl_N."""
    x = normal_form(x)
    n = x.rank
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            g = NCElement.gen(i, j, n)
            if commutator(x, g):
                return False
    return True


# -- coproduct ---------------------------------------------------------------


def coproduct(m: Word) -> list[tuple[Word, Word]]:
    """All ``(E_S, E_{K minus S})`` pairs, each factor keeping the original letter order."""
    m = tuple(m)
    k = len(m)
    pairs = []
    for mask in range(1 << k):
        left = tuple(m[p] for p in range(k) if mask >> p & 1)
        right = tuple(m[p] for p in range(k) if not mask >> p & 1)
        pairs.append((left, right))
    return pairs


# -- set partitions and the state ------------------------------------------


def restricted_growth_strings(m: int) -> Iterator[tuple[int, ...]]:
    """Restricted growth strings of length ``m`` in lexicographic order."""
    if m == 0:
        yield ()
        return
    a = [0] * m

    def rec(pos, mx):
        if pos == m:
            yield tuple(a)
            return
        for v in range(mx + 2):
            a[pos] = v
            yield from rec(pos + 1, max(mx, v))

    a[0] = 0
    yield from rec(1, 0)


def set_partitions(m: int) -> Iterator[tuple[tuple[int, ...], ...]]:
    """Set partitions of {1..m}, blocks listed by their smallest element."""
    for rgs in restricted_growth_strings(m):
        blocks: dict = {}
        for pos, b in enumerate(rgs, start=1):
            blocks.setdefault(b, []).append(pos)
        yield tuple(tuple(blocks[b]) for b in sorted(blocks))


def _canonical(w: Word) -> Word:
    relabel: dict = {}
    out = []
    for i, j in w:
        i2 = relabel.setdefault(i, len(relabel) + 1)
        j2 = relabel.setdefault(j, len(relabel) + 1)
        out.append((i2, j2))
    return tuple(out)


@lru_cache(maxsize=None)
def _block_counts(w: Word) -> tuple[int, ...]:
    """``counts[b]`` = number of contributing partitions with ``b`` blocks.

    Walks restricted growth strings in lexicographic order, pruning as soon as
    a block's chain ``j_{b1}=i_{b2}, j_{b2}=i_{b3}, ...`` breaks; the cyclic
    closure ``j_{bk}=i_{b1}`` is checked once every position is placed.
    """
    m = len(w)
    counts = [0] * (m + 1)
    if m == 0:
        counts[0] = 1
        return tuple(counts)
    firsts: list = []  # row index of each block's first letter
    lasts: list = []   # column index of each block's last letter

    def rec(pos):
        if pos == m:
            if all(f == l for f, l in zip(firsts, lasts)):
                counts[len(firsts)] += 1
            return
        i, j = w[pos]
        for b in range(len(firsts)):
            if lasts[b] == i:
                prev = lasts[b]
                lasts[b] = j
                rec(pos + 1)
                lasts[b] = prev
        firsts.append(i)
        lasts.append(j)
        rec(pos + 1)
        firsts.pop()
        lasts.pop()

    rec(0)
    return tuple(counts)


def state_counts(w: Word, max_degree: int = DEFAULT_MAX_DEGREE) -> tuple[int, ...]:
    if len(w) > max_degree:
        raise DegreeLimitError(
            f"word of degree {len(w)} exceeds the set-partition degree limit {max_degree}"
        )
    return _block_counts(_canonical(tuple(w)))


class _TimePowers:
    def __init__(self, time):
        self.t = MultiPoly.coerce(time)
        self.powers = [MultiPoly.const(1)]
        self.cache: dict = {}

    def poly(self, counts: tuple[int, ...]) -> MultiPoly:
        p = self.cache.get(counts)
        if p is None:
            while len(self.powers) < len(counts):
                self.powers.append(self.powers[-1] * self.t)
            p = MultiPoly()
            for b, n in enumerate(counts):
                if n:
                    p = p + self.powers[b] * n
            self.cache[counts] = p
        return p


def state_word(w: Word, time, max_degree: int = DEFAULT_MAX_DEGREE) -> MultiPoly:
    return _TimePowers(time).poly(state_counts(w, max_degree))


def state(x: NCElement, time, max_degree: int = DEFAULT_MAX_DEGREE) -> MultiPoly:
    """The state <x>_t from the set-partition formula, as a polynomial in ``time``."""
    tp = _TimePowers(time)
    total = MultiPoly()
    for w, c in x._terms.items():
        total = total + c * tp.poly(state_counts(w, max_degree))
    return total


# -- the Markov operator P_t -------------------------------------------------


@lru_cache(maxsize=None)
def _pt_table(w: Word, max_degree: int) -> tuple:
    acc: dict = {}
    for left, right in coproduct(w):
        counts = state_counts(right, max_degree)
        prev = acc.get(left)
        if prev is None:
            acc[left] = counts
        else:
            n = max(len(prev), len(counts))
            a = prev + (0,) * (n - len(prev))
            b = counts + (0,) * (n - len(counts))
            acc[left] = tuple(p + q for p, q in zip(a, b))
    return tuple(acc.items())


def apply_pt(x: NCElement, time, max_degree: int = DEFAULT_MAX_DEGREE) -> NCElement:
    """P_t x = sum over subsets S of <E_{K minus S}>_t E_S, word by word; not normal-ordered."""
    tp = _TimePowers(time)
    out: dict = {}
    for w, c in x._terms.items():
        for left, counts in _pt_table(w, max_degree):
            term = c * tp.poly(counts)
            if left in out:
                out[left] = out[left] + term
            else:
                out[left] = term
    return NCElement._raw(x.rank, out)


# -- parsing -------------------------------------------------------------------


class _ElementBuilder:
    def __init__(self, rank):
        self.rank = rank

    def number(self, q):
        return NCElement.scalar(q, self.rank)

    def symbol(self, name):
        return NCElement.scalar(MultiPoly.symbol(name), self.rank)

    def generator(self, i, j):
        if not (1 <= i <= self.rank and 1 <= j <= self.rank):
            raise ParseError(f"E[{i},{j}] is outside gl_{self.rank}")
        return NCElement.gen(i, j, self.rank)

    def divide(self, num, den):
        terms = den.terms
        if set(terms) != {()} or not terms[()].is_constant():
            raise ParseError("can only divide by a nonzero rational constant")
        return num * (1 / terms[()].constant_term())


def parse_element(text: str, rank: int | None = None) -> NCElement:
    """Parse ``E[i,j]`` expressions; the rank defaults to the largest index used."""
    if rank is None:
        from ._parse import tokenize

        idx = [v for kind, val in tokenize(text) if kind == "gen" for v in val]
        rank = max(idx, default=1)
    return parse_with(text, _ElementBuilder(rank))
