"""Exact commutative polynomial arithmetic over the rationals.

``MultiPoly`` is a sparse multivariate polynomial with ``Fraction``
coefficients in named symbols; ``LaurentPoly`` is a Laurent polynomial in a
single variable whose coefficients are ``MultiPoly``.  Both are immutable
values with a canonical form, so ``==`` is structural equality.

Monomials are stored as sorted tuples of ``(symbol, exponent)`` pairs.  Terms
print in graded lexicographic order: higher total degree first, ties broken
by the lexicographically larger exponent vector over the sorted symbol names.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Iterable, Mapping

from ._parse import ParseError, parse_with

Monomial = tuple  # tuple[tuple[str, int], ...], sorted by symbol name

ONE_MONO: Monomial = ()


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot use {type(x).__name__} as an exact coefficient")


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    out = dict(a)
    for s, e in b:
        out[s] = out.get(s, 0) + e
    return tuple(sorted(out.items()))


def _mono_degree(m: Monomial) -> int:
    return sum(e for _, e in m)


class MultiPoly:
    """Multivariate polynomial with exact rational coefficients."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, Fraction] | None = None):
        # callers must pass canonical monomials; zero coefficients are dropped here
        self._terms = {m: c for m, c in (terms or {}).items() if c}
        self._hash = None

    # -- constructors -------------------------------------------------------

    @classmethod
    def const(cls, c) -> "MultiPoly":
        c = _as_fraction(c)
        return cls({ONE_MONO: c}) if c else cls()

    @classmethod
    def symbol(cls, name: str) -> "MultiPoly":
        return cls({((name, 1),): Fraction(1)})

    @classmethod
    def coerce(cls, x) -> "MultiPoly":
        if isinstance(x, MultiPoly):
            return x
        if isinstance(x, str):
            return parse_poly(x)
        return cls.const(x)

    @classmethod
    def parse(cls, text: str) -> "MultiPoly":
        return parse_poly(text)

    # -- inspection ---------------------------------------------------------

    @property
    def terms(self) -> dict:
        return self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(m == ONE_MONO for m in self._terms)

    def constant_term(self) -> Fraction:
        return self._terms.get(ONE_MONO, Fraction(0))

    def to_fraction(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"polynomial {self} is not constant")
        return self.constant_term()

    def symbols(self) -> set[str]:
        return {s for m in self._terms for s, _ in m}

    def degree(self) -> int:
        if not self._terms:
            return -1
        return max(_mono_degree(m) for m in self._terms)

    def degree_in(self, sym: str) -> int:
        if not self._terms:
            return -1
        return max(dict(m).get(sym, 0) for m in self._terms)

    def coeff_in(self, sym: str, d: int) -> "MultiPoly":
        """Coefficient of ``sym**d``, as a polynomial in the other symbols."""
        out = {}
        for m, c in self._terms.items():
            dm = dict(m)
            if dm.get(sym, 0) == d:
                dm.pop(sym, None)
                out[tuple(sorted(dm.items()))] = c
        return MultiPoly(out)

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other):
        other = _coerce_or_none(other)
        if other is None:
            return NotImplemented
        if not other._terms:
            return self
        out = dict(self._terms)
        for m, c in other._terms.items():
            out[m] = out.get(m, 0) + c
        return MultiPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly({m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        other = _coerce_or_none(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = _coerce_or_none(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return MultiPoly()
            return MultiPoly({m: c * other for m, c in self._terms.items()})
        other = _coerce_or_none(other)
        if other is None:
            return NotImplemented
        out: dict = {}
        for ma, ca in self._terms.items():
            for mb, cb in other._terms.items():
                m = _mono_mul(ma, mb)
                out[m] = out.get(m, 0) + ca * cb
        return MultiPoly(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, MultiPoly):
            if not other.is_constant() or other.is_zero():
                raise ZeroDivisionError("can only divide by a nonzero constant")
            other = other.constant_term()
        other = _as_fraction(other)
        if not other:
            raise ZeroDivisionError("division of polynomial by zero")
        return MultiPoly({m: c / other for m, c in self._terms.items()})

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError(f"polynomial power needs a non-negative integer exponent, got {k!r}")
        result = MultiPoly.const(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, MultiPoly):
            return self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self._terms == MultiPoly.const(other)._terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    # -- substitution / evaluation ------------------------------------------

    def substitute(self, bindings: Mapping[str, object]) -> "MultiPoly":
        """Replace symbols by polynomials (or numbers); unbound symbols stay."""
        binds = {s: MultiPoly.coerce(v) for s, v in bindings.items()}
        powers: dict = {}

        def power(s, e):
            key = (s, e)
            if key not in powers:
                powers[key] = binds[s] ** e
            return powers[key]

        out = MultiPoly()
        for m, c in self._terms.items():
            rest = []
            term = MultiPoly.const(c)
            for s, e in m:
                if s in binds:
                    term = term * power(s, e)
                else:
                    rest.append((s, e))
            if rest:
                term = term * MultiPoly({tuple(rest): Fraction(1)})
            out = out + term
        return out

    def evaluate(self, values: Mapping[str, object]) -> Fraction:
        total = Fraction(0)
        vals = {s: _as_fraction(v) for s, v in values.items()}
        for m, c in self._terms.items():
            term = c
            for s, e in m:
                if s not in vals:
                    raise KeyError(f"no value bound for symbol {s!r}")
                term *= vals[s] ** e
            total += term
        return total

    # -- rendering ----------------------------------------------------------

    def sorted_terms(self) -> list:
        def key(item):
            m, _ = item
            return (-_mono_degree(m), [(s, -e) for s, e in m])

        return sorted(self._terms.items(), key=key)

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for m, c in self.sorted_terms():
            mono = "*".join(s if e == 1 else f"{s}^{e}" for s, e in m)
            sign = "-" if c < 0 else "+"
            a = abs(c)
            if not mono:
                body = str(a)
            elif a == 1:
                body = mono
            else:
                body = f"{a}*{mono}"
            parts.append((sign, body))
        first_sign, first = parts[0]
        text = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            text += f" {sign} {body}"
        return text

    def __repr__(self) -> str:
        return f"MultiPoly({str(self)!r})"


def _coerce_or_none(x):
    if isinstance(x, MultiPoly):
        return x
    if isinstance(x, (int, Fraction)):
        return MultiPoly.const(x)
    return None


class _PolyBuilder:
    def number(self, q):
        return MultiPoly.const(q)

    def symbol(self, name):
        return MultiPoly.symbol(name)

    def generator(self, i, j):
        raise ParseError("generators E[i,j] are not allowed in a commutative polynomial")

    def divide(self, num, den):
        if not den.is_constant() or den.is_zero():
            raise ParseError("can only divide by a nonzero rational constant")
        return num / den


def parse_poly(text: str) -> MultiPoly:
    """Parse the canonical text form (also accepts any well-formed expression)."""
    return parse_with(text, _PolyBuilder())


# -- functional interface -----------------------------------------------


def poly_add(a: MultiPoly, b: MultiPoly) -> MultiPoly:
    return MultiPoly.coerce(a) + MultiPoly.coerce(b)


def poly_mul(a: MultiPoly, b: MultiPoly) -> MultiPoly:
    return MultiPoly.coerce(a) * MultiPoly.coerce(b)


def poly_pow(a: MultiPoly, k: int) -> MultiPoly:
    return MultiPoly.coerce(a) ** k


def substitute(p: MultiPoly, bindings: Mapping[str, object]) -> MultiPoly:
    return MultiPoly.coerce(p).substitute(bindings)


def leading_order_in(p: MultiPoly, sym: str) -> tuple[int, MultiPoly]:
    """Highest power of ``sym`` in ``p`` and its coefficient polynomial."""
    p = MultiPoly.coerce(p)
    if p.is_zero():
        raise ValueError("leading order of the zero polynomial is undefined")
    d = p.degree_in(sym)
    return d, p.coeff_in(sym, d)


# -- Laurent polynomials ---------------------------------------------------


class LaurentPoly:
    """Laurent polynomial in one variable with ``MultiPoly`` coefficients."""

    __slots__ = ("var", "_terms")

    def __init__(self, var: str, terms: Mapping[int, object] | None = None):
        self.var = var
        self._terms = {}
        for r, c in (terms or {}).items():
            c = MultiPoly.coerce(c)
            if c:
                self._terms[int(r)] = c

    @property
    def terms(self) -> dict:
        return self._terms

    def coeff(self, r: int) -> MultiPoly:
        return self._terms.get(r, MultiPoly())

    def exponents(self) -> list[int]:
        return sorted(self._terms)

    def _check(self, other: "LaurentPoly"):
        if self.var != other.var:
            raise ValueError(f"Laurent variables differ: {self.var} vs {other.var}")

    def __add__(self, other):
        if not isinstance(other, LaurentPoly):
            other = LaurentPoly(self.var, {0: other})
        self._check(other)
        out = dict(self._terms)
        for r, c in other._terms.items():
            out[r] = out[r] + c if r in out else c
        return LaurentPoly(self.var, out)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly(self.var, {r: -c for r, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, LaurentPoly):
            c = MultiPoly.coerce(other)
            return LaurentPoly(self.var, {r: v * c for r, v in self._terms.items()})
        self._check(other)
        out: dict = {}
        for ra, ca in self._terms.items():
            for rb, cb in other._terms.items():
                r = ra + rb
                prod = ca * cb
                out[r] = out[r] + prod if r in out else prod
        return LaurentPoly(self.var, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("Laurent power needs a non-negative integer exponent")
        result = LaurentPoly(self.var, {0: 1})
        for _ in range(k):
            result = result * self
        return result

    def __eq__(self, other):
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self.var == other.var and self._terms == other._terms

    def __str__(self):
        if not self._terms:
            return "0"
        return " + ".join(f"({c})*{self.var}^{r}" for r, c in sorted(self._terms.items()))

    __repr__ = __str__


def laurent_coeff(p: LaurentPoly, r: int) -> MultiPoly:
    return p.coeff(r)


def three_term(var: str, low, mid, high) -> LaurentPoly:
    """``low*var^-1 + mid + high*var``."""
    return LaurentPoly(var, {-1: low, 0: mid, 1: high})


# -- exact linear algebra helpers -----------------------------------------


def solve_linear(matrix: list[list[Fraction]], rhs: list) -> list:
    """Solve a square nonsingular rational system whose right-hand side may hold polynomials.

    Gauss-Jordan elimination; the row operations only ever scale by
    rationals, so polynomial right-hand sides stay exact.
    """
    n = len(matrix)
    a = [[Fraction(x) for x in row] for row in matrix]
    b = [MultiPoly.coerce(v) for v in rhs]
    if any(len(row) != n for row in a) or len(b) != n:
        raise ValueError("solve_linear needs a square system")
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular linear system")
        a[col], a[piv] = a[piv], a[col]
        b[col], b[piv] = b[piv], b[col]
        inv = 1 / a[col][col]
        a[col] = [x * inv for x in a[col]]
        b[col] = b[col] * inv
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
                b[r] = b[r] - b[col] * f
    return b


def interpolate(points: Iterable[tuple], var: str) -> MultiPoly:
    """Lagrange interpolation through ``(x_k, value_k)``; values may be polynomials."""
    pts = [(Fraction(x), MultiPoly.coerce(v)) for x, v in points]
    X = MultiPoly.symbol(var)
    result = MultiPoly()
    for k, (xk, vk) in enumerate(pts):
        basis = MultiPoly.const(1)
        denom = Fraction(1)
        for m, (xm, _) in enumerate(pts):
            if m != k:
                basis = basis * (X - xm)
                denom *= xk - xm
        result = result + vk * basis * (1 / denom)
    return result
