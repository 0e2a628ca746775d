"""Exact sparse multivariate polynomials over the rationals.

A polynomial in ``nvars`` variables u1..u_nvars is stored as a dict mapping
exponent tuples to nonzero rational coefficients.  Coefficients are Python
ints when integral and :class:`fractions.Fraction` otherwise, so equality of
two polynomials is plain dict equality.

    u1^2*u2 - 3/2  ->  {(2, 1): 1, (0, 0): Fraction(-3, 2)}
"""

from __future__ import annotations

import heapq
from fractions import Fraction
from itertools import combinations
from math import lcm
from typing import Iterable, Mapping, Sequence

Exponent = tuple[int, ...]


class UsageError(ValueError):
    """Raised when an operation is called outside its domain."""


class NotDivisible(ArithmeticError):
    """Raised by :func:`divexact` when the divisor does not divide exactly."""


def _norm(c):
    if isinstance(c, Fraction) and c.denominator == 1:
        return c.numerator
    return c


def _grlex_key(e: Exponent):
    return (sum(e), e)


class Poly:
    """Immutable sparse polynomial with exact rational coefficients."""

    __slots__ = ("nvars", "terms", "_hash")

    def __init__(self, nvars: int, terms: Mapping[Exponent, object] | None = None):
        self.nvars = nvars
        clean = {}
        if terms:
            for e, c in terms.items():
                e = tuple(e)
                if len(e) != nvars:
                    raise UsageError(f"exponent {e} has wrong length for {nvars} variables")
                if isinstance(c, float):
                    raise TypeError("float coefficients are not allowed")
                c = _norm(Fraction(c)) if not isinstance(c, int) else c
                if c:
                    clean[e] = clean.get(e, 0) + c
                    if not clean[e]:
                        del clean[e]
        self.terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, nvars: int, terms: dict) -> "Poly":
        # terms must already be canonical
        p = object.__new__(cls)
        p.nvars = nvars
        p.terms = terms
        p._hash = None
        return p

    # constructors

    @classmethod
    def zero(cls, nvars: int) -> "Poly":
        return cls._raw(nvars, {})

    @classmethod
    def const(cls, nvars: int, c) -> "Poly":
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def var(cls, nvars: int, j: int) -> "Poly":
        """The variable u_j, 1-based."""
        if not 1 <= j <= nvars:
            raise UsageError(f"variable index {j} out of range 1..{nvars}")
        e = [0] * nvars
        e[j - 1] = 1
        return cls._raw(nvars, {tuple(e): 1})

    @classmethod
    def monomial(cls, exps: Sequence[int], c=1) -> "Poly":
        return cls(len(exps), {tuple(exps): c})

    @classmethod
    def variables(cls, nvars: int) -> list["Poly"]:
        return [cls.var(nvars, j) for j in range(1, nvars + 1)]

    # basic queries

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self.terms), default=-1)

    def is_homogeneous(self) -> bool:
        return len({sum(e) for e in self.terms}) <= 1

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_value(self):
        """The coefficient of the empty monomial."""
        return self.terms.get((0,) * self.nvars, 0)

    def coefficient(self, exps: Sequence[int]):
        return self.terms.get(tuple(exps), 0)

    def leading(self) -> tuple[Exponent, object]:
        if not self.terms:
            raise UsageError("zero polynomial has no leading term")
        e = max(self.terms, key=_grlex_key)
        return e, self.terms[e]

    def sorted_terms(self) -> list[tuple[Exponent, object]]:
        """Terms in graded-lex order, highest first."""
        return sorted(self.terms.items(), key=lambda kv: _grlex_key(kv[0]), reverse=True)

    def content_scale(self) -> int:
        """Smallest positive integer making every coefficient integral."""
        return lcm(1, *(Fraction(c).denominator for c in self.terms.values()))

    # ring operations

    def _check(self, other: "Poly"):
        if not isinstance(other, Poly):
            return Poly.const(self.nvars, other)
        if other.nvars != self.nvars:
            raise UsageError(f"nvars mismatch: {self.nvars} vs {other.nvars}")
        return other

    def __add__(self, other) -> "Poly":
        other = self._check(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = out.get(e, 0) + c
            if v:
                out[e] = _norm(v)
            else:
                out.pop(e, None)
        return Poly._raw(self.nvars, out)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly._raw(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other) -> "Poly":
        return self + (-self._check(other))

    def __rsub__(self, other) -> "Poly":
        return self._check(other) - self

    def __mul__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            c = _norm(Fraction(other)) if not isinstance(other, int) else other
            if not c:
                return Poly.zero(self.nvars)
            return Poly._raw(self.nvars, {e: _norm(v * c) for e, v in self.terms.items()})
        other = self._check(other)
        out: dict = {}
        get = out.get
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = get(e, 0) + c1 * c2
        return Poly._raw(self.nvars, {e: _norm(c) for e, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Poly":
        if k < 0:
            raise UsageError("negative power")
        result = Poly.const(self.nvars, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def scale(self, c) -> "Poly":
        return self * c

    def __truediv__(self, c) -> "Poly":
        if isinstance(c, Poly):
            return divexact(self, c)
        c = Fraction(c)
        if not c:
            raise ZeroDivisionError("division by zero")
        return self * (1 / c)

    def __eq__(self, other) -> bool:
        if isinstance(other, Poly):
            return self.nvars == other.nvars and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self.terms == ({(0,) * self.nvars: other} if other else {})
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self.terms.items())))
        return self._hash

    # calculus and substitution

    def diff(self, j: int) -> "Poly":
        return partial_derivative(self, j)

    def __call__(self, *point):
        if len(point) == 1 and isinstance(point[0], (list, tuple)):
            point = point[0]
        return evaluate_exact(self, point)

    def subs(self, images: Sequence["Poly"]) -> "Poly":
        """Compose: replace u_j by ``images[j-1]`` (all in a common ring)."""
        if len(images) != self.nvars:
            raise UsageError(f"need {self.nvars} images, got {len(images)}")
        if not images:
            return self
        target = images[0].nvars
        # cache powers of each image
        powers: list[dict[int, Poly]] = [{0: Poly.const(target, 1), 1: img} for img in images]

        def power(i, k):
            cache = powers[i]
            if k not in cache:
                cache[k] = power(i, k - 1) * images[i]
            return cache[k]

        out = Poly.zero(target)
        for e, c in self.terms.items():
            term = Poly.const(target, c)
            for i, k in enumerate(e):
                if k:
                    term = term * power(i, k)
            out = out + term
        return out

    def swap(self, i: int, j: int) -> "Poly":
        """Exchange variables u_i and u_j (1-based)."""
        def sw(e):
            e = list(e)
            e[i - 1], e[j - 1] = e[j - 1], e[i - 1]
            return tuple(e)
        return Poly._raw(self.nvars, {sw(e): c for e, c in self.terms.items()})

    def embed(self, nvars: int, positions: Sequence[int]) -> "Poly":
        """Rename u_j to u_{positions[j-1]} in a ring of ``nvars`` variables."""
        out = {}
        for e, c in self.terms.items():
            f = [0] * nvars
            for k, p in zip(e, positions):
                f[p - 1] += k
            f = tuple(f)
            out[f] = out.get(f, 0) + c
        return Poly._raw(nvars, {e: _norm(c) for e, c in out.items() if c})

    # text

    def to_str(self, names: Sequence[str] | None = None) -> str:
        if names is None:
            names = [f"u{j}" for j in range(1, self.nvars + 1)]
        if not self.terms:
            return "0"
        pieces = []
        for i, (e, c) in enumerate(self.sorted_terms()):
            factors = [str(abs(c))]
            for name, k in zip(names, e):
                if k == 1:
                    factors.append(name)
                elif k > 1:
                    factors.append(f"{name}^{k}")
            body = " * ".join(factors)
            if i == 0:
                pieces.append(("-" if c < 0 else "") + body)
            else:
                pieces.append(("- " if c < 0 else "+ ") + body)
        return " ".join(pieces)

    def __str__(self) -> str:
        return self.to_str()

    def __repr__(self) -> str:
        return f"Poly({self.nvars}, {self.to_str()!r})"

    def to_json(self) -> list:
        """Graded-lex coefficient list ``[[exps, "p/q"], ...]``."""
        return [[list(e), str(c)] for e, c in self.sorted_terms()]

    @classmethod
    def from_json(cls, nvars: int, data: Iterable) -> "Poly":
        return cls(nvars, {tuple(e): Fraction(c) for e, c in data})


def poly_ring(a: Poly, b: Poly, op: str) -> Poly:
    """Apply ``op`` in {"add", "sub", "mul"} to two polynomials in the same ring."""
    if a.nvars != b.nvars:
        raise UsageError(f"nvars mismatch: {a.nvars} vs {b.nvars}")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise UsageError(f"unknown ring operation {op!r}")


def elem_sym(n: int, k: int, nvars: int | None = None) -> Poly:
    """S_{n,k}: the degree-k elementary symmetric function in u1..u_{n-1}.

    ``nvars`` allows building it inside a larger ring (extra variables unused).
    """
    if n < 2:
        raise UsageError(f"n must be at least 2, got {n}")
    if not 0 <= k <= n - 1:
        raise UsageError(f"k={k} out of range 0..{n - 1}")
    m = n - 1
    nv = m if nvars is None else nvars
    terms = {}
    for idx in combinations(range(m), k):
        e = [0] * nv
        for i in idx:
            e[i] = 1
        terms[tuple(e)] = 1
    return Poly._raw(nv, terms)


def elem_sym_vars(nvars: int, k: int, which: Sequence[int]) -> Poly:
    """Degree-k elementary symmetric function in the listed (1-based) variables."""
    if k < 0 or k > len(which):
        return Poly.zero(nvars)
    terms = {}
    for idx in combinations(which, k):
        e = [0] * nvars
        for i in idx:
            e[i - 1] = 1
        terms[tuple(e)] = 1
    return Poly._raw(nvars, terms)


def substitute_linear(p: Poly, M: Sequence[Sequence[int]]) -> Poly:
    """The polynomial q with q(u) = p(M u)."""
    if len(M) != p.nvars or any(len(row) != p.nvars for row in M):
        raise UsageError(f"matrix must be {p.nvars}x{p.nvars}")
    n = p.nvars
    images = []
    for row in M:
        terms = {}
        for j, a in enumerate(row):
            if a:
                e = [0] * n
                e[j] = 1
                terms[tuple(e)] = a
        images.append(Poly(n, terms))
    return p.subs(images)


def partial_derivative(p: Poly, j: int) -> Poly:
    if not 1 <= j <= p.nvars:
        raise UsageError(f"variable index {j} out of range 1..{p.nvars}")
    i = j - 1
    out = {}
    for e, c in p.terms.items():
        k = e[i]
        if k:
            f = list(e)
            f[i] = k - 1
            out[tuple(f)] = _norm(c * k)
    return Poly._raw(p.nvars, out)


def evaluate_exact(p: Poly, point: Sequence) -> int | Fraction:
    if len(point) != p.nvars:
        raise UsageError(f"point has length {len(point)}, expected {p.nvars}")
    xs = [x if isinstance(x, int) else Fraction(x) for x in point]
    total = 0
    for e, c in p.terms.items():
        v = c
        for x, k in zip(xs, e):
            if k:
                v = v * x**k
        total += v
    return _norm(Fraction(total)) if not isinstance(total, int) else total


def divexact(p: Poly, q: Poly) -> Poly:
    """Exact quotient p/q; raises NotDivisible when q does not divide p.

    Division by the graded-lex leading term of a single divisor leaves a zero
    remainder exactly when q divides p.
    """
    if q.nvars != p.nvars:
        raise UsageError(f"nvars mismatch: {p.nvars} vs {q.nvars}")
    if q.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    lead_e, lead_c = q.leading()
    inv = Fraction(1) / Fraction(lead_c)
    rest = [(e, c) for e, c in q.terms.items() if e != lead_e]
    rem = dict(p.terms)
    heap = [(-sum(e), tuple(-x for x in e)) for e in rem]
    heapq.heapify(heap)
    quot: dict = {}
    while heap:
        _, neg = heapq.heappop(heap)
        e = tuple(-x for x in neg)
        c = rem.pop(e, 0)
        if not c:
            continue
        shift = tuple(a - b for a, b in zip(e, lead_e))
        if any(s < 0 for s in shift):
            raise NotDivisible(f"remainder term with exponent {e} survives")
        t = _norm(c * inv)
        quot[shift] = t
        for f, d in rest:
            g = tuple(a + b for a, b in zip(shift, f))
            if g not in rem:
                heapq.heappush(heap, (-sum(g), tuple(-x for x in g)))
            v = rem.get(g, 0) - t * d
            if v:
                rem[g] = _norm(v)
            else:
                rem.pop(g, None)
    return Poly._raw(p.nvars, quot)


def divides(q: Poly, p: Poly) -> bool:
    try:
        divexact(p, q)
    except NotDivisible:
        return False
    return True


def multiplicity(p: Poly, q: Poly, limit: int = 64) -> int:
    """Largest k with q^k | p (p nonzero)."""
    if p.is_zero():
        raise UsageError("multiplicity of a factor in the zero polynomial")
    k = 0
    while k < limit:
        try:
            p = divexact(p, q)
        except NotDivisible:
            break
        k += 1
    return k


def linear_form(nvars: int, coeffs: Mapping[int, object]) -> Poly:
    """Sum of c * u_j over ``coeffs`` (1-based indices)."""
    terms = {}
    for j, c in coeffs.items():
        e = [0] * nvars
        e[j - 1] = 1
        terms[tuple(e)] = c
    return Poly(nvars, terms)
