"""The S_n action on CP^{n-2} written in u-coordinates.

u-coordinates come from x in C^n via u = A x, with A = [I | -1].  In these
coordinates S_{n-1} permutes the u_k and the extra generator T (the image of
the transposition x_1 <-> x_n) is the involution

    T = [[-1, 0, ..., 0],
         [-1, 1, ..., 0],
         ...
         [-1, 0, ..., 1]].

The mirrors of the action are {u_k = 0} and {u_k = u_l}.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import comb, gcd
from typing import Iterable, Sequence

from .exactpoly import Poly, UsageError, linear_form
from .linalg import identity, matmul, matvec


def _check_n(n: int) -> None:
    if n < 3:
        raise UsageError(f"n must be at least 3, got {n}")


@dataclass(frozen=True)
class GroupElement:
    """An integer matrix acting on u-coordinates."""

    matrix: tuple[tuple[int, ...], ...]

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[int]]) -> "GroupElement":
        return cls(tuple(tuple(int(x) for x in row) for row in rows))

    @property
    def dim(self) -> int:
        return len(self.matrix)

    def __matmul__(self, other: "GroupElement") -> "GroupElement":
        return GroupElement.from_rows(matmul(self.matrix, other.matrix))

    def apply(self, v: Sequence) -> list:
        return matvec(self.matrix, v)

    def rows(self) -> list[list[int]]:
        return [list(r) for r in self.matrix]

    def projective_key(self) -> tuple:
        """Matrix with sign fixed so the first nonzero entry is positive."""
        flat = [x for row in self.matrix for x in row]
        s = next(x for x in flat if x)
        return tuple(tuple(x if s > 0 else -x for x in row) for row in self.matrix)


@dataclass(frozen=True)
class CoordTransform:
    """u = A x and x = B u, with A B = -n I and B A = ones - n I."""

    n: int
    A: tuple[tuple[int, ...], ...]
    B: tuple[tuple[int, ...], ...]


@dataclass(frozen=True, order=True)
class ProjPointExact:
    """Rational point of projective space in canonical form.

    The representative is integral and primitive, with its first nonzero
    coordinate positive, so two points are projectively equal exactly when
    their stored coordinates are equal.
    """

    coords: tuple[int, ...]

    @classmethod
    def of(cls, coords: Sequence) -> "ProjPointExact":
        fr = [Fraction(c) for c in coords]
        if not any(fr):
            raise UsageError("the zero vector is not a projective point")
        den = 1
        for x in fr:
            den = den * x.denominator // gcd(den, x.denominator)
        ints = [int(x * den) for x in fr]
        g = 0
        for x in ints:
            g = gcd(g, x)
        lead = next(x for x in ints if x)
        if lead < 0:
            g = -g
        return cls(tuple(x // g for x in ints))

    def __len__(self) -> int:
        return len(self.coords)

    def __iter__(self):
        return iter(self.coords)


@dataclass(frozen=True)
class SpecialPoint:
    kind: str  # "p" or "q"
    index: int
    coords: tuple[int, ...]

    @property
    def name(self) -> str:
        return f"{self.kind}_{self.index}"

    @property
    def point(self) -> ProjPointExact:
        return ProjPointExact.of(self.coords)


def transposition_T(n: int) -> GroupElement:
    _check_n(n)
    d = n - 1
    rows = identity(d)
    for i in range(d):
        rows[i][0] = -1
    return GroupElement.from_rows(rows)


def perm_element(n: int, sigma: Sequence[int]) -> GroupElement:
    """Permutation matrix sending coordinate j to position sigma(j).

    ``sigma`` is a sequence of length n-1 listing sigma(1), ..., sigma(n-1)
    (1-based).  With this convention perm(s) @ perm(t) == perm(s o t).
    """
    _check_n(n)
    d = n - 1
    if sorted(sigma) != list(range(1, d + 1)):
        raise UsageError(f"{list(sigma)} is not a permutation of 1..{d}")
    rows = [[0] * d for _ in range(d)]
    for j, s in enumerate(sigma):
        rows[s - 1][j] = 1
    return GroupElement.from_rows(rows)


def transposition(n: int, i: int, j: int) -> GroupElement:
    """Permutation matrix swapping u_i and u_j."""
    sigma = list(range(1, n))
    sigma[i - 1], sigma[j - 1] = j, i
    return perm_element(n, sigma)


def generators(n: int) -> list[GroupElement]:
    """Adjacent transpositions of the u_k together with T."""
    _check_n(n)
    gens = [transposition(n, i, i + 1) for i in range(1, n - 1)]
    gens.append(transposition_T(n))
    return gens


def coord_transforms(n: int) -> CoordTransform:
    _check_n(n)
    A = []
    for i in range(n - 1):
        row = [0] * n
        row[i] = 1
        row[n - 1] = -1
        A.append(tuple(row))
    B = []
    for i in range(n):
        row = []
        for j in range(n - 1):
            row.append(1 - n if i == j else 1)
        B.append(tuple(row))
    return CoordTransform(n, tuple(A), tuple(B))


def special_points(n: int) -> list[SpecialPoint]:
    """The p_k and q_k of the intersection-point table, duplicates removed.

    p_k has k leading ones and q_k has n-k leading ones (n-1 coordinates).
    For odd n = 2m-1 the index runs to m-1; for even n = 2m it runs to m,
    where p_m and q_m coincide and only p_m is kept.
    """
    _check_n(n)
    d = n - 1
    top = (n + 1) // 2 - 1 if n % 2 else n // 2
    out: list[SpecialPoint] = []
    seen = set()
    for k in range(1, top + 1):
        for kind, ones in (("p", k), ("q", n - k)):
            coords = tuple([1] * ones + [0] * (d - ones))
            if coords in seen:
                continue
            seen.add(coords)
            out.append(SpecialPoint(kind, k, coords))
    return out


def predicted_orbit_size(n: int, k: int) -> int:
    """Orbit size of p_k (equivalently q_k) from the intersection-point table."""
    if n % 2 == 0 and 2 * k == n:
        return comb(n, k) // 2
    return comb(n, k)


def orbit(seed: ProjPointExact | Sequence, n: int,
          gens: Sequence[GroupElement] | None = None) -> set[ProjPointExact]:
    """Breadth-first closure of ``seed`` under the generators."""
    _check_n(n)
    if not isinstance(seed, ProjPointExact):
        seed = ProjPointExact.of(seed)
    if len(seed) != n - 1:
        raise UsageError(f"seed must have {n - 1} coordinates")
    gens = generators(n) if gens is None else gens
    seen = {seed}
    todo = deque([seed])
    while todo:
        p = todo.popleft()
        for g in gens:
            q = ProjPointExact.of(g.apply(p.coords))
            if q not in seen:
                seen.add(q)
                todo.append(q)
    return seen


def group_elements(n: int) -> list[GroupElement]:
    """All n! matrices of the group, by closure under the generators.

    The linear group generated by the permutation matrices and T is a
    faithful copy of S_n, so no sign identification is needed.
    """
    _check_n(n)
    gens = generators(n)
    e = GroupElement.from_rows(identity(n - 1))
    seen = {e}
    todo = deque([e])
    while todo:
        m = todo.popleft()
        for g in gens:
            h = g @ m
            if h not in seen:
                seen.add(h)
                todo.append(h)
    return sorted(seen, key=lambda g: g.matrix)


def hyperplane_forms(n: int) -> list[Poly]:
    """The C(n,2) mirror forms u_k and u_k - u_l (k < l)."""
    _check_n(n)
    d = n - 1
    forms = [linear_form(d, {k: 1}) for k in range(1, d + 1)]
    forms += [linear_form(d, {k: 1, l: -1}) for k, l in combinations(range(1, d + 1), 2)]
    return forms


def hyperplane_pairs(n: int) -> list[tuple[int, ...]]:
    """Index description of each mirror: (k,) for u_k = 0, (k, l) for u_k = u_l."""
    d = n - 1
    return [(k,) for k in range(1, d + 1)] + list(combinations(range(1, d + 1), 2))


def reflection(n: int, mirror: tuple[int, ...]) -> GroupElement:
    """The involution of the group that fixes the given mirror pointwise."""
    _check_n(n)
    if len(mirror) == 2:
        return transposition(n, *mirror)
    (k,) = mirror
    # conjugate T (which fixes {u_1 = 0}) by the swap u_1 <-> u_k
    T = transposition_T(n)
    if k == 1:
        return T
    s = transposition(n, 1, k)
    return s @ T @ s


@dataclass
class OrbitRow:
    point: SpecialPoint
    size: int
    predicted: int
    members: list[ProjPointExact] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "point": self.point.name,
            "coords": list(self.point.coords),
            "orbit_size": self.size,
            "predicted": self.predicted,
        }


def orbit_table(n: int) -> list[OrbitRow]:
    rows = []
    for sp in special_points(n):
        orb = orbit(sp.point, n)
        rows.append(OrbitRow(sp, len(orb), predicted_orbit_size(n, sp.index), sorted(orb)))
    return rows
