"""Exact linear algebra on small dense matrices (lists of lists).

Entries are ints or Fractions, except for :func:`det_poly`, which expands a
determinant whose entries are :class:`~critmaps.exactpoly.Poly`.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Sequence

from .exactpoly import Poly, UsageError

Matrix = list[list]


def identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(A: Sequence[Sequence], B: Sequence[Sequence]) -> Matrix:
    if len(A[0]) != len(B):
        raise UsageError(f"shape mismatch {len(A)}x{len(A[0])} @ {len(B)}x{len(B[0])}")
    cols = list(zip(*B))
    return [[sum(a * b for a, b in zip(row, col)) for col in cols] for row in A]


def matvec(A: Sequence[Sequence], v: Sequence) -> list:
    if len(A[0]) != len(v):
        raise UsageError("shape mismatch in matrix-vector product")
    return [sum(a * x for a, x in zip(row, v)) for row in A]


def transpose(A: Sequence[Sequence]) -> Matrix:
    return [list(col) for col in zip(*A)]


def _integer_rows(rows: Sequence[Sequence]) -> list[list[int]]:
    out = []
    for row in rows:
        den = 1
        for x in row:
            den = den * Fraction(x).denominator // gcd(den, Fraction(x).denominator)
        out.append([int(Fraction(x) * den) for x in row])
    return out


def _primitive(row: list[int]) -> list[int]:
    g = 0
    for x in row:
        g = gcd(g, x)
    return [x // g for x in row] if g > 1 else row


def echelon(rows: Sequence[Sequence]) -> tuple[list[list[int]], list[int]]:
    """Fraction-free row echelon form.

    Rows are scaled to integers, then eliminated by cross-multiplication and
    divided by their content after each step.  Returns the nonzero echelon
    rows (each with a positive pivot) and the pivot columns.
    """
    M = _integer_rows(rows)
    if not M:
        return [], []
    ncols = len(M[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(M)) if M[i][c]), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        p = M[r][c]
        for i in range(len(M)):
            if i != r and M[i][c]:
                f = M[i][c]
                M[i] = _primitive([p * x - f * y for x, y in zip(M[i], M[r])])
        pivots.append(c)
        r += 1
        if r == len(M):
            break
    out = [row if row[c] > 0 else [-x for x in row] for row, c in zip(M[:r], pivots)]
    return out, pivots


def rank(rows: Sequence[Sequence]) -> int:
    return len(echelon(rows)[1])


def nullspace(rows: Sequence[Sequence], ncols: int | None = None) -> list[list[Fraction]]:
    """Basis of {x : rows @ x = 0}, one vector per free column."""
    if ncols is None:
        ncols = len(rows[0])
    E, pivots = echelon(rows) if rows else ([], [])
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        # E is reduced: each pivot row has zeros in the other pivot columns
        for row, c in zip(E, pivots):
            x[c] = Fraction(-row[f], row[c])
        basis.append(x)
    return basis


def solve(A: Sequence[Sequence], b: Sequence) -> list[Fraction]:
    """Unique solution of the square system A x = b."""
    n = len(A)
    aug = [list(row) + [bi] for row, bi in zip(A, b)]
    E, pivots = echelon(aug)
    if pivots != list(range(n)):
        raise UsageError("singular or inconsistent linear system")
    return [Fraction(row[n], row[i]) for i, row in enumerate(E)]


def det(A: Sequence[Sequence]) -> Fraction | int:
    """Determinant by Gaussian elimination over the rationals."""
    n = len(A)
    M = [[Fraction(x) for x in row] for row in A]
    sign = 1
    out = Fraction(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if M[i][c]), None)
        if piv is None:
            return 0
        if piv != c:
            M[c], M[piv] = M[piv], M[c]
            sign = -sign
        p = M[c][c]
        out *= p
        for i in range(c + 1, n):
            if M[i][c]:
                f = M[i][c] / p
                M[i] = [x - f * y for x, y in zip(M[i], M[c])]
    out *= sign
    return out.numerator if out.denominator == 1 else out


def inverse(A: Sequence[Sequence]) -> list[list[Fraction]]:
    n = len(A)
    cols = []
    for j in range(n):
        e = [int(i == j) for i in range(n)]
        cols.append(solve(A, e))
    return transpose(cols)


def det_poly(M: Sequence[Sequence[Poly]]) -> Poly:
    """Symbolic determinant by cofactor expansion with memoized minors."""
    n = len(M)
    if n == 0:
        raise UsageError("empty matrix")
    nvars = M[0][0].nvars
    memo: dict[tuple[int, ...], Poly] = {}

    def minor(row: int, cols: tuple[int, ...]) -> Poly:
        # determinant of rows row..n-1 restricted to cols
        if row == n:
            return Poly.const(nvars, 1)
        if cols in memo:
            return memo[cols]
        total = Poly.zero(nvars)
        for k, c in enumerate(cols):
            a = M[row][c]
            if a.is_zero():
                continue
            sub = minor(row + 1, cols[:k] + cols[k + 1:])
            if sub.is_zero():
                continue
            term = a * sub
            total = total - term if k % 2 else total + term
        memo[cols] = total
        return total

    return minor(0, tuple(range(n)))
