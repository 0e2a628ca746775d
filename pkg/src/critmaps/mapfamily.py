"""The degree-(n+1) equivariant map g on CP^{n-2} and its restrictions.

Component l of the lift is u_l^3 G_l with

    G_l = sum_{k=0}^{n-2} (-1)^k (k+1)/(k+3) u_l^k S_{n,n-2-k},

multiplied through by the least common denominator of the weights
(k+1)/(k+3) so that all coefficients are integers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Callable, Sequence

import numpy as np

from .exactpoly import Poly, UsageError, divexact, elem_sym, evaluate_exact


def weight(k: int) -> Fraction:
    """Coefficient (-1)^k (k+1)/(k+3) of u^k S_{n,n-2-k} in G."""
    return Fraction((-1) ** k * (k + 1), k + 3)


def lift_scale(n: int) -> int:
    return lcm(*(weight(k).denominator for k in range(n - 1)))


def G_factor(n: int, ell: int = 1, scale: int | Fraction = 1) -> Poly:
    """scale * G_ell as a polynomial in u1..u_{n-1}."""
    if n < 3:
        raise UsageError(f"n must be at least 3, got {n}")
    d = n - 1
    u1 = Poly.var(d, 1)
    G = Poly.zero(d)
    for k in range(n - 1):
        G = G + (u1**k) * elem_sym(n, n - 2 - k) * (weight(k) * scale)
    if ell != 1:
        G = G.swap(1, ell)
    return G


@dataclass(frozen=True)
class MapFamily:
    """A homogeneous polynomial map on C^d, typically the integer lift of g.

    ``scale`` records the factor applied to the closed-form coefficients;
    dividing the components by it gives the fractions of the closed form.
    """

    n: int
    components: tuple[Poly, ...]
    scale: int | Fraction = 1

    @property
    def nvars(self) -> int:
        return self.components[0].nvars

    @property
    def degree(self) -> int:
        return max(c.degree() for c in self.components)

    def __call__(self, point: Sequence) -> list:
        return [evaluate_exact(c, point) for c in self.components]

    def unscaled(self) -> "MapFamily":
        return MapFamily(self.n, tuple(c / self.scale for c in self.components), 1)

    def with_component(self, i: int, comp: Poly) -> "MapFamily":
        """Copy with component i (1-based) replaced; used for mutation controls."""
        comps = list(self.components)
        comps[i - 1] = comp
        return MapFamily(self.n, tuple(comps), self.scale)


def build_map(n: int, scale: int | Fraction | None = None) -> MapFamily:
    """The literal lift of g; integer-scaled unless ``scale`` is given."""
    if n < 3:
        raise UsageError(f"n must be at least 3, got {n}")
    if scale is None:
        scale = lift_scale(n)
    d = n - 1
    G1 = G_factor(n, 1, scale)
    comps = []
    for ell in range(1, d + 1):
        G = G1 if ell == 1 else G1.swap(1, ell)
        comps.append(Poly.var(d, ell) ** 3 * G)
    return MapFamily(n, tuple(comps), scale)


def jacobian(m: MapFamily) -> list[list[Poly]]:
    """Entry (i, j) is d g_i / d u_j."""
    return [[c.diff(j) for j in range(1, m.nvars + 1)] for c in m.components]


def jacobian_at(m: MapFamily, point: Sequence) -> list[list]:
    return [[evaluate_exact(e, point) for e in row] for row in jacobian(m)]


@dataclass(frozen=True)
class SubspaceSpec:
    """Intersection of mirrors: some coordinates zeroed, the rest grouped.

    ``classes`` lists equality classes among the non-zeroed indices; any
    index not mentioned forms its own class.  Indices are 1-based.
    """

    zeroed: frozenset[int] = frozenset()
    classes: tuple[tuple[int, ...], ...] = ()

    @classmethod
    def of(cls, zeroed=(), merged=()) -> "SubspaceSpec":
        return cls(frozenset(zeroed), tuple(tuple(sorted(c)) for c in merged))

    def resolve(self, d: int) -> list[tuple[int, ...]]:
        """All equality classes (sorted by representative) for ambient dim d."""
        used = set()
        for c in self.classes:
            for i in c:
                if i in self.zeroed:
                    raise UsageError(f"index {i} is both zeroed and merged")
                if i in used:
                    raise UsageError(f"index {i} appears in two classes")
                if not 1 <= i <= d:
                    raise UsageError(f"index {i} out of range 1..{d}")
                used.add(i)
        for i in self.zeroed:
            if not 1 <= i <= d:
                raise UsageError(f"index {i} out of range 1..{d}")
        classes = [tuple(sorted(c)) for c in self.classes if c]
        classes += [(i,) for i in range(1, d + 1) if i not in used and i not in self.zeroed]
        return sorted(classes, key=lambda c: c[0])

    def dim(self, d: int) -> int:
        """Linear dimension of the subspace of C^d."""
        return len(self.resolve(d))

    def embedding(self, d: int) -> list[list[int]]:
        """d x m 0/1 matrix sending restricted coordinates to u-coordinates."""
        classes = self.resolve(d)
        E = [[0] * len(classes) for _ in range(d)]
        for j, c in enumerate(classes):
            for i in c:
                E[i - 1][j] = 1
        return E

    def contains(self, point: Sequence, d: int) -> bool:
        if any(point[i - 1] for i in self.zeroed):
            return False
        return all(len({point[i - 1] for i in c}) == 1 for c in self.resolve(d))

    def project(self, point: Sequence, d: int) -> list:
        """Restricted coordinates of an ambient point lying on the subspace."""
        if not self.contains(point, d):
            raise UsageError(f"point {list(point)} does not lie on the subspace")
        return [point[c[0] - 1] for c in self.resolve(d)]

    def to_json(self) -> dict:
        return {"zeroed": sorted(self.zeroed), "merged": [list(c) for c in self.classes]}

    @classmethod
    def from_json(cls, data: dict) -> "SubspaceSpec":
        return cls.of(data.get("zeroed", ()), data.get("merged", ()))


@dataclass(frozen=True)
class RestrictedMap(MapFamily):
    """A map restricted to an invariant subspace, with its embedding recorded."""

    subspace: SubspaceSpec = field(default_factory=SubspaceSpec)
    ambient_dim: int = 0

    def embed_point(self, point: Sequence) -> list:
        E = self.subspace.embedding(self.ambient_dim)
        return [sum(a * x for a, x in zip(row, point)) for row in E]


def restrict(m: MapFamily, s: SubspaceSpec, check_invariant: bool = True) -> RestrictedMap:
    """Restrict to a mirror intersection and keep one component per class.

    With ``check_invariant`` the map is verified to preserve the subspace:
    zeroed components and differences of merged components must vanish.
    """
    d = m.nvars
    classes = s.resolve(d)
    if not classes:
        raise UsageError("subspace is the origin")
    r = len(classes)
    images = [Poly.zero(r)] * d
    for j, c in enumerate(classes):
        v = Poly.var(r, j + 1)
        for i in c:
            images[i - 1] = v
    restricted = [comp.subs(images) for comp in m.components]
    if check_invariant:
        for i in s.zeroed:
            if not restricted[i - 1].is_zero():
                raise UsageError(f"component {i} does not vanish on the subspace")
        for c in classes:
            for i in c[1:]:
                if restricted[i - 1] != restricted[c[0] - 1]:
                    raise UsageError(f"components {c[0]} and {i} differ on the subspace")
    comps = tuple(restricted[c[0] - 1] for c in classes)
    return RestrictedMap(m.n, comps, m.scale, s, d)


def compile_float(m: MapFamily) -> Callable[[np.ndarray], np.ndarray]:
    """Vectorised evaluator of the components at complex double points.

    The returned function takes an array of shape (d, N) (or (d,)) and returns
    the image with the same shape.  Every output entry is accumulated in a
    fixed term order, so a point's image does not depend on the batch it is
    evaluated in.
    """
    d = m.nvars
    monos = sorted({e for comp in m.components for e in comp.terms})
    index = {e: i for i, e in enumerate(monos)}
    E = np.array(monos, dtype=np.intp).reshape(-1, d)
    maxdeg = E.max(axis=0) if len(E) else np.zeros(d, dtype=np.intp)
    tables = []
    for comp in m.components:
        idx = np.array([index[e] for e in comp.terms], dtype=np.intp)
        coef = np.array([float(c) for c in comp.terms.values()], dtype=np.float64)
        tables.append((idx, coef))

    def evaluate(z: np.ndarray) -> np.ndarray:
        z = np.asarray(z, dtype=np.complex128)
        single = z.ndim == 1
        if single:
            z = z[:, None]
        mono = None
        for i in range(d):
            pw = np.empty((int(maxdeg[i]) + 1, z.shape[1]), dtype=np.complex128)
            pw[0] = 1.0
            for k in range(1, int(maxdeg[i]) + 1):
                pw[k] = pw[k - 1] * z[i]
            mono = pw[E[:, i]] if mono is None else mono * pw[E[:, i]]
        out = np.empty((len(tables), z.shape[1]), dtype=np.complex128)
        for row, (idx, coef) in enumerate(tables):
            acc = out[row]
            acc[:] = 0.0
            for i, c in zip(idx, coef):
                acc += c * mono[i]
        return out[:, 0] if single else out

    return evaluate
