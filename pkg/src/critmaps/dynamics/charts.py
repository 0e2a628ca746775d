"""Exact one- and two-variable chart forms of g.

A line of mirror intersections carries a restricted map (P(s,t), Q(s,t)).
Choosing a Moebius transformation that sends three marked attractors to
prescribed values and conjugating gives a one-variable rational map whose
coefficients can be compared with printed formulas without tolerance.

Univariate polynomials here are coefficient lists, index = power, over any
field whose elements support + - * / (Fraction or QuadraticNumber).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from math import gcd
from typing import Sequence

from ..exactpoly import Poly, UsageError
from ..group import ProjPointExact
from ..linalg import matvec, nullspace
from ..mapfamily import MapFamily, RestrictedMap, SubspaceSpec, build_map, restrict
from ..numberfield import QuadraticNumber, rho
from ..verify import CheckReport, _timed

INF = "inf"


# -- univariate polynomials over a field --------------------------------------

def utrim(p: list) -> list:
    p = list(p)
    while p and not p[-1]:
        p.pop()
    return p


def uadd(p: list, q: list) -> list:
    n = max(len(p), len(q))
    return utrim([(p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0) for i in range(n)])


def uscale(p: list, c) -> list:
    return utrim([x * c for x in p])


def umul(p: list, q: list) -> list:
    if not p or not q:
        return []
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] = out[i + j] + a * b
    return utrim(out)


def upow(p: list, k: int) -> list:
    out = [1]
    for _ in range(k):
        out = umul(out, p)
    return out


def uderiv(p: list) -> list:
    return utrim([i * p[i] for i in range(1, len(p))])


def udivmod(p: list, q: list) -> tuple[list, list]:
    q = utrim(q)
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    r = utrim(p)
    quot = [0] * max(len(r) - len(q) + 1, 0)
    lead = q[-1]
    while len(r) >= len(q):
        c = r[-1] / _exact(lead)
        shift = len(r) - len(q)
        quot[shift] = c
        r = utrim([r[i] - (c * q[i - shift] if 0 <= i - shift < len(q) else 0) for i in range(len(r))])
    return utrim(quot), r


def ugcd(p: list, q: list) -> list:
    p, q = utrim(p), utrim(q)
    while q:
        p, q = q, udivmod(p, q)[1]
    if not p:
        return []
    return uscale(p, 1 / _exact(p[-1]))


def ueval(p: list, x):
    acc = 0
    for c in reversed(p):
        acc = acc * x + c
    return acc


def _is_rational(c) -> bool:
    return not isinstance(c, QuadraticNumber) or c.is_rational()


def _rational(c) -> Fraction:
    return c.rational() if isinstance(c, QuadraticNumber) else Fraction(c)


# -- Moebius transformations ---------------------------------------------------

def _exact(v):
    return v if isinstance(v, (QuadraticNumber, Fraction)) else Fraction(v)


def _homog(v) -> tuple:
    return (Fraction(1), Fraction(0)) if v == INF else (_exact(v), Fraction(1))


@dataclass(frozen=True)
class Mobius:
    """z -> (a z + b) / (c z + d), acting on homogeneous pairs as a matrix."""

    a: object
    b: object
    c: object
    d: object

    @classmethod
    def from_points(cls, sources: Sequence, targets: Sequence) -> "Mobius":
        """The unique map sending three homogeneous pairs to three values.

        ``sources`` are pairs (s, t); ``targets`` are field elements or INF.
        """
        if len(sources) != 3 or len(targets) != 3:
            raise UsageError("a Moebius map needs exactly three point pairs")
        A = cls._frame([tuple(_exact(x) for x in s) for s in sources])
        B = cls._frame([_homog(t) for t in targets])
        return B @ A.adjugate()

    @staticmethod
    def _frame(pts) -> "Mobius":
        # matrix sending (1,0), (0,1), (1,1) to the three pairs
        (x1, y1), (x2, y2), (x3, y3) = pts
        det = x1 * y2 - x2 * y1
        if not det or not (x1 * y3 - x3 * y1) or not (x2 * y3 - x3 * y2):
            raise UsageError("marked points must be distinct")
        l1 = (x3 * y2 - x2 * y3) / det
        l2 = (x1 * y3 - x3 * y1) / det
        return Mobius(l1 * x1, l2 * x2, l1 * y1, l2 * y2)

    def __matmul__(self, o: "Mobius") -> "Mobius":
        return Mobius(self.a * o.a + self.b * o.c, self.a * o.b + self.b * o.d,
                      self.c * o.a + self.d * o.c, self.c * o.b + self.d * o.d)

    def adjugate(self) -> "Mobius":
        return Mobius(self.d, -self.b, -self.c, self.a)

    def apply_pair(self, s, t) -> tuple:
        return (self.a * s + self.b * t, self.c * s + self.d * t)

    def __call__(self, z):
        s, t = self.apply_pair(*_homog(z))
        if not t:
            return INF
        return s / t

    def complex_matrix(self) -> tuple[complex, complex, complex, complex]:
        return tuple(complex(x) if isinstance(x, QuadraticNumber) else complex(float(x))
                     for x in (self.a, self.b, self.c, self.d))

    @classmethod
    def scaling(cls, k) -> "Mobius":
        return cls(k, 0, 0, 1)

    @classmethod
    def inversion(cls, k=1) -> "Mobius":
        return cls(0, k, 1, 0)


# -- one-variable rational maps -----------------------------------------------

def _binary_form(p: Poly) -> list:
    """Coefficients c[i] of s^i t^(D-i) for a homogeneous Poly in (s, t)."""
    if p.nvars != 2:
        raise UsageError("expected a polynomial in two variables")
    D = p.degree()
    c = [0] * (D + 1)
    for (i, j), v in p.terms.items():
        c[i] = Fraction(v)
    return c


def conjugate_pair(num: list, den: list, degree: int, phi: Mobius) -> tuple[list, list]:
    """phi o F o phi^-1 for F = num/den of the given projective degree.

    ``num`` and ``den`` are dehomogenised (t = 1) coefficient lists.
    """
    inv = phi.adjugate()
    s = utrim([inv.b, inv.a])  # a z + b
    t = utrim([inv.d, inv.c])

    def substitute(p):
        out = []
        for i, c in enumerate(p):
            if c:
                out = uadd(out, uscale(umul(upow(s, i), upow(t, degree - i)), c))
        return out

    P, Q = substitute(num), substitute(den)
    return uadd(uscale(P, phi.a), uscale(Q, phi.b)), uadd(uscale(P, phi.c), uscale(Q, phi.d))


def _normalise(num: list, den: list) -> tuple[list[Fraction], list[Fraction]]:
    """Lowest terms, integer coefficients with unit content, den leading > 0."""
    g = ugcd(num, den)
    if len(g) > 1:
        num, den = udivmod(num, g)[0], udivmod(den, g)[0]
    lead = _exact(den[-1])
    num, den = uscale(num, 1 / lead), uscale(den, 1 / lead)
    if not all(_is_rational(c) for c in num + den):
        raise ValueError("conjugated map has irrational coefficients")
    num = [_rational(c) for c in num]
    den = [_rational(c) for c in den]
    L = 1
    for c in num + den:
        L = L * c.denominator // gcd(L, c.denominator)
    num = [c * L for c in num]
    den = [c * L for c in den]
    G = 0
    for c in num + den:
        G = gcd(G, int(c))
    return [c / G for c in num], [c / G for c in den]


@dataclass(frozen=True)
class RationalMap1D:
    """z -> numerator(z) / denominator(z), coprime, exact rational coefficients.

    Coefficient tuples are indexed by power; the stored form has integer
    coefficients with unit content and positive leading denominator.
    """

    numerator: tuple[Fraction, ...]
    denominator: tuple[Fraction, ...]

    @classmethod
    def of(cls, num: Sequence, den: Sequence) -> "RationalMap1D":
        n, d = _normalise(utrim(list(num)), utrim(list(den)))
        return cls(tuple(n), tuple(d))

    @classmethod
    def from_poly_pair(cls, P: Poly, Q: Poly) -> "RationalMap1D":
        """From a homogeneous pair in (s, t), chart coordinate z = s/t."""
        return cls.of(_binary_form(P), _binary_form(Q))

    @property
    def degree(self) -> int:
        return max(len(self.numerator), len(self.denominator)) - 1

    def conjugate(self, phi: Mobius) -> "RationalMap1D":
        num, den = conjugate_pair(list(self.numerator), list(self.denominator), self.degree, phi)
        return RationalMap1D.of(num, den)

    def __call__(self, z):
        if z == INF:
            if len(self.numerator) > len(self.denominator):
                return INF
            if len(self.numerator) < len(self.denominator):
                return 0
            return self.numerator[-1] / self.denominator[-1]
        d = ueval(list(self.denominator), z)
        if not d:
            return INF
        return ueval(list(self.numerator), z) / d

    def numerator_poly(self) -> Poly:
        return Poly(1, {(i,): c for i, c in enumerate(self.numerator)})

    def denominator_poly(self) -> Poly:
        return Poly(1, {(i,): c for i, c in enumerate(self.denominator)})

    def __str__(self) -> str:
        return f"({self.numerator_poly().to_str(['z'])}) / ({self.denominator_poly().to_str(['z'])})"

    def to_json(self) -> dict:
        return {"numerator": [str(c) for c in self.numerator],
                "denominator": [str(c) for c in self.denominator]}


# -- restricted maps on lines ---------------------------------------------------

def line_restriction(n: int, line: SubspaceSpec, family: MapFamily | None = None) -> RestrictedMap:
    r = restrict(family or build_map(n), line)
    if r.nvars != 2:
        raise UsageError(f"subspace has dimension {r.nvars}, expected a line (2)")
    return r


def line_chart(n: int, line: SubspaceSpec, marks: Sequence[tuple[Sequence[int], object]],
               family: MapFamily | None = None) -> tuple[RestrictedMap, Mobius]:
    """Restricted map on a line and the Moebius chart fixed by three marks.

    ``marks`` pairs an ambient u-point on the line with its chart value.
    """
    r = line_restriction(n, line, family)
    d = r.ambient_dim
    sources = []
    for point, _ in marks:
        if len(point) != d:
            raise UsageError(f"marked point {list(point)} must have {d} coordinates")
        sources.append(tuple(Fraction(x) for x in line.project(point, d)))
    if len({ProjPointExact.of(s) for s in sources}) != len(sources):
        raise UsageError("marked points must be distinct")
    phi = Mobius.from_points(sources, [v for _, v in marks])
    return r, phi


def restricted_1d_map(n: int, line: SubspaceSpec, marks: Sequence[tuple[Sequence[int], object]],
                      family: MapFamily | None = None) -> RationalMap1D:
    r, phi = line_chart(n, line, marks, family)
    P, Q = r.components
    deg = P.degree()
    num, den = conjugate_pair(_binary_form(P), _binary_form(Q), deg, phi)
    return RationalMap1D.of(num, den)


# lines and normalisations used for the printed one-variable maps
PRINTED_1D = {
    "g5CP1": dict(
        n=4, line=SubspaceSpec.of(zeroed=[3]),
        marks=[((1, 0, 0), 1), ((0, 1, 0), -1), ((1, 1, 0), 0)],
        printed=([0, 0, 0, 20, 0, 4], [-1, 0, 10, 0, 15])),
    "g6CP1Z2": dict(
        n=5, line=SubspaceSpec.of(zeroed=[3, 4]),
        marks=[((1, 0, 0, 0), 1), ((0, 1, 0, 0), -1), ((1, 1, 0, 0), 0)],
        printed=([0, 0, 0, 40, 0, 24], [-1, 0, 15, 0, 45, 0, 5])),
    "g6CP1Z1": dict(
        n=5, line=SubspaceSpec.of(zeroed=[4], merged=[(2, 3)]),
        marks=[((1, 0, 0, 0), 1), ((0, 1, 1, 0), 0), ((1, 1, 1, 0), -1)],
        printed=([0, 0, 0, 0, 40, -16, 8], [1, -2, -5, 20, 15, 30, 5])),
}


def printed_1d_map(name: str) -> RationalMap1D:
    num, den = PRINTED_1D[name]["printed"]
    return RationalMap1D.of(num, den)


def derived_1d_map(name: str) -> RationalMap1D:
    spec = PRINTED_1D[name]
    return restricted_1d_map(spec["n"], spec["line"], spec["marks"])


def _coefficient_diff(a: RationalMap1D, b: RationalMap1D) -> list[str]:
    out = []
    for part, x, y in (("numerator", a.numerator, b.numerator),
                       ("denominator", a.denominator, b.denominator)):
        for k in range(max(len(x), len(y))):
            cx = x[k] if k < len(x) else 0
            cy = y[k] if k < len(y) else 0
            if cx != cy:
                out.append(f"{part} z^{k}: {cx} vs {cy}")
    return out


@_timed("check-1d")
def check_1d(name: str) -> CheckReport:
    """Compare a derived line map with its printed form, coefficient by coefficient."""
    if name not in PRINTED_1D:
        raise UsageError(f"unknown map {name!r}; choose from {sorted(PRINTED_1D)}")
    spec = PRINTED_1D[name]
    derived = derived_1d_map(name)
    printed = printed_1d_map(name)
    ok = derived == printed
    values = [v for _, v in spec["marks"]]
    details = {"map": name, "derived": str(derived), "printed": str(printed),
               "marks": [[list(p), str(v)] for p, v in spec["marks"]],
               "derived_fixes_marks": all(derived(v) == v for v in values),
               "printed_fixes_marks": all(printed(v) == v for v in values)}
    if not ok:
        details["differences"] = _coefficient_diff(derived, printed)
    return CheckReport("", spec["n"], "pass" if ok else "fail",
                       None if ok else "; ".join(details["differences"]), details)


# -- Halley's method ---------------------------------------------------------

def halley_map(f: Sequence) -> RationalMap1D:
    """z - 2 f f' / (2 f'^2 - f f'') as a reduced rational map."""
    f = [Fraction(c) for c in f]
    f1 = uderiv(f)
    f2 = uderiv(f1)
    den = uadd(uscale(umul(f1, f1), 2), uscale(umul(f, f2), -1))
    num = uadd(umul([0, 1], den), uscale(umul(f, f1), -2))
    return RationalMap1D.of(num, den)


def n3_chart_map(order: Sequence[int] = (0, 1, 2)) -> tuple[RationalMap1D, Mobius]:
    """g for n = 3 with the mirror points [1,0], [0,1], [1,1] sent to cube roots of 1."""
    w = rho()
    roots = [QuadraticNumber(1, 0, -3), w, w * w]
    pts = [(1, 0), (0, 1), (1, 1)]
    marks = [(pts[i], roots[j]) for i, j in zip(range(3), order)]
    r, phi = line_chart(3, SubspaceSpec.of(), marks)
    P, Q = r.components
    num, den = conjugate_pair(_binary_form(P), _binary_form(Q), P.degree(), phi)
    return RationalMap1D.of(num, den), phi


def cube_root_symmetries() -> list[tuple[str, Mobius]]:
    """Moebius maps preserving {0, inf} and permuting the cube roots of unity."""
    w = rho()
    out = []
    for k, c in enumerate([QuadraticNumber(1, 0, -3), w, w * w]):
        out.append((f"z -> rho^{k} z", Mobius.scaling(c)))
        out.append((f"z -> rho^{k} / z", Mobius.inversion(c)))
    return out


PRINTED_G4 = ([0, -2, 0, 0, 1], [-1, 0, 0, 2])  # z (z^3 - 2) / (2 z^3 - 1)


@_timed("check-halley")
def halley_check() -> CheckReport:
    halley = halley_map([-1, 0, 0, 1])
    derived, _ = n3_chart_map()
    failures = []
    found = None
    for label, psi in cube_root_symmetries():
        if derived.conjugate(psi) == halley:
            found = label
            break
    if found is None:
        failures.append(f"no conjugacy between {derived} and {halley}")
    # 0 and infinity carry the two-point orbit and must be fixed
    if derived(0) != 0 or derived(INF) != INF:
        failures.append("0 and infinity are not fixed by the chart map")
    for c in [QuadraticNumber(1, 0, -3), rho(), rho() * rho()]:
        if derived(c) != c:
            failures.append(f"{c} is not fixed")
    printed = RationalMap1D.of(*PRINTED_G4)
    neg = Mobius.scaling(-1)
    relation = None
    if printed == halley:
        relation = "identical"
    elif halley.conjugate(neg) == printed:
        relation = "printed = halley conjugated by z -> -z"
    return CheckReport("", 3, "fail" if failures else "pass",
                       "; ".join(failures) or None,
                       {"derived": str(derived), "halley": str(halley), "conjugacy": found,
                        "printed": str(printed), "printed_relation": relation})


# -- planar real charts --------------------------------------------------------

# Chart positions are stored as (x, eta) with y = sqrt(3) * eta, which keeps
# the projective transform rational.
_TRIANGLE = [((1, 0, 0), (1, 0)),
             ((0, 1, 0), (Fraction(-1, 2), Fraction(1, 2))),
             ((0, 0, 1), (Fraction(-1, 2), Fraction(-1, 2))),
             ((1, 1, 1), (0, 0)),
             ((0, 1, 1), (Fraction(-1, 2), 0)),
             ((1, 0, 1), (Fraction(1, 4), Fraction(-1, 4))),
             ((1, 1, 0), (Fraction(1, 4), Fraction(1, 4)))]


def _xy_poly(terms: dict) -> Poly:
    return Poly(2, terms)


PRINTED_PLANAR = {
    4: dict(
        subspace=SubspaceSpec.of(),
        marks=_TRIANGLE,
        x=_xy_poly({(4, 0): 45, (5, 0): 36, (2, 2): -90, (0, 4): -15, (1, 4): 60}),
        y=_xy_poly({(1, 3): -120, (2, 3): 120, (0, 5): 24}),
        den=_xy_poly({(0, 0): 1, (2, 0): -10, (3, 0): 20, (4, 0): 30, (5, 0): 40,
                      (0, 2): -10, (1, 2): -60, (2, 2): 60, (3, 2): -80,
                      (0, 4): 30, (1, 4): -120})),
    5: dict(
        subspace=SubspaceSpec.of(zeroed=[4]),
        marks=_TRIANGLE,
        x=_xy_poly({(4, 0): 135, (5, 0): 216, (6, 0): 135, (2, 2): -270, (4, 2): -135,
                    (0, 4): -45, (1, 4): 360, (2, 4): -315, (0, 6): -45}),
        y=_xy_poly({(1, 3): -360, (2, 3): 720, (3, 3): -360, (0, 5): 144, (1, 5): -360}),
        den=_xy_poly({(0, 0): 1, (2, 0): -15, (3, 0): 40, (4, 0): 90, (5, 0): 240, (6, 0): 130,
                      (0, 2): -15, (1, 2): -120, (2, 2): 180, (3, 2): -480, (4, 2): 30,
                      (0, 4): 90, (1, 4): -720, (2, 4): 630, (0, 6): 90})),
}


def chart_transform(correspondences) -> list[list[Fraction]]:
    """3x3 matrix P with P v proportional to (x, eta, 1) for every pair.

    Raises UsageError when the correspondences do not pin down P.
    """
    rows = []
    for v, (x, e) in correspondences:
        c = (Fraction(x), Fraction(e), Fraction(1))
        # (P v) x c = 0, unknowns P[i][j] at index 3 i + j
        for i, j in ((1, 2), (2, 0), (0, 1)):
            row = [Fraction(0)] * 9
            for k in range(3):
                row[3 * i + k] += c[j] * v[k]
                row[3 * j + k] -= c[i] * v[k]
            rows.append(row)
    ker = nullspace(rows, 9)
    if len(ker) != 1:
        raise UsageError(f"chart transform has a {len(ker)}-dimensional solution space")
    k = ker[0]
    return [k[0:3], k[3:6], k[6:9]]


def _adjugate3(P):
    def m(i, j):
        r = [x for x in range(3) if x != i]
        c = [y for y in range(3) if y != j]
        return P[r[0]][c[0]] * P[r[1]][c[1]] - P[r[0]][c[1]] * P[r[1]][c[0]]
    return [[(-1) ** (i + j) * m(j, i) for j in range(3)] for i in range(3)]


def planar_chart_map(n: int) -> tuple[list[Poly], list[list[Fraction]]]:
    """Components (X, H, W) of P o g o P^-1 dehomogenised at W = 1, in (x, eta)."""
    spec = PRINTED_PLANAR[n]
    r = restrict(build_map(n), spec["subspace"])
    if r.nvars != 3:
        raise UsageError("planar chart needs a 3-dimensional subspace")
    P = chart_transform(spec["marks"])
    Q = _adjugate3(P)
    x, e = Poly.variables(2)
    one = Poly.const(2, 1)
    chart = [x, e, one]
    pre = [sum((chart[j] * Q[i][j] for j in range(3)), Poly.zero(2)) for i in range(3)]
    g = [c.subs(pre) for c in r.components]
    out = [sum((g[j] * P[i][j] for j in range(3)), Poly.zero(2)) for i in range(3)]
    return out, P


def sqrt3_rescale(p: Poly, odd: bool) -> Poly | None:
    """Rewrite p(x, y) with y = sqrt(3) eta, divided by sqrt(3) when ``odd``.

    Returns None if the parity of the y-degrees makes the result irrational.
    """
    out = {}
    for (a, b), c in p.terms.items():
        if (b % 2 == 1) != odd:
            return None
        out[(a, b)] = c * 3 ** (b // 2)
    return Poly(2, out)


@_timed("check-planar")
def planar_map_check(n: int) -> CheckReport:
    if n not in PRINTED_PLANAR:
        raise UsageError("planar map check is available for n = 4 and n = 5")
    spec = PRINTED_PLANAR[n]
    (X, H, W), P = planar_chart_map(n)
    px = sqrt3_rescale(spec["x"], odd=False)
    py = sqrt3_rescale(spec["y"], odd=True)
    pd = sqrt3_rescale(spec["den"], odd=False)
    failures = []
    if px is None or py is None or pd is None:
        failures.append("printed map does not have the expected y-parity")
        lam = None
    else:
        e0, c0 = pd.leading()
        lam = Fraction(W.coefficient(e0)) / Fraction(c0)
        for name, mine, theirs in (("x", X, px), ("y", H, py), ("denominator", W, pd)):
            if mine != theirs * lam:
                failures.append(f"{name} component differs: residual {(mine - theirs * lam).to_str(['x', 'eta'])}")
    fixed = []
    for v, (x, e) in spec["marks"]:
        pt = [Fraction(x), Fraction(e)]
        w = W(pt)
        img = (X(pt) / w, H(pt) / w) if w else None
        fixed.append(img == (pt[0], pt[1]))
    if not all(fixed):
        failures.append("a marked attractor is not fixed by the chart map")
    return CheckReport("", n, "fail" if failures else "pass", "; ".join(failures) or None,
                       {"scalar": None if lam is None else str(lam),
                        "transform": [[str(c) for c in row] for row in P],
                        "marked_points_fixed": all(fixed)})
