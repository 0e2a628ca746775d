"""Exact checks of the identities and structural claims about g.

Every check returns a :class:`CheckReport`.  Residuals are computed with
exact rational polynomials, so a pass means the residual is literally zero.
Checks that inspect the map accept an optional ``family`` so that tests can
feed in deliberately damaged maps.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from functools import wraps
from itertools import combinations
from math import comb, factorial
from typing import Callable, Iterator, Sequence

from . import group
from .exactpoly import (NotDivisible, Poly, UsageError, divexact, divides,
                        elem_sym, evaluate_exact, linear_form, multiplicity,
                        substitute_linear)
from .linalg import det, det_poly, nullspace, rank
from .mapfamily import (G_factor, MapFamily, SubspaceSpec, build_map, jacobian,
                        jacobian_at, restrict, weight)

# exact determinant expansion beyond these sizes is refused
MAX_N_DETERMINANT = 6
MAX_N_UNIQUENESS = 5


@dataclass
class CheckReport:
    check: str
    n: int | None
    verdict: str
    witness: str | None = None
    details: dict = field(default_factory=dict)
    elapsed_ms: float = 0.0

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def to_json(self) -> dict:
        out = {"check": self.check, "n": self.n, "verdict": self.verdict}
        if self.witness is not None:
            out["witness"] = self.witness
        if self.details:
            out["details"] = self.details
        out["elapsed_ms"] = round(self.elapsed_ms, 3)
        return out

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        where = "" if self.n is None else f" n={self.n}"
        extra = f"  witness: {self.witness}" if self.witness else ""
        return f"[{tag}] {self.check}{where}{extra}"


def _timed(name: str):
    def deco(fn: Callable[..., CheckReport]):
        @wraps(fn)
        def run(*args, **kwargs) -> CheckReport:
            t0 = time.perf_counter()
            rep = fn(*args, **kwargs)
            rep.check = name
            rep.elapsed_ms = (time.perf_counter() - t0) * 1e3
            return rep
        run.check_name = name
        return run
    return deco


def _report(n, failures: list[str], details=None) -> CheckReport:
    return CheckReport("", n, "fail" if failures else "pass",
                       "; ".join(failures[:3]) if failures else None, details or {})


def _short(p: Poly, limit: int = 160) -> str:
    s = str(p)
    return s if len(s) <= limit else s[:limit] + " ..."


def _need_n(n: int, lo: int = 3, hi: int | None = None, what: str = "") -> None:
    if n < lo:
        raise UsageError(f"n must be at least {lo}, got {n}")
    if hi is not None and n > hi:
        raise UsageError(f"{what} is limited to n <= {hi} (exact expansion cost); got n={n}")


def mutate_coefficient(m: MapFamily, component: int = 1, delta=1) -> MapFamily:
    """Copy of ``m`` with the leading coefficient of one component shifted."""
    comp = m.components[component - 1]
    e, _ = comp.leading()
    return m.with_component(component, comp + Poly.monomial(e, delta))


# -- equivariance -------------------------------------------------------------

def equivariance_residual(m: MapFamily, M: group.GroupElement) -> list[Poly]:
    """g(M u) - M g(u), componentwise."""
    rows = M.rows()
    left = [substitute_linear(c, rows) for c in m.components]
    out = []
    for i, row in enumerate(rows):
        right = Poly.zero(m.nvars)
        for a, c in zip(row, m.components):
            if a:
                right = right + c * a
        out.append(left[i] - right)
    return out


@_timed("equivariance")
def check_equivariance(n: int, family: MapFamily | None = None,
                       elements: Sequence[group.GroupElement] | None = None) -> CheckReport:
    _need_n(n)
    m = family or build_map(n)
    gens = list(elements) if elements is not None else group.generators(n)
    failures = []
    for idx, M in enumerate(gens):
        for i, r in enumerate(equivariance_residual(m, M)):
            if not r.is_zero():
                failures.append(f"element {idx} component {i + 1}: {_short(r)}")
    return _report(n, failures, {"elements": len(gens)})


def random_words(n: int, count: int, seed: int = 1, length: int = 8) -> list[group.GroupElement]:
    rng = random.Random(seed)
    gens = group.generators(n)
    words = []
    for _ in range(count):
        M = gens[rng.randrange(len(gens))]
        for _ in range(rng.randint(1, length) - 1):
            M = M @ gens[rng.randrange(len(gens))]
        words.append(M)
    return words


@_timed("equivariance-words")
def check_equivariance_words(n: int, count: int = 20, seed: int = 1,
                             family: MapFamily | None = None) -> CheckReport:
    rep = check_equivariance(n, family, random_words(n, count, seed))
    rep.details.update(seed=seed)
    return rep


# -- elementary symmetric functions under T -----------------------------------

def snk_rhs(n: int, k: int, reverse: bool = False) -> Poly:
    """sum_l (-1)^l C(n-k+l, n-k) u1^l S_{n,k-l}, with S_{n,n} = 0."""
    d = n - 1
    u1 = Poly.var(d, 1)
    order = range(k, -1, -1) if reverse else range(k + 1)
    out = Poly.zero(d)
    for l in order:
        if k - l > n - 1:
            continue
        out = out + (u1**l) * elem_sym(n, k - l) * ((-1) ** l * comb(n - k + l, n - k))
    return out


def _esym_of_forms(forms: Sequence[Poly], k: int) -> Poly:
    """e_k of a list of polynomials via the product recurrence."""
    nv = forms[0].nvars
    e = [Poly.const(nv, 1)] + [Poly.zero(nv)] * k
    for f in forms:
        for j in range(k, 0, -1):
            e[j] = e[j] + e[j - 1] * f
    return e[k]


@_timed("lemma-snk")
def check_lemma_snk(n: int) -> CheckReport:
    _need_n(n)
    d = n - 1
    T = group.transposition_T(n).rows()
    images = [Poly(d, {tuple(int(j == c) for j in range(d)): a
                       for c, a in enumerate(row) if a}) for row in T]
    failures = []
    for k in range(n + 1):
        lhs = substitute_linear(elem_sym(n, k), T) if k <= n - 1 else Poly.zero(d)
        rhs = snk_rhs(n, k)
        if lhs != rhs:
            failures.append(f"k={k}: residual {_short(lhs - rhs)}")
        # independent route: e_k of the transformed coordinates, reversed sum
        alt = _esym_of_forms(images, k) if k <= d else Poly.zero(d)
        if alt != snk_rhs(n, k, reverse=True):
            failures.append(f"k={k}: cross-check residual {_short(alt - snk_rhs(n, k, True))}")
    return _report(n, failures, {"k_range": [0, n]})


# -- summation identities ---------------------------------------------------

def spec_sum_lhs(m: int, reverse: bool = False) -> Fraction:
    ks = range(m, -1, -1) if reverse else range(m + 1)
    return sum((Fraction((-1) ** k * (k + 1), factorial(k + 3) * factorial(m - k)) for k in ks),
               Fraction(0))


def spec_sum_rhs(m: int) -> Fraction:
    return Fraction(m + 1, factorial(m + 3))


@_timed("spec-sum")
def check_spec_sum(m_max: int) -> CheckReport:
    if m_max < 0:
        raise UsageError("m_max must be non-negative")
    failures = []
    for m in range(m_max + 1):
        lhs, rhs = spec_sum_lhs(m), spec_sum_rhs(m)
        if lhs != rhs:
            failures.append(f"m={m}: {lhs} != {rhs}")
        if spec_sum_lhs(m, reverse=True) != lhs:
            failures.append(f"m={m}: summation order changes the value")
    return _report(None, failures, {"m_max": m_max})


def g2_spec_sum_lhs(m: int, reverse: bool = False) -> Poly:
    u1, u2 = Poly.variables(2)
    ks = range(m, -1, -1) if reverse else range(m + 1)
    out = Poly.zero(2)
    for k in ks:
        out = out + (u1 ** (m - k)) * ((u2 - u1) ** (k + 3)) * (Fraction(k + 1, k + 3) * comb(m + 2, k + 2))
    return out


def g2_spec_sum_rhs(m: int) -> Poly:
    u1, u2 = Poly.variables(2)
    return (u2 ** (m + 3) - u1 ** (m + 3)) * Fraction(m + 1, m + 3) - u1 * u2 * (u2 ** (m + 1) - u1 ** (m + 1))


@_timed("g2-spec-sum")
def check_g2_spec_sum(m_max: int) -> CheckReport:
    if m_max < 0:
        raise UsageError("m_max must be non-negative")
    failures = []
    for m in range(m_max + 1):
        lhs, rhs = g2_spec_sum_lhs(m), g2_spec_sum_rhs(m)
        if lhs != rhs:
            failures.append(f"m={m}: residual {_short(lhs - rhs)}")
        if g2_spec_sum_lhs(m, reverse=True) != lhs:
            failures.append(f"m={m}: summation order changes the value")
    return _report(None, failures, {"m_max": m_max})


def g1pm_sum(n: int, m: int, reverse: bool = False) -> Fraction:
    """Left side: sum_p (-1)^p (n-p-1)/(n-p+1) C(m, p)."""
    ps = range(m, -1, -1) if reverse else range(m + 1)
    return sum((Fraction((-1) ** p * (n - p - 1) * comb(m, p), n - p + 1) for p in ps), Fraction(0))


def g1pm_closed(n: int, m: int) -> Fraction:
    """Right side: 2 (-1)^(m-1) / ((n+1) C(n, m))."""
    return Fraction(2 * (-1) ** ((m - 1) % 2), (n + 1) * comb(n, m))


def G1_at_pm(n: int, m: int) -> Fraction:
    """Closed-form value of G_1 at the point with m leading ones."""
    return (-1) ** (n % 2) * g1pm_closed(n, m)


@_timed("g1pm")
def check_g1pm(n: int) -> CheckReport:
    _need_n(n)
    failures = []
    sums = {}
    for m in range(1, -(-(n - 1) // 2) + 1):
        lam, L = g1pm_sum(n, m), g1pm_closed(n, m)
        sums[m] = {"lhs": str(lam), "rhs": str(L)}
        if lam != L:
            failures.append(f"m={m}: sum {lam} != closed form {L}")
        if g1pm_sum(n, m, reverse=True) != lam:
            failures.append(f"m={m}: summation order changes the value")
    G1 = G_factor(n)
    values = {}
    for sp in group.special_points(n):
        m = sum(sp.coords)
        got = evaluate_exact(G1, sp.coords)
        want = G1_at_pm(n, m)
        values[sp.name] = str(got)
        if got != want:
            failures.append(f"G_1({sp.name}) = {got}, closed form {want}")
    return _report(n, failures, {"identity": sums, "G1_values": values})


# -- critical set ------------------------------------------------------------

def mirror_product(n: int, power: int = 1) -> Poly:
    d = n - 1
    out = Poly.const(d, 1)
    for f in group.hyperplane_forms(n):
        out = out * f ** power
    return out


@_timed("critical-factorization")
def check_critical_factorization(n: int, family: MapFamily | None = None) -> CheckReport:
    _need_n(n, hi=MAX_N_DETERMINANT, what="critical-factorization")
    m = family or build_map(n)
    D = det_poly(jacobian(m))
    failures = []
    if D.is_zero():
        return _report(n, ["Jacobian determinant is identically zero"])
    if D.degree() != (n - 1) * n or not D.is_homogeneous():
        failures.append(f"determinant degree {D.degree()} != {(n - 1) * n}")
    q = D
    mults = {}
    for f in group.hyperplane_forms(n):
        k = 0
        for _ in range(2):
            try:
                q = divexact(q, f)
                k += 1
            except NotDivisible:
                break
        mults[str(f)] = k
        if k < 2:
            failures.append(f"mirror {f} divides det only {k} time(s)")
    details = {"det_degree": D.degree(), "det_terms": len(D), "multiplicities": mults}
    if not failures:
        if not q.is_constant():
            failures.append(f"cofactor is not constant: {_short(q)}")
        else:
            details["constant"] = str(q.constant_value())
            details["constant_unscaled"] = str(Fraction(q.constant_value()) / Fraction(m.scale) ** (n - 1))
    return _report(n, failures, details)


@_timed("hyperplane-invariance")
def check_hyperplane_invariance(n: int, family: MapFamily | None = None) -> CheckReport:
    _need_n(n)
    m = family or build_map(n)
    d = m.nvars
    failures = []
    for k in range(1, d + 1):
        if not divides(Poly.var(d, k), m.components[k - 1]):
            failures.append(f"u{k} does not divide g{k}")
    for i, j in combinations(range(1, d + 1), 2):
        diff = m.components[i - 1] - m.components[j - 1]
        if not divides(linear_form(d, {i: 1, j: -1}), diff):
            failures.append(f"u{i}-u{j} does not divide g{i}-g{j}")
    return _report(n, failures)


def component_multiplicities(m: MapFamily) -> list[int]:
    """Order of vanishing of g_l along u_l = 0."""
    return [multiplicity(c, Poly.var(m.nvars, l)) for l, c in enumerate(m.components, 1)]


# -- holomorphy --------------------------------------------------------------

def mirror_intersections(d: int) -> Iterator[SubspaceSpec]:
    """Every intersection of mirrors in C^d, including C^d itself.

    These are the set partitions of {0, 1, ..., d}: the block holding 0
    lists the zeroed coordinates, other blocks are equality classes.
    Only subspaces of positive dimension are produced.
    """
    def partitions(items):
        if not items:
            yield []
            return
        first, rest = items[0], items[1:]
        for part in partitions(rest):
            for i in range(len(part)):
                yield part[:i] + [[first] + part[i]] + part[i + 1:]
            yield [[first]] + part

    for part in partitions(list(range(d + 1))):
        zero_block = next(b for b in part if 0 in b)
        zeroed = [i for i in zero_block if i]
        classes = [tuple(sorted(b)) for b in part if 0 not in b]
        if classes:
            yield SubspaceSpec.of(zeroed, [c for c in classes if len(c) > 1])


def _det_certificate(m: MapFamily, rng: random.Random, tries: int = 12):
    """A point where the Jacobian determinant is nonzero, or None."""
    J = jacobian(m)
    for _ in range(tries):
        pt = [rng.randint(-9, 9) for _ in range(m.nvars)]
        val = det([[evaluate_exact(e, pt) for e in row] for row in J])
        if val:
            return pt, val
    # fall back to full expansion before declaring the determinant zero
    return None if det_poly(J).is_zero() else ("symbolic", None)


@_timed("holomorphy")
def check_holomorphy_certificates(n: int, family: MapFamily | None = None, seed: int = 1) -> CheckReport:
    _need_n(n)
    m = family or build_map(n)
    d = m.nvars
    failures = []
    points = sorted({p for row in group.orbit_table(n) for p in row.members})
    npoints = len(points)
    for p in points:
        if not any(m(p.coords)):
            failures.append(f"lift vanishes at {list(p.coords)}")
    rng = random.Random(seed)
    nspaces = 0
    for s in mirror_intersections(d):
        nspaces += 1
        r = restrict(m, s, check_invariant=False)
        if _det_certificate(r, rng) is None:
            failures.append(f"restricted determinant vanishes on {s.to_json()}")
    return _report(n, failures, {"special_points": npoints, "subspaces": nspaces})


def _identical_nonzero_rows(J) -> bool:
    nz = [row for row in J if any(row)]
    return all(row == nz[0] for row in nz)


@_timed("jacobian-rank-pm")
def check_jacobian_rank_pm(n: int, family: MapFamily | None = None) -> CheckReport:
    _need_n(n)
    m = family or build_map(n)
    d = m.nvars
    failures = []
    ranks = {}
    for k in range(1, d + 1):
        p = [1] * k + [0] * (d - k)
        J = jacobian_at(m, p)
        rk = rank(J)
        ranks[k] = rk
        if rk != 1:
            failures.append(f"rank {rk} at p_{k}")
        if any(any(row) for row in J[k:]):
            failures.append(f"rows after {k} not zero at p_{k}")
        if not _identical_nonzero_rows(J):
            failures.append(f"nonzero rows differ at p_{k}")
    return _report(n, failures, {"ranks": ranks})


@_timed("first-row-vanish")
def check_first_row_vanish(n: int, family: MapFamily | None = None) -> CheckReport:
    _need_n(n)
    m = family or build_map(n)
    d = m.nvars
    u1sq = Poly.var(d, 1) ** 2
    failures = []
    for j in range(1, d + 1):
        entry = m.components[0].diff(j)
        if not divides(u1sq, entry):
            failures.append(f"u1^2 does not divide d g1/d u{j}")
    return _report(n, failures)


# -- uniqueness --------------------------------------------------------------

def partitions_bounded(total: int, largest: int) -> list[tuple[int, ...]]:
    """Integer partitions of ``total`` with parts <= ``largest``, parts descending."""
    if total == 0:
        return [()]
    out = []
    for first in range(min(total, largest), 0, -1):
        for rest in partitions_bounded(total - first, first):
            out.append((first,) + rest)
    return out


@dataclass
class UniquenessAnsatz:
    """h_k = u_k^3 sum_l u_k^(n-2-l) V_l with each V_l a symmetric polynomial.

    ``basis[l]`` holds products of elementary symmetric functions indexed by
    partitions of l; one unknown coefficient per basis element.
    """

    n: int
    basis: dict[int, list[tuple[tuple[int, ...], Poly]]]

    @classmethod
    def build(cls, n: int) -> "UniquenessAnsatz":
        d = n - 1
        basis = {}
        for l in range(n - 1):
            elems = []
            for lam in partitions_bounded(l, d):
                b = Poly.const(d, 1)
                for part in lam:
                    b = b * elem_sym(n, part)
                elems.append((lam, b))
            basis[l] = elems
        return cls(n, basis)

    @property
    def unknowns(self) -> list[tuple[int, tuple[int, ...]]]:
        return [(l, lam) for l in sorted(self.basis) for lam, _ in self.basis[l]]

    def first_component(self, coeffs: Sequence) -> Poly:
        d = self.n - 1
        u1 = Poly.var(d, 1)
        out = Poly.zero(d)
        for c, (l, lam) in zip(coeffs, self.unknowns):
            if c:
                b = dict(self.basis[l])[lam]
                out = out + u1 ** (self.n + 1 - l) * b * c
        return out

    def V(self, coeffs: Sequence, l: int) -> Poly:
        d = self.n - 1
        out = Poly.zero(d)
        for c, (ll, lam) in zip(coeffs, self.unknowns):
            if ll == l and c:
                out = out + dict(self.basis[l])[lam] * c
        return out

    def independent(self) -> bool:
        for elems in self.basis.values():
            monos = sorted({e for _, b in elems for e in b.terms})
            rows = [[b.coefficient(e) for e in monos] for _, b in elems]
            if rank(rows) != len(elems):
                return False
        return True

    def conditions(self) -> list[list]:
        """Linear system whose kernel is the set of T-equivariant ansatz maps."""
        T = group.transposition_T(self.n).rows()
        columns = []
        for idx in range(len(self.unknowns)):
            coeffs = [int(i == idx) for i in range(len(self.unknowns))]
            h1 = self.first_component(coeffs)
            h2 = h1.swap(1, 2)
            r1 = -h1 - substitute_linear(h1, T)
            r2 = (h2 - h1) - substitute_linear(h2, T)
            columns.append((r1, r2))
        monos1 = sorted({e for r1, _ in columns for e in r1.terms})
        monos2 = sorted({e for _, r2 in columns for e in r2.terms})
        rows = [[r1.coefficient(e) for r1, _ in columns] for e in monos1]
        rows += [[r2.coefficient(e) for _, r2 in columns] for e in monos2]
        return rows


def _proportional(a: Poly, b: Poly):
    """Scalar c with a == c*b, or None."""
    if b.is_zero():
        return 0 if a.is_zero() else None
    e, cb = b.leading()
    c = Fraction(a.coefficient(e)) / Fraction(cb)
    return c if a == b * c else None


@_timed("uniqueness")
def check_uniqueness(n: int) -> CheckReport:
    _need_n(n, hi=MAX_N_UNIQUENESS, what="uniqueness")
    ans = UniquenessAnsatz.build(n)
    details: dict = {"unknowns": len(ans.unknowns)}
    if not ans.independent():
        return _report(n, ["invariant basis is linearly dependent"], details)
    rows = ans.conditions()
    kernel = nullspace(rows, len(ans.unknowns)) if rows else [
        [Fraction(int(i == j)) for i in range(len(ans.unknowns))] for j in range(len(ans.unknowns))]
    details["kernel_dim"] = len(kernel)
    if len(kernel) != 1:
        return _report(n, [f"solution space has dimension {len(kernel)}"], details)
    sol = kernel[0]
    g = build_map(n)
    h1 = ans.first_component(sol)
    c = _proportional(h1, g.components[0])
    failures = []
    if c is None or c == 0:
        failures.append("solved map is not proportional to g")
    else:
        # rescale so that h equals the closed form (scale 1)
        sol = [x / (c * g.scale) for x in sol]
        details["solution"] = {f"V{l}{list(lam)}": str(x) for x, (l, lam) in zip(sol, ans.unknowns)}
        Vtop = ans.V(sol, n - 2)
        alpha = _proportional(Vtop, elem_sym(n, n - 2))
        if alpha is None or alpha == 0:
            failures.append(f"V_(n-2) = {_short(Vtop)} is not a multiple of S_(n,n-2)")
        else:
            details["alpha"] = str(alpha)
        # coefficient of u1^k S_{n,n-2-k} must be (-1)^k (k+1)/(k+3)
        d = n - 1
        u1 = Poly.var(d, 1)
        G = Poly.zero(d)
        for k in range(n - 1):
            G = G + u1**k * elem_sym(n, n - 2 - k) * weight(k)
        if ans.first_component(sol) != u1**3 * G:
            failures.append("normalised solution differs from the closed form")
    return _report(n, failures, details)


# -- registry ----------------------------------------------------------------

CHECKS: dict[str, Callable[..., CheckReport]] = {
    "equivariance": check_equivariance,
    "lemma-snk": check_lemma_snk,
    "spec-sum": check_spec_sum,
    "g2-spec-sum": check_g2_spec_sum,
    "g1pm": check_g1pm,
    "critical-factorization": check_critical_factorization,
    "hyperplane-invariance": check_hyperplane_invariance,
    "holomorphy": check_holomorphy_certificates,
    "jacobian-rank-pm": check_jacobian_rank_pm,
    "first-row-vanish": check_first_row_vanish,
    "uniqueness": check_uniqueness,
}

# largest n each map check accepts
N_LIMITS = {"critical-factorization": MAX_N_DETERMINANT, "uniqueness": MAX_N_UNIQUENESS}

DEFAULT_M_MAX = {"spec-sum": 50, "g2-spec-sum": 20}


def run_check(name: str, n: int, m_max: int | None = None) -> CheckReport:
    if name not in CHECKS:
        raise UsageError(f"unknown check {name!r}; choose from {', '.join(CHECKS)}")
    fn = CHECKS[name]
    if name in DEFAULT_M_MAX:
        rep = fn(DEFAULT_M_MAX[name] if m_max is None else m_max)
        return rep
    return fn(n)
