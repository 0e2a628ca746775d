"""Floating-point iteration of g on projective space and basin labels.

Points are carried as unit vectors in C^d; after every application of the
map the image is renormalised.  A point is captured when it comes within
``eps`` (chordal distance) of one of the superattracting special points and
stays within ``10 * eps`` for the next ``CONFIRM`` iterations.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from ..exactpoly import UsageError
from ..group import GroupElement, ProjPointExact, orbit, special_points
from ..mapfamily import MapFamily, build_map, compile_float, jacobian

DEFAULT_EPS = 1e-8
DEFAULT_MAX_ITER = 500
DEFAULT_SEED = 1
CONFIRM = 5
UNDERFLOW = 1e-300
CHUNK = 2048
UNRESOLVED = -1

Evaluator = Callable[[np.ndarray], np.ndarray]


def thread_count() -> int:
    """Worker threads, from CRITMAPS_THREADS (default: cpu count, max 8)."""
    env = os.environ.get("CRITMAPS_THREADS")
    if env:
        try:
            k = int(env)
        except ValueError:
            raise UsageError(f"CRITMAPS_THREADS must be an integer, got {env!r}") from None
        if k < 1:
            raise UsageError("CRITMAPS_THREADS must be at least 1")
        return k
    return min(os.cpu_count() or 1, 8)


@dataclass(frozen=True)
class ProjPointFloat:
    coords: np.ndarray

    @classmethod
    def of(cls, coords: Sequence) -> "ProjPointFloat":
        v = np.asarray(coords, dtype=np.complex128)
        nrm = np.linalg.norm(v)
        if nrm == 0:
            raise UsageError("the zero vector is not a projective point")
        return cls(v / nrm)

    def __len__(self) -> int:
        return len(self.coords)


@dataclass(frozen=True)
class Attractor:
    orbit_id: int
    point_id: int
    orbit_name: str
    exact: ProjPointExact
    point: ProjPointFloat

    @property
    def label(self) -> str:
        return f"{self.orbit_name}:{self.point_id}"


@dataclass(frozen=True)
class BasinResult:
    label: int  # index into the attractor list, or UNRESOLVED
    iterations: int
    final_distance: float
    flag: str | None = None

    @property
    def resolved(self) -> bool:
        return self.label != UNRESOLVED


def fs_distance(a, b) -> float:
    """Chordal Fubini-Study distance between two unit vectors."""
    a = np.asarray(getattr(a, "coords", a), dtype=np.complex128)
    b = np.asarray(getattr(b, "coords", b), dtype=np.complex128)
    ip = np.vdot(a, b)
    return float(min(np.linalg.norm(b - ip * a), 1.0))


def attractor_points(n: int) -> list[Attractor]:
    """Every point of every distinct special-point orbit.

    Orbits are numbered in the order their first special point appears
    (p_1, q_1, p_2, ...); a q_k whose orbit was already listed is skipped.
    Points inside an orbit are sorted by their canonical coordinates.
    """
    out: list[Attractor] = []
    seen: set[ProjPointExact] = set()
    oid = 0
    for sp in special_points(n):
        if sp.point in seen:
            continue
        members = sorted(orbit(sp.point, n))
        seen.update(members)
        for pid, p in enumerate(members):
            out.append(Attractor(oid, pid, sp.name, p, ProjPointFloat.of(p.coords)))
        oid += 1
    return out


def attractor_matrix(attractors: Sequence[Attractor]) -> np.ndarray:
    return np.array([a.point.coords for a in attractors], dtype=np.complex128)


def _distances(A: np.ndarray, Z: np.ndarray) -> np.ndarray:
    """(K, N) chordal distances from the K rows of A to the N columns of Z."""
    ip = A.conj() @ Z
    out = np.empty(ip.shape)
    for k in range(A.shape[0]):
        r = Z - A[k][:, None] * ip[k]
        out[k] = np.sqrt((r.real ** 2 + r.imag ** 2).sum(axis=0))
    return out


def _normalise(Z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    nrm = np.sqrt((Z.real ** 2 + Z.imag ** 2).sum(axis=0))
    ok = np.isfinite(nrm) & (nrm >= UNDERFLOW)
    safe = np.where(ok, nrm, 1.0)
    return Z / safe, ok


def _classify_chunk(evaluate: Evaluator, Z: np.ndarray, A: np.ndarray,
                    max_iter: int, eps: float):
    N = Z.shape[1]
    label = np.full(N, UNRESOLVED, dtype=np.int64)
    iters = np.full(N, max_iter, dtype=np.int64)
    dist = np.full(N, np.nan)
    flag = np.zeros(N, dtype=np.int8)  # 1 underflow, 2 non-finite start
    Z, ok = _normalise(Z)
    flag[~ok] = 2
    idx = np.nonzero(ok)[0]
    Z = Z[:, idx]
    cand = np.full(len(idx), UNRESOLVED, dtype=np.int64)
    since = np.zeros(len(idx), dtype=np.int64)
    cand_it = np.zeros(len(idx), dtype=np.int64)
    cand_d = np.zeros(len(idx))
    it = 0
    while len(idx):
        D = _distances(A, Z)
        cols = np.arange(len(idx))
        waiting = cand != UNRESOLVED
        # confirmation: captured points must stay within 10 eps of their attractor
        if waiting.any():
            dc = D[np.where(waiting, cand, 0), cols]
            held = waiting & (dc < 10 * eps)
            since = np.where(held, since + 1, since)
            lost = waiting & ~held
            cand[lost] = UNRESOLVED
        near = D < eps
        fresh = (cand == UNRESOLVED) & near.any(axis=0) & (it <= max_iter)
        if fresh.any():
            first = np.argmax(near, axis=0)
            cand[fresh] = first[fresh]
            cand_it[fresh] = it
            cand_d[fresh] = D[first[fresh], cols[fresh]]
            since[fresh] = 0
        done = (cand != UNRESOLVED) & (since >= CONFIRM)
        timeout = (cand == UNRESOLVED) & (it >= max_iter)
        if done.any():
            label[idx[done]] = cand[done]
            iters[idx[done]] = cand_it[done]
            dist[idx[done]] = cand_d[done]
        if timeout.any():
            dist[idx[timeout]] = D.min(axis=0)[timeout]
        keep = ~(done | timeout)
        if not keep.all():
            idx, Z = idx[keep], Z[:, keep]
            cand, since, cand_it, cand_d = cand[keep], since[keep], cand_it[keep], cand_d[keep]
        if not len(idx):
            break
        with np.errstate(all="ignore"):
            Z, ok = _normalise(evaluate(Z))
        if not ok.all():
            bad = ~ok
            flag[idx[bad]] = 1
            iters[idx[bad]] = it + 1
            idx, Z = idx[ok], Z[:, ok]
            cand, since, cand_it, cand_d = cand[ok], since[ok], cand_it[ok], cand_d[ok]
        it += 1
    return label, iters, dist, flag


@dataclass
class BasinBatch:
    """Column-wise results of classifying a batch of starting points."""

    label: np.ndarray
    iterations: np.ndarray
    final_distance: np.ndarray
    flag: np.ndarray

    def __len__(self) -> int:
        return len(self.label)

    def result(self, i: int) -> BasinResult:
        f = {0: None, 1: "underflow", 2: "invalid start"}[int(self.flag[i])]
        return BasinResult(int(self.label[i]), int(self.iterations[i]),
                           float(self.final_distance[i]), f)


def classify(evaluate: Evaluator, starts: np.ndarray, attractors: Sequence[Attractor] | np.ndarray,
             max_iter: int = DEFAULT_MAX_ITER, eps: float = DEFAULT_EPS,
             threads: int | None = None) -> BasinBatch:
    """Basin labels for the columns of ``starts`` (shape (d, N)).

    Work is split into fixed chunks; each point's arithmetic is independent
    of the chunking, so the output is the same for every thread count.
    """
    if max_iter < 1:
        raise UsageError("max_iter must be at least 1")
    if not eps > 0:
        raise UsageError("eps must be positive")
    A = attractors if isinstance(attractors, np.ndarray) else attractor_matrix(attractors)
    Z = np.asarray(starts, dtype=np.complex128)
    if Z.ndim != 2 or Z.shape[0] != A.shape[1]:
        raise UsageError(f"starts must have shape ({A.shape[1]}, N)")
    N = Z.shape[1]
    bounds = [(i, min(i + CHUNK, N)) for i in range(0, N, CHUNK)]
    threads = thread_count() if threads is None else threads

    def work(b):
        return _classify_chunk(evaluate, Z[:, b[0]:b[1]], A, max_iter, eps)

    if threads > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(threads) as pool:
            parts = list(pool.map(work, bounds))
    else:
        parts = [work(b) for b in bounds]
    if not parts:
        empty = np.zeros(0, dtype=np.int64)
        return BasinBatch(empty, empty, np.zeros(0), np.zeros(0, dtype=np.int8))
    return BasinBatch(*(np.concatenate(p) for p in zip(*parts)))


def iterate(evaluate: Evaluator, start, attractors: Sequence[Attractor],
            max_iter: int = DEFAULT_MAX_ITER, eps: float = DEFAULT_EPS) -> BasinResult:
    z = np.asarray(getattr(start, "coords", start), dtype=np.complex128)
    return classify(evaluate, z[:, None], attractors, max_iter, eps, threads=1).result(0)


def sample_sphere(d: int, count: int, seed: int) -> np.ndarray:
    """``count`` complex-Gaussian unit vectors in C^d as columns (Philox stream)."""
    rng = np.random.Generator(np.random.Philox(seed))
    Z = rng.standard_normal((count, d)) + 1j * rng.standard_normal((count, d))
    Z /= np.linalg.norm(Z, axis=1, keepdims=True)
    return np.ascontiguousarray(Z.T)


class Dynamics:
    """Compiled map of degree n+1 together with its attractor list."""

    def __init__(self, n: int, family: MapFamily | None = None):
        self.n = n
        self.family = family or build_map(n)
        self.evaluate = compile_float(self.family)
        self.attractors = attractor_points(n)
        self.A = attractor_matrix(self.attractors)

    def classify(self, starts, max_iter=DEFAULT_MAX_ITER, eps=DEFAULT_EPS, threads=None) -> BasinBatch:
        return classify(self.evaluate, starts, self.A, max_iter, eps, threads)

    def iterate(self, start, max_iter=DEFAULT_MAX_ITER, eps=DEFAULT_EPS) -> BasinResult:
        return iterate(self.evaluate, start, self.attractors, max_iter, eps)

    def step(self, z: np.ndarray) -> np.ndarray:
        w = self.evaluate(np.asarray(z, dtype=np.complex128))
        return w / np.linalg.norm(w, axis=0)


def coverage_stat(n: int, samples: int, seed: int = DEFAULT_SEED,
                  max_iter: int = DEFAULT_MAX_ITER, eps: float = DEFAULT_EPS,
                  threads: int | None = None) -> dict:
    if samples < 1:
        raise UsageError("samples must be at least 1")
    dyn = Dynamics(n)
    batch = dyn.classify(sample_sphere(n - 1, samples, seed), max_iter, eps, threads)
    counts = np.bincount(batch.label[batch.label >= 0], minlength=len(dyn.attractors))
    histogram = {a.label: int(c) for a, c in zip(dyn.attractors, counts)}
    orbit_hist: dict[str, int] = {}
    for a, c in zip(dyn.attractors, counts):
        orbit_hist[a.orbit_name] = orbit_hist.get(a.orbit_name, 0) + int(c)
    unresolved = int((batch.label == UNRESOLVED).sum())
    resolved = batch.label >= 0
    return {
        "n": n, "samples": samples, "seed": seed, "max_iter": max_iter, "eps": eps,
        "resolved_fraction": (samples - unresolved) / samples,
        "unresolved": unresolved,
        "underflow": int((batch.flag == 1).sum()),
        "mean_iterations": float(batch.iterations[resolved].mean()) if resolved.any() else None,
        "histogram": histogram,
        "orbit_histogram": orbit_hist,
    }


def attractor_permutation(attractors: Sequence[Attractor], M: GroupElement) -> list[int]:
    """perm[i] = index of the image of attractor i under M."""
    where = {a.exact: i for i, a in enumerate(attractors)}
    perm = []
    for a in attractors:
        img = ProjPointExact.of(M.apply(list(a.exact.coords)))
        if img not in where:
            raise ValueError(f"{img.coords} is not an attractor")
        perm.append(where[img])
    return perm


def collapse_direction(family: MapFamily, point: Sequence) -> np.ndarray:
    """Unit kernel vector of Dg at a (float) point, normalised so the largest entry is 1.

    Informational only: reported at points of {u_1 = 0} where the first row
    of the Jacobian vanishes.
    """
    J = jacobian(family)
    z = np.asarray(point, dtype=np.complex128)
    mat = np.array([[complex(sum(float(c) * np.prod(z ** np.array(e)) for e, c in entry.terms.items()))
                     for entry in row] for row in J])
    _, _, vh = np.linalg.svd(mat)
    v = vh[-1].conj()
    v = v / v[np.argmax(np.abs(v))]
    return v
