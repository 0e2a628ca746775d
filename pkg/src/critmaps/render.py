"""Basin images on complex lines and real planes, written as binary PPM.

A job names a chart: either a g-invariant complex line with a Moebius
coordinate fixed by three marked attractors, or a real projective plane
whose affine chart is fixed by seven marked special points.  Each pixel
centre is pulled back to u-coordinates and classified by its basin.
"""

from __future__ import annotations

import colorsys
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import numpy as np

from .dynamics.basins import (DEFAULT_EPS, DEFAULT_MAX_ITER, UNRESOLVED, BasinBatch,
                              Dynamics, thread_count)
from .dynamics.charts import (INF, PRINTED_1D, PRINTED_PLANAR, Mobius, _adjugate3,
                              chart_transform, line_chart)
from .exactpoly import UsageError
from .mapfamily import SubspaceSpec
from .numberfield import QuadraticNumber, rho

SQRT3 = math.sqrt(3.0)
SHADINGS = ("none", "by_iteration_count")
UNRESOLVED_KEY = "unresolved"
MARGIN = 0.2


def parse_value(text):
    """Chart value from JSON: a rational, 'rho', 'rho^k' or 'inf'."""
    s = str(text).strip().replace(" ", "")
    if s == "inf":
        return INF
    if s.startswith("rho"):
        k = int(s[4:]) if s.startswith("rho^") else 1 if s == "rho" else None
        if k is None:
            raise UsageError(f"cannot parse chart value {text!r}")
        return rho() ** k
    try:
        return Fraction(s)
    except ValueError:
        raise UsageError(f"cannot parse chart value {text!r}") from None


def _as_complex(v) -> complex:
    if isinstance(v, QuadraticNumber):
        return complex(v)
    return complex(float(v))


@dataclass(frozen=True)
class Chart:
    """Chart description; ``kind`` is 'complex_line' or 'real_plane'.

    Marks pair an ambient u-point with its chart position: a value string
    for complex lines, an (x, eta) pair of rationals with y = sqrt(3) eta
    for real planes.
    """

    kind: str
    subspace: SubspaceSpec
    marks: tuple

    def validate(self, n: int) -> None:
        if self.kind not in ("complex_line", "real_plane"):
            raise UsageError(f"unknown chart type {self.kind!r}")
        d = n - 1
        dim = self.subspace.dim(d)
        want = 2 if self.kind == "complex_line" else 3
        if dim != want:
            raise UsageError(f"{self.kind} needs a subspace of dimension {want}, got {dim}")
        for p, _ in self.marks:
            if len(p) != d:
                raise UsageError(f"marked point {list(p)} must have {d} coordinates")
            if not self.subspace.contains(p, d):
                raise UsageError(f"marked point {list(p)} is not on the chart subspace")

    def pullback(self, n: int):
        """Function (x, y) arrays -> (d, N) complex u-coordinates."""
        d = n - 1
        E = np.array(self.subspace.embedding(d), dtype=np.float64)
        if self.kind == "complex_line":
            _, phi = line_chart(n, self.subspace, [(p, parse_value(v)) for p, v in self.marks])
            a, b, c, dd = phi.adjugate().complex_matrix()

            def pull(x, y):
                z = x + 1j * y
                return E @ np.vstack([a * z + b, c * z + dd])
        else:
            proj = [(tuple(self.subspace.project(p, d)), tuple(Fraction(t) for t in xy))
                    for p, xy in self.marks]
            Q = np.array([[float(q) for q in row] for row in _adjugate3(chart_transform(proj))])

            def pull(x, y):
                v = np.vstack([x, y / SQRT3, np.ones_like(x)])
                return (E @ (Q @ v)).astype(np.complex128)
        return pull

    def mark_positions(self) -> list[tuple[tuple[int, ...], tuple[float, float]]]:
        """Marked u-points with their chart positions as (x, y) floats."""
        out = []
        for p, v in self.marks:
            if self.kind == "complex_line":
                val = parse_value(v)
                if val == INF:
                    continue
                z = _as_complex(val)
                out.append((tuple(p), (z.real, z.imag)))
            else:
                x, e = (float(Fraction(t)) for t in v)
                out.append((tuple(p), (x, SQRT3 * e)))
        return out

    def to_json(self) -> dict:
        marks = [[list(p), str(v) if self.kind == "complex_line" else [str(t) for t in v]]
                 for p, v in self.marks]
        return {"type": self.kind, "subspace": self.subspace.to_json(), "marks": marks}

    @classmethod
    def from_json(cls, data: dict) -> "Chart":
        try:
            kind = data["type"]
            marks = tuple((tuple(int(x) for x in p),
                           str(v) if kind == "complex_line" else tuple(str(t) for t in v))
                          for p, v in data["marks"])
            return cls(kind, SubspaceSpec.from_json(data.get("subspace", {})), marks)
        except (KeyError, TypeError, ValueError) as exc:
            raise UsageError(f"malformed chart: {exc}") from None


def default_palette(labels: Sequence[str]) -> dict[str, tuple[int, int, int]]:
    """One hue per orbit, lightness varying with the point inside the orbit."""
    orbits: dict[str, list[str]] = {}
    for lab in labels:
        orbits.setdefault(lab.split(":")[0], []).append(lab)
    pal = {}
    for k, (name, members) in enumerate(orbits.items()):
        hue = (0.02 + 0.37 * k) % 1.0
        for j, lab in enumerate(members):
            h = (hue + 0.9 * j / (len(members) * max(len(orbits), 2))) % 1.0
            light = 0.38 + 0.3 * ((j * 0.618) % 1.0)
            r, g, b = colorsys.hls_to_rgb(h, light, 0.75)
            pal[lab] = (round(r * 255), round(g * 255), round(b * 255))
    pal[UNRESOLVED_KEY] = (0, 0, 0)
    return pal


@dataclass
class RenderJob:
    n: int
    chart: Chart
    center: tuple[float, float]
    width: float
    height: float
    resolution: tuple[int, int] = (256, 256)
    max_iter: int = DEFAULT_MAX_ITER
    eps: float = DEFAULT_EPS
    palette: dict | None = None
    shading: str = "by_iteration_count"
    name: str | None = None

    def validate(self) -> None:
        if self.n < 3:
            raise UsageError(f"n must be at least 3, got {self.n}")
        w, h = self.resolution
        if w < 1 or h < 1:
            raise UsageError("resolution must be positive")
        if not (self.width > 0 and self.height > 0) or not all(map(math.isfinite, (*self.center, self.width, self.height))):
            raise UsageError("window must have positive finite width and height")
        if self.max_iter < 1:
            raise UsageError("max_iter must be at least 1")
        if not self.eps > 0:
            raise UsageError("eps must be positive")
        if self.shading not in SHADINGS:
            raise UsageError(f"shading must be one of {SHADINGS}")
        self.chart.validate(self.n)
        if self.palette is not None:
            from .dynamics.basins import attractor_points
            need = {a.label for a in attractor_points(self.n)} | {UNRESOLVED_KEY}
            missing = need - set(self.palette)
            if missing:
                raise UsageError(f"palette is missing {sorted(missing)}")

    def resolved_palette(self, labels: Sequence[str]) -> dict:
        return dict(self.palette) if self.palette is not None else default_palette(labels)

    def pixel_centers(self) -> tuple[np.ndarray, np.ndarray]:
        """Chart coordinates of pixel centres in row-major order, top row first."""
        w, h = self.resolution
        cx, cy = self.center
        xs = cx - self.width / 2 + (np.arange(w) + 0.5) * (self.width / w)
        ys = cy + self.height / 2 - (np.arange(h) + 0.5) * (self.height / h)
        X, Y = np.meshgrid(xs, ys)
        return X.ravel(), Y.ravel()

    def pixel_of(self, x: float, y: float) -> tuple[int, int] | None:
        """(row, column) of the pixel containing chart point (x, y)."""
        w, h = self.resolution
        col = math.floor((x - (self.center[0] - self.width / 2)) / self.width * w)
        row = math.floor((self.center[1] + self.height / 2 - y) / self.height * h)
        if 0 <= col < w and 0 <= row < h:
            return row, col
        return None

    def to_json(self) -> dict:
        from .dynamics.basins import attractor_points
        labels = [a.label for a in attractor_points(self.n)]
        return {
            "name": self.name,
            "n": self.n,
            "chart": self.chart.to_json(),
            "window": {"center": list(self.center), "width": self.width, "height": self.height},
            "resolution": list(self.resolution),
            "max_iter": self.max_iter,
            "eps": self.eps,
            "palette": {k: list(v) for k, v in self.resolved_palette(labels).items()},
            "shading": self.shading,
        }

    @classmethod
    def from_json(cls, data: dict) -> "RenderJob":
        try:
            win = data["window"]
            pal = data.get("palette")
            job = cls(
                n=int(data["n"]),
                chart=Chart.from_json(data["chart"]),
                center=tuple(float(c) for c in win["center"]),
                width=float(win["width"]),
                height=float(win["height"]),
                resolution=tuple(int(r) for r in data.get("resolution", (256, 256))),
                max_iter=int(data.get("max_iter", DEFAULT_MAX_ITER)),
                eps=float(data.get("eps", DEFAULT_EPS)),
                palette=None if pal is None else {k: tuple(int(c) for c in v) for k, v in pal.items()},
                shading=data.get("shading", "by_iteration_count"),
                name=data.get("name"),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise UsageError(f"malformed render job: {exc}") from None
        if len(job.center) != 2 or len(job.resolution) != 2:
            raise UsageError("window center and resolution need two entries each")
        job.validate()
        return job

    @classmethod
    def load(cls, path: str | Path) -> "RenderJob":
        try:
            data = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise UsageError(f"{path}: invalid JSON ({exc})") from None
        return cls.from_json(data)


@dataclass
class BasinGrid:
    job: RenderJob
    labels: np.ndarray  # (h, w), attractor index or UNRESOLVED
    iterations: np.ndarray
    final_distance: np.ndarray
    attractor_labels: list[str] = field(default_factory=list)

    @property
    def shape(self) -> tuple[int, int]:
        return self.labels.shape

    def unresolved_fraction(self) -> float:
        return float((self.labels == UNRESOLVED).mean())

    def rgb(self) -> np.ndarray:
        pal = self.job.resolved_palette(self.attractor_labels)
        colors = np.array([pal[lab] for lab in self.attractor_labels] + [pal[UNRESOLVED_KEY]],
                          dtype=np.float64)
        img = colors[np.where(self.labels == UNRESOLVED, len(self.attractor_labels), self.labels)]
        if self.job.shading == "by_iteration_count":
            shade = 0.55 + 0.45 * np.exp(-self.iterations / 40.0)
            img = img * shade[..., None]
        return np.clip(np.floor(img + 0.5), 0, 255).astype(np.uint8)

    def ppm_bytes(self) -> bytes:
        h, w = self.labels.shape
        return f"P6\n{w} {h}\n255\n".encode("ascii") + self.rgb().tobytes()

    def summary(self) -> dict:
        counts = np.bincount(self.labels[self.labels >= 0].ravel(), minlength=len(self.attractor_labels))
        return {
            "job": self.job.to_json(),
            "unresolved_fraction": self.unresolved_fraction(),
            "label_counts": {lab: int(c) for lab, c in zip(self.attractor_labels, counts)},
        }


def render(job: RenderJob, out: str | Path | None = None, threads: int | None = None) -> BasinGrid:
    """Classify every pixel centre and optionally write a P6 image.

    Pixels are processed in fixed row blocks; a pixel's result does not
    depend on the block or worker that handled it, so output bytes are
    identical for any thread count.
    """
    job.validate()
    dyn = Dynamics(job.n)
    X, Y = job.pixel_centers()
    starts = job.chart.pullback(job.n)(X, Y)
    batch: BasinBatch = dyn.classify(starts, job.max_iter, job.eps,
                                     thread_count() if threads is None else threads)
    w, h = job.resolution
    grid = BasinGrid(job, batch.label.reshape(h, w), batch.iterations.reshape(h, w),
                     batch.final_distance.reshape(h, w), [a.label for a in dyn.attractors])
    if out is not None:
        Path(out).write_bytes(grid.ppm_bytes())
    return grid


def read_ppm(path: str | Path) -> np.ndarray:
    """Decode a P6 file written by this module into an (h, w, 3) array."""
    data = Path(path).read_bytes()
    parts = data.split(b"\n", 3)
    if parts[0] != b"P6" or len(parts) < 4:
        raise ValueError(f"{path} is not a binary PPM")
    w, h = (int(t) for t in parts[1].split())
    return np.frombuffer(parts[3], dtype=np.uint8).reshape(h, w, 3)


# -- presets ---------------------------------------------------------------

def _framed(positions: Sequence[tuple[float, float]]) -> tuple[tuple[float, float], float]:
    xs = [p[0] for p in positions]
    ys = [p[1] for p in positions]
    span = max(max(xs) - min(xs), max(ys) - min(ys))
    return ((max(xs) + min(xs)) / 2, (max(ys) + min(ys)) / 2), span * (1 + 2 * MARGIN)


def _line_chart(key: str) -> tuple[int, Chart]:
    spec = PRINTED_1D[key]
    return spec["n"], Chart("complex_line", spec["line"],
                            tuple((tuple(p), str(v)) for p, v in spec["marks"]))


def _plane_chart(n: int) -> Chart:
    sub = SubspaceSpec.of() if n == 4 else SubspaceSpec.of(zeroed=[4])
    pad = (0,) * (n - 4)
    marks = tuple((tuple(v) + pad, tuple(str(Fraction(t)) for t in xy))
                  for v, xy in PRINTED_PLANAR[4 if n == 4 else 5]["marks"])
    return Chart("real_plane", sub, marks)


PRESETS = ("g4", "g5RP2", "g5CP1", "g6RP2", "g6CP1Z2", "g6CP1Z1")


def preset(name: str, resolution: tuple[int, int] = (256, 256)) -> RenderJob:
    if name == "g4":
        chart = Chart("complex_line", SubspaceSpec.of(),
                      (((1, 0), "1"), ((0, 1), "rho"), ((1, 1), "rho^2")))
        job = RenderJob(3, chart, (0.0, 0.0), 4.0, 4.0, resolution, name=name)
    elif name in ("g5CP1", "g6CP1Z2", "g6CP1Z1"):
        n, chart = _line_chart(name)
        c, s = _framed([xy for _, xy in chart.mark_positions()])
        job = RenderJob(n, chart, c, s, s, resolution, name=name)
    elif name in ("g5RP2", "g6RP2"):
        n = 4 if name == "g5RP2" else 5
        chart = _plane_chart(n)
        c, s = _framed([xy for _, xy in chart.mark_positions()])
        job = RenderJob(n, chart, c, s, s, resolution, name=name)
    else:
        raise UsageError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
    job.validate()
    return job


def marked_pixel_labels(grid: BasinGrid) -> list[dict]:
    """For each marked point: its pixel, the expected attractor and the label found."""
    from .group import ProjPointExact
    from .dynamics.basins import attractor_points
    where = {a.exact: i for i, a in enumerate(attractor_points(grid.job.n))}
    rows = []
    for p, (x, y) in grid.job.chart.mark_positions():
        px = grid.job.pixel_of(x, y)
        want = where.get(ProjPointExact.of(p))
        got = None if px is None else int(grid.labels[px])
        rows.append({"point": list(p), "chart": [x, y], "pixel": px,
                     "expected": want, "found": got, "ok": px is not None and got == want})
    return rows
