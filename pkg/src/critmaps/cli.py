"""Command-line entry point: ``critmaps <subcommand> ...``.

Exit status is 0 when everything selected passes, 1 when a check fails and
2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

import numpy as np

from . import __version__
from .dynamics import basins, charts
from .exactpoly import UsageError
from .group import orbit_table
from .mapfamily import build_map
from .render import PRESETS, RenderJob, marked_pixel_labels, preset, render
from .verify import CHECKS, DEFAULT_M_MAX, N_LIMITS, CheckReport, run_check

DEFAULTS = {"eps": basins.DEFAULT_EPS, "max_iter": basins.DEFAULT_MAX_ITER, "seed": basins.DEFAULT_SEED}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(2)


def _emit(args, payload: dict, text: str) -> None:
    if args.json:
        print(json.dumps({**payload, "defaults": DEFAULTS}, indent=2))
    else:
        print(text)


def _reports_exit(reports: list[CheckReport]) -> int:
    return 0 if all(r.passed for r in reports) else 1


def cmd_verify(args) -> int:
    names = [args.check] if args.check else list(CHECKS)
    if args.check and args.check not in CHECKS:
        raise UsageError(f"unknown check {args.check!r}; choose from {', '.join(CHECKS)}")
    reports, skipped = [], []
    for name in names:
        hi = N_LIMITS.get(name)
        if hi is not None and args.n > hi:
            if args.check:
                raise UsageError(f"{name} expands an exact determinant or linear system and is "
                                 f"limited to n <= {hi}; refusing n = {args.n}")
            skipped.append({"check": name, "reason": f"limited to n <= {hi}"})
            continue
        reports.append(run_check(name, args.n, args.m_max))
    lines = [r.line() for r in reports]
    lines += [f"[SKIP] {s['check']} n={args.n}  ({s['reason']})" for s in skipped]
    payload = {"n": args.n, "reports": [r.to_json() for r in reports], "skipped": skipped,
               "all_pass": all(r.passed for r in reports)}
    _emit(args, payload, "\n".join(lines))
    return _reports_exit(reports)


def cmd_map(args) -> int:
    m = build_map(args.n)
    shown = m.unscaled() if args.closed_form else m
    names = [f"u{i}" for i in range(1, m.nvars + 1)]
    payload = {"n": args.n, "scale": str(m.scale), "closed_form": args.closed_form,
               "degree": m.degree, "variables": names,
               "components": [c.to_json() for c in shown.components]}
    head = f"# g for n={args.n}, degree {m.degree}, " + (
        "closed-form coefficients" if args.closed_form else f"integer lift (scale {m.scale})")
    lines = [head] + [f"g{i} = {c.to_str(names)}" for i, c in enumerate(shown.components, 1)]
    if args.collapse:
        rng = np.random.Generator(np.random.Philox(args.seed))
        rows = []
        for _ in range(args.collapse):
            pt = np.concatenate([[0.0], rng.standard_normal(m.nvars - 1)])
            v = basins.collapse_direction(m, pt)
            rows.append({"point": pt.tolist(), "kernel": [[z.real, z.imag] for z in v]})
            lines.append(f"kernel of Dg at {np.round(pt, 4).tolist()}: {np.round(v.real, 6).tolist()}")
        payload["collapse_directions"] = rows
    _emit(args, payload, "\n".join(lines))
    return 0


def cmd_orbits(args) -> int:
    rows = orbit_table(args.n)
    lines = [f"{'point':<6} {'coords':<{3 * args.n}} {'orbit':>6} {'predicted':>9}"]
    for r in rows:
        lines.append(f"{r.point.name:<6} {str(list(r.point.coords)):<{3 * args.n}} {r.size:>6} {r.predicted:>9}")
    ok = all(r.size == r.predicted for r in rows)
    _emit(args, {"n": args.n, "rows": [r.to_json() for r in rows], "all_match": ok}, "\n".join(lines))
    return 0 if ok else 1


def cmd_coverage(args) -> int:
    stat = basins.coverage_stat(args.n, args.samples, args.seed, args.max_iter, args.eps, args.threads)
    lines = [f"n={args.n} samples={args.samples} seed={args.seed} max_iter={args.max_iter}",
             f"resolved fraction {stat['resolved_fraction']:.6f} ({stat['unresolved']} unresolved)"]
    lines += [f"  {k:<8} {v}" for k, v in stat["orbit_histogram"].items()]
    code = 0
    if args.min_fraction is not None:
        stat["min_fraction"] = args.min_fraction
        if stat["resolved_fraction"] < args.min_fraction:
            lines.append(f"below required fraction {args.min_fraction}")
            code = 1
    _emit(args, stat, "\n".join(lines))
    return code


def _emit_reports(args, reports: list[CheckReport]) -> int:
    payload = {"reports": [r.to_json() for r in reports], "all_pass": all(r.passed for r in reports)}
    text = []
    for r in reports:
        text.append(r.line())
        for k in ("derived", "printed", "halley", "conjugacy", "printed_relation", "scalar"):
            if k in r.details:
                text.append(f"    {k}: {r.details[k]}")
    _emit(args, payload, "\n".join(text))
    return _reports_exit(reports)


def cmd_check_1d(args) -> int:
    names = list(charts.PRINTED_1D) if args.map == "all" else [args.map]
    return _emit_reports(args, [charts.check_1d(name) for name in names])


def cmd_check_halley(args) -> int:
    return _emit_reports(args, [charts.halley_check()])


def cmd_check_planar(args) -> int:
    ns = [4, 5] if args.n == "all" else [int(args.n)]
    return _emit_reports(args, [charts.planar_map_check(n) for n in ns])


def _parse_res(text: str) -> tuple[int, int]:
    try:
        w, h = text.lower().split("x")
        return int(w), int(h)
    except ValueError:
        raise UsageError(f"resolution must look like 256x256, got {text!r}") from None


def cmd_render(args) -> int:
    if (args.preset is None) == (args.config is None):
        raise UsageError("render needs exactly one of --preset or --config")
    if args.preset:
        job = preset(args.preset, _parse_res(args.res) if args.res else (256, 256))
    else:
        job = RenderJob.load(args.config)
        if args.res:
            job.resolution = _parse_res(args.res)
    if args.max_iter is not None:
        job.max_iter = args.max_iter
    job.validate()
    if args.dump_config:
        with open(args.dump_config, "w") as fh:
            json.dump(job.to_json(), fh, indent=2)
    out = args.out or f"{job.name or 'basins'}.ppm"
    grid = render(job, out, args.threads)
    summary = grid.summary()
    summary["output"] = out
    summary["marked_points"] = marked_pixel_labels(grid)
    w, h = job.resolution
    _emit(args, summary, f"wrote {out} ({w}x{h}), unresolved fraction {summary['unresolved_fraction']:.4f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="critmaps", description="Exact checks, basin statistics and basin images "
                "for the S_n-equivariant critically finite maps g.")
    p.add_argument("--version", action="version", version=f"critmaps {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, fn, help):
        sp = sub.add_parser(name, help=help)
        sp.add_argument("--json", action="store_true", help="machine-readable output")
        sp.set_defaults(fn=fn)
        return sp

    sp = add("verify", cmd_verify, "run exact identity checks")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--check", help=f"one of: {', '.join(CHECKS)}")
    sp.add_argument("--m-max", type=int, default=None,
                    help=f"range for the summation identities (defaults {DEFAULT_M_MAX})")

    sp = add("map", cmd_map, "print the components of g")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--closed-form", action="store_true", help="show the unscaled rational coefficients")
    sp.add_argument("--paper-scale", dest="closed_form", action="store_true", help=argparse.SUPPRESS)
    sp.add_argument("--collapse", type=int, default=0, metavar="K",
                    help="also report the Jacobian kernel at K random points of {u1=0}")
    sp.add_argument("--seed", type=int, default=basins.DEFAULT_SEED)

    sp = add("orbits", cmd_orbits, "orbit sizes of the special points")
    sp.add_argument("--n", type=int, required=True)

    sp = add("coverage", cmd_coverage, "fraction of random points captured by an attractor")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--samples", type=int, default=10_000)
    sp.add_argument("--seed", type=int, default=basins.DEFAULT_SEED)
    sp.add_argument("--max-iter", type=int, default=basins.DEFAULT_MAX_ITER)
    sp.add_argument("--eps", type=float, default=basins.DEFAULT_EPS)
    sp.add_argument("--threads", type=int, default=None)
    sp.add_argument("--min-fraction", type=float, default=None, help="exit 1 below this fraction")

    sp = add("check-1d", cmd_check_1d, "compare derived line maps with their printed forms")
    sp.add_argument("--map", default="all", choices=["all", *charts.PRINTED_1D])

    add("check-halley", cmd_check_halley, "relate the n=3 chart map to Halley's method")

    sp = add("check-planar", cmd_check_planar, "compare planar chart maps with their printed forms")
    sp.add_argument("--n", default="all", choices=["all", "4", "5"])

    sp = add("render", cmd_render, "render a basin image (binary PPM)")
    sp.add_argument("--preset", choices=PRESETS)
    sp.add_argument("--config", help="render job JSON file")
    sp.add_argument("--res", help="resolution WxH, e.g. 256x256")
    sp.add_argument("--out", help="output .ppm path")
    sp.add_argument("--max-iter", type=int, default=None)
    sp.add_argument("--threads", type=int, default=None)
    sp.add_argument("--dump-config", help="write the resolved job JSON here")
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "n", None) is not None and isinstance(args.n, int) and args.n < 3:
        print(f"critmaps: error: n must be at least 3, got {args.n}", file=sys.stderr)
        return 2
    try:
        return args.fn(args)
    except UsageError as exc:
        print(f"critmaps: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"critmaps: I/O error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
