"""Command-line front end: ``lyapspec {pressure,spectrum,pliss,pullback,verify,info}``.

Exit codes: 0 success, 1 invalid input, 2 computation failure, 3 failed verification.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import os
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from . import cocycle as cc
from . import map_core as mc
from . import pressure as pr
from . import pullback as pb
from . import spectrum as sp
from . import verify
from .errors import ComputationError, LyapspecError, ValidationError

EXIT_OK, EXIT_INVALID, EXIT_COMPUTE, EXIT_VERIFY = 0, 1, 2, 3


class UsageError(ValidationError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


@dataclass
class RunConfig:
    command: str
    map: str | None
    params: dict
    outputs: list = field(default_factory=list)
    seed: int | None = None

    # name -> (lower, upper, lower bound excluded); None means unbounded on that side
    RANGES = {
        "grid": (5, 100_001, False), "depth": (1, 64, False), "n": (1, 10_000_000, False),
        "threads": (1, 256, False), "bins": (1, 100_000, False), "pressure_depth": (1, 24, False), "node_cap": (1, None, False),
        "r": (0.0, None, True), "bin_width": (0.0, None, True), "sigma": (0.0, None, False),
    }

    def validate(self) -> None:
        for k, v in self.params.items():
            if isinstance(v, float) and not math.isfinite(v):
                raise ValidationError(f"--{k.replace('_', '-')} must be finite")
            if k not in self.RANGES or v is None:
                continue
            lo, hi, strict = self.RANGES[k]
            if v < lo or (strict and v == lo) or (hi is not None and v > hi):
                raise ValidationError(f"--{k.replace('_', '-')}={v} outside allowed range")
        if "t_min" in self.params and not self.params["t_min"] < self.params["t_max"]:
            raise ValidationError("--t-min must be below --t-max")

    def to_json(self) -> str:
        d = asdict(self)
        return json.dumps(pr._jsonable(d), indent=2, sort_keys=True) + "\n"


def _fmt(v) -> str:
    return format(float(v), ".17g")


def _write_sidecar(path: Path, cfg: RunConfig) -> None:
    Path(str(path) + ".run.json").write_text(cfg.to_json())


def _emit(path: Path, cfg: RunConfig, writer) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    writer(path)
    cfg.outputs.append(str(path))


# -- pressure ------------------------------------------------------------------

def _pressure_payload(fmap, args) -> dict:
    key = {"map": mc.map_to_config(fmap), "t_min": args.t_min, "t_max": args.t_max, "grid": args.grid,
           "depth": args.depth, "method": args.method}
    digest = hashlib.sha256(json.dumps(key, sort_keys=True).encode()).hexdigest()[:16]
    cache_dir = os.environ.get("LYAPSPEC_CACHE")
    cache_file = Path(cache_dir) / f"{fmap.name}-{digest}.json" if cache_dir else None
    if cache_file is not None and cache_file.is_file():
        return json.loads(cache_file.read_text())
    curve = pr.build_pressure_curve(fmap, (args.t_min, args.t_max), args.grid, args.depth, args.method,
                                    threads=args.threads)
    payload = {"t": curve.t_grid.tolist(), "P_lower": curve.P_lower.tolist(), "P": curve.P.tolist(),
               "P_upper": curve.P_upper.tolist(), "summary": curve.summary()}
    payload["summary"]["F0"] = pr.F0(curve)
    if cache_file is not None:
        cache_file.parent.mkdir(parents=True, exist_ok=True)
        cache_file.write_text(json.dumps(payload, sort_keys=True))
    return payload


def cmd_pressure(fmap, args, cfg: RunConfig) -> int:
    data = _pressure_payload(fmap, args)
    summary = pr._jsonable(data["summary"])
    out = Path(args.out)
    if args.format == "csv":
        def write_csv(path):
            with open(path, "w", newline="") as fh:
                w = csv.writer(fh)
                w.writerow(["t", "P_lower", "P", "P_upper"])
                for row in zip(data["t"], data["P_lower"], data["P"], data["P_upper"]):
                    w.writerow([_fmt(v) for v in row])
        _emit(out / "pressure.csv", cfg, write_csv)
        _emit(out / "summary.json", cfg, lambda p: p.write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n"))
    else:
        doc = pr._jsonable({k: data[k] for k in ("t", "P_lower", "P", "P_upper")} | {"summary": data["summary"]})
        _emit(out / "pressure.json", cfg, lambda p: p.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n"))
    for p in cfg.outputs:
        _write_sidecar(Path(p), cfg)
    print(json.dumps(summary, sort_keys=True))
    return EXIT_OK


# -- spectrum ------------------------------------------------------------------

def cmd_spectrum(fmap, args, cfg: RunConfig) -> int:
    est = sp.empirical_spectrum(fmap, args.depth, args.bin_width, args.bins)
    curve = pr.build_pressure_curve(fmap, (-2.0, 2.0), 41, args.pressure_depth, threads=args.threads)
    out = Path(args.out)
    if args.format == "csv":
        _emit(out / "spectrum.csv", cfg, lambda p: sp.write_spectrum_csv(est, p, curve))
    else:
        c, cnt, e = est.occupied()
        doc = {"depth": est.depth, "bin_width": est.bin_width,
               "bins": [{"alpha_bin": float(a), "count": int(k), "dim_estimate": float(d),
                         "F_predicted": pr.legendre_F(curve, float(a))} for a, k, d in zip(c, cnt, e)]}
        _emit(out / "spectrum.json", cfg,
              lambda p: p.write_text(json.dumps(pr._jsonable(doc), indent=2, sort_keys=True) + "\n"))
    for p in cfg.outputs:
        _write_sidecar(Path(p), cfg)
    return EXIT_OK


# -- pliss -------------------------------------------------------------------

def cmd_pliss(fmap, args, cfg: RunConfig) -> int:
    if args.random_itinerary:
        rng = np.random.default_rng(args.seed)
        itin = rng.integers(0, len(fmap.branches), args.n)
        c = cc.cocycle_from_itinerary(fmap, itin)
    else:
        if args.x is None:
            raise ValidationError("pliss needs --x or --random-itinerary")
        c = cc.build_cocycle(fmap, args.x, args.n)
    rep = cc.pliss_times(c, args.sigma)
    out = Path(args.out)
    if args.format == "csv":
        _emit(out / "pliss.csv", cfg, lambda p: cc.write_pliss_csv(c, rep, p))
    else:
        doc = {"x": c.base_point, "n": c.n, "sigma": rep.sigma, "pliss_times": list(rep.times),
               "upper_density": rep.upper_density_estimate, "slope_bound": c.slope_bound}
        _emit(out / "pliss.json", cfg,
              lambda p: p.write_text(json.dumps(pr._jsonable(doc), indent=2, sort_keys=True) + "\n"))
    for p in cfg.outputs:
        _write_sidecar(Path(p), cfg)
    print(f"{len(rep.times)} Pliss times, upper density {rep.upper_density_estimate:.6f}")
    return EXIT_OK


# -- pullback ----------------------------------------------------------------

def cmd_pullback(fmap, args, cfg: RunConfig) -> int:
    tree = pb.pull_back_tree(fmap, args.y, args.r, args.depth, prune=args.prune, node_cap=args.node_cap)
    out = Path(args.out)
    if args.format == "csv":
        _emit(out / "pullback.csv", cfg, lambda p: pb.write_tree_csv(tree, p))
    else:
        _emit(out / "pullback.json", cfg, lambda p: pb.write_tree_json(tree, p))
    for p in cfg.outputs:
        _write_sidecar(Path(p), cfg)
    print(f"{len(tree.nodes)} components, singular times {tree.singular_times()}")
    return EXIT_OK


# -- verify and info -----------------------------------------------------------

def cmd_verify(args, cfg: RunConfig) -> int:
    if args.suite != "all" and args.suite not in verify.SUITES:
        raise ValidationError(f"unknown suite {args.suite!r}")
    results = verify.run_suites(args.suite, args.seed, args.threads)
    report = verify.format_report(results, args.seed)
    if args.report:
        path = Path(args.report)
        _emit(path, cfg, lambda p: p.write_text(report))
        _write_sidecar(path, cfg)
    sys.stdout.write(report)
    return EXIT_OK if all(r.passed for r in results) else EXIT_VERIFY


def cmd_info(fmap, args, cfg: RunConfig) -> int:
    doc = mc.map_to_config(fmap)
    doc |= {"singular_set": list(fmap.singular_set.points), "slope_bound": fmap.slope_bound,
            "expanding": fmap.is_expanding, "interval_union": fmap.is_interval_union,
            "critical_calibrated": [{"c": cp.c, "A0": cp.A0, "R0": cp.R0} for cp in fmap.critical_points]}
    text = json.dumps(pr._jsonable(doc), indent=2, sort_keys=True) + "\n"
    if args.format == "json" and args.out != ".":
        path = Path(args.out) / "info.json"
        _emit(path, cfg, lambda p: p.write_text(text))
        _write_sidecar(path, cfg)
    sys.stdout.write(text)
    return EXIT_OK


# -- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--map", default="two-slope", help="built-in name (tent, two-slope, chebyshev, "
                        "quadratic:C) or path to a JSON map config")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--out", default=".", help="output directory")
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--seed", type=int, default=0)

    p = _Parser(prog="lyapspec", description="Lyapunov spectrum machinery for multimodal interval maps.")
    p.add_argument("--version", action="version", version=f"lyapspec {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    q = sub.add_parser("pressure", parents=[common], help="geometric pressure curve")
    q.add_argument("--t-min", type=float, default=-2.0)
    q.add_argument("--t-max", type=float, default=2.0)
    q.add_argument("--grid", type=int, default=81)
    q.add_argument("--depth", type=int, default=12)
    q.add_argument("--method", choices=("auto", "markov", "periodic"), default="auto")

    q = sub.add_parser("spectrum", parents=[common], help="empirical level-set dimensions")
    q.add_argument("--depth", type=int, default=16)
    q.add_argument("--bins", type=int, default=40)
    q.add_argument("--bin-width", type=float, default=None)
    q.add_argument("--pressure-depth", type=int, default=14)

    q = sub.add_parser("pliss", parents=[common], help="Pliss hyperbolic times along an orbit")
    q.add_argument("--x", type=float, default=None)
    q.add_argument("--n", type=int, default=1000)
    q.add_argument("--sigma", type=float, default=0.1)
    q.add_argument("--random-itinerary", action="store_true",
                   help="follow a random branch itinerary drawn from --seed instead of iterating --x")

    q = sub.add_parser("pullback", parents=[common], help="pull-back tree of a ball")
    q.add_argument("--y", type=float, required=True)
    q.add_argument("--r", type=float, required=True)
    q.add_argument("--depth", type=int, default=6)
    q.add_argument("--prune", choices=("none", "cap-per-depth"), default="none")
    q.add_argument("--node-cap", type=int, default=pb.DEFAULT_NODE_CAP, help="abort (exit 2) beyond this many nodes")

    q = sub.add_parser("verify", help="run invariant suites")
    q.add_argument("--suite", default="all", help="all, " + ", ".join(verify.SUITES))
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--threads", type=int, default=1)
    q.add_argument("--report", default=None, help="also write the report to this file")

    sub.add_parser("info", parents=[common], help="describe a map")
    return p


_SKIP = {"command", "map", "format", "out", "seed", "report"}


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        params = {k: v for k, v in vars(args).items() if k not in _SKIP}
        cfg = RunConfig(args.command, getattr(args, "map", None),
                        params | {"format": getattr(args, "format", None), "out": getattr(args, "out", None)},
                        seed=args.seed)
        cfg.validate()
        if args.command == "verify":
            return cmd_verify(args, cfg)
        fmap = mc.resolve_map(args.map)
        handler = {"pressure": cmd_pressure, "spectrum": cmd_spectrum, "pliss": cmd_pliss,
                   "pullback": cmd_pullback, "info": cmd_info}[args.command]
        return handler(fmap, args, cfg)
    except SystemExit as exc:  # --help and --version
        return int(exc.code or 0)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_INVALID
    except ComputationError as exc:
        print(f"lyapspec: computation failed: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    except (ValidationError, LyapspecError, OSError, json.JSONDecodeError) as exc:
        # escaping or critical orbits are properties of the input point, so they count as invalid input
        print(f"lyapspec: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
