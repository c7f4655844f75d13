"""Command line entry point.

Exit codes: 0 success, 1 runtime or IO failure, 2 usage error.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import montecarlo, report
from .cspace import RobotShape, minkowski_cobstacle_set
from .geometry import GeometryError, boundary_measure, union_volume
from .obprm import ObprmParams, generate_nodes
from .roadmap import Query, build_roadmap, path_length, query
from .shapes import load_shape, polygon_outline, shape_to_dict
from .valuations import PredictionInput, Variant, crofton_sample, predicted_success


class UsageError(Exception):
    pass


@dataclass
class CliConfig:
    subcommand: str
    flags: dict = field(default_factory=dict)
    paths: dict = field(default_factory=dict)
    seed: int | None = None
    out: Path | None = None


def _point(text: str) -> np.ndarray:
    try:
        return np.array([float(t) for t in text.split(",")])
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated numbers, got {text!r}") from None


def _seed(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("seed must be >= 0")
    return value


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="obstacleprm", description="Obstacle-surface sampling and its success-probability model.")
    sub = p.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    s = sub.add_parser("predict", help="closed-form success probability")
    s.add_argument("--dim", type=int, required=True)
    s.add_argument("--boundary", type=float, required=True)
    s.add_argument("--delta", type=float, required=True)
    s.add_argument("--bounding-diameter", type=float, required=True)
    s.add_argument("--variant", choices=[v.value for v in Variant], default=Variant.RADIUS_CORRECTED.value)

    s = sub.add_parser("obprm", help="generate obstacle-surface nodes")
    s.add_argument("--shape", required=True)
    s.add_argument("--rays", type=int, required=True)
    s.add_argument("--delta", type=float, required=True)
    s.add_argument("--ray-length", type=float, required=True)
    s.add_argument("--seed", type=_seed, default=0)
    s.add_argument("--out", required=True)
    s.add_argument("--svg")

    s = sub.add_parser("drop-segments", help="Monte Carlo segment-drop hit probability")
    s.add_argument("--shape", required=True)
    s.add_argument("--delta", type=float, required=True)
    s.add_argument("--trials", type=int, default=1_000_000)
    s.add_argument("--bounding-diameter", type=float)
    s.add_argument("--seed", type=_seed, default=0)
    s.add_argument("--threads", type=int, default=1)

    s = sub.add_parser("crofton", help="boundary length from random lines (2D)")
    s.add_argument("--shape", required=True)
    s.add_argument("--lines", type=int, default=1_000_000)
    s.add_argument("--seed", type=_seed, default=0)

    s = sub.add_parser("minkowski", help="C-obstacle of a translating robot")
    s.add_argument("obstacle")
    s.add_argument("robot")
    s.add_argument("--out", help="C-obstacle shape file (default: stdout)")

    s = sub.add_parser("plan", help="roadmap query over sampled milestones")
    s.add_argument("--env", required=True)
    s.add_argument("--samples", required=True)
    s.add_argument("--k", type=int, default=8)
    s.add_argument("--start", type=_point, required=True)
    s.add_argument("--goal", type=_point, required=True)
    s.add_argument("--resolution", type=float, default=0.05)

    s = sub.add_parser("experiment", help="run an experiment config")
    s.add_argument("config")
    s.add_argument("--out", required=True)
    s.add_argument("--threads", type=int, default=1)
    return p


_POSITIVE = ("delta", "ray_length", "boundary", "bounding_diameter", "resolution")
_AT_LEAST_ONE = ("rays", "trials", "lines", "k", "threads", "dim")
_INPUT_FILES = ("shape", "env", "samples", "config", "obstacle", "robot")


def parse_and_validate(argv) -> CliConfig:
    """Parse argv and check paths and ranges; raises UsageError naming the flag."""
    ns = build_parser().parse_args(list(argv))
    flags = vars(ns).copy()
    cmd = flags.pop("subcommand")
    for name in _POSITIVE:
        if flags.get(name) is not None and not flags[name] > 0:
            raise UsageError(f"--{name.replace('_', '-')} must be > 0, got {flags[name]}")
    for name in _AT_LEAST_ONE:
        if flags.get(name) is not None and flags[name] < 1:
            raise UsageError(f"--{name.replace('_', '-')} must be >= 1, got {flags[name]}")
    if cmd == "obprm" and not flags["delta"] < flags["ray_length"]:
        raise UsageError("--delta must be smaller than --ray-length")
    paths = {}
    for name in _INPUT_FILES:
        if flags.get(name) is not None:
            path = Path(flags[name])
            if not path.is_file():
                raise UsageError(f"{name}: no such file {path}")
            paths[name] = path
    out = flags.get("out")
    return CliConfig(cmd, flags, paths, flags.get("seed"), Path(out) if out else None)


# -- subcommands -----------------------------------------------------------------

def _predict(cfg: CliConfig) -> None:
    f = cfg.flags
    p = predicted_success(PredictionInput(f["dim"], f["boundary"], f["delta"], f["bounding_diameter"],
                                          Variant(f["variant"])))
    print(report.fmt(p))


def _obprm(cfg: CliConfig) -> None:
    f = cfg.flags
    shape = load_shape(cfg.paths["shape"])
    params = ObprmParams(f["rays"], f["ray_length"], f["delta"])
    batch = generate_nodes(shape, params, cfg.seed)
    cfg.out.write_text(batch.to_csv())
    if f.get("svg"):
        if shape.dimension != 2:
            raise GeometryError("--svg needs a 2D shape")
        scene = report.SvgScene(outlines=[polygon_outline(p) for p in shape.parts], nodes=batch.nodes,
                                legend=f"{batch.success_count}/{len(batch.outcomes)} free nodes, seed {cfg.seed}")
        report.render_svg(scene, f["svg"])
    print(f"rays={len(batch.outcomes)} free_nodes={batch.success_count} rate={report.fmt(batch.success_rate)}")


def _drop(cfg: CliConfig) -> None:
    f = cfg.flags
    shape = load_shape(cfg.paths["shape"])
    stats = montecarlo.estimate_hit_probability(shape, f["delta"], f["trials"], cfg.seed,
                                                bounding_diameter=f["bounding_diameter"], threads=f["threads"])
    print(json.dumps(report._rounded(stats.as_dict()), sort_keys=True))


def _crofton(cfg: CliConfig) -> None:
    shape = load_shape(cfg.paths["shape"])
    est, se = crofton_sample(shape, cfg.flags["lines"], cfg.seed)
    print(f"perimeter={report.fmt(est)} se={report.fmt(se)}")


def _minkowski(cfg: CliConfig) -> None:
    obstacle = load_shape(cfg.paths["obstacle"])
    robot = load_shape(cfg.paths["robot"])
    if len(robot.parts) != 1:
        raise GeometryError("robot must be a single convex part")
    cob = minkowski_cobstacle_set(obstacle, RobotShape(robot.parts[0], robot.dimension))
    text = json.dumps(report._rounded(shape_to_dict(cob)), indent=2) + "\n"
    if cfg.out:
        cfg.out.write_text(text)
    else:
        sys.stdout.write(text)
    print(f"volume={report.fmt(union_volume(cob))}, surface={report.fmt(boundary_measure(cob))}")


def read_samples(path, dimension: int) -> np.ndarray:
    """Milestones from a CSV: an obprm node file (failed rays skipped) or plain coordinate rows."""
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r]
    if not rows:
        return np.empty((0, dimension))
    header = rows[0]
    cols = [header.index(f"node_{k}") for k in range(dimension) if f"node_{k}" in header]
    if len(cols) == dimension:
        pts = [[float(r[c]) for c in cols] for r in rows[1:] if all(r[c] for c in cols)]
    else:
        try:
            float(header[0])
        except ValueError:
            rows = rows[1:]
        pts = [[float(x) for x in r[:dimension]] for r in rows]
    return np.asarray(pts, dtype=float).reshape(-1, dimension)


def _plan(cfg: CliConfig) -> None:
    f = cfg.flags
    env = load_shape(cfg.paths["env"])
    n = env.dimension
    if len(f["start"]) != n or len(f["goal"]) != n:
        raise UsageError(f"--start and --goal need {n} coordinates")
    nodes = read_samples(cfg.paths["samples"], n)
    rm = build_roadmap(env, nodes, f["k"], f["resolution"])
    path = query(rm, env, Query(f["start"], f["goal"]))
    if path is None:
        print("NO PATH")
        return
    for p in path:
        print(",".join(report.fmt(x) for x in p))
    print(f"length={report.fmt(path_length(path))}")


def _experiment(cfg: CliConfig) -> None:
    try:
        config = montecarlo.ExperimentConfig.load(cfg.paths["config"])
    except (json.JSONDecodeError, montecarlo.ExperimentError) as exc:
        # bad config content is a usage problem; failures while running are not
        raise UsageError(f"config: {exc}") from None
    rep = montecarlo.run_experiment(config, threads=cfg.flags["threads"])
    for p in report.write_report(rep, cfg.out):
        print(p)


_COMMANDS = {"predict": _predict, "obprm": _obprm, "drop-segments": _drop, "crofton": _crofton,
             "minkowski": _minkowski, "plan": _plan, "experiment": _experiment}


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = parse_and_validate(argv)
        _COMMANDS[cfg.subcommand](cfg)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError, GeometryError, montecarlo.ExperimentError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
