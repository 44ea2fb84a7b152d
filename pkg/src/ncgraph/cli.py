"""Command line front-end: ``ncg {simulate,limits,compare,validate}``.

Settings are resolved as built-in defaults, then the ``--config`` JSON
document, then explicit flags (highest precedence).
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, asdict
from pathlib import Path
from typing import Optional

from . import formats, limits, simulator, stats
from .params import DomainError, ModelParams, ValidationTier, derive_constants, validate

DEFAULTS = {
    "N": 4, "p": 0.5, "q": 0.5, "r": 0.5,
    "seeds": [0], "steps": 10000, "snapshot_at": None,
    "W_max": 100, "W_cut": 50, "D_cut": 30,
    "eps": 0.1, "tail_tol": 1e-10, "fit_window": None,
    "out": "ncg-out", "timing": False,
}


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    params: ModelParams
    seeds: list
    steps: int
    snapshot_at: list
    W_max: int
    W_cut: int
    D_cut: int
    eps: float
    tail_tol: float
    fit_window: Optional[list]
    out: Path
    timing: bool = False

    def as_dict(self) -> dict:
        d = asdict(self)
        d["params"] = self.params.as_dict()
        d["out"] = str(self.out)
        return d


def resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    settings = dict(DEFAULTS)
    if args.config:
        with open(args.config) as fh:
            doc = json.load(fh)
        unknown = set(doc) - set(DEFAULTS)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        settings.update(doc)
    flag_map = {
        "N": args.N, "p": args.p, "q": args.q, "r": args.r,
        "seeds": args.seed, "steps": args.steps, "out": args.out,
        "W_max": args.wmax, "W_cut": args.wcut, "D_cut": args.dcut,
        "eps": args.eps, "tail_tol": args.tail_tol,
        "snapshot_at": args.snapshot_at, "timing": args.timing or None,
    }
    settings.update({k: v for k, v in flag_map.items() if v is not None})

    params = ModelParams(int(settings["N"]), float(settings["p"]), float(settings["q"]), float(settings["r"]))
    problems = validate(params)
    if problems:
        raise ConfigError(f"invalid model parameters: violates {', '.join(problems)}")
    steps = int(settings["steps"])
    snapshot_at = settings["snapshot_at"]
    snapshot_at = [steps] if snapshot_at is None else sorted({int(s) for s in snapshot_at})
    if any(not 0 <= s <= steps for s in snapshot_at):
        raise ConfigError(f"snapshot_at must lie within [0, {steps}]")
    seeds = [int(s) for s in settings["seeds"]]
    if not seeds or any(not 0 <= s < 2 ** 64 for s in seeds):
        raise ConfigError("seeds must be a nonempty list of unsigned 64-bit integers")
    fit_window = settings["fit_window"]
    return ExperimentConfig(
        params=params, seeds=seeds, steps=steps, snapshot_at=snapshot_at,
        W_max=int(settings["W_max"]), W_cut=int(settings["W_cut"]), D_cut=int(settings["D_cut"]),
        eps=float(settings["eps"]), tail_tol=float(settings["tail_tol"]),
        fit_window=list(fit_window) if fit_window else None,
        out=Path(settings["out"]), timing=bool(settings["timing"]),
    )


def _max_workers(n_tasks: int) -> int:
    cap = os.environ.get("NCG_THREADS")
    limit = int(cap) if cap else (os.cpu_count() or 1)
    return max(1, min(n_tasks, limit))


def _simulate_seed(params: ModelParams, seed: int, steps: int, snapshot_at: list) -> list:
    state = simulator.initial_state(params, seed)
    snaps = simulator.run(state, steps, snapshot_at)
    problems = simulator.check_invariants(state)
    if problems:
        raise RuntimeError(f"seed {seed}: invariants failed: {problems}")
    return snaps


def _run_replicas(cfg: ExperimentConfig) -> dict:
    args = [(cfg.params, s, cfg.steps, cfg.snapshot_at) for s in cfg.seeds]
    workers = _max_workers(len(args))
    if workers == 1:
        results = [_simulate_seed(*a) for a in args]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_simulate_seed, *zip(*args)))
    return dict(zip(cfg.seeds, results))


def snapshot_path(out: Path, seed: int, n: int) -> Path:
    return out / f"snapshot_seed{seed}_n{n}.csv"


def cmd_simulate(cfg: ExperimentConfig) -> dict:
    cfg.out.mkdir(parents=True, exist_ok=True)
    started = time.perf_counter()
    runs = _run_replicas(cfg)
    wall = time.perf_counter() - started
    files = []
    for seed, snaps in runs.items():
        meta = formats.metadata(**cfg.params.as_dict(), seed=seed, generator=simulator.GENERATOR_NAME)
        for snap in snaps:
            path = snapshot_path(cfg.out, seed, snap.n)
            formats.write_snapshot(path, snap, meta)
            files.append(path.name)
    manifest = formats.metadata(
        kind="simulate", config=cfg.as_dict(), generator=simulator.GENERATOR_NAME, files=files)
    if cfg.timing:
        manifest["wall_time_s"] = wall
    formats.dump_json(manifest, cfg.out / "manifest.json")
    return manifest


def cmd_limits(cfg: ExperimentConfig) -> dict:
    cfg.out.mkdir(parents=True, exist_ok=True)
    c = derive_constants(cfg.params)
    N = cfg.params.N
    meta = formats.metadata(**cfg.params.as_dict(), constants=c.as_dict(), W_max=cfg.W_max)
    table = limits.xdw_table(c, N, cfg.W_max)
    formats.write_csv(cfg.out / "x_dw.csv", meta, ["w", "d", "x_dw"],
                      ((w, d, x) for d, w, x in table.cells()))

    xw = limits.xw_recurrence(c, cfg.W_max)
    ws = range(1, cfg.W_max + 1)
    if c.alpha > 0:
        closed = limits.xw_closed_form(c, list(ws))
        asym = limits.xw_asymptotic(c, list(ws))
    else:
        closed = asym = [None] * cfg.W_max
    formats.write_csv(cfg.out / "x_w.csv", meta, ["w", "x_w", "x_w_closed_form", "x_w_asymptotic"],
                      ((w, float(xw[w - 1]), _f(closed[w - 1]), _f(asym[w - 1])) for w in ws))

    files = ["x_dw.csv", "x_w.csv"]
    notes = []
    if c.alpha2 > 0:
        ud_meta = {**meta, "eps": cfg.eps, "tail_tol": cfg.tail_tol}
        rows = []
        for d in range(N - 1, cfg.D_cut + 1):
            value, bound = limits.u_d(c, N, d, cfg.eps, cfg.tail_tol)
            rows.append((d, value, limits.u_d_asymptotic(c, d), bound))
        formats.write_csv(cfg.out / "u_d.csv", ud_meta, ["d", "u_d", "u_d_asymptotic", "tail_bound"], rows)
        files.append("u_d.csv")
    else:
        notes.append("u_d unsupported: alpha2 = 0")
    manifest = formats.metadata(kind="limits", config=cfg.as_dict(), files=files, notes=notes)
    formats.dump_json(manifest, cfg.out / "limits_manifest.json")
    return manifest


def _f(x):
    return None if x is None else float(x)


def _load_snapshots(cfg: ExperimentConfig) -> Optional[dict]:
    """Final snapshots per seed from a previous ``simulate`` in ``cfg.out``, if compatible."""
    manifest_path = cfg.out / "manifest.json"
    if not manifest_path.exists():
        return None
    manifest = json.loads(manifest_path.read_text())
    prev = manifest["config"]
    if prev["params"] != cfg.params.as_dict() or prev["steps"] != cfg.steps:
        return None
    found = {}
    for seed in cfg.seeds:
        path = snapshot_path(cfg.out, seed, cfg.steps)
        if not path.exists():
            return None
        found[seed] = [formats.read_snapshot(snapshot_path(cfg.out, seed, n))[1]
                       for n in prev["snapshot_at"] if snapshot_path(cfg.out, seed, n).exists()]
    return found


def cmd_compare(cfg: ExperimentConfig) -> list:
    c = derive_constants(cfg.params)
    runs = _load_snapshots(cfg)
    if runs is None:
        if cfg.steps not in cfg.snapshot_at:
            cfg.snapshot_at = sorted(set(cfg.snapshot_at) | {cfg.steps})
        cmd_simulate(cfg)
        runs = _load_snapshots(cfg)
    table = limits.xdw_table(c, cfg.params.N, max(cfg.W_max, cfg.W_cut))
    ud_theory = None
    if c.alpha2 > 0:
        ud_theory = stats.degree_marginals(table, cfg.D_cut, cfg.eps, cfg.tail_tol)
    reports = []
    for seed, snaps in runs.items():
        final = next(s for s in snaps if s.n == cfg.steps)
        report = stats.compare(stats.empirical_ratios(final), table, cfg.params, cfg.W_cut, cfg.D_cut,
                               fit_window=cfg.fit_window, eps=cfg.eps, tail_tol=cfg.tail_tol,
                               ud_theory=ud_theory)
        doc = formats.metadata(seed=seed, generator=simulator.GENERATOR_NAME, report=report.as_dict())
        formats.dump_json(doc, cfg.out / f"report_seed{seed}.json")
        meta = formats.metadata(**cfg.params.as_dict(), seed=seed, generator=simulator.GENERATOR_NAME)
        drift = dict(stats.vn_drift(snaps, cfg.params.p))
        formats.write_csv(cfg.out / f"vn_drift_seed{seed}.csv", meta, ["n", "V_n", "drift"],
                          ((s.n, s.V_n, drift[s.n]) for s in snaps if s.n > 0))
        reports.append(doc)
    return reports


def cmd_validate(cfg: ExperimentConfig) -> dict:
    p = cfg.params
    doc = {
        "params": p.as_dict(),
        "simulable": validate(p, ValidationTier.SIMULABLE),
        "theorem_grade": validate(p, ValidationTier.THEOREM_GRADE),
    }
    if not doc["simulable"]:
        doc["constants"] = derive_constants(p).as_dict()
    return doc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ncg", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [("simulate", "run the graph evolution and write snapshot CSVs"),
                            ("limits", "write limiting distribution tables"),
                            ("compare", "compare simulated snapshots with the limits"),
                            ("validate", "check parameters against both validation tiers")]:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="JSON config document")
        p.add_argument("--seed", type=int, action="append", help="PRNG seed (repeatable)")
        p.add_argument("--steps", type=int)
        p.add_argument("--out", help="output directory")
        p.add_argument("--wmax", type=int, help="largest weight in limit tables")
        p.add_argument("--wcut", type=int, help="weight cut for comparisons")
        p.add_argument("--dcut", type=int, help="degree cut for u_d and comparisons")
        p.add_argument("--eps", type=float, help="Hoeffding window exponent, 0 < eps < 1/6")
        p.add_argument("--tail-tol", type=float, dest="tail_tol")
        p.add_argument("--snapshot-at", dest="snapshot_at",
                       type=lambda s: [int(v) for v in s.split(",") if v],
                       help="comma-separated step indices")
        p.add_argument("--timing", action="store_true", help="record wall time in the manifest")
        p.add_argument("-N", type=int, dest="N")
        p.add_argument("-p", type=float)
        p.add_argument("-q", type=float)
        p.add_argument("-r", type=float)
    return parser


COMMANDS = {"simulate": cmd_simulate, "limits": cmd_limits, "compare": cmd_compare, "validate": cmd_validate}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args) if args.command != "validate" else _validate_config(args)
        result = COMMANDS[args.command](cfg)
    except (ConfigError, DomainError, OSError, ValueError, RuntimeError) as exc:
        json.dump({"error": type(exc).__name__, "message": str(exc)}, sys.stderr)
        sys.stderr.write("\n")
        return 1
    if args.command == "validate":
        json.dump(result, sys.stdout, indent=2, sort_keys=True)
        sys.stdout.write("\n")
    return 0


def _validate_config(args) -> ExperimentConfig:
    """Like :func:`resolve_config` but keeps invalid parameters so they can be reported."""
    settings = dict(DEFAULTS)
    if args.config:
        with open(args.config) as fh:
            settings.update(json.load(fh))
    for key in ("N", "p", "q", "r"):
        if getattr(args, key) is not None:
            settings[key] = getattr(args, key)
    params = ModelParams(int(settings["N"]), float(settings["p"]), float(settings["q"]), float(settings["r"]))
    return ExperimentConfig(params, [], 0, [], 0, 0, 0, 0.1, 1e-10, None, Path("."))


if __name__ == "__main__":
    sys.exit(main())
