"""Command-line front end.

Every command evaluates one row per grid point; ``--sweep NAME:MIN:MAX:STEPS``
(repeatable) spans a Cartesian grid over named parameters.  Sweepable names:
``R<k>`` (mean cooperative radius, m), ``T<k>`` (threshold, W), ``tau0``,
``sigma2``, ``P_bh``, and per-tier ``lambda<k>``, ``p<k>``, ``alpha<k>``,
``P0_<k>``, ``delta<k>``, ``mu<k>`` (exponential fading mean); k is 1-based.
"""

from __future__ import annotations

import argparse
import csv
import itertools
import json
import math
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import analytic, geometric, optimizer, simulator
from .model import FadingModel, NetworkConfig, TierParams, ThresholdVector, mean_radius, reference_network, \
    threshold_from_radius, to_db
from .numerics import ConvergenceError, DomainError, QuadratureSpec
from .simulator import SimConfig

EXIT_OK, EXIT_VALIDATION, EXIT_INFEASIBLE, EXIT_NUMERICAL = 0, 2, 3, 4

COMMANDS = ("rate", "ee", "cluster-stats", "optimize", "lower-bound", "compare-geometric",
            "compare-macro-only", "montecarlo", "sweep")


class ConfigError(DomainError):
    """Config file missing a field or holding an invalid value."""


# ---------------------------------------------------------------- config I/O

def _num(d: dict, key: str, where: str, default=None) -> float:
    if key not in d:
        if default is None:
            raise ConfigError(f"{where}.{key}: missing required field")
        return default
    v = d[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{where}.{key}: expected a number, got {v!r}")
    return float(v)


def config_from_dict(d: dict) -> tuple[NetworkConfig, SimConfig]:
    if not isinstance(d, dict):
        raise ConfigError("config root must be a mapping")
    tiers_raw = d.get("tiers")
    if not isinstance(tiers_raw, list) or not tiers_raw:
        raise ConfigError("tiers: missing or empty list")
    tiers = []
    for i, t in enumerate(tiers_raw):
        where = f"tiers[{i}]"
        if not isinstance(t, dict):
            raise ConfigError(f"{where}: expected a mapping")
        fad = t.get("fading", {"kind": "exponential", "param": 1.0})
        try:
            fading = FadingModel.from_dict(fad)
        except (KeyError, TypeError, DomainError) as exc:
            raise ConfigError(f"{where}.fading: {exc}") from None
        try:
            tiers.append(TierParams(
                lam=_num(t, "lambda", where), p=_num(t, "p", where), alpha=_num(t, "alpha", where),
                P0=_num(t, "P0", where, 0.0), delta=_num(t, "delta", where, 0.0), fading=fading))
        except ConfigError:
            raise
        except DomainError as exc:
            raise ConfigError(f"{where}: {exc}") from None
    net = d.get("network", {})
    sim = d.get("sim", {})
    try:
        cfg = NetworkConfig(tuple(tiers), P_bh=_num(net, "P_bh", "network", 0.0),
                            sigma2=_num(net, "sigma2", "network", 0.0), tau0=_num(net, "tau0", "network", 3.5))
        simcfg = SimConfig(window_side=_num(sim, "window_side", "sim", 10_000.0),
                           realizations=int(_num(sim, "realizations", "sim", 10_000.0)),
                           seed=int(_num(sim, "seed", "sim", 0.0)),
                           guard_radius=_num(sim, "guard_radius", "sim", 0.0))
    except ConfigError:
        raise
    except DomainError as exc:
        raise ConfigError(f"network/sim: {exc}") from None
    return cfg, simcfg


def config_to_dict(cfg: NetworkConfig, sim: SimConfig | None = None) -> dict:
    sim = sim or SimConfig()
    return {
        "tiers": [{"lambda": t.lam, "p": t.p, "alpha": t.alpha, "P0": t.P0, "delta": t.delta,
                   "fading": t.fading.to_dict()} for t in cfg.tiers],
        "network": {"P_bh": cfg.P_bh, "sigma2": cfg.sigma2, "tau0": cfg.tau0},
        "sim": {"window_side": sim.window_side, "realizations": sim.realizations, "seed": sim.seed,
                "guard_radius": sim.guard_radius},
    }


def load_config(path: str | Path | None = None) -> tuple[NetworkConfig, SimConfig]:
    """Read a JSON or YAML config; ``None`` gives the reference two-tier network."""
    if path is None:
        return reference_network(), SimConfig()
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"{path}: no such config file")
    text = path.read_text()
    if path.suffix in (".yaml", ".yml"):
        import yaml
        data = yaml.safe_load(text)
    else:
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from None
    return config_from_dict(data)


def save_config(path: str | Path, cfg: NetworkConfig, sim: SimConfig | None = None) -> None:
    Path(path).write_text(json.dumps(config_to_dict(cfg, sim), indent=2) + "\n")


# ---------------------------------------------------------------- grid points

@dataclass(frozen=True)
class SweepAxis:
    name: str
    lo: float
    hi: float
    steps: int

    @classmethod
    def parse(cls, text: str) -> SweepAxis:
        parts = text.split(":")
        if len(parts) != 4:
            raise ConfigError(f"--sweep {text!r}: expected NAME:MIN:MAX:STEPS")
        name, lo, hi, steps = parts
        try:
            axis = cls(name, float(lo), float(hi), int(steps))
        except ValueError:
            raise ConfigError(f"--sweep {text!r}: bad number") from None
        if axis.steps < 2:
            raise ConfigError(f"--sweep {text!r}: steps must be >= 2")
        return axis

    def values(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.steps)


_TIER_PARAM = re.compile(r"^(R|T|lambda|p|alpha|P0_|delta|mu)(\d+)$")
_GLOBAL_PARAMS = ("tau0", "sigma2", "P_bh")


def check_param_name(name: str, K: int) -> None:
    if name in _GLOBAL_PARAMS:
        return
    m = _TIER_PARAM.match(name)
    if not m or not 1 <= int(m.group(2)) <= K:
        raise ConfigError(f"unknown parameter {name!r} for a {K}-tier network")


def apply_params(cfg: NetworkConfig, params: dict) -> tuple[NetworkConfig, dict]:
    """Return the modified network and the per-tier R/T choices in ``params``."""
    fields = {"lambda": "lam", "p": "p", "alpha": "alpha", "P0_": "P0", "delta": "delta"}
    glob = {k: v for k, v in params.items() if k in _GLOBAL_PARAMS}
    if glob:
        cfg = cfg.with_(**glob)
    sel = {}
    for name, v in params.items():
        m = _TIER_PARAM.match(name)
        if not m:
            continue
        kind, k = m.group(1), int(m.group(2)) - 1
        if kind in ("R", "T"):
            sel[k] = (kind, v)
        elif kind == "mu":
            cfg = cfg.replace_tier(k, fading=FadingModel.exponential(v))
        else:
            cfg = cfg.replace_tier(k, **{fields[kind]: v})
    return cfg, sel


def thresholds_for(cfg: NetworkConfig, sel: dict, tiers=None) -> list[float]:
    tiers = range(cfg.K) if tiers is None else tiers
    out = []
    for k in tiers:
        if k not in sel:
            raise ConfigError(f"no radius or threshold given for tier {k + 1} (use --radii, --thresholds or --sweep R{k + 1}:...)")
        kind, v = sel[k]
        out.append(threshold_from_radius(cfg.tiers[k], v) if kind == "R" else float(v))
    return out


# ---------------------------------------------------------------- commands

@dataclass
class Job:
    command: str
    cfg: NetworkConfig
    sim: SimConfig
    params: dict
    exact: bool = False
    tol: float = 1e-8
    M: int = 2
    workers: int = 1
    laplace_t: tuple = field(default=())


def _tier_cols(prefix: str, values) -> dict:
    return {f"{prefix}{k + 1}": v for k, v in enumerate(values)}


def evaluate(job: Job) -> dict:
    cfg, sel = apply_params(job.cfg, job.params)
    quad = QuadratureSpec(rel_tol=job.tol)
    row = dict(job.params)
    cmd = job.command
    if cmd in ("rate", "ee", "cluster-stats", "sweep", "montecarlo"):
        T = thresholds_for(cfg, sel)
        derived = _tier_cols("T", T) | _tier_cols("R", [mean_radius(t, x) for t, x in zip(cfg.tiers, T)])
        row |= {k: v for k, v in derived.items() if k not in row}
        if cmd != "montecarlo":
            if cmd != "cluster-stats":
                row["tau"] = analytic.spatial_average_rate(cfg, T, quad)
            if cmd in ("ee", "sweep", "cluster-stats"):
                row |= _tier_cols("N", analytic.cluster_sizes(cfg, T))
                row["P_cl"] = analytic.cluster_power(cfg, T)
            if cmd in ("ee", "sweep"):
                row["EE"] = row["tau"] / row["P_cl"]
            if cmd == "cluster-stats":
                row |= _tier_cols("T_dB", [to_db(x) for x in T])
            return row
        out = simulator.run(cfg, job.sim, T, laplace_t=job.laplace_t, workers=job.workers)
        tau = analytic.spatial_average_rate(cfg, T, quad)
        row |= {"tau_mc": out.tau_hat, "tau_stderr": out.tau_stderr, "tau_analytic": tau,
                "rel_err": abs(out.tau_hat - tau) / tau if tau > 0 else math.nan}
        row |= _tier_cols("N_mc", out.cluster_size_hat) | _tier_cols("N_mc_se", out.cluster_size_stderr)
        row |= _tier_cols("N", analytic.cluster_sizes(cfg, T))
        row |= {"P_mc": out.power_hat, "P_mc_stderr": out.power_stderr, "P_cl": analytic.cluster_power(cfg, T)}
        for t, ls, lss, li, lis in out.laplace_samples:
            row |= {f"LJS_mc@{t:g}": ls, f"LJS_se@{t:g}": lss, f"LJS@{t:g}": analytic.laplace_JS(cfg, T, t),
                    f"LJI_mc@{t:g}": li, f"LJI_se@{t:g}": lis, f"LJI@{t:g}": analytic.laplace_JI(cfg, T, t)}
        return row
    if cmd == "optimize":
        opt = optimizer.optimal_thresholds(cfg, exact=job.exact)
        T = list(opt.T_star)
        row |= {"tau0": cfg.tau0} | _tier_cols("T_star", T) | _tier_cols("T_star_dB", [to_db(x) for x in T])
        row |= _tier_cols("R_star", [mean_radius(t, x) for t, x in zip(cfg.tiers, T)])
        row |= {"P_cl": analytic.cluster_power(cfg, T), "tau_lower_bound": opt.achieved_rate_lower_bound,
                "tau": analytic.spatial_average_rate(cfg.with_(sigma2=0.0), T, quad),
                "residual": opt.residual, "scale": opt.scale}
        return row
    if cmd == "lower-bound":
        head = thresholds_for(cfg, sel, range(cfg.K - 1))
        K = cfg.K
        row |= {"tau0": cfg.tau0} | _tier_cols("T", head)
        row["tau0_max"] = optimizer.tau0_max(cfg, head) if K > 1 else math.inf
        td = optimizer.threshold_lower_bound(cfg, head)
        te = optimizer.threshold_exact(cfg, head)
        last = cfg.tiers[-1]
        row |= {f"T{K}_bound": td, f"T{K}_bound_dB": to_db(td), f"T{K}_exact": te, f"T{K}_exact_dB": to_db(te),
                "gap_dB": to_db(te) - to_db(td), f"R{K}_bound": mean_radius(last, td),
                f"R{K}_exact": mean_radius(last, te)}
        if K == 2:
            ta = optimizer.threshold_lower_bound_two_tier_closed(cfg, head[0], job.M)
            row |= {f"T{K}_taylor": ta, f"T{K}_taylor_dB": to_db(ta), "taylor_gap_dB": to_db(ta) - to_db(td)}
        return row
    if cmd == "compare-geometric":
        opt = optimizer.optimal_thresholds(cfg)
        p_rss = analytic.cluster_power(cfg, opt.T_star)
        geo = geometric.geometric_optimal_radii(cfg)
        row |= {"tau0": cfg.tau0, "P_cl_rss": p_rss, "P_cl_geometric": geo.P_cl_tilde}
        row |= _tier_cols("R_star_rss", opt.T_star.radii(cfg)) | _tier_cols("R_star_geometric", geo.R_star)
        row["saving_pct"] = 100.0 * (geo.P_cl_tilde - p_rss) / geo.P_cl_tilde
        return row
    if cmd == "compare-macro-only":
        p_het = analytic.cluster_power(cfg, optimizer.optimal_thresholds(cfg, exact=job.exact).T_star)
        macro = cfg.with_(tiers=cfg.tiers[:1])
        p_mac = analytic.cluster_power(macro, optimizer.optimal_thresholds(macro, exact=job.exact).T_star)
        row |= {"tau0": cfg.tau0, "alpha1": cfg.tiers[0].alpha, "P_cl_hetnet": p_het, "P_cl_macro_only": p_mac,
                "saving_pct": 100.0 * (p_mac - p_het) / p_mac}
        return row
    raise ConfigError(f"unknown command {cmd!r}")


def grid(axes: list[SweepAxis], fixed: dict) -> list[dict]:
    if not axes:
        return [dict(fixed)]
    names = [a.name for a in axes]
    return [dict(fixed) | {n: float(v) for n, v in zip(names, combo)}
            for combo in itertools.product(*(a.values() for a in axes))]


def _parse_list(text: str | None) -> list[float] | None:
    if text is None:
        return None
    try:
        return [float(x) for x in text.split(",")]
    except ValueError:
        raise ConfigError(f"bad number list {text!r}") from None


def write_rows(rows: list[dict], out, fmt: str) -> None:
    if fmt == "json":
        json.dump(rows, out, indent=1)
        out.write("\n")
        return
    if not rows:
        return
    header = list(rows[0])
    for r in rows[1:]:
        header += [k for k in r if k not in header]
    w = csv.DictWriter(out, fieldnames=header, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: repr(v) if isinstance(v, float) else v for k, v in r.items()})


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON or YAML network config (default: reference two-tier network)")
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--sweep", action="append", default=[], metavar="NAME:MIN:MAX:STEPS")
    common.add_argument("--set", action="append", default=[], metavar="NAME=VALUE",
                        help="override one parameter, e.g. --set tau0=4 --set mu2=2")
    common.add_argument("--radii", help="comma-separated mean cooperative radii in m")
    common.add_argument("--thresholds", help="comma-separated RSS thresholds in W")
    common.add_argument("--thresholds-db", help="comma-separated RSS thresholds in dB re 1 W (write --thresholds-db=-100,-90 for negatives)")
    common.add_argument("--tau0", type=float)
    common.add_argument("--seed", type=int)
    common.add_argument("--realizations", type=int)
    common.add_argument("--window", type=float, help="simulation window side in m")
    common.add_argument("--laplace-t", help="comma-separated t values for Monte Carlo Laplace estimates")
    common.add_argument("--tol", type=float, default=1e-8, help="relative quadrature tolerance")
    common.add_argument("--exact", action="store_true",
                        help="rescale optimal thresholds so the exact rate meets tau0")
    common.add_argument("--M", type=int, default=2, help="series terms for the two-tier closed form")
    common.add_argument("--jobs", type=int, default=1, help="parallel workers")

    p = argparse.ArgumentParser(prog="hetcoop", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return p


def _fixed_params(args, cfg: NetworkConfig) -> dict:
    fixed = {}
    for kind, text in (("R", args.radii), ("T", args.thresholds)):
        vals = _parse_list(text)
        if vals is not None:
            fixed |= {f"{kind}{k + 1}": v for k, v in enumerate(vals)}
    if args.thresholds_db is not None:
        fixed |= {f"T{k + 1}": 10 ** (v / 10) for k, v in enumerate(_parse_list(args.thresholds_db))}
    for item in args.set:
        name, _, val = item.partition("=")
        try:
            fixed[name] = float(val)
        except ValueError:
            raise ConfigError(f"--set {item!r}: bad value") from None
    if args.tau0 is not None:
        fixed["tau0"] = args.tau0
    for name in fixed:
        check_param_name(name, cfg.K)
    return fixed


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    rows: list[dict] = []
    status = EXIT_OK
    try:
        cfg, sim = load_config(args.config)
        sim = SimConfig(window_side=args.window or sim.window_side,
                        realizations=args.realizations or sim.realizations,
                        seed=sim.seed if args.seed is None else args.seed,
                        guard_radius=sim.guard_radius)
        axes = [SweepAxis.parse(s) for s in args.sweep]
        for a in axes:
            check_param_name(a.name, cfg.K)
        if args.command == "sweep" and not axes:
            raise ConfigError("sweep needs at least one --sweep axis")
        points = grid(axes, _fixed_params(args, cfg))
        jobs = [Job(args.command, cfg, sim, pt, exact=args.exact, tol=args.tol, M=args.M,
                    workers=args.jobs if args.command == "montecarlo" else 1,
                    laplace_t=tuple(_parse_list(args.laplace_t) or ())) for pt in points]
        if args.jobs > 1 and len(jobs) > 1 and args.command != "montecarlo":
            with ProcessPoolExecutor(args.jobs) as ex:
                for r in ex.map(evaluate, jobs):
                    rows.append(r)
        else:
            for j in jobs:
                rows.append(evaluate(j))
    except optimizer.InfeasibleError as exc:
        status = EXIT_INFEASIBLE
        print(f"hetcoop: infeasible: {exc}", file=sys.stderr)
    except ConvergenceError as exc:
        status = EXIT_NUMERICAL
        print(f"hetcoop: numerical failure: {exc}", file=sys.stderr)
    except (DomainError, ValueError) as exc:
        status = EXIT_VALIDATION
        print(f"hetcoop: invalid input: {exc}", file=sys.stderr)
    if rows or status == EXIT_OK:
        if args.out:
            with open(args.out, "w", newline="") as fh:
                write_rows(rows, fh, args.format)
        else:
            write_rows(rows, sys.stdout, args.format)
    return status


if __name__ == "__main__":
    sys.exit(main())
