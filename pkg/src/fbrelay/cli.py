"""Command-line front end reproducing the outage, contour, power-allocation
and delay experiments as CSV or JSON tables.

Exit codes: 0 success, 1 usage or config error, 2 an optimization row was
infeasible, 3 a validation check failed.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys


from . import checks
from .config import RunConfig, db_to_linear
from .errors import ConfigError, DomainError, InfeasibleError
from .optimize import optimize_blocklengths, optimize_eta, reliability_contour
from .outage import Scheme, scheme_outage, scheme_outage_mc
from .tables import Table, matrix_table, write_tables

EXIT_OK, EXIT_CONFIG, EXIT_INFEASIBLE, EXIT_VALIDATION = 0, 1, 2, 3

log = logging.getLogger("fbrelay")


def _frange(lo, hi, step):
    count = int(math.floor((hi - lo) / step + 1e-9))
    return [lo + i * step for i in range(count + 1)]


def _col(scheme, prefix="eps"):
    return f"{prefix}_{Scheme.parse(scheme).value}"


def cmd_outage_vs_n(cfg: RunConfig, n_min=None, n_max=None, step=None):
    n_min = cfg.n_min if n_min is None else n_min
    n_max = cfg.n_max if n_max is None else n_max
    step = cfg.n_step if step is None else step
    if n_min < 100:
        raise ConfigError("n_min must be >= 100")
    if n_max < n_min or step <= 0:
        raise ConfigError("need n_max >= n_min and n_step > 0")
    t = Table("outage_vs_n", ["m", "n", *[_col(s) for s in cfg.schemes]])
    for m in cfg.m:
        for n in range(n_min, n_max + 1, step):
            sys = cfg.system(m, n_s=n, n_r=n)
            t.add(float(m), n, *[scheme_outage(sys.replace(eta=cfg.eta_for(s)), s) for s in cfg.schemes])
    return [t]


def cmd_outage_vs_power(cfg: RunConfig, p_min_db=None, p_max_db=None, step_db=None):
    lo = cfg.p_min_db if p_min_db is None else p_min_db
    hi = cfg.p_max_db if p_max_db is None else p_max_db
    step = cfg.p_step_db if step_db is None else step_db
    if not lo < hi or step <= 0:
        raise ConfigError("need p_min_db < p_max_db and p_step_db > 0")
    cols = ["m", "power_db", *[_col(s) for s in cfg.schemes]]
    if cfg.mc_samples > 0:
        for s in cfg.schemes:
            cols += [_col(s, "mc"), _col(s, "ci")]
    t = Table("outage_vs_power", cols)
    for m in cfg.m:
        for i, p_db in enumerate(_frange(lo, hi, step)):
            sys = cfg.system(m, total_power=db_to_linear(p_db))
            row = [float(m), round(p_db, 10)]
            row += [scheme_outage(sys.replace(eta=cfg.eta_for(s)), s) for s in cfg.schemes]
            if cfg.mc_samples > 0:
                for j, s in enumerate(cfg.schemes):
                    seed = cfg.seed + 1000 * i + 10 * j
                    r = scheme_outage_mc(sys.replace(eta=cfg.eta_for(s)), s, cfg.mc_samples, seed)
                    row += [r.value, r.ci_halfwidth]
            t.add(*row)
    return [t]


def cmd_contour(cfg: RunConfig, n_grid=None, k_grid=None):
    n_grid = list(cfg.n_grid if n_grid is None else n_grid)
    k_grid = list(cfg.k_grid if k_grid is None else k_grid)
    if not n_grid or not k_grid:
        raise ConfigError("contour grids must be nonempty")
    if min(n_grid) < 100:
        raise ConfigError("contour blocklengths must be >= 100")
    tables = []
    for s in cfg.schemes:
        if s == "DT":
            continue
        for m in cfg.m:
            mat = reliability_contour(cfg.system(m, eta=cfg.eta_for(s)), s, n_grid, k_grid)
            tables.append(matrix_table(f"success_{s}_m{m:g}", n_grid, k_grid, mat))
    return tables


def cmd_eta_sweep(cfg: RunConfig, step=None):
    step = cfg.eta_step if step is None else step
    sweep = Table("eta_sweep", ["m", "n", "scheme", "eta", "outage"])
    summary = Table("eta_summary", ["m", "n", "scheme", "mode", "eta_star", "outage_star"])
    for m in cfg.m:
        for n in cfg.eta_n_values:
            for s in cfg.schemes:
                if s == "DT":
                    continue
                res = optimize_eta(cfg.system(m, n_s=n, n_r=n), s, step)
                for eta, eps in zip(res.eta_grid, res.outages):
                    sweep.add(float(m), n, s, eta, eps)
                summary.add(float(m), n, s, cfg.mode, res.eta_star, res.outage_star)
    return [sweep, summary]


def cmd_delay_opt(cfg: RunConfig, targets=None, symbol_time=None, equal_split=None):
    targets = list(cfg.targets if targets is None else targets)
    ts = cfg.symbol_time if symbol_time is None else symbol_time
    eq = cfg.equal_split if equal_split is None else equal_split
    for t in targets:
        if not 0.0 < t < 0.1:
            raise ConfigError(f"target outage {t!r} outside (0, 0.1)")
    if not ts > 0:
        raise ConfigError("symbol_time must be positive")
    table = Table("delay_opt", ["m", "scheme", "eta", "equal_split", "target", "status",
                                "n_s", "n_r", "total_uses", "delta_s", "achieved_outage"])
    for m in cfg.m:
        for s in cfg.schemes:
            if s == "DT":
                continue
            eta = cfg.eta_for(s)
            for target in targets:
                try:
                    plan = optimize_blocklengths(cfg.system(m, eta=eta), s, target, ts, eq)
                except InfeasibleError:
                    table.add(float(m), s, eta, eq, target, "infeasible", None, None, None, None, None)
                    continue
                table.add(float(m), s, eta, eq, target, "ok", plan.n_s, plan.n_r,
                          plan.total_uses, plan.delta, plan.achieved_outage)
    return [table]


def cmd_validate(cfg: RunConfig, mu_scale: float = 1.0):
    cols = ["check", "status", "measured", "tolerance"]
    if cfg.timings:
        cols.append("runtime_s")
    t = Table("validate", cols)
    for r in checks.run_checks(cfg, mu_scale):
        row = [r.name, "pass" if r.passed else "fail", r.measured, r.tolerance]
        if cfg.timings:
            row.append(r.runtime_s)
        t.add(*row)
    return [t]


COMMANDS = {
    "outage-vs-n": cmd_outage_vs_n,
    "outage-vs-power": cmd_outage_vs_power,
    "contour": cmd_contour,
    "eta-sweep": cmd_eta_sweep,
    "delay-opt": cmd_delay_opt,
    "validate": cmd_validate,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="flat JSON run configuration")
    common.add_argument("--out", metavar="PATH", help="output file (default: stdout)")
    common.add_argument("--format", choices=["csv", "json"])
    common.add_argument("--mode", choices=["consistent", "paper-literal"])
    common.add_argument("--mc-samples", type=int, metavar="N")
    common.add_argument("--seed", type=int, metavar="N")
    common.add_argument("--schemes", help="comma-separated subset of DT,SC,MRC")
    common.add_argument("--m", type=float, nargs="+", help="fading figure(s), one series each")
    common.add_argument("--power", type=float, help="total power P/N0 (dB unless --linear)")
    common.add_argument("--linear", action="store_true", help="read --power as linear")
    common.add_argument("--eta", type=float)
    common.add_argument("--n-s", type=int)
    common.add_argument("--n-r", type=int)
    common.add_argument("--k", type=float)
    common.add_argument("--srd-blocklength", choices=["source", "total"])
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="fbrelay", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("outage-vs-n", parents=[common], help="outage against blocklength")
    p.add_argument("--n-min", type=int)
    p.add_argument("--n-max", type=int)
    p.add_argument("--n-step", type=int)
    p = sub.add_parser("outage-vs-power", parents=[common], help="outage against total power")
    p.add_argument("--p-min-db", type=float)
    p.add_argument("--p-max-db", type=float)
    p.add_argument("--p-step-db", type=float)
    p = sub.add_parser("contour", parents=[common], help="success probability over (n, k)")
    p.add_argument("--n-grid", type=int, nargs="+")
    p.add_argument("--k-grid", type=float, nargs="+")
    p = sub.add_parser("eta-sweep", parents=[common], help="power-allocation sweep and optimum")
    p.add_argument("--eta-step", type=float)
    p.add_argument("--eta-n-values", type=int, nargs="+")
    p = sub.add_parser("delay-opt", parents=[common], help="minimum-delay blocklength split")
    p.add_argument("--targets", type=float, nargs="+")
    p.add_argument("--symbol-time", type=float)
    p.add_argument("--equal-split", action="store_true", default=None)
    p = sub.add_parser("validate", parents=[common], help="run the self-checks")
    p.add_argument("--timings", action="store_true", default=None)
    return parser


_FLAG_KEYS = {
    "out": "out", "format": "format", "mode": "mode", "mc_samples": "mc_samples",
    "seed": "seed", "schemes": "schemes", "m": "m", "power": "power", "eta": "eta",
    "n_s": "n_s", "n_r": "n_r", "k": "k", "srd_blocklength": "srd_blocklength",
    "n_min": "n_min", "n_max": "n_max", "n_step": "n_step", "p_min_db": "p_min_db",
    "p_max_db": "p_max_db", "p_step_db": "p_step_db", "n_grid": "n_grid",
    "k_grid": "k_grid", "eta_step": "eta_step", "eta_n_values": "eta_n_values",
    "targets": "targets", "symbol_time": "symbol_time", "equal_split": "equal_split",
    "timings": "timings",
}


def load_config(args) -> RunConfig:
    cfg = RunConfig.from_file(args.config) if args.config else RunConfig()
    overrides = {}
    for attr, key in _FLAG_KEYS.items():
        value = getattr(args, attr, None)
        if value is not None:
            overrides[key] = value
    if overrides.get("mode") == "paper-literal":
        overrides["mode"] = "paper_literal"
    if getattr(args, "linear", False):
        overrides["power_unit"] = "linear"
    cfg.update(overrides, "command line")
    return cfg


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args)
        tables = COMMANDS[args.command](cfg)
    except (ConfigError, DomainError, OSError) as exc:
        print(f"fbrelay: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    write_tables(tables, cfg.format, cfg.out, sys.stdout)
    if args.command == "delay-opt" and "infeasible" in tables[0].column("status"):
        return EXIT_INFEASIBLE
    if args.command == "validate" and "fail" in tables[0].column("status"):
        return EXIT_VALIDATION
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
