"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 data error, 3 solver budget exceeded.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from . import __version__
from .analysis import CostModel, ScenarioResult, crossing_value, sweep_cost_curves
from .exact import DEFAULT_NODE_BUDGET, solve_exact
from .experiment import ConfigError, ExperimentConfig, run_experiment
from .lpfile import export_lp
from .otdr import count_otdrs
from .placement import (
    InstanceError,
    OracleCapError,
    brute_force_oracle,
    build_cover_instance,
    solve_greedy,
)
from .provisioning import (
    CHANNELS_PER_FIBER,
    DEFAULT_K_PATHS,
    ProvisioningError,
    provision,
    read_lightpaths_csv,
    write_lightpaths_csv,
)
from .topology import (
    DEFAULT_EXTENT_KM,
    DEFAULT_SPAN_KM,
    TopologyError,
    bundled_topology,
    generate_gabriel,
    load_topology,
    save_topology,
)
from .traffic import (
    SaturationError,
    generate_demands,
    read_demands_csv,
    write_demands_csv,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_BUDGET = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _load_topo(name_or_path: str, span_km: float | None = None):
    if name_or_path.lower() in ("j14", "n14"):
        return bundled_topology(name_or_path, span_km)
    return load_topology(name_or_path, span_km)


def _write_json(path, payload):
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ppmplan",
                     description="Optical-network monitor-placement planning toolkit")
    parser.add_argument("--version", action="version", version=f"ppmplan {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    topo = sub.add_parser("topo", help="topology generation and validation")
    topo_sub = topo.add_subparsers(dest="topo_command", required=True, parser_class=_Parser)
    gen = topo_sub.add_parser("gen", help="generate a random Gabriel-graph topology")
    gen.add_argument("--nodes", type=int, required=True)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--extent-km", type=float, default=DEFAULT_EXTENT_KM)
    gen.add_argument("--span-km", type=float, default=DEFAULT_SPAN_KM)
    gen.add_argument("--out", required=True)
    val = topo_sub.add_parser("validate", help="validate a topology JSON file")
    val.add_argument("path")

    dem = sub.add_parser("demands", help="generate a random demand set")
    dem.add_argument("--topo", required=True)
    dem.add_argument("--count", type=int, required=True)
    dem.add_argument("--seed", type=int, default=0)
    dem.add_argument("--out", required=True)

    prov = sub.add_parser("provision", help="establish lightpaths for a demand set")
    prov.add_argument("--topo", required=True)
    prov.add_argument("--demands", required=True)
    prov.add_argument("--arch", choices=["opaque", "transparent"], required=True)
    prov.add_argument("--k", type=int, default=DEFAULT_K_PATHS)
    prov.add_argument("--channels", type=int, default=CHANNELS_PER_FIBER)
    prov.add_argument("--out", required=True)

    place = sub.add_parser("place", help="solve monitor placement over dumped lightpaths")
    place.add_argument("--topo", required=True)
    place.add_argument("--lightpaths", required=True)
    place.add_argument("--solver", choices=["greedy", "exact", "oracle"], default="greedy")
    place.add_argument("--gamma", type=int, required=True)
    place.add_argument("--arch", choices=["opaque", "transparent"], default="transparent")
    place.add_argument("--alpha-policy", choices=["hop_plus_one", "strict_dominance"],
                       default="hop_plus_one")
    place.add_argument("--mode", choices=["lexicographic", "weighted"],
                       default="lexicographic")
    place.add_argument("--tie-break", choices=["deterministic", "seeded_random"],
                       default="deterministic")
    place.add_argument("--seed", type=int, default=0)
    place.add_argument("--node-budget", type=int, default=DEFAULT_NODE_BUDGET)
    place.add_argument("--out", default="-")

    base = sub.add_parser("baseline", help="fiber-monitoring (OTDR) baseline count")
    base.add_argument("--topo", required=True)
    base.add_argument("--lightpaths", help="restrict to links lit by these lightpaths")
    base.add_argument("--out", default="-")

    exp = sub.add_parser("export-lp", help="write the covering model in LP format")
    exp.add_argument("--topo", required=True)
    exp.add_argument("--lightpaths", required=True)
    exp.add_argument("--gamma", type=int, required=True)
    exp.add_argument("--alpha-policy", choices=["hop_plus_one", "strict_dominance"],
                     default="hop_plus_one")
    exp.add_argument("--out", required=True)

    ana = sub.add_parser("analyze", help="crossing values and cost curves from a summary")
    ana.add_argument("--summary", required=True)
    ana.add_argument("--fractions", default=",".join(str(f) for f in range(0, 101, 5)),
                     help="comma-separated monitor price fractions (%% of transponder)")
    ana.add_argument("--out", required=True)

    run = sub.add_parser("run", help="full pipeline from a config file and/or flags")
    run.add_argument("--config", help="experiment config JSON; flags below override it")
    run.add_argument("--topo", help="topology file or bundled name (j14, n14)")
    run.add_argument("--mode", choices=["rejection", "counts"], dest="load_mode")
    run.add_argument("--target", type=float, help="rejection-mode target fraction")
    run.add_argument("--step", type=int, help="rejection-mode demand increment")
    run.add_argument("--counts", help="comma-separated demand counts (counts mode)")
    run.add_argument("--seeds", help="comma-separated seeds")
    run.add_argument("--solver", choices=["greedy", "exact", "auto"])
    run.add_argument("--scenarios", help="comma-separated scenario names")
    run.add_argument("--out", required=True)
    return parser


def _cmd_topo(args) -> int:
    if args.topo_command == "gen":
        topo = generate_gabriel(args.nodes, seed=args.seed, extent_km=args.extent_km,
                                span_length_km=args.span_km)
        save_topology(topo, args.out)
        print(f"wrote {args.out}: {len(topo.nodes)} nodes, "
              f"{len(topo.links)} directed links")
        return EXIT_OK
    topo = load_topology(args.path)
    print(f"{args.path}: ok ({topo.name}: {len(topo.nodes)} nodes, "
          f"{len(topo.links)} directed links)")
    return EXIT_OK


def _cmd_demands(args) -> int:
    topo = _load_topo(args.topo)
    ds = generate_demands(topo, args.count, args.seed)
    write_demands_csv(ds, args.out)
    print(f"wrote {args.out}: {len(ds)} demands, {ds.total_tbps:.2f} Tb/s offered")
    return EXIT_OK


def _cmd_provision(args) -> int:
    topo = _load_topo(args.topo)
    ds = read_demands_csv(args.demands)
    lset = provision(topo, ds, args.arch, k=args.k, n_channels=args.channels)
    write_lightpaths_csv(lset, args.out)
    meta = {
        "architecture": args.arch,
        "accepted": len(lset.accepted),
        "rejected": len(lset.rejected),
        "carried_tbps": lset.carried_gbps / 1000.0,
        "rejection_fraction": lset.rejection_fraction,
        "spectrum_occupancy": lset.spectrum_occupancy(topo),
        "transponders": lset.transponder_count,
    }
    _write_json(str(Path(args.out)) + ".meta.json", meta)
    print(f"wrote {args.out}: {len(lset.lightpaths)} lightpaths, "
          f"{len(lset.rejected)} rejected")
    return EXIT_OK


def _cmd_place(args) -> int:
    topo = _load_topo(args.topo)
    lps = read_lightpaths_csv(args.lightpaths, topo)
    instance = build_cover_instance(lps, topo, args.gamma, alpha_policy=args.alpha_policy)
    if args.solver == "greedy":
        sol = solve_greedy(instance, architecture=args.arch,
                           tie_break=args.tie_break, seed=args.seed)
    elif args.solver == "exact":
        sol = solve_exact(instance, mode=args.mode, node_budget=args.node_budget)
    else:
        sol = brute_force_oracle(instance, mode=args.mode)
    _write_json(args.out, sol.to_json_dict())
    if args.solver == "exact" and not sol.optimal:
        print("node budget exceeded: incumbent only", file=sys.stderr)
        return EXIT_BUDGET
    return EXIT_OK


def _cmd_baseline(args) -> int:
    topo = _load_topo(args.topo)
    lit = None
    if args.lightpaths:
        lps = read_lightpaths_csv(args.lightpaths, topo)
        lit = {e for lp in lps for e in lp.links}
    plan = count_otdrs(topo, lit_links=lit)
    _write_json(args.out, plan.to_json_dict())
    if args.out != "-":
        print(f"wrote {args.out}: total {plan.total}")
    return EXIT_OK


def _cmd_export_lp(args) -> int:
    topo = _load_topo(args.topo)
    lps = read_lightpaths_csv(args.lightpaths, topo)
    instance = build_cover_instance(lps, topo, args.gamma, alpha_policy=args.alpha_policy)
    export_lp(instance, args.out)
    print(f"wrote {args.out}")
    return EXIT_OK


def _cmd_analyze(args) -> int:
    data = json.loads(Path(args.summary).read_text(encoding="utf-8"))
    fractions = [float(f) for f in args.fractions.split(",") if f.strip() != ""]
    otdr_total = data.get("otdr_total")
    if otdr_total is None:
        raise ConfigError("summary has no otdr_total; run with an OTDR scenario")
    cost_model = CostModel()
    results = []
    crossings = {}
    for name, row in sorted(data["scenarios"].items()):
        if name == "OTDR":
            results.append(ScenarioResult(name, row["monitors"]))
            continue
        results.append(ScenarioResult(name, row["monitors"],
                                      carried_tbps=row["carried_tbps"] or 0.0))
        if row["monitors"] > 0:
            crossings[name] = {
                "cost_pct": crossing_value(row["monitors"], otdr_total, cost_model, "cost"),
                "power_pct": crossing_value(row["monitors"], otdr_total, cost_model, "power"),
            }
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _write_json(out / "crossing.json", {"otdr_total": otdr_total, "crossings": crossings})
    for dim in ("cost", "power"):
        points = sweep_cost_curves(
            [r for r in results if r.scenario == "OTDR" or r.carried_tbps > 0],
            cost_model, fractions, n_otdr=otdr_total, dimension=dim)
        with open(out / f"{dim}_curves.csv", "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["scenario", "fraction_pct", "cost_per_tbps",
                             "otdr_cost_per_tbps"])
            for pt in points:
                writer.writerow([pt.scenario, pt.fraction_pct,
                                 f"{pt.cost_per_tbps:.6g}", f"{pt.otdr_cost_per_tbps:.6g}"])
    print(f"wrote {out}/crossing.json and curves")
    return EXIT_OK


def _cmd_run(args) -> int:
    data = {}
    if args.config:
        data = json.loads(Path(args.config).read_text(encoding="utf-8"))
    if args.topo:
        data["topology"] = args.topo
        data.pop("gabriel", None)
    if args.load_mode:
        data["load_mode"] = args.load_mode
    if args.target is not None:
        data["rejection_target"] = args.target
    if args.step is not None:
        data["step"] = args.step
    if args.counts:
        data["counts"] = [int(c) for c in args.counts.split(",")]
    if args.seeds:
        data["seeds"] = [int(s) for s in args.seeds.split(",")]
    if args.solver:
        data["solver"] = args.solver
    if args.scenarios:
        data["scenarios"] = [s.strip() for s in args.scenarios.split(",")]
    if not data.get("topology") and not data.get("gabriel"):
        raise ConfigError("give --config or --topo (or a gabriel entry in the config)")
    config = ExperimentConfig.from_dict(data)
    summary = run_experiment(config, args.out)
    print(f"wrote bundle to {args.out} (config_hash={summary['config_hash']})")
    return EXIT_OK


_HANDLERS = {
    "topo": _cmd_topo,
    "demands": _cmd_demands,
    "provision": _cmd_provision,
    "place": _cmd_place,
    "baseline": _cmd_baseline,
    "export-lp": _cmd_export_lp,
    "analyze": _cmd_analyze,
    "run": _cmd_run,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _HANDLERS[args.command](args)
    except OracleCapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (TopologyError, ProvisioningError, InstanceError, ConfigError,
            SaturationError, ValueError, OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
