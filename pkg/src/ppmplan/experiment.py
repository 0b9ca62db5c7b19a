"""End-to-end experiment orchestration: topology -> demands -> provisioning ->
placement -> baseline -> analysis, with seeded reproducibility.

Every output file embeds the config hash; bundles are byte-identical for
identical configs and seeds (no wall-clock content). Per-seed artifacts are
kept under per_seed/ for debugging and stage-wise re-runs.
"""

from __future__ import annotations

import csv
import hashlib
import json
import re
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .analysis import CostModel, ScenarioResult, crossing_value, sweep_cost_curves, unsatisfied_npl_avg
from .exact import DEFAULT_NODE_BUDGET, solve_exact
from .otdr import count_otdrs
from .placement import build_cover_instance, solve_greedy
from .provisioning import (
    CHANNELS_PER_FIBER,
    DEFAULT_K_PATHS,
    Provisioner,
    write_lightpaths_csv,
)
from .topology import Topology, bundled_topology, generate_gabriel, load_topology
from .traffic import find_load_at_rejection, generate_demands

DEFAULT_SCENARIOS = ("Op", "Tr", "Op-O-1", "Tr-O-1", "Op-O-3", "Tr-O-3", "OTDR")
_SCENARIO_RE = re.compile(r"^(Op|Tr)(-O-(\d+))?$|^OTDR$")


class ConfigError(ValueError):
    """Invalid experiment configuration."""


def parse_scenario(name: str) -> tuple[str | None, int | None]:
    """(architecture, gamma) for a scenario name; OTDR maps to (None, None)."""
    m = _SCENARIO_RE.match(name)
    if not m:
        raise ConfigError(f"unknown scenario {name!r}")
    if name == "OTDR":
        return None, None
    arch = "opaque" if m.group(1) == "Op" else "transparent"
    gamma = int(m.group(3)) if m.group(3) else None
    return arch, gamma


@dataclass(frozen=True)
class ExperimentConfig:
    topology: str | None = None              # file path or bundled name
    gabriel: dict | None = None              # {"nodes": n, "extent_km": km}
    span_length_km: float | None = None
    scenarios: tuple[str, ...] = DEFAULT_SCENARIOS
    seeds: tuple[int, ...] = tuple(range(10))
    load_mode: str = "rejection"             # "rejection" | "counts"
    rejection_target: float = 0.01
    step: int = 10
    max_demands: int = 100_000
    counts: tuple[int, ...] = ()
    solver: str = "auto"                     # greedy | exact | auto
    node_budget: int = DEFAULT_NODE_BUDGET
    k_paths: int = DEFAULT_K_PATHS
    n_channels: int = CHANNELS_PER_FIBER
    cost_model: CostModel = field(default_factory=CostModel)
    ppm_fractions: tuple[float, ...] = tuple(range(0, 101, 5))
    compare_solvers: bool = False

    def __post_init__(self):
        if not self.scenarios:
            raise ConfigError("at least one scenario required")
        for s in self.scenarios:
            parse_scenario(s)
        if not self.seeds:
            raise ConfigError("seeds must be nonempty")
        if (self.topology is None) == (self.gabriel is None):
            raise ConfigError("exactly one of topology / gabriel must be given")
        if self.load_mode not in ("rejection", "counts"):
            raise ConfigError(f"unknown load_mode {self.load_mode!r}")
        if self.load_mode == "counts" and not self.counts:
            raise ConfigError("counts mode needs a nonempty counts list")
        if self.solver not in ("greedy", "exact", "auto"):
            raise ConfigError(f"unknown solver {self.solver!r}")

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        data = dict(data)
        if "cost_model" in data and not isinstance(data["cost_model"], CostModel):
            data["cost_model"] = CostModel(**data["cost_model"])
        for key in ("scenarios", "seeds", "counts", "ppm_fractions"):
            if key in data and data[key] is not None:
                data[key] = tuple(data[key])
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    def to_dict(self) -> dict:
        cm = self.cost_model
        return {
            "topology": self.topology,
            "gabriel": self.gabriel,
            "span_length_km": self.span_length_km,
            "scenarios": list(self.scenarios),
            "seeds": list(self.seeds),
            "load_mode": self.load_mode,
            "rejection_target": self.rejection_target,
            "step": self.step,
            "max_demands": self.max_demands,
            "counts": list(self.counts),
            "solver": self.solver,
            "node_budget": self.node_budget,
            "k_paths": self.k_paths,
            "n_channels": self.n_channels,
            "cost_model": {
                "transponder_cost": cm.transponder_cost,
                "transponder_power": cm.transponder_power,
                "otdr_cost": cm.otdr_cost,
                "otdr_power": cm.otdr_power,
            },
            "ppm_fractions": list(self.ppm_fractions),
            "compare_solvers": self.compare_solvers,
        }

    @property
    def config_hash(self) -> str:
        canonical = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode()).hexdigest()[:16]

    def resolve_topology(self, seed: int) -> Topology:
        if self.gabriel is not None:
            kwargs = dict(self.gabriel)
            n = kwargs.pop("nodes")
            if self.span_length_km is not None:
                kwargs.setdefault("span_length_km", self.span_length_km)
            return generate_gabriel(n, seed=seed, **kwargs)
        name = str(self.topology)
        if name.lower() in ("j14", "n14"):
            return bundled_topology(name, self.span_length_km)
        return load_topology(name, self.span_length_km)

    def resolve_solver(self) -> str:
        if self.solver != "auto":
            return self.solver
        # exact is desk-scale on the bundled 14-node networks; the heuristic
        # is the default on generated graphs
        return "greedy" if self.gabriel is not None else "exact"


def _solve_scenario(instance, solver: str, architecture: str, node_budget: int):
    if solver == "exact":
        return solve_exact(instance, node_budget=node_budget)
    return solve_greedy(instance, architecture=architecture)


def run_experiment(config: ExperimentConfig, out_dir: str | Path) -> dict:
    """Run all seeds and write the result bundle; returns the summary dict."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    chash = config.config_hash
    solver = config.resolve_solver()
    archs = sorted({parse_scenario(s)[0] for s in config.scenarios
                    if parse_scenario(s)[0] is not None})

    per_seed: dict[int, dict] = {}
    errors: dict[int, str] = {}
    for seed in config.seeds:
        try:
            per_seed[seed] = _run_seed(config, seed, solver, archs, out, chash)
        except Exception as exc:  # recorded, bundle marked partial
            errors[seed] = f"{type(exc).__name__}: {exc}"
    if not per_seed:
        raise RuntimeError(f"all seeds failed: {errors}")

    seeds_ok = sorted(per_seed)
    n_points = len(per_seed[seeds_ok[0]]["points"])

    def mean(values):
        return sum(values) / len(values)

    # per-load-point aggregation over seeds
    agg_points = []
    for i in range(n_points):
        point = {"offered_tbps": mean([per_seed[s]["points"][i]["offered_tbps"]
                                       for s in seeds_ok])}
        rows = {}
        for name in config.scenarios:
            rows[name] = {
                "monitors": mean([per_seed[s]["points"][i]["scenarios"][name]["monitors"]
                                  for s in seeds_ok]),
                "unsatisfied_npl_avg": _mean_or_none(
                    [per_seed[s]["points"][i]["scenarios"][name]["unsatisfied_npl_avg"]
                     for s in seeds_ok]),
                "carried_tbps": _mean_or_none(
                    [per_seed[s]["points"][i]["scenarios"][name]["carried_tbps"]
                     for s in seeds_ok]),
            }
        point["scenarios"] = rows
        agg_points.append(point)

    # summary at the final load point, with crossing values
    final = agg_points[-1]
    otdr_count = None
    if "OTDR" in config.scenarios:
        otdr_count = final["scenarios"]["OTDR"]["monitors"]
    scenario_summaries = {}
    scenario_results = []
    for name in config.scenarios:
        row = final["scenarios"][name]
        entry = {
            "monitors": row["monitors"],
            "carried_tbps": row["carried_tbps"],
            "unsatisfied_npl_avg": row["unsatisfied_npl_avg"],
            "crossing_cost_pct": None,
            "crossing_power_pct": None,
        }
        if name != "OTDR" and otdr_count is not None and row["monitors"] > 0:
            entry["crossing_cost_pct"] = crossing_value(
                row["monitors"], otdr_count, config.cost_model, "cost")
            entry["crossing_power_pct"] = crossing_value(
                row["monitors"], otdr_count, config.cost_model, "power")
        scenario_summaries[name] = entry
        scenario_results.append(ScenarioResult(
            scenario=name, monitor_count=row["monitors"],
            carried_tbps=row["carried_tbps"] or 0.0,
            unsatisfied_npl_avg=row["unsatisfied_npl_avg"],
            crossing_cost_pct=entry["crossing_cost_pct"],
            crossing_power_pct=entry["crossing_power_pct"]))

    summary = {
        "config_hash": chash,
        "version": __version__,
        "solver": solver,
        "seeds": list(seeds_ok),
        "partial": bool(errors),
        "errors": {str(k): v for k, v in sorted(errors.items())},
        "scenarios": scenario_summaries,
        "otdr_total": otdr_count,
    }

    _write_json(out / "config.json", {"config_hash": chash, "version": __version__,
                                      "config": config.to_dict()})
    _write_json(out / "summary.json", summary)
    _write_monitors_csv(out / "monitors.csv", chash, config.scenarios, agg_points)
    if otdr_count is not None:
        for dim in ("cost", "power"):
            points = sweep_cost_curves(
                [r for r in scenario_results
                 if r.scenario == "OTDR" or (r.carried_tbps and r.monitor_count > 0)],
                config.cost_model, config.ppm_fractions, dimension=dim)
            _write_curves_csv(out / f"{dim}_curves.csv", chash, points)
    if config.compare_solvers:
        _write_gap_csv(out / "gap.csv", chash, per_seed, seeds_ok)
    return summary


def _mean_or_none(values):
    vals = [v for v in values if v is not None]
    return sum(vals) / len(vals) if vals else None


def _run_seed(config: ExperimentConfig, seed: int, solver: str, archs,
              out: Path, chash: str) -> dict:
    topo = config.resolve_topology(seed)
    seed_dir = out / "per_seed" / f"seed_{seed}"
    seed_dir.mkdir(parents=True, exist_ok=True)

    if config.load_mode == "rejection":
        demand_set, _ = find_load_at_rejection(
            topo, config.rejection_target, seed, step=config.step,
            max_demands=config.max_demands, k=config.k_paths,
            n_channels=config.n_channels)
        counts = [len(demand_set)]
        demands = demand_set.demands
    else:
        counts = sorted(config.counts)
        demands = generate_demands(topo, counts[-1], seed).demands

    provisioners = {a: Provisioner(topo, a, k=config.k_paths,
                                   n_channels=config.n_channels) for a in archs}
    served = 0
    points = []
    gap_rows = []
    for n in counts:
        for d in demands[served:n]:
            for prov in provisioners.values():
                prov.serve(d)
        served = n
        lsets = {a: prov.result() for a, prov in provisioners.items()}
        offered = sum(d.rate_gbps for d in demands[:n]) / 1000.0
        point = {"offered_tbps": offered, "scenarios": {}}
        for name in config.scenarios:
            arch, gamma = parse_scenario(name)
            if name == "OTDR":
                ref = lsets.get("transparent") or next(iter(lsets.values()))
                plan = count_otdrs(topo, lit_links=ref.lit_links(topo))
                point["scenarios"][name] = {"monitors": plan.total,
                                            "unsatisfied_npl_avg": None,
                                            "carried_tbps": None}
                continue
            ls = lsets[arch]
            carried = ls.carried_gbps / 1000.0
            if gamma is None:
                cov = ls.coverage(topo)
                point["scenarios"][name] = {
                    "monitors": len(ls.lightpaths),
                    "unsatisfied_npl_avg": unsatisfied_npl_avg(cov, 1, "unoptimized"),
                    "carried_tbps": carried,
                }
            else:
                inst = build_cover_instance(ls, topo, gamma)
                sol = _solve_scenario(inst, solver, arch, config.node_budget)
                point["scenarios"][name] = {
                    "monitors": sol.total_monitors,
                    "unsatisfied_npl_avg": sol.unsatisfied / len(topo.links),
                    "carried_tbps": carried,
                }
                if config.compare_solvers:
                    other = (solve_greedy(inst, architecture=arch) if solver == "exact"
                             else solve_exact(inst, node_budget=config.node_budget))
                    greedy_m, exact_sol = ((sol.total_monitors, other)
                                           if solver == "greedy" else
                                           (other.total_monitors, sol))
                    gap_rows.append({
                        "seed": seed, "offered_tbps": offered, "scenario": name,
                        "greedy_monitors": greedy_m,
                        "exact_monitors": exact_sol.total_monitors,
                        "exact_optimal": exact_sol.optimal,
                    })
                _write_json(seed_dir / f"solution_{name}_n{n}.json",
                            {"config_hash": chash, **sol.to_json_dict()})
        points.append(point)

    for arch, ls in lsets.items():
        write_lightpaths_csv(ls, seed_dir / f"lightpaths_{arch}.csv", config_hash=chash)
        _write_json(seed_dir / f"provision_{arch}.meta.json", {
            "config_hash": chash,
            "architecture": arch,
            "accepted": len(ls.accepted),
            "rejected": len(ls.rejected),
            "carried_tbps": ls.carried_gbps / 1000.0,
            "rejection_fraction": ls.rejection_fraction,
            "spectrum_occupancy": ls.spectrum_occupancy(topo),
        })
    return {"points": points, "gap_rows": gap_rows}


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def _write_json(path: Path, payload: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_monitors_csv(path: Path, chash: str, scenarios, agg_points) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(f"# config_hash={chash}\n")
        writer = csv.writer(fh)
        writer.writerow(["scenario", "load_tbps", "monitors", "unsatisfied_npl"])
        for point in agg_points:
            for name in scenarios:
                row = point["scenarios"][name]
                writer.writerow([name, _fmt(point["offered_tbps"]),
                                 _fmt(row["monitors"]),
                                 _fmt(row["unsatisfied_npl_avg"])])


def _write_curves_csv(path: Path, chash: str, points) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(f"# config_hash={chash}\n")
        writer = csv.writer(fh)
        writer.writerow(["scenario", "fraction_pct", "cost_per_tbps",
                         "otdr_cost_per_tbps"])
        for pt in points:
            writer.writerow([pt.scenario, _fmt(pt.fraction_pct),
                             _fmt(pt.cost_per_tbps), _fmt(pt.otdr_cost_per_tbps)])


def _write_gap_csv(path: Path, chash: str, per_seed, seeds_ok) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(f"# config_hash={chash}\n")
        writer = csv.writer(fh)
        writer.writerow(["seed", "load_tbps", "scenario", "greedy_monitors",
                         "exact_monitors", "exact_optimal", "gap_pct"])
        for s in seeds_ok:
            for row in per_seed[s]["gap_rows"]:
                gap = None
                if row["exact_optimal"] and row["exact_monitors"] > 0:
                    gap = 100.0 * (row["greedy_monitors"] - row["exact_monitors"]) \
                        / row["exact_monitors"]
                writer.writerow([row["seed"], _fmt(row["offered_tbps"]),
                                 row["scenario"], row["greedy_monitors"],
                                 row["exact_monitors"],
                                 _fmt(row["exact_optimal"]), _fmt(gap)])
