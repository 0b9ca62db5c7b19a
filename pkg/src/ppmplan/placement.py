"""Monitoring-placement core: cover instances, the greedy solver, and the
exhaustive oracle.

A cover instance groups established lightpaths by identical physical route;
placing a monitor on one lightpath of a group raises the achieved
monitors-per-link count on every link of that route. Solvers pick per-group
monitor counts p (0 <= p <= group size) minimizing unsatisfied coverage
first and monitor count second.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

ALPHA_POLICIES = ("hop_plus_one", "strict_dominance")


class InstanceError(ValueError):
    """Invalid cover-instance data."""


class OracleCapError(RuntimeError):
    """Enumeration space exceeds the configured oracle cap."""


def route_key(links: tuple[str, ...]) -> str:
    """Display key for a route: node chain when labels parse as 'u->v'."""
    nodes: list[str] = []
    for lnk in links:
        if "->" not in lnk:
            return "|".join(links)
        u, v = lnk.split("->", 1)
        if not nodes:
            nodes = [u, v]
        elif nodes[-1] == u:
            nodes.append(v)
        else:
            return "|".join(links)
    return "->".join(nodes)


@dataclass(frozen=True)
class PathGroup:
    """Distinct physical route with its lightpath multiplicity."""

    links: tuple[str, ...]
    count: int
    key: str = ""

    def __post_init__(self):
        if not self.links:
            raise InstanceError("path group with empty route")
        if len(set(self.links)) != len(self.links):
            raise InstanceError(f"route repeats a link: {self.links}")
        if self.count < 1:
            raise InstanceError(f"path group multiplicity must be >= 1, got {self.count}")
        if not self.key:
            object.__setattr__(self, "key", route_key(self.links))

    @property
    def hops(self) -> int:
        return len(self.links)


@dataclass(frozen=True)
class CoverInstance:
    links: tuple[str, ...]
    groups: tuple[PathGroup, ...]
    gamma: int
    alpha: int

    def __post_init__(self):
        if self.gamma < 1:
            raise InstanceError(f"gamma must be >= 1, got {self.gamma}")
        if len(set(self.links)) != len(self.links):
            raise InstanceError("duplicate link labels")
        link_set = set(self.links)
        seen_routes: set[tuple[str, ...]] = set()
        for g in self.groups:
            if g.links in seen_routes:
                raise InstanceError(f"duplicate route {g.links}")
            seen_routes.add(g.links)
            missing = set(g.links) - link_set
            if missing:
                raise InstanceError(f"route uses unknown links {sorted(missing)}")
        if self.alpha <= self.max_hops:
            raise InstanceError(
                f"alpha ({self.alpha}) must exceed the maximum hop count ({self.max_hops})")

    @property
    def max_hops(self) -> int:
        return max((g.hops for g in self.groups), default=0)

    @cached_property
    def link_index(self) -> dict[str, int]:
        return {e: i for i, e in enumerate(self.links)}

    @cached_property
    def delta(self) -> np.ndarray:
        """Coverage indicator matrix, shape (|links|, |groups|)."""
        d = np.zeros((len(self.links), len(self.groups)), dtype=np.int64)
        for j, g in enumerate(self.groups):
            for e in g.links:
                d[self.link_index[e], j] = 1
        return d

    @cached_property
    def counts(self) -> np.ndarray:
        return np.array([g.count for g in self.groups], dtype=np.int64)

    @cached_property
    def max_coverage(self) -> np.ndarray:
        """Per-link coverage when every lightpath gets a monitor."""
        if not self.groups:
            return np.zeros(len(self.links), dtype=np.int64)
        return self.delta @ self.counts

    @property
    def min_unsatisfied(self) -> int:
        """Floor on unsatisfied coverage; reached at p = counts (coverage is monotone)."""
        return int(np.maximum(0, self.gamma - np.minimum(self.gamma, self.max_coverage)).sum())


def make_instance(links, groups, gamma: int, alpha: int | None = None,
                  alpha_policy: str = "hop_plus_one") -> CoverInstance:
    """Validated CoverInstance; drops inert zero-multiplicity groups.

    `groups` entries are (links, count) pairs or PathGroup objects. When
    `alpha` is None it is derived from `alpha_policy`: "hop_plus_one" uses
    max hops + 1, "strict_dominance" uses 1 + total lightpath count (always
    above the hop bound).
    """
    built: list[PathGroup] = []
    for g in groups:
        if isinstance(g, PathGroup):
            pg = g
        else:
            route, count = g
            if count == 0:
                continue
            pg = PathGroup(tuple(route), int(count))
        built.append(pg)
    if alpha is None:
        max_hops = max((g.hops for g in built), default=0)
        if alpha_policy == "hop_plus_one":
            alpha = max_hops + 1
        elif alpha_policy == "strict_dominance":
            alpha = max(max_hops, sum(g.count for g in built)) + 1
        else:
            raise InstanceError(f"unknown alpha policy {alpha_policy!r}")
    return CoverInstance(links=tuple(links), groups=tuple(built),
                         gamma=int(gamma), alpha=int(alpha))


def build_cover_instance(lightpaths, topology, gamma: int,
                         alpha_policy: str = "hop_plus_one") -> CoverInstance:
    """Cover instance over all directed links of `topology` from established
    lightpaths (a LightpathSet or an iterable of Lightpath / link-tuple routes)."""
    if hasattr(lightpaths, "lightpaths"):
        lightpaths = lightpaths.lightpaths
    tally: dict[tuple[str, ...], int] = {}
    for lp in lightpaths:
        route = tuple(lp.links) if hasattr(lp, "links") else tuple(lp)
        tally[route] = tally.get(route, 0) + 1
    return make_instance(topology.link_labels, sorted(tally.items()), gamma,
                         alpha_policy=alpha_policy)


@dataclass(frozen=True)
class PlacementSolution:
    p: dict[str, int]
    x: dict[str, int]
    total_monitors: int
    unsatisfied: int
    objective: int
    optimal: bool
    selection: tuple[int, ...] | None = None

    def to_json_dict(self) -> dict:
        return {
            "p": dict(self.p),
            "x": dict(self.x),
            "unsatisfied": self.unsatisfied,
            "monitors": self.total_monitors,
            "objective": self.objective,
            "optimal": self.optimal,
        }


def solution_from_counts(instance: CoverInstance, p_vec, optimal: bool,
                         selection: tuple[int, ...] | None = None) -> PlacementSolution:
    """Derive achieved coverage, unsatisfied total and objective from p."""
    p = np.asarray(p_vec, dtype=np.int64)
    if p.shape != (len(instance.groups),):
        raise InstanceError("p vector length mismatch")
    if np.any(p < 0) or np.any(p > instance.counts):
        raise InstanceError("p out of bounds")
    coverage = instance.delta @ p if len(instance.groups) else np.zeros(
        len(instance.links), dtype=np.int64)
    x = np.minimum(instance.gamma, coverage)
    unsatisfied = int((instance.gamma - x).sum())
    monitors = int(p.sum())
    return PlacementSolution(
        p={g.key: int(p[j]) for j, g in enumerate(instance.groups) if p[j] > 0},
        x={e: int(x[i]) for i, e in enumerate(instance.links)},
        total_monitors=monitors,
        unsatisfied=unsatisfied,
        objective=instance.alpha * unsatisfied + monitors,
        optimal=optimal,
        selection=selection,
    )


def verify_solution(instance: CoverInstance, sol: PlacementSolution) -> bool:
    """Feasibility of a reported solution against the model constraints."""
    p = np.array([sol.p.get(g.key, 0) for g in instance.groups], dtype=np.int64)
    if np.any(p < 0) or np.any(p > instance.counts):
        return False
    coverage = instance.delta @ p if len(instance.groups) else np.zeros(
        len(instance.links), dtype=np.int64)
    x = np.array([sol.x[e] for e in instance.links], dtype=np.int64)
    if np.any(x != np.minimum(instance.gamma, coverage)):
        return False
    unsat = int((instance.gamma - x).sum())
    return (sol.unsatisfied == unsat
            and sol.total_monitors == int(p.sum())
            and sol.objective == instance.alpha * unsat + int(p.sum()))


def greedy_cost(z_values) -> float:
    """Harmonic tie-break cost over covered-link availabilities: 1 / sum(1/z).

    Only strictly positive availabilities participate; links with no
    remaining coverage need contribute nothing.
    """
    inv = sum(1.0 / z for z in z_values if z > 0)
    if inv == 0:
        return math.inf
    return 1.0 / inv


def _solve_greedy_opaque(instance: CoverInstance) -> PlacementSolution:
    for g in instance.groups:
        if g.hops != 1:
            raise InstanceError(
                f"opaque placement requires single-hop groups, got {g.links}")
    p = np.zeros(len(instance.groups), dtype=np.int64)
    x = {e: 0 for e in instance.links}
    selection = []
    for j, g in enumerate(instance.groups):
        e = g.links[0]
        take = min(g.count, instance.gamma - x[e])
        if take > 0:
            p[j] = take
            x[e] += take
            selection.extend([j] * take)
    return solution_from_counts(instance, p, optimal=False, selection=tuple(selection))


def solve_greedy(instance: CoverInstance, architecture: str = "transparent",
                 tie_break: str = "deterministic", seed: int = 0) -> PlacementSolution:
    """Iterative covering heuristic.

    Picks, while any link is below the required count, the group covering
    the most still-needy links; ties go to the smallest harmonic cost over
    remaining availabilities, then to the lowest group index (or a seeded
    random pick when tie_break="seeded_random").
    """
    if architecture not in ("opaque", "transparent"):
        raise InstanceError(f"unknown architecture {architecture!r}")
    if tie_break not in ("deterministic", "seeded_random"):
        raise InstanceError(f"unknown tie_break {tie_break!r}")
    if architecture == "opaque":
        return _solve_greedy_opaque(instance)

    n_e, n_l = len(instance.links), len(instance.groups)
    gamma = instance.gamma
    delta = instance.delta
    c = instance.counts.copy()
    if n_l == 0 or n_e == 0:
        return solution_from_counts(instance, np.zeros(n_l, dtype=np.int64),
                                    optimal=False, selection=())
    rng = np.random.default_rng(seed) if tie_break == "seeded_random" else None

    p = np.zeros(n_l, dtype=np.int64)
    x = np.zeros(n_e, dtype=np.int64)
    in_em = np.ones(n_e, dtype=bool)
    m = delta.astype(np.int64).copy()
    v = m.sum(axis=0)
    z = delta @ c
    group_rows = [np.flatnonzero(delta[:, j]) for j in range(n_l)]
    selection: list[int] = []

    while in_em.any():
        vmax = v.max()
        if vmax == 0:
            break
        tied = np.flatnonzero(v == vmax)
        if len(tied) > 1:
            costs = np.array([greedy_cost(z[m[:, j] == 1]) for j in tied])
            tied = tied[costs == costs.min()]
        if len(tied) > 1 and rng is not None:
            ls = int(tied[rng.integers(len(tied))])
        else:
            ls = int(tied[0])
        selection.append(ls)
        p[ls] += 1
        for e in group_rows[ls]:
            x[e] += 1
            if in_em[e]:
                z[e] -= 1
                if x[e] >= gamma:
                    v -= m[e, :]
                    m[e, :] = 0
                    in_em[e] = False
                    z[e] = 0
        if p[ls] >= c[ls]:
            m[:, ls] = 0
            v[ls] = 0
    return solution_from_counts(instance, p, optimal=False, selection=tuple(selection))


def brute_force_oracle(instance: CoverInstance, mode: str = "weighted",
                       cap: int = 1_000_000) -> PlacementSolution:
    """Exhaustive optimum by enumerating every p vector; testing-scale only.

    mode="weighted" minimizes alpha*unsatisfied + monitors; mode="lexicographic"
    minimizes (unsatisfied, monitors). Refuses when prod(count+1) exceeds `cap`.
    """
    if mode not in ("weighted", "lexicographic"):
        raise InstanceError(f"unknown oracle mode {mode!r}")
    counts = instance.counts
    space = float(np.prod((counts + 1).astype(np.float64))) if len(counts) else 1.0
    if space > cap:
        raise OracleCapError(f"enumeration space {space:.3g} exceeds cap {cap}")
    if len(counts) == 0:
        return solution_from_counts(instance, np.zeros(0, dtype=np.int64), optimal=True)
    grids = np.meshgrid(*(np.arange(cc + 1) for cc in counts), indexing="ij")
    all_p = np.stack([g.ravel() for g in grids], axis=1)  # (space, |groups|)
    coverage = all_p @ instance.delta.T
    x = np.minimum(instance.gamma, coverage)
    unsat = (instance.gamma - x).sum(axis=1)
    monitors = all_p.sum(axis=1)
    if mode == "weighted":
        score = instance.alpha * unsat + monitors
    else:
        score = unsat * (int(counts.sum()) + 1) + monitors
    best = int(np.argmin(score))  # first minimum: deterministic
    return solution_from_counts(instance, all_p[best], optimal=True)
