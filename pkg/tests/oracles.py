"""Independent reference implementations the test suite checks against.

These deliberately share no code with the package: brute-force enumeration
instead of Dijkstra, float bisection instead of exact progressive filling,
a set-union fixpoint instead of message flooding, and an explicit
token-bucket replay instead of slot arithmetic.
"""

from __future__ import annotations

import random
from collections import defaultdict
from fractions import Fraction
from typing import Mapping, Sequence

from anchornet.topology import Adjacency, LinkStateAdvertisement, TopologyDatabase

# -- graph helpers ----------------------------------------------------------------


def db_from_edges(
    edges: Mapping[tuple[str, str], tuple[float, int]],
    hosts: Mapping[str, tuple[str, float, int]] | None = None,
) -> TopologyDatabase:
    """Build a converged database from undirected anchor edges.

    ``edges`` maps (u, v) -> (capacity_mbps, latency_us); ``hosts`` maps a
    host name -> (anchor, capacity, latency) access leg.
    """
    per_anchor: dict[str, list[Adjacency]] = defaultdict(list)
    for (u, v), (cap, lat) in edges.items():
        per_anchor[u].append(Adjacency(v, Fraction(str(cap)), lat, f"net-{min(u,v)}-{max(u,v)}"))
        per_anchor[v].append(Adjacency(u, Fraction(str(cap)), lat, f"net-{min(u,v)}-{max(u,v)}"))
    for host, (anchor, cap, lat) in (hosts or {}).items():
        per_anchor[anchor].append(Adjacency(host, Fraction(str(cap)), lat, f"site-{anchor}"))
    lsas = {
        name: LinkStateAdvertisement(name, 1, tuple(adjs))
        for name, adjs in per_anchor.items()
    }
    return TopologyDatabase(lsas)


def all_simple_paths(
    graph: Mapping[str, Sequence[tuple[str, int]]], src: str, dst: str
) -> list[tuple[int, tuple[str, ...]]]:
    """Every simple path with its latency metric, by exhaustive DFS."""
    out: list[tuple[int, tuple[str, ...]]] = []

    def dfs(node: str, path: tuple[str, ...], dist: int) -> None:
        if node == dst:
            out.append((dist, path))
            return
        for nbr, lat in graph.get(node, ()):
            if nbr not in path:
                dfs(nbr, path + (nbr,), dist + lat)

    dfs(src, (src,), 0)
    return out


def reference_k_disjoint(
    graph: Mapping[str, Sequence[tuple[str, int]]],
    anchors: set[str],
    src: str,
    dst: str,
    k: int,
) -> list[tuple[int, tuple[str, ...]]]:
    """Greedy edge-disjoint selection over the full (metric, lex) ordering."""
    candidates = sorted(all_simple_paths(graph, src, dst))
    chosen: list[tuple[int, tuple[str, ...]]] = []
    used: set[frozenset[str]] = set()
    for dist, path in candidates:
        edges = {
            frozenset((u, v))
            for u, v in zip(path, path[1:])
            if u in anchors and v in anchors
        }
        if edges & used:
            continue
        chosen.append((dist, path))
        used |= edges
        if len(chosen) == k:
            break
    return chosen


# -- water filling ----------------------------------------------------------------


def bisect_water_fill(
    capacities: Mapping[str, float],
    demands: Sequence[dict],
    iterations: int = 120,
) -> dict[str, float]:
    """Weighted max-min by bisection on the water level, in floats.

    ``demands`` entries: {"id", "weight", "links" (set), "cap" (float|None)}.
    Each round finds, by bisection, the highest uniform normalized level the
    unfrozen sessions can share, then freezes whoever hit a saturated link
    or their own cap.
    """
    rates: dict[str, float] = {d["id"]: 0.0 for d in demands}
    frozen: dict[str, bool] = {d["id"]: False for d in demands}

    def assigned(d: dict, level: float) -> float:
        r = d["weight"] * level
        if d["cap"] is not None:
            r = min(r, d["cap"])
        return r

    def feasible(level: float) -> bool:
        loads: dict[str, float] = defaultdict(float)
        for d in demands:
            r = rates[d["id"]] if frozen[d["id"]] else assigned(d, level)
            for link in d["links"]:
                loads[link] += r
        return all(loads[l] <= capacities[l] + 1e-12 for l in loads)

    while not all(frozen.values()):
        lo, hi = 0.0, 1e9
        if feasible(hi):
            level = hi
        else:
            for _ in range(iterations):
                mid = (lo + hi) / 2
                if feasible(mid):
                    lo = mid
                else:
                    hi = mid
            level = lo
        loads: dict[str, float] = defaultdict(float)
        for d in demands:
            r = rates[d["id"]] if frozen[d["id"]] else assigned(d, level)
            for link in d["links"]:
                loads[link] += r
        saturated = {l for l in loads if loads[l] >= capacities[l] - 1e-7}
        progressed = False
        for d in demands:
            if frozen[d["id"]]:
                continue
            r = assigned(d, level)
            capped = d["cap"] is not None and r >= d["cap"] - 1e-9
            blocked = bool(d["links"] & saturated)
            if capped or blocked:
                rates[d["id"]] = r
                frozen[d["id"]] = True
                progressed = True
        if not progressed:
            raise AssertionError("bisection oracle failed to converge")
    return rates


def random_fill_instance(rng: random.Random) -> tuple[dict[str, int], list[dict]]:
    """A random allocation instance within the checked envelope."""
    n_links = rng.randint(1, 8)
    links = {f"l{i}": rng.randint(1, 100) for i in range(n_links)}
    n_sessions = rng.randint(1, 6)
    demands = []
    for i in range(n_sessions):
        crossed = rng.sample(sorted(links), rng.randint(1, n_links))
        cap = rng.choice([None, None, None, rng.randint(1, 50)])
        demands.append(
            {
                "id": f"s{i}",
                "weight": rng.choice([1, 2, 3]),
                "links": set(crossed),
                "cap": cap,
            }
        )
    return links, demands


def max_min_property_holds(
    rates: Mapping[str, float],
    capacities: Mapping[str, float],
    demands: Sequence[dict],
    tol: float = 1e-9,
) -> bool:
    """Bottleneck check: every uncapped session sits on a saturated link
    where no other session has a strictly larger normalized rate."""
    loads: dict[str, float] = defaultdict(float)
    for d in demands:
        for link in d["links"]:
            loads[link] += rates[d["id"]]
    for d in demands:
        if d["cap"] is not None and rates[d["id"]] >= d["cap"] - tol:
            continue
        norm = rates[d["id"]] / d["weight"]
        ok = False
        for link in d["links"]:
            if loads[link] < capacities[link] - 1e-6:
                continue
            others = [
                rates[o["id"]] / o["weight"]
                for o in demands
                if link in o["links"]
            ]
            if all(v <= norm + 1e-6 for v in others):
                ok = True
                break
        if not ok:
            return False
    return True


# -- flooding ----------------------------------------------------------------------


def flood_fixpoint(
    configs: Mapping[str, Sequence[Adjacency]]
) -> dict[str, TopologyDatabase]:
    """Expected converged database per anchor: breadth-first set union of
    every origination reachable in its connected component."""
    neighbors: dict[str, set[str]] = {a: set() for a in configs}
    for a, adjs in configs.items():
        for adj in adjs:
            if adj.neighbor in configs:
                neighbors[a].add(adj.neighbor)
                neighbors[adj.neighbor].add(a)
    seen: set[str] = set()
    result: dict[str, TopologyDatabase] = {}
    for start in sorted(configs):
        if start in seen:
            continue
        members, frontier = set(), {start}
        while frontier:
            node = frontier.pop()
            if node in members:
                continue
            members.add(node)
            frontier |= neighbors[node] - members
        seen |= members
        lsas = {
            m: LinkStateAdvertisement(m, 1, tuple(configs[m])) for m in sorted(members)
        }
        db = TopologyDatabase(lsas)
        for m in members:
            result[m] = db
    return result


def random_connected_adjacency(
    rng: random.Random, max_nodes: int = 20
) -> dict[str, list[Adjacency]]:
    """Random connected anchor graph expressed as per-anchor adjacency lists."""
    n = rng.randint(2, max_nodes)
    names = [f"a{i:02d}" for i in range(n)]
    edges: set[tuple[str, str]] = set()
    for i in range(1, n):
        j = rng.randrange(i)
        edges.add(tuple(sorted((names[i], names[j]))))
    extra = rng.randint(0, n)
    while extra > 0:
        u, v = rng.sample(names, 2)
        key = tuple(sorted((u, v)))
        if key not in edges:
            edges.add(key)
        extra -= 1
    configs: dict[str, list[Adjacency]] = {name: [] for name in names}
    for u, v in sorted(edges):
        cap = Fraction(rng.randint(10, 400))
        lat = rng.randint(50, 2000)
        configs[u].append(Adjacency(v, cap, lat, f"net-{u}-{v}"))
        configs[v].append(Adjacency(u, cap, lat, f"net-{u}-{v}"))
    return configs


# -- pacing ------------------------------------------------------------------------


def paced_within_rate(
    emissions: Sequence[tuple[int, int]], rate_mbps: float, burst_bytes: int
) -> bool:
    """Token-bucket replay: over every window, emitted bytes must not exceed
    rate x window plus one burst allowance."""
    for i in range(len(emissions)):
        total = 0
        for j in range(i, len(emissions)):
            total += emissions[j][1]
            window = emissions[j][0] - emissions[i][0]
            if total * 8 > rate_mbps * window + burst_bytes * 8 + 1e-6:
                return False
    return True
