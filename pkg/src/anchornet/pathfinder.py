"""Multipath route computation over the converged overlay topology.

Paths are latency-shortest with a fully specified tie-break (lexicographic
on hop names) so two runs over the same database produce byte-identical
path lists.  Additional paths are found by removing the anchor-to-anchor
links already used and re-running the search; host access legs are exempt
from the disjointness constraint because a host typically has a single
uplink.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional

from .addressing import L3Locator, ResolverTable
from .topology import Adjacency, TopologyDatabase


@dataclass(frozen=True)
class L5Path:
    """A simple overlay path: source, anchors, destination.

    ``metric_us`` is the sum of per-link latencies; ``min_capacity_mbps`` the
    bottleneck available capacity, or None for the degenerate zero-link path.
    """

    path_id: int
    hops: tuple[str, ...]
    metric_us: int
    min_capacity_mbps: Optional[Fraction]

    def __post_init__(self) -> None:
        if len(set(self.hops)) != len(self.hops):
            raise ValueError(f"path hops must be pairwise distinct: {self.hops}")

    def edges(self) -> list[tuple[str, str]]:
        return list(zip(self.hops, self.hops[1:]))


def _edge_lookup(graph: Mapping[str, tuple[Adjacency, ...]]) -> dict[tuple[str, str], Adjacency]:
    table: dict[tuple[str, str], Adjacency] = {}
    for node, adjs in graph.items():
        for adj in adjs:
            table[(node, adj.neighbor)] = adj
    return table


def _dijkstra(
    graph: Mapping[str, tuple[Adjacency, ...]],
    src: str,
    dst: str,
    banned: frozenset[frozenset[str]],
    anchors: frozenset[str],
) -> Optional[tuple[int, tuple[str, ...]]]:
    """Shortest path by (latency, lexicographic hop names).

    The heap keys on (distance, path-so-far), which makes the tie-break
    order-preserving under extension, so the first finalized entry for the
    destination is the globally smallest (metric, lex) simple path.
    """
    if src == dst:
        return 0, (src,)
    best: dict[str, tuple[int, tuple[str, ...]]] = {src: (0, (src,))}
    heap: list[tuple[int, tuple[str, ...], str]] = [(0, (src,), src)]
    done: set[str] = set()
    while heap:
        dist, path, node = heapq.heappop(heap)
        if node in done or (dist, path) != best[node]:
            continue
        if node == dst:
            return dist, path
        done.add(node)
        for adj in graph.get(node, ()):
            nxt = adj.neighbor
            if nxt in done:
                continue
            if node in anchors and nxt in anchors and frozenset((node, nxt)) in banned:
                continue
            cand = (dist + adj.latency_us, path + (nxt,))
            if nxt not in best or cand < best[nxt]:
                best[nxt] = cand
                heapq.heappush(heap, (cand[0], cand[1], nxt))
    return None


def k_disjoint_paths(db: TopologyDatabase, src: str, dst: str, k: int) -> list[L5Path]:
    """Up to ``k`` simple paths, pairwise disjoint over anchor-to-anchor links.

    Computed by iterated shortest-path with used-edge removal; returns fewer
    than ``k`` paths (possibly zero) when the supply is exhausted.  An absent
    endpoint is a caller error; a disconnected pair is not.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    graph = db.graph()
    for name in (src, dst):
        if name not in graph:
            raise ValueError(f"node {name!r} not present in topology")
    anchors = db.anchors
    edge_info = _edge_lookup(graph)
    banned: set[frozenset[str]] = set()
    paths: list[L5Path] = []
    for path_id in range(k):
        found = _dijkstra(graph, src, dst, frozenset(banned), anchors)
        if found is None:
            break
        metric, hops = found
        caps = [edge_info[(u, v)].capacity_mbps for u, v in zip(hops, hops[1:])]
        paths.append(L5Path(path_id, hops, metric, min(caps) if caps else None))
        fresh = {
            frozenset((u, v))
            for u, v in zip(hops, hops[1:])
            if u in anchors and v in anchors
        } - banned
        if not fresh:
            # Nothing new to remove: the next search would return this very
            # path again (it crosses no unused anchor-to-anchor links).
            break
        banned |= fresh
    return paths


def first_hop_locator(path: L5Path, resolver: ResolverTable) -> L3Locator:
    """The L3 destination written on a segment when it leaves the source.

    Always the locator of hops[1] -- never a hop further along -- which is
    what forces the substrate to carry the segment to the chosen anchor
    instead of routing straight to the far end.  When the next hop exposes
    several locators, prefer one sharing a domain with the source's own
    attachment; remaining ties break on the smallest locator.
    """
    if len(path.hops) < 2:
        raise ValueError("path needs at least two hops to have a first hop")
    candidates = sorted(resolver.resolve(path.hops[1]))
    try:
        src_domains = {loc.domain_id for loc in resolver.resolve(path.hops[0])}
    except LookupError:
        src_domains = set()
    for loc in candidates:
        if loc.domain_id in src_domains:
            return loc
    return candidates[0]
