"""One-to-many distribution over a shared tree.

Instead of opening one unicast session per subscriber, a publisher's stream
flows down a tree rooted at its anchor; branch anchors duplicate segments,
so each payload crosses each tree link exactly once no matter how many
subscribers sit beyond it.  The tree is the union of cost-weighted shortest
paths from the root to every subscriber's anchor -- deterministic and never
worse than per-subscriber unicast, though not Steiner-optimal.

Reliability is hop-by-hop: every tree edge runs its own selective-repeat
leg, so loss on one branch never stalls the others.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .topology import TopologyDatabase


class Unreachable(ValueError):
    """One or more subscribers cannot be reached from the publisher."""

    def __init__(self, subscribers: Sequence[str]) -> None:
        self.subscribers = tuple(sorted(subscribers))
        super().__init__(f"unreachable subscribers: {', '.join(self.subscribers)}")


LinkCost = Mapping[frozenset, Fraction]


@dataclass(frozen=True)
class DistributionTree:
    """A loop-free fan-out rooted at the publisher's anchor.

    ``edges`` are directed parent-to-child anchor links; every subscriber's
    attachment anchor is a tree node.
    """

    root: str
    edges: tuple[tuple[str, str], ...]
    subscribers: frozenset[str]
    subscriber_anchors: Mapping[str, str]

    def nodes(self) -> frozenset[str]:
        found = {self.root}
        for parent, child in self.edges:
            found.add(parent)
            found.add(child)
        return frozenset(found)

    def children(self, node: str) -> tuple[str, ...]:
        return tuple(sorted(child for parent, child in self.edges if parent == node))

    def cost_crossings(self, link_cost: LinkCost) -> Fraction:
        """Total configured cost of one full traversal of the tree."""
        total = Fraction(0)
        for parent, child in self.edges:
            total += link_cost.get(frozenset((parent, child)), Fraction(1))
        return total


def anchor_of(db: TopologyDatabase, name: str) -> str:
    """The attachment anchor of a node: itself if it is an anchor, else the
    single anchor its access leg hangs off."""
    if name in db.anchors:
        return name
    graph = db.graph()
    if name not in graph:
        raise ValueError(f"node {name!r} not present in topology")
    uplinks = sorted({adj.neighbor for adj in graph[name] if adj.neighbor in db.anchors})
    if not uplinks:
        raise ValueError(f"host {name!r} has no anchor uplink")
    return uplinks[0]


def _cost_tree_paths(
    db: TopologyDatabase,
    root: str,
    targets: set[str],
    link_cost: LinkCost,
) -> dict[str, tuple[str, ...]]:
    """Cost-shortest path from the root to each target over anchors only.

    Single-source search keyed on (cost, lexicographic path) yields one
    predecessor per node, so the union of the returned paths is a tree.
    """
    anchors = db.anchors
    graph = db.graph()
    best: dict[str, tuple[Fraction, tuple[str, ...]]] = {root: (Fraction(0), (root,))}
    heap: list[tuple[Fraction, tuple[str, ...], str]] = [(Fraction(0), (root,), root)]
    done: set[str] = set()
    found: dict[str, tuple[str, ...]] = {}
    while heap and len(found) < len(targets):
        cost, path, node = heapq.heappop(heap)
        if node in done or (cost, path) != best[node]:
            continue
        done.add(node)
        if node in targets:
            found[node] = path
        for adj in graph.get(node, ()):
            nxt = adj.neighbor
            if nxt not in anchors or nxt in done:
                continue
            edge = link_cost.get(frozenset((node, nxt)), Fraction(1))
            cand = (cost + edge, path + (nxt,))
            if nxt not in best or cand < best[nxt]:
                best[nxt] = cand
                heapq.heappush(heap, (cand[0], cand[1], nxt))
    return found


def build_tree(
    db: TopologyDatabase,
    publisher: str,
    subscribers: Sequence[str],
    link_cost: LinkCost | None = None,
) -> DistributionTree:
    """Union of cost-shortest root-to-subscriber paths.

    Expensive links (say, transatlantic) get high configured costs, so the
    search steers shared structure toward them only once.  Subscribers whose
    anchors the search cannot reach are reported together.
    """
    costs: LinkCost = link_cost or {}
    root = anchor_of(db, publisher)
    sub_anchors = {sub: anchor_of(db, sub) for sub in sorted(subscribers)}
    targets = set(sub_anchors.values())
    paths = _cost_tree_paths(db, root, targets, costs)
    missing = [sub for sub, anc in sub_anchors.items() if anc not in paths]
    if missing:
        raise Unreachable(missing)
    edges: set[tuple[str, str]] = set()
    for anc in sorted(targets):
        hops = paths[anc]
        edges.update(zip(hops, hops[1:]))
    return DistributionTree(
        root=root,
        edges=tuple(sorted(edges)),
        subscribers=frozenset(sub_anchors),
        subscriber_anchors=dict(sub_anchors),
    )


def unicast_cost_crossings(
    db: TopologyDatabase,
    publisher: str,
    subscribers: Sequence[str],
    link_cost: LinkCost | None = None,
) -> Fraction:
    """Cost of serving every subscriber with its own shortest path; the
    baseline against which tree savings are measured."""
    costs: LinkCost = link_cost or {}
    root = anchor_of(db, publisher)
    total = Fraction(0)
    for sub in sorted(subscribers):
        anc = anchor_of(db, sub)
        paths = _cost_tree_paths(db, root, {anc}, costs)
        if anc not in paths:
            raise Unreachable([sub])
        hops = paths[anc]
        for u, v in zip(hops, hops[1:]):
            total += costs.get(frozenset((u, v)), Fraction(1))
    return total
