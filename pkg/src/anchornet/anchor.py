"""Anchor point: the overlay's forwarding element.

An anchor terminates substrate connectivity at its ports, re-addresses each
transit segment to the locator of the next overlay hop (one hop at a time,
never further), floods link-state advertisements, optionally hosts a
data-object catalog, and accounts traffic per science-domain tag so the
statistics follow the science groups wherever the substrate carries them.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Optional

from .addressing import L3Locator
from .gateway import GatewayCatalog
from .pathfinder import L5Path
from .session import Segment, SegmentKind
from .topology import AnchorLinkState, TopologyDatabase, EMPTY_DATABASE


class NotOnPath(ValueError):
    """Path installation attempted at an anchor the path does not traverse."""


LocatorFor = Callable[[str], L3Locator]


@dataclass
class Anchor:
    """One anchor point's mutable control and data plane state."""

    name: str
    ports: tuple[L3Locator, ...]
    peer_names: tuple[str, ...] = ()
    link_state: AnchorLinkState = None  # type: ignore[assignment]
    db: TopologyDatabase = EMPTY_DATABASE
    next_hop: dict[tuple[int, int], tuple[str, ...]] = field(default_factory=dict)
    prev_hop: dict[tuple[int, int], str] = field(default_factory=dict)
    counters: dict[str, list[int]] = field(default_factory=dict)
    dropped_unknown: int = 0
    catalog: Optional[GatewayCatalog] = None

    def __post_init__(self) -> None:
        if self.link_state is None:
            self.link_state = AnchorLinkState(self.name)

    @property
    def is_gateway(self) -> bool:
        return self.catalog is not None

    def primary_port(self) -> L3Locator:
        return min(self.ports)

    # -- control plane ------------------------------------------------------

    def install_path(self, session_id: int, path: L5Path) -> None:
        """Program forwarding for one (session, path): data toward the
        successor hop, acknowledgements toward the predecessor.  Idempotent."""
        if self.name not in path.hops:
            raise NotOnPath(f"{self.name!r} is not a hop of {path.hops}")
        idx = path.hops.index(self.name)
        key = (session_id, path.path_id)
        if idx + 1 < len(path.hops):
            self.next_hop[key] = (path.hops[idx + 1],)
        if idx > 0:
            self.prev_hop[key] = path.hops[idx - 1]

    def install_fanout(self, session_id: int, path_id: int, children: tuple[str, ...]) -> None:
        """Program a distribution-tree branch: one copy per child edge."""
        self.next_hop[(session_id, path_id)] = tuple(children)

    def remove_path(self, session_id: int, path_id: int) -> None:
        self.next_hop.pop((session_id, path_id), None)
        self.prev_hop.pop((session_id, path_id), None)

    # -- data plane ----------------------------------------------------------

    def forward(self, segment: Segment, locator_for: LocatorFor) -> list[Segment]:
        """Re-address a transit segment to its next hop(s).

        Data segments follow the forward table (fanning out at branch
        entries); acknowledgements retrace the reverse entry.  Unknown
        (session, path) pairs are counted and dropped, never raised: a
        teardown racing with a late segment is normal, not a fault.
        """
        key = (segment.session_id, segment.path_id)
        if segment.kind is SegmentKind.ACK:
            prev = self.prev_hop.get(key)
            if prev is None:
                self.dropped_unknown += 1
                return []
            return [replace(segment, l3_dest=locator_for(prev))]
        hops = self.next_hop.get(key)
        if not hops:
            self.dropped_unknown += 1
            return []
        self._account(segment, copies=len(hops))
        return [replace(segment, l3_dest=locator_for(hop)) for hop in hops]

    def account_relay(self, segment: Segment) -> None:
        """Count a locally re-emitted distribution-tree segment."""
        self._account(segment, copies=1)

    def _account(self, segment: Segment, copies: int) -> None:
        row = self.counters.setdefault(segment.tag, [0, 0])
        row[0] += copies
        row[1] += copies * len(segment.payload)

    def tag_report(self) -> dict[str, tuple[int, int]]:
        """Per-science-tag (segments, bytes) snapshot.  Pure read."""
        return {tag: (row[0], row[1]) for tag, row in sorted(self.counters.items())}
