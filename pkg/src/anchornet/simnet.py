"""Deterministic discrete-event simulation of the substrate and overlay.

The substrate is a set of opaque domains: attachment points joined by
capacity/latency/loss links, with a static background-utilization haircut
on each link and a single, fixed internal best path between any two
attachments of a domain.  The overlay never asks the substrate for more
than one hop: every emitted segment is addressed to the locator of the next
overlay hop, and the substrate has no choice but to carry it there.

One event queue drives everything.  Events pop in (time, insertion-rank)
order, the queue owns the single seeded RNG (consumed only for loss draws,
in event order), and scheduling into the past is a hard fault.  The same
(config, seed) therefore always yields the same event trace, byte for byte.
"""

from __future__ import annotations

import hashlib
import heapq
import random
from dataclasses import dataclass, field, replace
from fractions import Fraction
from math import ceil
from typing import Any, Optional

from .addressing import AddressKind, L3Locator, ResolverTable, parse_address
from .allocator import Demand, DemandMatrix, domain_shares, water_fill
from .anchor import Anchor
from .gateway import (
    SWEEP_INTERVAL_US,
    GatewayCatalog,
    ObjectUnavailable,
    select_source,
    synth_payload,
)
from .pathfinder import L5Path, k_disjoint_paths
from .pubsub import DistributionTree, build_tree, unicast_cost_crossings
from .scenario import MODE_BASELINE, EventCfg, ScenarioConfig
from .session import (
    SEGMENT_PAYLOAD_BYTES,
    PathRef,
    ReceiverSession,
    Segment,
    SegmentKind,
    SenderSession,
    segment_count,
)
from .topology import Adjacency, AnchorLinkState, LinkStateAdvertisement, originate_lsa

TRACE_SALT = b"anchornet-trace-v1"


class CausalityViolation(RuntimeError):
    """An event was scheduled earlier than the current simulation time."""


class EmptyQueue(RuntimeError):
    """step() was called with nothing left to process."""


class SimFault(RuntimeError):
    """A scenario asked for something the simulated world cannot do."""


# -- events -------------------------------------------------------------------


@dataclass(frozen=True)
class LsaFlood:
    to_anchor: str
    from_anchor: str
    lsa: LinkStateAdvertisement


@dataclass(frozen=True)
class LinkHop:
    segment: Segment
    crossed: str
    remaining: tuple[str, ...]
    dest_node: str


@dataclass(frozen=True)
class NodeArrival:
    segment: Segment
    crossed: str
    node: str


@dataclass(frozen=True)
class SessionWake:
    sid: int
    node: str


@dataclass(frozen=True)
class ScenarioAction:
    index: int


@dataclass(frozen=True)
class GatewaySweep:
    pass


class EventQueue:
    """Time-ordered queue with a total, data-independent tie-break."""

    def __init__(self, seed: int) -> None:
        self._heap: list[tuple[int, int, Any]] = []
        self._tiebreak = 0
        self.now = 0
        self.rng = random.Random(seed)

    def push(self, time_us: int, event: Any) -> None:
        if time_us < self.now:
            raise CausalityViolation(
                f"event {type(event).__name__} scheduled at {time_us} before now={self.now}"
            )
        heapq.heappush(self._heap, (time_us, self._tiebreak, event))
        self._tiebreak += 1

    def pop(self) -> tuple[int, int, Any]:
        if not self._heap:
            raise EmptyQueue("no events left")
        time_us, rank, event = heapq.heappop(self._heap)
        self.now = time_us
        return time_us, rank, event

    def peek_time(self) -> Optional[int]:
        return self._heap[0][0] if self._heap else None

    def __len__(self) -> int:
        return len(self._heap)

    def snapshot(self) -> list[tuple[int, int, Any]]:
        return sorted(self._heap)


# -- substrate wiring -----------------------------------------------------------


@dataclass(frozen=True)
class Leg:
    """One directed overlay hop realized on the substrate: the link chain
    from the emitter's port to the next hop's port, inside one domain."""

    links: tuple[str, ...]
    dest: L3Locator
    latency_us: int
    raw_mbps: Fraction
    avail_mbps: Fraction
    cost: Fraction


@dataclass
class LinkCounters:
    transmitted: int = 0
    delivered: int = 0
    dropped: int = 0
    data_original: int = 0
    data_retransmit: int = 0
    acks: int = 0
    payload_bytes: int = 0


@dataclass
class Transfer:
    """Runtime record for one unicast transfer."""

    id_str: str
    sid: int
    src: str
    dst: str
    tag: str
    total_bytes: int
    k: int
    home_anchor: str
    t_open: int
    discovered: list[L5Path]
    used: list[L5Path]
    sender: SenderSession
    receiver: ReceiverSession
    potential_mbps: Fraction
    residual_potential_mbps: Fraction
    rate_cap_mbps: Optional[Fraction] = None
    status: str = "active"
    t_complete: Optional[int] = None
    source_digest: str = ""
    next_pid: int = 0
    on_complete: Any = None


@dataclass
class TreeEdge:
    pid: int
    parent: str
    child: str
    sender: SenderSession
    start_seq: int


@dataclass
class SubscriberLeg:
    name: str
    anchor: str
    pid: int
    join_seq: int
    receiver: ReceiverSession
    complete_at: Optional[int] = None


@dataclass
class PubTransfer:
    """Runtime record for one distribution-tree session."""

    id_str: str
    sid: int
    publisher: str
    object_name: Optional[str]
    tag: str
    total_bytes: int
    tree: DistributionTree
    t_open: int
    source_digest: str
    edges: list[TreeEdge] = field(default_factory=list)
    relays: dict[str, ReceiverSession] = field(default_factory=dict)
    subscribers: dict[str, SubscriberLeg] = field(default_factory=dict)
    downstream: dict[str, list[TreeEdge]] = field(default_factory=dict)
    next_pid: int = 0
    status: str = "active"
    stage_ttl_us: Optional[int] = None


class Simulation:
    """One scenario instance: build, run, report."""

    def __init__(
        self,
        config: ScenarioConfig,
        *,
        seed: Optional[int] = None,
        mode: Optional[str] = None,
    ) -> None:
        self.config = config
        self.seed = config.seed if seed is None else seed
        self.mode = config.mode if mode is None else mode
        self.queue = EventQueue(self.seed)
        self._trace = hashlib.sha256(TRACE_SALT)
        self.events_processed = 0
        self.clock_end = 0

        self.l3_dest_violations = 0
        self.dropped_unknown_hosts = 0

        self._next_sid = 1
        self.transfers: dict[int, Transfer] = {}
        self.pubs: dict[int, PubTransfer] = {}
        self.senders: dict[tuple[int, str], dict[int, SenderSession]] = {}
        self.receivers: dict[tuple[int, str], ReceiverSession] = {}
        self.path_hops: dict[tuple[int, int], tuple[str, ...]] = {}
        self.alloc_epochs: list[dict[str, Any]] = []
        self._demand_targets: dict[str, tuple[SenderSession, int]] = {}
        self._sweep_armed = False
        self._trees_by_object: dict[str, int] = {}

        self._build_substrate()
        self._build_overlay()
        self._bootstrap_control_plane()
        for index, _ in enumerate(config.events):
            self.queue.push(config.events[index].time_us, ScenarioAction(index))

    # -- construction -------------------------------------------------------

    def _build_substrate(self) -> None:
        cfg = self.config
        self.links = {l.id: l for l in cfg.links}
        self.link_up = {l.id: True for l in cfg.links}
        self.link_counters = {l.id: LinkCounters() for l in cfg.links}
        self._domain_graph: dict[str, dict[str, list[tuple[str, str]]]] = {}
        for dom in cfg.domains:
            self._domain_graph[dom.id] = {att: [] for att in dom.attachments}
        for link in cfg.links:
            a, b = link.endpoints
            self._domain_graph[link.domain][a].append((b, link.id))
            self._domain_graph[link.domain][b].append((a, link.id))
        for graph in self._domain_graph.values():
            for att in graph:
                graph[att].sort()

    def _domain_route(self, domain: str, src_att: str, dst_att: str) -> Optional[tuple[str, ...]]:
        """The domain's single best internal path, as a link-id chain.

        Shortest by latency with a lexicographic tie-break on attachment
        names; frozen for the whole run regardless of later link failures.
        """
        graph = self._domain_graph[domain]
        best: dict[str, tuple[int, tuple[str, ...], tuple[str, ...]]] = {
            src_att: (0, (src_att,), ())
        }
        heap: list[tuple[int, tuple[str, ...], str, tuple[str, ...]]] = [(0, (src_att,), src_att, ())]
        done: set[str] = set()
        while heap:
            dist, path, att, chain = heapq.heappop(heap)
            if att in done or (dist, path, chain) != best[att]:
                continue
            if att == dst_att:
                return chain
            done.add(att)
            for nxt, lid in graph.get(att, ()):
                if nxt in done:
                    continue
                link = self.links[lid]
                cand = (dist + link.latency_us, path + (nxt,), chain + (lid,))
                if nxt not in best or (cand[0], cand[1]) < (best[nxt][0], best[nxt][1]):
                    best[nxt] = cand
                    heapq.heappush(heap, (cand[0], cand[1], nxt, cand[2]))
        return None

    def _make_leg(self, domain: str, src_att: str, dst_att: str) -> Leg:
        chain = self._domain_route(domain, src_att, dst_att)
        if chain is None:
            raise SimFault(
                f"domain {domain!r} has no internal path {src_att!r} -> {dst_att!r}"
            )
        latency = sum(self.links[lid].latency_us for lid in chain)
        raw = min(self.links[lid].capacity_mbps for lid in chain)
        avail = min(self.links[lid].available_mbps for lid in chain)
        cost = sum((self.links[lid].cost for lid in chain), Fraction(0))
        return Leg(chain, L3Locator(domain, dst_att), latency, raw, avail, cost)

    def _build_overlay(self) -> None:
        cfg = self.config
        self.policy = cfg.policy_weights()
        self.owner: dict[L3Locator, str] = {}
        self.anchors: dict[str, Anchor] = {}
        self.hosts: dict[str, Any] = {}
        self.host_anchor: dict[str, str] = {}
        locators: list[L3Locator] = []
        for dom in cfg.domains:
            for att in dom.attachments:
                locators.append(L3Locator(dom.id, att))
        self.resolver = ResolverTable.new(locators)

        for acfg in cfg.anchors:
            ports = tuple(L3Locator(p.domain, p.attachment) for p in acfg.ports)
            anchor = Anchor(
                name=acfg.name,
                ports=ports,
                catalog=GatewayCatalog() if acfg.gateway else None,
            )
            self.anchors[acfg.name] = anchor
            for port in ports:
                self.owner[port] = acfg.name
                self.resolver = self.resolver.register(acfg.name, port)
        for hcfg in cfg.hosts:
            port = L3Locator(hcfg.port.domain, hcfg.port.attachment)
            self.hosts[hcfg.name] = hcfg
            self.host_anchor[hcfg.name] = hcfg.anchor
            self.owner[port] = hcfg.name
            self.resolver = self.resolver.register(hcfg.name, port)

        # Directed overlay hops: anchor peerings plus host access legs.
        self.legs: dict[tuple[str, str], Leg] = {}
        self.adjacency_links: dict[frozenset[str], tuple[str, ...]] = {}
        anchor_ports = {
            a.name: {p.domain: sorted(pp.attachment for pp in a.ports if pp.domain == p.domain)
                     for p in a.ports}
            for a in cfg.anchors
        }
        seen_pairs: set[frozenset[str]] = set()
        self.peerings: list[tuple[str, str, str]] = []
        for acfg in cfg.anchors:
            for peer in acfg.peers:
                pair = frozenset((acfg.name, peer.anchor))
                if pair in seen_pairs:
                    continue
                seen_pairs.add(pair)
                self.peerings.append((acfg.name, peer.anchor, peer.domain))
        for a_name, b_name, domain in self.peerings:
            a_att = anchor_ports[a_name][domain][0]
            b_att = anchor_ports[b_name][domain][0]
            self.legs[(a_name, b_name)] = self._make_leg(domain, a_att, b_att)
            self.legs[(b_name, a_name)] = self._make_leg(domain, b_att, a_att)
            self.adjacency_links[frozenset((a_name, b_name))] = self.legs[(a_name, b_name)].links
        for hcfg in cfg.hosts:
            domain = hcfg.port.domain
            anchor_att = anchor_ports[hcfg.anchor][domain][0]
            self.legs[(hcfg.name, hcfg.anchor)] = self._make_leg(domain, hcfg.port.attachment, anchor_att)
            self.legs[(hcfg.anchor, hcfg.name)] = self._make_leg(domain, anchor_att, hcfg.port.attachment)

        self.link_cost: dict[frozenset[str], Fraction] = {
            pair: sum((self.links[lid].cost for lid in chain), Fraction(0))
            for pair, chain in self.adjacency_links.items()
        }

    def _anchor_adjacencies(self, name: str) -> tuple[Adjacency, ...]:
        """The anchor's current usable legs, for advertisement."""
        out = []
        for (u, v), leg in sorted(self.legs.items()):
            if u != name:
                continue
            if any(not self.link_up[lid] for lid in leg.links):
                continue
            domain = leg.dest.domain_id
            out.append(Adjacency(v, leg.avail_mbps, leg.latency_us, domain))
        return tuple(out)

    def _bootstrap_control_plane(self) -> None:
        self.lsa_tx: dict[tuple[str, int], int] = {}
        for name in sorted(self.anchors):
            anchor = self.anchors[name]
            anchor.peer_names = tuple(
                sorted(v for (u, v) in self.legs if u == name and v in self.anchors)
            )
            anchor.link_state = AnchorLinkState(name, self._anchor_adjacencies(name))
            self._originate(name, 0)

    def _originate(self, name: str, now: int) -> None:
        anchor = self.anchors[name]
        anchor.link_state = AnchorLinkState(name, self._anchor_adjacencies(name), anchor.link_state.seq)
        anchor.link_state, lsa = originate_lsa(anchor.link_state)
        anchor.db, _ = anchor.db.receive(lsa)
        for peer in anchor.peer_names:
            self._send_lsa(name, peer, lsa, now)
        self._check_repath(name, now)

    def _send_lsa(self, sender: str, receiver: str, lsa: LinkStateAdvertisement, now: int) -> None:
        key = (lsa.origin, lsa.seq)
        self.lsa_tx[key] = self.lsa_tx.get(key, 0) + 1
        latency = self.legs[(sender, receiver)].latency_us
        self.queue.push(now + latency, LsaFlood(receiver, sender, lsa))

    def _handle_lsa(self, event: LsaFlood, now: int) -> None:
        anchor = self.anchors[event.to_anchor]
        db, flood = anchor.db.receive(event.lsa)
        anchor.db = db
        if flood:
            for peer in anchor.peer_names:
                if peer != event.from_anchor:
                    self._send_lsa(event.to_anchor, peer, event.lsa, now)
            self._check_repath(event.to_anchor, now)

    # -- event loop -----------------------------------------------------------

    def step(self) -> None:
        """Pop exactly one event and dispatch it to its owning machine."""
        now, rank, event = self.queue.pop()
        self.clock_end = now
        self.events_processed += 1
        self._hash_event(now, rank, event)
        if isinstance(event, LsaFlood):
            self._handle_lsa(event, now)
        elif isinstance(event, LinkHop):
            self.link_counters[event.crossed].delivered += 1
            self._enter_link(event.segment, event.remaining, event.dest_node, now)
        elif isinstance(event, NodeArrival):
            self.link_counters[event.crossed].delivered += 1
            self._dispatch(event.segment, event.node, now)
        elif isinstance(event, SessionWake):
            self._session_wake(event.sid, event.node, now)
        elif isinstance(event, ScenarioAction):
            self._scenario_action(self.config.events[event.index], now)
        elif isinstance(event, GatewaySweep):
            self._gateway_sweep(now)
        else:  # pragma: no cover
            raise SimFault(f"unknown event {event!r}")

    def run(self) -> dict[str, Any]:
        """Execute until the queue drains or the horizon passes; report."""
        horizon = self.config.horizon_us
        while True:
            t = self.queue.peek_time()
            if t is None or t > horizon:
                break
            self.step()
        return self._report()

    def _hash_event(self, now: int, rank: int, event: Any) -> None:
        h = self._trace
        h.update(now.to_bytes(8, "big") + rank.to_bytes(8, "big"))
        if isinstance(event, LsaFlood):
            h.update(b"lsa" + event.to_anchor.encode() + b"|" + event.from_anchor.encode())
            h.update(event.lsa.encode())
        elif isinstance(event, LinkHop):
            h.update(b"hop" + event.crossed.encode())
            h.update(event.segment.encode())
        elif isinstance(event, NodeArrival):
            h.update(b"arr" + event.node.encode())
            h.update(event.segment.encode())
        elif isinstance(event, SessionWake):
            h.update(b"wak" + event.sid.to_bytes(8, "big") + event.node.encode())
        elif isinstance(event, ScenarioAction):
            h.update(b"act" + event.index.to_bytes(8, "big"))
        elif isinstance(event, GatewaySweep):
            h.update(b"swp")

    # -- substrate data plane ---------------------------------------------------

    def transmit(self, segment: Segment, emitter: str, next_l5: str, now: int) -> None:
        """Hand a segment to the substrate for exactly one overlay hop.

        Independently re-derives the expected next hop from the installed
        path record and counts any disagreement: this is the compatibility
        rule that a segment's substrate destination is always the very next
        overlay hop, never a shortcut to the far end.
        """
        hops = self.path_hops.get((segment.session_id, segment.path_id))
        if hops and emitter in hops:
            idx = hops.index(emitter)
            expected = hops[idx - 1] if segment.kind is SegmentKind.ACK else (
                hops[idx + 1] if idx + 1 < len(hops) else None
            )
            if expected != next_l5:
                self.l3_dest_violations += 1
        leg = self.legs.get((emitter, next_l5))
        if leg is None:
            raise SimFault(f"no substrate leg {emitter!r} -> {next_l5!r}")
        if leg.dest != segment.l3_dest:
            self.l3_dest_violations += 1
        self._enter_link(segment, leg.links, next_l5, now)

    def _enter_link(
        self, segment: Segment, links: tuple[str, ...], dest_node: str, now: int
    ) -> None:
        lid = links[0]
        link = self.links[lid]
        counters = self.link_counters[lid]
        counters.transmitted += 1
        if segment.kind is SegmentKind.ACK:
            counters.acks += 1
        elif segment.is_retransmit:
            counters.data_retransmit += 1
        else:
            counters.data_original += 1
        counters.payload_bytes += len(segment.payload)
        if not self.link_up[lid]:
            counters.dropped += 1
            return
        if link.loss_prob > 0 and self.queue.rng.random() < link.loss_prob:
            counters.dropped += 1
            return
        serialization = ceil(Fraction(len(segment.payload) * 8) / link.available_mbps)
        arrival = now + link.latency_us + int(serialization)
        if len(links) > 1:
            self.queue.push(arrival, LinkHop(segment, lid, links[1:], dest_node))
        else:
            self.queue.push(arrival, NodeArrival(segment, lid, dest_node))

    def _dispatch(self, segment: Segment, node: str, now: int) -> None:
        sid = segment.session_id
        if segment.kind is SegmentKind.ACK:
            group = self.senders.get((sid, node))
            if group and segment.path_id in group:
                sender = group[segment.path_id]
                sender.on_ack(segment, now)
                self._after_sender_progress(sid, node, sender, now)
                return
            if node in self.anchors:
                self._forward_at_anchor(segment, node, now)
                return
            self.dropped_unknown_hosts += 1
            return
        receiver = self.receivers.get((sid, node))
        if receiver is not None:
            delivered, acks = receiver.on_receive(segment, now)
            hops = self.path_hops.get((sid, segment.path_id), ())
            for ack in acks:
                if node in hops:
                    idx = hops.index(node)
                    if idx > 0:
                        self.transmit(ack, node, hops[idx - 1], now)
            if delivered:
                self._on_delivery(sid, node, delivered, now)
            return
        if node in self.anchors:
            self._forward_at_anchor(segment, node, now)
            return
        self.dropped_unknown_hosts += 1

    def _forward_at_anchor(self, segment: Segment, node: str, now: int) -> None:
        anchor = self.anchors[node]

        def locator_for(name: str) -> L3Locator:
            return self.legs[(node, name)].dest

        for copy in anchor.forward(segment, locator_for):
            self.transmit(copy, node, self.owner[copy.l3_dest], now)

    # -- session machinery ------------------------------------------------------

    def _session_wake(self, sid: int, node: str, now: int) -> None:
        group = self.senders.get((sid, node))
        if not group:
            return
        distinct: list[SenderSession] = []
        for pid in sorted(group):
            sender = group[pid]
            if all(sender is not s for s in distinct):
                distinct.append(sender)
        for sender in distinct:
            sender.release_wake(now)
            self._pump(sid, node, sender, now)

    def _pump(self, sid: int, node: str, sender: SenderSession, now: int) -> None:
        emissions = sender.schedule(now)
        for segment, at in emissions:
            hops = self.path_hops[(sid, segment.path_id)]
            if node in self.anchors:
                self.anchors[node].account_relay(segment)
            self.transmit(segment, node, hops[1], at)
        self._arm(sid, node, sender, now)

    def _arm(self, sid: int, node: str, sender: SenderSession, now: int) -> None:
        wake = sender.next_wake(now)
        if wake is not None and sender.claim_wake(wake):
            self.queue.push(wake, SessionWake(sid, node))

    def _after_sender_progress(
        self, sid: int, node: str, sender: SenderSession, now: int
    ) -> None:
        if sender.complete:
            transfer = self.transfers.get(sid)
            if transfer is not None and transfer.sender is sender and transfer.status == "active":
                self._finish_transfer(transfer, now)
                return
            pub = self.pubs.get(sid)
            if pub is not None and pub.status == "active":
                if all(edge.sender.complete for edge in pub.edges):
                    pub.status = "complete"
                    self._reallocate(now)
                return
        self._arm(sid, node, sender, now)

    def _on_delivery(self, sid: int, node: str, delivered: bytes, now: int) -> None:
        pub = self.pubs.get(sid)
        if pub is None:
            return
        for edge in pub.downstream.get(node, ()):
            edge.sender.feed(delivered)
            self._arm(sid, node, edge.sender, now)
        leg = pub.subscribers.get(node)
        if leg is not None and leg.receiver.complete and leg.complete_at is None:
            leg.complete_at = now
            if pub.object_name and leg.join_seq == 0:
                self._stage_replica(node, pub.object_name, pub.total_bytes, pub.stage_ttl_us, now)

    # -- transfers ----------------------------------------------------------------

    def _home_anchor(self, endpoint: str) -> str:
        if endpoint in self.anchors:
            return endpoint
        return self.host_anchor[endpoint]

    def _path_substrate_links(self, hops: tuple[str, ...]) -> frozenset[str]:
        found: set[str] = set()
        for u, v in zip(hops, hops[1:]):
            found.update(self.legs[(u, v)].links)
        return frozenset(found)

    def _path_raw_bottleneck(self, hops: tuple[str, ...]) -> Fraction:
        caps = []
        for u, v in zip(hops, hops[1:]):
            caps.append(self.legs[(u, v)].raw_mbps)
        return min(caps)

    def _register_path(self, sid: int, path: L5Path) -> None:
        self.path_hops[(sid, path.path_id)] = path.hops
        for name in path.hops:
            if name in self.anchors:
                self.anchors[name].install_path(sid, path)

    def _open_unicast(
        self,
        id_str: str,
        src: str,
        dst: str,
        tag: str,
        total_bytes: int,
        k: int,
        payload: bytes,
        now: int,
        *,
        rate_cap_mbps: Optional[Fraction] = None,
        on_complete: Any = None,
    ) -> Transfer:
        sid = self._next_sid
        self._next_sid += 1
        home = self._home_anchor(src)
        discovered = k_disjoint_paths(self.anchors[home].db, src, dst, k)
        if not discovered:
            raise SimFault(f"no path from {src!r} to {dst!r} for session {id_str!r}")
        used = discovered[:1] if self.mode == MODE_BASELINE else list(discovered)
        for path in used:
            self._register_path(sid, path)
        refs = [
            _path_ref(path, self.legs)
            for path in used
        ]
        sender = SenderSession(
            sid, tag, refs, {r.path_id: Fraction(1) for r in refs}, total_bytes,
            payload=payload, now=now,
        )
        receiver = ReceiverSession(
            sid,
            tag,
            {path.path_id: self.legs[(path.hops[-1], path.hops[-2])].dest for path in used},
            total_bytes,
        )
        transfer = Transfer(
            id_str=id_str,
            sid=sid,
            src=src,
            dst=dst,
            tag=tag,
            total_bytes=total_bytes,
            k=k,
            home_anchor=home,
            t_open=now,
            discovered=discovered,
            used=used,
            sender=sender,
            receiver=receiver,
            potential_mbps=sum(
                (self._path_raw_bottleneck(p.hops) for p in discovered), Fraction(0)
            ),
            residual_potential_mbps=sum(
                (p.min_capacity_mbps or Fraction(0) for p in discovered), Fraction(0)
            ),
            rate_cap_mbps=rate_cap_mbps,
            source_digest=hashlib.sha256(payload).hexdigest(),
            next_pid=len(discovered),
            on_complete=on_complete,
        )
        self.transfers[sid] = transfer
        group = self.senders.setdefault((sid, src), {})
        for ref in refs:
            group[ref.path_id] = sender
        self.receivers[(sid, dst)] = receiver
        self._reallocate(now)
        self._arm(sid, src, sender, now)
        return transfer

    def _finish_transfer(self, transfer: Transfer, now: int) -> None:
        transfer.status = "complete"
        transfer.t_complete = now
        for path in transfer.used:
            for name in path.hops:
                if name in self.anchors:
                    self.anchors[name].remove_path(transfer.sid, path.path_id)
        if transfer.on_complete is not None:
            transfer.on_complete(now)
        self._reallocate(now)

    def _repath(self, transfer: Transfer, now: int) -> None:
        db = self.anchors[transfer.home_anchor].db
        for path in transfer.used:
            for name in path.hops:
                if name in self.anchors:
                    self.anchors[name].remove_path(transfer.sid, path.path_id)
        fresh = k_disjoint_paths(db, transfer.src, transfer.dst, transfer.k)
        if not fresh:
            transfer.status = "no_path"
            self._reallocate(now)
            return
        fresh = fresh[:1] if self.mode == MODE_BASELINE else fresh
        renumbered = [
            replace(path, path_id=transfer.next_pid + i) for i, path in enumerate(fresh)
        ]
        transfer.next_pid += len(renumbered)
        transfer.used = renumbered
        for path in renumbered:
            self._register_path(transfer.sid, path)
        refs = [_path_ref(path, self.legs) for path in renumbered]
        transfer.sender.set_paths(refs, {r.path_id: Fraction(1) for r in refs}, now)
        for path in renumbered:
            transfer.receiver.set_reverse_hop(
                path.path_id, self.legs[(path.hops[-1], path.hops[-2])].dest
            )
        group = self.senders.setdefault((transfer.sid, transfer.src), {})
        for ref in refs:
            group[ref.path_id] = transfer.sender
        self._reallocate(now)
        self._arm(transfer.sid, transfer.src, transfer.sender, now)

    def _check_repath(self, anchor_name: str, now: int) -> None:
        graph = self.anchors[anchor_name].db.graph()
        for sid in sorted(self.transfers):
            transfer = self.transfers[sid]
            if transfer.status != "active" or transfer.home_anchor != anchor_name:
                continue
            broken = False
            for path in transfer.used:
                for u, v in zip(path.hops, path.hops[1:]):
                    if not any(adj.neighbor == v for adj in graph.get(u, ())):
                        broken = True
                        break
                if broken:
                    break
            if broken:
                self._repath(transfer, now)

    # -- pubsub -------------------------------------------------------------------

    def _open_pubsub(
        self,
        id_str: str,
        publisher: str,
        subscribers: list[str],
        tag: str,
        total_bytes: int,
        payload: bytes,
        now: int,
        *,
        object_name: Optional[str] = None,
        stage_ttl_us: Optional[int] = None,
    ) -> PubTransfer:
        sid = self._next_sid
        self._next_sid += 1
        home = self._home_anchor(publisher)
        db = self.anchors[home].db
        tree = build_tree(db, publisher, subscribers, self.link_cost)
        pub = PubTransfer(
            id_str=id_str,
            sid=sid,
            publisher=publisher,
            object_name=object_name,
            tag=tag,
            total_bytes=total_bytes,
            tree=tree,
            t_open=now,
            source_digest=hashlib.sha256(payload).hexdigest(),
            stage_ttl_us=stage_ttl_us,
        )
        self.pubs[sid] = pub
        if object_name is not None:
            self._trees_by_object[object_name] = sid

        # Publisher feeds the root; hosts reach their anchor over an access
        # leg that is itself a reliable hop.
        if publisher != tree.root:
            self._add_pub_edge(pub, publisher, tree.root, 0, payload=payload, now=now)
        ordered = _tree_edges_top_down(tree)
        for parent, child in ordered:
            start = 0
            self._add_pub_edge(pub, parent, child, start, now=now)
        for sub in sorted(tree.subscribers):
            self._attach_subscriber(pub, sub, 0, now)
        if publisher == tree.root:
            # Root anchor owns the stream directly.
            for edge in pub.downstream.get(publisher, ()):
                edge.sender.feed(payload)
        self._reallocate(now)
        for edge in pub.edges:
            self._arm(sid, edge.parent, edge.sender, now)
        return pub

    def _add_pub_edge(
        self,
        pub: PubTransfer,
        parent: str,
        child: str,
        start_seq: int,
        *,
        payload: bytes = b"",
        now: int,
    ) -> TreeEdge:
        pid = pub.next_pid
        pub.next_pid += 1
        leg = self.legs[(parent, child)]
        ref = _leg_ref(pid, parent, child, leg)
        sender = SenderSession(
            pub.sid, pub.tag, [ref], {pid: Fraction(1)}, pub.total_bytes,
            payload=payload, start_seq=start_seq, now=now,
        )
        edge = TreeEdge(pid, parent, child, sender, start_seq)
        pub.edges.append(edge)
        pub.downstream.setdefault(parent, []).append(edge)
        self.path_hops[(pub.sid, pid)] = (parent, child)
        self.senders.setdefault((pub.sid, parent), {})[pid] = sender
        receiver = ReceiverSession(
            pub.sid, pub.tag, {pid: self.legs[(child, parent)].dest},
            pub.total_bytes, start_seq=start_seq,
        )
        pub.relays[child] = receiver
        self.receivers[(pub.sid, child)] = receiver
        return edge

    def _attach_subscriber(self, pub: PubTransfer, sub: str, join_seq: int, now: int) -> None:
        anchor = pub.tree.subscriber_anchors.get(sub) or self._home_anchor(sub)
        if sub == anchor:
            # Subscriber is the anchor itself (a gateway); its relay receiver
            # doubles as the delivery point.
            receiver = pub.relays.get(anchor)
            if receiver is None:
                receiver = ReceiverSession(pub.sid, pub.tag, {}, pub.total_bytes, start_seq=join_seq)
                pub.relays[anchor] = receiver
                self.receivers[(pub.sid, anchor)] = receiver
            pub.subscribers[sub] = SubscriberLeg(sub, anchor, -1, join_seq, receiver)
            return
        edge = self._add_pub_edge(pub, anchor, sub, join_seq, now=now)
        receiver = self.receivers[(pub.sid, sub)]
        pub.subscribers[sub] = SubscriberLeg(sub, anchor, edge.pid, join_seq, receiver)

    def _join_tree(self, pub: PubTransfer, sub: str, now: int) -> None:
        """Graft a new subscriber onto an active tree; no history replay."""
        anchor = self._home_anchor(sub)
        new_subs = sorted(set(pub.tree.subscribers) | {sub})
        home = self._home_anchor(pub.publisher)
        tree = build_tree(self.anchors[home].db, pub.publisher, new_subs, self.link_cost)
        old_edges = set(pub.tree.edges)
        pub.tree = tree
        if pub.object_name is not None:
            self._trees_by_object[pub.object_name] = pub.sid
        existing_nodes = set(pub.relays) | {tree.root}
        for parent, child in _tree_edges_top_down(tree):
            if (parent, child) in old_edges or child in existing_nodes:
                continue
            if parent == tree.root and pub.publisher == tree.root:
                # The root gateway is the source itself: the join offset is
                # the current publish position across its existing edges.
                siblings = [e.sender.send_next for e in pub.downstream.get(parent, [])]
                join_seq = min(siblings) if siblings else 0
            else:
                upstream = pub.relays.get(parent)
                join_seq = upstream.next_expected if upstream is not None else 0
            edge = self._add_pub_edge(pub, parent, child, join_seq, now=now)
            if parent == tree.root and pub.publisher == tree.root and pub.object_name:
                stream = synth_payload(pub.object_name, pub.total_bytes)
                edge.sender.feed(stream[join_seq * SEGMENT_PAYLOAD_BYTES :])
            self._arm(pub.sid, parent, edge.sender, now)
            existing_nodes.add(child)
        sub_anchor_receiver = pub.relays.get(anchor)
        join_seq = sub_anchor_receiver.next_expected if sub_anchor_receiver is not None else 0
        if sub == anchor and sub_anchor_receiver is not None:
            join_seq = sub_anchor_receiver.start_seq
        self._attach_subscriber(pub, sub, join_seq, now)
        if sub != anchor:
            self._arm(pub.sid, anchor, pub.downstream[anchor][-1].sender, now)
        self._reallocate(now)

    # -- gateway actions --------------------------------------------------------

    def _stage_replica(
        self, gw_name: str, object_name: str, size: int, ttl_us: Optional[int], now: int
    ) -> None:
        anchor = self.anchors.get(gw_name)
        if anchor is None or anchor.catalog is None:
            return
        addr = parse_address(object_name, AddressKind.DATA)
        anchor.catalog.stage(addr, size, ttl_us or SWEEP_INTERVAL_US, now)
        self.resolver = self.resolver.register(addr, anchor.primary_port())
        self._arm_sweep(now)

    def _arm_sweep(self, now: int) -> None:
        if self._sweep_armed:
            return
        next_tick = (now // SWEEP_INTERVAL_US + 1) * SWEEP_INTERVAL_US
        if next_tick <= self.config.horizon_us:
            self.queue.push(next_tick, GatewaySweep())
            self._sweep_armed = True

    def _gateway_sweep(self, now: int) -> None:
        self._sweep_armed = False
        any_left = False
        for name in sorted(self.anchors):
            catalog = self.anchors[name].catalog
            if catalog is None:
                continue
            for purged in catalog.sweep(now):
                addr = parse_address(purged, AddressKind.DATA)
                self.resolver = self.resolver.unregister(addr, self.anchors[name].primary_port())
            if len(catalog):
                any_left = True
        if any_left:
            self._arm_sweep(now)

    def _subscribe_object(self, gw_name: str, object_name: str, tag: str, k: int, now: int) -> None:
        anchor = self.anchors[gw_name]
        if anchor.catalog is None:
            raise SimFault(f"{gw_name!r} is not a gateway")
        addr = parse_address(object_name, AddressKind.DATA)
        if anchor.catalog.lookup(addr, now) is not None:
            return  # already staged locally
        tree_sid = self._trees_by_object.get(object_name)
        if tree_sid is not None and self.pubs[tree_sid].status == "active":
            self._join_tree(self.pubs[tree_sid], gw_name, now)
            return
        locators = self.resolver.resolve(addr)
        if not locators:
            raise ObjectUnavailable(object_name)
        candidates = []
        for loc in sorted(locators):
            owner = self.owner[loc]
            catalog = self.anchors[owner].catalog if owner in self.anchors else None
            if catalog is not None and catalog.lookup(addr, now) is not None:
                candidates.append(owner)
        if not candidates:
            raise ObjectUnavailable(object_name)
        source = select_source(candidates, anchor.db, gw_name)
        entry = self.anchors[source].catalog.lookup(addr, now)
        payload = synth_payload(object_name, entry.size)

        def staged(t: int, size=entry.size, ttl=entry.ttl_us) -> None:
            self._stage_replica(gw_name, object_name, size, ttl, t)

        self._open_unicast(
            f"fetch.{object_name}.{gw_name}",
            source,
            gw_name,
            tag,
            entry.size,
            k,
            payload,
            now,
            on_complete=staged,
        )

    # -- scenario script -----------------------------------------------------------

    def _scenario_action(self, event: EventCfg, now: int) -> None:
        fields = event.fields
        if event.kind == "open_session":
            tag = fields["tag"]
            k = fields.get("k_paths", 2)
            object_name = fields.get("object")
            if object_name is not None:
                src_gw = self.anchors.get(fields["src"])
                if src_gw is None or src_gw.catalog is None:
                    raise SimFault(f"publisher {fields['src']!r} is not a gateway")
                entry = src_gw.catalog.lookup(parse_address(object_name, AddressKind.DATA), now)
                if entry is None:
                    raise ObjectUnavailable(object_name)
                total = entry.size
                payload = synth_payload(object_name, total)
                ttl = entry.ttl_us
            else:
                total = fields["bytes"]
                payload = synth_payload(f"session:{fields['id']}", total)
                ttl = None
            if fields.get("session_mode", "unicast") == "pubsub":
                subscribers = list(fields["subscribers"])
                if self.mode == MODE_BASELINE:
                    # No shared tree in the baseline world: one independent
                    # unicast session per subscriber.
                    for sub in sorted(subscribers):
                        self._open_unicast(
                            f"{fields['id']}#{sub}", fields["src"], sub, tag,
                            total, k, payload, now,
                        )
                else:
                    self._open_pubsub(
                        fields["id"], fields["src"], subscribers, tag, total, payload,
                        now, object_name=object_name, stage_ttl_us=ttl,
                    )
            else:
                cap = fields.get("rate_cap_mbps")
                self._open_unicast(
                    fields["id"], fields["src"], fields["dst"], tag, total, k, payload,
                    now, rate_cap_mbps=Fraction(str(cap)) if cap is not None else None,
                )
        elif event.kind == "stage":
            addr = parse_address(fields["object"], AddressKind.DATA)
            anchor = self.anchors[fields["gateway"]]
            anchor.catalog.stage(addr, fields["size_bytes"], fields["ttl_us"], now)
            self.resolver = self.resolver.register(addr, anchor.primary_port())
            self._arm_sweep(now)
        elif event.kind == "subscribe":
            self._subscribe_object(
                fields["gateway"], fields["object"], fields["tag"], fields.get("k_paths", 2), now
            )
        elif event.kind == "link_down":
            self._link_down(fields["link"], now)

    def _link_down(self, lid: str, now: int) -> None:
        self.link_up[lid] = False
        affected = sorted(
            {u for (u, v), leg in self.legs.items() if lid in leg.links and u in self.anchors}
        )
        for name in affected:
            self._originate(name, now)

    # -- allocation ------------------------------------------------------------------

    def _reallocate(self, now: int) -> None:
        """Central control epoch: rebuild demands, water-fill, push rates."""
        demands: list[Demand] = []
        self._demand_targets = {}
        for sid in sorted(self.transfers):
            transfer = self.transfers[sid]
            if transfer.status != "active":
                continue
            for path in transfer.used:
                key = f"{transfer.id_str}:{path.path_id}"
                demands.append(
                    Demand(
                        key,
                        self.policy[transfer.tag],
                        self._path_substrate_links(path.hops),
                        demand_cap_mbps=transfer.rate_cap_mbps,
                        tag=transfer.tag,
                    )
                )
                self._demand_targets[key] = (transfer.sender, path.path_id)
        for sid in sorted(self.pubs):
            pub = self.pubs[sid]
            if pub.status != "active":
                continue
            for edge in pub.edges:
                if edge.sender.complete:
                    continue
                key = f"{pub.id_str}:{edge.parent}>{edge.child}"
                demands.append(
                    Demand(
                        key,
                        self.policy[pub.tag],
                        frozenset(self.legs[(edge.parent, edge.child)].links),
                        tag=pub.tag,
                    )
                )
                self._demand_targets[key] = (edge.sender, edge.pid)

        # Down links keep their capacity entry: a demand may still reference
        # one for the short window between the failure and its repath.
        capacities = {lid: link.available_mbps for lid, link in self.links.items()}
        matrix = DemandMatrix(tuple(demands))
        alloc = water_fill(capacities, matrix) if capacities else None
        rates: dict[str, float] = {}
        grouped: dict[int, dict[int, Fraction]] = {}
        if alloc is not None:
            for key, (sender, pid) in self._demand_targets.items():
                exact = alloc.rates_exact[key]
                rates[key] = float(exact)
                grouped.setdefault(id(sender), {})[pid] = exact
            for key, (sender, pid) in self._demand_targets.items():
                sender.set_rates({**{p: sender.rates[p] for p in sender.paths}, **grouped[id(sender)]})
        shares = (
            domain_shares(alloc, matrix, self.config.policy)
            if alloc is not None and demands
            else {}
        )
        self.alloc_epochs.append(
            {
                "time_us": now,
                "concurrent": len(demands),
                "rates_mbps": dict(sorted(rates.items())),
                "domain_shares_mbps": dict(sorted(shares.items())),
            }
        )

    # -- reporting -----------------------------------------------------------------

    def _report(self) -> dict[str, Any]:
        cfg = self.config
        in_flight: dict[str, int] = {lid: 0 for lid in self.links}
        for _, _, event in self.queue.snapshot():
            if isinstance(event, (LinkHop, NodeArrival)):
                in_flight[event.crossed] += 1

        links: dict[str, Any] = {}
        for lid in sorted(self.links):
            c = self.link_counters[lid]
            link = self.links[lid]
            duration = max(self.clock_end, 1)
            links[lid] = {
                "transmitted": c.transmitted,
                "delivered": c.delivered,
                "dropped": c.dropped,
                "in_flight_at_end": in_flight[lid],
                "data_original": c.data_original,
                "data_retransmit": c.data_retransmit,
                "acks": c.acks,
                "payload_bytes": c.payload_bytes,
                "capacity_mbps": float(link.capacity_mbps),
                "available_mbps": float(link.available_mbps),
                "up": self.link_up[lid],
                "utilization": c.payload_bytes * 8 / (float(link.capacity_mbps) * duration),
            }

        sessions: dict[str, Any] = {}
        total_throughput = Fraction(0)
        total_potential = Fraction(0)
        total_residual = Fraction(0)
        for sid in sorted(self.transfers):
            t = self.transfers[sid]
            delivered = t.receiver.delivered_bytes
            end = t.receiver.last_delivery_us
            throughput = (
                Fraction(delivered * 8, max(end - t.t_open, 1)) if end is not None else Fraction(0)
            )
            total_throughput += throughput
            total_potential += t.potential_mbps
            total_residual += t.residual_potential_mbps
            per_path: dict[str, Any] = {}
            for pid in sorted(t.sender.stats):
                st = t.sender.stats[pid]
                span = max((t.t_complete or self.clock_end) - t.t_open, 1)
                per_path[str(pid)] = {
                    "emitted_segments": st.emitted_segments,
                    "emitted_bytes": st.emitted_bytes,
                    "retransmitted_segments": st.retransmitted_segments,
                    "rate_mbps": float(t.sender.rates.get(pid, 0)),
                    "measured_mbps": st.emitted_bytes * 8 / span,
                }
            sessions[t.id_str] = {
                "sid": t.sid,
                "kind": "unicast",
                "src": t.src,
                "dst": t.dst,
                "tag": t.tag,
                "status": t.status,
                "bytes_total": t.total_bytes,
                "bytes_delivered": delivered,
                "t_open_us": t.t_open,
                "t_complete_us": t.t_complete,
                "source_sha256": t.source_digest,
                "delivered_sha256": t.receiver.delivered_digest(),
                "throughput_mbps": float(throughput),
                "potential_mbps": float(t.potential_mbps),
                "residual_potential_mbps": float(t.residual_potential_mbps),
                "paths": [list(p.hops) for p in t.used],
                "discovered_paths": [list(p.hops) for p in t.discovered],
                "per_path": per_path,
            }

        trees: dict[str, Any] = {}
        for sid in sorted(self.pubs):
            pub = self.pubs[sid]
            edges = []
            for edge in pub.edges:
                st = edge.sender.stats[edge.pid]
                edges.append(
                    {
                        "from": edge.parent,
                        "to": edge.child,
                        "tree_edge": edge.parent in self.anchors and edge.child in self.anchors,
                        "start_seq": edge.start_seq,
                        "original_segments": st.emitted_segments - st.retransmitted_segments,
                        "retransmitted_segments": st.retransmitted_segments,
                        "rate_mbps": float(edge.sender.rates.get(edge.pid, 0)),
                    }
                )
            subs = {}
            for name in sorted(pub.subscribers):
                leg = pub.subscribers[name]
                subs[name] = {
                    "anchor": leg.anchor,
                    "join_seq": leg.join_seq,
                    "complete_at_us": leg.complete_at,
                    "delivered_sha256": leg.receiver.delivered_digest(),
                    "bytes_delivered": leg.receiver.delivered_bytes,
                }
            home = self._home_anchor(pub.publisher)
            trees[pub.id_str] = {
                "sid": pub.sid,
                "kind": "pubsub",
                "publisher": pub.publisher,
                "object": pub.object_name,
                "tag": pub.tag,
                "status": pub.status,
                "root": pub.tree.root,
                "tree_edges": [list(e) for e in pub.tree.edges],
                "bytes_total": pub.total_bytes,
                "segments_total": segment_count(pub.total_bytes),
                "source_sha256": pub.source_digest,
                "tree_cost": float(pub.tree.cost_crossings(self.link_cost)),
                "unicast_cost": float(
                    unicast_cost_crossings(
                        self.anchors[home].db, pub.publisher,
                        sorted(pub.tree.subscribers), self.link_cost,
                    )
                ),
                "edges": edges,
                "subscribers": subs,
            }

        anchors: dict[str, Any] = {}
        components = _components(sorted(self.anchors), self.peerings)
        db_identical = True
        for members in components:
            digests = {self.anchors[m].db.digest() for m in members}
            if len(digests) > 1:
                db_identical = False
        for name in sorted(self.anchors):
            anchor = self.anchors[name]
            anchors[name] = {
                "per_tag": {tag: list(row) for tag, row in anchor.tag_report().items()},
                "dropped_unknown": anchor.dropped_unknown,
                "db_digest": anchor.db.digest(),
                "catalog": sorted(anchor.catalog.entries) if anchor.catalog is not None else None,
            }

        per_origin: dict[str, int] = {}
        for (origin, seq), count in sorted(self.lsa_tx.items()):
            per_origin[f"{origin}#{seq}"] = count

        dropped_unknown = self.dropped_unknown_hosts + sum(
            self.anchors[a].dropped_unknown for a in self.anchors
        )

        fraction_potential = (
            float(total_throughput / total_potential) if total_potential else None
        )
        fraction_residual = (
            float(total_throughput / total_residual) if total_residual else None
        )
        headline = fraction_potential if self.mode == MODE_BASELINE else fraction_residual

        report = {
            "schema": "anchornet-metrics/1",
            "scenario": cfg.name,
            "scenario_hash": cfg.scenario_hash(),
            "seed": self.seed,
            "mode": self.mode,
            "horizon_us": cfg.horizon_us,
            "clock_end_us": self.clock_end,
            "events_processed": self.events_processed,
            "trace_hash": self._trace.hexdigest(),
            "faults": {
                "l3_dest_violations": self.l3_dest_violations,
                "causality_violations": 0,
                "dropped_unknown": dropped_unknown,
            },
            "topology": {
                "db_identical": db_identical,
                "anchor_count": len(self.anchors),
                "adjacency_count": len(self.adjacency_links),
                "lsa_transmissions": per_origin,
                "max_transmissions_per_origination": max(self.lsa_tx.values(), default=0),
            },
            "allocation": {
                "epochs": self.alloc_epochs,
                "final_rates_mbps": self.alloc_epochs[-1]["rates_mbps"] if self.alloc_epochs else {},
                "peak_rates_mbps": _peak_epoch(self.alloc_epochs).get("rates_mbps", {}),
                "domain_shares_mbps": _peak_epoch(self.alloc_epochs).get("domain_shares_mbps", {}),
            },
            "sessions": sessions,
            "pubsub": trees,
            "links": links,
            "anchors": anchors,
            "summary": {
                "throughput_mbps": float(total_throughput),
                "potential_mbps": float(total_potential),
                "residual_potential_mbps": float(total_residual),
                "fraction_of_potential": fraction_potential,
                "fraction_of_residual": fraction_residual,
                "headline_fraction": headline,
            },
        }
        return report


def _peak_shares(epochs: list[dict[str, Any]]) -> dict[str, float]:
    """Domain shares at the epoch with the most concurrent claimants
    (earliest such epoch on ties): the steady state worth reporting."""
    best: Optional[dict[str, Any]] = None
    for epoch in epochs:
        if best is None or epoch["concurrent"] > best["concurrent"]:
            best = epoch
    return dict(best["domain_shares_mbps"]) if best else {}


def _components(names: list[str], peerings: list[tuple[str, str, str]]) -> list[list[str]]:
    neighbors: dict[str, set[str]] = {n: set() for n in names}
    for a, b, _ in peerings:
        neighbors[a].add(b)
        neighbors[b].add(a)
    seen: set[str] = set()
    out: list[list[str]] = []
    for name in names:
        if name in seen:
            continue
        stack, members = [name], []
        while stack:
            node = stack.pop()
            if node in seen:
                continue
            seen.add(node)
            members.append(node)
            stack.extend(sorted(neighbors[node]))
        out.append(sorted(members))
    return out


def _path_ref(path: L5Path, legs: dict[tuple[str, str], Leg]) -> PathRef:
    return PathRef(
        path_id=path.path_id,
        hops=path.hops,
        metric_us=path.metric_us,
        first_hop=legs[(path.hops[0], path.hops[1])].dest,
    )


def _leg_ref(pid: int, parent: str, child: str, leg: Leg) -> PathRef:
    return PathRef(path_id=pid, hops=(parent, child), metric_us=leg.latency_us, first_hop=leg.dest)


def _tree_edges_top_down(tree: DistributionTree) -> list[tuple[str, str]]:
    """Tree edges ordered so every parent appears before its children."""
    children: dict[str, list[str]] = {}
    for parent, child in sorted(tree.edges):
        children.setdefault(parent, []).append(child)
    out: list[tuple[str, str]] = []
    frontier = [tree.root]
    while frontier:
        node = frontier.pop(0)
        for child in children.get(node, ()):
            out.append((node, child))
            frontier.append(child)
    return out


def run_scenario(
    config: ScenarioConfig, *, seed: Optional[int] = None, mode: Optional[str] = None
) -> dict[str, Any]:
    """Validate-and-run convenience wrapper returning the metrics report."""
    sim = Simulation(config, seed=seed, mode=mode)
    return sim.run()
