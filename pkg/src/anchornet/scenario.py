"""Scenario configuration: the documented JSON schema, loading, validation.

A scenario declares the substrate (opaque domains, their attachment points,
capacity/latency/loss links inside each domain), the overlay (anchors with
ports and peerings, hosts with a home anchor), the science-domain policy
table, and a timed event script.  Field names here are a frozen external
interface: the shipped fixtures and the metrics reports use them verbatim.

Structural rules enforced before any simulation starts:

* every referenced id exists (attachments, domains, anchors, hosts, links,
  tags);
* links join two distinct attachments of one domain; anchors peer through
  exactly one shared domain and at most once per anchor pair;
* loss probability and background utilization lie in [0, 1);
* every name is a well-formed lowercase dotted L5 name.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Optional

from .addressing import AddressError, AddressKind, ScienceDomainTag, parse_address

MODE_BASELINE = "baseline-single-path"
MODE_L5 = "l5-multipath"
MODES = (MODE_BASELINE, MODE_L5)

EVENT_KINDS = ("open_session", "stage", "subscribe", "link_down")


class ParseError(ValueError):
    """Config file is not syntactically valid; carries line and column."""

    def __init__(self, message: str, line: int, column: int) -> None:
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class ConfigInvalid(ValueError):
    """Config parsed but failed validation; carries all diagnostics."""

    def __init__(self, diagnostics: list["Diagnostic"]) -> None:
        self.diagnostics = diagnostics
        super().__init__("; ".join(str(d) for d in diagnostics))


@dataclass(frozen=True)
class Diagnostic:
    path: str
    message: str

    def __str__(self) -> str:
        return f"{self.path}: {self.message}"


@dataclass(frozen=True)
class DomainCfg:
    id: str
    attachments: tuple[str, ...]


@dataclass(frozen=True)
class LinkCfg:
    id: str
    domain: str
    endpoints: tuple[str, str]
    capacity_mbps: Fraction
    latency_us: int
    loss_prob: float = 0.0
    background_utilization: Fraction = Fraction(0)
    cost: Fraction = Fraction(1)

    @property
    def available_mbps(self) -> Fraction:
        return self.capacity_mbps * (1 - self.background_utilization)


@dataclass(frozen=True)
class PortCfg:
    domain: str
    attachment: str


@dataclass(frozen=True)
class PeerCfg:
    anchor: str
    domain: str


@dataclass(frozen=True)
class AnchorCfg:
    name: str
    ports: tuple[PortCfg, ...]
    peers: tuple[PeerCfg, ...] = ()
    gateway: bool = False


@dataclass(frozen=True)
class HostCfg:
    name: str
    anchor: str
    port: PortCfg


@dataclass(frozen=True)
class EventCfg:
    time_us: int
    kind: str
    fields: dict[str, Any]


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    seed: int
    mode: str
    horizon_us: int
    domains: tuple[DomainCfg, ...]
    links: tuple[LinkCfg, ...]
    anchors: tuple[AnchorCfg, ...]
    hosts: tuple[HostCfg, ...]
    policy: tuple[ScienceDomainTag, ...]
    events: tuple[EventCfg, ...]
    raw: dict[str, Any] = field(repr=False, default_factory=dict)

    def scenario_hash(self) -> str:
        """Digest of everything except seed and mode, so reports from two
        runs of the same scenario are comparable."""
        payload = {
            key: self.raw.get(key)
            for key in ("name", "domains", "links", "anchors", "hosts", "policy", "events")
        }
        blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()

    def policy_weights(self) -> dict[str, Fraction]:
        return {entry.tag: entry.weight for entry in self.policy}


def _fraction(value: Any) -> Fraction:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise TypeError(f"expected a number, got {value!r}")
    return Fraction(str(value))


def load_scenario(path: str) -> ScenarioConfig:
    """Parse a scenario file; raises ParseError with position on bad syntax
    and ConfigInvalid with field-level diagnostics on bad structure."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    return parse_scenario(text)


def parse_scenario(text: str) -> ScenarioConfig:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from exc
    config, diagnostics = _build(raw)
    if diagnostics:
        raise ConfigInvalid(diagnostics)
    return config


def validate_text(text: str) -> list[Diagnostic]:
    """Diagnostics for a config, empty when it is acceptable."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        return [Diagnostic("$", f"parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}")]
    _, diagnostics = _build(raw)
    return diagnostics


def _build(raw: Any) -> tuple[Optional[ScenarioConfig], list[Diagnostic]]:
    diags: list[Diagnostic] = []

    def bad(path: str, message: str) -> None:
        diags.append(Diagnostic(path, message))

    if not isinstance(raw, dict):
        return None, [Diagnostic("$", "top level must be an object")]

    name = raw.get("name", "unnamed")
    seed = raw.get("seed", 0)
    mode = raw.get("mode", MODE_L5)
    horizon = raw.get("horizon_us", 10_000_000)
    if not isinstance(seed, int):
        bad("seed", f"must be an integer, got {seed!r}")
        seed = 0
    if mode not in MODES:
        bad("mode", f"must be one of {MODES}, got {mode!r}")
        mode = MODE_L5
    if not isinstance(horizon, int) or horizon <= 0:
        bad("horizon_us", f"must be a positive integer, got {horizon!r}")
        horizon = 10_000_000

    # -- domains and attachments ------------------------------------------
    domains: list[DomainCfg] = []
    attachment_domain: dict[tuple[str, str], None] = {}
    for i, entry in enumerate(raw.get("domains", [])):
        path = f"domains[{i}]"
        did = entry.get("id")
        if not did or not isinstance(did, str):
            bad(path + ".id", "missing or not a string")
            continue
        if any(d.id == did for d in domains):
            bad(path + ".id", f"duplicate domain id {did!r}")
            continue
        atts = entry.get("attachments", [])
        if len(set(atts)) != len(atts):
            bad(path + ".attachments", "attachment ids must be unique within the domain")
        domains.append(DomainCfg(did, tuple(atts)))
        for att in atts:
            attachment_domain[(did, att)] = None

    domain_ids = {d.id for d in domains}

    # -- links ---------------------------------------------------------------
    links: list[LinkCfg] = []
    for i, entry in enumerate(raw.get("links", [])):
        path = f"links[{i}]"
        lid = entry.get("id")
        if not lid or not isinstance(lid, str):
            bad(path + ".id", "missing or not a string")
            continue
        if any(l.id == lid for l in links):
            bad(path + ".id", f"duplicate link id {lid!r}")
            continue
        domain = entry.get("domain")
        if domain not in domain_ids:
            bad(path + ".domain", f"unknown domain {domain!r}")
            continue
        endpoints = entry.get("endpoints", [])
        if len(endpoints) != 2 or endpoints[0] == endpoints[1]:
            bad(path + ".endpoints", "must name two distinct attachments")
            continue
        ok = True
        for att in endpoints:
            if (domain, att) not in attachment_domain:
                bad(path + ".endpoints", f"attachment {att!r} not declared in domain {domain!r}")
                ok = False
        if not ok:
            continue
        try:
            capacity = _fraction(entry.get("capacity_mbps"))
        except (TypeError, ValueError):
            bad(path + ".capacity_mbps", f"not a number: {entry.get('capacity_mbps')!r}")
            continue
        if capacity <= 0:
            bad(path + ".capacity_mbps", f"must be positive, got {capacity}")
            continue
        latency = entry.get("latency_us", 0)
        if not isinstance(latency, int) or latency < 0:
            bad(path + ".latency_us", f"must be a nonnegative integer, got {latency!r}")
            continue
        loss = entry.get("loss_prob", 0.0)
        if not isinstance(loss, (int, float)) or not (0 <= loss < 1):
            bad(path + ".loss_prob", f"must lie in [0, 1), got {loss!r}")
            continue
        try:
            background = _fraction(entry.get("background_utilization", 0))
        except (TypeError, ValueError):
            bad(path + ".background_utilization", "not a number")
            continue
        if not (0 <= background < 1):
            bad(path + ".background_utilization", f"must lie in [0, 1), got {background}")
            continue
        try:
            cost = _fraction(entry.get("cost", 1))
        except (TypeError, ValueError):
            bad(path + ".cost", "not a number")
            continue
        if cost < 0:
            bad(path + ".cost", f"must be nonnegative, got {cost}")
            continue
        links.append(
            LinkCfg(lid, domain, (endpoints[0], endpoints[1]), capacity, latency, float(loss), background, cost)
        )

    # -- anchors ---------------------------------------------------------------
    anchors: list[AnchorCfg] = []
    taken_names: set[str] = set()
    taken_ports: set[tuple[str, str]] = set()
    for i, entry in enumerate(raw.get("anchors", [])):
        path = f"anchors[{i}]"
        aname = entry.get("name", "")
        try:
            parse_address(aname)
        except (AddressError, TypeError):
            bad(path + ".name", f"not a valid L5 name: {aname!r}")
            continue
        if aname in taken_names:
            bad(path + ".name", f"duplicate node name {aname!r}")
            continue
        taken_names.add(aname)
        ports: list[PortCfg] = []
        for j, pentry in enumerate(entry.get("ports", [])):
            ppath = f"{path}.ports[{j}]"
            pd, pa = pentry.get("domain"), pentry.get("attachment")
            if (pd, pa) not in attachment_domain:
                bad(ppath, f"unknown attachment {pd!r}/{pa!r}")
                continue
            if (pd, pa) in taken_ports:
                bad(ppath, f"attachment {pd!r}/{pa!r} already claimed")
                continue
            taken_ports.add((pd, pa))
            ports.append(PortCfg(pd, pa))
        if not ports:
            bad(path + ".ports", "anchor needs at least one port")
            continue
        peers: list[PeerCfg] = []
        for j, pentry in enumerate(entry.get("peers", [])):
            ppath = f"{path}.peers[{j}]"
            if not isinstance(pentry, dict) or "anchor" not in pentry or "domain" not in pentry:
                bad(ppath, 'must be {"anchor": name, "domain": id}')
                continue
            peers.append(PeerCfg(pentry["anchor"], pentry["domain"]))
        anchors.append(AnchorCfg(aname, tuple(ports), tuple(peers), bool(entry.get("gateway", False))))

    anchor_names = {a.name for a in anchors}
    anchor_by_name = {a.name: a for a in anchors}

    peer_pairs: set[frozenset[str]] = set()
    for i, a in enumerate(anchors):
        for j, peer in enumerate(a.peers):
            ppath = f"anchors[{i}].peers[{j}]"
            if peer.anchor not in anchor_names:
                bad(ppath + ".anchor", f"unknown anchor {peer.anchor!r}")
                continue
            if peer.anchor == a.name:
                bad(ppath + ".anchor", "anchor cannot peer with itself")
                continue
            if peer.domain not in domain_ids:
                bad(ppath + ".domain", f"unknown domain {peer.domain!r}")
                continue
            pair = frozenset((a.name, peer.anchor))
            declared_reverse = any(
                q.anchor == a.name and q.domain == peer.domain
                for q in anchor_by_name[peer.anchor].peers
            )
            if pair in peer_pairs and not declared_reverse:
                bad(ppath, f"at most one peering per anchor pair ({a.name!r}, {peer.anchor!r})")
                continue
            peer_pairs.add(pair)
            mine = {p.attachment for p in a.ports if p.domain == peer.domain}
            theirs = {p.attachment for p in anchor_by_name[peer.anchor].ports if p.domain == peer.domain}
            if not mine or not theirs:
                bad(ppath, f"both anchors need a port in domain {peer.domain!r}")

    # -- hosts ---------------------------------------------------------------
    hosts: list[HostCfg] = []
    for i, entry in enumerate(raw.get("hosts", [])):
        path = f"hosts[{i}]"
        hname = entry.get("name", "")
        try:
            parse_address(hname)
        except (AddressError, TypeError):
            bad(path + ".name", f"not a valid L5 name: {hname!r}")
            continue
        if hname in taken_names:
            bad(path + ".name", f"duplicate node name {hname!r}")
            continue
        taken_names.add(hname)
        home = entry.get("anchor")
        if home not in anchor_names:
            bad(path + ".anchor", f"unknown anchor {home!r}")
            continue
        pentry = entry.get("port", {})
        pd, pa = pentry.get("domain"), pentry.get("attachment")
        if (pd, pa) not in attachment_domain:
            bad(path + ".port", f"unknown attachment {pd!r}/{pa!r}")
            continue
        if (pd, pa) in taken_ports:
            bad(path + ".port", f"attachment {pd!r}/{pa!r} already claimed")
            continue
        taken_ports.add((pd, pa))
        if not any(p.domain == pd for p in anchor_by_name[home].ports):
            bad(path + ".port", f"home anchor {home!r} has no port in domain {pd!r}")
            continue
        hosts.append(HostCfg(hname, home, PortCfg(pd, pa)))

    host_names = {h.name for h in hosts}

    # -- policy ---------------------------------------------------------------
    policy: list[ScienceDomainTag] = []
    for i, entry in enumerate(raw.get("policy", [])):
        path = f"policy[{i}]"
        tag = entry.get("tag")
        if not tag or not isinstance(tag, str):
            bad(path + ".tag", "missing or not a string")
            continue
        if any(p.tag == tag for p in policy):
            bad(path + ".tag", f"duplicate tag {tag!r}")
            continue
        try:
            weight = _fraction(entry.get("weight", 1))
            policy.append(ScienceDomainTag(tag, weight))
        except (TypeError, ValueError) as exc:
            bad(path, str(exc))

    tag_names = {p.tag for p in policy}
    link_ids = {l.id for l in links}

    # -- events ---------------------------------------------------------------
    events: list[EventCfg] = []
    session_ids: set[str] = set()
    for i, entry in enumerate(raw.get("events", [])):
        path = f"events[{i}]"
        time_us = entry.get("time_us")
        kind = entry.get("kind")
        if not isinstance(time_us, int) or time_us < 0:
            bad(path + ".time_us", f"must be a nonnegative integer, got {time_us!r}")
            continue
        if kind not in EVENT_KINDS:
            bad(path + ".kind", f"must be one of {EVENT_KINDS}, got {kind!r}")
            continue
        fields = {k: v for k, v in entry.items() if k not in ("time_us", "kind")}
        if kind == "open_session":
            sid = fields.get("id")
            if not sid or not isinstance(sid, str):
                bad(path + ".id", "open_session needs a string id")
                continue
            if sid in session_ids:
                bad(path + ".id", f"duplicate session id {sid!r}")
                continue
            session_ids.add(sid)
            session_mode = fields.get("session_mode", "unicast")
            if session_mode not in ("unicast", "pubsub"):
                bad(path + ".session_mode", f"must be unicast or pubsub, got {session_mode!r}")
                continue
            src = fields.get("src")
            if src not in host_names and src not in anchor_names:
                bad(path + ".src", f"unknown endpoint {src!r}")
                continue
            if session_mode == "unicast":
                dst = fields.get("dst")
                if dst not in host_names and dst not in anchor_names:
                    bad(path + ".dst", f"unknown endpoint {dst!r}")
                    continue
            else:
                subs = fields.get("subscribers", [])
                if not subs:
                    bad(path + ".subscribers", "pubsub session needs subscribers")
                    continue
                unknown = [s for s in subs if s not in host_names and s not in anchor_names]
                if unknown:
                    bad(path + ".subscribers", f"unknown endpoints {unknown!r}")
                    continue
            tag = fields.get("tag")
            if tag not in tag_names:
                bad(path + ".tag", f"tag {tag!r} not in policy")
                continue
            nbytes = fields.get("bytes")
            obj = fields.get("object")
            if obj is None and (not isinstance(nbytes, int) or nbytes <= 0):
                bad(path + ".bytes", f"must be a positive integer, got {nbytes!r}")
                continue
            k = fields.get("k_paths", 2)
            if not isinstance(k, int) or k < 1:
                bad(path + ".k_paths", f"must be a positive integer, got {k!r}")
                continue
        elif kind in ("stage", "subscribe"):
            gw = fields.get("gateway")
            acfg = anchor_by_name.get(gw)
            if acfg is None or not acfg.gateway:
                bad(path + ".gateway", f"{gw!r} is not a gateway anchor")
                continue
            obj = fields.get("object", "")
            try:
                parse_address(obj, AddressKind.DATA)
            except (AddressError, TypeError):
                bad(path + ".object", f"not a valid data name: {obj!r}")
                continue
            if obj in taken_names:
                bad(path + ".object", f"name {obj!r} collides with a node name")
                continue
            if kind == "stage":
                size = fields.get("size_bytes")
                ttl = fields.get("ttl_us")
                if not isinstance(size, int) or size <= 0:
                    bad(path + ".size_bytes", f"must be a positive integer, got {size!r}")
                    continue
                if not isinstance(ttl, int) or ttl <= 0:
                    bad(path + ".ttl_us", f"must be a positive integer, got {ttl!r}")
                    continue
            else:
                tag = fields.get("tag")
                if tag not in tag_names:
                    bad(path + ".tag", f"tag {tag!r} not in policy")
                    continue
        elif kind == "link_down":
            if fields.get("link") not in link_ids:
                bad(path + ".link", f"unknown link {fields.get('link')!r}")
                continue
        events.append(EventCfg(time_us, kind, fields))

    if diags:
        return None, diags

    config = ScenarioConfig(
        name=str(name),
        seed=seed,
        mode=mode,
        horizon_us=horizon,
        domains=tuple(domains),
        links=tuple(links),
        anchors=tuple(anchors),
        hosts=tuple(hosts),
        policy=tuple(policy),
        events=tuple(sorted(events, key=lambda e: e.time_us)),
        raw=raw,
    )
    return config, []
