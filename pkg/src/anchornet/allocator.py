"""Weighted max-min fair rate allocation by progressive filling.

All concurrent claimants (one per session per assigned path) rise together
in normalized rate (rate divided by policy weight).  Whenever a link fills,
everything crossing it freezes at its current rate; whenever a claimant
reaches its demand cap it freezes there.  The loop repeats on the survivors
until nothing can rise further.  Arithmetic is exact rationals internally
so the per-link conservation identity holds to the last bit; rates convert
to floats only at the reporting boundary.

The resulting allocation has the classic bottleneck property: a claimant
not at its demand cap sits on at least one saturated link where no other
claimant holds a strictly larger normalized rate.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional, Sequence, Union

from .addressing import ScienceDomainTag

Rate = Union[int, float, Fraction]


class UnknownLink(KeyError):
    """A demand references a link absent from the capacity map."""


class UnknownTag(KeyError):
    """A session carries a science-domain tag absent from the policy table."""


def as_fraction(value: Rate) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        return Fraction(str(value))
    return Fraction(value)


@dataclass(frozen=True)
class Demand:
    """One claimant: a (session, path) pair and the links it crosses."""

    session_id: str
    weight: Fraction
    links: frozenset[str]
    demand_cap_mbps: Optional[Fraction] = None
    tag: Optional[str] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "weight", as_fraction(self.weight))
        object.__setattr__(self, "links", frozenset(self.links))
        if self.demand_cap_mbps is not None:
            object.__setattr__(self, "demand_cap_mbps", as_fraction(self.demand_cap_mbps))
        if self.weight <= 0:
            raise ValueError(f"demand {self.session_id!r}: weight must be positive")
        if self.demand_cap_mbps is not None and self.demand_cap_mbps < 0:
            raise ValueError(f"demand {self.session_id!r}: demand cap must be >= 0")


@dataclass(frozen=True)
class DemandMatrix:
    sessions: tuple[Demand, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "sessions", tuple(self.sessions))
        seen = set()
        for demand in self.sessions:
            if demand.session_id in seen:
                raise ValueError(f"duplicate session id {demand.session_id!r}")
            seen.add(demand.session_id)


@dataclass(frozen=True)
class FlowAllocation:
    """Per-claimant rates and per-link residuals, exact and as floats.

    Invariant (exact): for every link, the rates of the sessions crossing it
    plus the residual equal the link capacity.
    """

    rates_exact: Mapping[str, Fraction]
    residuals_exact: Mapping[str, Fraction]

    @property
    def rates_mbps(self) -> dict[str, float]:
        return {sid: float(rate) for sid, rate in self.rates_exact.items()}

    @property
    def residuals_mbps(self) -> dict[str, float]:
        return {lid: float(r) for lid, r in self.residuals_exact.items()}


def water_fill(capacities: Mapping[str, Rate], demands: DemandMatrix) -> FlowAllocation:
    """Allocate link capacity to all demands, weighted max-min fair."""
    caps = {lid: as_fraction(c) for lid, c in capacities.items()}
    for lid, cap in caps.items():
        if cap <= 0:
            raise ValueError(f"link {lid!r}: capacity must be positive, got {cap}")
    for demand in demands.sessions:
        missing = demand.links - caps.keys()
        if missing:
            raise UnknownLink(
                f"demand {demand.session_id!r} references unknown links {sorted(missing)}"
            )
        if not demand.links and demand.demand_cap_mbps is None:
            raise ValueError(
                f"demand {demand.session_id!r} crosses no links and has no cap; rate unbounded"
            )

    rates: dict[str, Fraction] = {d.session_id: Fraction(0) for d in demands.sessions}
    remaining = dict(caps)
    active: list[Demand] = list(demands.sessions)

    while active:
        link_load: dict[str, Fraction] = {}
        for demand in active:
            for lid in demand.links:
                link_load[lid] = link_load.get(lid, Fraction(0)) + demand.weight

        increments: list[Fraction] = []
        for lid, load in link_load.items():
            increments.append(remaining[lid] / load)
        for demand in active:
            if demand.demand_cap_mbps is not None:
                headroom = demand.demand_cap_mbps - rates[demand.session_id]
                increments.append(headroom / demand.weight)
        delta = min(increments)

        for demand in active:
            rates[demand.session_id] += delta * demand.weight
        for lid, load in link_load.items():
            remaining[lid] -= delta * load

        saturated = {lid for lid, load in link_load.items() if remaining[lid] == 0}
        still_active = []
        for demand in active:
            capped = (
                demand.demand_cap_mbps is not None
                and rates[demand.session_id] >= demand.demand_cap_mbps
            )
            if capped or demand.links & saturated:
                continue
            still_active.append(demand)
        if len(still_active) == len(active):
            raise AssertionError("progressive filling failed to freeze any session")
        active = still_active

    return FlowAllocation(rates_exact=rates, residuals_exact=remaining)


def domain_shares(
    alloc: FlowAllocation,
    demands: DemandMatrix,
    policy: Sequence[ScienceDomainTag],
) -> dict[str, float]:
    """Aggregate allocated rate by science-domain tag.  Reporting only."""
    known = {entry.tag for entry in policy}
    shares: dict[str, Fraction] = {tag: Fraction(0) for tag in sorted(known)}
    for demand in demands.sessions:
        if demand.tag not in known:
            raise UnknownTag(
                f"session {demand.session_id!r} carries tag {demand.tag!r} not in policy"
            )
        shares[demand.tag] += alloc.rates_exact[demand.session_id]
    return {tag: float(total) for tag, total in shares.items()}
