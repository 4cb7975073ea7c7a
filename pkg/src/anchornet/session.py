"""Reliable multipath transport for overlay sessions.

A sender splits a byte stream into fixed-size segments and paces them over
one or more assigned paths at allocator-granted rates: each path's next
emission slot advances by ceil(bits/rate) per segment, so bytes emitted on
a path over any window never exceed rate x window plus one segment.  Loss
recovery is selective repeat with a per-segment deadline of twice the
smoothed round-trip estimate; expired segments take priority over new data
and, like new data, go to whichever path has the earliest free slot.

Rates are granted, not probed: congestion safety comes from never exceeding
the allocation rather than from loss-driven window dynamics.

The receiver buffers out-of-order arrivals, delivers the maximal in-order
prefix, and acknowledges every data segment with a cumulative floor plus
the exact set of buffered sequence numbers.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Mapping, Optional, Sequence

from .addressing import L3Locator
from .allocator import as_fraction

SEGMENT_PAYLOAD_BYTES = 8192
RTT_INITIAL_FLOOR_US = 10_000


class NoPaths(ValueError):
    """A session cannot open without at least one path."""


class MissingRate(ValueError):
    """Every assigned path needs a positive paced rate."""


class SegmentKind(Enum):
    DATA = 0
    ACK = 1


def _pstr(s: str) -> bytes:
    raw = s.encode()
    return len(raw).to_bytes(2, "big") + raw


def _u64(n: int) -> bytes:
    return int(n).to_bytes(8, "big")


@dataclass(frozen=True)
class Segment:
    """The L5 protocol data unit.

    ``l3_dest`` always names the locator of the immediately next hop on the
    segment's path -- never a hop beyond it -- which is what keeps the
    substrate's own routing untouched.  For acknowledgements, ``seq`` and
    ``is_retransmit`` echo the data segment being acknowledged.
    """

    session_id: int
    seq: int
    path_id: int
    tag: str
    l3_dest: L3Locator
    payload: bytes = b""
    is_retransmit: bool = False
    kind: SegmentKind = SegmentKind.DATA
    ack_cum: int = 0
    ack_sacks: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if self.kind is SegmentKind.DATA and not self.payload:
            raise ValueError("data segments must carry a non-empty payload")
        if self.kind is SegmentKind.ACK and self.payload:
            raise ValueError("control segments carry no payload")
        if len(self.payload) > SEGMENT_PAYLOAD_BYTES:
            raise ValueError(f"payload exceeds {SEGMENT_PAYLOAD_BYTES} bytes")

    def encode(self) -> bytes:
        """Canonical byte form (big-endian, fixed field order) for trace
        hashing and determinism checks."""
        head = (
            _u64(self.session_id)
            + _u64(self.seq)
            + self.path_id.to_bytes(4, "big")
            + _pstr(self.tag)
            + bytes([self.kind.value, 1 if self.is_retransmit else 0])
            + _pstr(self.l3_dest.domain_id)
            + _pstr(self.l3_dest.attachment_id)
            + _u64(self.ack_cum)
            + len(self.ack_sacks).to_bytes(4, "big")
        )
        for s in self.ack_sacks:
            head += _u64(s)
        return head + len(self.payload).to_bytes(4, "big") + self.payload


@dataclass(frozen=True)
class PathRef:
    """What a session endpoint needs to know about one assigned path."""

    path_id: int
    hops: tuple[str, ...]
    metric_us: int
    first_hop: L3Locator


@dataclass
class PathStats:
    emitted_segments: int = 0
    emitted_bytes: int = 0
    retransmitted_segments: int = 0
    first_emit_us: Optional[int] = None
    last_emit_us: Optional[int] = None


class SenderSession:
    """Send side of one reliable stream (or one distribution-tree edge).

    The stream may be complete at construction (unicast transfers) or grow
    via :meth:`feed` as an upstream hop delivers it (tree relays).
    ``start_seq`` lets a relay begin mid-stream: earlier segments are
    treated as already acknowledged and are never requested or sent.
    """

    def __init__(
        self,
        session_id: int,
        tag: str,
        paths: Sequence[PathRef],
        rates_mbps: Mapping[int, "Fraction | float | int"],
        total_bytes: int,
        *,
        payload: bytes = b"",
        start_seq: int = 0,
        now: int = 0,
    ) -> None:
        if not paths:
            raise NoPaths("session opened with an empty path list")
        self.session_id = session_id
        self.tag = tag
        self.total_bytes = total_bytes
        self.total_segments = max(
            (total_bytes + SEGMENT_PAYLOAD_BYTES - 1) // SEGMENT_PAYLOAD_BYTES, 0
        )
        self.start_seq = start_seq
        self.send_next = start_seq
        self._buffer = bytearray()
        self._buffer_base = start_seq * SEGMENT_PAYLOAD_BYTES

        self.paths: dict[int, PathRef] = {}
        self.rates: dict[int, Fraction] = {}
        self.next_free: dict[int, int] = {}
        self.rtt_estimate_us: dict[int, int] = {}
        self._rtt_sampled: set[int] = set()
        self.stats: dict[int, PathStats] = {}
        self.set_paths(paths, rates_mbps, now)

        self.acked: set[int] = set()
        self.retx_deadline: dict[int, int] = {}
        self._retx_ready: dict[int, int] = {}
        self._ever_retransmitted: set[int] = set()
        self._last_send: dict[int, int] = {}
        self._scheduled_wakes: set[int] = set()
        if payload:
            self.feed(payload)

    # -- stream supply ----------------------------------------------------

    def feed(self, data: bytes) -> None:
        self._buffer.extend(data)

    def _segment_bounds(self, seq: int) -> tuple[int, int]:
        lo = seq * SEGMENT_PAYLOAD_BYTES
        hi = min(lo + SEGMENT_PAYLOAD_BYTES, self.total_bytes)
        return lo, hi

    def _segment_available(self, seq: int) -> bool:
        lo, hi = self._segment_bounds(seq)
        return self._buffer_base + len(self._buffer) >= hi and lo >= self._buffer_base

    def _segment_payload(self, seq: int) -> bytes:
        lo, hi = self._segment_bounds(seq)
        return bytes(self._buffer[lo - self._buffer_base : hi - self._buffer_base])

    # -- path management --------------------------------------------------

    def set_paths(
        self,
        paths: Sequence[PathRef],
        rates_mbps: Mapping[int, "Fraction | float | int"],
        now: int,
    ) -> None:
        if not paths:
            raise NoPaths("cannot replace path set with an empty one")
        self.paths = {p.path_id: p for p in paths}
        for pid, ref in self.paths.items():
            self.next_free.setdefault(pid, now)
            self.rtt_estimate_us.setdefault(
                pid, max(2 * ref.metric_us, RTT_INITIAL_FLOOR_US)
            )
            self.stats.setdefault(pid, PathStats())
        self.set_rates(rates_mbps)

    def set_rates(self, rates_mbps: Mapping[int, "Fraction | float | int"]) -> None:
        for pid in self.paths:
            if pid not in rates_mbps:
                raise MissingRate(f"no rate for path {pid}")
            rate = as_fraction(rates_mbps[pid])
            if rate <= 0:
                raise MissingRate(f"rate for path {pid} must be positive, got {rate}")
            self.rates[pid] = rate

    # -- scheduling -------------------------------------------------------

    def _take_work(self) -> Optional[tuple[int, bool]]:
        if self._retx_ready:
            seq = min(self._retx_ready, key=lambda s: (self._retx_ready[s], s))
            del self._retx_ready[seq]
            return seq, True
        if self.send_next < self.total_segments and self._segment_available(self.send_next):
            seq = self.send_next
            self.send_next += 1
            return seq, False
        return None

    def expire(self, now: int) -> None:
        """Move timed-out in-flight segments onto the retransmission queue."""
        for seq, deadline in sorted(self.retx_deadline.items()):
            if deadline <= now:
                del self.retx_deadline[seq]
                self._retx_ready[seq] = deadline

    def schedule(self, now: int) -> list[tuple[Segment, int]]:
        """Emit every segment due at this instant.

        Retransmissions go first (oldest deadline, then lowest seq); then new
        data, each assigned to the path with the earliest next-free slot,
        ties broken by lowest path id.  Paths whose slot lies in the future
        emit nothing now; :meth:`next_wake` says when to come back.
        """
        self.expire(now)
        out: list[tuple[Segment, int]] = []
        while True:
            free = [(self.next_free[pid], pid) for pid in self.paths if self.next_free[pid] <= now]
            if not free:
                break
            work = self._take_work()
            if work is None:
                break
            seq, is_retx = work
            _, pid = min(free)
            payload = self._segment_payload(seq)
            segment = Segment(
                session_id=self.session_id,
                seq=seq,
                path_id=pid,
                tag=self.tag,
                l3_dest=self.paths[pid].first_hop,
                payload=payload,
                is_retransmit=is_retx,
            )
            gap = math.ceil(Fraction(len(payload) * 8) / self.rates[pid])
            self.next_free[pid] = now + gap
            self.retx_deadline[seq] = now + 2 * self.rtt_estimate_us[pid]
            self._last_send[seq] = now
            if is_retx:
                self._ever_retransmitted.add(seq)
            st = self.stats[pid]
            st.emitted_segments += 1
            st.emitted_bytes += len(payload)
            if is_retx:
                st.retransmitted_segments += 1
            if st.first_emit_us is None:
                st.first_emit_us = now
            st.last_emit_us = now
            out.append((segment, now))
        return out

    def next_wake(self, now: int) -> Optional[int]:
        """Earliest future instant at which scheduling could make progress."""
        if self.complete:
            return None
        candidates = []
        has_new = self.send_next < self.total_segments and self._segment_available(self.send_next)
        if self._retx_ready or has_new:
            candidates.append(min(self.next_free[pid] for pid in self.paths))
        if self.retx_deadline:
            candidates.append(min(self.retx_deadline.values()))
        if not candidates:
            return None
        return max(min(candidates), now)

    # -- acknowledgement handling ------------------------------------------

    def on_ack(self, ack: Segment, now: int) -> None:
        if ack.session_id != self.session_id:
            raise ValueError(f"ack for session {ack.session_id}, expected {self.session_id}")
        newly_sampled = (
            ack.seq not in self.acked
            and not ack.is_retransmit
            and ack.seq not in self._ever_retransmitted
            and ack.seq in self._last_send
        )
        if newly_sampled:
            sample = now - self._last_send[ack.seq]
            pid = ack.path_id
            if pid in self._rtt_sampled:
                self.rtt_estimate_us[pid] = (7 * self.rtt_estimate_us[pid] + sample) // 8
            else:
                self.rtt_estimate_us[pid] = sample
                self._rtt_sampled.add(pid)
            self.rtt_estimate_us[pid] = max(self.rtt_estimate_us[pid], 1)
        acked = set(range(self.start_seq, ack.ack_cum)) | set(ack.ack_sacks) | {ack.seq}
        for seq in acked:
            self.acked.add(seq)
            self.retx_deadline.pop(seq, None)
            self._retx_ready.pop(seq, None)

    @property
    def complete(self) -> bool:
        return (
            self.send_next >= self.total_segments
            and len(self.acked) >= self.total_segments - self.start_seq
        )

    # -- wake bookkeeping (used by the event loop) --------------------------

    def claim_wake(self, at: int) -> bool:
        """True if no wake is already scheduled for this instant."""
        if at in self._scheduled_wakes:
            return False
        self._scheduled_wakes.add(at)
        return True

    def release_wake(self, at: int) -> None:
        self._scheduled_wakes.discard(at)


class ReceiverSession:
    """Receive side: selective-repeat reordering with prefix delivery.

    The delivered stream is always a contiguous extension from
    ``start_seq``; duplicates are re-acknowledged but never re-delivered.
    """

    def __init__(
        self,
        session_id: int,
        tag: str,
        reverse_hops: Mapping[int, L3Locator],
        total_bytes: int,
        *,
        start_seq: int = 0,
    ) -> None:
        self.session_id = session_id
        self.tag = tag
        self.reverse_hops = dict(reverse_hops)
        self.total_bytes = total_bytes
        self.total_segments = max(
            (total_bytes + SEGMENT_PAYLOAD_BYTES - 1) // SEGMENT_PAYLOAD_BYTES, 0
        )
        self.start_seq = start_seq
        self.next_expected = start_seq
        self.buffer: dict[int, bytes] = {}
        self.delivered_bytes = 0
        self._hash = hashlib.sha256()
        self.first_delivery_us: Optional[int] = None
        self.last_delivery_us: Optional[int] = None

    def set_reverse_hop(self, path_id: int, locator: L3Locator) -> None:
        self.reverse_hops[path_id] = locator

    def on_receive(self, segment: Segment, now: int) -> tuple[bytes, list[Segment]]:
        """Process one data segment; returns (newly delivered bytes, acks)."""
        if segment.session_id != self.session_id:
            raise ValueError(
                f"segment for session {segment.session_id}, expected {self.session_id}"
            )
        if segment.kind is not SegmentKind.DATA:
            raise ValueError("receiver got a non-data segment")
        if segment.seq >= self.next_expected and segment.seq not in self.buffer:
            self.buffer[segment.seq] = segment.payload
        delivered = bytearray()
        while self.next_expected in self.buffer:
            chunk = self.buffer.pop(self.next_expected)
            delivered.extend(chunk)
            self.next_expected += 1
        if delivered:
            self.delivered_bytes += len(delivered)
            self._hash.update(bytes(delivered))
            if self.first_delivery_us is None:
                self.first_delivery_us = now
            self.last_delivery_us = now
        ack = Segment(
            session_id=self.session_id,
            seq=segment.seq,
            path_id=segment.path_id,
            tag=self.tag,
            l3_dest=self.reverse_hops[segment.path_id],
            payload=b"",
            is_retransmit=segment.is_retransmit,
            kind=SegmentKind.ACK,
            ack_cum=self.next_expected,
            ack_sacks=tuple(sorted(self.buffer)),
        )
        return bytes(delivered), [ack]

    @property
    def complete(self) -> bool:
        return self.next_expected >= self.total_segments

    def delivered_digest(self) -> str:
        return self._hash.hexdigest()


def segment_count(total_bytes: int) -> int:
    return (total_bytes + SEGMENT_PAYLOAD_BYTES - 1) // SEGMENT_PAYLOAD_BYTES
