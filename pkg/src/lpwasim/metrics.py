"""Packet lifecycle records, run metrics and their CSV representations.

Metrics are pure functions of the record/frame logs: recomputing a summary
from the persisted CSVs reproduces it bit-exactly.  End-to-end delay is
measured from packet generation to the FIRST successful reception at the
gateway, never to ack receipt.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Iterable

from .engine import US_PER_S

DELIVERED = "delivered"
DROPPED = "dropped"
IN_FLIGHT = "in_flight"

PACKET_CSV_HEADER = ["packet_id", "node_id", "t_generated_us", "t_delivered_us",
                     "outcome", "attempts"]
FRAME_CSV_HEADER = ["t_start_us", "t_end_us", "channel", "kind", "src", "dst", "outcome"]


@dataclass(slots=True)
class PacketRecord:
    packet_id: int
    node_id: int
    t_generated_us: int
    t_delivered_us: int | None = None
    dropped: bool = False
    attempts: int = 0

    @property
    def outcome(self) -> str:
        if self.t_delivered_us is not None:
            return DELIVERED
        if self.dropped:
            return DROPPED
        return IN_FLIGHT


@dataclass(slots=True)
class FrameRecord:
    t_start_us: int
    t_end_us: int
    channel: int
    kind: str
    src: int
    dst: int
    delivered: bool

    @property
    def airtime_us(self) -> int:
        return self.t_end_us - self.t_start_us


@dataclass
class MetricsSummary:
    generated: int
    delivered: int
    dropped: int
    in_flight: int
    mean_e2e_delay_s: float          # NaN when no packet was delivered
    delivery_ratio: float            # NaN when nothing was generated
    channel_utilization: dict[int, float] = field(default_factory=dict)


def compute_metrics(records: Iterable[PacketRecord],
                    frames: Iterable[FrameRecord],
                    horizon_us: int,
                    channel_ids: Iterable[int],
                    warmup_frac: float = 0.0) -> MetricsSummary:
    """Summarise a completed run.

    Records generated during the first warmup_frac of the horizon are
    excluded from the summary (transient removal); packets still in flight at
    the end of the run are excluded from both the delay and the delivery
    ratio and reported separately.  Channel utilization counts all frame
    airtime, collided frames included, over the full horizon.
    """
    warmup_us = int(horizon_us * warmup_frac)
    generated = delivered = dropped = in_flight = 0
    delay_sum_us = 0
    for rec in records:
        if rec.t_generated_us < warmup_us:
            continue
        generated += 1
        if rec.t_delivered_us is not None:
            delivered += 1
            delay_sum_us += rec.t_delivered_us - rec.t_generated_us
        elif rec.dropped:
            dropped += 1
        else:
            in_flight += 1
    mean_delay = delay_sum_us / delivered / US_PER_S if delivered else math.nan
    counted = generated - in_flight
    ratio = delivered / counted if counted else math.nan
    util: dict[int, float] = {ch: 0.0 for ch in channel_ids}
    if horizon_us > 0:
        for fr in frames:
            util[fr.channel] = util.get(fr.channel, 0.0) + fr.airtime_us
        util = {ch: total / horizon_us for ch, total in util.items()}
    return MetricsSummary(
        generated=generated,
        delivered=delivered,
        dropped=dropped,
        in_flight=in_flight,
        mean_e2e_delay_s=mean_delay,
        delivery_ratio=ratio,
        channel_utilization=util,
    )


# ---------------------------------------------------------------------------
# CSV persistence.  Formatting is fixed so identical runs produce identical
# bytes (the determinism contract is checked at file level).
# ---------------------------------------------------------------------------

def write_packet_csv(path, records: Iterable[PacketRecord]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(PACKET_CSV_HEADER)
        for r in records:
            w.writerow([r.packet_id, r.node_id, r.t_generated_us,
                        "" if r.t_delivered_us is None else r.t_delivered_us,
                        r.outcome, r.attempts])


def read_packet_csv(path) -> list[PacketRecord]:
    out = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            out.append(PacketRecord(
                packet_id=int(row["packet_id"]),
                node_id=int(row["node_id"]),
                t_generated_us=int(row["t_generated_us"]),
                t_delivered_us=int(row["t_delivered_us"]) if row["t_delivered_us"] else None,
                dropped=row["outcome"] == DROPPED,
                attempts=int(row["attempts"]),
            ))
    return out


def write_frame_csv(path, frames: Iterable[FrameRecord]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(FRAME_CSV_HEADER)
        for f in frames:
            w.writerow([f.t_start_us, f.t_end_us, f.channel, f.kind, f.src, f.dst,
                        "delivered" if f.delivered else "collided"])


def read_frame_csv(path) -> list[FrameRecord]:
    out = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            out.append(FrameRecord(
                t_start_us=int(row["t_start_us"]),
                t_end_us=int(row["t_end_us"]),
                channel=int(row["channel"]),
                kind=row["kind"],
                src=int(row["src"]),
                dst=int(row["dst"]),
                delivered=row["outcome"] == "delivered",
            ))
    return out


def format_float(x: float) -> str:
    """Stable, round-trippable float text for summary CSVs."""
    return repr(float(x))
