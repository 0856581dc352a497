"""Post-run audits over frame logs.

These are the verification side of the model's two central promises: granted
data slots never collide, and every transmitter stays inside its duty-cycle
budget in every sliding window.  They operate on persisted frame records
only, so they can run long after a simulation (or on CSVs from disk).
"""

from __future__ import annotations

from bisect import bisect_right
from fractions import Fraction

from .metrics import FrameRecord
from .phy import DATA, GRANT, REQUEST


def data_collision_pairs(frames: list[FrameRecord]) -> list[tuple[FrameRecord, FrameRecord]]:
    """All pairs of data frames overlapping on the same channel."""
    by_channel: dict[int, list[FrameRecord]] = {}
    for f in frames:
        if f.kind == DATA:
            by_channel.setdefault(f.channel, []).append(f)
    pairs = []
    for chan_frames in by_channel.values():
        chan_frames.sort(key=lambda f: f.t_start_us)
        for a, b in zip(chan_frames, chan_frames[1:]):
            if b.t_start_us < a.t_end_us:
                pairs.append((a, b))
    return pairs


def duty_cycle_audit(frames: list[FrameRecord], limit_fn, window_us: int
                     ) -> tuple[Fraction, list[tuple[int, int, int, Fraction]]]:
    """Check every (transmitter, channel) against its duty limit.

    limit_fn(src, channel) returns the applicable limit as a fraction (or
    None for unregulated).  For each transmitter the airtime inside the
    window of length window_us ending at each of its frame ends must not
    exceed limit * window.  Returns the worst utilization seen and a list of
    violations (src, channel, t_end, ratio).
    """
    by_key: dict[tuple[int, int], list[FrameRecord]] = {}
    for f in frames:
        by_key.setdefault((f.src, f.channel), []).append(f)
    worst = Fraction(0)
    violations = []
    for (src, channel), fl in by_key.items():
        limit = limit_fn(src, channel)
        fl.sort(key=lambda f: f.t_start_us)
        starts = [f.t_start_us for f in fl]
        ends = [f.t_end_us for f in fl]
        prefix = [0]
        for f in fl:
            prefix.append(prefix[-1] + f.airtime_us)
        for k, right in enumerate(ends):
            left = right - window_us
            j = bisect_right(ends, left)
            total = prefix[k + 1] - prefix[j]
            if j <= k and starts[j] < left:
                total -= left - starts[j]
            ratio = Fraction(total, window_us)
            if ratio > worst:
                worst = ratio
            if limit is not None and ratio > Fraction(limit).limit_denominator(1_000_000):
                violations.append((src, channel, right, ratio))
    return worst, violations


def parallel_overlap_exists(frames: list[FrameRecord]) -> bool:
    """True iff some data frame overlaps a request or grant frame in time on
    a different channel (data transfer running in parallel with the request
    procedure)."""
    control = sorted((f for f in frames if f.kind in (REQUEST, GRANT)),
                     key=lambda f: f.t_start_us)
    if not control:
        return False
    starts = [f.t_start_us for f in control]
    longest = max(f.airtime_us for f in control)
    for f in frames:
        if f.kind != DATA:
            continue
        # Overlapping control frames must start after t_start - longest and
        # before t_end; scan exactly that slice.
        lo = bisect_right(starts, f.t_start_us - longest)
        hi = bisect_right(starts, f.t_end_us - 1)
        for c in control[lo:hi]:
            if c.channel != f.channel and c.t_end_us > f.t_start_us:
                return True
    return False
