"""LoRa physical-layer model.

Covers three things: time-on-air computation from the standard LoRa symbol
model, an orthogonal-channel medium with destructive collision semantics
(any temporal overlap on a channel destroys all overlapping frames, no
capture), and per-transmitter, per-channel duty-cycle accounting.

There is intentionally no propagation, SNR or path-loss model: all nodes are
assumed in range of the gateway (single-hop), and propagation delay is zero.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction

from .engine import Engine, SimulationError, US_PER_S

# Frame kinds as they appear in the frame log.
DATA = "data"
REQUEST = "request"
GRANT = "grant"
ACK = "ack"

UPLINK = "uplink"
DOWNLINK = "downlink"

BROADCAST = -1


@dataclass(frozen=True)
class RadioParams:
    """Modulation parameters shared by every transmitter in a run."""

    spreading_factor: int = 7
    bandwidth_hz: int = 125_000
    coding_rate: int = 1              # 1..4, meaning 4/(4+CR)
    preamble_symbols: int = 8
    explicit_header: bool = True
    crc_on: bool = True
    low_data_rate_optimize: bool | None = None  # None = auto: on iff T_sym >= 16 ms

    def __post_init__(self) -> None:
        if not 7 <= self.spreading_factor <= 12:
            raise ValueError(f"spreading_factor must be in [7, 12], got {self.spreading_factor}")
        if self.bandwidth_hz <= 0:
            raise ValueError(f"bandwidth_hz must be > 0, got {self.bandwidth_hz}")
        if not 1 <= self.coding_rate <= 4:
            raise ValueError(f"coding_rate must be in [1, 4], got {self.coding_rate}")
        if self.preamble_symbols < 0:
            raise ValueError("preamble_symbols must be >= 0")

    @property
    def ldro_active(self) -> bool:
        if self.low_data_rate_optimize is not None:
            return self.low_data_rate_optimize
        # symbol time 2^SF / BW >= 16 ms
        return (1 << self.spreading_factor) * 1000 >= 16 * self.bandwidth_hz

    @property
    def symbol_time_us(self) -> float:
        return (1 << self.spreading_factor) * US_PER_S / self.bandwidth_hz


def payload_symbols(payload_bytes: int, params: RadioParams) -> int:
    """Number of payload symbols (including the 8-symbol sync block)."""
    if payload_bytes < 0:
        raise ValueError("payload_bytes must be >= 0")
    sf = params.spreading_factor
    de = 1 if params.ldro_active else 0
    if sf - 2 * de <= 0:
        raise ValueError(f"invalid SF/DE combination: SF={sf}, DE={de}")
    ih = 0 if params.explicit_header else 1
    crc = 1 if params.crc_on else 0
    num = 8 * payload_bytes - 4 * sf + 28 + 16 * crc - 20 * ih
    den = 4 * (sf - 2 * de)
    ceil_div = -(-num // den)  # exact ceiling for ints, negative included
    return 8 + max(ceil_div * (params.coding_rate + 4), 0)


def airtime_us(payload_bytes: int, params: RadioParams = RadioParams()) -> int:
    """Time on air in integer microseconds.

    T = (preamble_symbols + 4.25 + n_payload) * 2^SF / BW.  Computed in
    quarter-symbols with integer arithmetic; exact for the standard LoRa
    bandwidths, rounded to the nearest microsecond otherwise.
    """
    n_payload = payload_symbols(payload_bytes, params)
    quarter_symbols = 4 * params.preamble_symbols + 17 + 4 * n_payload
    num = quarter_symbols * (1 << params.spreading_factor) * US_PER_S
    den = 4 * params.bandwidth_hz
    return (num + den // 2) // den


@dataclass(frozen=True)
class Channel:
    """One radio channel.  duty_cycle_limit None disables regulation."""

    id: int
    direction: str = UPLINK
    duty_cycle_limit: float | None = 0.01

    def __post_init__(self) -> None:
        if self.direction not in (UPLINK, DOWNLINK):
            raise ValueError(f"bad channel direction: {self.direction}")
        if self.duty_cycle_limit is not None and not 0.0 < self.duty_cycle_limit <= 1.0:
            raise ValueError(f"duty_cycle_limit must be in (0, 1], got {self.duty_cycle_limit}")


@dataclass(slots=True)
class Frame:
    """Any over-the-air transmission: data, request, grant or ack.

    pdu carries the decoded MAC content (request/grant message) for frames
    that have one; payload_bytes alone determines the airtime."""

    src: int
    dst: int
    channel: int
    payload_bytes: int
    kind: str
    t_start: int
    t_end: int
    app_packet_id: int | None = None
    pdu: object = None


class Medium:
    """Per-channel shared medium.

    A frame is delivered iff no other frame's [t_start, t_end) interval
    overlaps it on the same channel; overlap destroys all frames involved.
    Channels are orthogonal.  An entity transmitting two frames at once is a
    model violation (a node has one half-duplex radio, and the gateway
    transmits on one channel at a time).
    """

    def __init__(self, engine: Engine, on_frame_end) -> None:
        self._engine = engine
        self._on_frame_end = on_frame_end  # callable(frame, delivered: bool)
        self._active: dict[int, list[list]] = {}  # channel id -> [frame, clean] entries
        self._by_entity: dict[int, Frame] = {}

    def is_transmitting(self, entity: int) -> bool:
        return entity in self._by_entity

    def transmit(self, frame: Frame) -> None:
        if frame.t_start != self._engine.now:
            raise SimulationError(
                f"transmit at t={frame.t_start} but clock is {self._engine.now}"
            )
        if frame.t_end <= frame.t_start:
            raise SimulationError("frame must have positive duration")
        if frame.src in self._by_entity:
            raise SimulationError(
                f"entity {frame.src} started a frame while one is already in flight"
            )
        entry = [frame, True]
        active = self._active.setdefault(frame.channel, [])
        for other in active:
            if other[0].t_end > frame.t_start:  # live interval => overlap
                other[1] = False
                entry[1] = False
        active.append(entry)
        self._by_entity[frame.src] = frame
        self._engine.schedule(frame.t_end, "frame_end", frame.src, lambda: self._finish(entry))

    def _finish(self, entry: list) -> None:
        frame, clean = entry
        self._active[frame.channel].remove(entry)
        del self._by_entity[frame.src]
        self._on_frame_end(frame, clean)


class DutyCycleLedger:
    """Per (transmitter, channel) airtime accounting.

    Enforcement is the standard post-transmission off-time rule,
    T_off = T_air * (1 - d) / d, plus a sliding-window budget: adding the new
    frame must keep total airtime within the window of length W ending at the
    new frame's end at or below d * W.  The off-time rule alone can exceed
    the window budget by one frame after ~d^-1 back-to-back cycles, so both
    are enforced; the window check mirrors the post-run compliance audit.

    Every result (and hence every recorded interval) is at least the last
    recorded end plus its off-time, so records per key strictly increase and
    intervals ending a full window before the last record can never matter
    again; those are discarded from the front as we go.  Queries themselves
    need not be monotone (the scheduler probes channels speculatively), so
    the current query's window edge is handled without discarding.
    """

    def __init__(self, window_us: int = 3_600 * US_PER_S) -> None:
        self.window_us = window_us
        # key -> [interval deque of (start, end), airtime sum, last_end, last_air]
        self._state: dict[tuple[int, int], list] = {}

    @staticmethod
    def _ratio(limit: float) -> Fraction:
        return Fraction(limit).limit_denominator(1_000_000)

    def earliest_start(self, tx: int, channel_id: int, t: int, duration_us: int,
                       limit: float | None) -> int:
        """Earliest t' >= t such that transmitting [t', t' + duration) complies."""
        if limit is None:
            return t
        state = self._state.get((tx, channel_id))
        if state is None:
            return t
        d = self._ratio(limit)
        budget = (self.window_us * d.numerator) // d.denominator
        if duration_us > budget:
            raise SimulationError(
                f"frame airtime {duration_us} us exceeds duty budget {budget} us per window"
            )
        intervals, air_sum, last_end, last_air = state
        off = -(-last_air * (d.denominator - d.numerator) // d.numerator)  # ceil
        candidate = max(t, last_end + off)
        # Discard intervals no window ending at or after last_end can reach;
        # any candidate is >= last_end, so this is safe for every query.
        safe_horizon = last_end - self.window_us
        while intervals and intervals[0][1] <= safe_horizon:
            s, e = intervals.popleft()
            air_sum -= e - s
        state[1] = air_sum
        if air_sum + duration_us <= budget:
            return candidate  # everything retained fits, no need to clip
        # Sliding-window rule on the window ending at the new frame's end.
        left = candidate + duration_us - self.window_us
        overlap = air_sum
        for s, e in intervals:
            if e <= left:
                overlap -= e - s
                continue
            if s < left:
                overlap -= left - s
            break
        excess = overlap + duration_us - budget
        if excess <= 0:
            return candidate
        # Advance minimally: every microsecond of delay slides one microsecond
        # of old airtime out of the window's left edge (old intervals all lie
        # left of the candidate, so nothing new enters on the right).
        pos = left
        for s, e in intervals:
            if e <= pos:
                continue
            seg_start = max(s, pos)
            seg = e - seg_start
            if seg >= excess:
                pos = seg_start + excess
                excess = 0
                break
            excess -= seg
            pos = e
        assert excess == 0
        return candidate + (pos - left)

    def record(self, tx: int, channel_id: int, t_start: int, t_end: int) -> None:
        key = (tx, channel_id)
        state = self._state.get(key)
        if state is None:
            state = self._state[key] = [deque(), 0, 0, 0]
        intervals = state[0]
        intervals.append((t_start, t_end))
        state[1] += t_end - t_start
        state[2] = t_end
        state[3] = t_end - t_start
        horizon = t_end - self.window_us
        while intervals and intervals[0][1] <= horizon:
            s, e = intervals.popleft()
            state[1] -= e - s
