"""Request/grant MAC with gateway-side traffic differentiation.

A node with pending packets sends a resource request on the shared request
channel (unslotted contention with truncated binary exponential backoff).
The gateway answers with a grant that places one collision-free data slot per
requested packet across the data channels, respecting the requester's
per-channel duty-cycle state; consecutive slots may hop channels so a bursty
node never has to sit out a full off-time.  Knowing its schedule, the node
sleeps until each slot and transmits without listening to anyone else: its
decisions depend only on its own grant.  Granted slots are never reused, so
data frames can never collide by construction, and data transmissions run in
parallel with request/grant traffic on the other channels.

Grants are immutable; queue growth is handled by a follow-up request after
the current grant completes.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import islice

from .phy import DATA, GRANT, REQUEST, Frame
from .engine import SimulationError

IDLE = "IDLE"
BACKOFF_REQUEST = "BACKOFF_REQUEST"
AWAIT_GRANT = "AWAIT_GRANT"
SLEEP_UNTIL_SLOT = "SLEEP_UNTIL_SLOT"
TRANSMIT = "TRANSMIT"

GATEWAY = 0


@dataclass(frozen=True)
class RequestMsg:
    node: int
    slots_requested: int
    seq: int


@dataclass(frozen=True)
class GrantAllocation:
    channel: int
    slot_start: int
    slot_count: int


@dataclass(frozen=True)
class Grant:
    node: int
    allocations: tuple[GrantAllocation, ...]
    slot_len_us: int

    def slots(self):
        """Yield (channel, slot_start) per slot, in transmission order."""
        for alloc in self.allocations:
            for k in range(alloc.slot_count):
                yield alloc.channel, alloc.slot_start + k * self.slot_len_us

    @property
    def end_us(self) -> int:
        last = self.allocations[-1]
        return last.slot_start + last.slot_count * self.slot_len_us


class SlotAllocator:
    """Future reservations on one data channel, with first-fit gap search.

    Earlier gaps left by one node's duty spacing stay available for other
    nodes, which is what lets many transmitters share a channel at high
    aggregate utilization while each stays within its own 1% budget.
    """

    def __init__(self) -> None:
        self._spans: list[tuple[int, int]] = []  # sorted, pairwise disjoint

    def prune(self, now: int) -> None:
        spans = self._spans
        i = 0
        while i < len(spans) and spans[i][1] <= now:
            i += 1
        if i:
            del spans[:i]

    def earliest_fit(self, lower_bound: int, length: int) -> int:
        pos = lower_bound
        for s, e in self._spans:
            if e <= pos:
                continue
            if s - pos >= length:
                break
            pos = e
        return pos

    def reserve(self, start: int, end: int) -> None:
        spans = self._spans
        i = len(spans)
        while i > 0 and spans[i - 1][0] > start:
            i -= 1
        spans.insert(i, (start, end))


class LpwaNode:
    """Node finite-state machine: request -> sleep -> scheduled transmit."""

    def __init__(self, sim, node_id: int) -> None:
        self.sim = sim
        self.id = node_id
        self.state = IDLE
        self.queue: list[int] = []
        self.retry_count = 0
        self.current_grant: Grant | None = None
        self.rng = sim.streams.stream("mac", node_id)
        self._covered: list[int] = []  # packets the outstanding request asked slots for
        self._seq = 0
        self._tx_handle = None
        self._timeout_handle = None

    def on_packet_arrival(self, pkt_id: int, t: int) -> None:
        if len(self.queue) >= self.sim.cfg.queue_capacity:
            oldest = self.queue.pop(0)
            self.sim.packet_gave_up(oldest)
        self.queue.append(pkt_id)
        if self.state == IDLE and self.current_grant is None:
            self._start_request_cycle(t)

    # -- request discipline ---------------------------------------------------

    def _start_request_cycle(self, t: int) -> None:
        ch = self.sim.request_channel
        t_tx = self.sim.earliest_tx(self.id, ch, t, self.sim.request_airtime_us)
        self.state = BACKOFF_REQUEST
        self._tx_handle = self.sim.engine.schedule(
            t_tx, "request_tx", self.id, self._request_tx)

    def _request_tx(self) -> None:
        self._tx_handle = None
        if not self.queue:  # everything overflowed away while we waited
            self.state = IDLE
            return
        now = self.sim.engine.now
        n = min(len(self.queue), self.sim.cfg.max_slots_per_grant)
        self._covered = list(islice(self.queue, n))
        self._seq += 1
        self.sim.transmit(Frame(
            src=self.id, dst=GATEWAY, channel=self.sim.request_channel,
            payload_bytes=self.sim.cfg.request_bytes, kind=REQUEST,
            t_start=now, t_end=now + self.sim.request_airtime_us,
            pdu=RequestMsg(self.id, n, self._seq),
        ))

    def on_tx_end(self, frame: Frame) -> None:
        if frame.kind == REQUEST:
            self.state = AWAIT_GRANT
            self._timeout_handle = self.sim.engine.schedule_in(
                self.sim.request_timeout_us, "request_timeout", self.id,
                self._on_timeout)
        elif frame.kind == DATA and self.current_grant is not None:
            self.state = SLEEP_UNTIL_SLOT

    def _on_timeout(self) -> None:
        self._timeout_handle = None
        self.retry_count += 1
        if self.retry_count >= self.sim.cfg.max_request_retries:
            if self.sim.cfg.drop_on_request_exhaustion:
                for pkt in self._covered:
                    if pkt in self.queue:
                        self.queue.remove(pkt)
                        self.sim.packet_gave_up(pkt)
            self._covered = []
            self.retry_count = 0
            self.state = IDLE  # next arrival (or a late grant) restarts the cycle
            return
        window = self.sim.request_backoff_base_us * (1 << self.retry_count)
        delay = int(self.rng.uniform(0, window))
        self.state = BACKOFF_REQUEST
        ch = self.sim.request_channel
        # Backoff is added on top of the duty-cycle floor: colliding peers
        # share the same deterministic duty release time, so a backoff folded
        # into max(backoff, duty wait) would never separate them.
        t_tx = self.sim.earliest_tx(self.id, ch, self.sim.engine.now,
                                    self.sim.request_airtime_us) + delay
        self._tx_handle = self.sim.engine.schedule(
            t_tx, "request_tx", self.id, self._request_tx)

    # -- grant execution --------------------------------------------------------

    def on_frame(self, frame: Frame) -> None:
        if frame.kind != GRANT or self.current_grant is not None:
            return
        # Accept the grant whatever the request cycle is doing: a grant that
        # arrives after the timeout (the gateway may be duty-blocked for a
        # while) is still perfectly usable, its slots are reserved for us.
        if self._tx_handle is not None:
            self.sim.engine.cancel(self._tx_handle)
            self._tx_handle = None
        if self._timeout_handle is not None:
            self.sim.engine.cancel(self._timeout_handle)
            self._timeout_handle = None
        self.retry_count = 0
        self._covered = []
        grant: Grant = frame.pdu
        self.current_grant = grant
        self.state = SLEEP_UNTIL_SLOT
        for ch, slot_start in grant.slots():
            self.sim.engine.schedule(slot_start, "slot_tx", self.id,
                                     lambda c=ch: self._slot_tx(c))
        self.sim.engine.schedule(grant.end_us, "grant_complete", self.id,
                                 self._grant_complete)

    def _slot_tx(self, ch: int) -> None:
        if not self.queue:
            return  # fewer packets than granted slots: leave the slot idle
        now = self.sim.engine.now
        allowed = self.sim.earliest_tx(self.id, ch, now, self.sim.data_airtime_us)
        if allowed > now:  # granted slot must already satisfy our own duty state
            raise SimulationError(
                f"node {self.id} granted slot at {now} on ch {ch} violates duty "
                f"(earliest {allowed})")
        pkt = self.queue.pop(0)
        self.state = TRANSMIT
        self.sim.packet_attempt(pkt)
        self.sim.transmit(Frame(
            src=self.id, dst=GATEWAY, channel=ch,
            payload_bytes=self.sim.cfg.payload_bytes, kind=DATA,
            t_start=now, t_end=now + self.sim.data_airtime_us,
            app_packet_id=pkt,
        ))

    def _grant_complete(self) -> None:
        self.current_grant = None
        if self.queue:
            self._start_request_cycle(self.sim.engine.now)
        else:
            self.state = IDLE


class LpwaGateway:
    """Scheduler: differentiates granted traffic into channels and data slots.

    Requests are served in arrival order with one grant transmission in
    flight at a time.  A repeated request from a node whose earlier one is
    still queued just refreshes it in place (the node re-requests whenever
    its timeout fires before our grant could go out), and requests are
    ignored while a grant for that node is awaiting transmission.

    Slot placement is greedy: for each requested slot, every data channel
    offers its earliest gap that the requester's duty state and the grant
    turnaround allow, and the earliest offer wins (ties to the lowest channel
    id).  Placed slots are never reallocated.
    """

    def __init__(self, sim) -> None:
        self.sim = sim
        self._requests: dict[int, tuple[int, int]] = {}  # node -> (slots, t_rx)
        self._acks: list[tuple[int, int]] = []           # (node, pkt), optional mode
        self._granting: set[int] = set()
        self._tx_busy = False
        self._alloc = {ch: SlotAllocator() for ch in sim.lpwa_data_channels}
        self._node_duty = sim.new_duty_ledger()  # mirror of granted data airtime

    def on_frame(self, frame: Frame) -> None:
        if frame.kind == DATA:
            self.sim.packet_delivered(frame.app_packet_id, frame.t_end)
            if self.sim.cfg.data_acks:
                self._acks.append((frame.src, frame.app_packet_id))
                self._process()
        elif frame.kind == REQUEST:
            msg: RequestMsg = frame.pdu
            if msg.node in self._granting:
                return  # its grant is already on the way out
            self._requests[msg.node] = (msg.slots_requested, frame.t_end)
            self._process()

    def _process(self) -> None:
        sim = self.sim
        while not self._tx_busy:
            if self._acks:
                node, pkt = self._acks.pop(0)
                t_ack = sim.earliest_tx(GATEWAY, sim.ack_channel, sim.engine.now,
                                        sim.ack_airtime_us)
                self._tx_busy = True
                sim.engine.schedule(t_ack, "gw_ack_tx", GATEWAY,
                                    lambda n=node, p=pkt: self._send_ack(n, p))
                return
            if not self._requests:
                return
            node, (n_slots, t_rx) = next(iter(self._requests.items()))
            del self._requests[node]
            t_start = sim.earliest_tx(GATEWAY, sim.grant_channel, sim.engine.now,
                                      sim.grant_airtime_us)
            grant = self._allocate(node, n_slots, t_rx, t_start + sim.grant_airtime_us)
            if grant is None:
                continue  # refused: no grant goes out, the node times out and retries
            self._granting.add(node)
            self._tx_busy = True
            sim.engine.schedule(t_start, "gw_grant_tx", GATEWAY,
                                lambda n=node, g=grant: self._send(n, g))

    def _send_ack(self, node: int, pkt: int) -> None:
        now = self.sim.engine.now
        self.sim.transmit(Frame(
            src=GATEWAY, dst=node, channel=self.sim.ack_channel,
            payload_bytes=self.sim.cfg.ack_bytes, kind="ack",
            t_start=now, t_end=now + self.sim.ack_airtime_us,
            app_packet_id=pkt,
        ))

    def _allocate(self, node: int, n_slots: int, t_rx: int,
                  grant_end: int) -> Grant | None:
        sim = self.sim
        slot_len = sim.slot_len_us
        data_air = sim.data_airtime_us
        floor = grant_end + sim.turnaround_us
        for alloc in self._alloc.values():
            alloc.prune(sim.engine.now)
        placed: list[tuple[int, int]] = []
        prev_end = 0
        for k in range(n_slots):
            best_ch = best_start = None
            for ch in sim.lpwa_data_channels:
                lb = max(floor, prev_end)
                lb = self._node_duty.earliest_start(node, ch, lb, data_air,
                                                    sim.channel_limit(ch))
                start = self._alloc[ch].earliest_fit(lb, slot_len)
                if best_start is None or start < best_start:
                    best_ch, best_start = ch, start
            if k == 0 and best_start > t_rx + sim.grant_horizon_us:
                return None  # not even one slot can start within the horizon
            self._alloc[best_ch].reserve(best_start, best_start + slot_len)
            self._node_duty.record(node, best_ch, best_start, best_start + data_air)
            placed.append((best_ch, best_start))
            prev_end = best_start + slot_len
        allocations: list[GrantAllocation] = []
        for ch, start in placed:
            last = allocations[-1] if allocations else None
            if (last is not None and last.channel == ch
                    and start == last.slot_start + last.slot_count * slot_len):
                allocations[-1] = GrantAllocation(ch, last.slot_start, last.slot_count + 1)
            else:
                allocations.append(GrantAllocation(ch, start, 1))
        return Grant(node, tuple(allocations), slot_len)

    def _send(self, node: int, grant: Grant) -> None:
        now = self.sim.engine.now
        self.sim.transmit(Frame(
            src=GATEWAY, dst=node, channel=self.sim.grant_channel,
            payload_bytes=self.sim.cfg.grant_bytes, kind=GRANT,
            t_start=now, t_end=now + self.sim.grant_airtime_us,
            pdu=grant,
        ))

    def on_tx_end(self, frame: Frame) -> None:
        if frame.kind == GRANT:
            self._granting.discard(frame.dst)
        self._tx_busy = False
        self._process()
