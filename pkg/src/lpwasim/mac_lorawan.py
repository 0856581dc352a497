"""Pure-ALOHA baseline MAC (LoRaWAN-style confirmed uplinks).

A node transmits each packet immediately at the earliest duty-allowed time on
a uniformly random uplink channel, then listens for an acknowledgement.  A
missing ack triggers a retransmission after a uniform random backoff on a
fresh random channel, up to max_retransmissions times; after that the packet
is abandoned.  The gateway acknowledges every delivered data frame on the
downlink channel, one transmission at a time and subject to its own duty
cycle; acks that cannot fit inside the sender's receive window are skipped
entirely (the sender then retransmits even though the data was delivered —
delivery is still counted at the first gateway reception).

Deliberately not modelled: join procedures, MAC commands, ADR, RX2 windows
and class B/C behaviour.
"""

from __future__ import annotations

from collections import deque

from .phy import ACK, DATA, Frame

IDLE = "IDLE"
WAIT_DUTY = "WAIT_DUTY"
TX = "TX"
AWAIT_ACK = "AWAIT_ACK"
RETRY_BACKOFF = "RETRY_BACKOFF"

GATEWAY = 0


class BaselineNode:
    """Sender side of the baseline: FIFO queue, per-packet attempt counter."""

    def __init__(self, sim, node_id: int) -> None:
        self.sim = sim
        self.id = node_id
        self.state = IDLE
        self.queue: deque[int] = deque()
        self.tx_attempts = 0  # transmissions of the head packet so far
        self.rng = sim.streams.stream("mac", node_id)
        self._window_handle = None

    # -- application side ---------------------------------------------------

    def on_packet_arrival(self, pkt_id: int, t: int) -> None:
        if len(self.queue) >= self.sim.cfg.queue_capacity:
            # The radio stack is busy: the new reading is rejected at the
            # source (tail drop), matching deployed LoRaWAN stack behaviour.
            self.sim.packet_gave_up(pkt_id)
            return
        self.queue.append(pkt_id)
        if self.state == IDLE:
            self._begin_attempt(t)

    # -- attempt cycle ------------------------------------------------------

    def _begin_attempt(self, t: int) -> None:
        ch = self.rng.choice(self.sim.baseline_data_channels)
        t_tx = self.sim.earliest_tx(self.id, ch, t, self.sim.data_airtime_us)
        self.state = WAIT_DUTY
        self.sim.engine.schedule(t_tx, "node_data_tx", self.id,
                                 lambda: self._tx_start(ch))

    def _tx_start(self, ch: int) -> None:
        now = self.sim.engine.now
        pkt = self.queue[0]
        self.state = TX
        self.sim.packet_attempt(pkt)
        self.sim.transmit(Frame(
            src=self.id, dst=GATEWAY, channel=ch,
            payload_bytes=self.sim.cfg.payload_bytes, kind=DATA,
            t_start=now, t_end=now + self.sim.data_airtime_us,
            app_packet_id=pkt,
        ))

    def on_tx_end(self, frame: Frame) -> None:
        self.tx_attempts += 1
        if not self.sim.cfg.confirmed:
            # Unconfirmed traffic: fire and forget, single attempt.
            self._finish_head()
            return
        self.state = AWAIT_ACK
        window_end = frame.t_end + self.sim.rx_delay_us + self.sim.ack_airtime_us \
            + self.sim.ack_margin_us
        self._window_handle = self.sim.engine.schedule(
            window_end, "ack_window_close", self.id, self._window_close)

    def on_frame(self, frame: Frame) -> None:
        if frame.kind != ACK or self.state != AWAIT_ACK:
            return
        if not self.queue or frame.app_packet_id != self.queue[0]:
            return
        self.sim.engine.cancel(self._window_handle)
        self._finish_head()

    def _window_close(self) -> None:
        if self.tx_attempts >= 1 + self.sim.cfg.max_retransmissions:
            pkt = self.queue[0]
            self.sim.packet_gave_up(pkt)  # still counts delivered if the gateway got it
            self._finish_head()
            return
        self.state = RETRY_BACKOFF
        lo, hi = self.sim.retransmit_backoff_us
        delay = int(self.rng.uniform(lo, hi))
        self.sim.engine.schedule_in(delay, "retry_backoff_done", self.id,
                                    lambda: self._begin_attempt(self.sim.engine.now))

    def _finish_head(self) -> None:
        self.queue.popleft()
        self.tx_attempts = 0
        if self.queue:
            self._begin_attempt(self.sim.engine.now)
        else:
            self.state = IDLE


class BaselineGateway:
    """Receiver side: records first deliveries, acknowledges on the downlink.

    Acks are served in arrival order; an ack whose transmission cannot both
    start after the receiver opens its window and finish strictly before the
    window closes is dropped without spending any duty budget.
    """

    def __init__(self, sim) -> None:
        self.sim = sim
        self._queue: deque[tuple[int, int, int, int]] = deque()  # node, pkt, t_rx, window_end
        self._tx_busy = False

    def on_frame(self, frame: Frame) -> None:
        if frame.kind != DATA:
            return
        self.sim.packet_delivered(frame.app_packet_id, frame.t_end)
        if not self.sim.cfg.confirmed:
            return
        window_end = frame.t_end + self.sim.rx_delay_us + self.sim.ack_airtime_us \
            + self.sim.ack_margin_us
        self._queue.append((frame.src, frame.app_packet_id, frame.t_end, window_end))
        self._process()

    def _process(self) -> None:
        if self._tx_busy:
            return
        sim = self.sim
        while self._queue:
            node, pkt, t_rx, window_end = self._queue.popleft()
            earliest = max(sim.engine.now, t_rx + sim.rx_delay_us)
            t_ack = sim.earliest_tx(GATEWAY, sim.ack_channel, earliest, sim.ack_airtime_us)
            if t_ack + sim.ack_airtime_us >= window_end:
                continue  # cannot fit in the receiver's window: skip, sender retransmits
            self._tx_busy = True
            sim.engine.schedule(t_ack, "gw_ack_tx", GATEWAY,
                                lambda n=node, p=pkt: self._send(n, p))
            return

    def _send(self, node: int, pkt: int) -> None:
        now = self.sim.engine.now
        self.sim.transmit(Frame(
            src=GATEWAY, dst=node, channel=self.sim.ack_channel,
            payload_bytes=self.sim.cfg.ack_bytes, kind=ACK,
            t_start=now, t_end=now + self.sim.ack_airtime_us,
            app_packet_id=pkt,
        ))

    def on_tx_end(self, frame: Frame) -> None:
        self._tx_busy = False
        self._process()
