"""One simulation run: engine, channel plan, duty accounting, traffic, MAC.

Entity ids: the gateway is 0, nodes are 1..n_nodes.  Channel ids: uplinks
come first (0..n_up-1), then downlinks.  Under the request/grant protocol
uplink 0 is reserved for requests and the remaining uplinks carry data;
the baseline uses every uplink for data.  Grants go out on the first
downlink channel unless grants_on_request_channel routes them onto the
request channel (where they then contend with uplink requests).
"""

from __future__ import annotations

from .config import LPWA_MAC, ExperimentConfig
from .engine import Engine, RngStreams, us
from .mac_lorawan import BaselineGateway, BaselineNode
from .mac_lpwa import LpwaGateway, LpwaNode
from .metrics import FrameRecord, MetricsSummary, PacketRecord, compute_metrics
from .phy import (Channel, DOWNLINK, DutyCycleLedger, Frame, Medium,
                  RadioParams, UPLINK, airtime_us)
from .traffic import TrafficSpec, node_arrival_times_us

GATEWAY = 0


class Simulation:
    def __init__(self, cfg: ExperimentConfig, trace=None) -> None:
        cfg.validate()
        self.cfg = cfg
        self.engine = Engine(trace)
        self.streams = RngStreams(cfg.seed)
        self.radio = RadioParams(
            spreading_factor=cfg.spreading_factor,
            bandwidth_hz=cfg.bandwidth_hz,
            coding_rate=cfg.coding_rate,
            preamble_symbols=cfg.preamble_symbols,
            explicit_header=cfg.explicit_header,
            crc_on=cfg.crc_on,
            low_data_rate_optimize=cfg.low_data_rate_optimize,
        )

        # channel plan
        n_up = cfg.n_uplink_channels
        self.channels: dict[int, Channel] = {}
        for i in range(n_up):
            self.channels[i] = Channel(i, UPLINK, cfg.duty_cycle_limit)
        for j in range(cfg.n_downlink_channels):
            self.channels[n_up + j] = Channel(n_up + j, DOWNLINK, cfg.gateway_duty_cycle)
        self.uplink_ids = list(range(n_up))
        self.downlink_ids = list(range(n_up, n_up + cfg.n_downlink_channels))

        # airtimes and protocol timing, all integer microseconds
        self.data_airtime_us = airtime_us(cfg.payload_bytes, self.radio)
        self.request_airtime_us = airtime_us(cfg.request_bytes, self.radio)
        self.grant_airtime_us = airtime_us(cfg.grant_bytes, self.radio)
        self.ack_airtime_us = airtime_us(cfg.ack_bytes, self.radio)
        self.slot_len_us = self.data_airtime_us + us(cfg.slot_guard_s)
        self.request_timeout_us = us(cfg.request_timeout_s)
        self.request_backoff_base_us = us(cfg.request_backoff_base_s)
        self.turnaround_us = us(cfg.grant_turnaround_s)
        self.grant_horizon_us = us(cfg.grant_horizon_s)
        self.rx_delay_us = us(cfg.rx_delay_s)
        self.ack_margin_us = us(cfg.ack_window_margin_s)
        self.retransmit_backoff_us = (us(cfg.retransmit_backoff_s[0]),
                                      us(cfg.retransmit_backoff_s[1]))
        self.duty_window_us = us(cfg.duty_window_s)
        self.horizon_us = us(cfg.horizon_s)

        self.duty = DutyCycleLedger(self.duty_window_us)
        self.medium = Medium(self.engine, self._frame_end)
        self.frames: list[FrameRecord] = []
        self.records: dict[int, PacketRecord] = {}
        self._next_pkt = 0

        # protocol entities
        if cfg.protocol == LPWA_MAC:
            self.request_channel = 0
            self.lpwa_data_channels = self.uplink_ids[1:]
            if cfg.grants_on_request_channel:
                self.grant_channel = self.request_channel
            else:
                self.grant_channel = self.downlink_ids[0]
            self.ack_channel = self.downlink_ids[0] if self.downlink_ids else self.grant_channel
            self.gateway = LpwaGateway(self)
            self.nodes = {i: LpwaNode(self, i) for i in range(1, cfg.n_nodes + 1)}
        else:
            self.baseline_data_channels = list(self.uplink_ids)
            self.ack_channel = self.downlink_ids[0] if self.downlink_ids else None
            self.gateway = BaselineGateway(self)
            self.nodes = {i: BaselineNode(self, i) for i in range(1, cfg.n_nodes + 1)}

        # traffic: arrival instants are pre-generated per node so that each
        # node's draw sequence is independent of everything else in the run
        spec = TrafficSpec(mode=cfg.traffic_mode, network_load=cfg.network_load,
                           n_nodes=cfg.n_nodes, burst_size=cfg.burst_size,
                           burst_interval_s=cfg.burst_interval_s)
        for idx, node_id in enumerate(self.nodes):
            for t in node_arrival_times_us(spec, idx, self.horizon_us, self.streams):
                self.engine.schedule(int(t), "packet_arrival", node_id,
                                     lambda n=node_id, tt=int(t): self._arrival(n, tt))

    # -- run ------------------------------------------------------------------

    def run(self) -> "Simulation":
        self.engine.run_until(self.horizon_us)
        return self

    def summary(self) -> MetricsSummary:
        return compute_metrics(self.records.values(), self.frames, self.horizon_us,
                               sorted(self.channels), self.cfg.warmup_frac)

    # -- services used by the MAC layers ---------------------------------------

    def channel_limit(self, channel_id: int) -> float | None:
        return self.channels[channel_id].duty_cycle_limit

    def tx_limit(self, entity: int, channel_id: int) -> float | None:
        if entity == GATEWAY:
            return self.cfg.gateway_duty_cycle
        return self.channels[channel_id].duty_cycle_limit

    def earliest_tx(self, entity: int, channel_id: int, t: int, duration_us: int) -> int:
        return self.duty.earliest_start(entity, channel_id, t, duration_us,
                                        self.tx_limit(entity, channel_id))

    def transmit(self, frame: Frame) -> None:
        self.medium.transmit(frame)
        self.duty.record(frame.src, frame.channel, frame.t_start, frame.t_end)

    def new_duty_ledger(self) -> DutyCycleLedger:
        return DutyCycleLedger(self.duty_window_us)

    def inject_packet(self, node_id: int, t: int) -> None:
        """Schedule a single application packet by hand (tests, demos)."""
        self.engine.schedule(t, "packet_arrival", node_id,
                             lambda: self._arrival(node_id, t))

    # -- packet lifecycle -------------------------------------------------------

    def _arrival(self, node_id: int, t: int) -> None:
        pkt = self._next_pkt
        self._next_pkt += 1
        self.records[pkt] = PacketRecord(packet_id=pkt, node_id=node_id,
                                         t_generated_us=t)
        self.nodes[node_id].on_packet_arrival(pkt, t)

    def packet_attempt(self, pkt: int) -> None:
        self.records[pkt].attempts += 1

    def packet_delivered(self, pkt: int, t: int) -> None:
        rec = self.records[pkt]
        if rec.t_delivered_us is None:  # duplicates deduplicated by packet id
            rec.t_delivered_us = t

    def packet_gave_up(self, pkt: int) -> None:
        self.records[pkt].dropped = True

    # -- frame completion -------------------------------------------------------

    def _frame_end(self, frame: Frame, delivered: bool) -> None:
        self.frames.append(FrameRecord(frame.t_start, frame.t_end, frame.channel,
                                       frame.kind, frame.src, frame.dst, delivered))
        sender = self.gateway if frame.src == GATEWAY else self.nodes[frame.src]
        sender.on_tx_end(frame)
        if not delivered:
            return  # nobody learns anything from a collided frame
        if frame.dst == GATEWAY:
            self.gateway.on_frame(frame)
        elif frame.dst in self.nodes:
            # A node busy transmitting cannot hear a frame addressed to it
            # (single half-duplex radio).
            if not self.medium.is_transmitting(frame.dst):
                self.nodes[frame.dst].on_frame(frame)
