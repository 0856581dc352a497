"""Experiment configuration: defaults, validation, YAML round-trip, presets.

An empty config reproduces the reference regime: 3 uplink + 1 downlink
channel under 1% duty cycle, 40-byte payloads at SF7/125 kHz (82.176 ms on
air), Poisson traffic at 4.5 packets per second over 50 nodes.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

import yaml

LPWA_MAC = "lpwa-mac"
LORAWAN = "lorawan"
PROTOCOLS = (LPWA_MAC, LORAWAN)


class ConfigError(ValueError):
    """Invalid configuration; message names the offending field."""


@dataclass
class ExperimentConfig:
    # run identity
    protocol: str = LPWA_MAC
    n_nodes: int = 50
    network_load: float = 4.5        # packets per second, aggregate
    horizon_s: float = 4000.0
    seed: int = 1
    warmup_frac: float = 0.05        # generation transient excluded from summaries

    # traffic
    traffic_mode: str = "poisson"    # poisson | bursty
    burst_size: int = 4              # bursty mode only
    burst_interval_s: float | None = None  # bursty mode; None keeps the aggregate rate

    # radio
    spreading_factor: int = 7
    bandwidth_hz: int = 125_000
    coding_rate: int = 1
    preamble_symbols: int = 8
    explicit_header: bool = True
    crc_on: bool = True
    low_data_rate_optimize: bool | None = None
    payload_bytes: int = 40

    # channel plan and regulation
    n_uplink_channels: int = 3
    n_downlink_channels: int = 1
    duty_cycle_limit: float | None = 0.01     # per uplink channel, None disables
    gateway_duty_cycle: float | None = 0.01   # the gateway's own limit per channel
    duty_window_s: float = 3600.0

    # request/grant protocol constants
    request_bytes: int = 12
    grant_bytes: int = 16
    ack_bytes: int = 8
    request_timeout_s: float = 0.5
    request_backoff_base_s: float = 0.1
    max_request_retries: int = 8
    drop_on_request_exhaustion: bool = False  # True: abandon covered packets instead
    max_slots_per_grant: int = 64
    slot_guard_s: float = 0.010
    grant_turnaround_s: float = 0.050
    grant_horizon_s: float = 60.0
    grants_on_request_channel: bool = False
    data_acks: bool = False

    # baseline protocol constants
    confirmed: bool = True
    max_retransmissions: int = 8
    rx_delay_s: float = 1.0
    ack_window_margin_s: float = 0.1
    retransmit_backoff_s: tuple[float, float] = (1.0, 3.0)

    # node-side queueing
    queue_capacity: int = 64

    def validate(self) -> None:
        c = self
        checks = [
            (c.protocol in PROTOCOLS, "protocol", f"must be one of {PROTOCOLS}, got {c.protocol!r}"),
            (c.n_nodes >= 1, "n_nodes", "must be >= 1"),
            (c.network_load > 0, "network_load", "must be > 0"),
            (c.horizon_s >= 0, "horizon_s", "must be >= 0"),
            (0 <= c.warmup_frac < 1, "warmup_frac", "must be in [0, 1)"),
            (c.traffic_mode in ("poisson", "bursty"), "traffic_mode", "must be poisson or bursty"),
            (c.burst_size >= 1, "burst_size", "must be >= 1"),
            (c.burst_interval_s is None or c.burst_interval_s > 0,
             "burst_interval_s", "must be > 0 or null"),
            (7 <= c.spreading_factor <= 12, "spreading_factor", "must be in [7, 12]"),
            (c.bandwidth_hz > 0, "bandwidth_hz", "must be > 0"),
            (1 <= c.coding_rate <= 4, "coding_rate", "must be in [1, 4]"),
            (c.payload_bytes >= 0, "payload_bytes", "must be >= 0"),
            (c.n_uplink_channels >= 1, "n_uplink_channels", "must be >= 1"),
            (c.n_downlink_channels >= 0, "n_downlink_channels", "must be >= 0"),
            (c.duty_cycle_limit is None or 0 < c.duty_cycle_limit <= 1,
             "duty_cycle_limit", "must be in (0, 1] or null"),
            (c.gateway_duty_cycle is None or 0 < c.gateway_duty_cycle <= 1,
             "gateway_duty_cycle", "must be in (0, 1] or null"),
            (c.duty_window_s > 0, "duty_window_s", "must be > 0"),
            (c.request_timeout_s > 0, "request_timeout_s", "must be > 0"),
            (c.request_backoff_base_s > 0, "request_backoff_base_s", "must be > 0"),
            (c.max_request_retries >= 1, "max_request_retries", "must be >= 1"),
            (c.max_slots_per_grant >= 1, "max_slots_per_grant", "must be >= 1"),
            (c.slot_guard_s >= 0, "slot_guard_s", "must be >= 0"),
            (c.grant_turnaround_s >= 0, "grant_turnaround_s", "must be >= 0"),
            (c.grant_horizon_s >= 0, "grant_horizon_s", "must be >= 0"),
            (c.max_retransmissions >= 0, "max_retransmissions", "must be >= 0"),
            (c.rx_delay_s >= 0, "rx_delay_s", "must be >= 0"),
            (c.ack_window_margin_s >= 0, "ack_window_margin_s", "must be >= 0"),
            (len(c.retransmit_backoff_s) == 2
             and 0 <= c.retransmit_backoff_s[0] <= c.retransmit_backoff_s[1],
             "retransmit_backoff_s", "must be a (low, high) pair with 0 <= low <= high"),
            (c.queue_capacity >= 1, "queue_capacity", "must be >= 1"),
        ]
        for ok, name, msg in checks:
            if not ok:
                raise ConfigError(f"{name}: {msg}")
        if c.protocol == LPWA_MAC and c.n_uplink_channels < 2:
            raise ConfigError(
                "n_uplink_channels: lpwa-mac needs at least 2 uplink channels "
                "(one request channel plus data channels)")
        if c.protocol == LPWA_MAC and c.n_downlink_channels < 1 \
                and not c.grants_on_request_channel:
            raise ConfigError(
                "n_downlink_channels: lpwa-mac needs a downlink channel for grants "
                "unless grants_on_request_channel is set")
        if c.protocol == LORAWAN and c.confirmed and c.n_downlink_channels < 1:
            raise ConfigError(
                "n_downlink_channels: confirmed lorawan traffic needs a downlink "
                "channel for acknowledgements")

    # -- serialisation -------------------------------------------------------

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["retransmit_backoff_s"] = list(self.retransmit_backoff_s)
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"{sorted(unknown)[0]}: unknown configuration key")
        kwargs = dict(data)
        if "retransmit_backoff_s" in kwargs:
            kwargs["retransmit_backoff_s"] = tuple(kwargs["retransmit_backoff_s"])
        try:
            cfg = cls(**kwargs)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc
        cfg.validate()
        return cfg

    def replace(self, **kwargs) -> "ExperimentConfig":
        return dataclasses.replace(self, **kwargs)


def load_config(path) -> ExperimentConfig:
    with open(path) as fh:
        data = yaml.safe_load(fh) or {}
    if not isinstance(data, dict):
        raise ConfigError(f"config file {path} must contain a mapping")
    return ExperimentConfig.from_dict(data)


def save_config(cfg: ExperimentConfig, path) -> None:
    with open(path, "w") as fh:
        yaml.safe_dump(cfg.to_dict(), fh, sort_keys=True, default_flow_style=False)


# -- sweeps -------------------------------------------------------------------

@dataclass
class SweepSpec:
    base: ExperimentConfig
    parameter: str                    # "network_load" or "n_nodes"
    values: list = field(default_factory=list)
    seeds_per_point: int = 10
    protocols: tuple[str, ...] = ()   # empty: just the base config's protocol

    def __post_init__(self) -> None:
        if self.parameter not in ("network_load", "n_nodes"):
            raise ConfigError("parameter: sweep parameter must be network_load or n_nodes")
        if not self.values:
            raise ConfigError("values: sweep value list must not be empty")
        if self.seeds_per_point < 1:
            raise ConfigError("seeds_per_point: must be >= 1")
        if not self.protocols:
            self.protocols = (self.base.protocol,)
        for p in self.protocols:
            if p not in PROTOCOLS:
                raise ConfigError(f"protocols: must be drawn from {PROTOCOLS}, got {p!r}")

    def points(self):
        """Yield every (protocol, value, seed, config) of the sweep."""
        for protocol in self.protocols:
            for value in self.values:
                for seed in range(1, self.seeds_per_point + 1):
                    cfg = self.base.replace(protocol=protocol, seed=seed,
                                            **{self.parameter: value})
                    yield protocol, value, seed, cfg


FIG1_LOADS = [2.5, 4.5, 6.5, 8.5, 10.0]
FIG2_SIZES = [25, 50, 100, 150, 200]


def preset(name: str, base: ExperimentConfig | None = None,
           seeds_per_point: int = 10) -> SweepSpec:
    """Bundled sweeps: "fig1" varies load at 50 nodes, "fig2" varies the
    number of nodes at 4.5 packets per second; both run both protocols."""
    base = base or ExperimentConfig()
    if name == "fig1":
        return SweepSpec(base=base.replace(n_nodes=50), parameter="network_load",
                         values=list(FIG1_LOADS), seeds_per_point=seeds_per_point,
                         protocols=PROTOCOLS)
    if name == "fig2":
        return SweepSpec(base=base.replace(network_load=4.5), parameter="n_nodes",
                         values=list(FIG2_SIZES), seeds_per_point=seeds_per_point,
                         protocols=PROTOCOLS)
    raise ConfigError(f"preset: unknown preset {name!r} (available: fig1, fig2)")
