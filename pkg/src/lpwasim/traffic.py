"""Application traffic generation.

"Network load" is the aggregate packet rate across the whole network, so the
per-node arrival rate is network_load / n_nodes and the superposition of the
per-node Poisson processes is Poisson(network_load).  A bursty mode generates
bursts of several packets at once while preserving the aggregate rate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .engine import US_PER_S, RngStreams

POISSON = "poisson"
BURSTY = "bursty"


@dataclass(frozen=True)
class TrafficSpec:
    mode: str = POISSON
    network_load: float = 4.5   # packets per second, aggregate
    n_nodes: int = 50
    burst_size: int = 1         # bursty mode: packets per burst
    burst_interval_s: float | None = None  # bursty mode: mean gap between a
    # node's bursts; None derives it from network_load so the aggregate
    # packet rate is preserved

    def __post_init__(self) -> None:
        if self.mode not in (POISSON, BURSTY):
            raise ValueError(f"unknown traffic mode: {self.mode}")
        if self.n_nodes < 1:
            raise ValueError("n_nodes must be >= 1")
        if self.network_load <= 0:
            raise ValueError("network_load must be > 0")
        if self.burst_size < 1:
            raise ValueError("burst_size must be >= 1")
        if self.burst_interval_s is not None and self.burst_interval_s <= 0:
            raise ValueError("burst_interval_s must be > 0")


def node_arrival_times_us(spec: TrafficSpec, node_index: int, horizon_us: int,
                          streams: RngStreams) -> np.ndarray:
    """Arrival instants (integer us, strictly within the horizon) for one node.

    Exponential inter-arrival times at rate network_load / n_nodes; in bursty
    mode each arrival event carries burst_size packets at the same instant and
    the event rate is scaled down to keep the aggregate packet rate.
    """
    if horizon_us <= 0:
        return np.empty(0, dtype=np.int64)
    rng = streams.numpy_stream("traffic", node_index)
    event_rate = spec.network_load / spec.n_nodes
    if spec.mode == BURSTY:
        if spec.burst_interval_s is not None:
            event_rate = 1.0 / spec.burst_interval_s
        else:
            event_rate /= spec.burst_size
    mean_us = US_PER_S / event_rate
    times: list[np.ndarray] = []
    t = 0.0
    # Draw in chunks until past the horizon; chunking keeps the stream
    # deterministic regardless of the horizon value.
    chunk = max(16, int(horizon_us / mean_us * 1.2) + 16)
    while t < horizon_us:
        gaps = rng.exponential(mean_us, size=chunk)
        cum = t + np.cumsum(gaps)
        times.append(cum)
        t = float(cum[-1])
    all_times = np.concatenate(times)
    arrivals = all_times[all_times < horizon_us].astype(np.int64)
    if spec.mode == BURSTY:
        arrivals = np.repeat(arrivals, spec.burst_size)
    return arrivals


def all_arrivals(spec: TrafficSpec, horizon_us: int, streams: RngStreams
                 ) -> list[np.ndarray]:
    """Per-node arrival arrays, index 0 = first node."""
    return [node_arrival_times_us(spec, i, horizon_us, streams)
            for i in range(spec.n_nodes)]
