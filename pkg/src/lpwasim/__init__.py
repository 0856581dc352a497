"""lpwasim: deterministic discrete-event comparison of LPWA MAC protocols.

A request/grant MAC with gateway-side slot scheduling (protocol "lpwa-mac")
is compared against a confirmed pure-ALOHA baseline ("lorawan") on a shared
LoRa physical layer: exact integer-microsecond airtime, orthogonal channels
with destructive collisions, and per-transmitter duty-cycle regulation.
"""

from .checks import data_collision_pairs, duty_cycle_audit, parallel_overlap_exists
from .config import (ConfigError, ExperimentConfig, SweepSpec, load_config,
                     preset, save_config)
from .engine import Engine, RngStreams, SimulationError, us
from .metrics import (FrameRecord, MetricsSummary, PacketRecord,
                      compute_metrics, read_frame_csv, read_packet_csv,
                      write_frame_csv, write_packet_csv)
from .phy import (Channel, DutyCycleLedger, Frame, Medium, RadioParams,
                  airtime_us, payload_symbols)
from .runner import RunResult, execute, run, sweep
from .simulation import GATEWAY, Simulation
from .traffic import TrafficSpec, all_arrivals, node_arrival_times_us

__version__ = "0.1.0"

__all__ = [
    "Channel", "ConfigError", "DutyCycleLedger", "Engine", "ExperimentConfig",
    "Frame", "FrameRecord", "GATEWAY", "Medium", "MetricsSummary",
    "PacketRecord", "RadioParams", "RngStreams", "RunResult", "Simulation",
    "SimulationError", "SweepSpec", "TrafficSpec", "airtime_us",
    "all_arrivals", "compute_metrics", "data_collision_pairs",
    "duty_cycle_audit", "execute", "load_config", "node_arrival_times_us",
    "parallel_overlap_exists", "payload_symbols", "preset", "read_frame_csv",
    "read_packet_csv", "run", "save_config", "sweep", "us",
    "write_frame_csv", "write_packet_csv",
]
