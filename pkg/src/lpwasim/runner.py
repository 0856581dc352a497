"""Experiment runner: single runs and parameter sweeps with CSV artifacts.

A run writes packets.csv, summary.csv, the effective (defaults-applied)
configuration and optionally frames.csv into its output directory; a rerun
with the identical config and seed produces byte-identical files.  Sweeps
write one results row per (protocol, swept value, seed) plus per-point
aggregates, and their output is independent of the execution order of the
points (rows are sorted before writing, points may run in parallel).
"""

from __future__ import annotations

import csv
import math
import multiprocessing
import os
from dataclasses import dataclass

import numpy as np

from .config import ExperimentConfig, SweepSpec, save_config
from .metrics import (MetricsSummary, format_float, write_frame_csv,
                      write_packet_csv)
from .simulation import Simulation


def summary_header(n_channels: int) -> list[str]:
    return (["protocol", "n_nodes", "network_load", "seed", "mean_e2e_delay_s",
             "delivery_ratio", "generated", "delivered", "dropped"]
            + [f"util_ch{i}" for i in range(n_channels)])


def summary_row(cfg: ExperimentConfig, s: MetricsSummary) -> list:
    utils = [format_float(s.channel_utilization[ch])
             for ch in sorted(s.channel_utilization)]
    return [cfg.protocol, cfg.n_nodes, format_float(cfg.network_load), cfg.seed,
            format_float(s.mean_e2e_delay_s), format_float(s.delivery_ratio),
            s.generated, s.delivered, s.dropped] + utils


@dataclass
class RunResult:
    config: ExperimentConfig
    summary: MetricsSummary
    sim: Simulation


def execute(cfg: ExperimentConfig, trace=None) -> RunResult:
    """Validate, simulate, summarise; no files touched."""
    cfg.validate()
    sim = Simulation(cfg, trace=trace).run()
    return RunResult(config=cfg, summary=sim.summary(), sim=sim)


def run(cfg: ExperimentConfig, outdir=None, write_frames: bool = False,
        trace_path=None) -> RunResult:
    """Execute one run and, if outdir is given, persist its artifacts."""
    if outdir is not None:
        os.makedirs(outdir, exist_ok=True)
    trace_fh = None
    trace = None
    if trace_path is not None:
        trace_fh = open(trace_path, "w")
        trace = lambda t, kind, target: trace_fh.write(f"{t} {kind} {target}\n")
    try:
        result = execute(cfg, trace=trace)
    finally:
        if trace_fh is not None:
            trace_fh.close()
    if outdir is not None:
        save_config(cfg, os.path.join(outdir, "effective_config.yaml"))
        write_packet_csv(os.path.join(outdir, "packets.csv"),
                         [result.sim.records[k] for k in sorted(result.sim.records)])
        if write_frames:
            write_frame_csv(os.path.join(outdir, "frames.csv"), result.sim.frames)
        with open(os.path.join(outdir, "summary.csv"), "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(summary_header(len(result.summary.channel_utilization)))
            w.writerow(summary_row(cfg, result.summary))
    return result


# -- sweeps ---------------------------------------------------------------------

def _sweep_point(args):
    protocol, value, seed, cfg = args
    try:
        result = execute(cfg)
        return protocol, value, seed, summary_row(cfg, result.summary), None
    except Exception as exc:  # a failed point must not kill the sweep
        return protocol, value, seed, None, f"{type(exc).__name__}: {exc}"


def sweep(spec: SweepSpec, outdir=None, jobs: int = 1):
    """Run every point of the sweep; returns (rows, aggregates, errors).

    rows: one summary row per successful (protocol, value, seed).
    aggregates: per (protocol, value) mean and standard deviation across
    seeds of the delay and delivery-ratio columns.
    errors: (protocol, value, seed, message) for failed points.
    """
    points = list(spec.points())
    if jobs > 1:
        with multiprocessing.Pool(jobs) as pool:
            outcomes = pool.map(_sweep_point, points)
    else:
        outcomes = [_sweep_point(p) for p in points]

    outcomes.sort(key=lambda o: (o[0], o[1], o[2]))
    rows = [o[3] for o in outcomes if o[3] is not None]
    errors = [(o[0], o[1], o[2], o[4]) for o in outcomes if o[4] is not None]

    def _mean_std(values):
        arr = np.asarray(values, dtype=float)
        arr = arr[~np.isnan(arr)]
        if not arr.size:
            return math.nan, math.nan
        return float(arr.mean()), float(arr.std())

    aggregates = []
    for protocol in spec.protocols:
        for value in spec.values:
            delays, ratios = [], []
            for p, v, _, row, err in outcomes:
                if row is not None and p == protocol and v == value:
                    delays.append(float(row[4]))
                    ratios.append(float(row[5]))
            if not delays:
                continue
            d_mean, d_std = _mean_std(delays)
            r_mean, r_std = _mean_std(ratios)
            aggregates.append([
                protocol, value, len(delays),
                format_float(d_mean), format_float(d_std),
                format_float(r_mean), format_float(r_std),
            ])

    if outdir is not None:
        os.makedirs(outdir, exist_ok=True)
        save_config(spec.base, os.path.join(outdir, "base_config.yaml"))
        n_channels = spec.base.n_uplink_channels + spec.base.n_downlink_channels
        with open(os.path.join(outdir, "results.csv"), "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(summary_header(n_channels))
            w.writerows(rows)
        with open(os.path.join(outdir, "aggregates.csv"), "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow([ "protocol", spec.parameter, "seeds",
                         "mean_e2e_delay_s_mean", "mean_e2e_delay_s_std",
                         "delivery_ratio_mean", "delivery_ratio_std"])
            w.writerows(aggregates)
        if errors:
            with open(os.path.join(outdir, "errors.csv"), "w", newline="") as fh:
                w = csv.writer(fh)
                w.writerow(["protocol", spec.parameter, "seed", "error"])
                w.writerows(errors)
    return rows, aggregates, errors
