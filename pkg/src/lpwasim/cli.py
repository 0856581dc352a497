"""Command-line experiment harness: `lpwasim run` and `lpwasim sweep`."""

from __future__ import annotations

import argparse
import os
import sys

from .config import (ConfigError, ExperimentConfig, SweepSpec, load_config,
                     preset)
from .runner import run, sweep


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lpwasim",
        description="Discrete-event comparison of a request/grant LPWA MAC "
                    "against a pure-ALOHA LoRaWAN-style baseline.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute a single run")
    p_run.add_argument("--config", help="YAML config file (defaults apply for missing keys)")
    p_run.add_argument("--out", required=True, help="output directory for CSV artifacts")
    p_run.add_argument("--seed", type=int, help="override the seed")
    p_run.add_argument("--protocol", choices=["lpwa-mac", "lorawan"],
                       help="override the protocol")
    p_run.add_argument("--frame-log", action="store_true",
                       help="also write frames.csv")
    p_run.add_argument("--trace", action="store_true",
                       help="write an event trace (one line per dispatched event)")

    p_sweep = sub.add_parser("sweep", help="execute a parameter sweep")
    p_sweep.add_argument("--config", help="YAML base config file")
    p_sweep.add_argument("--out", required=True, help="output directory")
    p_sweep.add_argument("--preset", choices=["fig1", "fig2"],
                         help="bundled sweep: fig1 = loads at 50 nodes, "
                              "fig2 = sizes at 4.5 pkt/s, both protocols")
    p_sweep.add_argument("--param", choices=["network_load", "n_nodes"],
                         help="swept parameter (ignored with --preset)")
    p_sweep.add_argument("--values", help="comma-separated sweep values")
    p_sweep.add_argument("--seeds", type=int, default=10, help="seeds per point")
    p_sweep.add_argument("--protocol", choices=["lpwa-mac", "lorawan"],
                         help="restrict to one protocol (default: both for presets)")
    p_sweep.add_argument("--jobs", type=int, default=1,
                         help="run sweep points in parallel processes")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        base = load_config(args.config) if args.config else ExperimentConfig()
        if args.command == "run":
            if args.seed is not None:
                base = base.replace(seed=args.seed)
            if args.protocol:
                base = base.replace(protocol=args.protocol)
            base.validate()
            trace_path = os.path.join(args.out, "trace.log") if args.trace else None
            result = run(base, outdir=args.out, write_frames=args.frame_log,
                         trace_path=trace_path)
            s = result.summary
            print(f"generated={s.generated} delivered={s.delivered} "
                  f"dropped={s.dropped} in_flight={s.in_flight} "
                  f"delivery_ratio={s.delivery_ratio:.4f} "
                  f"mean_e2e_delay_s={s.mean_e2e_delay_s:.6f}")
            return 0
        # sweep
        if args.preset:
            spec = preset(args.preset, base, seeds_per_point=args.seeds)
            if args.protocol:
                spec.protocols = (args.protocol,)
        else:
            if not args.param or not args.values:
                raise ConfigError("param/values: required unless --preset is used")
            values = []
            for raw in args.values.split(","):
                values.append(int(raw) if args.param == "n_nodes" else float(raw))
            protocols = (args.protocol,) if args.protocol else ()
            spec = SweepSpec(base=base, parameter=args.param, values=values,
                             seeds_per_point=args.seeds, protocols=protocols)
        rows, aggregates, errors = sweep(spec, outdir=args.out, jobs=args.jobs)
        print(f"{len(rows)} rows, {len(aggregates)} aggregate points, "
              f"{len(errors)} failed points -> {args.out}")
        return 0
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
