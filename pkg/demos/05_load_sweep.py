"""Delay versus offered load at 50 nodes (desk-scale sweep).

Sweeps the aggregate network load from 2.5 to 10 packets per second for both
protocols and prints mean end-to-end delay per point.  Two seeds and a
shortened horizon keep this to roughly a minute of wall time; the full-size
experiment (4000 s horizon, 10 seeds) is the `fig1` preset:

    lpwasim sweep --preset fig1 --out results/fig1
"""

from lpwasim import ExperimentConfig, SweepSpec, sweep

base = ExperimentConfig(n_nodes=50, horizon_s=1000.0)
spec = SweepSpec(base=base, parameter="network_load",
                 values=[2.5, 4.5, 6.5, 8.5, 10.0], seeds_per_point=2,
                 protocols=("lpwa-mac", "lorawan"))
rows, aggregates, errors = sweep(spec, jobs=2)

print(f"{'load':>6s} {'scheduled delay':>16s} {'aloha delay':>12s} {'reduction':>10s}")
delays = {(a[0], a[1]): float(a[3]) for a in aggregates}
for load in spec.values:
    d_sched = delays[("lpwa-mac", load)]
    d_aloha = delays[("lorawan", load)]
    print(f"{load:6.1f} {d_sched:14.1f} s {d_aloha:10.1f} s "
          f"{(1 - d_sched / d_aloha) * 100:9.1f}%")

print()
print("The ALOHA baseline saturates early (per-node service time under ack")
print("starvation exceeds the inter-arrival time) and its delays pile up at")
print("the queue limit, while the scheduled MAC keeps a bounded grant cycle.")
print("Longer horizons deepen the contrast; see the fig1 preset.")
