"""Delivery ratio versus network size at 4.5 packets per second.

Sweeps the number of nodes from 25 to 200 at a fixed aggregate load for both
protocols.  Aggregate load means the per-node rate falls as the network
grows, so the baseline's fate is set by collisions and ack starvation rather
than per-node duty pressure.  Reduced seeds/horizon for desk runtime; the
full experiment is the `fig2` preset:

    lpwasim sweep --preset fig2 --out results/fig2
"""

from lpwasim import ExperimentConfig, SweepSpec, sweep

base = ExperimentConfig(network_load=4.5, horizon_s=1000.0)
spec = SweepSpec(base=base, parameter="n_nodes",
                 values=[25, 50, 100, 150, 200], seeds_per_point=2,
                 protocols=("lpwa-mac", "lorawan"))
rows, aggregates, errors = sweep(spec, jobs=2)

print(f"{'nodes':>6s} {'scheduled ratio':>16s} {'aloha ratio':>12s} {'gain':>8s}")
ratios = {(a[0], a[1]): float(a[5]) for a in aggregates}
for n in spec.values:
    r_sched = ratios[("lpwa-mac", n)]
    r_aloha = ratios[("lorawan", n)]
    print(f"{n:6d} {r_sched:16.3f} {r_aloha:12.3f} "
          f"{(r_sched / r_aloha - 1) * 100:+7.1f}%")

print()
print("Scheduled delivery stays near 1.0 at every size because granted slots")
print("cannot collide; the baseline's delivery follows its collision/backlog")
print("equilibrium, worst in small saturated networks.")
