"""Validate the collision model against pure-ALOHA theory.

With acknowledgements off, the duty cycle disabled and a single channel,
the baseline reduces to textbook unslotted ALOHA: normalized throughput
should follow S = G * exp(-2G), peaking at S ~ 0.184 when G = 0.5.  This is
the closed-form anchor for the whole collision model; a few percent of
finite-population bias is expected with 1000 nodes.
"""

import math

from lpwasim import ExperimentConfig, execute

AIR_S = 82_176 / 1e6
FRAMES_TARGET = 100_000

print(f"{'G target':>9s} {'offered':>8s} {'G meas':>7s} {'S meas':>7s} "
      f"{'G e^-2G':>8s} {'rel err':>8s}")
for g_target in (0.1, 0.25, 0.5, 0.75, 1.0, 1.5):
    load = g_target / AIR_S
    cfg = ExperimentConfig(protocol="lorawan", confirmed=False, n_nodes=1000,
                           n_uplink_channels=1, duty_cycle_limit=None,
                           gateway_duty_cycle=None, network_load=load,
                           horizon_s=FRAMES_TARGET / load, warmup_frac=0.0,
                           seed=5)
    sim = execute(cfg).sim
    data = [f for f in sim.frames if f.kind == "data"]
    g_hat = sum(f.airtime_us for f in data) / sim.horizon_us
    s_hat = sum(f.airtime_us for f in data if f.delivered) / sim.horizon_us
    s_theory = g_hat * math.exp(-2 * g_hat)
    print(f"{g_target:9.2f} {len(data):8d} {g_hat:7.3f} {s_hat:7.4f} "
          f"{s_theory:8.4f} {(s_hat - s_theory) / s_theory * 100:+7.2f}%")

print()
print("Throughput rises to ~0.18 at G = 0.5 and decays beyond: offering the")
print("channel more traffic destroys more than it carries.  This saturation")
print("is exactly what the request/grant MAC sidesteps by scheduling.")
