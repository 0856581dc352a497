"""Acceptance suite: every exit criterion, one printed pass/fail line each.

Run with `pytest tests/test_acceptance.py -s` to see the lines as they
complete.  The bundled fig1/fig2 sweeps (2 protocols x 5 points x 10 seeds
each) execute once in a session fixture and feed criteria 4-7 and 9; budget
a few minutes of wall time for the whole module.
"""

import math
import multiprocessing

import pytest

from lpwasim import (ExperimentConfig, data_collision_pairs, duty_cycle_audit,
                     execute, parallel_overlap_exists, preset, run)
from lpwasim.config import FIG1_LOADS, FIG2_SIZES
from lpwasim.phy import DutyCycleLedger, RadioParams, airtime_us

SEEDS_PER_POINT = 10


def report(criterion: str, ok: bool, detail: str) -> bool:
    print(f"{'PASS' if ok else 'FAIL'} {criterion}: {detail}")
    return ok


# --------------------------------------------------------------------------
# Criteria 1 and 2: instant unit checks
# --------------------------------------------------------------------------

def test_criterion_1_airtime_calibration():
    got = airtime_us(40, RadioParams(spreading_factor=7, bandwidth_hz=125_000,
                                     coding_rate=1, preamble_symbols=8,
                                     explicit_header=True, crc_on=True))
    assert report("criterion-1 airtime calibration",
                  got == 82_176, f"airtime(40 B, SF7) = {got} us (want 82176)")


def test_criterion_2_duty_cycle_off_time():
    led = DutyCycleLedger()
    t_end = 82_176
    led.record(1, 0, 0, t_end)
    got = led.earliest_start(1, 0, t_end, 82_176, 0.01)
    want = t_end + 8_135_424
    assert report("criterion-2 duty off-time",
                  got == want, f"earliest next start = {got} us (want {want})")


# --------------------------------------------------------------------------
# Criterion 3: pure-ALOHA analytical oracle
# --------------------------------------------------------------------------

def _aloha_point(g_target: float, seed: int):
    air_s = 82_176 / 1e6
    load = g_target / air_s
    cfg = ExperimentConfig(protocol="lorawan", confirmed=False, n_nodes=1000,
                           n_uplink_channels=1, duty_cycle_limit=None,
                           gateway_duty_cycle=None, network_load=load,
                           horizon_s=104_000 / load, warmup_frac=0.0, seed=seed)
    sim = execute(cfg).sim
    data = [f for f in sim.frames if f.kind == "data"]
    g_hat = sum(f.airtime_us for f in data) / sim.horizon_us
    s_hat = sum(f.airtime_us for f in data if f.delivered) / sim.horizon_us
    return len(data), g_hat, s_hat


def test_criterion_3_aloha_throughput_oracle():
    ok_all = True
    details = []
    for g_target in (0.25, 0.5, 1.0):
        offered, g_hat, s_hat = _aloha_point(g_target, seed=5)
        s_theory = g_hat * math.exp(-2 * g_hat)
        rel = abs(s_hat - s_theory) / s_theory
        ok_all &= offered >= 100_000 and rel <= 0.05
        details.append(f"G={g_hat:.3f}: S={s_hat:.4f} vs Ge^-2G={s_theory:.4f} "
                       f"({rel * 100:.1f}%)")
    assert report("criterion-3 ALOHA oracle", ok_all, "; ".join(details))


# --------------------------------------------------------------------------
# Criteria 4-7, 9: full fig1 + fig2 presets, executed once
# --------------------------------------------------------------------------

def _preset_point(args):
    name, protocol, value, seed, cfg = args
    sim = execute(cfg).sim
    s = sim.summary()
    worst, violations = duty_cycle_audit(
        sim.frames, lambda src, ch: sim.tx_limit(src, ch), sim.duty_window_us)
    return {
        "preset": name, "protocol": protocol, "value": value, "seed": seed,
        "delay": s.mean_e2e_delay_s, "ratio": s.delivery_ratio,
        "data_collisions": len(data_collision_pairs(sim.frames)),
        "duty_violations": len(violations), "worst_duty": float(worst),
        "parallel": parallel_overlap_exists(sim.frames),
    }


@pytest.fixture(scope="module")
def preset_rows():
    points = []
    for name in ("fig1", "fig2"):
        for protocol, value, seed, cfg in preset(name, seeds_per_point=SEEDS_PER_POINT).points():
            points.append((name, protocol, value, seed, cfg))
    with multiprocessing.Pool(2) as pool:
        return pool.map(_preset_point, points)


def _mean(rows, **filters):
    sel = [r for r in rows if all(r[k] == v for k, v in filters.items())]
    assert sel, filters
    return {key: sum(r[key] for r in sel) / len(sel) for key in ("delay", "ratio")}


def test_criterion_4_zero_data_collisions(preset_rows):
    lpwa = [r for r in preset_rows if r["protocol"] == "lpwa-mac"]
    total = sum(r["data_collisions"] for r in lpwa)
    assert report("criterion-4 zero data collisions",
                  total == 0,
                  f"{total} overlapping data-frame pairs across "
                  f"{len(lpwa)} scheduled-MAC preset runs")


def test_criterion_5_duty_cycle_compliance(preset_rows):
    total = sum(r["duty_violations"] for r in preset_rows)
    worst = max(r["worst_duty"] for r in preset_rows)
    assert report("criterion-5 duty compliance",
                  total == 0,
                  f"{total} violations; worst 1-hour window utilization "
                  f"{worst * 100:.4f}% across all {len(preset_rows)} preset runs "
                  f"(every transmitter limited to 1%)")


def test_criterion_6_delay_comparison(preset_rows):
    fig1 = [r for r in preset_rows if r["preset"] == "fig1"]
    clauses_ok = True
    details = []
    for load in FIG1_LOADS:
        d_lpwa = _mean(fig1, protocol="lpwa-mac", value=load)["delay"]
        d_base = _mean(fig1, protocol="lorawan", value=load)["delay"]
        clauses_ok &= d_lpwa < d_base
        details.append(f"load {load}: {d_lpwa:.0f}s vs {d_base:.0f}s "
                       f"(-{(1 - d_lpwa / d_base) * 100:.0f}%)")
    d_lpwa10 = _mean(fig1, protocol="lpwa-mac", value=10.0)["delay"]
    d_base10 = _mean(fig1, protocol="lorawan", value=10.0)["delay"]
    reduction10 = 1 - d_lpwa10 / d_base10
    clauses_ok &= reduction10 >= 0.5
    assert report("criterion-6 delay reproduction", clauses_ok,
                  "; ".join(details) + f"; at 10 pkt/s reduction "
                  f"{reduction10 * 100:.1f}% (need >=50%)")


def test_criterion_7_throughput_comparison(preset_rows):
    fig2 = [r for r in preset_rows if r["preset"] == "fig2"]
    clauses_ok = True
    details = []
    for size in FIG2_SIZES:
        r_lpwa = _mean(fig2, protocol="lpwa-mac", value=size)["ratio"]
        r_base = _mean(fig2, protocol="lorawan", value=size)["ratio"]
        clauses_ok &= r_lpwa >= r_base
        details.append(f"n={size}: {r_lpwa:.3f} vs {r_base:.3f}")
    r_lpwa200 = _mean(fig2, protocol="lpwa-mac", value=200)["ratio"]
    r_base200 = _mean(fig2, protocol="lorawan", value=200)["ratio"]
    gain200 = r_lpwa200 / r_base200 - 1
    clauses_ok &= gain200 >= 0.5
    assert report(
        "criterion-7 throughput reproduction", clauses_ok,
        "; ".join(details) + f"; at 200 nodes improvement {gain200 * 100:.1f}% "
        f"(need >=50%). NOTE: the loss-free radio model recovers the ALOHA "
        f"baseline to ~0.67 delivery via 8 retransmissions, capping the "
        f"improvement near 47%; see the delivery dominance at every size above.")


def test_criterion_9_parallel_operation(preset_rows):
    candidates = [r for r in preset_rows
                  if r["protocol"] == "lpwa-mac" and r["preset"] == "fig1"
                  and r["value"] >= 4.5]
    n_with = sum(1 for r in candidates if r["parallel"])
    assert report("criterion-9 parallel operation",
                  n_with > 0,
                  f"{n_with}/{len(candidates)} scheduled-MAC runs at >=4.5 pkt/s "
                  f"show data frames overlapping request/grant traffic on "
                  f"another channel")


# --------------------------------------------------------------------------
# Criterion 8: bit-identical reruns
# --------------------------------------------------------------------------

def test_criterion_8_determinism(tmp_path):
    ok = True
    for protocol in ("lpwa-mac", "lorawan"):
        cfg = ExperimentConfig(protocol=protocol, n_nodes=50, network_load=4.5,
                               horizon_s=300.0, seed=7)
        out_a, out_b = tmp_path / f"{protocol}-a", tmp_path / f"{protocol}-b"
        run(cfg, outdir=out_a, write_frames=True)
        run(cfg, outdir=out_b, write_frames=True)
        for name in ("packets.csv", "summary.csv", "frames.csv"):
            ok &= (out_a / name).read_bytes() == (out_b / name).read_bytes()
    assert report("criterion-8 determinism", ok,
                  "repeated runs produce byte-identical packet, frame and "
                  "summary CSVs for both protocols")
