#!/usr/bin/env python3
"""Oracle calibration runs behind the frozen acceptance thresholds.

Regenerates `calibration.json`: for every statistical acceptance criterion
whose tolerance is not a closed-form bound, this script measures the
quantity on independent seeds (different master seed than the acceptance
suite) and records the observed values next to the threshold frozen into
the experiment defaults.  Re-run with

    python3 tests/oracles/calibrate.py

and commit the refreshed JSON together with any threshold change.
"""

import json
import time
from pathlib import Path

import numpy as np

from saccel import (
    decompose_path,
    estimate_diffusion,
    excursion_stats,
    simulate_wave_phase_ensemble,
    simulate_xy,
    stream_rng,
    substream_seed,
)

CAL_SEED = 9157


def qv_deviation_sweep():
    """Criterion 2: mean |<V^n>_1 - 0.5| per n (frozen: < 0.05 at n=1e4)."""
    out = {}
    dt = 1e-3
    for n in (1e2, 1e3, 1e4):
        horizon = n ** (2.0 / 3.0)
        n_steps = int(round(horizon / dt))
        dt_slow = horizon / n_steps
        devs = []
        for i in range(100):
            seed = substream_seed(CAL_SEED + int(np.log10(n)), i)
            path = simulate_xy(1.0, n ** (1.0 / 3.0), seed, dt_slow, horizon)
            qv = np.sum(np.diff(path.y) ** 2) / n ** (2.0 / 3.0)
            devs.append(abs(qv - 0.5))
        out[f"n_{n:g}"] = {
            "mean_abs_dev": float(np.mean(devs)),
            "max_abs_dev": float(np.max(devs)),
        }
    return out


def long_path_diagnostics():
    """Criteria 3, 6, 7: ergodic band, occupation decay, excursion stats."""
    dt, horizon, seeds = 1e-3, 1e4, 50
    short_steps = int(round(1e2 / dt))
    avgs, occ_s, occ_l = [], [], []
    k1 = {5.0: [], 10.0: [], 20.0: []}
    resid_ratio = 0.0
    k0_frac = []
    bounds_ok = True
    for i in range(seeds):
        path = simulate_xy(1.0, 1.0, substream_seed(CAL_SEED, i), dt, horizon)
        f = np.sin(path.x_unwrapped) ** 2
        avgs.append(float(np.trapezoid(f, dx=dt) / horizon))
        occ_s.append(float(np.mean(np.abs(path.y[: short_steps + 1]) <= 5.0)))
        occ_l.append(float(np.mean(np.abs(path.y) <= 5.0)))
        for m in k1:
            d = decompose_path(path, m)
            rep = excursion_stats(d, path)
            k1[m].append(rep.k1_time_fraction)
            resid_ratio = max(
                resid_ratio, rep.excursion_residual / (8 * np.pi / m + 2 * dt)
            )
            bounds_ok &= rep.duration_bounds_ok
            if m == 5.0:
                k0_time = float((d.tau - d.eta)[~d.is_k1].sum() * dt)
                k0_frac.append(k0_time / horizon)
    avgs = np.asarray(avgs)
    return {
        "ergodic_in_band": int(np.sum((avgs >= 0.45) & (avgs <= 0.55))),
        "ergodic_mean": float(avgs.mean()),
        "ergodic_sd": float(avgs.std()),
        "occupation_median_T1e2": float(np.median(occ_s)),
        "occupation_median_T1e4": float(np.median(occ_l)),
        "occupation_ratio": float(np.median(occ_l) / np.median(occ_s)),
        "k1_medians": {f"M_{m:g}": float(np.median(v)) for m, v in k1.items()},
        "duration_bounds_all_ok": bool(bounds_ok),
        "max_residual_over_bound": float(resid_ratio),
        "k0_fraction_median_M5": float(np.median(k0_frac)),
        "k0_fraction_min_M5": float(np.min(k0_frac)),
    }


def quasilinear_ratio():
    """Criterion 9: fitted D over pi*A0^2 at the default regime."""
    times, mom = simulate_wave_phase_ensemble(
        0.0, 0.0, 256, 2.0, 1.0, 1e-3, 6 * np.pi, 1000,
        stream_rng(CAL_SEED, 0x514C), sample_every=300,
    )
    est = estimate_diffusion(mom, times, (np.pi, 6 * np.pi))
    return {
        "ratio": float(est.D / (np.pi * 4.0)),
        "ci_low": float(est.ci_low / (np.pi * 4.0)),
        "ci_high": float(est.ci_high / (np.pi * 4.0)),
    }


def main():
    t0 = time.time()
    result = {
        "calibration_seed": CAL_SEED,
        "qv_deviation": qv_deviation_sweep(),
        "long_paths": long_path_diagnostics(),
        "quasilinear": quasilinear_ratio(),
        "frozen_thresholds": {
            "qv_abs_at_1e4": 0.05,
            "ergodic_band": [0.45, 0.55],
            "ergodic_success_rate": 0.9,
            "occupation_ratio": 0.5,
            "k0_fraction_min": 0.75,
            "quasilinear_ratio_band": [0.7, 1.3],
        },
    }
    out = Path(__file__).with_name("calibration.json")
    out.write_text(json.dumps(result, indent=2) + "\n")
    print(f"wrote {out} in {time.time() - t0:.0f}s")


if __name__ == "__main__":
    main()
