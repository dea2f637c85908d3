"""The nine named experiments: simulators wired to statistical verdicts.

Each runner takes a validated config, writes its raw CSV outputs into the
run directory, and returns StatReports.  Every numeric output is a pure
function of (config, master_seed): per-member work is keyed by derived
seeds, loops fill preallocated per-member slots, and reductions run in one
fixed order, so chunking and thread counts cannot change a single byte of
the report.
"""

from __future__ import annotations

import numpy as np
from scipy import stats as sp_stats

from ..dynamics import (
    ScalingParams,
    estimate_diffusion,
    simulate_ensemble,
    simulate_seed_ensemble,
    write_trajectory_csv,
)
from ..ergodic import decompose_path, excursion_stats, write_decomposition_csv
from ..noise import TWO_PI, TimeGrid, sample_base_field
from ..rescaling import qv_of_vn, reconstruct_vn, simulate_xy
from ..rng import stream_rng, substream_seed
from ..stats import (
    StatReport,
    TailBoundParams,
    increment_correlations,
    ks_normal,
    tail_bound_check,
)
from ..waves import WaveSpectrum, overlap_parameter, simulate_wave_phase_ensemble
from .config import (
    ConfigError,
    ExperimentDef,
    ParamSpec,
    float_list,
    nonnegative_float,
    positive_float,
    positive_int,
)

_TAIL_STREAM = 0x7461696C

# Largest seed-ensemble chunk held in memory at once (fields + paths).
_CHUNK_SEEDS = 2500


def _parallel_indexed(fn, n: int, threads: int) -> list:
    """fn(i) for i in range(n), optionally threaded; order always by index."""
    if threads <= 1 or n <= 1:
        return [fn(i) for i in range(n)]
    from concurrent.futures import ThreadPoolExecutor

    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, range(n)))


def _chunk_ranges(n: int, size: int) -> list:
    return [(lo, min(lo + size, n)) for lo in range(0, n, size)]


def _momentum_over_seeds(
    q0, p0, params, grid, master_seed, n_seeds, horizon_steps, sample_every, threads
):
    """(sample_steps, p) with p of shape (n_seeds, N, n_samples), chunked."""
    ranges = _chunk_ranges(n_seeds, _CHUNK_SEEDS)

    def work(idx):
        lo, hi = ranges[idx]
        ens = simulate_seed_ensemble(
            q0, p0, params, grid, master_seed, hi - lo, horizon_steps,
            sample_every, seed_offset=lo,
        )
        return ens.sample_steps, ens.p

    parts = _parallel_indexed(work, len(ranges), threads)
    steps = parts[0][0]
    p = np.concatenate([part[1] for part in parts], axis=0)
    return steps, p


def _variance_csv(path, times, var):
    with open(path, "w", newline="") as fh:
        fh.write("t,var\n")
        for t, v in zip(times, var):
            fh.write(f"{t:.17g},{v:.17g}\n")


def _variance_ci(var: float, n: int) -> tuple:
    lo = var * (n - 1) / float(sp_stats.chi2.ppf(0.975, n - 1))
    hi = var * (n - 1) / float(sp_stats.chi2.ppf(0.025, n - 1))
    return lo, hi


# --------------------------------------------------------------------------
# brownian_single


def run_brownian_single(cfg, out_dir, threads=1):
    p = cfg.params
    grid = TimeGrid.from_steps(p["steps_per_period"])
    spp = p["steps_per_period"]
    sample_every = max(1, spp // 20)
    steps, mom = _momentum_over_seeds(
        [p["q0"]], [p["p0"]], ScalingParams(A=p["A"]), grid, cfg.master_seed,
        p["ensemble_size"], spp, sample_every, threads,
    )
    delta = mom[:, 0, :] - mom[:, 0, :1]
    times = steps * grid.dt
    var_curve = delta.var(axis=0, ddof=1)
    _variance_csv(out_dir / "variance_growth.csv", times, var_curve)

    target = 2.0 * np.pi**2
    var_end = float(var_curve[-1])
    lo, hi = _variance_ci(var_end, p["ensemble_size"])
    tol = cfg.tolerances["var_rel"]
    reports = [
        StatReport(
            name="momentum_variance_one_period",
            estimate=var_end,
            ci_low=lo,
            ci_high=hi,
            statistic=float(abs(var_end - target) / target),
            tolerance=tol,
            passed=bool(abs(var_end - target) / target < tol),
        ),
        ks_normal(
            delta[:, -1], 0.0, target,
            name="momentum_increment_gaussianity",
            p_threshold=cfg.tolerances["ks_p"],
        ),
    ]
    return reports


# --------------------------------------------------------------------------
# theth_qv


def run_theth_qv(cfg, out_dir, threads=1):
    p = cfg.params
    n_values = p["n_values"]
    members = p["ensemble_size"]
    v0, u0, dt_nominal = p["v"], p["u0"], p["dt"]
    t_end = 1.0

    curve_rows = []
    means = []
    for ni, n in enumerate(n_values):
        horizon = n ** (2.0 / 3.0) * t_end
        n_steps = max(1, int(round(horizon / dt_nominal)))
        dt_slow = horizon / n_steps  # aligns t=1 exactly onto the fast grid
        stride = max(1, n_steps // 50)

        def member_qv(i, n=n, horizon=horizon, dt_slow=dt_slow, ni=ni,
                      n_steps=n_steps, stride=stride):
            seed = substream_seed(cfg.master_seed, ni * members + i)
            path = simulate_xy(u0, n ** (1.0 / 3.0) * v0, seed, dt_slow, horizon)
            v_path, dt_fast = reconstruct_vn(path.y, n, dt_slow)
            qv_end = qv_of_vn(v_path, [t_end], dt_fast)[0]
            marks = np.arange(0, n_steps + 1, stride)
            qv_curve = np.concatenate(([0.0], np.cumsum(np.diff(v_path) ** 2)))[marks]
            return qv_end, marks * dt_fast, qv_curve

        results = _parallel_indexed(member_qv, members, threads)
        qv_ends = np.array([r[0] for r in results])
        t_marks = results[0][1]
        mean_curve = np.mean([r[2] for r in results], axis=0)
        curve_rows.extend(
            (n, t, q) for t, q in zip(t_marks, mean_curve)
        )
        means.append(float(np.mean(np.abs(qv_ends - 0.5))))

    with open(out_dir / "qv_curves.csv", "w", newline="") as fh:
        fh.write("n,t,qv\n")
        for n, t, q in curve_rows:
            fh.write(f"{n:.17g},{t:.17g},{q:.17g}\n")

    reports = []
    for n, m in zip(n_values, means):
        final = n == max(n_values)
        tol = cfg.tolerances["qv_abs"] if final else None
        reports.append(
            StatReport(
                name=f"qv_deviation_n_{n:g}",
                estimate=m,
                tolerance=tol,
                passed=bool(m < tol) if final else None,
            )
        )
    increases = np.diff(means)
    reports.append(
        StatReport(
            name="qv_deviation_monotone",
            estimate=float(increases.max()) if increases.size else 0.0,
            tolerance=0.0,
            passed=bool(np.all(increases <= 0.0)),
        )
    )
    return reports


# --------------------------------------------------------------------------
# ergodic_sin2


def run_ergodic_sin2(cfg, out_dir, threads=1):
    p = cfg.params
    dt, horizon, seeds = p["dt"], p["horizon_T"], p["seeds"]
    n_steps = int(round(horizon / dt))
    marks = np.unique(
        np.geomspace(1.0 / dt, n_steps, 80).astype(np.int64)
    )

    def one_seed(i):
        seed = substream_seed(cfg.master_seed, i)
        path = simulate_xy(p["x0"], p["y0"], seed, dt, horizon)
        f = np.sin(path.x_unwrapped) ** 2
        cum = np.concatenate(([0.0], np.cumsum(0.5 * (f[1:] + f[:-1]) * dt)))
        running = cum[marks] / (marks * dt)
        return running[-1], running, path.min_singular_distance()

    results = _parallel_indexed(one_seed, seeds, threads)
    finals = np.array([r[0] for r in results])
    min_dist = min(r[2] for r in results)

    with open(out_dir / "ergodic_convergence.csv", "w", newline="") as fh:
        fh.write("seed,t,avg\n")
        for i, (_, running, _) in enumerate(results):
            for t, a in zip(marks * dt, running):
                fh.write(f"{i},{t:.17g},{a:.17g}\n")

    lo, hi = cfg.tolerances["band_low"], cfg.tolerances["band_high"]
    rate = cfg.tolerances["success_rate"]
    successes = int(np.count_nonzero((finals >= lo) & (finals <= hi)))
    return [
        StatReport(
            name="ergodic_average_success_rate",
            estimate=successes / seeds,
            statistic=float(successes),
            tolerance=rate,
            passed=bool(successes / seeds >= rate),
        ),
        StatReport(
            name="ergodic_average_mean",
            estimate=float(finals.mean()),
            ci_low=float(finals.min()),
            ci_high=float(finals.max()),
        ),
        StatReport(
            name="min_distance_to_rest_points",
            estimate=float(min_dist),
            tolerance=0.0,
            passed=bool(min_dist > 0.0),
        ),
    ]


# --------------------------------------------------------------------------
# npart_independence


def run_npart_independence(cfg, out_dir, threads=1):
    p = cfg.params
    q0, p0 = p["q0"], p["p0"]
    if len(q0) != p["N"] or len(p0) != p["N"]:
        raise ConfigError("q0 and p0 must list one value per particle")
    grid = TimeGrid.from_steps(p["steps_per_period"])
    steps, mom = _momentum_over_seeds(
        q0, p0, ScalingParams(A=p["A"]), grid, cfg.master_seed,
        p["ensemble_size"], p["steps_per_period"], 1, threads,
    )
    inc = np.diff(mom, axis=2)  # (seeds, N, steps)
    n_part = p["N"]
    target = 2.0 * np.pi**2

    cv = np.einsum("sit,sjt->sij", inc, inc)  # cross-variation at 2*pi
    mean_cv = cv.mean(axis=0)
    pair_rows = []
    worst = 0.0
    for i in range(n_part):
        for j in range(i + 1, n_part):
            norm = abs(mean_cv[i, j]) / target
            worst = max(worst, norm)
            pair_rows.append((i, j, mean_cv[i, j], norm))
    with open(out_dir / "cross_variation.csv", "w", newline="") as fh:
        fh.write("particle_a,particle_b,mean_cv,normalized\n")
        for i, j, val, norm in pair_rows:
            fh.write(f"{i},{j},{val:.17g},{norm:.17g}\n")

    corr = increment_correlations(mom[:, :, -1] - mom[:, :, 0])
    off = corr[~np.eye(n_part, dtype=bool)]
    max_corr = float(np.abs(off).max())
    with open(out_dir / "increment_correlations.csv", "w", newline="") as fh:
        fh.write("particle_a,particle_b,corr\n")
        for i in range(n_part):
            for j in range(n_part):
                fh.write(f"{i},{j},{corr[i, j]:.17g}\n")

    return [
        StatReport(
            name="max_pair_cross_variation",
            estimate=float(worst),
            tolerance=cfg.tolerances["cv_rel"],
            passed=bool(worst < cfg.tolerances["cv_rel"]),
        ),
        StatReport(
            name="max_offdiagonal_increment_correlation",
            estimate=max_corr,
            tolerance=cfg.tolerances["corr_max"],
            passed=bool(max_corr < cfg.tolerances["corr_max"]),
        ),
    ]


# --------------------------------------------------------------------------
# periodic_extension


def run_periodic_extension(cfg, out_dir, threads=1):
    p = cfg.params
    spp = p["steps_per_period"]
    grid = TimeGrid.from_steps(spp, horizon_steps=2 * spp)
    steps, mom = _momentum_over_seeds(
        [p["q0"]], [p["p0"]], ScalingParams(A=p["A"]), grid, cfg.master_seed,
        p["ensemble_size"], 2 * spp, spp, threads,
    )
    d1 = mom[:, 0, 1] - mom[:, 0, 0]
    d2 = mom[:, 0, 2] - mom[:, 0, 1]
    with open(out_dir / "period_increments.csv", "w", newline="") as fh:
        fh.write("seed,first_period,second_period\n")
        for i in range(d1.size):
            fh.write(f"{i},{d1[i]:.17g},{d2[i]:.17g}\n")

    rho = float(np.corrcoef(d1, d2)[0, 1])
    var2 = float((d1 + d2).var(ddof=1))
    target = 4.0 * np.pi**2
    lo, hi = _variance_ci(var2, d1.size)
    tol_var = cfg.tolerances["var_rel"]
    return [
        StatReport(
            name="period_to_period_correlation",
            estimate=rho,
            tolerance=cfg.tolerances["corr_max"],
            passed=bool(abs(rho) < cfg.tolerances["corr_max"]),
        ),
        StatReport(
            name="two_period_variance",
            estimate=var2,
            ci_low=lo,
            ci_high=hi,
            statistic=float(abs(var2 - target) / target),
            tolerance=tol_var,
            passed=bool(abs(var2 - target) / target < tol_var),
        ),
    ]


# --------------------------------------------------------------------------
# path_decomposition


def run_path_decomposition(cfg, out_dir, threads=1):
    p = cfg.params
    dt, horizon, seeds = p["dt"], p["horizon_T"], p["seeds"]
    m_values = p["M_values"]
    occ_m = p["occupation_M"]
    short_steps = int(round(p["horizon_short"] / dt))

    def one_seed(i):
        seed = substream_seed(cfg.master_seed, i)
        path = simulate_xy(p["x0"], p["y0"], seed, dt, horizon)
        occ_short = float(np.mean(np.abs(path.y[: short_steps + 1]) <= occ_m))
        occ_long = float(np.mean(np.abs(path.y) <= occ_m))
        rows = []
        for m in m_values:
            decomp = decompose_path(path, m)
            rep = excursion_stats(decomp, path)
            k0 = ~decomp.is_k1
            k0_time = float(((decomp.tau - decomp.eta)[k0]).sum() * dt)
            rows.append(
                (
                    rep.k1_time_fraction,
                    rep.excursion_residual,
                    rep.duration_bounds_ok,
                    k0_time / horizon,
                )
            )
            if i == 0:
                write_decomposition_csv(
                    decomp, out_dir / f"decomposition_seed0_M{m:g}.csv"
                )
        return occ_short, occ_long, rows

    results = _parallel_indexed(one_seed, seeds, threads)
    occ_short = np.array([r[0] for r in results])
    occ_long = np.array([r[1] for r in results])

    with open(out_dir / "occupation_decay.csv", "w", newline="") as fh:
        fh.write("horizon,seed,fraction\n")
        for i in range(seeds):
            fh.write(f"{p['horizon_short']:.17g},{i},{occ_short[i]:.17g}\n")
        for i in range(seeds):
            fh.write(f"{horizon:.17g},{i},{occ_long[i]:.17g}\n")

    k1_medians = []
    residual_ratio = 0.0
    bounds_all_ok = True
    k0_fracs = []
    with open(out_dir / "k1_fraction.csv", "w", newline="") as fh:
        fh.write("M,seed,fraction\n")
        for mi, m in enumerate(m_values):
            k1 = np.array([r[2][mi][0] for r in results])
            for i in range(seeds):
                fh.write(f"{m:.17g},{i},{k1[i]:.17g}\n")
            k1_medians.append(float(np.median(k1)))
            res = np.array([r[2][mi][1] for r in results])
            residual_ratio = max(
                residual_ratio, float(res.max() / (8.0 * np.pi / m + 2.0 * dt))
            )
            bounds_all_ok &= all(r[2][mi][2] for r in results)
            if mi == 0:
                k0_fracs = np.array([r[2][mi][3] for r in results])

    med_short = float(np.median(occ_short))
    med_long = float(np.median(occ_long))
    occ_ratio = med_long / med_short if med_short > 0 else 0.0
    increases = np.diff(k1_medians)
    return [
        StatReport(
            name="occupation_fraction_decay",
            estimate=occ_ratio,
            statistic=med_long,
            tolerance=cfg.tolerances["occupation_ratio"],
            passed=bool(occ_ratio <= cfg.tolerances["occupation_ratio"]),
        ),
        StatReport(
            name="k1_time_fraction_monotone",
            estimate=float(increases.max()) if increases.size else 0.0,
            tolerance=0.0,
            passed=bool(np.all(increases <= 0.0)),
        ),
        StatReport(
            name="excursion_duration_bounds",
            estimate=1.0 if bounds_all_ok else 0.0,
            tolerance=1.0,
            passed=bool(bounds_all_ok),
        ),
        StatReport(
            name="k0_residual_vs_bound",
            estimate=residual_ratio,
            tolerance=1.0,
            passed=bool(residual_ratio <= 1.0),
        ),
        StatReport(
            name="k0_time_fraction_median",
            estimate=float(np.median(k0_fracs)),
            tolerance=cfg.tolerances["k0_fraction_min"],
            passed=bool(np.median(k0_fracs) >= cfg.tolerances["k0_fraction_min"]),
        ),
    ]


# --------------------------------------------------------------------------
# quasilinear_finite_m


def run_quasilinear_finite_m(cfg, out_dir, threads=1):
    p = cfg.params
    m_waves, amp, mass = p["wave_count"], p["amplitude"], p["mass"]
    regime = (mass / amp) ** (2.0 / 3.0) * m_waves
    if regime < 10.0:
        raise ConfigError(
            f"(m/A0)^(2/3) * M = {regime:.2f} < 10: outside the diffusive regime"
        )
    horizon = p["horizon_periods"] * TWO_PI
    rng = stream_rng(cfg.master_seed, 0x514C)
    times, mom = simulate_wave_phase_ensemble(
        p["q0"], p["u0"], m_waves, amp, mass, p["dt"], horizon,
        p["ensemble_size"], rng, sample_every=max(1, int(round(horizon / p["dt"])) // 60),
    )
    var = (mom - mom[:, :1]).var(axis=0, ddof=1)
    _variance_csv(out_dir / "wave_variance_growth.csv", times, var)

    d_ql = np.pi * amp**2
    window = (p["window_low"] * TWO_PI, p["window_high"] * TWO_PI)
    est = estimate_diffusion(mom, times, window)
    ratio = est.D / d_ql
    lo_tol, hi_tol = cfg.tolerances["ratio_low"], cfg.tolerances["ratio_high"]
    spectrum = WaveSpectrum(amplitudes=np.full(m_waves, amp), phases=np.zeros(m_waves))
    overlap = overlap_parameter(spectrum, mass, m_waves // 2)
    return [
        StatReport(
            name="diffusion_ratio",
            estimate=float(ratio),
            ci_low=float(est.ci_low / d_ql),
            ci_high=float(est.ci_high / d_ql),
            statistic=float(est.D),
            tolerance=hi_tol,
            passed=bool(lo_tol <= ratio <= hi_tol),
        ),
        StatReport(name="resonance_overlap", estimate=float(overlap)),
        StatReport(name="regime_parameter", estimate=float(regime)),
    ]


# --------------------------------------------------------------------------
# tail_bound


def run_tail_bound(cfg, out_dir, threads=1):
    p = cfg.params
    n_paths, dt = p["n_paths"], p["dt"]
    cases = p["cases"]
    n_steps = int(round(max(c[2] for c in cases) / dt))
    rng = stream_rng(cfg.master_seed, _TAIL_STREAM)
    dw = rng.normal(0.0, np.sqrt(dt), size=(n_paths, n_steps))
    paths = np.concatenate([np.zeros((n_paths, 1)), np.cumsum(dw, axis=1)], axis=1)

    reports = []
    rows = []
    for b, k, t_dur in cases:
        params = TailBoundParams(b=b, k=k, T=t_dur)
        sub = paths[:, : int(round(t_dur / dt)) + 1]
        rep = tail_bound_check(sub, dt, params, name=f"tail_bound_b{b:g}")
        reports.append(rep)
        rows.append((b, k, t_dur, rep.estimate, rep.ci_high, rep.tolerance))
    with open(out_dir / "tail_exceedance.csv", "w", newline="") as fh:
        fh.write("b,k,T,empirical,upper99,bound\n")
        for row in rows:
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")
    return reports


# --------------------------------------------------------------------------
# small_a_exploratory


def run_small_a_exploratory(cfg, out_dir, threads=1):
    p = cfg.params
    spp = p["steps_per_period"]
    periods = p["periods"]
    grid = TimeGrid.from_steps(spp, horizon_steps=periods * spp)
    steps, mom = _momentum_over_seeds(
        [p["q0"]], [p["p0"]], ScalingParams(A=p["A"]), grid, cfg.master_seed,
        p["ensemble_size"], periods * spp, spp, threads,
    )
    inc = np.diff(mom[:, 0, :], axis=1)  # per-period increments
    rho12 = float(np.corrcoef(inc[:, 0], inc[:, 1])[0, 1])
    span = np.max(np.abs(mom[:, 0, :] - mom[:, 0, :1]), axis=1)

    field = sample_base_field(grid, substream_seed(cfg.master_seed, 0))
    traj = simulate_ensemble(
        [p["q0"]], [p["p0"]], ScalingParams(A=p["A"]), field,
        periods * spp, sample_every=max(1, spp // 50),
    )
    write_trajectory_csv(traj, out_dir / "small_a_trajectory.csv")
    with open(out_dir / "small_a_increments.csv", "w", newline="") as fh:
        fh.write("seed,period,increment\n")
        for i in range(inc.shape[0]):
            for k in range(inc.shape[1]):
                fh.write(f"{i},{k},{inc[i, k]:.17g}\n")

    # Observations only: the trapped regime keeps period-to-period memory
    # and a bounded momentum span; no pass/fail is attached.
    return [
        StatReport(name="consecutive_period_correlation", estimate=rho12),
        StatReport(name="median_momentum_span", estimate=float(np.median(span))),
        StatReport(name="max_momentum_span", estimate=float(span.max())),
    ]


# --------------------------------------------------------------------------
# registry

REGISTRY: dict = {}
_RUNNERS: dict = {}


def _register(definition: ExperimentDef, runner):
    REGISTRY[definition.name] = definition
    _RUNNERS[definition.name] = runner


_register(
    ExperimentDef(
        name="brownian_single",
        claim="one-period momentum is Brownian with variance pi*t for any coupling A >= 0",
        params={
            "A": ParamSpec(1.0, nonnegative_float("A")),
            "ensemble_size": ParamSpec(10_000, positive_int("ensemble_size")),
            "steps_per_period": ParamSpec(1000, positive_int("steps_per_period")),
            "q0": ParamSpec(0.7, nonnegative_float("q0")),
            "p0": ParamSpec(0.4),
        },
        tolerances={"var_rel": 0.05, "ks_p": 0.01},
    ),
    run_brownian_single,
)

_register(
    ExperimentDef(
        name="theth_qv",
        claim="relative-velocity quadratic variation at t=1 approaches 1/2 as the rate n grows",
        params={
            "n_values": ParamSpec([100.0, 1000.0, 10_000.0], float_list("n_values")),
            "v": ParamSpec(1.0, positive_float("v")),
            "u0": ParamSpec(1.0),
            "dt": ParamSpec(1e-3, positive_float("dt")),
            "ensemble_size": ParamSpec(100, positive_int("ensemble_size")),
        },
        tolerances={"qv_abs": 0.05},
    ),
    run_theth_qv,
)

_register(
    ExperimentDef(
        name="ergodic_sin2",
        claim="time average of sin^2(X) over a long horizon concentrates at 1/2",
        params={
            "x0": ParamSpec(1.0),
            "y0": ParamSpec(1.0),
            "dt": ParamSpec(1e-3, positive_float("dt")),
            "horizon_T": ParamSpec(1e4, positive_float("horizon_T")),
            "seeds": ParamSpec(50, positive_int("seeds")),
        },
        tolerances={"band_low": 0.45, "band_high": 0.55, "success_rate": 0.9},
    ),
    run_ergodic_sin2,
)

_register(
    ExperimentDef(
        name="npart_independence",
        claim="particles sharing one field decorrelate at large A: pair cross-variation and increment correlations vanish",
        params={
            "N": ParamSpec(4, positive_int("N")),
            "A": ParamSpec(1000.0, positive_float("A")),
            "ensemble_size": ParamSpec(1000, positive_int("ensemble_size")),
            "steps_per_period": ParamSpec(1000, positive_int("steps_per_period")),
            "q0": ParamSpec([0.5, 1.7, 3.1, 4.4], float_list("q0")),
            "p0": ParamSpec([0.0, 0.6, 1.2, 1.8], float_list("p0")),
        },
        tolerances={"cv_rel": 0.05, "corr_max": 0.1},
    ),
    run_npart_independence,
)

_register(
    ExperimentDef(
        name="periodic_extension",
        claim="period-to-period momentum increments decorrelate and the two-period variance is 4*pi^2",
        params={
            "A": ParamSpec(1000.0, positive_float("A")),
            "ensemble_size": ParamSpec(4000, positive_int("ensemble_size")),
            "steps_per_period": ParamSpec(1000, positive_int("steps_per_period")),
            "q0": ParamSpec(0.8),
            "p0": ParamSpec(0.3),
        },
        tolerances={"corr_max": 0.1, "var_rel": 0.07},
    ),
    run_periodic_extension,
)

_register(
    ExperimentDef(
        name="path_decomposition",
        claim="band occupation decays with horizon; excursion bookkeeping obeys its duration and residual bounds",
        params={
            "x0": ParamSpec(1.0),
            "y0": ParamSpec(1.0),
            "dt": ParamSpec(1e-3, positive_float("dt")),
            "horizon_T": ParamSpec(1e4, positive_float("horizon_T")),
            "horizon_short": ParamSpec(1e2, positive_float("horizon_short")),
            "seeds": ParamSpec(50, positive_int("seeds")),
            "occupation_M": ParamSpec(5.0, positive_float("occupation_M")),
            "M_values": ParamSpec([5.0, 10.0, 20.0], float_list("M_values")),
        },
        tolerances={"occupation_ratio": 0.5, "k0_fraction_min": 0.75},
    ),
    run_path_decomposition,
)

_register(
    ExperimentDef(
        name="quasilinear_finite_m",
        claim="finite-wave momentum diffusion matches pi*A0^2 in the strong-overlap regime",
        params={
            "wave_count": ParamSpec(256, positive_int("wave_count")),
            "amplitude": ParamSpec(2.0, positive_float("amplitude")),
            "mass": ParamSpec(1.0, positive_float("mass")),
            "dt": ParamSpec(1e-3, positive_float("dt")),
            "horizon_periods": ParamSpec(3.0, positive_float("horizon_periods")),
            "window_low": ParamSpec(0.5, positive_float("window_low")),
            "window_high": ParamSpec(3.0, positive_float("window_high")),
            "ensemble_size": ParamSpec(1000, positive_int("ensemble_size")),
            "q0": ParamSpec(0.0),
            "u0": ParamSpec(0.0),
        },
        tolerances={"ratio_low": 0.7, "ratio_high": 1.3},
    ),
    run_quasilinear_finite_m,
)

_register(
    ExperimentDef(
        name="tail_bound",
        claim="martingale sup-tail frequencies stay below 2*exp(-b^2/(2*k^2*T))",
        params={
            "n_paths": ParamSpec(10_000, positive_int("n_paths")),
            "dt": ParamSpec(1e-3, positive_float("dt")),
            "cases": ParamSpec([[1.0, 1.0, 1.0], [2.0, 1.0, 1.0], [3.0, 1.0, 1.0]]),
        },
        tolerances={},
    ),
    run_tail_bound,
)

_register(
    ExperimentDef(
        name="small_a_exploratory",
        claim="weak coupling: bounded momentum span and period-to-period memory (observation only)",
        params={
            "A": ParamSpec(0.1, positive_float("A")),
            "ensemble_size": ParamSpec(400, positive_int("ensemble_size")),
            "steps_per_period": ParamSpec(1000, positive_int("steps_per_period")),
            "periods": ParamSpec(8, positive_int("periods")),
            "q0": ParamSpec(0.5),
            "p0": ParamSpec(0.0),
        },
        exploratory=True,
    ),
    run_small_a_exploratory,
)


def get_runner(name: str):
    try:
        return _RUNNERS[name]
    except KeyError:
        raise ConfigError(
            f"unknown experiment {name!r}; known: {', '.join(REGISTRY)}"
        ) from None
