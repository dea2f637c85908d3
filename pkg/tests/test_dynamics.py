import numpy as np
import pytest

from saccel import (
    ParticleState,
    ScalingParams,
    TimeGrid,
    estimate_diffusion,
    sample_base_field,
    simulate_ensemble,
    simulate_seed_ensemble,
    step_particles,
    step_particles_euler,
    stream_rng,
    write_trajectory_csv,
)

TWO_PI = 2.0 * np.pi


def test_particle_state_reduces_position():
    s = ParticleState(q=TWO_PI + 1.0, p=-2.0)
    assert s.q == pytest.approx(1.0)
    assert s.p == -2.0


def test_scaling_params():
    p = ScalingParams(A=2.0)
    assert p.n == pytest.approx(np.sqrt(np.pi) * 2.0, rel=1e-15)
    with pytest.raises(ValueError):
        ScalingParams(A=-1.0)
    with pytest.raises(ValueError):
        ScalingParams(A=1.0, n=1.0)
    assert ScalingParams.from_n(3.0).n == pytest.approx(3.0)


def test_step_frozen_dynamics():
    q, p = step_particles([0.4], [1.5], 0.0, 0.0, 0.1, ScalingParams(A=0.0))
    assert q[0] == 0.4 and p[0] == 1.5


def test_step_at_origin():
    # q=0, p=0: the kick picks up only the dS component, then drifts.
    a, dt, c, s = 3.0, 0.01, 0.7, -0.4
    q, p = step_particles([0.0], [0.0], c, s, dt, ScalingParams(A=a))
    assert p[0] == pytest.approx(s, abs=1e-15)
    assert q[0] == pytest.approx((a * s * dt / 2) % TWO_PI, abs=1e-15)


def test_simulate_matches_manual_steps():
    grid = TimeGrid.from_steps(200)
    field = sample_base_field(grid, 31)
    params = ScalingParams(A=1.3)
    traj = simulate_ensemble([0.2, 4.0], [0.5, -1.0], params, field, 200)
    q = np.array([0.2, 4.0])
    p = np.array([0.5, -1.0])
    for i in range(200):
        q, p = step_particles(q, p, field.dC[i], field.dS[i], grid.dt, params)
    np.testing.assert_allclose(traj.q[:, -1], q, rtol=1e-12, atol=1e-12)
    np.testing.assert_allclose(traj.p[:, -1], p, rtol=1e-12, atol=1e-12)


def test_zero_horizon_returns_initial():
    grid = TimeGrid.from_steps(64)
    field = sample_base_field(grid, 1)
    traj = simulate_ensemble([1.0], [2.0], ScalingParams(A=1.0), field, 0)
    assert traj.sample_steps.tolist() == [0]
    assert traj.q[0, 0] == 1.0 and traj.p[0, 0] == 2.0


def test_identical_initial_data_identical_paths():
    grid = TimeGrid.from_steps(500)
    field = sample_base_field(grid, 8)
    traj = simulate_ensemble([1.1, 1.1], [0.3, 0.3], ScalingParams(A=2.0), field, 1500)
    assert np.array_equal(traj.q[0], traj.q[1])
    assert np.array_equal(traj.p[0], traj.p[1])


def test_permutation_equivariance():
    grid = TimeGrid.from_steps(300)
    field = sample_base_field(grid, 17)
    params = ScalingParams(A=0.7)
    rng = np.random.default_rng(5)
    q0 = rng.uniform(0, TWO_PI, 6)
    p0 = rng.normal(size=6)
    perm = rng.permutation(6)
    a = simulate_ensemble(q0, p0, params, field, 600)
    b = simulate_ensemble(q0[perm], p0[perm], params, field, 600)
    assert np.array_equal(a.q[perm], b.q)
    assert np.array_equal(a.p[perm], b.p)


def test_position_shift_invariance():
    # q and q + 2*pi describe the same particle after reduction.  The
    # reduction of 2*pi itself is exact in floats, so those trajectories
    # must be bit-identical; a generic shifted value reduces with 1-ulp
    # error, which chaos can only amplify slowly over a short horizon.
    grid = TimeGrid.from_steps(300)
    field = sample_base_field(grid, 23)
    params = ScalingParams(A=1.0)
    a = simulate_ensemble([0.0], [0.1], params, field, 600)
    b = simulate_ensemble([TWO_PI], [0.1], params, field, 600)
    assert np.array_equal(a.q, b.q)
    assert np.array_equal(a.p, b.p)
    c = simulate_ensemble([0.9], [0.1], params, field, 100)
    d = simulate_ensemble([0.9 + TWO_PI], [0.1], params, field, 100)
    np.testing.assert_allclose(c.q, d.q, atol=1e-9)
    np.testing.assert_allclose(c.p, d.p, atol=1e-9)


def test_momentum_variance_is_pi_t_A0():
    # With A=0 the momentum is exactly the projected field sum, so
    # Var(P_2pi - p0) estimates 2*pi^2 with chi-square noise.
    grid = TimeGrid.from_steps(1000)
    ens = simulate_seed_ensemble(
        [0.7], [0.4], ScalingParams(A=0.0), grid, master_seed=404,
        n_seeds=10_000, horizon_steps=1000, sample_every=1000,
    )
    var = (ens.p[:, 0, -1] - ens.p[:, 0, 0]).var(ddof=1)
    assert abs(var - 2 * np.pi**2) / (2 * np.pi**2) < 0.05


@pytest.mark.slow
def test_momentum_variance_mid_period():
    # Var(P_t - p0) = pi*t at t = pi and t = 2*pi for an active coupling.
    grid = TimeGrid.from_steps(1000)
    ens = simulate_seed_ensemble(
        [0.0], [1.0], ScalingParams(A=1.0), grid, master_seed=11,
        n_seeds=10_000, horizon_steps=1000, sample_every=500,
    )
    for k, t in ((1, np.pi), (2, TWO_PI)):
        var = (ens.p[:, 0, k] - ens.p[:, 0, 0]).var(ddof=1)
        assert abs(var - np.pi * t) / (np.pi * t) < 0.05


def _coarsen(increments, factor):
    return increments.reshape(-1, factor).sum(axis=1)


def _integrate(stepper, q0, p0, dc, ds, dt, params):
    q = np.array([q0])
    p = np.array([p0])
    for i in range(dc.size):
        q, p = stepper(q, p, dc[i], ds[i], dt, params)
    return p[0]


def test_strong_order_of_splitting():
    # Refine against a 2^14-step reference built from the same Brownian
    # increments; the endpoint error should shrink ~ dt (order >= 0.9).
    params = ScalingParams(A=1.0)
    fine = 2**14
    levels = [2**6, 2**7, 2**8, 2**9, 2**10]
    errs = np.zeros(len(levels))
    n_seeds = 8
    for seed in range(n_seeds):
        rng = stream_rng(900, seed)
        sigma = np.sqrt(np.pi * TWO_PI / fine)
        dc_f = rng.normal(0, sigma, fine)
        ds_f = rng.normal(0, sigma, fine)
        p_ref = _integrate(step_particles, 0.3, 0.5, dc_f, ds_f, TWO_PI / fine, params)
        for j, n in enumerate(levels):
            f = fine // n
            p_n = _integrate(
                step_particles, 0.3, 0.5, _coarsen(dc_f, f), _coarsen(ds_f, f),
                TWO_PI / n, params,
            )
            errs[j] += abs(p_n - p_ref) / n_seeds
    slope = -np.polyfit(np.log(levels), np.log(errs), 1)[0]
    assert slope >= 0.9, f"observed strong order {slope:.3f}"


def test_scheme_equivalence():
    # Left-endpoint and mid-step kicks agree as dt -> 0 on shared noise.
    params = ScalingParams(A=1.0)
    fine = 2**13
    rng = stream_rng(901, 0)
    sigma = np.sqrt(np.pi * TWO_PI / fine)
    dc_f = rng.normal(0, sigma, fine)
    ds_f = rng.normal(0, sigma, fine)
    levels = [2**6, 2**7, 2**8, 2**9, 2**10]
    gaps = []
    for n in levels:
        f = fine // n
        dc, ds = _coarsen(dc_f, f), _coarsen(ds_f, f)
        p_strang = _integrate(step_particles, 0.3, 0.5, dc, ds, TWO_PI / n, params)
        p_euler = _integrate(step_particles_euler, 0.3, 0.5, dc, ds, TWO_PI / n, params)
        gaps.append(abs(p_strang - p_euler))
    slope = -np.polyfit(np.log(levels), np.log(gaps), 1)[0]
    assert slope >= 0.8, f"scheme gap shrinks with order {slope:.3f}"
    assert gaps[-1] < gaps[0]


def _brownian_paths(rng, n_paths, n_steps, dt, diffusion):
    dw = rng.normal(0.0, np.sqrt(diffusion * dt), size=(n_paths, n_steps))
    paths = np.concatenate(
        [np.zeros((n_paths, 1)), np.cumsum(dw, axis=1)], axis=1
    )
    return paths


def test_estimate_diffusion_coverage():
    # Closed-form Brownian oracle with Var(p_t) = pi*t: the 95% CI should
    # cover slope pi in almost all repeated trials.
    rng = stream_rng(902, 0)
    times = np.linspace(0, 2.0, 51)
    dt = times[1] - times[0]
    hits = 0
    trials = 100
    for _ in range(trials):
        paths = _brownian_paths(rng, 300, 50, dt, np.pi)
        est = estimate_diffusion(paths, times, (0.2, 2.0))
        hits += est.ci_low <= np.pi <= est.ci_high
    assert hits >= 88, f"coverage {hits}/100"


def test_estimate_diffusion_scaled():
    rng = stream_rng(903, 0)
    times = np.linspace(0, 4.0, 101)
    paths = _brownian_paths(rng, 2000, 100, times[1] - times[0], 3.0)
    est = estimate_diffusion(paths, times, (0.5, 4.0))
    assert est.ci_low <= 3.0 <= est.ci_high
    assert est.D == pytest.approx(3.0, rel=0.15)


def test_estimate_diffusion_errors():
    times = np.linspace(0, 1.0, 11)
    flat = np.ones((50, 11))
    with pytest.raises(ValueError):
        estimate_diffusion(flat, times, (0.0, 1.0))  # constant paths
    rng = stream_rng(904, 0)
    paths = _brownian_paths(rng, 50, 10, 0.1, 1.0)
    with pytest.raises(ValueError):
        estimate_diffusion(paths, times, (1.0, 1.0))  # degenerate window
    with pytest.raises(ValueError):
        estimate_diffusion(paths[:10], times, (0.0, 1.0))  # ensemble too small


def test_trajectory_csv_round_trip(tmp_path):
    grid = TimeGrid.from_steps(50)
    field = sample_base_field(grid, 3)
    traj = simulate_ensemble([0.1, 2.0], [1.0, -1.0], ScalingParams(A=1.0), field, 50, 10)
    out = tmp_path / "traj.csv"
    write_trajectory_csv(traj, out)
    lines = out.read_text().strip().split("\n")
    assert lines[0] == "t,particle,q,p"
    assert len(lines) == 1 + 2 * traj.sample_steps.size
    t, particle, q, p = lines[1].split(",")
    assert float(t) == 0.0 and particle == "0"
    assert float(q) == traj.q[0, 0] and float(p) == traj.p[0, 0]
