import numpy as np
import pytest

from saccel import (
    XYPath,
    decompose_path,
    ergodic_average_sin2,
    excursion_stats,
    occupation_fraction,
    simulate_xy,
    write_decomposition_csv,
)

TWO_PI = 2.0 * np.pi


def test_average_over_full_periods():
    # x(s) = s over exactly [0, 2*pi*k]: uniform trapezoid over whole
    # periods of sin^2 is spectrally accurate, so the average is 1/2 almost
    # exactly.  dt ~ 1e-3 chosen so the grid ends exactly at 2*pi*k.
    for k in (1, 3):
        n = 6283 * k
        dt = TWO_PI * k / n
        x = np.arange(n + 1) * dt
        assert abs(ergodic_average_sin2(x, dt) - 0.5) < 1e-6


def test_average_constant_path():
    x = np.full(100, np.pi / 2)
    assert ergodic_average_sin2(x, 0.1) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        ergodic_average_sin2(np.array([1.0]), 0.1)


def test_occupation_fraction_constants():
    assert occupation_fraction(np.full(50, 10.0), 5.0) == 0.0
    assert occupation_fraction(np.zeros(50), 5.0) == 1.0
    y = np.concatenate([np.zeros(30), np.full(10, 9.0)])
    assert occupation_fraction(y, 5.0) == pytest.approx(0.75)
    with pytest.raises(ValueError):
        occupation_fraction(np.empty(0), 5.0)


def test_band_m_must_exceed_two():
    path = XYPath(dt=0.1, x_unwrapped=np.zeros(10), y=np.zeros(10))
    with pytest.raises(ValueError):
        decompose_path(path, 2.0)


def test_never_leaves_band():
    path = XYPath(dt=0.1, x_unwrapped=np.arange(100.0), y=np.zeros(100))
    d = decompose_path(path, 5.0)
    assert d.excursion_count == 0
    assert d.band_crossings.tolist() == [0]


def _ramp_and_hold(band_m=5.0, dt=0.01, hold_dx=0.05, windings=2):
    # y ramps 0 -> band_m + 1.5 then holds; x starts moving only during the
    # hold and advances windings * 2*pi in total.
    top = band_m + 1.5
    n_ramp = 131
    y_ramp = np.linspace(0.0, top, n_ramp)
    n_hold = int(np.ceil(windings * TWO_PI / hold_dx)) + 3
    y = np.concatenate([y_ramp, np.full(n_hold, top)])
    x = np.concatenate(
        [np.zeros(n_ramp), np.arange(1, n_hold + 1) * hold_dx * (1 + 1e-9)]
    )
    return XYPath(dt=dt, x_unwrapped=x, y=y)


def test_ramp_fixture_all_k0():
    band_m = 5.0
    path = _ramp_and_hold(band_m)
    d = decompose_path(path, band_m)
    # One exit crossing, no re-entry.
    assert d.band_crossings.size == 2
    t1 = d.band_crossings[1]
    assert abs(path.y[t1]) >= band_m + 1.0
    assert abs(path.y[t1 - 1]) < band_m + 1.0
    # Two full windings, chained back to back, all class K0.
    assert d.excursion_count == 2
    assert not d.is_k1.any()
    assert d.eta[0] == t1
    assert d.eta[1] == d.tau[0]
    # windings are 2*pi up to the one-grid-cell overshoot
    assert np.all(d.winding >= TWO_PI)
    assert np.all(d.winding <= TWO_PI + 0.06)


def test_y_jump_gives_k1():
    band_m = 5.0
    path = _ramp_and_hold(band_m, hold_dx=0.01, windings=1)
    y = path.y.copy()
    t1 = np.argmax(np.abs(y) >= band_m + 1.0)
    y[t1 + 50 :] += 1.2  # jump inside the first excursion
    jumped = XYPath(dt=path.dt, x_unwrapped=path.x_unwrapped, y=y)
    d = decompose_path(jumped, band_m)
    assert d.excursion_count >= 1
    assert d.is_k1[0]
    assert d.tau[0] == t1 + 50
    assert abs(y[d.tau[0]] - y[d.eta[0]]) > 1.0


def test_exact_winding_residual_vanishes():
    # Constant-speed windings aligned with the grid: the per-excursion
    # integral of sin^2 equals half the duration to quadrature accuracy.
    dt = 1e-3
    steps_per_winding = 1000
    dx = TWO_PI / steps_per_winding * (1 + 1e-9)
    # first exit is at index 1, so 5 windings need 5*spw + 2 samples
    n = 5 * steps_per_winding + 2
    path = XYPath(
        dt=dt,
        x_unwrapped=np.arange(n) * dx,
        y=np.full(n, 8.0),
    )
    d = decompose_path(path, 5.0)
    assert d.excursion_count == 5
    assert not d.is_k1.any()
    rep = excursion_stats(d, path)
    assert rep.excursion_residual < 1e-6
    assert rep.k1_time_fraction == 0.0


def test_fast_constant_speed_residual_bound():
    # With constant speed y0 the winding overshoot is one grid cell, so the
    # normalized residual stays below 2/y0.
    y0 = 50.0
    dt = 1e-4
    dx = y0 * dt
    n = int(np.ceil(3 * TWO_PI / dx)) + 5
    path = XYPath(dt=dt, x_unwrapped=np.arange(n) * dx, y=np.full(n, y0))
    d = decompose_path(path, 5.0)
    assert d.excursion_count >= 3
    rep = excursion_stats(d, path)
    assert rep.excursion_residual <= 2.0 / y0


def _long_path(seed=12, horizon=500.0):
    return simulate_xy(1.0, 1.0, seed=seed, dt=1e-3, horizon=horizon)


def test_partition_and_sandwich_on_simulated_path():
    path = _long_path()
    band_m = 4.0
    d = decompose_path(path, band_m)
    assert d.excursion_count > 0
    # excursions are disjoint and ordered
    assert np.all(d.tau > d.eta)
    assert np.all(d.eta[1:] >= d.tau[:-1])
    # partition: excursion time + complement = total time, exactly on grid
    total_steps = path.y.size - 1
    exc_steps = int(np.sum(d.tau - d.eta))
    assert 0 <= exc_steps <= total_steps
    # the complement is glued from [0, T1) and the in-band waits
    complement = total_steps - exc_steps
    assert complement >= int(d.band_crossings[1])

    # sandwich: int 1_{|Y| >= M+1} sin^2 <= sum_k int over excursions
    #           <= int sin^2, up to one boundary trapezoid per excursion
    dt = path.dt
    cut = int(d.tau[-1])
    f = np.sin(path.x_unwrapped) ** 2
    w = 0.5 * (f[1:] + f[:-1]) * dt
    outside = np.abs(path.y) >= band_m + 1.0
    out_w = 0.5 * (outside[1:].astype(float) + outside[:-1]) * w * 2.0
    left = np.sum((w * (outside[1:] & outside[:-1]))[:cut])
    mid = 0.0
    for a, b in zip(d.eta, d.tau):
        mid += np.sum(w[a:b])
    right = np.sum(w[:cut])
    eps = (d.excursion_count + 2) * dt
    assert left <= mid + eps
    assert mid <= right + eps
    del out_w


def test_duration_bounds_on_simulated_path():
    path = _long_path(seed=19)
    for band_m in (4.0, 6.0):
        d = decompose_path(path, band_m)
        if d.excursion_count == 0:
            continue
        rep = excursion_stats(d, path)
        assert rep.duration_bounds_ok
        durations = d.durations()
        assert np.all(durations <= 4 * np.pi / np.abs(d.y_eta) + 2 * path.dt)
        k0 = ~d.is_k1
        assert np.all(durations[k0] >= np.pi / np.abs(d.y_eta[k0]) - 2 * path.dt)
        # every excursion starts outside the band
        assert np.all(np.abs(d.y_eta) > band_m)


def test_report_fields_in_range():
    path = _long_path(seed=77, horizon=200.0)
    d = decompose_path(path, 4.0)
    rep = excursion_stats(d, path)
    assert 0.0 <= rep.average <= 1.0
    assert 0.0 <= rep.occupation_fraction <= 1.0
    assert 0.0 <= rep.k1_time_fraction <= 1.0
    assert rep.excursion_residual >= 0.0


def test_decomposition_csv(tmp_path):
    path = _ramp_and_hold()
    d = decompose_path(path, 5.0)
    out = tmp_path / "decomp.csv"
    write_decomposition_csv(d, out)
    lines = out.read_text().strip().split("\n")
    assert lines[0] == "k,eta,tau,class,Y_eta,winding"
    assert len(lines) == 1 + d.excursion_count
    fields = lines[1].split(",")
    assert fields[3] in ("K0", "K1")
    assert int(fields[1]) == d.eta[0]
