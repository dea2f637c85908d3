"""Ergodic averages, occupation fractions, and the excursion bookkeeping.

A long path of the slow system spends almost all of its time at large |Y|,
where X winds around the circle quickly and sin^2(X) averages to 1/2.  The
decomposition below makes that quantitative: it cuts the path into
excursions started outside the band |Y| <= M and ended either by a full
2*pi winding of X (class K0) or by a unit change of Y (class K1), plus a
complement spent near the band.

Stopping times are realized as the first grid index where the defining
inequality holds; no crossing is interpolated, and every bound carries an
explicit +-2*dt slack for that.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .rescaling import XYPath

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class PathDecomposition:
    """Band crossings and classified excursions of one path.

    `band_crossings[l]` is T_l (T_0 = 0): odd entries leave |Y| <= M+1-1 ...
    odd entries are exits to |Y| >= M+1, even entries (l >= 2) re-entries to
    |Y| <= M.  Excursion k runs over grid steps [eta[k], tau[k]];
    `is_k1[k]` marks excursions ended by the unit Y-change rather than the
    full winding.  Incomplete trailing excursions are dropped (their time
    lands in the complement).
    """

    threshold: float
    dt: float
    band_crossings: np.ndarray  # int64, starts with T_0 = 0
    eta: np.ndarray  # int64 step indices
    tau: np.ndarray  # int64 step indices
    is_k1: np.ndarray  # bool
    L: np.ndarray  # int64 auxiliary counters
    y_eta: np.ndarray  # Y at eta
    winding: np.ndarray  # |X_tau - X_eta| on the unwrapped coordinate

    @property
    def excursion_count(self) -> int:
        return self.eta.size

    def durations(self) -> np.ndarray:
        return (self.tau - self.eta) * self.dt


@dataclass(frozen=True)
class ErgodicReport:
    """Summary of one path: ergodic average and excursion diagnostics."""

    average: float
    occupation_fraction: float
    k1_time_fraction: float
    excursion_residual: float
    duration_bounds_ok: bool


def ergodic_average_sin2(x_path, dt: float) -> float:
    """Trapezoidal time-average of sin^2(x) over the whole path."""
    x_path = np.asarray(x_path, dtype=float)
    if x_path.size < 2:
        raise ValueError("need at least 2 samples")
    if not dt > 0.0:
        raise ValueError("dt must be positive")
    f = np.sin(x_path) ** 2
    return float(np.trapezoid(f, dx=dt) / ((x_path.size - 1) * dt))


def occupation_fraction(y_path, band_m: float) -> float:
    """Fraction of grid time the path spends with |y| <= band_m."""
    y_path = np.asarray(y_path, dtype=float)
    if y_path.size == 0:
        raise ValueError("empty path")
    if not band_m > 0.0:
        raise ValueError("band half-width must be positive")
    return float(np.mean(np.abs(y_path) <= band_m))


@njit(cache=True, nogil=True)
def _scan_crossings(y, band_m, fill, out):
    # T_l for l >= 1: alternate first-exit (|y| >= M+1) / first-re-entry
    # (|y| <= M), each strictly after the previous one.  Returns the count.
    n = y.shape[0]
    count = 0
    prev = 0
    odd = True
    while True:
        found = -1
        if odd:
            for j in range(prev + 1, n):
                if abs(y[j]) >= band_m + 1.0:
                    found = j
                    break
        else:
            for j in range(prev + 1, n):
                if abs(y[j]) <= band_m:
                    found = j
                    break
        if found < 0:
            break
        if fill:
            out[count] = found
        count += 1
        prev = found
        odd = not odd
    return count


@njit(cache=True, nogil=True)
def _scan_excursions(xu, y, T, fill, eta_out, tau_out, k1_out, L_out):
    # T holds T_l for l >= 1 (T[m] = T_{m+1}).  tau_0 = T_1; while the path
    # stays outside the band the next excursion starts at the previous
    # excursion's end, otherwise it waits for the next exit time.
    n = y.shape[0]
    nT = T.shape[0]
    count = 0
    if nT < 1:
        return 0
    tau_prev = T[0]
    L = 0
    while True:
        while 2 * L + 2 < nT and T[2 * L + 2] <= tau_prev:
            L += 1
        if 2 * L + 1 < nT and tau_prev >= T[2 * L + 1]:
            if 2 * L + 2 < nT:
                eta = T[2 * L + 2]
            else:
                break  # path ends inside the band
        else:
            eta = tau_prev
        if eta >= n - 1:
            break
        x_ref = xu[eta]
        y_ref = y[eta]
        tau = -1
        k1 = False
        for j in range(eta + 1, n):
            dy = abs(y[j] - y_ref)
            if dy > 1.0:
                tau = j
                k1 = True  # unit Y-change reached first (ties resolve to K1)
                break
            if abs(xu[j] - x_ref) >= TWO_PI:
                tau = j
                break
        if tau < 0:
            break  # incomplete trailing excursion: dropped
        if fill:
            eta_out[count] = eta
            tau_out[count] = tau
            k1_out[count] = 1 if k1 else 0
            L_out[count] = L
        count += 1
        tau_prev = tau
    return count


def decompose_path(path: XYPath, band_m: float) -> PathDecomposition:
    """Full stopping-time decomposition of a path for band half-width M.

    Requires M > 2 (the duration bounds below rely on |Y| staying above
    M - 1 > M/2 during an excursion).  Winding is detected on the unwrapped
    X coordinate; X mod 2*pi cannot see a total displacement of 2*pi.
    """
    if not band_m > 2.0:
        raise ValueError(f"band half-width must exceed 2, got {band_m}")
    xu = np.ascontiguousarray(path.x_unwrapped, dtype=float)
    y = np.ascontiguousarray(path.y, dtype=float)
    if xu.size != y.size or xu.size < 2:
        raise ValueError("path must carry x and y of equal length >= 2")

    dummy = np.empty(0, dtype=np.int64)
    n_t = _scan_crossings(y, band_m, False, dummy)
    t_arr = np.empty(n_t, dtype=np.int64)
    _scan_crossings(y, band_m, True, t_arr)

    dummy_u8 = np.empty(0, dtype=np.uint8)
    n_exc = _scan_excursions(xu, y, t_arr, False, dummy, dummy, dummy_u8, dummy)
    eta = np.empty(n_exc, dtype=np.int64)
    tau = np.empty(n_exc, dtype=np.int64)
    k1 = np.empty(n_exc, dtype=np.uint8)
    lk = np.empty(n_exc, dtype=np.int64)
    _scan_excursions(xu, y, t_arr, True, eta, tau, k1, lk)

    return PathDecomposition(
        threshold=float(band_m),
        dt=path.dt,
        band_crossings=np.concatenate(([np.int64(0)], t_arr)),
        eta=eta,
        tau=tau,
        is_k1=k1.astype(bool),
        L=lk,
        y_eta=y[eta] if n_exc else np.empty(0),
        winding=np.abs(xu[tau] - xu[eta]) if n_exc else np.empty(0),
    )


def _cumulative_trapezoid(f: np.ndarray, dt: float) -> np.ndarray:
    out = np.empty(f.size)
    out[0] = 0.0
    np.cumsum(0.5 * (f[1:] + f[:-1]) * dt, out=out[1:])
    return out


def excursion_stats(decomp: PathDecomposition, path: XYPath) -> ErgodicReport:
    """Diagnostics of one decomposition against its path.

    k1_time_fraction is the share of total time spent in K1 excursions;
    excursion_residual is the K0 deviation from perfect averaging,
    sum_k |int sin^2 X - (tau_k - eta_k)/2| normalized by the K0 time; the
    duration flag checks tau-eta <= 4*pi/|Y_eta| (all) and >= pi/|Y_eta|
    (K0) with 2*dt slack.
    """
    if decomp.dt != path.dt:
        raise ValueError("decomposition and path use different grids")
    dt = path.dt
    n = path.y.size
    total_time = (n - 1) * dt

    avg = ergodic_average_sin2(path.x_unwrapped, dt)
    occ = occupation_fraction(path.y, decomp.threshold)

    if decomp.excursion_count == 0:
        return ErgodicReport(
            average=avg,
            occupation_fraction=occ,
            k1_time_fraction=0.0,
            excursion_residual=0.0,
            duration_bounds_ok=True,
        )

    durations = decomp.durations()
    k1_time = float(durations[decomp.is_k1].sum())

    integral = _cumulative_trapezoid(np.sin(path.x_unwrapped) ** 2, dt)
    seg = integral[decomp.tau] - integral[decomp.eta]
    k0 = ~decomp.is_k1
    resid = 0.0
    if np.any(k0):
        num = float(np.abs(seg[k0] - 0.5 * durations[k0]).sum())
        den = float(durations[k0].sum())
        resid = num / den if den > 0 else 0.0

    abs_y = np.abs(decomp.y_eta)
    upper_ok = bool(np.all(durations <= 4.0 * np.pi / abs_y + 2.0 * dt))
    lower_ok = bool(np.all(durations[k0] >= np.pi / abs_y[k0] - 2.0 * dt))

    return ErgodicReport(
        average=avg,
        occupation_fraction=occ,
        k1_time_fraction=k1_time / total_time,
        excursion_residual=resid,
        duration_bounds_ok=upper_ok and lower_ok,
    )


def write_decomposition_csv(decomp: PathDecomposition, path) -> None:
    """Export `k,eta,tau,class,Y_eta,winding` rows for audit and plotting."""
    with open(path, "w", newline="") as fh:
        fh.write("k,eta,tau,class,Y_eta,winding\n")
        for k in range(decomp.excursion_count):
            cls = "K1" if decomp.is_k1[k] else "K0"
            fh.write(
                f"{k + 1},{decomp.eta[k]},{decomp.tau[k]},{cls},"
                f"{decomp.y_eta[k]:.17g},{decomp.winding[k]:.17g}\n"
            )
