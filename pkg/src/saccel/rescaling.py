"""Slow-variable system, relative two-particle coordinates, and scaling maps.

The slow system is

    dX/dt = Y,    dY = sin(X) dB,

on the cylinder [0, 2*pi) x R minus the two rest points (0, 0) and (pi, 0).
The fast relative dynamics (U, V) of a particle pair maps onto (X, Y)
through the time change t -> n**(2/3) t and amplitude change Y = n**(1/3) V,
and both directions of that map are exact index arithmetic on aligned
grids: nothing here interpolates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .dynamics import EnsembleTrajectory
from .noise import TWO_PI, FieldRealization
from .rng import stream_rng

_SQRT_PI = np.sqrt(np.pi)

# Rest points of the slow system, excluded as initial data.
_SINGULAR = ((0.0, 0.0), (np.pi, 0.0))

# Stream tag for the slow-system driving noise.
_XY_STREAM = 0x58595858


@dataclass(frozen=True)
class RescaledState:
    """Point of the slow system; rejects the two rest points exactly."""

    x: float
    y: float

    def __post_init__(self):
        x = float(self.x) % TWO_PI
        y = float(self.y)
        if (x, y) in _SINGULAR:
            raise ValueError(f"({x}, {y}) is a rest point, outside the state space")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)


@dataclass(frozen=True)
class XYPath:
    """Sampled path of the slow system.

    `x_unwrapped` accumulates the true displacement (no modulo), which is
    what winding detection needs; the circle coordinate is recovered on
    demand.
    """

    dt: float
    x_unwrapped: np.ndarray
    y: np.ndarray
    seed: int | None = None
    sample_every: int = 1

    @property
    def x(self) -> np.ndarray:
        return self.x_unwrapped % TWO_PI

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.x_unwrapped.size) * self.dt

    def min_singular_distance(self) -> float:
        """Smallest distance from the path to either rest point.

        Distance to the set: min over the two points of the cylinder metric
        (circular in x, Euclidean in y).  Strictly positive on every healthy
        run.
        """
        x = self.x
        best = np.inf
        for sx, sy in _SINGULAR:
            dx = np.abs(x - sx)
            dx = np.minimum(dx, TWO_PI - dx)
            d = np.sqrt(dx * dx + (self.y - sy) ** 2)
            best = min(best, float(d.min()))
        return best


@njit(cache=True, nogil=True)
def _xy_chunk(state, db, dt, stride, step0, out_xu, out_y):
    # state = [x_unwrapped, y]; writes samples for global steps that are
    # multiples of stride.  step0 = completed steps before this chunk.
    xu = state[0]
    y = state[1]
    for i in range(db.shape[0]):
        xu += 0.5 * y * dt
        y += np.sin(xu) * db[i]
        xu += 0.5 * y * dt
        g = step0 + i + 1
        if g % stride == 0:
            out_xu[g // stride] = xu
            out_y[g // stride] = y
    state[0] = xu
    state[1] = y


def simulate_xy(
    x0: float,
    y0: float,
    seed: int | None,
    dt: float,
    horizon: float,
    sample_every: int = 1,
    chunk_steps: int = 262144,
    increments: np.ndarray | None = None,
) -> XYPath:
    """Integrate the slow system with fresh Gaussian increments of variance dt.

    Drift-kick-drift splitting, deterministic per seed.  Increments are
    drawn in chunks so arbitrarily long horizons run in bounded memory; an
    explicit `increments` array (test fixtures, exact-equivalence checks)
    overrides the seeded draw.
    """
    start = RescaledState(x0, y0)  # validates against the rest points
    if not dt > 0.0:
        raise ValueError("dt must be positive")
    n_steps = int(round(horizon / dt))
    if n_steps < 1:
        raise ValueError("horizon shorter than one step")
    if sample_every < 1:
        raise ValueError("sample_every must be >= 1")
    if increments is None and seed is None:
        raise ValueError("need a seed or explicit increments")

    n_out = n_steps // sample_every + 1
    out_xu = np.empty(n_out)
    out_y = np.empty(n_out)
    out_xu[0] = start.x
    out_y[0] = start.y
    state = np.array([start.x, start.y])
    if increments is not None:
        increments = np.ascontiguousarray(increments, dtype=float)
        if increments.size != n_steps:
            raise ValueError(f"need {n_steps} increments, got {increments.size}")
        _xy_chunk(state, increments, dt, sample_every, 0, out_xu, out_y)
    else:
        rng = stream_rng(seed, _XY_STREAM)
        sigma = np.sqrt(dt)
        done = 0
        while done < n_steps:
            m = min(chunk_steps, n_steps - done)
            db = rng.normal(0.0, sigma, size=m)
            _xy_chunk(state, db, dt, sample_every, done, out_xu, out_y)
            done += m
    return XYPath(dt=dt * sample_every, x_unwrapped=out_xu, y=out_y, seed=seed,
                  sample_every=sample_every)


def simulate_uv(
    u0: float,
    v0: float,
    n: float,
    dt: float,
    horizon: float,
    seed: int | None = None,
    increments: np.ndarray | None = None,
):
    """Integrate the fast relative system du/dt = n*v, dv = sin(u) dW.

    Same splitting as `simulate_xy`.  `increments` (variance dt each)
    overrides the seeded draw, which is how the discrete equivalence with
    the slow system is exercised.  Returns (u_unwrapped, v) arrays.
    """
    if not n > 0.0:
        raise ValueError("n must be positive")
    if not dt > 0.0:
        raise ValueError("dt must be positive")
    n_steps = int(round(horizon / dt))
    if increments is None:
        if seed is None:
            raise ValueError("need a seed or explicit increments")
        increments = stream_rng(seed, _XY_STREAM).normal(0.0, np.sqrt(dt), size=n_steps)
    increments = np.asarray(increments, dtype=float)
    if increments.size != n_steps:
        raise ValueError(f"need {n_steps} increments, got {increments.size}")

    u = np.empty(n_steps + 1)
    v = np.empty(n_steps + 1)
    u[0] = float(u0)
    v[0] = float(v0)
    uu, vv = float(u0), float(v0)
    half = 0.5 * n * dt
    for i in range(n_steps):
        uu += half * vv
        vv += np.sin(uu) * increments[i]
        uu += half * vv
        u[i + 1] = uu
        v[i + 1] = vv
    return u, v


@dataclass(frozen=True)
class RelativeCoords:
    """Half-difference / half-sum coordinates of one particle pair."""

    dt: float
    u: np.ndarray
    v: np.ndarray
    u_prime: np.ndarray
    v_prime: np.ndarray
    w_increments: np.ndarray
    degenerate: bool


def relative_coords(
    traj_a: EnsembleTrajectory,
    traj_b: EnsembleTrajectory,
    field: FieldRealization,
    particle_a: int = 0,
    particle_b: int = 0,
) -> RelativeCoords:
    """Reduce a particle pair to relative coordinates and rebuild its driver.

    u = (q_a - q_b)/2, v = (p_a - p_b)/(2*sqrt(pi)), primes the half-sums.
    The increments of the driving martingale are

        dW = (cos(u') dC - sin(u') dS) / sqrt(pi)

    evaluated at the same mid-step positions the kick used, which makes
    dv = sin(u) dW hold exactly step by step.  Requires both trajectories
    to come from `field` and to be sampled at every step.
    """
    if traj_a.field_seed != traj_b.field_seed or traj_a.field_seed != field.seed:
        raise ValueError("trajectories must share the given field realization")
    if traj_a.dt != traj_b.dt or traj_a.dt != field.grid.dt:
        raise ValueError("mismatched grids")
    if traj_a.sample_steps.shape != traj_b.sample_steps.shape or np.any(
        traj_a.sample_steps != traj_b.sample_steps
    ):
        raise ValueError("mismatched sample grids")
    if traj_a.params != traj_b.params:
        raise ValueError("trajectories integrated with different coupling")
    steps = traj_a.sample_steps
    if steps.size < 2 or np.any(np.diff(steps) != 1):
        raise ValueError("driver reconstruction needs per-step sampling")

    qa = traj_a.q[particle_a]
    pa = traj_a.p[particle_a]
    qb = traj_b.q[particle_b]
    pb = traj_b.p[particle_b]
    degenerate = bool(np.array_equal(qa, qb) and np.array_equal(pa, pb))

    u = 0.5 * (qa - qb)
    u_prime = 0.5 * (qa + qb)
    v = (pa - pb) / (2.0 * _SQRT_PI)
    v_prime = (pa + pb) / (2.0 * _SQRT_PI)

    half = 0.5 * traj_a.params.A * traj_a.dt
    j = steps[:-1] % field.grid.steps_per_period
    dC = field.dC[j]
    dS = field.dS[j]
    qa_mid = (qa[:-1] + half * pa[:-1]) % TWO_PI
    qb_mid = (qb[:-1] + half * pb[:-1]) % TWO_PI
    up_mid = 0.5 * (qa_mid + qb_mid)
    dW = (np.cos(up_mid) * dC - np.sin(up_mid) * dS) / _SQRT_PI

    return RelativeCoords(
        dt=traj_a.dt,
        u=u,
        v=v,
        u_prime=u_prime,
        v_prime=v_prime,
        w_increments=dW,
        degenerate=degenerate,
    )


def grid_index(t: float, dt: float, rel_tol: float = 1e-9) -> int:
    """Index of time t on a dt-grid; errors off-grid (no interpolation)."""
    k = t / dt
    ki = int(round(k))
    if abs(k - ki) > rel_tol * max(1.0, abs(k)):
        raise ValueError(f"time {t} is not on the dt={dt} grid; align grids")
    return ki


def rescale_map(u_path, v_path, n: float, dt: float):
    """Map a sampled (u, v) path to the slow variables.

    Sample j of the output is (x, y) = (u_j, n**(1/3) * v_j) at slow time
    j * n**(2/3) * dt.  Returns (x, y, dt_out).  Pure index arithmetic.
    """
    if not n > 0.0:
        raise ValueError("n must be positive")
    u_path = np.asarray(u_path, dtype=float)
    v_path = np.asarray(v_path, dtype=float)
    if u_path.shape != v_path.shape:
        raise ValueError("u and v paths must have equal shape")
    scale = n ** (1.0 / 3.0)
    return u_path.copy(), scale * v_path, dt * n ** (2.0 / 3.0)


def reconstruct_vn(y_path, n: float, dt_slow: float):
    """Inverse amplitude/time map: v_j = n**(-1/3) * y_j at fast step dt_slow/n**(2/3).

    Round-trips with `rescale_map` on grid points to floating-point
    roundoff.
    """
    if not n > 0.0:
        raise ValueError("n must be positive")
    y_path = np.asarray(y_path, dtype=float)
    scale = n ** (1.0 / 3.0)
    return y_path / scale, dt_slow / n ** (2.0 / 3.0)


def qv_of_vn(v_path, sample_times, dt: float) -> np.ndarray:
    """Empirical quadratic variation of a sampled path at requested times.

    Cumulative sum of squared increments; `sample_times` must lie on the
    path's grid (off-grid requests raise).
    """
    v_path = np.asarray(v_path, dtype=float)
    if v_path.size < 2:
        raise ValueError("need at least 2 samples for a quadratic variation")
    qv = np.concatenate(([0.0], np.cumsum(np.diff(v_path) ** 2)))
    out = np.empty(len(sample_times))
    for i, t in enumerate(sample_times):
        k = grid_index(float(t), dt)
        if k < 0 or k >= qv.size:
            raise ValueError(f"time {t} outside the sampled path")
        out[i] = qv[k]
    return out


def write_series_csv(path, dt: float, **series) -> None:
    """Export named series on a shared grid as `t,series,value` rows."""
    allowed = {"x", "y", "u", "v", "w", "qv"}
    bad = set(series) - allowed
    if bad:
        raise ValueError(f"unknown series {sorted(bad)}; allowed: {sorted(allowed)}")
    with open(path, "w", newline="") as fh:
        fh.write("t,series,value\n")
        for name in sorted(series):
            values = np.asarray(series[name], dtype=float)
            for k, val in enumerate(values):
                fh.write(f"{k * dt:.17g},{name},{val:.17g}\n")
