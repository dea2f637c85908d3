"""N-particle momentum dynamics driven by one shared noise realization.

The state of a particle is (q, p) with q on the circle [0, 2*pi).  One time
step is a symmetric drift-kick-drift splitting:

    q <- q + A*p*dt/2  (mod 2*pi)
    p <- p + sin(q)*dC + cos(q)*dS
    q <- q + A*p*dt/2  (mod 2*pi)

The kick is exact given the mid-step position because the noise
coefficients depend on position only, and every particle in an ensemble
consumes the same (dC, dS) — the field is the shared environment.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np
from numba import njit
from scipy import stats as sp_stats

from .noise import TWO_PI, FieldRealization, TimeGrid, sample_base_field
from .rng import substream_seed

_SQRT_PI = np.sqrt(np.pi)


@dataclass(frozen=True)
class ParticleState:
    """Single particle: position q reduced mod 2*pi, momentum p."""

    q: float
    p: float

    def __post_init__(self):
        object.__setattr__(self, "q", float(self.q) % TWO_PI)
        object.__setattr__(self, "p", float(self.p))


@dataclass(frozen=True)
class ScalingParams:
    """Coupling amplitude A (= 1/mass) and the derived rate n = sqrt(pi)*A."""

    A: float
    n: float = dc_field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if self.A < 0.0:
            raise ValueError(f"coupling amplitude A must be >= 0, got {self.A}")
        derived = _SQRT_PI * self.A
        if self.n is None:
            object.__setattr__(self, "n", derived)
        elif abs(self.n - derived) > 1e-12 * max(1.0, derived):
            raise ValueError(f"n={self.n} inconsistent with sqrt(pi)*A={derived}")

    @classmethod
    def from_n(cls, n: float) -> "ScalingParams":
        return cls(A=n / _SQRT_PI)


@dataclass(frozen=True)
class EnsembleTrajectory:
    """Recorded paths of N particles driven by one field realization."""

    sample_steps: np.ndarray  # int64 global step indices, starting at 0
    q: np.ndarray  # (N, n_samples), positions mod 2*pi
    p: np.ndarray  # (N, n_samples)
    dt: float
    field_seed: int
    params: ScalingParams

    @property
    def particle_count(self) -> int:
        return self.q.shape[0]

    @property
    def times(self) -> np.ndarray:
        return self.sample_steps * self.dt


@dataclass(frozen=True)
class SeedEnsemble:
    """Paths of the same N-particle initial data across many field seeds."""

    sample_steps: np.ndarray  # int64
    q: np.ndarray  # (n_seeds, N, n_samples)
    p: np.ndarray  # (n_seeds, N, n_samples)
    dt: float
    field_seeds: np.ndarray  # (n_seeds,) uint64
    params: ScalingParams

    @property
    def times(self) -> np.ndarray:
        return self.sample_steps * self.dt


def step_particles(q, p, dC: float, dS: float, dt: float, params: ScalingParams):
    """One drift-kick-drift step for an array of particles.

    All particles see the same increments (dC, dS).  Returns new (q, p);
    inputs are not modified.
    """
    if not dt > 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    half = 0.5 * params.A * dt
    q_mid = (q + half * p) % TWO_PI
    p_new = p + np.sin(q_mid) * dC + np.cos(q_mid) * dS
    q_new = (q_mid + half * p_new) % TWO_PI
    return q_new, p_new


def step_particles_euler(q, p, dC: float, dS: float, dt: float, params: ScalingParams):
    """Explicit left-endpoint step; converges to the same solutions.

    Kept as the alternative scheme for the scheme-equivalence check (the
    noise coefficients commute, so no drift correction distinguishes the
    two integrals).
    """
    if not dt > 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    p_new = p + np.sin(q) * dC + np.cos(q) * dS
    q_new = (q + params.A * dt * p) % TWO_PI
    return q_new, p_new


@njit(cache=True, nogil=True)
def _strang_kernel(q, p, dC, dS, a, dt, horizon_steps, record_steps, out_q, out_p):
    # q, p: (n_fields, N) state, advanced in place.
    # dC, dS: (n_fields, steps_per_period); reused modulo the period.
    two_pi = 2.0 * np.pi
    n_fields, n_particles = q.shape
    spp = dC.shape[1]
    half = 0.5 * a * dt
    r = 0
    if record_steps.shape[0] > 0 and record_steps[0] == 0:
        for s in range(n_fields):
            for i in range(n_particles):
                out_q[s, i, 0] = q[s, i]
                out_p[s, i, 0] = p[s, i]
        r = 1
    for step in range(horizon_steps):
        j = step % spp
        for s in range(n_fields):
            c = dC[s, j]
            d = dS[s, j]
            for i in range(n_particles):
                qq = (q[s, i] + half * p[s, i]) % two_pi
                pp = p[s, i] + np.sin(qq) * c + np.cos(qq) * d
                qq = (qq + half * pp) % two_pi
                q[s, i] = qq
                p[s, i] = pp
        if r < record_steps.shape[0] and record_steps[r] == step + 1:
            for s in range(n_fields):
                for i in range(n_particles):
                    out_q[s, i, r] = q[s, i]
                    out_p[s, i, r] = p[s, i]
            r += 1


def _record_steps(horizon_steps: int, sample_every: int) -> np.ndarray:
    if sample_every < 1:
        raise ValueError("sample_every must be >= 1")
    steps = np.arange(0, horizon_steps + 1, sample_every, dtype=np.int64)
    if steps[-1] != horizon_steps:
        steps = np.append(steps, np.int64(horizon_steps))
    return steps


def simulate_ensemble(
    q0,
    p0,
    params: ScalingParams,
    field: FieldRealization,
    horizon_steps: int,
    sample_every: int = 1,
) -> EnsembleTrajectory:
    """Integrate N particles through one shared field realization.

    Records states every `sample_every` steps, always including step 0 and
    the final step.  Periodization past one period comes from index reuse
    of the field increments.
    """
    q0 = np.atleast_1d(np.asarray(q0, dtype=float)) % TWO_PI
    p0 = np.atleast_1d(np.asarray(p0, dtype=float))
    if q0.shape != p0.shape or q0.ndim != 1 or q0.size < 1:
        raise ValueError("q0 and p0 must be 1-d arrays of equal positive length")
    if horizon_steps < 0:
        raise ValueError("horizon_steps must be >= 0")

    n = q0.size
    dt = field.grid.dt
    if horizon_steps == 0:
        steps = np.zeros(1, dtype=np.int64)
        return EnsembleTrajectory(
            sample_steps=steps,
            q=q0.reshape(n, 1).copy(),
            p=p0.reshape(n, 1).copy(),
            dt=dt,
            field_seed=field.seed,
            params=params,
        )

    steps = _record_steps(horizon_steps, sample_every)
    q = q0.reshape(1, n).copy()
    p = p0.reshape(1, n).copy()
    out_q = np.empty((1, n, steps.size))
    out_p = np.empty((1, n, steps.size))
    _strang_kernel(
        q,
        p,
        field.dC.reshape(1, -1),
        field.dS.reshape(1, -1),
        params.A,
        dt,
        horizon_steps,
        steps,
        out_q,
        out_p,
    )
    return EnsembleTrajectory(
        sample_steps=steps,
        q=out_q[0],
        p=out_p[0],
        dt=dt,
        field_seed=field.seed,
        params=params,
    )


def simulate_seed_ensemble(
    q0,
    p0,
    params: ScalingParams,
    grid: TimeGrid,
    master_seed: int,
    n_seeds: int,
    horizon_steps: int,
    sample_every: int = 1,
    seed_offset: int = 0,
) -> SeedEnsemble:
    """Same initial data pushed through `n_seeds` independent field realizations.

    Field seeds derive from (master_seed, seed_offset + i), so any contiguous
    chunk of the ensemble can be computed independently and the result does
    not depend on chunking.
    """
    if n_seeds < 1:
        raise ValueError("n_seeds must be >= 1")
    q0 = np.atleast_1d(np.asarray(q0, dtype=float)) % TWO_PI
    p0 = np.atleast_1d(np.asarray(p0, dtype=float))
    n = q0.size
    spp = grid.steps_per_period

    seeds = np.empty(n_seeds, dtype=np.uint64)
    dC = np.empty((n_seeds, spp))
    dS = np.empty((n_seeds, spp))
    for i in range(n_seeds):
        s = substream_seed(master_seed, seed_offset + i)
        seeds[i] = s
        f = sample_base_field(grid, s)
        dC[i] = f.dC
        dS[i] = f.dS

    steps = _record_steps(horizon_steps, sample_every)
    q = np.broadcast_to(q0, (n_seeds, n)).copy()
    p = np.broadcast_to(p0, (n_seeds, n)).copy()
    out_q = np.empty((n_seeds, n, steps.size))
    out_p = np.empty((n_seeds, n, steps.size))
    _strang_kernel(q, p, dC, dS, params.A, grid.dt, horizon_steps, steps, out_q, out_p)
    return SeedEnsemble(
        sample_steps=steps,
        q=out_q,
        p=out_p,
        dt=grid.dt,
        field_seeds=seeds,
        params=params,
    )


@dataclass(frozen=True)
class DiffusionEstimate:
    D: float
    ci_low: float
    ci_high: float
    stderr: float
    window: tuple


def estimate_diffusion(
    p_paths: np.ndarray,
    times: np.ndarray,
    t_window: tuple,
    n_groups: int = 10,
) -> DiffusionEstimate:
    """Least-squares slope of Var(p_t - p_0) over a time window.

    The confidence interval comes from splitting the ensemble into
    `n_groups` blocks and fitting the slope per block: variance estimates at
    different times share the same paths, so a plain regression standard
    error would be badly anti-conservative.
    """
    p_paths = np.asarray(p_paths, dtype=float)
    times = np.asarray(times, dtype=float)
    t1, t2 = t_window
    if not t2 > t1 or t1 < 0:
        raise ValueError(f"degenerate window {t_window}")
    if p_paths.ndim != 2 or p_paths.shape[0] < 30:
        raise ValueError("need an ensemble of at least 30 momentum paths")
    mask = (times >= t1) & (times <= t2)
    if mask.sum() < 2:
        raise ValueError("window contains fewer than 2 sample times")

    delta = p_paths - p_paths[:, :1]
    t_sel = times[mask]
    var_all = delta[:, mask].var(axis=0, ddof=1)
    if np.max(var_all) <= 0.0:
        raise ValueError("constant paths: zero variance in window")

    n_paths = p_paths.shape[0]
    n_groups = max(2, min(n_groups, n_paths // 15))
    bounds = np.linspace(0, n_paths, n_groups + 1, dtype=int)
    slopes = np.empty(n_groups)
    for g in range(n_groups):
        block = delta[bounds[g] : bounds[g + 1], :][:, mask]
        var_g = block.var(axis=0, ddof=1)
        slopes[g] = np.polyfit(t_sel, var_g, 1)[0]

    d_full = float(np.polyfit(t_sel, var_all, 1)[0])
    se = float(np.std(slopes, ddof=1) / np.sqrt(n_groups))
    half = float(sp_stats.t.ppf(0.975, n_groups - 1)) * se
    center = float(np.mean(slopes))
    return DiffusionEstimate(
        D=d_full,
        ci_low=center - half,
        ci_high=center + half,
        stderr=se,
        window=(float(t1), float(t2)),
    )


def write_trajectory_csv(traj: EnsembleTrajectory, path) -> None:
    """Export `t,particle,q,p` rows, one per sample time per particle."""
    times = traj.times
    with open(path, "w", newline="") as fh:
        fh.write("t,particle,q,p\n")
        for i in range(traj.particle_count):
            for k in range(times.size):
                fh.write(
                    f"{times[k]:.17g},{i},{traj.q[i, k]:.17g},{traj.p[i, k]:.17g}\n"
                )
