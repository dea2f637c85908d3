"""Deterministic finite-wave model and its resonance/diffusion diagnostics.

A particle of mass m moves in M longitudinal waves of unit wavenumber whose
pulsations are the shifted integers m - M/2 (unit spacing in phase
velocity):

    qddot = (1/m) * sum_m A_m * sin(q - omega_m * t + phi_m)

With fixed amplitude A0 and independent uniform phases, overlapping
resonances produce momentum diffusion at rate pi*A0**2 for as long as the
motion stays inside the wave phase-velocity band.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .noise import TWO_PI


@dataclass(frozen=True)
class WaveSpectrum:
    """Amplitudes and phases of the M-wave field (k0 = 1)."""

    amplitudes: np.ndarray
    phases: np.ndarray
    k0: float = 1.0

    def __post_init__(self):
        amps = np.atleast_1d(np.asarray(self.amplitudes, dtype=float))
        phis = np.atleast_1d(np.asarray(self.phases, dtype=float)) % TWO_PI
        if amps.ndim != 1 or amps.size < 1:
            raise ValueError("spectrum must contain at least one wave")
        if amps.shape != phis.shape:
            raise ValueError("amplitudes and phases must have equal length")
        if not self.k0 > 0.0:
            raise ValueError("wavenumber k0 must be positive")
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "phases", phis)
        amps.flags.writeable = False
        phis.flags.writeable = False

    @property
    def wave_count(self) -> int:
        return self.amplitudes.size

    @property
    def pulsations(self) -> np.ndarray:
        m = self.wave_count
        return np.arange(m, dtype=float) - m / 2.0

    @property
    def phase_velocities(self) -> np.ndarray:
        return self.pulsations / self.k0

    @classmethod
    def with_random_phases(cls, wave_count: int, amplitude: float, rng) -> "WaveSpectrum":
        """Flat spectrum A_m = amplitude with i.i.d. uniform phases."""
        phases = rng.uniform(0.0, TWO_PI, size=wave_count)
        return cls(amplitudes=np.full(wave_count, float(amplitude)), phases=phases)


def overlap_parameter(spectrum: WaveSpectrum, mass: float, index: int) -> float:
    """Resonance overlap of waves `index` and `index + 1`.

    s = (2*sqrt(A_i/m) + 2*sqrt(A_{i+1}/m)) / |v_{i+1} - v_i|, the ratio of
    summed trapping widths to the phase-velocity gap.
    """
    if not mass > 0.0:
        raise ValueError("mass must be positive")
    if index < 0 or index + 1 >= spectrum.wave_count:
        raise ValueError(f"wave index {index} out of range for M={spectrum.wave_count}")
    v = spectrum.phase_velocities
    gap = abs(v[index + 1] - v[index])
    if gap == 0.0:
        raise ValueError("equal phase velocities: overlap parameter undefined")
    a0 = spectrum.amplitudes[index]
    a1 = spectrum.amplitudes[index + 1]
    if a0 < 0 or a1 < 0:
        raise ValueError("amplitudes must be nonnegative")
    return float((2.0 * np.sqrt(a0 / mass) + 2.0 * np.sqrt(a1 / mass)) / gap)


def _rk4_wave_ensemble(q0, u0, amplitudes, phases, mass, dt, n_steps, record_steps):
    """Classical RK4 on qddot = F(q, t)/m, vectorized over ensemble members.

    The force is evaluated as Im(exp(i*q) * g(t)) with
    g(t) = sum_m A_m exp(i*(phi_m - omega_m*t)), which is exact and turns
    the per-member wave sum into one complex matrix-vector product.
    """
    n_ens, m_waves = phases.shape
    omega = np.arange(m_waves, dtype=float) - m_waves / 2.0
    coeff = amplitudes[np.newaxis, :] * np.exp(1j * phases)  # (n_ens, M)
    inv_m = 1.0 / mass

    def accel(q, t):
        g = coeff @ np.exp(-1j * omega * t)
        return np.imag(np.exp(1j * q) * g) * inv_m

    q = np.array(q0, dtype=float, copy=True)
    u = np.array(u0, dtype=float, copy=True)
    out_q = np.empty((n_ens, record_steps.size))
    out_u = np.empty((n_ens, record_steps.size))
    r = 0
    if record_steps[0] == 0:
        out_q[:, 0] = q
        out_u[:, 0] = u
        r = 1
    h = dt
    for step in range(n_steps):
        t = step * h
        k1q = u
        k1u = accel(q, t)
        k2q = u + 0.5 * h * k1u
        k2u = accel(q + 0.5 * h * k1q, t + 0.5 * h)
        k3q = u + 0.5 * h * k2u
        k3u = accel(q + 0.5 * h * k2q, t + 0.5 * h)
        k4q = u + h * k3u
        k4u = accel(q + h * k3q, t + h)
        q = q + (h / 6.0) * (k1q + 2.0 * k2q + 2.0 * k3q + k4q)
        u = u + (h / 6.0) * (k1u + 2.0 * k2u + 2.0 * k3u + k4u)
        if r < record_steps.size and record_steps[r] == step + 1:
            out_q[:, r] = q
            out_u[:, r] = u
            r += 1
    return out_q, out_u


@dataclass(frozen=True)
class WaveTrajectory:
    times: np.ndarray
    q: np.ndarray
    qdot: np.ndarray


def simulate_finite_waves(
    initial: tuple,
    spectrum: WaveSpectrum,
    mass: float,
    dt: float,
    horizon: float,
    sample_every: int = 1,
) -> WaveTrajectory:
    """Integrate one particle through the deterministic M-wave field.

    `initial` is (q0, dq/dt at 0).  Warns when dt * sum|A_m| / m, the
    velocity change a full-strength force could produce in one step, is not
    small.
    """
    if not mass > 0.0:
        raise ValueError("mass must be positive")
    if not dt > 0.0 or not horizon > 0.0:
        raise ValueError("dt and horizon must be positive")
    force_bound = float(np.sum(np.abs(spectrum.amplitudes)))
    if dt * force_bound / mass > 0.1:
        warnings.warn(
            f"dt*max|force|/m = {dt * force_bound / mass:.3g} is not small; "
            "the step may under-resolve the fastest wave",
            stacklevel=2,
        )
    n_steps = int(round(horizon / dt))
    if n_steps < 1:
        raise ValueError("horizon shorter than one step")
    record = np.arange(0, n_steps + 1, sample_every, dtype=np.int64)
    if record[-1] != n_steps:
        record = np.append(record, np.int64(n_steps))
    q0, u0 = initial
    out_q, out_u = _rk4_wave_ensemble(
        np.array([float(q0)]),
        np.array([float(u0)]),
        spectrum.amplitudes,
        spectrum.phases.reshape(1, -1),
        mass,
        dt,
        n_steps,
        record,
    )
    return WaveTrajectory(times=record * dt, q=out_q[0], qdot=out_u[0])


def simulate_wave_phase_ensemble(
    q0: float,
    u0: float,
    wave_count: int,
    amplitude: float,
    mass: float,
    dt: float,
    horizon: float,
    n_ensemble: int,
    rng,
    sample_every: int = 1,
):
    """Momentum paths for `n_ensemble` independent phase draws.

    Returns (times, p) where p has shape (n_ensemble, n_samples) and
    p = mass * dq/dt.  All members share (q0, u0) and the flat amplitude.
    """
    if n_ensemble < 1:
        raise ValueError("n_ensemble must be >= 1")
    n_steps = int(round(horizon / dt))
    record = np.arange(0, n_steps + 1, sample_every, dtype=np.int64)
    if record[-1] != n_steps:
        record = np.append(record, np.int64(n_steps))
    phases = rng.uniform(0.0, TWO_PI, size=(n_ensemble, wave_count))
    amps = np.full(wave_count, float(amplitude))
    _, out_u = _rk4_wave_ensemble(
        np.full(n_ensemble, float(q0)),
        np.full(n_ensemble, float(u0)),
        amps,
        phases,
        mass,
        dt,
        n_steps,
        record,
    )
    return record * dt, mass * out_u
