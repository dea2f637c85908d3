"""Sampling, storage, and exact periodization of the driving noise pair.

The random environment is a pair (C, S) of independent scaled Brownian
motions, represented at grid resolution by their increments over a single
period of length 2*pi.  Each increment is Gaussian with mean 0 and variance
pi*dt.  The field seen at any later time reuses the same increments, index
modulo steps_per_period, which makes the periodization exact at grid scale.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .rng import stream_rng

TWO_PI = 2.0 * np.pi

# Domain tag so field sampling never shares a stream with other draws
# made from the same integer seed.
_FIELD_STREAM = 0x4649454C44

_MAGIC = b"SAFLD1"
_HEADER = struct.Struct("<dQQ")  # dt, steps_per_period, seed


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid with an integer number of steps per 2*pi period."""

    dt: float
    steps_per_period: int
    horizon_steps: int

    def __post_init__(self):
        if self.steps_per_period < 1:
            raise ValueError("steps_per_period must be a positive integer")
        if self.horizon_steps < 1:
            raise ValueError("horizon_steps must be >= 1")
        if not self.dt > 0.0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if abs(self.steps_per_period * self.dt - TWO_PI) > 1e-12 * TWO_PI:
            raise ValueError(
                "steps_per_period * dt must equal 2*pi "
                f"(got {self.steps_per_period * self.dt!r})"
            )

    @classmethod
    def from_steps(cls, steps_per_period: int, horizon_steps: int | None = None) -> "TimeGrid":
        """Grid with dt = 2*pi/steps_per_period; horizon defaults to one period."""
        if steps_per_period < 1:
            raise ValueError("steps_per_period must be a positive integer")
        if horizon_steps is None:
            horizon_steps = steps_per_period
        return cls(
            dt=TWO_PI / steps_per_period,
            steps_per_period=steps_per_period,
            horizon_steps=horizon_steps,
        )

    @property
    def horizon_time(self) -> float:
        return self.horizon_steps * self.dt


@dataclass(frozen=True)
class FieldRealization:
    """One sampled period of (dC, dS) increments; immutable once sampled."""

    grid: TimeGrid
    dC: np.ndarray
    dS: np.ndarray
    seed: int

    def __post_init__(self):
        spp = self.grid.steps_per_period
        if self.dC.shape != (spp,) or self.dS.shape != (spp,):
            raise ValueError("increment arrays must have shape (steps_per_period,)")
        self.dC.flags.writeable = False
        self.dS.flags.writeable = False


def sample_base_field(grid: TimeGrid, seed: int) -> FieldRealization:
    """Draw one field realization: i.i.d. N(0, pi*dt) increments for dC and dS.

    Deterministic for fixed (grid, seed); the two arrays are mutually
    independent streams of the same generator.
    """
    rng = stream_rng(seed, _FIELD_STREAM)
    sigma = np.sqrt(np.pi * grid.dt)
    dC = rng.normal(0.0, sigma, size=grid.steps_per_period)
    dS = rng.normal(0.0, sigma, size=grid.steps_per_period)
    return FieldRealization(grid=grid, dC=dC, dS=dS, seed=seed)


def field_increment(field: FieldRealization, step_index: int) -> tuple[float, float]:
    """Increments (dC, dS) for a global step index, periodized exactly.

    Index arithmetic only: step i reads the base arrays at i mod
    steps_per_period, so increments repeat identically every period.
    """
    j = step_index % field.grid.steps_per_period
    return float(field.dC[j]), float(field.dS[j])


def period_endpoint_values(field: FieldRealization) -> tuple[float, float]:
    """(C, S) at the end of one period: partial sums of the increments."""
    return float(field.dC.sum()), float(field.dS.sum())


def save_field(field: FieldRealization, path) -> None:
    """Binary dump: magic, (dt, steps_per_period, seed) header, dC then dS.

    Doubles are little-endian IEEE-754; used for cross-run reproducibility
    checks.
    """
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(_HEADER.pack(field.grid.dt, field.grid.steps_per_period, field.seed))
        fh.write(np.ascontiguousarray(field.dC, dtype="<f8").tobytes())
        fh.write(np.ascontiguousarray(field.dS, dtype="<f8").tobytes())


def load_field(path) -> FieldRealization:
    """Load a field written by `save_field`; horizon defaults to one period."""
    with open(path, "rb") as fh:
        magic = fh.read(len(_MAGIC))
        if magic != _MAGIC:
            raise ValueError(f"not a field dump (bad magic {magic!r})")
        dt, spp, seed = _HEADER.unpack(fh.read(_HEADER.size))
        body = fh.read()
    spp = int(spp)
    expected = 2 * spp * 8
    if len(body) != expected:
        raise ValueError(f"truncated field dump: {len(body)} body bytes, expected {expected}")
    data = np.frombuffer(body, dtype="<f8")
    grid = TimeGrid(dt=dt, steps_per_period=spp, horizon_steps=spp)
    return FieldRealization(
        grid=grid, dC=data[:spp].copy(), dS=data[spp:].copy(), seed=int(seed)
    )
