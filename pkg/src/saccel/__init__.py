"""Monte Carlo laboratory for particles in a periodic stochastic acceleration field.

Simulates the single-particle, N-particle, and rescaled relative dynamics
driven by a shared periodized noise pair, plus the deterministic finite-wave
model, and verifies their limit statistics (Brownian momentum, quadratic
variation 1/2, ergodic averages, particle independence, occupation decay,
martingale tail bounds) at desk scale.
"""

__version__ = "0.1.0"

from .dynamics import (
    DiffusionEstimate,
    EnsembleTrajectory,
    ParticleState,
    ScalingParams,
    SeedEnsemble,
    estimate_diffusion,
    simulate_ensemble,
    simulate_seed_ensemble,
    step_particles,
    step_particles_euler,
    write_trajectory_csv,
)
from .ergodic import (
    ErgodicReport,
    PathDecomposition,
    decompose_path,
    ergodic_average_sin2,
    excursion_stats,
    occupation_fraction,
    write_decomposition_csv,
)
from .noise import (
    FieldRealization,
    TimeGrid,
    field_increment,
    load_field,
    period_endpoint_values,
    sample_base_field,
    save_field,
)
from .rescaling import (
    RelativeCoords,
    RescaledState,
    XYPath,
    grid_index,
    qv_of_vn,
    reconstruct_vn,
    relative_coords,
    rescale_map,
    simulate_uv,
    simulate_xy,
    write_series_csv,
)
from .rng import stream_rng, substream_seed
from .stats import (
    StatReport,
    TailBoundParams,
    binomial_upper_confidence,
    cross_variation,
    increment_correlations,
    kolmogorov_p_value,
    ks_normal,
    tail_bound_check,
)
from .waves import (
    WaveSpectrum,
    WaveTrajectory,
    overlap_parameter,
    simulate_finite_waves,
    simulate_wave_phase_ensemble,
)
