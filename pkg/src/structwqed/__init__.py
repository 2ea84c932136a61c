"""Excitation transport in 1D emitter arrays with site-programmable
waveguide coupling directionality."""

from .pattern import (DirectionalityPattern, PatternError, builtin_structure,
                      expand, parse_pattern, serialize)
from .model import (DirectionalRates, ModelError, PropagatorMatrix, SystemConfig,
                    build_propagator, directional_rates, propagator_for)
from .dynamics import (AmplitudeState, Trajectory, analytic_s3_four_atom, both_edges,
                       custom, evolve_ode, evolve_spectral, mode_quench, single_site)
from .spectral import (ConditioningError, ModeSelection, SpectralDecomposition,
                       beat_frequencies, classify_modes, decompose, overlaps)
from .observables import (spread, steady_spread, subradiance_ratio)
from .sweep import SweepSpec, SweepResult, resume_sweep, run_sweep

__all__ = [
    "DirectionalityPattern", "PatternError", "builtin_structure", "expand",
    "parse_pattern", "serialize",
    "DirectionalRates", "ModelError", "PropagatorMatrix", "SystemConfig",
    "build_propagator", "directional_rates", "propagator_for",
    "AmplitudeState", "Trajectory", "analytic_s3_four_atom", "both_edges",
    "custom", "evolve_ode", "evolve_spectral", "mode_quench", "single_site",
    "ConditioningError", "ModeSelection", "SpectralDecomposition",
    "beat_frequencies", "classify_modes", "decompose", "overlaps",
    "spread", "steady_spread", "subradiance_ratio",
    "SweepSpec", "SweepResult", "resume_sweep", "run_sweep",
]

__version__ = "0.1.0"
