"""Semiclassical model and coincidence analysis for stimulated photon-triplet generation."""
from .coincidence import (
    CoincidenceResult,
    DetectionSetup,
    check_single_triplet_criterion,
    estimator_roundtrip,
    fit_transfer_function,
    forward_coincidence_fraction,
    invert_coincidence_fraction,
    simulate_pulses,
)
from .config import ExperimentConfig, load_config
from .model import (
    FieldState,
    FluxResult,
    InteractionConfig,
    gain_parameter_beta,
    integrated_flux,
    propagate_coupled_waves,
    psi_factor,
    quantum_efficiency,
    triplet_flux_full,
    triplet_flux_simplified,
    triplets_per_pulse,
)
from .optics import (
    CONST,
    BeamGeometry,
    CrystalConfig,
    OpticalMode,
    PhysicalConstants,
    Role,
    angular_frequency,
    energy_to_field,
    field_to_energy,
    kappa,
    overlap_factor,
    phase_mismatch,
    photons_per_second,
    spectral_width_to_rad,
    vacuum_field_amplitude,
)
from .pipeline import absolute_curve, builtin_table1, emit_csv, emit_svg_plot, run_set

__version__ = "0.1.0"
