"""Two-photon transport through a waveguide side-coupled to a lossy Kerr cavity."""

from .appendix import (
    ScatteringState,
    build_scattering_state,
    reconstruct_outgoing,
    residual_check,
    residual_report,
)
from .core import (
    CoordinatePair,
    SystemParams,
    TwoPhotonInput,
    gamma_from_coupling,
    incoming_wavefunction,
    single_photon_amplitudes,
)
from .errors import (
    ConfigError,
    ConvergenceError,
    DimensionError,
    FanoPoleError,
    NoMinimumInRange,
    PoleError,
    RegionError,
    SignalTooSmall,
    UndefinedCorrelation,
    WqedError,
)
from .fano import (
    FanoShape,
    chi,
    eta_min_estimate,
    fano_eta_approx,
    fano_parameters,
    numeric_optimum_search,
    optimal_conditions,
)
from .lattice import LatticeModel, build_two_excitation_hamiltonian, extract_observables, propagate_wavepacket
from .oracle import OracleResult, chain_lineshape, run_oracle
from .scan import Axis, ScanSpec, run_scan
from .two_photon import (
    BoundStateCoefficient,
    ChannelAmplitudes,
    bound_state_coefficient,
    bound_state_parts,
    channel_amplitudes,
    correlation_eta,
    plane_wave_parts,
)

__all__ = [
    "Axis",
    "BoundStateCoefficient",
    "ChannelAmplitudes",
    "ConfigError",
    "ConvergenceError",
    "CoordinatePair",
    "DimensionError",
    "FanoPoleError",
    "FanoShape",
    "LatticeModel",
    "NoMinimumInRange",
    "OracleResult",
    "PoleError",
    "RegionError",
    "ScanSpec",
    "ScatteringState",
    "SignalTooSmall",
    "SystemParams",
    "TwoPhotonInput",
    "UndefinedCorrelation",
    "WqedError",
    "bound_state_coefficient",
    "bound_state_parts",
    "build_scattering_state",
    "build_two_excitation_hamiltonian",
    "chain_lineshape",
    "channel_amplitudes",
    "chi",
    "correlation_eta",
    "eta_min_estimate",
    "extract_observables",
    "fano_eta_approx",
    "fano_parameters",
    "gamma_from_coupling",
    "incoming_wavefunction",
    "numeric_optimum_search",
    "optimal_conditions",
    "plane_wave_parts",
    "propagate_wavepacket",
    "reconstruct_outgoing",
    "residual_check",
    "residual_report",
    "run_oracle",
    "run_scan",
    "single_photon_amplitudes",
]
