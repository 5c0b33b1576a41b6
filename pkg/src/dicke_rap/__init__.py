"""Dicke-ladder rapid-adiabatic-passage simulation toolkit."""

from .errors import (
    ConfigError,
    ContractError,
    ContrastUndefinedError,
    DickeRapError,
    DomainError,
    IntegrationError,
    NumericalError,
    TargetNotFoundError,
)
from .metrics import (
    QfiTriple,
    dicke_qfi_analytic,
    gain_db,
    qfi,
    qfi_triple,
    superposition_qfi_analytic,
    wineland_xi2,
)
from .propagator import (
    Trace,
    free_evolve_oat,
    instantaneous_spectrum,
    propagate,
)
from .schedules import (
    ChirpSchedule,
    CouplingSchedule,
    Schedule,
    beta_at,
    crossing_period,
    crossing_times,
    dicke_protocol,
    ess_protocol,
    omega_at,
)
from .spin_core import (
    SpinState,
    SpinSystem,
    coherent_state,
    dicke_state,
    expectation,
    fidelity,
    ladder_coeffs,
)
from .targets import EssTarget, ess_for_contrast, ess_ground_state
from .wigner import (
    MultipoleDecomposition,
    SphereField,
    clebsch_gordan,
    multipole_components,
    wigner_grid,
)

__version__ = "0.1.0"

__all__ = [
    "ChirpSchedule", "ConfigError", "ContractError", "ContrastUndefinedError",
    "CouplingSchedule", "DickeRapError", "DomainError", "EssTarget",
    "IntegrationError", "MultipoleDecomposition", "NumericalError", "QfiTriple",
    "Schedule", "SphereField", "SpinState", "SpinSystem", "TargetNotFoundError",
    "Trace", "beta_at", "clebsch_gordan", "coherent_state", "crossing_period",
    "crossing_times", "dicke_protocol", "dicke_qfi_analytic", "dicke_state",
    "ess_for_contrast", "ess_ground_state", "ess_protocol", "expectation",
    "fidelity", "free_evolve_oat", "gain_db", "instantaneous_spectrum",
    "ladder_coeffs", "multipole_components", "omega_at", "propagate", "qfi",
    "qfi_triple", "superposition_qfi_analytic", "wigner_grid", "wineland_xi2",
]
