"""Critical quantum sensing with chains of parametrically coupled Kerr resonators.

Gaussian closed forms (``gaussian``, ``chain``), near-critical and continuum
asymptotics (``asymptotics``), first-order Kerr corrections (``perturbation``),
a truncated Fock-space reference solver (``oracle``) and the figure/validation
commands (``experiments``, ``cli``).
"""
from .chain import (
    ChainSolution,
    ModeData,
    SystemParams,
    chain_ground_state,
    chain_local_photons,
    chain_qfi,
    distance_for_local_photons,
    epsilon_for_local_photons,
    fbz_momenta,
    independent_ensemble_qfi,
    photon_fractions,
)
from .errors import (
    CapacityError,
    ConvergenceError,
    DegenerateInputWarning,
    DomainError,
    GaugeError,
    KerrChainError,
)
from .gaussian import (
    Resources,
    SingleModeSolution,
    single_mode_diagonalize,
    single_mode_qfi,
    single_mode_resources,
    two_mode_qfi,
)

__version__ = "0.1.0"

__all__ = [
    "CapacityError",
    "ChainSolution",
    "ConvergenceError",
    "DegenerateInputWarning",
    "DomainError",
    "GaugeError",
    "KerrChainError",
    "ModeData",
    "Resources",
    "SingleModeSolution",
    "SystemParams",
    "chain_ground_state",
    "chain_local_photons",
    "chain_qfi",
    "distance_for_local_photons",
    "epsilon_for_local_photons",
    "fbz_momenta",
    "independent_ensemble_qfi",
    "photon_fractions",
    "single_mode_diagonalize",
    "single_mode_qfi",
    "single_mode_resources",
    "two_mode_qfi",
]
