"""Gaussian ground states of the single-mode and two-mode critical resonators.

Both models are quadratic, so their ground states are squeezed vacua obtained
from a Bogoliubov transformation ``a = t d - s d^dagger`` with ``t**2 - s**2 = 1``.
Everything here is a closed form in ``(omega, epsilon)``.

Near the critical point ``epsilon -> omega`` the difference ``omega**2 - epsilon**2``
loses every significant digit if evaluated naively. All functions therefore go
through the distance to criticality ``x = 1 - epsilon/omega`` and evaluate
``omega**2 * x * (2 - x)`` instead (``1 - epsilon/omega`` is exact in floating
point once ``epsilon/omega > 1/2``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from .errors import DomainError

__all__ = [
    "SingleModeSolution",
    "Resources",
    "distance_to_critical",
    "detuning_squared",
    "single_mode_diagonalize",
    "single_mode_qfi",
    "two_mode_qfi",
    "single_mode_resources",
]


def _check_domain(omega: float, epsilon: float) -> None:
    if not omega > 0:
        raise DomainError(f"omega must be positive, got {omega!r}")
    if not epsilon >= 0:
        raise DomainError(f"epsilon must be non-negative, got {epsilon!r}")
    if not epsilon < omega:
        raise DomainError(
            f"epsilon={epsilon!r} >= omega={omega!r}: no Bogoliubov transformation "
            "exists at or beyond the critical point"
        )


def _check_eta(eta: float) -> None:
    if not 0 < eta <= 1:
        raise DomainError(f"eta must lie in (0, 1], got {eta!r}")


def distance_to_critical(omega: float, epsilon: float) -> float:
    """Return ``x = 1 - epsilon/omega``."""
    return 1.0 - epsilon / omega


def detuning_squared(omega: float, x: float) -> float:
    """``omega**2 - epsilon**2`` written as ``omega**2 * x * (2 - x)``."""
    return omega * omega * x * (2.0 - x)


def _bogoliubov(omega: float, coupling: float, detuning_sq: float) -> tuple[float, float, float]:
    # coupling may be negative (chain modes with cos k < 0); s carries its sign
    lam = math.sqrt(detuning_sq)
    norm = math.sqrt(2.0 * detuning_sq + 2.0 * omega * lam)
    return lam, (lam + omega) / norm, coupling / norm


@dataclass(frozen=True)
class SingleModeSolution:
    """Bogoliubov solution of the single-mode squeezing Hamiltonian.

    Attributes
    ----------
    omega, epsilon : float
        Mode frequency and two-photon pump strength.
    lam : float
        Energy gap ``sqrt(omega**2 - epsilon**2)``.
    t, s : float
        Bogoliubov coefficients, ``t**2 - s**2 = 1``.
    xi : float
        Squeezing magnitude ``asinh(s)``.
    n_photons : float
        Ground-state photon number ``s**2``.
    """

    omega: float
    epsilon: float
    lam: float
    t: float
    s: float
    xi: float
    n_photons: float

    @property
    def x(self) -> float:
        return distance_to_critical(self.omega, self.epsilon)


def single_mode_diagonalize(omega: float, epsilon: float) -> SingleModeSolution:
    """Diagonalize ``omega a^dag a + epsilon/2 (a^2 + a^dag^2)``.

    Parameters
    ----------
    omega : float
        Mode frequency, ``omega > 0``.
    epsilon : float
        Squeezing strength, ``0 <= epsilon < omega``.

    Returns
    -------
    SingleModeSolution

    Raises
    ------
    DomainError
        If ``omega <= 0`` or ``epsilon`` is outside ``[0, omega)``.

    Examples
    --------
    >>> sol = single_mode_diagonalize(1.0, 0.6)
    >>> round(sol.lam, 12), round(sol.n_photons, 12)
    (0.8, 0.125)
    """
    _check_domain(omega, epsilon)
    d2 = detuning_squared(omega, distance_to_critical(omega, epsilon))
    lam, t, s = _bogoliubov(omega, epsilon, d2)
    return SingleModeSolution(
        omega=omega, epsilon=epsilon, lam=lam, t=t, s=s, xi=math.asinh(s), n_photons=s * s
    )


def single_mode_qfi(omega: float, epsilon: float) -> float:
    """QFI of the single-mode squeezed vacuum for estimating ``omega``.

    Returns ``epsilon**2 / (2 (omega**2 - epsilon**2)**2)``.
    """
    _check_domain(omega, epsilon)
    d2 = detuning_squared(omega, distance_to_critical(omega, epsilon))
    return epsilon * epsilon / (2.0 * d2 * d2)


def two_mode_qfi(omega: float, epsilon: float) -> float:
    """QFI of the two-mode squeezed vacuum, ``epsilon**2 / (omega**2 - epsilon**2)**2``.

    Twice the single-mode value for every valid input.
    """
    _check_domain(omega, epsilon)
    d2 = detuning_squared(omega, distance_to_critical(omega, epsilon))
    return epsilon * epsilon / (d2 * d2)


class Resources(NamedTuple):
    time: float
    n_loc: float


def single_mode_resources(omega: float, epsilon: float, eta: float = 1.0) -> Resources:
    """Protocol time ``1/(eta*lam)`` and local photon number of a single sensor.

    The adiabatic sweep time is fixed at exactly ``1/(eta*lam)``; only its
    order of magnitude is physically meaningful.
    """
    _check_eta(eta)
    sol = single_mode_diagonalize(omega, epsilon)
    return Resources(time=1.0 / (eta * sol.lam), n_loc=sol.n_photons)
