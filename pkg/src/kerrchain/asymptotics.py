"""Closed-form asymptotics of the chain: critical expansions, series identities
and the continuum (large-``M``) limit.

None of these functions silently substitute for the exact sums in
:mod:`kerrchain.chain`; where a formula only holds in some regime the result
carries a validity flag. Asymptotic inequalities of the form ``a >> b`` are
made decidable as ``a >= 10 * b`` (``MARGIN``), and the raw threshold ``b`` is
reported alongside.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, NamedTuple

import numpy as np
from scipy import optimize

from .errors import DomainError

__all__ = [
    "EULER_GAMMA",
    "MARGIN",
    "CONTINUUM_C",
    "CriticalExpansion",
    "ContinuumEstimate",
    "FlaggedValue",
    "qfi_critical_expansion",
    "photons_critical_expansion",
    "critical_expansion",
    "x_from_photons",
    "qfi_scaling",
    "csc_power_sum",
    "brute_force_csc_sum",
    "continuum_integrand",
    "continuum_integrand_slope",
    "max_integrand_slope",
    "continuum_qfi",
    "continuum_error_bound",
    "continuum_qfi_scaling",
]

Parity = Literal["even", "odd"]

EULER_GAMMA = 0.5772156649015329
MARGIN = 10.0
CONTINUUM_C = math.pi ** 2 * math.exp(2.5 * math.pi) / (320.0 * math.sqrt(2.0))


class FlaggedValue(NamedTuple):
    """A value together with its regime-of-validity flag and raw threshold."""

    value: float
    valid: bool
    threshold: float


def _parity(m_modes: int, parity: str | None) -> str:
    if parity is None:
        return "even" if m_modes % 2 == 0 else "odd"
    if parity not in ("even", "odd"):
        raise DomainError(f"parity must be 'even' or 'odd', got {parity!r}")
    return parity


def _check_x(x: float) -> None:
    if not 0 < x < 1:
        raise DomainError(f"x must lie in (0, 1), got {x!r}")


def qfi_critical_expansion(omega: float, x: float, m_modes: int, parity: Parity | None = None) -> float:
    """QFI of the chain expanded to first order in ``x`` near criticality.

    Even ``M``: ``(1/4w^2)[1/x^2 - 1/x - 1/4 + (M^4 - 20M^2 + 64)/180]``.
    Odd ``M``: ``(1/8w^2)[1/x^2 - 1/x - 1/4 + (4M^4 - 20M^2 + 16)/45]``.
    """
    _check_x(x)
    m = float(m_modes)
    core = 1.0 / (x * x) - 1.0 / x - 0.25
    if _parity(m_modes, parity) == "even":
        return (core + (m ** 4 - 20 * m ** 2 + 64) / 180.0) / (4.0 * omega * omega)
    return (core + (4 * m ** 4 - 20 * m ** 2 + 16) / 45.0) / (8.0 * omega * omega)


def _photon_offset(m_modes: int, parity: str) -> float:
    m = float(m_modes)
    arg = m / math.pi if parity == "even" else 2.0 * m / math.pi
    return math.log(arg) + EULER_GAMMA - math.pi / 2


def photons_critical_expansion(omega: float, x: float, m_modes: int, parity: Parity | None = None) -> float:
    """Total photon number expanded to order ``sqrt(x)``.

    ``omega`` drops out; it is accepted for a uniform call signature.
    """
    _check_x(x)
    par = _parity(m_modes, parity)
    lead = 1.0 / math.sqrt(2.0 * x) if par == "even" else 1.0 / math.sqrt(8.0 * x)
    return lead + m_modes / math.pi * _photon_offset(m_modes, par)


@dataclass(frozen=True)
class CriticalExpansion:
    x: float
    m_modes: int
    parity: Parity
    qfi_estimate: float
    n_estimate: float
    t_estimate: float
    validity_note: str


def critical_expansion(omega: float, x: float, m_modes: int, eta: float = 1.0,
                       parity: Parity | None = None) -> CriticalExpansion:
    """Bundle the near-critical QFI, photon number and sweep time estimates."""
    par = _parity(m_modes, parity)
    n_est = photons_critical_expansion(omega, x, m_modes, par)
    offset = abs(_photon_offset(m_modes, par))
    ok = math.pi * n_est / m_modes >= MARGIN * offset
    note = (
        f"pi*N_loc = {math.pi * n_est / m_modes:.6g} vs |offset| = {offset:.6g}: "
        + ("photon-number condition satisfied" if ok else "photon-number condition violated")
    )
    return CriticalExpansion(
        x=x, m_modes=m_modes, parity=par,
        qfi_estimate=qfi_critical_expansion(omega, x, m_modes, par),
        n_estimate=n_est,
        t_estimate=1.0 / (eta * omega * math.sqrt(2.0 * x)),
        validity_note=note,
    )


def x_from_photons(n_loc: float, m_modes: int, parity: Parity | None = None) -> FlaggedValue:
    """Invert the leading photon asymptotics: ``x`` as a function of ``N_loc``.

    Even: ``x = (sqrt(2) M N_loc)**-2``; odd: ``x = (2 sqrt(2) M N_loc)**-2``.
    The flag requires ``pi N_loc >= 10 |log(M/pi or 2M/pi) + gamma - pi/2|``.
    """
    par = _parity(m_modes, parity)
    pref = math.sqrt(2.0) if par == "even" else 2.0 * math.sqrt(2.0)
    x = (pref * m_modes * n_loc) ** -2
    threshold = abs(_photon_offset(m_modes, par))
    return FlaggedValue(x, math.pi * n_loc >= MARGIN * threshold, threshold)


def qfi_scaling(m_modes: int, t_time: float, n_loc: float, eta: float = 1.0,
                parity: Parity | None = None) -> float:
    """Heisenberg-type resource scaling ``c * eta^2 M^2 T^2 N_loc^2`` (``c`` = 1 even, 2 odd)."""
    pref = 1.0 if _parity(m_modes, parity) == "even" else 2.0
    return pref * (eta * m_modes * t_time * n_loc) ** 2


def brute_force_csc_sum(m_modes: int, power: int, parity: Parity | None = None) -> float:
    """Direct evaluation of ``sum_n csc(2 pi n / M)**power``.

    The range is ``n = 1 .. (M-1)/2`` for odd and ``n = 1 .. M/2 - 1`` for even ``M``.
    """
    par = _parity(m_modes, parity)
    top = (m_modes - 1) // 2 if par == "odd" else m_modes // 2 - 1
    n = np.arange(1, top + 1)
    return math.fsum(np.sin(2.0 * np.pi * n / m_modes) ** (-power))


def csc_power_sum(m_modes: int, power: int | str, parity: Parity | None = None) -> float:
    """Closed forms of the cosecant power sums over half the Brillouin zone.

    ``power`` is 1, 2, 4 or ``"4-2"`` (the difference of the quartic and
    quadratic sums). Powers 2 and 4 are exact; power 1 is the large-``M``
    asymptotic form with an ``O(1/M)`` error.

    Raises
    ------
    DomainError
        For unsupported ``(power, parity)`` combinations or ``M`` too small.
    """
    par = _parity(m_modes, parity)
    m = float(m_modes)
    if par == "odd" and (m_modes < 3 or m_modes % 2 == 0):
        raise DomainError(f"odd-parity sums need odd M >= 3, got {m_modes!r}")
    if par == "even" and (m_modes < 4 or m_modes % 2 == 1):
        raise DomainError(f"even-parity sums need even M >= 4, got {m_modes!r}")
    forms = {
        (2, "odd"): lambda: (m * m - 1) / 6.0,
        (4, "odd"): lambda: (m ** 4 + 10 * m * m - 11) / 90.0,
        ("4-2", "odd"): lambda: (m ** 4 - 5 * m * m + 4) / 90.0,
        (2, "even"): lambda: (m * m - 4) / 12.0,
        (4, "even"): lambda: (m * m - 4) * (m * m + 44) / 720.0,
        ("4-2", "even"): lambda: (m ** 4 - 20 * m * m + 64) / 720.0,
        (1, "odd"): lambda: m / math.pi * (EULER_GAMMA + math.log(2 * m / math.pi)),
        (1, "even"): lambda: m / math.pi * (EULER_GAMMA + math.log(m / math.pi)),
    }
    try:
        return forms[(power, par)]()
    except KeyError:
        raise DomainError(f"no closed form for power={power!r}, parity={par!r}") from None


def continuum_integrand(omega: float, x: float, k):
    """Pair-block QFI density ``e^2 cos^2 k / (w^2 - e^2 cos^2 k)^2`` with ``e = (1-x) w``."""
    c = np.cos(k)
    s = np.sin(k)
    d2 = omega * omega * (s * s + x * (2.0 - x) * c * c)
    e = (1.0 - x) * omega
    return (e * c) ** 2 / (d2 * d2)


def continuum_integrand_slope(omega: float, x: float, k):
    """``d/dk`` of :func:`continuum_integrand`."""
    c = np.cos(k)
    s = np.sin(k)
    e2 = ((1.0 - x) * omega) ** 2
    d2 = omega * omega * (s * s + x * (2.0 - x) * c * c)
    return -np.sin(2.0 * k) * e2 * (omega * omega + e2 * c * c) / d2 ** 3


def max_integrand_slope(omega: float, x: float) -> float:
    """Numerically maximised ``|d f / d k|`` over ``k`` in ``(0, pi/2)``.

    The density is symmetric about ``pi/2``, so this is the maximum over ``(0, pi)``.
    Compare with the small-``x`` estimate ``x**-2.5 / 5`` (``omega = 1``).
    """
    _check_x(x)
    grid = np.geomspace(1e-9, 1.0, 4000) * (math.pi / 2)
    vals = np.abs(continuum_integrand_slope(omega, x, grid))
    i = int(np.argmax(vals))
    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, len(grid) - 1)]
    res = optimize.minimize_scalar(
        lambda k: -abs(continuum_integrand_slope(omega, x, k)),
        bounds=(lo, hi), method="bounded", options={"xatol": 1e-14 * hi},
    )
    return float(max(vals[i], -res.fun))


@dataclass(frozen=True)
class ContinuumEstimate:
    """Large-``M`` QFI and photon estimates.

    ``m_threshold`` is the raw bound ``2 pi^2 x^-2.5 / 5``; ``m_required`` is
    its ceiling and ``is_valid`` demands ``M >= 10 * m_required``.
    """

    qfi: float
    n_total: float
    m_required: int
    m_threshold: float
    c_constant: float
    is_valid: bool


def continuum_qfi(omega: float, x: float, m_modes: int) -> ContinuumEstimate:
    """Continuum-limit QFI ``(M/4w^2) (1-x)^2 / (x(2-x))^{3/2}`` and its validity."""
    _check_x(x)
    qfi = m_modes / (4.0 * omega * omega) * (1.0 - x) ** 2 / (x * (2.0 - x)) ** 1.5
    threshold = 2.0 * math.pi ** 2 * x ** -2.5 / 5.0
    m_req = math.ceil(threshold)
    n_total = m_modes * (math.log(8.0 / x) / (2.0 * math.pi) - 0.5)
    return ContinuumEstimate(
        qfi=qfi, n_total=n_total, m_required=m_req, m_threshold=threshold,
        c_constant=CONTINUUM_C, is_valid=m_modes >= MARGIN * m_req,
    )


def continuum_error_bound(omega: float, x: float, m_modes: int, numeric: bool = True) -> float:
    """Bound ``(M/2) dk^2 max|f'|`` on replacing the half-zone Riemann sum by its integral.

    With ``numeric=False`` the slope maximum uses the small-``x`` estimate
    ``x**-2.5 / (5 omega**2)``.
    """
    dk = 2.0 * math.pi / m_modes
    slope = max_integrand_slope(omega, x) if numeric else x ** -2.5 / (5.0 * omega * omega)
    return 0.5 * m_modes * dk * dk * slope


def continuum_qfi_scaling(m_modes: int, t_time: float, n_loc: float, eta: float = 1.0) -> FlaggedValue:
    """Apparent exponential scaling ``(e^{pi/2}/16) eta^2 M T^2 e^{pi N_loc}``.

    Valid only while ``M >> C e^{5 pi N_loc}``; the flag uses the factor-10 margin.
    """
    value = math.exp(math.pi / 2) / 16.0 * eta * eta * m_modes * t_time * t_time * math.exp(math.pi * n_loc)
    log_threshold = math.log(CONTINUUM_C) + 5.0 * math.pi * n_loc
    threshold = math.exp(log_threshold) if log_threshold < 709.0 else math.inf
    return FlaggedValue(value, m_modes >= MARGIN * threshold, threshold)
