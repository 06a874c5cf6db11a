"""First-order Kerr corrections to the Gaussian critical sensors.

The Kerr term ``chi a^dag a^dag a a`` is treated as a perturbation of the
squeezed-vacuum ground state. All corrections are quoted per unit ``chi``:
the gap becomes ``lam + chi * gap_first`` and the QFI ``I0 + chi * qfi_first``.

The "<~" photon bounds are soft ceilings: nothing here truncates or clips a
curve that crosses them.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .chain import SystemParams, chain_ground_state
from .errors import DegenerateInputWarning, DomainError
from .gaussian import _check_domain, detuning_squared, distance_to_critical, single_mode_diagonalize

__all__ = [
    "PerturbationReport",
    "Amplitudes",
    "single_mode_gap_correction",
    "perturbation_amplitudes",
    "single_mode_qfi_correction",
    "gaussian_validity_bounds",
    "qfi_saturation_ceiling",
    "chain_gap_correction",
    "chain_gap_correction_exact",
]

SQRT2 = math.sqrt(2.0)
SQRT12 = math.sqrt(12.0)
SQRT24 = math.sqrt(24.0)


def single_mode_gap_correction(n_photons: float) -> float:
    """First-order gap shift per unit ``chi``: ``8N + 12N^2``."""
    if not n_photons >= 0:
        raise DomainError(f"n_photons must be non-negative, got {n_photons!r}")
    return 8.0 * n_photons + 12.0 * n_photons * n_photons


@dataclass(frozen=True)
class Amplitudes:
    """First-order ground-state amplitudes and their ``omega``-derivatives.

    ``f`` is half the squeezing magnitude; ``v`` and ``h`` weight the squeezed
    Fock states ``S|2>`` and ``S|4>`` in the first-order state correction.
    """

    f: float
    v: float
    h: float
    df: float
    dv: float
    dh: float


def _amplitudes_only(omega: float, epsilon: float) -> tuple[float, float, float]:
    d2 = detuning_squared(omega, distance_to_critical(omega, epsilon))
    lam = math.sqrt(d2)
    s = epsilon / math.sqrt(2.0 * d2 + 2.0 * omega * lam)
    n = s * s
    v = (1.0 + 6.0 * n) * math.sqrt(2.0 * (n + n * n)) / (2.0 * lam)
    h = -SQRT24 * (n + n * n) / (4.0 * lam)
    return 0.5 * math.asinh(s), v, h


def perturbation_amplitudes(omega: float, epsilon: float, method: str = "analytic") -> Amplitudes:
    """Amplitudes ``f, v, h`` and their derivatives with respect to ``omega``.

    ``method="analytic"`` differentiates the closed forms through
    ``N(omega, epsilon)`` and ``lam(omega, epsilon)``. ``method="finite_difference"``
    uses a central difference with step ``1e-6 * omega``; it exists only to
    cross-check the analytic route.
    """
    _check_domain(omega, epsilon)
    f, v, h = _amplitudes_only(omega, epsilon)
    if method == "finite_difference":
        step = 1e-6 * omega
        fp, vp, hp = _amplitudes_only(omega + step, epsilon)
        fm, vm, hm = _amplitudes_only(omega - step, epsilon)
        return Amplitudes(f, v, h, (fp - fm) / (2 * step), (vp - vm) / (2 * step), (hp - hm) / (2 * step))
    if method != "analytic":
        raise ValueError(f"unknown method {method!r}")
    d2 = detuning_squared(omega, distance_to_critical(omega, epsilon))
    lam = math.sqrt(d2)
    n = (epsilon * epsilon) / (2.0 * d2 + 2.0 * omega * lam)
    # d lam/d omega = omega/lam, dN/d omega = -eps^2 / (2 lam^3)
    df = -epsilon / (4.0 * d2)
    dv = SQRT2 * epsilon / 4.0 * (-3.0 * epsilon ** 2 / lam ** 5 - 2.0 * omega * (1.0 + 6.0 * n) / lam ** 4)
    dh = 3.0 * SQRT24 * epsilon ** 2 * omega / (16.0 * lam ** 5)
    return Amplitudes(f, v, h, df, dv, dh)


def gaussian_validity_bounds(omega: float, chi: float, m_modes: int = 1) -> tuple[float, float]:
    """Photon-number ceilings below which the Gaussian treatment holds.

    Returns ``(photon_bound_gap, photon_bound_qfi)`` = ``cbrt(w M / 24 chi)``,
    ``cbrt(w M / 132 chi)``. For ``M > 1`` (odd only) the bounds refer to the
    total photon number of the chain. ``chi = 0`` gives ``(inf, inf)``.

    Raises
    ------
    DomainError
        If ``chi < 0`` or ``M`` is even and larger than one.
    """
    _check_chain_m(m_modes)
    if chi < 0:
        raise DomainError(f"chi must be non-negative, got {chi!r}")
    if chi == 0:
        return math.inf, math.inf
    return (omega * m_modes / (24.0 * chi)) ** (1.0 / 3.0), (omega * m_modes / (132.0 * chi)) ** (1.0 / 3.0)


def qfi_saturation_ceiling(omega: float, chi: float, m_modes: int = 1, coupled: bool = True) -> float:
    """Asymptotic QFI ceiling set by the Kerr saturation.

    Independent ensemble: ``(M / 100 w^2) (w/chi)^{4/3}``;
    coupled chain: ``(1 / 100 w^2) (M w/chi)^{4/3}``.
    """
    if chi < 0:
        raise DomainError(f"chi must be non-negative, got {chi!r}")
    if m_modes < 1:
        raise DomainError(f"m_modes must be positive, got {m_modes!r}")
    if chi == 0:
        return math.inf
    if coupled:
        return (m_modes * omega / chi) ** (4.0 / 3.0) / (100.0 * omega * omega)
    return m_modes * (omega / chi) ** (4.0 / 3.0) / (100.0 * omega * omega)


@dataclass(frozen=True)
class PerturbationReport:
    """First-order Kerr corrections and the resulting validity ceilings.

    ``gap_first`` and ``qfi_first`` are per unit ``chi``. Photon bounds and
    the saturation ceiling are ``inf`` when no ``chi`` was supplied.
    """

    n_unperturbed: float
    n_zero_mode: float
    gap_zeroth: float
    gap_first: float
    qfi_zeroth: float
    qfi_first: float
    v_amp: float
    h_amp: float
    f_half_xi: float
    photon_bound_gap: float
    photon_bound_qfi: float
    qfi_saturation: float


def single_mode_qfi_correction(omega: float, epsilon: float, chi: float | None = None,
                               method: str = "analytic") -> tuple[float, PerturbationReport]:
    """First-order-in-``chi`` correction to the single-mode QFI.

    Parameters
    ----------
    omega, epsilon : float
        Gaussian model parameters, ``0 <= epsilon < omega``.
    chi : float, optional
        Kerr strength, used only for the validity ceilings in the report.
    method : {"analytic", "finite_difference"}
        How the ``omega``-derivatives of the amplitudes are obtained.

    Returns
    -------
    qfi_first : float
        ``-8 sqrt(2) f' (v' + sqrt(12) f' h)``, always ``<= 0``.
    report : PerturbationReport

    Notes
    -----
    At ``epsilon = 0`` there are no photons and the correction vanishes; a
    :class:`DegenerateInputWarning` is emitted and zero returned.
    """
    _check_domain(omega, epsilon)
    sol = single_mode_diagonalize(omega, epsilon)
    bounds = gaussian_validity_bounds(omega, chi, 1) if chi is not None else (math.inf, math.inf)
    ceiling = qfi_saturation_ceiling(omega, chi, 1) if chi is not None else math.inf
    if epsilon == 0:
        warnings.warn("epsilon = 0: no photons, first-order QFI correction is zero",
                      DegenerateInputWarning, stacklevel=2)
        qfi_first, amp = 0.0, Amplitudes(0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
    else:
        amp = perturbation_amplitudes(omega, epsilon, method)
        qfi_first = -8.0 * SQRT2 * amp.df * (amp.dv + SQRT12 * amp.df * amp.h)
    report = PerturbationReport(
        n_unperturbed=sol.n_photons,
        n_zero_mode=sol.n_photons,
        gap_zeroth=sol.lam,
        gap_first=single_mode_gap_correction(sol.n_photons),
        qfi_zeroth=epsilon * epsilon / (2.0 * sol.lam ** 4),
        qfi_first=qfi_first,
        v_amp=amp.v,
        h_amp=amp.h,
        f_half_xi=0.5 * sol.xi,
        photon_bound_gap=bounds[0],
        photon_bound_qfi=bounds[1],
        qfi_saturation=ceiling,
    )
    return qfi_first, report


def _check_chain_m(m_modes: int) -> None:
    if m_modes < 1:
        raise DomainError(f"m_modes must be positive, got {m_modes!r}")
    if m_modes % 2 == 0:
        raise DomainError("Kerr corrections for the chain are only derived for odd M")


def chain_gap_correction(n_total: float, n_zero_mode: float, m_modes: int) -> float:
    """First-order chain gap shift per unit ``chi`` in the zero-mode approximation.

    ``[4N + 8 N0 N + 4 N0 + 4 N0^2] / M``; reduces to ``(8N + 12N^2)/M`` for ``N = N0``.

    This form keeps only the anomalous correlations of the ``k = 0`` block and
    is accurate only once the zero mode holds almost all photons (``N ~ N0``).
    Away from criticality use :func:`chain_gap_correction_exact`.
    """
    _check_chain_m(m_modes)
    if not n_total >= n_zero_mode >= 0:
        raise DomainError("need n_total >= n_zero_mode >= 0")
    n, n0 = n_total, n_zero_mode
    return (4.0 * n + 8.0 * n0 * n + 4.0 * n0 + 4.0 * n0 * n0) / m_modes


def chain_gap_correction_exact(params: SystemParams) -> float:
    """Exact first-order chain gap shift per unit ``chi`` for odd ``M``.

    Wick contraction of the Kerr term in the Gaussian ground state and in the
    one-quasiparticle state of the ``k = 0`` block gives
    ``(4/M) [N (1 + 2 N0) + t0 s0 sum_k t_k s_k]``, the sum running over the
    full Brillouin zone with signed ``s_k``.
    """
    _check_chain_m(params.m_modes)
    sol = chain_ground_state(params.replace(chi=0.0))
    zero = sol.zero_mode
    anomalous = math.fsum(m.degeneracy * m.t_k * m.s_k for m in sol.modes)
    return 4.0 / params.m_modes * (sol.n_total * (1.0 + 2.0 * zero.n_k) + zero.t_k * zero.s_k * anomalous)
