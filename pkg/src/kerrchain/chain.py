"""Reciprocal-space solution of the periodic parametric resonator chain.

With periodic boundaries and ``a_j = M**-0.5 * sum_k a_k exp(-i k j)`` the
chain Hamiltonian splits into independent blocks: single-mode squeezers at
``k = 0`` (and ``k = pi`` for even ``M``) and two-mode squeezers for each pair
``{k, -k}``, each with the coupling replaced by ``epsilon * cos(k)``.

Mode lists contain only ``n >= 0``; a pair ``{k, -k}`` appears once with
``degeneracy = 2``.

For ``M = 2`` the periodic bond is counted twice (sites 1-2 and 2-1), which
yields the two-mode Hamiltonian with coupling ``epsilon`` rather than
``epsilon/2``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .errors import ConvergenceError, DomainError
from .gaussian import _bogoliubov, _check_domain, _check_eta, single_mode_qfi

__all__ = [
    "SystemParams",
    "ModeData",
    "ChainSolution",
    "fbz_momenta",
    "chain_ground_state",
    "chain_qfi",
    "chain_local_photons",
    "independent_ensemble_qfi",
    "epsilon_for_local_photons",
    "distance_for_local_photons",
    "photon_fractions",
]

Parity = Literal["even", "odd"]


@dataclass(frozen=True)
class SystemParams:
    """Physical parameters of the chain.

    ``x_exact`` lets callers fix the distance to criticality ``x`` directly;
    it then takes precedence over ``1 - epsilon/omega`` in every denominator.
    Build it with :meth:`near_critical`.
    """

    omega: float
    epsilon: float
    chi: float = 0.0
    m_modes: int = 1
    eta: float = 1.0
    x_exact: float | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        _check_domain(self.omega, self.epsilon)
        _check_eta(self.eta)
        if not self.chi >= 0:
            raise DomainError(f"chi must be non-negative, got {self.chi!r}")
        if isinstance(self.m_modes, bool) or int(self.m_modes) != self.m_modes or self.m_modes < 1:
            raise DomainError(f"m_modes must be a positive integer, got {self.m_modes!r}")
        object.__setattr__(self, "m_modes", int(self.m_modes))
        if self.x_exact is not None and not 0 < self.x_exact <= 1:
            raise DomainError(f"x must lie in (0, 1], got {self.x_exact!r}")

    @classmethod
    def near_critical(cls, omega, x, m_modes=1, chi=0.0, eta=1.0):
        """Parameters at distance ``x = 1 - epsilon/omega`` from the critical point."""
        if not 0 < x <= 1:
            raise DomainError(f"x must lie in (0, 1], got {x!r}")
        return cls(omega, (1.0 - x) * omega, chi=chi, m_modes=m_modes, eta=eta, x_exact=x)

    @property
    def x(self) -> float:
        if self.x_exact is not None:
            return self.x_exact
        return 1.0 - self.epsilon / self.omega

    @property
    def parity(self) -> Parity:
        return "even" if self.m_modes % 2 == 0 else "odd"

    def replace(self, **changes) -> "SystemParams":
        """Copy with fields replaced; a new ``omega`` or ``epsilon`` drops ``x_exact``."""
        values = dict(
            omega=self.omega, epsilon=self.epsilon, chi=self.chi,
            m_modes=self.m_modes, eta=self.eta, x_exact=self.x_exact,
        )
        if "omega" in changes or "epsilon" in changes:
            values["x_exact"] = None
        values.update(changes)
        return SystemParams(**values)


@dataclass(frozen=True)
class ModeData:
    """One reciprocal-space block.

    ``s_k`` keeps the sign of ``epsilon*cos(k)``; ``xi_phase`` is ``pi`` for
    ``k`` in ``[pi/2, pi]`` and ``0`` otherwise.
    """

    n: int
    k: float
    lambda_k: float
    s_k: float
    xi_abs: float
    xi_phase: float
    n_k: float
    degeneracy: int

    @property
    def t_k(self) -> float:
        return math.sqrt(1.0 + self.s_k * self.s_k)


@dataclass(frozen=True)
class ChainSolution:
    params: SystemParams
    modes: tuple[ModeData, ...]
    n_total: float
    gap: float
    protocol_time: float
    qfi_total: float
    qfi_per_mode: tuple[float, ...]

    @property
    def n_local(self) -> float:
        return self.n_total / self.params.m_modes

    @property
    def zero_mode(self) -> ModeData:
        return self.modes[0]


def fbz_momenta(m_modes: int) -> list[tuple[int, float]]:
    """Integer labels ``n`` and momenta ``k = 2 pi n / M`` of the first Brillouin zone.

    Even ``M``: ``n`` in ``[-M/2 + 1, M/2]``; odd ``M``: ``n`` in ``[-(M-1)/2, (M-1)/2]``.
    """
    if int(m_modes) != m_modes or m_modes < 1:
        raise DomainError(f"m_modes must be a positive integer, got {m_modes!r}")
    m = int(m_modes)
    lo = -m // 2 + 1 if m % 2 == 0 else -(m - 1) // 2
    return [(n, 2.0 * math.pi * n / m) for n in range(lo, lo + m)]


def _require_gaussian(params: SystemParams) -> None:
    if params.chi != 0:
        raise DomainError("the Gaussian chain solution requires chi = 0; use the Fock oracle for chi > 0")


def _block_arrays(omega: float, x: float, m_modes: int):
    """Per-block arrays for ``n = 0 .. floor(M/2)``.

    Returns ``n, k, cos k, degeneracy, omega**2 - eps**2 cos**2 k`` with the
    last one evaluated as ``omega**2 (sin**2 k + x (2-x) cos**2 k)``.
    """
    n = np.arange(m_modes // 2 + 1)
    k = 2.0 * np.pi * n / m_modes
    c = np.cos(k)
    sn = np.sin(k)
    # exact values where the trig functions would leave rounding residue
    c[0], sn[0] = 1.0, 0.0
    deg = np.full(n.shape, 2, dtype=int)
    deg[0] = 1
    if m_modes % 2 == 0:
        c[-1], sn[-1] = -1.0, 0.0
        deg[-1] = 1
    if m_modes % 4 == 0:
        c[m_modes // 4], sn[m_modes // 4] = 0.0, 1.0
    d2 = omega * omega * (sn * sn + x * (2.0 - x) * c * c)
    return n, k, c, deg, d2


def _block_qfi(eps: float, c: np.ndarray, deg: np.ndarray, d2: np.ndarray) -> np.ndarray:
    # single-mode block: eps_k^2 / (2 D^2); a pair carries twice that
    return deg * (eps * c) ** 2 / (2.0 * d2 * d2)


def _block_photons(omega: float, eps: float, c: np.ndarray, d2: np.ndarray) -> np.ndarray:
    lam = np.sqrt(d2)
    return (eps * c) ** 2 / (2.0 * d2 + 2.0 * omega * lam)


def chain_qfi(params: SystemParams) -> tuple[float, tuple[float, ...]]:
    """Exact QFI of the Gaussian chain ground state for estimating ``omega``.

    Returns
    -------
    qfi_total : float
        Sum of the block contributions, accumulated with ``math.fsum``.
    qfi_per_mode : tuple of float
        Contribution of each block ``n = 0 .. floor(M/2)``; pairs already
        include both ``k`` and ``-k``.
    """
    _require_gaussian(params)
    _, _, c, deg, d2 = _block_arrays(params.omega, params.x, params.m_modes)
    per = _block_qfi(params.epsilon, c, deg, d2)
    return math.fsum(per), tuple(float(v) for v in per)


def chain_local_photons(params: SystemParams) -> float:
    """Photon number per site, ``N / M``."""
    _require_gaussian(params)
    _, _, c, deg, d2 = _block_arrays(params.omega, params.x, params.m_modes)
    return math.fsum(deg * _block_photons(params.omega, params.epsilon, c, d2)) / params.m_modes


def chain_ground_state(params: SystemParams) -> ChainSolution:
    """Solve the Gaussian chain in reciprocal space.

    Parameters
    ----------
    params : SystemParams
        Chain parameters with ``chi == 0``.

    Returns
    -------
    ChainSolution
        Per-block Bogoliubov data, photon numbers, the gap ``lambda_0``,
        the protocol time ``1/(eta lambda_0)`` and the QFI breakdown.
    """
    _require_gaussian(params)
    omega, eps = params.omega, params.epsilon
    n, k, c, deg, d2 = _block_arrays(omega, params.x, params.m_modes)
    modes = []
    for i in range(len(n)):
        lam, _, s = _bogoliubov(omega, eps * float(c[i]), float(d2[i]))
        phase = math.pi if k[i] >= math.pi / 2 - 1e-12 else 0.0
        modes.append(ModeData(
            n=int(n[i]), k=float(k[i]), lambda_k=lam, s_k=s,
            xi_abs=math.asinh(abs(s)), xi_phase=phase, n_k=s * s, degeneracy=int(deg[i]),
        ))
    n_total = math.fsum(m.degeneracy * m.n_k for m in modes)
    per = _block_qfi(eps, c, deg, d2)
    gap = min(m.lambda_k for m in modes)
    return ChainSolution(
        params=params,
        modes=tuple(modes),
        n_total=n_total,
        gap=gap,
        protocol_time=1.0 / (params.eta * gap),
        qfi_total=math.fsum(per),
        qfi_per_mode=tuple(float(v) for v in per),
    )


def independent_ensemble_qfi(params: SystemParams) -> float:
    """QFI of ``M`` uncoupled single-mode sensors, ``M * I_sm``."""
    _require_gaussian(params)
    if params.x_exact is None:
        return params.m_modes * single_mode_qfi(params.omega, params.epsilon)
    d2 = params.omega ** 2 * params.x * (2.0 - params.x)
    return params.m_modes * params.epsilon ** 2 / (2.0 * d2 * d2)


def distance_for_local_photons(omega: float, m_modes: int, n_loc_target: float,
                               max_iter: int = 200) -> float:
    """Distance ``x`` at which the chain holds ``n_loc_target`` photons per site.

    Bisection on ``log x``; ``N_loc`` decreases strictly with ``x``. Working in
    ``x`` keeps full relative precision when ``x`` is tiny, where ``N_loc``
    is extremely sensitive to ``epsilon``.
    """
    if not n_loc_target > 0:
        raise DomainError(f"n_loc_target must be positive, got {n_loc_target!r}")
    if not omega > 0:
        raise DomainError(f"omega must be positive, got {omega!r}")

    def n_loc(logx):
        x = math.exp(logx)
        _, _, c, deg, d2 = _block_arrays(omega, x, m_modes)
        eps = -omega * math.expm1(logx)
        return math.fsum(deg * _block_photons(omega, eps, c, d2)) / m_modes

    lo, hi = -690.0, 0.0  # x in [1e-300, 1]; N_loc(hi) = 0
    if n_loc(lo) < n_loc_target:
        raise ConvergenceError(f"n_loc_target={n_loc_target!r} is not reachable above x=1e-300")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            return math.exp(mid)
        val = n_loc(mid)
        if abs(val - n_loc_target) <= 1e-13 * n_loc_target:
            return math.exp(mid)
        if val > n_loc_target:
            lo = mid
        else:
            hi = mid
    raise ConvergenceError(f"bisection did not converge in {max_iter} iterations")


def epsilon_for_local_photons(omega: float, m_modes: int, n_loc_target: float) -> float:
    """Coupling ``epsilon`` in ``(0, omega)`` giving ``n_loc_target`` photons per site.

    Raises
    ------
    ConvergenceError
        If the bisection does not converge (not expected: ``N_loc`` is monotone).
    """
    x = distance_for_local_photons(omega, m_modes, n_loc_target)
    return -omega * math.expm1(math.log(x))


def photon_fractions(params: SystemParams) -> list[float]:
    """Ratios ``N_k / N_0`` for the blocks ``n = 0 .. floor(M/2)`` (per single ``k``)."""
    sol = chain_ground_state(params)
    n0 = sol.zero_mode.n_k
    if n0 == 0:
        raise DomainError("N_0 = 0 (epsilon = 0): photon fractions are undefined")
    return [m.n_k / n0 for m in sol.modes]
