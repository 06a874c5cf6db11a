"""Brute-force ground truth in a truncated Fock space.

The full Kerr chain Hamiltonian (periodic boundaries, ``M = 1`` being the
single Kerr resonator) is built as a real symmetric sparse matrix over the
occupation basis ``|n_1 ... n_M>``, ``0 <= n_j <= n_max``, ordered
lexicographically with ``n_1`` most significant (the ``numpy.kron`` order).

The Hamiltonian creates and destroys photons in pairs, so total-photon
parity is conserved. The ground state lives in the even sector and the
one-quasiparticle state that sets the gap in the odd sector; both are found
as the lowest eigenpair of their sector.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as sla

from .chain import SystemParams
from .errors import CapacityError, ConvergenceError, DomainError, GaugeError

__all__ = [
    "DEFAULT_BUDGET",
    "FockConfig",
    "FockState",
    "SpectrumResult",
    "FiniteDifferenceQFI",
    "budget_from_env",
    "occupations",
    "build_hamiltonian",
    "lowest_eigenpair",
    "solve_fixed",
    "solve_spectrum",
    "ground_state",
    "per_site_photons",
    "align_phase",
    "fidelity_qfi",
    "qfi_finite_difference",
]

DEFAULT_BUDGET = 20_000_000
DENSE_LIMIT = 2500


def budget_from_env(default: int = DEFAULT_BUDGET) -> int:
    """Basis-size budget, overridable through ``CHAIN_BUDGET``."""
    raw = os.environ.get("CHAIN_BUDGET")
    return int(float(raw)) if raw else default


@dataclass(frozen=True)
class FockConfig:
    """Truncation and solver settings.

    ``n_max`` is the starting per-mode cutoff; :func:`solve_spectrum` doubles it
    until the observables settle to ``convergence_tol``. ``budget`` caps the
    total basis dimension ``(n_max + 1)**M``.
    """

    n_max: int = 8
    convergence_tol: float = 1e-6
    eig_tol: float = 1e-10
    budget: int = field(default_factory=budget_from_env)
    max_doublings: int = 6

    def __post_init__(self):
        if self.n_max < 2:
            raise DomainError(f"n_max must be at least 2, got {self.n_max!r}")


def _dimension(n_max: int, m_modes: int) -> int:
    return (n_max + 1) ** m_modes


def _check_budget(n_max: int, m_modes: int, budget: int) -> None:
    dim = _dimension(n_max, m_modes)
    if dim > budget:
        raise CapacityError(
            f"basis dimension (n_max+1)^M = {n_max + 1}^{m_modes} = {dim} exceeds budget {budget}"
        )


def occupations(n_max: int, m_modes: int, index=None) -> np.ndarray:
    """Occupation numbers of basis states, shape ``(len(index), M)``."""
    d = n_max + 1
    if index is None:
        index = np.arange(d ** m_modes)
    index = np.asarray(index)
    strides = d ** np.arange(m_modes - 1, -1, -1)
    return (index[:, None] // strides[None, :]) % d


@dataclass(frozen=True)
class FockState:
    """Normalized amplitude vector over the truncated occupation basis."""

    amplitudes: np.ndarray
    n_max: int
    m_modes: int

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def gauge_fixed(self) -> "FockState":
        """Copy with the largest-magnitude amplitude made real and positive."""
        amps = self.amplitudes
        i = int(np.argmax(np.abs(amps)))
        phase = amps[i] / abs(amps[i])
        fixed = amps / phase
        if np.isrealobj(amps):
            fixed = fixed.real
        return FockState(fixed, self.n_max, self.m_modes)

    def parity_weights(self) -> tuple[float, float]:
        """Probability in the even and odd total-photon sectors."""
        occ = occupations(self.n_max, self.m_modes).sum(axis=1)
        p = np.abs(self.amplitudes) ** 2
        return float(p[occ % 2 == 0].sum()), float(p[occ % 2 == 1].sum())

    def dump(self, path) -> None:
        """Write one line ``n_1 ... n_M amplitude`` per basis state."""
        occ = occupations(self.n_max, self.m_modes)
        with open(path, "w") as fh:
            for row, amp in zip(occ, self.amplitudes):
                labels = " ".join(str(int(v)) for v in row)
                if np.iscomplexobj(self.amplitudes):
                    fh.write(f"{labels} {amp.real:.16e} {amp.imag:.16e}\n")
                else:
                    fh.write(f"{labels} {amp:.16e}\n")


@dataclass(frozen=True)
class SpectrumResult:
    ground_energy: float
    excited_energy: float
    gap: float
    ground_state: FockState
    excited_state: FockState
    per_site_photons: tuple[float, ...]
    total_photons: float
    n_max: int


def build_hamiltonian(params: SystemParams, n_max: int, budget: int | None = None) -> sp.csr_matrix:
    """Sparse matrix of the Kerr chain Hamiltonian in the truncated Fock basis.

    ``sum_j [w n_j + e/2 (a_j a_{j+1} + h.c.) + chi n_j (n_j - 1)]`` with
    ``a_{M+1} = a_1``. For ``M = 1`` the bond term is ``e/2 (a^2 + h.c.)``;
    for ``M = 2`` both bonds join the same pair and the coupling doubles.

    Raises
    ------
    CapacityError
        If ``(n_max + 1)**M`` exceeds ``budget``.
    """
    m = params.m_modes
    _check_budget(n_max, m, budget_from_env() if budget is None else budget)
    d = n_max + 1
    dim = d ** m
    idx = np.arange(dim)
    strides = [d ** (m - 1 - j) for j in range(m)]
    occ = [(idx // s) % d for s in strides]

    diag = np.zeros(dim)
    for o in occ:
        diag += params.omega * o + params.chi * o * (o - 1)

    rows, cols, vals = [], [], []
    half = 0.5 * params.epsilon
    for j in range(m):
        p = (j + 1) % m
        if p == j:
            mask = occ[j] >= 2
            amp = np.sqrt(occ[j][mask] * (occ[j][mask] - 1.0))
            shift = 2 * strides[j]
        else:
            mask = (occ[j] >= 1) & (occ[p] >= 1)
            amp = np.sqrt(occ[j][mask] * occ[p][mask] * 1.0)
            shift = strides[j] + strides[p]
        cols.append(idx[mask])
        rows.append(idx[mask] - shift)
        vals.append(half * amp)
    lower = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(dim, dim)
    ).tocsr()
    h = (sp.diags(diag) + lower + lower.T).tocsr()
    assert (h != h.T).nnz == 0
    return h


def lowest_eigenpair(h, eig_tol: float = 1e-10, v0=None) -> tuple[float, np.ndarray]:
    """Lowest eigenvalue and unit eigenvector of a real symmetric matrix.

    Small matrices go to LAPACK; larger ones to ARPACK with a deterministic
    start vector. The residual ``||H v - E v||`` must not exceed ``eig_tol``.
    """
    dim = h.shape[0]
    if dim <= DENSE_LIMIT:
        dense = h.toarray() if sp.issparse(h) else np.asarray(h)
        vals, vecs = scipy.linalg.eigh(dense, subset_by_index=[0, 0])
        energy, vec = float(vals[0]), vecs[:, 0]
    else:
        start = np.ones(dim) if v0 is None else v0
        try:
            vals, vecs = sla.eigsh(h, k=1, which="SA", v0=start, tol=0, ncv=30, maxiter=100_000)
        except sla.ArpackNoConvergence as exc:
            raise ConvergenceError(f"ARPACK failed to converge: {exc}") from exc
        energy, vec = float(vals[0]), vecs[:, 0]
    vec = vec / np.linalg.norm(vec)
    residual = float(np.linalg.norm(h @ vec - energy * vec))
    if residual > eig_tol:
        raise ConvergenceError(f"eigenpair residual {residual:.3e} exceeds eig_tol {eig_tol:.1e}")
    return energy, vec


def _sector_indices(n_max: int, m_modes: int):
    total = occupations(n_max, m_modes).sum(axis=1)
    return np.flatnonzero(total % 2 == 0), np.flatnonzero(total % 2 == 1)


def _embed(dim: int, index: np.ndarray, vec: np.ndarray) -> np.ndarray:
    full = np.zeros(dim)
    full[index] = vec
    return full


def ground_state(params: SystemParams, n_max: int, config: FockConfig | None = None) -> tuple[float, FockState]:
    """Lowest even-sector eigenpair at a fixed truncation."""
    config = config or FockConfig()
    h = build_hamiltonian(params, n_max, config.budget)
    even, _ = _sector_indices(n_max, params.m_modes)
    energy, vec = lowest_eigenpair(h[even][:, even], config.eig_tol)
    state = FockState(_embed(h.shape[0], even, vec), n_max, params.m_modes).gauge_fixed()
    return energy, state


def per_site_photons(state: FockState) -> tuple[float, ...]:
    """Expectation values ``<a_j^dag a_j>`` for every site."""
    occ = occupations(state.n_max, state.m_modes)
    p = np.abs(state.amplitudes) ** 2
    return tuple(float(v) for v in p @ occ)


def solve_fixed(params: SystemParams, n_max: int, config: FockConfig | None = None) -> SpectrumResult:
    """Ground state, first excited state and observables at one truncation."""
    config = config or FockConfig()
    h = build_hamiltonian(params, n_max, config.budget)
    even, odd = _sector_indices(n_max, params.m_modes)
    dim = h.shape[0]
    e0, v0 = lowest_eigenpair(h[even][:, even], config.eig_tol)
    e1, v1 = lowest_eigenpair(h[odd][:, odd], config.eig_tol)
    g = FockState(_embed(dim, even, v0), n_max, params.m_modes).gauge_fixed()
    e = FockState(_embed(dim, odd, v1), n_max, params.m_modes).gauge_fixed()
    sites = per_site_photons(g)
    return SpectrumResult(
        ground_energy=e0, excited_energy=e1, gap=e1 - e0,
        ground_state=g, excited_state=e,
        per_site_photons=sites, total_photons=math.fsum(sites), n_max=n_max,
    )


def _relative_change(a: float, b: float) -> float:
    return abs(a - b) / max(abs(b), 1e-300) if b != 0 else abs(a - b)


def solve_spectrum(params: SystemParams, config: FockConfig | None = None) -> SpectrumResult:
    """Solve with truncation doubling until the observables converge.

    The cutoff starts at ``config.n_max`` and doubles until ground energy,
    gap and total photon number each change by less than
    ``config.convergence_tol`` (relative). The finer of the last two solves
    is returned; its ``n_max`` records the truncation reached.

    Raises
    ------
    CapacityError
        If a doubling would exceed the basis budget before convergence.
    ConvergenceError
        If the eigensolver fails or ``max_doublings`` is exhausted.
    """
    config = config or FockConfig()
    n_max = config.n_max
    previous = solve_fixed(params, n_max, config)
    for _ in range(config.max_doublings):
        n_max *= 2
        current = solve_fixed(params, n_max, config)
        changes = (
            _relative_change(current.ground_energy, previous.ground_energy),
            _relative_change(current.gap, previous.gap),
            _relative_change(current.total_photons, previous.total_photons),
        )
        if max(changes) < config.convergence_tol:
            return current
        previous = current
    raise ConvergenceError(f"truncation not converged after {config.max_doublings} doublings")


def align_phase(state: np.ndarray, reference: np.ndarray, min_overlap: float = 0.5) -> np.ndarray:
    """Rotate ``state`` so that its overlap with ``reference`` is real and positive.

    Raises
    ------
    GaugeError
        If ``|<reference|state>| < min_overlap``.
    """
    overlap = np.vdot(reference, state)
    if abs(overlap) < min_overlap:
        raise GaugeError(f"overlap {abs(overlap):.3f} below {min_overlap}: step too large or level crossing")
    return state * (np.conj(overlap) / abs(overlap))


def fidelity_qfi(psi_minus, psi_0, psi_plus, delta: float) -> float:
    """QFI of a pure-state family from a central difference.

    ``4 (<d psi|d psi> - |<d psi|psi>|^2)`` with
    ``d psi = (psi(+delta) - psi(-delta)) / (2 delta)`` after phase alignment
    of both neighbours to ``psi_0``.
    """
    ref = np.asarray(psi_0)
    ref = ref / np.linalg.norm(ref)
    plus = align_phase(np.asarray(psi_plus) / np.linalg.norm(psi_plus), ref)
    minus = align_phase(np.asarray(psi_minus) / np.linalg.norm(psi_minus), ref)
    deriv = (plus - minus) / (2.0 * delta)
    return float(4.0 * (np.vdot(deriv, deriv).real - abs(np.vdot(deriv, ref)) ** 2))


@dataclass(frozen=True)
class FiniteDifferenceQFI:
    """Finite-difference QFI at step ``delta`` with a step-halving error estimate."""

    qfi: float
    error_estimate: float
    delta: float
    n_max: int


def qfi_finite_difference(params: SystemParams, config: FockConfig | None = None,
                          delta_omega: float | None = None, n_max: int | None = None,
                          jobs: int = 1) -> FiniteDifferenceQFI:
    """QFI for estimating ``omega`` from ground states at ``omega +- delta``.

    Parameters
    ----------
    params : SystemParams
        Any ``chi >= 0``; ``epsilon`` is held fixed while ``omega`` moves.
    config : FockConfig, optional
    delta_omega : float, optional
        Step, default ``1e-5 * omega``.
    n_max : int, optional
        Fixed truncation. When omitted, :func:`solve_spectrum` picks a
        converged one first.
    jobs : int
        Ground-state solves run concurrently on this many threads.

    Returns
    -------
    FiniteDifferenceQFI
        The estimate at ``delta`` and ``|I(delta) - I(delta/2)| / 3``.
    """
    config = config or FockConfig()
    delta = 1e-5 * params.omega if delta_omega is None else delta_omega
    if n_max is None:
        n_max = solve_spectrum(params, config).n_max
    shifts = (0.0, -delta, delta, -delta / 2, delta / 2)

    def solve(shift):
        p = params if shift == 0.0 else params.replace(omega=params.omega + shift)
        return ground_state(p, n_max, config)[1].amplitudes

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            psi0, m1, p1, m2, p2 = pool.map(solve, shifts)
    else:
        psi0, m1, p1, m2, p2 = map(solve, shifts)
    coarse = fidelity_qfi(m1, psi0, p1, delta)
    fine = fidelity_qfi(m2, psi0, p2, delta / 2)
    return FiniteDifferenceQFI(qfi=coarse, error_estimate=abs(coarse - fine) / 3.0, delta=delta, n_max=n_max)
