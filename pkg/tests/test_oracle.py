import cmath
import math

import numpy as np
import pytest

from kerrchain import CapacityError, ConvergenceError, DomainError, GaugeError, SystemParams, chain_ground_state
from kerrchain import oracle
from kerrchain.oracle import (
    FockConfig,
    FockState,
    build_hamiltonian,
    fidelity_qfi,
    ground_state,
    lowest_eigenpair,
    occupations,
    per_site_photons,
    qfi_finite_difference,
    solve_fixed,
    solve_spectrum,
)


def test_number_operator_when_uncoupled():
    h = build_hamiltonian(SystemParams(1.5, 0.0), 5)
    assert h.shape == (6, 6)
    assert np.array_equal(h.toarray(), np.diag(1.5 * np.arange(6)))


def test_single_mode_matrix_elements():
    h = build_hamiltonian(SystemParams(1.0, 0.6, chi=0.1), 4).toarray()
    # <0|H|2> = eps/2 sqrt(2); <2|H|4> = eps/2 sqrt(12); Kerr: chi n(n-1)
    assert h[0, 2] == pytest.approx(0.3 * math.sqrt(2))
    assert h[2, 4] == pytest.approx(0.3 * math.sqrt(12))
    assert h[3, 3] == pytest.approx(3 + 0.1 * 6)
    assert np.array_equal(h, h.T)


def test_two_site_bond_counted_twice():
    h = build_hamiltonian(SystemParams(1.0, 0.6, m_modes=2), 3).toarray()
    # |00> is index 0, |11> is index 1*4 + 1
    assert h[0, 5] == pytest.approx(0.6)
    assert h[5, 0] == pytest.approx(0.6)


def test_three_site_bonds():
    h = build_hamiltonian(SystemParams(1.0, 0.4, m_modes=3), 2)
    d = 3
    idx = lambda a, b, c: a * d * d + b * d + c  # noqa: E731
    for state in ((1, 1, 0), (0, 1, 1), (1, 0, 1)):
        assert h[0, idx(*state)] == pytest.approx(0.2)
    assert h[0, idx(2, 0, 0)] == 0.0


def test_lexicographic_occupations():
    occ = occupations(2, 3)
    assert occ[0].tolist() == [0, 0, 0]
    assert occ[1].tolist() == [0, 0, 1]
    assert occ[3].tolist() == [0, 1, 0]
    assert occ[-1].tolist() == [2, 2, 2]


def test_budget_guard(monkeypatch):
    with pytest.raises(CapacityError):
        build_hamiltonian(SystemParams(1.0, 0.5, m_modes=4), 20, budget=1000)
    monkeypatch.setenv("CHAIN_BUDGET", "50")
    assert oracle.budget_from_env() == 50
    assert FockConfig().budget == 50
    with pytest.raises(CapacityError):
        build_hamiltonian(SystemParams(1.0, 0.5, m_modes=2), 8)
    monkeypatch.delenv("CHAIN_BUDGET")
    assert FockConfig().budget == oracle.DEFAULT_BUDGET == 20_000_000


def test_config_validation():
    with pytest.raises(DomainError):
        FockConfig(n_max=1)


def test_ground_energy_single_mode():
    energy, _ = ground_state(SystemParams(1.0, 0.6), 64)
    assert energy == pytest.approx(-0.1, abs=1e-10)


@pytest.mark.parametrize("m, eps, gap", [(1, 0.6, 0.8), (3, 0.5, math.sqrt(0.75))])
def test_converged_gap(m, eps, gap):
    res = solve_spectrum(SystemParams(1.0, eps, m_modes=m))
    assert res.gap == pytest.approx(gap, abs=1e-6)
    assert res.gap >= 0
    assert res.ground_state.norm == pytest.approx(1.0, abs=1e-10)
    assert res.n_max >= 16


def test_kerr_shifted_gap():
    res = solve_spectrum(SystemParams(1.0, 0.6, chi=0.01))
    assert res.gap == pytest.approx(0.8 + 0.01 * 1.1875, abs=1e-3)


def test_per_site_photons():
    vac = FockState(np.eye(27)[0], 2, 3)
    assert per_site_photons(vac) == (0.0, 0.0, 0.0)
    res = solve_spectrum(SystemParams(1.0, 0.5, m_modes=3))
    n_loc = chain_ground_state(SystemParams(1.0, 0.5, m_modes=3)).n_local
    assert res.per_site_photons == pytest.approx((n_loc,) * 3, abs=1e-6)
    two = solve_spectrum(SystemParams(1.0, 0.6, m_modes=2))
    assert two.per_site_photons == pytest.approx((0.125, 0.125), abs=1e-6)


def test_ground_state_parity_and_excited_parity():
    res = solve_fixed(SystemParams(1.0, 0.7, m_modes=2), 12)
    even_g, odd_g = res.ground_state.parity_weights()
    even_e, odd_e = res.excited_state.parity_weights()
    assert odd_g < 1e-24 and even_g == pytest.approx(1.0)
    assert even_e < 1e-24


def test_parity_sectors_give_global_low_spectrum():
    p = SystemParams(1.0, 0.7, chi=0.05, m_modes=2)
    h = build_hamiltonian(p, 10).toarray()
    full = np.linalg.eigvalsh(h)
    res = solve_fixed(p, 10)
    assert res.ground_energy == pytest.approx(full[0], abs=1e-10)
    assert res.excited_energy == pytest.approx(full[1], abs=1e-10)


def test_truncation_monotone():
    p = SystemParams(1.0, 0.8, chi=0.02, m_modes=2)
    energies = [ground_state(p, n)[0] for n in (2, 4, 6, 8, 12, 16)]
    assert all(b <= a + 1e-12 for a, b in zip(energies, energies[1:]))


def test_sparse_and_dense_paths_agree(monkeypatch):
    p = SystemParams(1.0, 0.5, chi=0.01, m_modes=3)
    dense = solve_fixed(p, 10)
    monkeypatch.setattr(oracle, "DENSE_LIMIT", 10)
    sparse = solve_fixed(p, 10)
    assert sparse.ground_energy == pytest.approx(dense.ground_energy, abs=1e-11)
    assert sparse.gap == pytest.approx(dense.gap, abs=1e-11)
    np.testing.assert_allclose(sparse.ground_state.amplitudes, dense.ground_state.amplitudes, atol=1e-8)


def test_eigen_residual_enforced():
    with pytest.raises(ConvergenceError):
        lowest_eigenpair(np.diag([1.0, 2.0]), eig_tol=-1.0)


def test_doubling_gives_up():
    with pytest.raises(ConvergenceError):
        solve_spectrum(SystemParams(1.0, 0.5), FockConfig(max_doublings=0))


def test_doubling_hits_budget():
    with pytest.raises(CapacityError):
        solve_spectrum(SystemParams(1.0, 0.9, m_modes=3), FockConfig(budget=5000))


@pytest.mark.parametrize("m, expected, tol", [(1, 11.2188, 1e-2), (2, 22.44, 2e-2)])
def test_finite_difference_qfi(m, expected, tol):
    res = qfi_finite_difference(SystemParams(1.0, 0.9, m_modes=m))
    assert res.qfi == pytest.approx(expected, abs=tol)
    assert res.error_estimate < 1e-4
    assert res.delta == pytest.approx(1e-5)


def test_finite_difference_qfi_vacuum():
    assert qfi_finite_difference(SystemParams(1.0, 0.0, m_modes=2), n_max=6).qfi == pytest.approx(0.0, abs=1e-8)


def test_threaded_solves_match_serial():
    p = SystemParams(1.0, 0.5, chi=0.01)
    a = qfi_finite_difference(p, n_max=32)
    b = qfi_finite_difference(p, n_max=32, jobs=3)
    assert a == b


def test_qfi_gauge_invariance():
    p = SystemParams(1.0, 0.7, m_modes=2)
    d = 1e-5
    psis = [ground_state(p.replace(omega=1.0 + s), 24)[1].amplitudes for s in (-d, 0.0, d)]
    base = fidelity_qfi(*psis, d)
    rng = np.random.default_rng(7)
    for _ in range(5):
        phases = [cmath.exp(1j * a) for a in rng.uniform(0, 2 * math.pi, 3)]
        rotated = fidelity_qfi(*(ph * v for ph, v in zip(phases, psis)), d)
        assert rotated == pytest.approx(base, abs=1e-10)
    flipped = fidelity_qfi(-psis[0], psis[1], -psis[2], d)
    assert flipped == pytest.approx(base, abs=1e-10)


def test_gauge_error_on_orthogonal_states():
    a, b = np.eye(4)[0], np.eye(4)[1]
    with pytest.raises(GaugeError):
        fidelity_qfi(b, a, b, 1e-3)


def test_gauge_fix_and_dump(tmp_path):
    state = FockState(np.array([0.0, -0.8, 0.6, 0.0]), 1, 2).gauge_fixed()
    assert state.amplitudes.tolist() == pytest.approx([0.0, 0.8, -0.6, 0.0])
    path = tmp_path / "amps.txt"
    state.dump(path)
    lines = path.read_text().splitlines()
    assert lines[1].split()[:2] == ["0", "1"]
    assert float(lines[1].split()[2]) == pytest.approx(0.8)
    assert len(lines) == 4
