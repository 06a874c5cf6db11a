import math

import numpy as np
import pytest

from kerrchain import (
    ConvergenceError,
    DomainError,
    SystemParams,
    chain_ground_state,
    chain_local_photons,
    chain_qfi,
    distance_for_local_photons,
    epsilon_for_local_photons,
    fbz_momenta,
    independent_ensemble_qfi,
    photon_fractions,
    single_mode_diagonalize,
    single_mode_qfi,
    two_mode_qfi,
)


def test_fbz_ranges():
    assert [n for n, _ in fbz_momenta(4)] == [-1, 0, 1, 2]
    assert [n for n, _ in fbz_momenta(5)] == [-2, -1, 0, 1, 2]
    assert [n for n, _ in fbz_momenta(1)] == [0]
    assert fbz_momenta(4)[-1][1] == pytest.approx(math.pi)
    with pytest.raises(DomainError):
        fbz_momenta(0)


def test_frozen_chain_qfi_m3():
    # k=0: 0.25/(2*0.75^2) = 2/9; pair at cos k = -1/2: 2*0.0625/(2*0.9375^2) = 16/225
    total, per = chain_qfi(SystemParams(1.0, 0.5, m_modes=3))
    assert total == pytest.approx(66 / 225, rel=1e-14)
    assert per == pytest.approx((2 / 9, 16 / 225), rel=1e-14)


def test_frozen_photons_m3():
    sol = chain_ground_state(SystemParams(1.0, 0.5, m_modes=3))
    assert sol.n_total == pytest.approx(0.11014582817827027, rel=1e-13)
    assert sol.n_local == pytest.approx(0.036715276059423422, rel=1e-13)
    assert sol.gap == pytest.approx(math.sqrt(0.75), rel=1e-15)
    assert sol.protocol_time == pytest.approx(1 / math.sqrt(0.75))


def test_mode_bookkeeping():
    sol = chain_ground_state(SystemParams(1.0, 0.7, m_modes=8))
    assert [m.n for m in sol.modes] == [0, 1, 2, 3, 4]
    assert [m.degeneracy for m in sol.modes] == [1, 2, 2, 2, 1]
    assert sum(m.degeneracy for m in sol.modes) == 8
    assert sol.modes[2].s_k == 0.0  # k = pi/2 decouples
    assert sol.modes[4].s_k < 0 and sol.modes[4].xi_phase == math.pi
    assert sol.modes[0].xi_phase == 0.0
    assert sol.modes[4].n_k == pytest.approx(sol.modes[0].n_k, rel=1e-14)


def test_single_site_reduces_to_single_mode():
    for eps in (0.0, 0.2, 0.9, 0.99999):
        sol = chain_ground_state(SystemParams(1.3, eps * 1.3))
        sm = single_mode_diagonalize(1.3, eps * 1.3)
        assert sol.qfi_total == pytest.approx(single_mode_qfi(1.3, eps * 1.3), rel=1e-12, abs=0)
        assert sol.n_total == pytest.approx(sm.n_photons, rel=1e-12, abs=0)
        assert sol.gap == pytest.approx(sm.lam, rel=1e-12)


def test_two_sites_reduce_to_two_mode():
    for eps in (0.1, 0.5, 0.95):
        assert chain_qfi(SystemParams(1.0, eps, m_modes=2))[0] == pytest.approx(two_mode_qfi(1.0, eps), rel=1e-12)


def test_independent_ensemble():
    p = SystemParams(1.0, 0.6, m_modes=7)
    assert independent_ensemble_qfi(p) == pytest.approx(7 * single_mode_qfi(1.0, 0.6))
    q = SystemParams.near_critical(1.0, 1e-7, 7)
    assert independent_ensemble_qfi(q) == pytest.approx(7 / (2 * (2e-7) ** 2), rel=1e-6)


def test_near_critical_keeps_exact_x():
    p = SystemParams.near_critical(1.0, 1e-12, 5)
    assert p.x == 1e-12
    assert p.replace(m_modes=7).x == 1e-12
    assert p.replace(epsilon=0.5).x == 0.5


def test_chi_rejected_by_gaussian_solver():
    with pytest.raises(DomainError):
        chain_ground_state(SystemParams(1.0, 0.5, chi=0.1, m_modes=3))


@pytest.mark.parametrize("kwargs", [dict(m_modes=0), dict(m_modes=2.5), dict(chi=-1.0), dict(eta=0.0),
                                    dict(m_modes=True)])
def test_param_validation(kwargs):
    with pytest.raises(DomainError):
        SystemParams(1.0, 0.5, **kwargs)


def test_photon_fractions_odd_confined_even_twin_peaks():
    odd = photon_fractions(SystemParams.near_critical(1.0, 1e-4, 31))
    assert odd[0] == 1.0 and max(odd[1:]) < 0.2
    even = photon_fractions(SystemParams.near_critical(1.0, 1e-4, 30))
    assert even[0] == 1.0 and even[-1] == pytest.approx(1.0, rel=1e-12)
    assert max(even[1:-1]) < 0.1
    with pytest.raises(DomainError):
        photon_fractions(SystemParams(1.0, 0.0, m_modes=3))


def test_local_photon_inversion():
    for m in (1, 3, 10, 101):
        for target in (0.01, 1.0, 100.0):
            x = distance_for_local_photons(1.0, m, target)
            got = chain_local_photons(SystemParams.near_critical(1.0, x, m))
            assert got == pytest.approx(target, rel=1e-10)
    eps = epsilon_for_local_photons(1.0, 1, 0.125)
    assert eps == pytest.approx(0.6, rel=1e-12)


def test_local_photon_inversion_errors():
    with pytest.raises(DomainError):
        distance_for_local_photons(1.0, 3, 0.0)
    with pytest.raises(ConvergenceError):
        distance_for_local_photons(1.0, 3, 1e200)


def test_million_site_bogoliubov_consistency():
    # N_k (2 lam_k) = omega - lam_k must hold block by block for a large chain
    sol = chain_ground_state(SystemParams.near_critical(1.0, 1e-3, 1_000_000))
    lam = np.array([m.lambda_k for m in sol.modes])
    n = np.array([m.n_k for m in sol.modes])
    t = np.array([m.t_k for m in sol.modes])
    s = np.array([m.s_k for m in sol.modes])
    assert len(lam) == 500_001
    np.testing.assert_allclose(2 * n * lam, 1.0 - lam, rtol=1e-12, atol=1e-15)
    np.testing.assert_allclose(t * t - s * s, 1.0, atol=1e-10)
