"""Brute-force check in a truncated Fock space.

The oracle diagonalizes the full Hamiltonian, Kerr term included, and
reproduces the Gaussian numbers when chi = 0.
"""
from kerrchain import SystemParams, chain_ground_state
from kerrchain.oracle import qfi_finite_difference, solve_spectrum

for chi in (0.0, 0.01):
    p = SystemParams(1.0, 0.5, chi=chi, m_modes=3)
    res = solve_spectrum(p)
    fd = qfi_finite_difference(p, n_max=res.n_max)
    print(f"chi={chi}: n_max={res.n_max} gap={res.gap:.8f} N={res.total_photons:.8f} "
          f"QFI={fd.qfi:.8f} (+- {fd.error_estimate:.1e})")

sol = chain_ground_state(SystemParams(1.0, 0.5, m_modes=3))
print(f"Gaussian:  gap={sol.gap:.8f} N={sol.n_total:.8f} QFI={sol.qfi_total:.8f}")
