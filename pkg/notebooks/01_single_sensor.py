"""A single parametrically driven resonator used as a critical sensor.

Walk towards the critical coupling and watch the information, photon
number and adiabatic sweep time grow together.
"""
from kerrchain import single_mode_diagonalize, single_mode_qfi, single_mode_resources

omega = 1.0
print(f"{'eps/omega':>10} {'gap':>10} {'photons':>10} {'QFI':>12} {'sweep time':>11}")
for ratio in (0.0, 0.5, 0.9, 0.99, 0.999, 0.9999):
    eps = ratio * omega
    sol = single_mode_diagonalize(omega, eps)
    res = single_mode_resources(omega, eps)
    print(f"{ratio:>10} {sol.lam:>10.4g} {sol.n_photons:>10.4g} {single_mode_qfi(omega, eps):>12.4g} {res.time:>11.4g}")

# Close to the critical point the information per unit time squared
# settles onto a Heisenberg-like law in the photon number.
sol = single_mode_diagonalize(omega, 0.9999)
ratio = single_mode_qfi(omega, 0.9999) * sol.lam ** 2
print(f"\nI/T^2 = {ratio:.4g}  vs  2 N^2 = {2 * sol.n_photons ** 2:.4g}")
