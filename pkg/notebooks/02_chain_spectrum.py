"""Coupled chains in reciprocal space.

Periodic chains split into momentum blocks. Near the critical point the
photons pile up in the zero mode (odd M) or in the pair 0 and pi (even M).
"""
from kerrchain import SystemParams, chain_ground_state, distance_for_local_photons, photon_fractions

for m in (7, 8):
    p = SystemParams.near_critical(1.0, 1e-3, m)
    sol = chain_ground_state(p)
    print(f"M={m}: N_total={sol.n_total:.3f}, gap={sol.gap:.4g}, QFI={sol.qfi_total:.4g}")
    for mode, frac in zip(sol.modes, photon_fractions(p)):
        print(f"   n={mode.n:>2} k={mode.k:6.3f}  deg={mode.degeneracy}  N_k/N_0={frac:.3e}")

# The chain beats M independent sensors holding the same photons per site.
for m in (1, 5, 25):
    x = distance_for_local_photons(1.0, m, 10.0)
    p = SystemParams.near_critical(1.0, x, m)
    sol = chain_ground_state(p)
    print(f"M={m:>2}: I/T^2 = {sol.qfi_total / sol.protocol_time ** 2:.4g}")
