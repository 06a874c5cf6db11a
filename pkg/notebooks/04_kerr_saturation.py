"""When does the Kerr term spoil the Gaussian picture?

First-order corrections give photon ceilings; the chain dilutes the
nonlinearity, so its QFI ceiling sits M^(1/3) above that of independent sensors.
"""
from kerrchain import SystemParams
from kerrchain.perturbation import (
    chain_gap_correction_exact,
    gaussian_validity_bounds,
    qfi_saturation_ceiling,
    single_mode_qfi_correction,
)

qfi1, report = single_mode_qfi_correction(1.0, 0.9, chi=1e-4)
print(f"eps=0.9: I0={report.qfi_zeroth:.4g}, dI/dchi={qfi1:.4g}, gap shift per chi={report.gap_first:.4g}")
print(f"photon ceilings (gap, QFI): {report.photon_bound_gap:.3g}, {report.photon_bound_qfi:.3g}")

for m in (1, 9, 27, 81):
    ind = qfi_saturation_ceiling(1.0, 1e-4, m, coupled=False)
    cpl = qfi_saturation_ceiling(1.0, 1e-4, m, coupled=True)
    print(f"M={m:>2}: ceilings independent={ind:.3e} coupled={cpl:.3e} ratio={cpl / ind:.3f}"
          f"  N bound={gaussian_validity_bounds(1.0, 1e-4, m)[1]:.3g}")

print("\nchain gap shift per chi at M=3:", chain_gap_correction_exact(SystemParams(1.0, 0.6, m_modes=3)))
