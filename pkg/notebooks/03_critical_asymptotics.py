"""Closed-form approximations and where they hold.

Compares the near-critical expansion and the continuum estimate with the
exact block sum.
"""
from kerrchain import SystemParams, chain_qfi
from kerrchain import asymptotics as asy

m = 11
for x in (1e-2, 1e-3, 1e-4):
    exact = chain_qfi(SystemParams.near_critical(1.0, x, m))[0]
    approx = asy.qfi_critical_expansion(1.0, x, m)
    print(f"x={x:g}: exact={exact:.6g} expansion={approx:.6g} rel.err={abs(approx / exact - 1):.2e}")

print()
for x, big_m in ((0.3, 10_000), (0.05, 400_000)):
    est = asy.continuum_qfi(1.0, x, big_m)
    exact = chain_qfi(SystemParams.near_critical(1.0, x, big_m))[0]
    print(f"x={x}, M={big_m}: continuum={est.qfi:.6g} exact={exact:.6g} valid={est.is_valid}"
          f" (needs M >= {10 * est.m_required})")

print("\nodd cosecant sums, closed vs direct:")
for mm in (5, 51, 201):
    print(f"  M={mm}: {asy.csc_power_sum(mm, 4):.10g}  {asy.brute_force_csc_sum(mm, 4):.10g}")
