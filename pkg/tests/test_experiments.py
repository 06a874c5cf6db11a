import json
import math

import pytest

from kerrchain import DomainError, SystemParams, single_mode_qfi
from kerrchain import experiments as ex

GOLDEN_COLUMNS = {
    "fig1": "epsilon,x,qfi,n_loc,gap,time,provenance",
    "fig2": "m_modes,x,n,k,ratio,provenance",
    "fig3": "m_modes,n_loc,x,epsilon,time,qfi_over_t2,quadratic_overlay,quadratic_valid,"
            "exponential_overlay,exponential_valid,provenance",
    "fig4": "m_modes,parity,x,coupled_qfi_over_t2,independent_qfi_over_t2,provenance",
    "table": "cell,independent_formula,coupled_formula,independent_value,coupled_value,provenance",
    "sweep": "omega,epsilon,x,m_modes,chi,eta,n_loc,coupled,independent,asymptotic,asymptotic_valid,"
             "continuum,continuum_valid,saturated,provenance",
}


def _small_results():
    spec = ex.SweepSpec("qfi", SystemParams(1.0, 0.0, m_modes=3), epsilon_grid=(0.1, 0.5))
    return {
        "fig1": ex.cmd_fig1(epsilon_grid=[0.0, 0.6]),
        "fig2": ex.cmd_fig2(m_modes=5, x_list=[0.1]),
        "fig3": ex.cmd_fig3(m_grid=[1, 3]),
        "fig4": ex.cmd_fig4(m_grid=[1, 2, 3, 5]),
        "table": ex.cmd_table(),
        "sweep": ex.run_sweep(spec),
    }


def test_golden_headers():
    for name, result in _small_results().items():
        lines = result.to_csv().splitlines()
        meta = [l for l in lines if l.startswith("#")]
        assert meta[0] == f"# command: {name}"
        assert meta[1].startswith("# git: ")
        assert lines[len(meta)] == GOLDEN_COLUMNS[name]


def test_csv_is_deterministic():
    a = {k: v.to_csv() for k, v in _small_results().items()}
    b = {k: v.to_csv() for k, v in _small_results().items()}
    assert a == b


def test_float_format():
    assert ex.format_value(0.1) == "1.000000000000e-01"
    assert ex.format_value(3) == "3"
    assert ex.format_value(True) == "true"
    assert ex.format_value(None) == ""


def test_json_mirror():
    res = ex.cmd_fig1(epsilon_grid=[0.6])
    payload = json.loads(res.to_json())
    assert payload["columns"] == list(res.columns)
    assert payload["rows"][0]["gap"] == pytest.approx(0.8)
    assert payload["metadata"]["command"] == "fig1"


def test_fig1_rows():
    res = ex.cmd_fig1(eta=0.5, epsilon_grid=[0.0, 0.6])
    r0, r1 = res.records()
    assert (r0["qfi"], r0["n_loc"], r0["gap"], r0["time"]) == (0.0, 0.0, 1.0, 2.0)
    assert r1["gap"] == pytest.approx(0.8) and r1["n_loc"] == pytest.approx(0.125)
    assert r1["time"] == pytest.approx(2.5)
    default = ex.cmd_fig1()
    for col in ("qfi", "n_loc", "time"):
        vals = default.column(col)
        assert all(b > a for a, b in zip(vals, vals[1:]))
    gaps = default.column("gap")
    assert all(b < a for a, b in zip(gaps, gaps[1:]))


def test_fig2_defaults_cover_both_chains():
    res = ex.cmd_fig2()
    ms = res.column("m_modes")
    assert ms.count(31) == 31 * 4 and ms.count(30) == 30 * 4
    rows30 = [r for r in res.records() if r["m_modes"] == 30 and r["x"] == 1e-4]
    peak = {r["n"]: r["ratio"] for r in rows30}
    assert peak[0] == 1.0 and peak[15] == pytest.approx(1.0)


def test_fig3_single_site_matches_single_mode():
    row = ex.cmd_fig3(m_grid=[1], n_loc_max=2.0).records()[0]
    p = SystemParams.near_critical(1.0, row["x"], 1)
    assert row["qfi_over_t2"] * row["time"] ** 2 == pytest.approx(single_mode_qfi(1.0, p.epsilon), rel=1e-6)


def test_fig3_quadratic_overlay_fits():
    res = ex.cmd_fig3(m_grid=[3, 11, 31], n_loc_max=100.0)
    for r in res.records():
        assert r["qfi_over_t2"] / r["quadratic_overlay"] == pytest.approx(1.0, abs=0.05)
        assert r["quadratic_valid"]


def test_fig3_grid_choice():
    with pytest.raises(DomainError):
        ex.cmd_fig3(m_grid=[3], n_loc_grid=[1.0])
    res = ex.cmd_fig3(n_loc_grid=[0.5, 1.0], m_modes=11)
    assert res.column("m_modes") == [11, 11]


def test_fig4_slopes_and_single_site():
    res = ex.cmd_fig4(m_grid=range(1, 32))
    assert res.extras["slope_coupled"] == pytest.approx(2.0, abs=0.05)
    assert res.extras["slope_independent"] == pytest.approx(1.0, abs=0.05)
    first = res.records()[0]
    assert first["coupled_qfi_over_t2"] == pytest.approx(first["independent_qfi_over_t2"], rel=1e-9)
    assert "# slope_coupled:" in res.to_csv()


def test_table_cells():
    res = ex.cmd_table(1.0, 1e-4, 27, 1.0)
    cells = {r["cell"]: r for r in res.records()}
    assert cells["saturation"]["coupled_value"] == pytest.approx(1.745092e5, rel=1e-6)
    assert cells["saturation"]["coupled_value"] / cells["saturation"]["independent_value"] == pytest.approx(3.0)
    one = {r["cell"]: r for r in ex.cmd_table(1.0, 1e-4, 1, 1.0).records()}
    for r in one.values():
        assert r["independent_value"] == pytest.approx(r["coupled_value"], rel=1e-12)
    text = ex.render_table(res)
    assert "2 eta^2 T^2 M^2 N_loc^2" in text


def test_sweep_spec_validation():
    p = SystemParams(1.0, 0.0)
    with pytest.raises(DomainError):
        ex.SweepSpec("entropy", p, epsilon_grid=(0.1,))
    with pytest.raises(DomainError):
        ex.SweepSpec("qfi", p)
    with pytest.raises(DomainError):
        ex.SweepSpec("qfi", p, epsilon_grid=())
    with pytest.raises(DomainError):
        ex.SweepSpec("qfi", p, epsilon_grid=(0.1,), comparisons=("magic",))
    with pytest.raises(DomainError):
        ex.run_sweep(ex.SweepSpec("qfi", p, epsilon_grid=(1.5,)))


def test_sweep_rows_and_flags():
    base = SystemParams(1.0, 0.0, chi=1e-4, m_modes=3)
    spec = ex.SweepSpec("qfi", base, x_grid=(1e-2, 1e-6), comparisons=("coupled", "independent", "asymptotic"))
    res = ex.run_sweep(spec, jobs=2)
    assert len(res.rows) == 2
    r = res.records()
    assert r[0]["saturated"] is False and r[1]["saturated"] is True
    assert r[1]["asymptotic"] == pytest.approx(r[1]["coupled"], rel=1e-5)
    assert r[1]["provenance"] == "chain_block_sum+independent_sum+critical_expansion"
    fr = ex.run_sweep(ex.SweepSpec("photon_fractions", base.replace(m_modes=5), x_grid=(0.1,)))
    assert fr.columns[-1] == "mode_n" and len(fr.rows) == 3
    sat = ex.run_sweep(ex.SweepSpec("saturation", base, n_loc_grid=(1.0,))).records()[0]
    assert sat["coupled"] == pytest.approx(3.0)


def test_sweep_m_grid_with_constraint():
    spec = ex.SweepSpec("photons", SystemParams(1.0, 0.0), m_grid=(1, 3, 5), n_loc_max=2.0)
    assert ex.run_sweep(spec).column("coupled") == pytest.approx([2.0] * 3, rel=1e-10)


def test_validate_gaussian_only_and_mutation():
    clean = ex.cmd_validate(gaussian_only=True)
    assert clean.passed
    assert "result=OK" in clean.text()
    broken = ex.cmd_validate(gaussian_only=True, mutate={"slope": 1.1})
    assert not broken.passed
    assert any(c.status == "FAIL" and c.group == "slope" for c in broken.checks)
    with pytest.raises(DomainError):
        ex.cmd_validate(gaussian_only=True, mutate={"nope": 2.0})


def test_validate_budget_too_small():
    from kerrchain import CapacityError

    with pytest.raises(CapacityError):
        ex.cmd_validate(budget=100)


def test_check_statuses():
    assert ex.Check("g", "l", 0.5, 1.0).status == "PASS"
    assert ex.Check("g", "l", 2.0, 1.0).status == "FAIL"
    assert ex.Check("g", "l", 2.0, 1.0, True).status == "XFAIL"
    assert ex.Check("g", "l", 0.5, 1.0, True).status == "XPASS"
    assert math.isfinite(ex.Check("g", "l", 0.5, 1.0).measured)
