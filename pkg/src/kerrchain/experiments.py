"""Figure data, the summary table, generic sweeps and the validation suite.

Every command returns a :class:`SweepResult` (or a :class:`ValidationReport`)
whose text rendering is deterministic: rows come out in grid order, sums use
``math.fsum`` and floats are printed with ``%.12e``.
"""
from __future__ import annotations

import io
import json
import math
import os
import subprocess
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterable, Sequence

import numpy as np

from . import asymptotics as asy
from .chain import (
    SystemParams,
    chain_ground_state,
    chain_local_photons,
    chain_qfi,
    distance_for_local_photons,
    independent_ensemble_qfi,
    photon_fractions,
)
from .errors import DomainError
from .gaussian import single_mode_diagonalize, single_mode_qfi, single_mode_resources, two_mode_qfi
from .oracle import FockConfig, qfi_finite_difference, solve_fixed, solve_spectrum
from .perturbation import (
    chain_gap_correction,
    chain_gap_correction_exact,
    gaussian_validity_bounds,
    qfi_saturation_ceiling,
    single_mode_gap_correction,
    single_mode_qfi_correction,
)

__all__ = [
    "QUANTITIES",
    "SweepSpec",
    "SweepResult",
    "Check",
    "ValidationReport",
    "format_value",
    "git_hash",
    "run_sweep",
    "cmd_fig1",
    "cmd_fig2",
    "cmd_fig3",
    "cmd_fig4",
    "cmd_table",
    "cmd_validate",
    "MUTATION_KEYS",
]

QUANTITIES = ("qfi", "photons", "gap", "time", "qfi_over_t2", "photon_fractions", "saturation")
COMPARISONS = ("coupled", "independent", "asymptotic", "continuum")


def format_value(value) -> str:
    if isinstance(value, bool) or value is None:
        return {True: "true", False: "false", None: ""}[value]
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return "%.12e" % value
    return str(value)


@lru_cache(maxsize=1)
def git_hash() -> str:
    here = os.path.dirname(os.path.abspath(__file__))
    try:
        out = subprocess.run(
            ["git", "rev-parse", "--short=12", "HEAD"], cwd=here,
            capture_output=True, text=True, timeout=5, check=True,
        )
        return out.stdout.strip() or "unknown"
    except (OSError, subprocess.SubprocessError):
        return "unknown"


@dataclass
class SweepResult:
    """Ordered rows with a fixed column schema plus ``#`` metadata."""

    name: str
    columns: tuple[str, ...]
    rows: list[tuple] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)
    extras: dict = field(default_factory=dict)

    def records(self) -> list[dict]:
        return [dict(zip(self.columns, row)) for row in self.rows]

    def column(self, name: str) -> list:
        i = self.columns.index(name)
        return [row[i] for row in self.rows]

    def _header(self) -> dict:
        meta = {"command": self.name, "git": git_hash()}
        meta.update(self.metadata)
        meta.update({k: self.extras[k] for k in sorted(self.extras)})
        return meta

    def to_csv(self) -> str:
        buf = io.StringIO()
        for key, value in self._header().items():
            buf.write(f"# {key}: {format_value(value)}\n")
        buf.write(",".join(self.columns) + "\n")
        for row in self.rows:
            buf.write(",".join(format_value(v) for v in row) + "\n")
        return buf.getvalue()

    def to_json(self) -> str:
        def clean(v):
            if isinstance(v, (np.floating, float)):
                v = float(v)
                return v if math.isfinite(v) else str(v)
            if isinstance(v, np.integer):
                return int(v)
            return v

        payload = {
            "metadata": {k: clean(v) for k, v in self._header().items()},
            "columns": list(self.columns),
            "rows": [{c: clean(v) for c, v in zip(self.columns, row)} for row in self.rows],
        }
        return json.dumps(payload, indent=2, sort_keys=False) + "\n"


def _pmap(fn: Callable, items: Sequence, jobs: int) -> list:
    if jobs > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(fn, items))
    return [fn(item) for item in items]


def _check_grid(grid: Sequence, what: str) -> list:
    items = list(grid)
    if not items:
        raise DomainError(f"{what} grid is empty")
    return items


def _gap_for(omega: float, x: float) -> float:
    return omega * math.sqrt(x * (2.0 - x))


# ---------------------------------------------------------------- generic sweep

@dataclass(frozen=True)
class SweepSpec:
    """What to sweep and over which grid.

    Exactly one of ``epsilon_grid``, ``x_grid``, ``m_grid`` and ``n_loc_grid``
    is set. With ``m_grid`` the coupling comes from ``n_loc_max`` when given,
    otherwise from the template's ``epsilon``.
    """

    quantity: str
    params: SystemParams
    epsilon_grid: tuple[float, ...] | None = None
    x_grid: tuple[float, ...] | None = None
    m_grid: tuple[int, ...] | None = None
    n_loc_grid: tuple[float, ...] | None = None
    n_loc_max: float | None = None
    comparisons: tuple[str, ...] = ("coupled",)

    def __post_init__(self):
        if self.quantity not in QUANTITIES:
            raise DomainError(f"unknown quantity {self.quantity!r}; choose from {', '.join(QUANTITIES)}")
        grids = [g for g in (self.epsilon_grid, self.x_grid, self.m_grid, self.n_loc_grid) if g is not None]
        if len(grids) != 1:
            raise DomainError("exactly one grid (epsilon, x, M or N_loc) must be given")
        _check_grid(grids[0], "sweep")
        bad = set(self.comparisons) - set(COMPARISONS)
        if bad:
            raise DomainError(f"unknown comparison(s) {sorted(bad)}")

    def points(self) -> list[SystemParams]:
        """One Gaussian parameter set per grid point, in grid order."""
        p = self.params
        if self.epsilon_grid is not None:
            return [p.replace(epsilon=float(e)) for e in self.epsilon_grid]
        if self.x_grid is not None:
            return [SystemParams.near_critical(p.omega, float(x), p.m_modes, p.chi, p.eta) for x in self.x_grid]
        if self.n_loc_grid is not None:
            return [
                SystemParams.near_critical(p.omega, distance_for_local_photons(p.omega, p.m_modes, n),
                                           p.m_modes, p.chi, p.eta)
                for n in self.n_loc_grid
            ]
        out = []
        for m in self.m_grid:
            if self.n_loc_max is not None:
                x = distance_for_local_photons(p.omega, int(m), self.n_loc_max)
                out.append(SystemParams.near_critical(p.omega, x, int(m), p.chi, p.eta))
            else:
                out.append(p.replace(m_modes=int(m)))
        return out


_SWEEP_COLUMNS = (
    "omega", "epsilon", "x", "m_modes", "chi", "eta", "n_loc",
    "coupled", "independent", "asymptotic", "asymptotic_valid", "continuum", "continuum_valid",
    "saturated", "provenance",
)


def _saturation_flag(p: SystemParams, n_total: float):
    if p.chi == 0 or (p.m_modes > 1 and p.m_modes % 2 == 0):
        return None
    return n_total > gaussian_validity_bounds(p.omega, p.chi, p.m_modes)[1]


def _sweep_row(spec: SweepSpec, p: SystemParams) -> list[tuple]:
    g = p.replace(chi=0.0) if p.chi else p
    sol = chain_ground_state(g)
    x, m, q = g.x, g.m_modes, spec.quantity
    sat = _saturation_flag(p, sol.n_total)
    base = (p.omega, p.epsilon, x, m, p.chi, p.eta, sol.n_local)
    want = set(spec.comparisons)
    near = 0 < x < 1

    if q == "photon_fractions":
        fr = photon_fractions(g)
        return [base + (r, None, None, None, None, None, sat, "chain_block_sum", mode.n)
                for mode, r in zip(sol.modes, fr)]

    coupled = independent = asym = cont = asym_ok = cont_ok = None
    tags = ["chain_block_sum"]
    single = SystemParams.near_critical(p.omega, x, 1, eta=p.eta) if x > 0 else SystemParams(p.omega, p.epsilon)
    if "asymptotic" in want and near:
        est = asy.critical_expansion(p.omega, x, m, p.eta)
        asym_ok = est.validity_note.endswith("satisfied")
    if "continuum" in want and near:
        cest = asy.continuum_qfi(p.omega, x, m)
        cont_ok = cest.is_valid

    if q in ("qfi", "qfi_over_t2"):
        over_t2 = q == "qfi_over_t2"
        t2 = sol.protocol_time ** 2 if over_t2 else 1.0
        coupled = sol.qfi_total / t2
        if "independent" in want:
            t_sm2 = (1.0 / (p.eta * _gap_for(p.omega, x))) ** 2 if over_t2 else 1.0
            independent = independent_ensemble_qfi(g) / t_sm2
            tags.append("independent_sum")
        if asym_ok is not None:
            asym = est.qfi_estimate / t2
            tags.append("critical_expansion")
        if cont_ok is not None:
            cont = cest.qfi / t2
            tags.append("continuum_integral")
    elif q == "photons":
        coupled = sol.n_local
        if "independent" in want:
            independent = chain_local_photons(single)
            tags.append("single_mode_closed_form")
        if asym_ok is not None:
            asym = est.n_estimate / m
            tags.append("critical_expansion")
        if cont_ok is not None:
            cont = cest.n_total / m
            tags.append("continuum_integral")
    elif q in ("gap", "time"):
        coupled = sol.gap if q == "gap" else sol.protocol_time
        if "independent" in want:
            independent = coupled
        if asym_ok is not None:
            asym = 1.0 / (p.eta * est.t_estimate) if q == "gap" else est.t_estimate
            tags.append("critical_expansion")
    else:  # saturation: photons against the Gaussian photon bound, ceilings alongside
        coupled = sol.n_total
        tags = ["chain_block_sum+kerr_first_order"]
        if p.chi > 0 and not (m > 1 and m % 2 == 0):
            asym = gaussian_validity_bounds(p.omega, p.chi, m)[1]
            independent = qfi_saturation_ceiling(p.omega, p.chi, m, coupled=False)
            cont = qfi_saturation_ceiling(p.omega, p.chi, m, coupled=True)
            asym_ok = cont_ok = None
    return [base + (coupled, independent, asym, asym_ok, cont, cont_ok, sat, "+".join(tags))]


def run_sweep(spec: SweepSpec, jobs: int = 1) -> SweepResult:
    """Evaluate ``spec`` on every grid point; rows keep grid order."""
    columns = _SWEEP_COLUMNS + (("mode_n",) if spec.quantity == "photon_fractions" else ())
    chunks = _pmap(lambda p: _sweep_row(spec, p), spec.points(), jobs)
    p = spec.params
    meta = {
        "quantity": spec.quantity,
        "template": f"omega={p.omega!r} epsilon={p.epsilon!r} chi={p.chi!r} M={p.m_modes} eta={p.eta!r}",
        "comparisons": "+".join(spec.comparisons),
    }
    if spec.n_loc_max is not None:
        meta["n_loc_max"] = spec.n_loc_max
    return SweepResult("sweep", columns, [r for chunk in chunks for r in chunk], meta)


# ---------------------------------------------------------------- figures

def cmd_fig1(omega: float = 1.0, eta: float = 1.0, epsilon_grid: Iterable[float] | None = None) -> SweepResult:
    """Single sensor: QFI, photons, gap and protocol time along an ``epsilon`` grid."""
    grid = _check_grid(epsilon_grid if epsilon_grid is not None else np.linspace(0.0, 0.99, 100) * omega, "epsilon")
    rows = []
    for e in grid:
        sol = single_mode_diagonalize(omega, float(e))
        res = single_mode_resources(omega, float(e), eta)
        rows.append((float(e), sol.x, single_mode_qfi(omega, float(e)), sol.n_photons, sol.lam, res.time,
                     "single_mode_closed_form"))
    return SweepResult(
        "fig1", ("epsilon", "x", "qfi", "n_loc", "gap", "time", "provenance"), rows,
        {"omega": omega, "eta": eta},
    )


def cmd_fig2(omega: float = 1.0, m_modes: int | Sequence[int] | None = None,
             x_list: Iterable[float] | None = None) -> SweepResult:
    """Photon share ``N_k / N_0`` over the full Brillouin zone for each ``x``.

    Defaults to ``M = 31`` and ``M = 30`` side by side.
    """
    ms = [31, 30] if m_modes is None else ([m_modes] if isinstance(m_modes, int) else list(m_modes))
    xs = _check_grid(x_list if x_list is not None else (1e-1, 1e-2, 1e-3, 1e-4), "x")
    rows = []
    for m in ms:
        lo = -m // 2 + 1 if m % 2 == 0 else -(m - 1) // 2
        for x in xs:
            fr = photon_fractions(SystemParams.near_critical(omega, float(x), m))
            for n in range(lo, lo + m):
                rows.append((m, float(x), n, 2.0 * math.pi * n / m, fr[abs(n)], "chain_block_sum"))
    return SweepResult("fig2", ("m_modes", "x", "n", "k", "ratio", "provenance"), rows, {"omega": omega})


def _constrained(omega: float, eta: float, m: int, n_loc: float):
    x = distance_for_local_photons(omega, m, n_loc)
    p = SystemParams.near_critical(omega, x, m, eta=eta)
    sol = chain_ground_state(p)
    return p, sol


def cmd_fig3(omega: float = 1.0, eta: float = 1.0, m_grid: Sequence[int] | None = None,
             n_loc_grid: Sequence[float] | None = None, n_loc_max: float = 100.0,
             m_modes: int = 101, jobs: int = 1) -> SweepResult:
    """Constrained ``I/T^2`` with the quadratic and exponential overlays.

    With ``m_grid`` every chain holds ``n_loc_max`` photons per site. With
    ``n_loc_grid`` a single chain of ``m_modes`` sites is swept in ``N_loc``.
    """
    if m_grid is not None and n_loc_grid is not None:
        raise DomainError("give either an M grid or an N_loc grid, not both")
    if n_loc_grid is not None:
        points = [(int(m_modes), float(n)) for n in _check_grid(n_loc_grid, "N_loc")]
    else:
        grid = m_grid if m_grid is not None else range(1, 32, 2)
        points = [(int(m), float(n_loc_max)) for m in _check_grid(grid, "M")]

    def row(point):
        m, n_loc = point
        p, sol = _constrained(omega, eta, m, n_loc)
        t = sol.protocol_time
        exact = sol.qfi_total / (t * t)
        quad = asy.qfi_scaling(m, t, n_loc, eta) / (t * t)
        quad_ok = asy.x_from_photons(n_loc, m).valid
        expo = asy.continuum_qfi_scaling(m, t, n_loc, eta)
        return (m, n_loc, p.x, p.epsilon, t, exact, quad, quad_ok, expo.value / (t * t), expo.valid,
                "chain_block_sum")

    rows = _pmap(row, points, jobs)
    return SweepResult(
        "fig3",
        ("m_modes", "n_loc", "x", "epsilon", "time", "qfi_over_t2", "quadratic_overlay", "quadratic_valid",
         "exponential_overlay", "exponential_valid", "provenance"),
        rows, {"omega": omega, "eta": eta},
    )


def _loglog_slope(xs, ys) -> float:
    return float(np.polyfit(np.log(xs), np.log(ys), 1)[0])


def cmd_fig4(omega: float = 1.0, eta: float = 1.0, m_grid: Sequence[int] | None = None,
             n_loc_max: float = 100.0, jobs: int = 1) -> SweepResult:
    """Coupled chain against independent sensors at fixed ``N_loc``.

    Slopes are least-squares fits of ``log(I/T^2)`` against ``log M`` over the
    odd ``M >= 3`` of the grid.
    """
    grid = [int(m) for m in _check_grid(m_grid if m_grid is not None else range(1, 32), "M")]
    x_sm = distance_for_local_photons(omega, 1, n_loc_max)
    sm = SystemParams.near_critical(omega, x_sm, 1, eta=eta)
    t_sm = 1.0 / (eta * _gap_for(omega, x_sm))
    i_sm = chain_qfi(sm)[0]

    def row(m):
        p, sol = _constrained(omega, eta, m, n_loc_max)
        t = sol.protocol_time
        return (m, "even" if m % 2 == 0 else "odd", p.x, sol.qfi_total / (t * t), m * i_sm / (t_sm * t_sm),
                "chain_block_sum+independent_sum")

    rows = _pmap(row, grid, jobs)
    odd = [r for r in rows if r[1] == "odd" and r[0] >= 3]
    extras = {}
    if len(odd) >= 2:
        ms = [r[0] for r in odd]
        extras["slope_coupled"] = _loglog_slope(ms, [r[3] for r in odd])
        extras["slope_independent"] = _loglog_slope(ms, [r[4] for r in odd])
    return SweepResult(
        "fig4", ("m_modes", "parity", "x", "coupled_qfi_over_t2", "independent_qfi_over_t2", "provenance"),
        rows, {"omega": omega, "eta": eta, "n_loc": n_loc_max}, extras,
    )


def cmd_table(omega: float = 1.0, chi: float = 1e-4, m_modes: int = 27, eta: float = 1.0) -> SweepResult:
    """Resource scalings of independent sensors and the coupled chain.

    Numeric cells are evaluated at the Gaussian validity limit: ``N_loc``
    at the QFI photon bound, ``T = 2 N / (eta omega)`` with ``N`` the photons
    of one critical mode (``N_loc`` for a single sensor, ``M N_loc`` for the
    chain).
    """
    n_ind = gaussian_validity_bounds(omega, chi, 1)[1]
    n_tot = gaussian_validity_bounds(omega, chi, m_modes)[1]
    m = m_modes
    t_ind = 2.0 * n_ind / (eta * omega)
    n_loc_c = n_tot / m
    t_c = 2.0 * n_tot / (eta * omega)
    e2 = eta * eta
    rows = [
        ("n_loc_scaling", "2 eta^2 T^2 M N_loc^2", "2 eta^2 T^2 M^2 N_loc^2",
         2 * e2 * t_ind ** 2 * m * n_ind ** 2, 2 * e2 * t_c ** 2 * m * m * n_loc_c ** 2),
        ("n_scaling", "2 eta^2 T^2 N^2 / M", "2 eta^2 T^2 N^2",
         2 * e2 * t_ind ** 2 * (m * n_ind) ** 2 / m, 2 * e2 * t_c ** 2 * n_tot ** 2),
        ("saturation", "(M / 100 w^2) (w/chi)^(4/3)", "(1 / 100 w^2) (M w/chi)^(4/3)",
         qfi_saturation_ceiling(omega, chi, m, coupled=False), qfi_saturation_ceiling(omega, chi, m, coupled=True)),
    ]
    rows = [r + ("kerr_first_order",) for r in rows]
    return SweepResult(
        "table",
        ("cell", "independent_formula", "coupled_formula", "independent_value", "coupled_value", "provenance"),
        rows,
        {"omega": omega, "chi": chi, "m_modes": m, "eta": eta,
         "n_loc_independent": n_ind, "n_loc_coupled": n_loc_c},
    )


def render_table(result: SweepResult) -> str:
    """Plain-text grid of a :func:`cmd_table` result."""
    head = ("", "independent", "coupled")
    lines = []
    for rec in result.records():
        lines.append((rec["cell"], rec["independent_formula"], rec["coupled_formula"]))
        lines.append(("", format_value(rec["independent_value"]), format_value(rec["coupled_value"])))
    widths = [max(len(r[i]) for r in [head] + lines) for i in range(3)]
    fmt = " | ".join("{:<%d}" % w for w in widths)
    out = [fmt.format(*head), "-+-".join("-" * w for w in widths)]
    out += [fmt.format(*r) for r in lines]
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------- validation

MUTATION_KEYS = (
    "oracle_gap", "oracle_photons", "oracle_site_photons", "oracle_qfi",
    "reduction", "csc_sum", "expansion_qfi", "expansion_photons", "halving_ratio",
    "slope", "odd_even_ratio", "continuum", "crossover",
    "gap_first_order", "qfi_first_order", "chain_gap", "chain_gap_exact", "leading_term",
    "ceiling_ratio",
)


@dataclass(frozen=True)
class Check:
    """One comparison: ``measured`` must not exceed ``tolerance``.

    ``expected_failure`` marks clauses whose reference is known to be wrong;
    they are reported as ``XFAIL`` (or ``XPASS``) and do not change the exit
    status.
    """

    group: str
    label: str
    measured: float
    tolerance: float
    expected_failure: bool = False

    @property
    def passed(self) -> bool:
        return bool(self.measured <= self.tolerance)

    @property
    def status(self) -> str:
        if self.expected_failure:
            return "XPASS" if self.passed else "XFAIL"
        return "PASS" if self.passed else "FAIL"

    def line(self) -> str:
        return f"{self.status:<5} {self.group:<20} {self.label:<40} measured={self.measured:.6e} tol={self.tolerance:.1e}"


@dataclass
class ValidationReport:
    checks: list[Check]
    header: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed or c.expected_failure for c in self.checks)

    def text(self) -> str:
        counts = {s: sum(c.status == s for c in self.checks) for s in ("PASS", "FAIL", "XFAIL", "XPASS")}
        lines = list(self.header) + [c.line() for c in self.checks]
        lines.append("summary: " + " ".join(f"{k}={v}" for k, v in counts.items())
                     + (" result=OK" if self.passed else " result=FAILED"))
        return "\n".join(lines) + "\n"


def _rel(a: float, b: float) -> float:
    return abs(a - b) / abs(b) if b != 0 else abs(a)


class _Collector:
    def __init__(self, mutate: dict[str, float]):
        self.mutate = mutate
        self.checks: list[Check] = []

    def ref(self, group: str, value: float) -> float:
        return value * self.mutate.get(group, 1.0)

    def rel(self, group, label, measured, reference, tol, xfail=False):
        self.checks.append(Check(group, label, _rel(measured, self.ref(group, reference)), tol, xfail))

    def abs(self, group, label, measured, reference, tol, xfail=False):
        self.checks.append(Check(group, label, abs(measured - self.ref(group, reference)), tol, xfail))


def _chi_slope(fn: Callable[[float], float], h: float) -> float:
    # one-sided second-order derivative at chi = 0 (chi may not go negative)
    f0, f1, f2 = fn(0.0), fn(h), fn(2.0 * h)
    return (4.0 * f1 - f2 - 3.0 * f0) / (2.0 * h)


def _oracle_gaussian(c: _Collector, config: FockConfig, jobs: int) -> None:
    cases = [(m, e) for m in (1, 2, 3) for e in (0.3, 0.5, 0.8)]

    def run(case):
        m, e = case
        p = SystemParams(1.0, e, m_modes=m)
        spec = solve_spectrum(p, config)
        fd = qfi_finite_difference(p, config, n_max=spec.n_max)
        return spec, fd

    results = _pmap(run, cases, jobs)
    for (m, e), (spec, fd) in zip(cases, results):
        p = SystemParams(1.0, e, m_modes=m)
        sol = chain_ground_state(p)
        tag = f"M={m} eps={e}"
        c.rel("oracle_gap", tag, spec.gap, sol.gap, 1e-3)
        c.rel("oracle_photons", tag, spec.total_photons, sol.n_total, 1e-3)
        worst = max(_rel(v, c.ref("oracle_site_photons", sol.n_local)) for v in spec.per_site_photons)
        c.checks.append(Check("oracle_site_photons", tag, worst, 1e-3))
        c.rel("oracle_qfi", tag, fd.qfi, sol.qfi_total, 1e-3)


def _oracle_kerr(c: _Collector, config: FockConfig, jobs: int) -> None:
    h = 1e-4
    single = (0.3, 0.5, 0.6, 0.8)

    def single_case(e):
        p = SystemParams(1.0, e)
        n_max = solve_spectrum(p, config).n_max
        gap = _chi_slope(lambda chi: solve_fixed(p.replace(chi=chi), n_max, config).gap, h)
        qfi = _chi_slope(lambda chi: qfi_finite_difference(p.replace(chi=chi), config, n_max=n_max).qfi, h)
        return gap, qfi

    def chain_case(e):
        p = SystemParams(1.0, e, m_modes=3)
        n_max = solve_spectrum(p, config).n_max
        return _chi_slope(lambda chi: solve_fixed(p.replace(chi=chi), n_max, config).gap, h)

    results = _pmap(single_case, single, jobs)
    for e, (gap, qfi) in zip(single, results):
        n = single_mode_diagonalize(1.0, e).n_photons
        if e in (0.3, 0.6, 0.8):
            c.rel("gap_first_order", f"M=1 eps={e}", gap, single_mode_gap_correction(n), 1e-2)
        c.rel("qfi_first_order", f"M=1 eps={e}", qfi, single_mode_qfi_correction(1.0, e)[0], 5e-2)

    chain_eps = (0.3, 0.6)
    slopes = _pmap(chain_case, chain_eps, jobs)
    for e, slope in zip(chain_eps, slopes):
        sol = chain_ground_state(SystemParams(1.0, e, m_modes=3))
        zero_mode_form = chain_gap_correction(sol.n_total, sol.zero_mode.n_k, 3)
        c.rel("chain_gap", f"M=3 eps={e} zero-mode form", slope, zero_mode_form, 2e-2, xfail=True)
        c.rel("chain_gap_exact", f"M=3 eps={e} full Wick form", slope,
              chain_gap_correction_exact(SystemParams(1.0, e, m_modes=3)), 2e-2)


def _analytic(c: _Collector) -> None:
    # reductions
    for e in (0.0, 0.3, 0.6, 0.9, 0.999):
        one = chain_ground_state(SystemParams(1.0, e))
        sm = single_mode_diagonalize(1.0, e)
        if e:
            c.rel("reduction", f"M=1 qfi eps={e}", one.qfi_total, single_mode_qfi(1.0, e), 1e-12)
        else:
            c.abs("reduction", f"M=1 qfi eps={e}", one.qfi_total, 0.0, 1e-12)
        c.abs("reduction", f"M=1 photons eps={e}", one.n_total, sm.n_photons, 1e-12 * max(1.0, sm.n_photons))
        c.rel("reduction", f"M=1 gap eps={e}", one.gap, sm.lam, 1e-12)
        if e:
            c.rel("reduction", f"M=2 qfi eps={e}", chain_qfi(SystemParams(1.0, e, m_modes=2))[0],
                  two_mode_qfi(1.0, e), 1e-12)

    # cosecant sums
    worst2 = max(_rel(asy.brute_force_csc_sum(m, 2), c.ref("csc_sum", asy.csc_power_sum(m, 2)))
                 for m in range(3, 202, 2))
    worst4 = max(_rel(asy.brute_force_csc_sum(m, 4), c.ref("csc_sum", asy.csc_power_sum(m, 4)))
                 for m in range(3, 202, 2))
    worst_even = max(
        _rel(asy.brute_force_csc_sum(m, 4) - asy.brute_force_csc_sum(m, 2),
             c.ref("csc_sum", asy.csc_power_sum(m, "4-2")))
        for m in range(4, 201, 2)
    )
    c.checks += [
        Check("csc_sum", "odd M<=201 power 2", worst2, 1e-10),
        Check("csc_sum", "odd M<=201 power 4", worst4, 1e-10),
        Check("csc_sum", "even M<=200 combined", worst_even, 1e-10),
    ]

    # critical expansions
    for m in (10, 11):
        for x in (1e-3, 1e-4, 1e-5):
            p = SystemParams.near_critical(1.0, x, m)
            c.rel("expansion_qfi", f"M={m} x={x:g}", asy.qfi_critical_expansion(1.0, x, m), chain_qfi(p)[0],
                  10 * x)
            c.rel("expansion_photons", f"M={m} x={x:g}", asy.photons_critical_expansion(1.0, x, m),
                  chain_ground_state(p).n_total, 10 * x)
            err = abs(asy.qfi_critical_expansion(1.0, x, m) - chain_qfi(p)[0])
            err_half = abs(asy.qfi_critical_expansion(1.0, x / 2, m)
                           - chain_qfi(SystemParams.near_critical(1.0, x / 2, m))[0])
            c.abs("halving_ratio", f"M={m} x={x:g}", err / err_half, 2.0, 0.2)

    # slopes and odd/even prefactor
    fig4 = cmd_fig4(m_grid=range(3, 32, 2), n_loc_max=100.0)
    c.abs("slope", "coupled", fig4.extras["slope_coupled"], 2.0, 0.05)
    c.abs("slope", "independent", fig4.extras["slope_independent"], 1.0, 0.05)
    for m_even in (10,):
        for x in (1e-6, 1e-7, 1e-8):
            def prefactor(m):
                p = SystemParams.near_critical(1.0, x, m)
                sol = chain_ground_state(p)
                return sol.qfi_total / (m * sol.protocol_time * sol.n_local) ** 2
            for m_odd in (m_even - 1, m_even + 1):
                c.rel("odd_even_ratio", f"M={m_odd}/{m_even} x={x:g}", prefactor(m_odd) / prefactor(m_even),
                      2.0, 5e-2)

    # continuum limit
    p = SystemParams.near_critical(1.0, 0.3, 10_000)
    c.rel("continuum", "x=0.3 M=1e4", asy.continuum_qfi(1.0, 0.3, 10_000).qfi, chain_qfi(p)[0], 1e-2)
    rng = np.random.default_rng(20240601)
    done = worst = 0
    while done < 100:
        x = float(10 ** rng.uniform(-1.5, math.log10(0.9)))
        m = int(rng.integers(2, 20_001))
        if not asy.continuum_qfi(1.0, x, m).is_valid:
            continue
        gap = abs(chain_qfi(SystemParams.near_critical(1.0, x, m))[0] - asy.continuum_qfi(1.0, x, m).qfi)
        worst = max(worst, gap / c.ref("continuum", asy.continuum_error_bound(1.0, x, m)))
        done += 1
    c.checks.append(Check("continuum", "100 random (x, M): error / bound", worst, 1.0))

    # crossover at M = 101
    for n_loc in (0.25, 0.5, 1.0, 50.0, 100.0):
        _, sol = _constrained(1.0, 1.0, 101, n_loc)
        t = sol.protocol_time
        exact = sol.qfi_total
        quad = abs(math.log(asy.qfi_scaling(101, t, n_loc) / exact))
        expo = abs(math.log(asy.continuum_qfi_scaling(101, t, n_loc).value / exact))
        closer, other = (expo, quad) if n_loc <= 1 else (quad, expo)
        winner = "exponential" if n_loc <= 1 else "quadratic"
        c.checks.append(Check("crossover", f"N_loc={n_loc:g} {winner} closer", closer - c.ref("crossover", other), 0.0))

    # leading term of the QFI correction
    for n in (10, 20, 50, 100):
        lam = 1.0 / (2 * n + 1)
        eps = math.sqrt((1.0 - lam) * (1.0 + lam))
        ratio = single_mode_qfi_correction(1.0, eps)[0] / (-1056.0 * n ** 7)
        c.abs("leading_term", f"N={n}", ratio, 1.0, 0.1, xfail=True)

    for m in (1, 3, 27, 101):
        r = qfi_saturation_ceiling(1.0, 1e-4, m, True) / qfi_saturation_ceiling(1.0, 1e-4, m, False)
        c.rel("ceiling_ratio", f"M={m}", r, m ** (1.0 / 3.0), 1e-12)


def cmd_validate(budget: int | None = None, mutate: dict[str, float] | None = None,
                 gaussian_only: bool = False, jobs: int = 1) -> ValidationReport:
    """Run the cross-check suite.

    Parameters
    ----------
    budget : int, optional
        Fock basis budget for the oracle checks.
    mutate : dict, optional
        ``{group: factor}``; the reference value of every check in ``group`` is
        multiplied by ``factor``. Used to confirm that the suite can fail.
    gaussian_only : bool
        Skip the oracle and Kerr checks (``chi = 0`` analytics only).
    jobs : int
        Concurrent oracle solves.

    Raises
    ------
    CapacityError
        If ``budget`` cannot hold the ``M = 3`` truncations.
    """
    mutate = dict(mutate or {})
    unknown = set(mutate) - set(MUTATION_KEYS)
    if unknown:
        raise DomainError(f"unknown mutation key(s) {sorted(unknown)}; known: {', '.join(MUTATION_KEYS)}")
    c = _Collector(mutate)
    config = FockConfig() if budget is None else FockConfig(budget=int(budget))
    if not gaussian_only:
        _oracle_gaussian(c, config, jobs)
    _analytic(c)
    if not gaussian_only:
        _oracle_kerr(c, config, jobs)
    header = ["kerrchain validation", "mode: " + ("gaussian-only" if gaussian_only else "full")]
    if mutate:
        header.append("mutations: " + ", ".join(f"{k}={v!r}" for k, v in sorted(mutate.items())))
    return ValidationReport(c.checks, header)
