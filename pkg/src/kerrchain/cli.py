"""Command-line entry point: ``kerrchain <command> [options]``.

Settings resolve as command-line flag, then ``--config`` file, then the
built-in default. The config file holds ``key = value`` lines (an optional
``[kerrchain]`` section header is accepted); keys are the long option names
with or without leading dashes.

Exit codes: 0 success, 1 validation failure or non-convergence,
2 invalid input, 3 basis budget exceeded.
"""
from __future__ import annotations

import argparse
import configparser
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import experiments as ex
from .chain import SystemParams
from .errors import CapacityError, ConvergenceError, DomainError, GaugeError
from .oracle import budget_from_env

EXIT_OK, EXIT_FAIL, EXIT_DOMAIN, EXIT_CAPACITY = 0, 1, 2, 3

COMMANDS = ("fig1", "fig2", "fig3", "fig4", "table", "validate", "sweep")

# built-in defaults; per-command entries override the shared ones
DEFAULTS = {
    "omega": 1.0, "eta": 1.0, "chi": 0.0, "modes": None, "nloc_max": 100.0,
    "x": None, "epsilon": None, "nloc": None, "out": None, "json": False,
    "budget": None, "jobs": os.cpu_count() or 1,
    "quantity": "qfi", "compare": "coupled", "mutate": None, "gaussian_only": False,
}
COMMAND_DEFAULTS = {
    "table": {"chi": 1e-4, "modes": "27"},
    "fig3": {"modes": None},
}


def parse_float_grid(text: str) -> list[float]:
    """``"0.1,0.2"``, ``"logspace:a:b:n"`` (``10**a .. 10**b``) or ``"linspace:a:b:n"``."""
    text = text.strip()
    for kind, fn in (("logspace", np.logspace), ("linspace", np.linspace)):
        if text.startswith(kind + ":"):
            parts = text.split(":")[1:]
            if len(parts) != 3:
                raise DomainError(f"expected {kind}:start:stop:count, got {text!r}")
            a, b, n = float(parts[0]), float(parts[1]), int(parts[2])
            if n < 1:
                raise DomainError(f"grid count must be positive, got {n}")
            return [float(v) for v in fn(a, b, n)]
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise DomainError(f"cannot parse grid {text!r}") from exc
    if not values:
        raise DomainError("grid is empty")
    return values


def parse_int_grid(text: str) -> list[int]:
    """``"3,5,7"`` or ``"range:start:stop[:step]"`` with ``stop`` included."""
    text = str(text).strip()
    if text.startswith("range:"):
        parts = [int(v) for v in text.split(":")[1:]]
        if len(parts) not in (2, 3):
            raise DomainError(f"expected range:start:stop[:step], got {text!r}")
        step = parts[2] if len(parts) == 3 else 1
        values = list(range(parts[0], parts[1] + 1, step))
    else:
        try:
            values = [int(v) for v in text.split(",") if v.strip()]
        except ValueError as exc:
            raise DomainError(f"cannot parse integer grid {text!r}") from exc
    if not values:
        raise DomainError("M grid is empty")
    return values


def _parse_mutations(items) -> dict[str, float]:
    out = {}
    for item in items or []:
        for piece in str(item).split(","):
            name, sep, factor = piece.partition("=")
            if not sep:
                raise DomainError(f"--mutate expects NAME=FACTOR, got {piece!r}")
            try:
                out[name.strip()] = float(factor)
            except ValueError as exc:
                raise DomainError(f"bad mutation factor in {piece!r}") from exc
    return out


def read_config(path: str) -> dict:
    """Flat ``key = value`` map; keys normalized to option destinations."""
    text = Path(path).read_text()
    if not text.lstrip().startswith("["):
        text = "[kerrchain]\n" + text
    parser = configparser.ConfigParser()
    parser.read_string(text)
    out = {}
    for section in parser.sections():
        for key, value in parser.items(section):
            out[key.lstrip("-").replace("-", "_")] = value
    return out


def _coerce(key: str, value):
    if value is None or not isinstance(value, str):
        return value
    if key in ("omega", "eta", "chi", "nloc_max"):
        return float(value)
    if key in ("budget", "jobs"):
        return int(float(value))
    if key in ("json", "gaussian_only"):
        return value.strip().lower() in ("1", "true", "yes", "on")
    if key == "mutate":
        return [value]
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("shared options")
    g.add_argument("--omega", type=float, help="resonator frequency (default 1.0)")
    g.add_argument("--eta", type=float, help="adiabaticity factor in (0, 1] (default 1.0)")
    g.add_argument("--chi", type=float, help="Kerr strength (default 0; table: 1e-4)")
    g.add_argument("--modes", help="number of resonators M, or a grid: 3,5,7 or range:1:31:2")
    g.add_argument("--nloc-max", dest="nloc_max", type=float, help="photons per site constraint (default 100)")
    g.add_argument("--x", help="grid of distances to criticality: comma list or logspace:a:b:n")
    g.add_argument("--epsilon", help="grid of couplings: comma list, linspace:a:b:n or logspace:a:b:n")
    g.add_argument("--nloc", help="grid of photons per site (fig3 and sweep)")
    g.add_argument("--out", help="write output to FILE instead of stdout")
    g.add_argument("--json", action="store_true", default=None,
                   help="emit JSON; with --out also writes FILE.json next to the CSV")
    g.add_argument("--budget", type=int, help="max Fock basis size (default: CHAIN_BUDGET or 2e7)")
    g.add_argument("--jobs", type=int, help="concurrent evaluations (default: number of cores)")
    g.add_argument("--config", help="INI-style file of key = value defaults")

    parser = argparse.ArgumentParser(
        prog="kerrchain",
        description="Critical sensing with Kerr resonator chains: figure data, tables and validation.",
        epilog="Exit codes: 0 ok, 1 validation failure, 2 invalid input, 3 budget exceeded.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("fig1", parents=[common], help="single sensor QFI, photons, gap and time vs epsilon")
    sub.add_parser("fig2", parents=[common], help="photon share per momentum (defaults M=31 and M=30)")
    sub.add_parser("fig3", parents=[common], help="constrained I/T^2 with asymptotic overlays")
    sub.add_parser("fig4", parents=[common], help="coupled chain vs independent sensors, with slopes")
    sub.add_parser("table", parents=[common], help="summary table of QFI scalings (defaults chi=1e-4, M=27)")
    val = sub.add_parser("validate", parents=[common], help="run the cross-check suite")
    val.add_argument("--mutate", action="append", metavar="NAME=FACTOR",
                     help="scale the reference values of a check group; groups: " + ", ".join(ex.MUTATION_KEYS))
    val.add_argument("--gaussian-only", dest="gaussian_only", action="store_true", default=None,
                     help="skip oracle and Kerr checks")
    sw = sub.add_parser("sweep", parents=[common], help="generic sweep of one quantity")
    sw.add_argument("--quantity", choices=ex.QUANTITIES, help="quantity to sweep (default qfi)")
    sw.add_argument("--compare", help="comma list from " + ",".join(ex.COMPARISONS) + " (default coupled)")
    return parser


def resolve(args: argparse.Namespace) -> dict:
    """Merge flags, config file and defaults."""
    settings = dict(DEFAULTS)
    settings.update(COMMAND_DEFAULTS.get(args.command, {}))
    if getattr(args, "config", None):
        for key, value in read_config(args.config).items():
            if key in settings:
                settings[key] = _coerce(key, value)
    for key, value in vars(args).items():
        if key in settings and value is not None:
            settings[key] = value
    settings["command"] = args.command
    if settings["budget"] is None:
        settings["budget"] = budget_from_env()
    return settings


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _emit_result(result: ex.SweepResult, s: dict) -> None:
    if s["json"] and not s["out"]:
        _emit(result.to_json(), None)
        return
    _emit(result.to_csv(), s["out"])
    if s["json"]:
        Path(s["out"]).with_suffix(".json").write_text(result.to_json())


def _single_m(s: dict, default: int) -> int:
    if s["modes"] is None:
        return default
    ms = parse_int_grid(s["modes"])
    if len(ms) != 1:
        raise DomainError("this command takes a single M")
    return ms[0]


def run(s: dict) -> int:
    cmd = s["command"]
    omega, eta, jobs = s["omega"], s["eta"], max(1, int(s["jobs"]))
    if cmd == "fig1":
        grid = parse_float_grid(s["epsilon"]) if s["epsilon"] else None
        _emit_result(ex.cmd_fig1(omega, eta, grid), s)
    elif cmd == "fig2":
        ms = parse_int_grid(s["modes"]) if s["modes"] else None
        xs = parse_float_grid(s["x"]) if s["x"] else None
        _emit_result(ex.cmd_fig2(omega, ms, xs), s)
    elif cmd == "fig3":
        if s["nloc"]:
            res = ex.cmd_fig3(omega, eta, n_loc_grid=parse_float_grid(s["nloc"]),
                              m_modes=_single_m(s, 101), jobs=jobs)
        else:
            ms = parse_int_grid(s["modes"]) if s["modes"] else None
            res = ex.cmd_fig3(omega, eta, m_grid=ms, n_loc_max=s["nloc_max"], jobs=jobs)
        _emit_result(res, s)
    elif cmd == "fig4":
        ms = parse_int_grid(s["modes"]) if s["modes"] else None
        _emit_result(ex.cmd_fig4(omega, eta, ms, s["nloc_max"], jobs=jobs), s)
    elif cmd == "table":
        res = ex.cmd_table(omega, s["chi"], _single_m(s, 27), eta)
        if s["out"] or s["json"]:
            _emit_result(res, s)
        else:
            _emit(ex.render_table(res), None)
    elif cmd == "validate":
        report = ex.cmd_validate(s["budget"], _parse_mutations(s["mutate"]), bool(s["gaussian_only"]), jobs)
        if s["json"]:
            payload = {
                "passed": report.passed,
                "checks": [
                    {"status": c.status, "group": c.group, "label": c.label,
                     "measured": c.measured, "tolerance": c.tolerance}
                    for c in report.checks
                ],
            }
            _emit(json.dumps(payload, indent=2) + "\n", s["out"])
        else:
            _emit(report.text(), s["out"])
        return EXIT_OK if report.passed else EXIT_FAIL
    elif cmd == "sweep":
        template = SystemParams(omega, 0.0, chi=s["chi"], m_modes=1, eta=eta)
        grids = {}
        if s["epsilon"]:
            grids["epsilon_grid"] = tuple(parse_float_grid(s["epsilon"]))
        if s["x"]:
            grids["x_grid"] = tuple(parse_float_grid(s["x"]))
        if s["nloc"]:
            grids["n_loc_grid"] = tuple(parse_float_grid(s["nloc"]))
        ms = parse_int_grid(s["modes"]) if s["modes"] else [1]
        if grids:
            if len(ms) != 1:
                raise DomainError("an epsilon, x or N_loc grid needs a single M")
            template = template.replace(m_modes=ms[0])
        else:
            grids["m_grid"] = tuple(ms)
        spec = ex.SweepSpec(
            quantity=s["quantity"], params=template,
            n_loc_max=s["nloc_max"] if "m_grid" in grids else None,
            comparisons=tuple(c.strip() for c in s["compare"].split(",") if c.strip()),
            **grids,
        )
        _emit_result(ex.run_sweep(spec, jobs), s)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return run(resolve(args))
    except CapacityError as exc:
        print(f"kerrchain: capacity: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (DomainError, configparser.Error, OSError) as exc:
        print(f"kerrchain: invalid input: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (ConvergenceError, GaugeError) as exc:
        print(f"kerrchain: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
