"""Command-line front end.

Subcommands: r0, equilibria, stability, simulate, sweep, family,
certificate, probe, verify. Outputs are one-line key=value records or CSV
files with 17-significant-digit decimals, so values round-trip exactly and
identical config + seed gives byte-identical artifacts.

Exit codes: 0 success, 2 configuration/usage error, 3 runtime or
integration error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from . import __version__
from .config import RunConfig, load_config
from .errors import ConfigError, SairsError
from .experiments import persistence_floor, probe_conjecture, run_family, run_sweep
from .integrator import integrate
from .model import endemic_equilibrium, equilibrium_report, rhs_reduced
from .stability import dfe_spectrum, ee_spectrum, geometric_certificate
from .verify import run_all_checks

__all__ = ["main"]


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".17g")


def _record(pairs) -> str:
    return " ".join(f"{key}={val if isinstance(val, str) else _fmt(val)}" for key, val in pairs)


def _write_csv(path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(cell if isinstance(cell, str) else _fmt(cell) for cell in row))
            fh.write("\n")


def _load(args) -> RunConfig:
    if args.config is None:
        raise ConfigError("this command requires --config <path>")
    return load_config(args.config)


def _cmd_r0(args) -> int:
    cfg = _load(args)
    report = equilibrium_report(cfg.require_params(), cfg.boundary_tol)
    pairs = [("r0", report.r0), ("regime", report.regime.value)]
    pairs += sorted(report.h.as_dict().items())
    print(_record(pairs))
    return 0


def _cmd_equilibria(args) -> int:
    cfg = _load(args)
    params = cfg.require_params()
    report = equilibrium_report(params, cfg.boundary_tol)
    dfe_residual = float(np.max(np.abs(rhs_reduced(params, report.dfe))))
    pairs = [
        ("r0", report.r0),
        ("regime", report.regime.value),
        ("dfe_s", report.dfe.s),
        ("dfe_a", report.dfe.a),
        ("dfe_i", report.dfe.i),
        ("dfe_residual", dfe_residual),
    ]
    if report.endemic is None:
        pairs.append(("endemic", "none"))
    else:
        ee = report.endemic
        ee_residual = float(np.max(np.abs(rhs_reduced(params, ee))))
        pairs += [
            ("ee_s", ee.s),
            ("ee_a", ee.a),
            ("ee_i", ee.i),
            ("ee_residual", ee_residual),
        ]
    print(_record(pairs))
    return 0


def _cmd_stability(args) -> int:
    cfg = _load(args)
    params = cfg.require_params()
    report = equilibrium_report(params, cfg.boundary_tol)
    spectrum = dfe_spectrum(params)
    pairs = [
        ("r0", report.r0),
        ("dfe_max_real", spectrum.max_real_part),
        ("dfe_stable", spectrum.stable),
    ]
    if report.endemic is not None:
        ee_spec = ee_spectrum(params)
        pairs += [("ee_max_real", ee_spec.max_real_part), ("ee_stable", ee_spec.stable)]
    else:
        pairs.append(("endemic", "none"))
    print(_record(pairs))
    return 0


def _cmd_simulate(args) -> int:
    cfg = _load(args)
    if args.out is None:
        raise ConfigError("simulate requires --out <csv path>")
    trajectory = integrate(cfg.require_params(), cfg.initial, cfg.integration)
    rows = (
        (t, s[0], s[1], s[2], s[3]) for t, s in zip(trajectory.times, trajectory.states)
    )
    _write_csv(args.out, ("t", "S", "A", "I", "R"), rows)
    print(
        _record(
            [
                ("out", str(args.out)),
                ("rows", len(trajectory.times)),
                ("converged", trajectory.converged),
            ]
        )
    )
    return 0


def _cmd_sweep(args) -> int:
    cfg = _load(args)
    if cfg.sweep is None:
        raise ConfigError("sweep requires the sweep.axis1/axis2 blocks in the config")
    if args.out is None:
        raise ConfigError("sweep requires --out <csv path>")
    result = run_sweep(cfg.sweep, boundary_tol=cfg.boundary_tol, check=cfg.sweep_check)
    header = (
        cfg.sweep.axis1.param,
        cfg.sweep.axis2.param,
        "r0",
        "regime",
        "S_inf",
        "A_inf",
        "I_inf",
        "R_inf",
    )
    rows = (
        (
            row[cfg.sweep.axis1.param],
            row[cfg.sweep.axis2.param],
            row["r0"],
            row["regime"].value,
            row["S_inf"],
            row["A_inf"],
            row["I_inf"],
            row["R_inf"],
        )
        for row in result.iter_rows()
    )
    _write_csv(args.out, header, rows)
    n_cells = len(result.values1) * len(result.values2)
    flagged = int((~result.converged).sum())
    print(_record([("out", str(args.out)), ("cells", n_cells), ("flagged", flagged)]))
    return 0


def _cmd_family(args) -> int:
    cfg = _load(args)
    if cfg.family is None:
        raise ConfigError("family requires family.param and family.values in the config")
    if args.out is None:
        raise ConfigError("family requires --out <directory>")
    vary, values = cfg.family
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    result = run_family(cfg.require_params(), vary, values, cfg.integration, cfg.initial)
    written = []
    for member in result.members:
        path = out_dir / f"{vary}_{member.value:g}.csv"
        rows = (
            (t, s[0], s[1], s[2], s[3])
            for t, s in zip(member.trajectory.times, member.trajectory.states)
        )
        _write_csv(path, ("t", "S", "A", "I", "R"), rows)
        written.append(str(path))
    print(_record([("files", ",".join(written))]))
    return 0


def _cmd_certificate(args) -> int:
    cfg = _load(args)
    params = cfg.require_params()
    pairs = []
    epsilon = cfg.certificate_epsilon
    if epsilon is None:
        trajectory = integrate(params, cfg.initial, cfg.integration)
        epsilon = persistence_floor(
            trajectory, cfg.certificate_tail_fraction, cfg.certificate_safety
        )
        ee = endemic_equilibrium(params)
        if ee is not None:
            target = np.array([ee.s, ee.a, ee.i, 1.0 - ee.s - ee.a - ee.i])
            pairs.append(("reference_converged", trajectory.converged))
            pairs.append(("reference_gap", float(np.max(np.abs(trajectory.states[-1] - target)))))
    certificate = geometric_certificate(params, epsilon, cfg.certificate_c)
    pairs = [
        ("applicable", certificate.applicable),
        ("epsilon", certificate.epsilon),
        ("c", "none" if certificate.c is None else _fmt(certificate.c)),
    ] + pairs
    if certificate.h_bars is not None:
        pairs += [(f"hbar{k+1}", value) for k, value in enumerate(certificate.h_bars)]
    pairs.append(("certified", certificate.certified))
    print(_record(pairs))
    return 0


def _cmd_probe(args) -> int:
    cfg_integration = None
    if args.config is not None:
        cfg_integration = load_config(args.config).integration
    if args.samples < 1:
        raise ConfigError("--samples must be >= 1")
    report = probe_conjecture(args.samples, args.seed, cfg_integration)
    print(
        _record(
            [
                ("n", report.n_samples),
                ("seed", report.seed),
                ("fraction", report.fraction_converged),
            ]
        )
    )
    return 0


def _cmd_verify(args) -> int:
    if args.samples < 1:
        raise ConfigError("--samples must be >= 1")
    results = run_all_checks(args.seed, args.samples)
    failures = 0
    for result in results:
        status = "PASS" if result.passed else "FAIL"
        failures += not result.passed
        print(f"{status} {result.name}: {result.detail}")
    print(f"{len(results) - failures}/{len(results)} checks passed "
          f"(seed={args.seed}, samples={args.samples})")
    return 0 if failures == 0 else 1


_COMMANDS = {
    "r0": _cmd_r0,
    "equilibria": _cmd_equilibria,
    "stability": _cmd_stability,
    "simulate": _cmd_simulate,
    "sweep": _cmd_sweep,
    "family": _cmd_family,
    "certificate": _cmd_certificate,
    "probe": _cmd_probe,
    "verify": _cmd_verify,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sairs-lab",
        description="Reproduction numbers, equilibria, stability certificates, "
        "and reproducible studies of SAIRS epidemic dynamics.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("r0", "print the reproduction number, regime, and rate aggregates"),
        ("equilibria", "print the equilibria and their residuals"),
        ("stability", "print Jacobian spectra at the equilibria"),
        ("simulate", "integrate one trajectory and write a CSV"),
        ("sweep", "evaluate a two-parameter grid and write a CSV"),
        ("family", "integrate a one-parameter trajectory family into CSVs"),
        ("certificate", "evaluate the geometric stability certificate"),
        ("probe", "randomized endemic-convergence probe"),
        ("verify", "run the seeded property suite"),
    ):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--config", type=str, default=None, help="path to a key=value config")
        cmd.add_argument("--out", type=str, default=None, help="output path (CSV or directory)")
        cmd.add_argument("--seed", type=int, default=0, help="seed for randomized commands")
        cmd.add_argument("--samples", type=int, default=100, help="sample count for randomized commands")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except SairsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
