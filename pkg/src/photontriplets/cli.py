"""Command-line entry point.

Exit codes: 0 success, 1 configuration/usage error, 2 numerical error,
3 I/O error.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict
from pathlib import Path

from . import selfcheck
from .coincidence import check_single_triplet_criterion, simulate_pulses
from .config import load_config
from .errors import ConfigError, NumericalError, OutputError, TripletError
from .model import gain_parameter_beta, integrated_flux, triplet_flux_full
from .optics import UJ
from .pipeline import _atomic_write, absolute_curve, fit_scale_factor, fit_tf_to_data, report, run_set

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 1, 2, 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.format_usage()}{self.prog}: error: {message}\n")


def _gamma(text):
    if text == "overlap":
        return text
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number or 'overlap', got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="JSON config merged over the built-in defaults")
    common.add_argument("--tf", type=float, help="detection transfer function T_F in (0, 1]")
    common.add_argument("--gamma", type=_gamma,
                        help="overlap factor override, or 'overlap' to compute it from the waists")
    common.add_argument("--out", help="output directory")

    p = _Parser(prog="photontriplets", description="Photon-triplet flux model and coincidence analysis.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser, required=True)

    m = sub.add_parser("model", parents=[common], help="evaluate the triplet flux for given energies")
    m.add_argument("--xi-p", type=float, help="pump energy in uJ")
    m.add_argument("--xi-sti", type=float, help="stimulation energy in uJ")

    sub.add_parser("report", parents=[common], help="compare the model with the coincidence dataset")

    s = sub.add_parser("simulate", parents=[common], help="Monte Carlo run of the coincidence protocol")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--pulses", type=int, default=1_000_000)
    s.add_argument("--n-mean", type=float, help="mean triplets per pulse (config simulate.n_mean by default)")
    s.add_argument("--workers", type=int, default=1)

    sub.add_parser("fit-tf", parents=[common], help="fit T_F to the dataset")
    sub.add_parser("check", parents=[common], help="run the closed-form / integrator self-consistency suite")
    return p


def _load(args):
    overrides = {}
    if args.gamma is not None:
        overrides.setdefault("model", {})["gamma_override"] = None if args.gamma == "overlap" else args.gamma
    if args.tf is not None:
        overrides.setdefault("detection", {})["transfer_function"] = args.tf
    if args.out is not None:
        overrides["output_dir"] = args.out
    return load_config(args.config, overrides)


def _cmd_model(args, cfg, out):
    xi_p = cfg.pump_energy if args.xi_p is None else args.xi_p * UJ
    xi_sti = cfg.stimulation_energy if args.xi_sti is None else args.xi_sti * UJ
    ic = cfg.interaction(xi_p, xi_sti)
    res = integrated_flux(ic) if ic.delta_k else triplet_flux_full(ic)
    dEs, dEi = ic.vacuum_seeds()
    crit = check_single_triplet_criterion(res.triplets_per_pulse)
    lines = [
        ("pump energy [uJ]", xi_p / UJ),
        ("stimulation energy [uJ]", xi_sti / UJ),
        ("overlap factor gamma", ic.gamma),
        ("pump field [V/m]", ic.pump_field),
        ("stimulation field [V/m]", ic.stimulation_field),
        ("vacuum amplitude signal [V/m]", dEs),
        ("vacuum amplitude idler [V/m]", dEi),
        ("beta [1/m]", gain_parameter_beta(ic)),
        ("beta*L", res.beta_L),
        ("instantaneous rate [1/s]", res.instantaneous_rate),
        ("triplets per pulse", res.triplets_per_pulse),
        ("triplets per second", res.triplets_per_second),
    ]
    for name, v in lines:
        print(f"{name:32s} {v:.6g}", file=out)
    print(f"{'N < 1 per pulse':32s} {'yes' if crit.passed else 'no'} (margin {crit.margin:.3g})", file=out)
    return EXIT_OK


def _cmd_report(args, cfg, out):
    paths = report(cfg)
    tf = cfg.transfer_function if cfg.transfer_function != "fit" else fit_tf_to_data(cfg).value
    for label in ("A", "B"):
        print(f"set {label} (T_F = {tf:g})", file=out)
        print(f"  {'xi_p':>6} {'xi_sti':>6} {'eta_hat':>10} {'N_meas':>8} {'N_model':>8} "
              f"{'norm_meas':>9} {'norm_model':>10}", file=out)
        for r in run_set(label, cfg, transfer_function=tf):
            print(f"  {r.xi_p_uJ:6.2f} {r.xi_sti_uJ:6.2f} {r.eta_hat:10.4g} {r.n_measured:8.4f} "
                  f"{r.n_model:8.4f} {r.norm_measured:9.3f} {r.norm_model:10.3f}", file=out)
    pts = absolute_curve(cfg, transfer_function=tf)
    print(f"global scale factor measured/model: {fit_scale_factor(pts):.4g}", file=out)
    for key in sorted(paths):
        print(f"wrote {paths[key]}", file=out)
    return EXIT_OK


def _cmd_simulate(args, cfg, out):
    if args.pulses < 1:
        raise ConfigError("--pulses must be >= 1")
    n_mean = cfg.n_mean if args.n_mean is None else args.n_mean
    setup = cfg.detection()
    res = simulate_pulses(n_mean, setup, args.pulses, args.seed, workers=max(1, args.workers))
    doc = {"n_mean": n_mean, "transfer_function": setup.transfer_function,
           "statistics": setup.photon_number_statistics.value,
           "arm_pairing": setup.arm_pairing.value, **asdict(res)}
    doc["eta_ci"] = list(res.eta_ci)
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    out.write(text)
    if args.out is not None:
        _atomic_write(Path(args.out) / f"simulate_seed{args.seed}.json", text)
    return EXIT_OK


def _cmd_fit_tf(args, cfg, out):
    fit = fit_tf_to_data(cfg)
    print(f"T_F = {fit.value:.6g}  (1-sigma interval {fit.low:.6g} .. {fit.high:.6g})", file=out)
    print(f"chi2 = {fit.chi2:.6g}  at_bound = {fit.at_bound}", file=out)
    return EXIT_OK


def _cmd_check(args, cfg, out):
    results = selfcheck.run_all(cfg.interaction())
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'}  {r.name}: error {r.error:.3g} (tol {r.tolerance:g})", file=out)
    return EXIT_OK if all(r.passed for r in results) else EXIT_NUMERIC


COMMANDS = {
    "model": _cmd_model,
    "report": _cmd_report,
    "simulate": _cmd_simulate,
    "fit-tf": _cmd_fit_tf,
    "check": _cmd_check,
}


def cli_main(argv=None, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    try:
        args = build_parser().parse_args(argv)
    except _UsageError as exc:
        err.write(str(exc))
        return EXIT_CONFIG
    except SystemExit as exc:  # --help
        return EXIT_OK if not exc.code else EXIT_CONFIG
    try:
        cfg = _load(args)
        return COMMANDS[args.command](args, cfg, out)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=err)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=err)
        return EXIT_NUMERIC
    except (OutputError, OSError) as exc:
        print(f"I/O error: {exc}", file=err)
        return EXIT_IO
    except TripletError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_CONFIG


def main():
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
