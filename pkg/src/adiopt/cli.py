"""Command-line interface.

Subcommands: ``sweep``, ``scan-local-field``, ``populations``,
``mean-fidelity``.  Options may come from a declarative config file
(INI sections ``[scenario]``, ``[grid]``, ``[krotov]``); command-line
flags override file values.

Exit codes: 0 success, 2 config error, 3 numerical invariant violation,
4 at least one optimization stopped before reaching stationarity
(results are still written).
"""
from __future__ import annotations

import argparse
import configparser
import sys
from pathlib import Path

from .errors import (AdioptError, ConfigError, InvariantViolationError,
                     NotPositiveError)
from .scenarios import (DEFAULT_GAMMAS, NOISE_KINDS, PROTOCOLS,
                        ScenarioConfig, run_local_field_scan,
                        run_mean_fidelity, run_populations, run_sweep)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_NOT_CONVERGED = 4

CONFIG_KEYS = """\
Config file keys (INI format; any key may be omitted):
  [scenario] protocol = aep|atp2|atp3     [grid]   horizon = <float>
             noise = dephasing|amplitude_damping   n_steps = <int>
             gamma = <comma list>         [krotov] lambda = <float>
             local_field = e.g. z3                 shape = sin2|flat
             seed = <int>                          max_iters = <int>
             samples = <int>                       objective_tol = <float>
             out = <dir>                           amplitude_bound = <float>
             unitary_only = true|false             local_field_seed = <float>
             jobs = <int>
"""


def _parse_gamma_list(text: str) -> tuple[float, ...]:
    try:
        values = tuple(float(tok) for tok in text.replace(",", " ").split())
    except ValueError as exc:
        raise ConfigError(f"cannot parse gamma list {text!r}") from exc
    if not values:
        raise ConfigError("empty gamma list")
    return values


def _parse_local_field(text: str) -> tuple[str, int]:
    text = text.strip().lower()
    if len(text) != 2 or text[0] not in "xyz" or text[1] not in "123":
        raise ConfigError(f"local field must look like 'z3', got {text!r}")
    return text[0], int(text[1])


def _load_config_file(path: Path) -> dict:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"malformed config file {path}: {exc}") from exc

    out: dict = {}
    try:
        if parser.has_section("scenario"):
            s = parser["scenario"]
            if "protocol" in s:
                out["protocol"] = s["protocol"].strip()
            if "noise" in s:
                out["noise"] = s["noise"].strip()
            if "gamma" in s:
                out["gamma_values"] = _parse_gamma_list(s["gamma"])
            if "local_field" in s:
                out["local_field"] = _parse_local_field(s["local_field"])
            if "seed" in s:
                out["seed"] = s.getint("seed")
            if "samples" in s:
                out["n_samples"] = s.getint("samples")
            if "out" in s:
                out["output_dir"] = Path(s["out"])
            if "unitary_only" in s:
                out["unitary_only"] = s.getboolean("unitary_only")
            if "jobs" in s:
                out["jobs"] = s.getint("jobs")
        if parser.has_section("grid"):
            g = parser["grid"]
            if "horizon" in g:
                out["horizon"] = g.getfloat("horizon")
            if "n_steps" in g:
                out["n_steps"] = g.getint("n_steps")
        if parser.has_section("krotov"):
            k = parser["krotov"]
            if "lambda" in k:
                out["lam"] = k.getfloat("lambda")
            if "shape" in k:
                out["shape"] = k["shape"].strip()
            if "max_iters" in k:
                out["max_iters"] = k.getint("max_iters")
            if "objective_tol" in k:
                out["objective_tol"] = k.getfloat("objective_tol")
            if "amplitude_bound" in k and k["amplitude_bound"].strip():
                out["amplitude_bound"] = k.getfloat("amplitude_bound")
            if "local_field_seed" in k:
                out["local_field_seed"] = k.getfloat("local_field_seed")
    except ValueError as exc:
        raise ConfigError(f"bad value in config file {path}: {exc}") from exc
    return out


def _add_common_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", type=Path, help="declarative scenario file (INI)")
    sub.add_argument("--protocol", choices=PROTOCOLS)
    sub.add_argument("--noise", choices=NOISE_KINDS)
    sub.add_argument("--gamma", help="comma-separated decay rates")
    sub.add_argument("--local-field", help="local-field choice for atp3, e.g. z3")
    sub.add_argument("--seed", type=int)
    sub.add_argument("--samples", type=int, help="Monte-Carlo sample count")
    sub.add_argument("--out", type=Path, help="output directory")
    sub.add_argument("--jobs", type=int, help="parallel worker processes")
    sub.add_argument("--unitary-only", action="store_true", default=None,
                     help="skip the noise-aware optimization")
    sub.add_argument("--flat-shape", action="store_true", default=None,
                     help="use the flat update shape S(t) = 1")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="adiopt",
        description="Simulate and optimize adiabatic protocols under Markovian noise.",
        epilog=CONFIG_KEYS,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    subs = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("sweep", "fidelity vs decay rate, unitary vs noise-aware optimization"),
        ("scan-local-field", "fidelity for all 9 local-field choices (atp3)"),
        ("populations", "basis-state populations and control fields over time"),
        ("mean-fidelity", "Haar-averaged teleportation fidelity per decay rate"),
    ):
        sub = subs.add_parser(name, help=help_text,
                              epilog=CONFIG_KEYS,
                              formatter_class=argparse.RawDescriptionHelpFormatter)
        _add_common_flags(sub)
    return parser


def _build_config(args: argparse.Namespace) -> ScenarioConfig:
    values: dict = {}
    if args.config is not None:
        values.update(_load_config_file(args.config))
    if args.protocol is not None:
        values["protocol"] = args.protocol
    if args.noise is not None:
        values["noise"] = args.noise
    if args.gamma is not None:
        values["gamma_values"] = _parse_gamma_list(args.gamma)
    if args.local_field is not None:
        values["local_field"] = _parse_local_field(args.local_field)
    if args.seed is not None:
        values["seed"] = args.seed
    if args.samples is not None:
        values["n_samples"] = args.samples
    if args.out is not None:
        values["output_dir"] = args.out
    if args.jobs is not None:
        values["jobs"] = args.jobs
    if args.unitary_only:
        values["unitary_only"] = True
    if args.flat_shape:
        values["shape"] = "flat"
    try:
        return ScenarioConfig(**values)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def _gamma_explicit(args: argparse.Namespace) -> bool:
    if args.gamma is not None:
        return True
    if args.config is not None:
        return "gamma_values" in _load_config_file(args.config)
    return False


def _run(args: argparse.Namespace) -> int:
    config = _build_config(args)
    all_converged = True
    if args.command == "sweep":
        records, path = run_sweep(config)
        all_converged = all(r.converged for r in records)
        print(f"wrote {path} ({len(records)} rows)")
    elif args.command == "scan-local-field":
        gammas = config.gamma_values if _gamma_explicit(args) else (0.1,)
        for gamma in gammas:
            records, path = run_local_field_scan(config, gamma)
            all_converged &= all(r.converged for r in records)
            best = records[0]
            print(f"wrote {path} (best: {best.direction}{best.qubit} "
                  f"fidelity {best.fidelity:.6f})")
    elif args.command == "populations":
        gammas = config.gamma_values if _gamma_explicit(args) else (0.0, 0.1)
        for gamma in gammas:
            run = run_populations(config, gamma)
            all_converged &= run.converged
            print(f"wrote {run.csv_path} and {run.controls_path}")
    elif args.command == "mean-fidelity":
        records, path = run_mean_fidelity(config)
        all_converged = all(r.converged for r in records)
        print(f"wrote {path} ({len(records)} rows)")
    else:  # pragma: no cover - argparse enforces the choices
        raise ConfigError(f"unknown command {args.command!r}")
    return EXIT_OK if all_converged else EXIT_NOT_CONVERGED


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _run(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (InvariantViolationError, NotPositiveError) as exc:
        print(f"numerical invariant violated: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except AdioptError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
