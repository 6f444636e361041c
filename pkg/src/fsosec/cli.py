"""Command-line interface.

Subcommands::

    fsosec assess {1,2,3} {orbital,aerial}   run one of the three assessments
    fsosec sweep                             run a single parameter sweep
    fsosec scenario {orbital,aerial}         show a scenario and its secrecy result
    fsosec registry {validate,query,coverage}
    fsosec export {1,2,3} {orbital,aerial} --outdir DIR
                                             one plot-ready CSV per series

Exit status: 0 ok, 2 configuration/usage error, 3 domain error (the message
names the offending grid point), 4 registry validation failure.

Output goes to stdout unless ``--output`` is given; files are written
through a temporary file and renamed only once the whole result exists.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Any, Sequence

import yaml

from . import __version__
from .config import CONFIG_DIR_ENV, default_config, load_config, scenario_document
from .errors import ConfigError, DomainError, RegistryError, RegistryParseError, UnknownIdError
from .export import plot_series, report_csv, report_dict, sweep_csv, sweep_dict, to_json, write_atomic
from .registry import (
    Finding,
    ValidationReport,
    bundled_registry_text,
    coverage_report,
    coverage_text,
    load_registry,
    protections_for,
    threats_for_element,
    validate_traceability,
)
from .sweeps import SWEEP_VARIABLES, SweepSpec, assessment_report, run_sweep

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DOMAIN = 3
EXIT_VALIDATION = 4

SCENARIO_KINDS = ("orbital", "aerial")


class _ValidationFailed(Exception):
    def __init__(self, text: str):
        super().__init__("registry validation failed")
        self.text = text


# -- helpers -----------------------------------------------------------------


def _parse_set(items: Sequence[str] | None) -> dict[str, Any]:
    overrides: dict[str, Any] = {}
    for item in items or ():
        key, sep, raw = item.partition("=")
        if not sep or not key.strip():
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        try:
            overrides[key.strip()] = yaml.safe_load(raw)
        except yaml.YAMLError:
            raise ConfigError(f"--set {key}: cannot parse value {raw!r}") from None
    return overrides


def _parse_range(text: str) -> tuple[float, float, float]:
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError(f"--range expects START:STOP:STEP, got {text!r}")
    try:
        start, stop, step = (float(p) for p in parts)
    except ValueError:
        raise ConfigError(f"--range values must be numbers, got {text!r}") from None
    return start, stop, step


def _config(args: argparse.Namespace, kind: str | None):
    if args.config:
        return load_config(args.config, kind)
    if kind is None:
        raise ConfigError("give a scenario or --config")
    return default_config(kind)


def _emit(text: str, output: str | None) -> None:
    if output:
        write_atomic(output, text)
    else:
        sys.stdout.write(text)


def _registry_text(path: str | None) -> tuple[str, str]:
    if path:
        try:
            return Path(path).read_text(encoding="utf-8"), path
        except OSError as exc:
            raise ConfigError(f"cannot read registry {path}: {exc.strerror or exc}") from None
    directory = os.environ.get(CONFIG_DIR_ENV)
    if directory and (Path(directory) / "registry.yaml").is_file():
        candidate = Path(directory) / "registry.yaml"
        return candidate.read_text(encoding="utf-8"), str(candidate)
    return bundled_registry_text(), "<bundled registry.yaml>"


# -- subcommands -------------------------------------------------------------


def cmd_assess(args: argparse.Namespace) -> int:
    cfg = _config(args, args.scenario)
    report = assessment_report(args.which, cfg.scenario, cfg.assessments, _parse_set(args.set), workers=args.workers)
    text = to_json(report_dict(report)) if args.format == "json" else report_csv(report)
    _emit(text, args.output)
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    cfg = _config(args, args.scenario)
    base = cfg.sweep
    variable = args.variable or (base.variable if base else None)
    if variable is None:
        raise ConfigError("no sweep variable: pass --variable or add a sweep section to the config")
    if args.range:
        start, stop, step = _parse_range(args.range)
    elif base is not None and base.variable == variable:
        start, stop, step = base.start, base.stop, base.step
    else:
        raise ConfigError("no sweep range: pass --range START:STOP:STEP")
    scenario = base.scenario if base is not None else cfg.scenario
    if args.eve_offset is not None:
        offset = args.eve_offset
    elif base is not None and base.variable == variable:
        offset = base.eve_offset_m
    else:
        offset = None
    spec = SweepSpec(variable, start, stop, step, scenario.with_overrides(_parse_set(args.set)), offset)
    rows = run_sweep(spec, workers=args.workers)
    text = to_json(sweep_dict(spec, rows)) if args.format == "json" else sweep_csv(rows)
    _emit(text, args.output)
    return EXIT_OK


def cmd_scenario(args: argparse.Namespace) -> int:
    cfg = _config(args, args.scenario)
    scenario = cfg.scenario.with_overrides(_parse_set(args.set))
    result = scenario.evaluate()
    doc = {
        "config": scenario_document(scenario),
        "derived": {"main_distance_m": scenario.main_distance_m, "eve_distance_m": scenario.eve_distance_m},
        "result": {
            "snr_main": result.snr_main,
            "snr_eve": result.snr_eve,
            "cap_main": result.cap_main_bps_hz,
            "cap_eve": result.cap_eve_bps_hz,
            "secrecy": result.secrecy_bps_hz,
        },
    }
    text = to_json(doc) if args.format == "json" else yaml.safe_dump(doc, sort_keys=False)
    _emit(text, args.output)
    return EXIT_OK


def cmd_registry(args: argparse.Namespace) -> int:
    text, source = _registry_text(args.file)
    if args.action == "validate":
        try:
            registry = load_registry(text, strict=False)
            report = validate_traceability(registry)
        except RegistryParseError as exc:
            report = ValidationReport((Finding("error", "parse-error", source, str(exc)),))
        out = to_json(report.as_dict()) if args.format == "json" else report.to_text()
        if not report.passed:
            raise _ValidationFailed(out)
        _emit(out, args.output)
        return EXIT_OK

    try:
        registry = load_registry(text)
    except RegistryError as exc:
        raise _ValidationFailed(f"{source}: {exc}\n") from None

    if args.action == "coverage":
        report = coverage_report(registry)
        _emit(to_json(report) if args.format == "json" else coverage_text(report), args.output)
        return EXIT_OK

    # query
    if bool(args.threat) == bool(args.element):
        raise ConfigError("registry query needs exactly one of --threat or --element")
    try:
        if args.threat:
            items = protections_for(registry, args.threat)
            doc: Any = [{"id": p.id, "name": p.name, "kind": p.kind} for p in items]
            lines = [f"{p.id}\t{p.name}" for p in items]
        else:
            threats = threats_for_element(registry, args.element)
            doc = [{"id": t.id, "domain": t.domain, "name": t.name, "passive": t.passive} for t in threats]
            lines = [f"{t.id}\t{t.domain}\t{t.name}" for t in threats]
    except UnknownIdError as exc:
        raise ConfigError(str(exc)) from None
    _emit(to_json(doc) if args.format == "json" else "".join(line + "\n" for line in lines), args.output)
    return EXIT_OK


def cmd_export(args: argparse.Namespace) -> int:
    cfg = _config(args, args.scenario)
    report = assessment_report(args.which, cfg.scenario, cfg.assessments, _parse_set(args.set), workers=args.workers)
    files = plot_series(report)
    outdir = Path(args.outdir)
    try:
        outdir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"cannot create {outdir}: {exc.strerror or exc}") from None
    for name, text in files.items():
        write_atomic(outdir / name, text)
    for name in files:
        print(outdir / name)
    return EXIT_OK


# -- parser ------------------------------------------------------------------


def _add_config_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", metavar="PATH", help="scenario config YAML (default: bundled, or $%s/<scenario>.yaml)" % CONFIG_DIR_ENV)
    p.add_argument(
        "--set",
        action="append",
        metavar="KEY=VALUE",
        help="override one flat scenario key, e.g. --set tx_power_db=90 (repeatable)",
    )


def _add_output_options(p: argparse.ArgumentParser, formats: Sequence[str]) -> None:
    p.add_argument("--output", "-o", metavar="PATH", help="write to PATH instead of stdout")
    p.add_argument("--format", choices=formats, default=formats[0], help=f"output format (default: {formats[0]})")


def _workers(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return n


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fsosec",
        description="FSO link secrecy assessments and threat-registry checks.",
        epilog="exit status: 0 ok, 2 config/usage error, 3 domain error, 4 registry validation failure",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("assess", help="run assessment 1, 2 or 3 for a scenario")
    p.add_argument("which", type=int, choices=(1, 2, 3), help="assessment number")
    p.add_argument("scenario", choices=SCENARIO_KINDS, help="scenario preset")
    _add_config_options(p)
    _add_output_options(p, ("csv", "json"))
    p.add_argument("--workers", type=_workers, default=1, metavar="N", help="worker threads (default: 1)")
    p.set_defaults(func=cmd_assess)

    p = sub.add_parser("sweep", help="sweep one variable over an inclusive grid")
    p.add_argument("--scenario", choices=SCENARIO_KINDS, help="scenario preset when --config is not given")
    _add_config_options(p)
    p.add_argument("--variable", choices=SWEEP_VARIABLES, help="variable to sweep (default: from config)")
    p.add_argument("--range", metavar="START:STOP:STEP", help="inclusive grid (default: from config)")
    p.add_argument("--eve-offset", type=float, metavar="M", help="eavesdropper offset from the moving node, m (main_distance only)")
    _add_output_options(p, ("csv", "json"))
    p.add_argument("--workers", type=_workers, default=1, metavar="N", help="worker threads (default: 1)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("scenario", help="print a scenario's parameters and secrecy result")
    p.add_argument("scenario", choices=SCENARIO_KINDS, help="scenario preset")
    _add_config_options(p)
    _add_output_options(p, ("yaml", "json"))
    p.set_defaults(func=cmd_scenario)

    p = sub.add_parser("registry", help="validate or query the threat registry")
    p.add_argument("action", choices=("validate", "query", "coverage"), help="what to do")
    p.add_argument("--file", metavar="PATH", help="registry YAML (default: bundled, or $%s/registry.yaml)" % CONFIG_DIR_ENV)
    p.add_argument("--threat", metavar="ID", help="query: list protections mapped to this threat")
    p.add_argument("--element", metavar="NAME", help="query: list threats targeting this element")
    _add_output_options(p, ("text", "json"))
    p.set_defaults(func=cmd_registry)

    p = sub.add_parser("export", help="write one plot-ready CSV per assessment series")
    p.add_argument("which", type=int, choices=(1, 2, 3), help="assessment number")
    p.add_argument("scenario", choices=SCENARIO_KINDS, help="scenario preset")
    p.add_argument("--outdir", required=True, metavar="DIR", help="directory for the CSV files")
    _add_config_options(p)
    p.add_argument("--workers", type=_workers, default=1, metavar="N", help="worker threads (default: 1)")
    p.set_defaults(func=cmd_export)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except _ValidationFailed as exc:
        sys.stderr.write(exc.text)
        return EXIT_VALIDATION
    except ConfigError as exc:
        print(f"fsosec: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DomainError as exc:
        print(f"fsosec: domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"fsosec: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
