"""Scenario configuration files.

A configuration is a YAML document::

    schema_version: 1
    scenario: orbital              # preset the file starts from
    nodes:
      transmitter:  {role: LEOM, altitude_m: 700000, gain_db: 42.1, incline_deg: 55}
      receiver:     {role: HAPGS, altitude_m: 20000, gain_db: 52.1}
      eavesdropper: {role: LEOE, altitude_m: 600000, gain_db: 30,
                     profile: orbital, noise_db: -130}
    budget:     {tx_power_db: 80, wavelength_m: 1.55e-6, noise_db: -130}
    atmosphere: {alpha_db_per_km: 1, visibility_km: null,
                 layer_bottom_m: 20000, layer_top_m: 24342.9}
    pointing:   {error_rad: 1.0e-5, divergence_rad: 2.0e-5, penalty_db: null}
    mover: transmitter
    sweep:      {variable: main_distance, start: 200000, stop: 1400000,
                 step: 100000, eve_offset_m: -100000, fixed: {}}
    assessments:
      1: {series_variable: alpha, series: [1, 3, 5, 7], variable: main_distance,
          start: 200000, stop: 1400000, step: 100000, eve_offset_m: -100000,
          overrides: {rx_gain_db: 42.1}}

Every section is optional; omitted values keep the preset's defaults.
``fixed`` and ``overrides`` blocks take flat scenario keys
(see :data:`fsosec.scenarios.OVERRIDE_KEYS`).
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Mapping

import yaml

from .errors import ConfigError
from .scenarios import OVERRIDE_KEYS, Scenario, preset
from .sweeps import AssessmentPreset, SweepSpec

SCHEMA_VERSION = 1
CONFIG_DIR_ENV = "FSOSEC_CONFIG_DIR"

_NODE_KEYS = {"transmitter": "tx", "receiver": "rx", "eavesdropper": "eve"}
_SECTION_KEYS = {
    "budget": {"tx_power_db": "tx_power_db", "wavelength_m": "wavelength_m", "noise_db": "noise_db"},
    "atmosphere": {
        "alpha_db_per_km": "alpha_db_per_km",
        "visibility_km": "visibility_km",
        "layer_bottom_m": "layer_bottom_m",
        "layer_top_m": "layer_top_m",
    },
    "pointing": {"error_rad": "pointing_error_rad", "divergence_rad": "beam_divergence_rad", "penalty_db": "pointing_penalty_db"},
}
_TOP_KEYS = {"schema_version", "scenario", "name", "nodes", "mover", "sweep", "assessments", *_SECTION_KEYS}
_SWEEP_DRIVES = {
    "main_distance": ("tx_altitude_m", "rx_altitude_m"),
    "eve_distance": ("eve_altitude_m",),
    "eve_gain": ("eve_gain_db",),
    "tx_power": ("tx_power_db",),
    "alpha": ("alpha_db_per_km",),
}


@dataclass(frozen=True)
class ScenarioConfig:
    scenario: Scenario
    sweep: SweepSpec | None = None
    assessments: Mapping[int, AssessmentPreset] = field(default_factory=dict)
    source: str = "<string>"


def _mapping(value: Any, where: str) -> Mapping[str, Any]:
    if value is None:
        return {}
    if not isinstance(value, Mapping):
        raise ConfigError(f"{where} must be a mapping")
    return value


def _check_keys(section: Mapping[str, Any], allowed, where: str) -> None:
    unknown = sorted(set(section) - set(allowed))
    if unknown:
        raise ConfigError(f"unknown keys in {where}: {', '.join(map(str, unknown))}")


def _flat_overrides(block: Any, where: str) -> dict[str, Any]:
    block = dict(_mapping(block, where))
    _check_keys(block, OVERRIDE_KEYS, where)
    return block


def scenario_overrides(doc: Mapping[str, Any]) -> dict[str, Any]:
    """Translate the nested scenario sections of ``doc`` into flat keys."""
    flat: dict[str, Any] = {}
    if "name" in doc:
        flat["name"] = doc["name"]
    if "mover" in doc:
        flat["mover"] = doc["mover"]
    nodes = _mapping(doc.get("nodes"), "nodes")
    _check_keys(nodes, _NODE_KEYS, "nodes")
    for node_name, prefix in _NODE_KEYS.items():
        node = _mapping(nodes.get(node_name), f"nodes.{node_name}")
        allowed = {"role", "altitude_m", "gain_db", "incline_deg"}
        if node_name == "eavesdropper":
            allowed |= {"profile", "noise_db"}
        _check_keys(node, allowed, f"nodes.{node_name}")
        for key, value in node.items():
            if key == "profile":
                flat["eve_profile"] = value
            elif key == "noise_db":
                flat["eve_noise_db"] = value
            else:
                flat[f"{prefix}_{key}"] = value
    for section, keys in _SECTION_KEYS.items():
        block = _mapping(doc.get(section), section)
        _check_keys(block, keys, section)
        for key, value in block.items():
            flat[keys[key]] = value
    return flat


def _number(block: Mapping[str, Any], key: str, where: str) -> float:
    if key not in block:
        raise ConfigError(f"{where} is missing {key!r}")
    value = block[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where}.{key} must be a number, got {value!r}")
    return float(value)


def _optional_number(block: Mapping[str, Any], key: str, where: str) -> float | None:
    if block.get(key) is None:
        return None
    return _number(block, key, where)


def _parse_sweep(block: Mapping[str, Any], scenario: Scenario) -> SweepSpec:
    _check_keys(block, {"variable", "start", "stop", "step", "eve_offset_m", "fixed"}, "sweep")
    variable = block.get("variable")
    if variable not in _SWEEP_DRIVES:
        raise ConfigError(f"sweep.variable must be one of {', '.join(_SWEEP_DRIVES)}, got {variable!r}")
    fixed = _flat_overrides(block.get("fixed"), "sweep.fixed")
    clash = sorted(set(fixed) & set(_SWEEP_DRIVES[variable]))
    if clash:
        raise ConfigError(f"sweep.fixed sets {', '.join(clash)}, which the {variable} sweep varies")
    return SweepSpec(
        variable=variable,
        start=_number(block, "start", "sweep"),
        stop=_number(block, "stop", "sweep"),
        step=_number(block, "step", "sweep"),
        scenario=scenario.with_overrides(fixed),
        eve_offset_m=_optional_number(block, "eve_offset_m", "sweep"),
    )


def _parse_assessment(which: Any, block: Any) -> AssessmentPreset:
    where = f"assessments.{which}"
    block = _mapping(block, where)
    _check_keys(
        block,
        {"series_variable", "series", "variable", "start", "stop", "step", "eve_offset_m", "overrides"},
        where,
    )
    try:
        which = int(which)
    except (TypeError, ValueError):
        raise ConfigError(f"assessment keys must be 1, 2 or 3, got {which!r}") from None
    series = block.get("series")
    if not isinstance(series, list) or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in series):
        raise ConfigError(f"{where}.series must be a list of numbers")
    variable = block.get("variable")
    if variable not in _SWEEP_DRIVES:
        raise ConfigError(f"{where}.variable must be one of {', '.join(_SWEEP_DRIVES)}, got {variable!r}")
    return AssessmentPreset(
        which=which,
        series_variable=block.get("series_variable"),
        series=tuple(float(v) for v in series),
        variable=variable,
        start=_number(block, "start", where),
        stop=_number(block, "stop", where),
        step=_number(block, "step", where),
        eve_offset_m=_optional_number(block, "eve_offset_m", where),
        overrides=_flat_overrides(block.get("overrides"), f"{where}.overrides"),
    )


def parse_config(text: str, source: str = "<string>", default_scenario: str | None = None) -> ScenarioConfig:
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f" at line {mark.line + 1}, column {mark.column + 1}" if mark else ""
        raise ConfigError(f"{source}: invalid YAML{where}") from None
    doc = _mapping(doc, source)
    _check_keys(doc, _TOP_KEYS, source)
    version = doc.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ConfigError(f"{source}: unsupported schema_version {version!r}")
    name = doc.get("scenario", default_scenario)
    if name is None:
        raise ConfigError(f"{source}: no scenario preset named")
    scenario = preset(name, scenario_overrides(doc))
    sweep = _parse_sweep(_mapping(doc["sweep"], "sweep"), scenario) if doc.get("sweep") else None
    assessments = {}
    for key, block in _mapping(doc.get("assessments"), "assessments").items():
        parsed = _parse_assessment(key, block)
        assessments[parsed.which] = parsed
    return ScenarioConfig(scenario, sweep, assessments, source)


def load_config(path: str | os.PathLike[str], default_scenario: str | None = None) -> ScenarioConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror or exc}") from None
    return parse_config(text, str(path), default_scenario)


def bundled_config_text(kind: str) -> str:
    try:
        return resources.files("fsosec").joinpath("data").joinpath(f"{kind}.yaml").read_text(encoding="utf-8")
    except FileNotFoundError:
        raise ConfigError(f"no bundled config for scenario {kind!r}") from None


def default_config(kind: str) -> ScenarioConfig:
    """Config for ``kind`` from ``$FSOSEC_CONFIG_DIR`` if present there, else the bundled one."""
    directory = os.environ.get(CONFIG_DIR_ENV)
    if directory:
        candidate = Path(directory) / f"{kind}.yaml"
        if candidate.is_file():
            return load_config(candidate, kind)
    return parse_config(bundled_config_text(kind), f"<bundled {kind}.yaml>", kind)


def scenario_document(scenario: Scenario) -> dict[str, Any]:
    """Nested config document reproducing ``scenario`` exactly."""
    flat = scenario.to_flat()
    nodes = {}
    for node_name, prefix in _NODE_KEYS.items():
        nodes[node_name] = {
            key: flat[f"{prefix}_{key}"] for key in ("role", "altitude_m", "gain_db", "incline_deg")
        }
    nodes["eavesdropper"]["profile"] = flat["eve_profile"]
    nodes["eavesdropper"]["noise_db"] = flat["eve_noise_db"]
    doc: dict[str, Any] = {
        "schema_version": SCHEMA_VERSION,
        "scenario": "orbital" if flat["eve_profile"] == "orbital" else "aerial",
        "name": flat["name"],
        "nodes": nodes,
    }
    for section, keys in _SECTION_KEYS.items():
        doc[section] = {key: flat[flat_key] for key, flat_key in keys.items()}
    doc["mover"] = flat["mover"]
    return doc
