"""Named link scenarios for the two studied links.

Nodes sit on a single vertical axis; a node's ``altitude_m`` is its
coordinate on that axis and every separation is an absolute difference of
coordinates. No orbit propagation or slant-range geometry is involved.

Two presets are provided:

``orbital`` (LEOM -> HAPGS, eavesdropper LEOE)
    Main link suffers attenuation, pointing and path loss. The LEOE sits in
    vacuum and only suffers path loss.
``aerial`` (HAPGS -> LAP, eavesdropper LAPSE)
    Both links cross the attenuating layer; only the main link has pointing
    loss.

Atmospheric attenuation applies only to the part of a path that lies inside
``[layer_bottom_m, layer_top_m]``. With no layer configured the whole path
is attenuated.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Callable, Mapping

from .errors import ConfigError
from .physics import AtmosphereSpec, LinkBudget, LinkGeometry, kim_attenuation_db_per_km
from .secrecy import (
    MIN_EAVESDROPPER_DISTANCE_M,
    EavesdropperSpec,
    SecrecyResult,
    evaluate_link_pair,
    profile_named,
)

# Layer thickness at which an alpha in dB/km costs exactly alpha nepers.
CALIBRATED_LAYER_THICKNESS_M = 1e4 / math.log(10.0)


class Role(str, Enum):
    LEOM = "LEOM"
    LEOE = "LEOE"
    HAPGS = "HAPGS"
    LAP = "LAP"
    LAPSE = "LAPSE"


@dataclass(frozen=True)
class NodeSpec:
    role: Role
    altitude_m: float
    gain_db: float
    incline_deg: float | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "role", Role(self.role))
        if not math.isfinite(self.altitude_m) or self.altitude_m < 0.0:
            raise ConfigError(f"{self.role.value} altitude must be a finite value >= 0")
        if not math.isfinite(self.gain_db):
            raise ConfigError(f"{self.role.value} gain must be finite")

    @property
    def default_profile(self) -> str:
        return "orbital" if self.role in (Role.LEOM, Role.LEOE) else "aerial"


def _overlap(a: float, b: float, bottom: float, top: float) -> float:
    lo, hi = min(a, b), max(a, b)
    return max(0.0, min(hi, top) - max(lo, bottom))


@dataclass(frozen=True)
class Scenario:
    name: str
    transmitter: NodeSpec
    receiver: NodeSpec
    eavesdropper: NodeSpec
    tx_power_db: float
    wavelength_m: float = 1550e-9
    noise_db: float = -130.0
    eve_noise_db: float = -130.0
    alpha_db_per_km: float = 0.0
    visibility_km: float | None = None
    layer_bottom_m: float | None = None
    layer_top_m: float | None = None
    pointing_error_rad: float = 0.0
    beam_divergence_rad: float = 20e-6
    pointing_penalty_db: float | None = None
    eve_profile: str = "orbital"
    mover: str = "transmitter"

    def __post_init__(self) -> None:
        if self.mover not in ("transmitter", "receiver"):
            raise ConfigError(f"mover must be 'transmitter' or 'receiver', got {self.mover!r}")
        if (self.layer_bottom_m is None) != (self.layer_top_m is None):
            raise ConfigError("layer_bottom_m and layer_top_m must be given together")
        if self.layer_bottom_m is not None and not self.layer_bottom_m <= self.layer_top_m:
            raise ConfigError("layer_bottom_m must not exceed layer_top_m")
        try:
            profile_named(self.eve_profile)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    @property
    def main_distance_m(self) -> float:
        return abs(self.transmitter.altitude_m - self.receiver.altitude_m)

    @property
    def eve_distance_m(self) -> float:
        # A co-located eavesdropper is held at the minimum standoff.
        d = abs(self.transmitter.altitude_m - self.eavesdropper.altitude_m)
        return max(d, MIN_EAVESDROPPER_DISTANCE_M)

    def _attenuating_path(self, other: NodeSpec) -> float | None:
        if self.layer_bottom_m is None:
            return None
        return _overlap(self.transmitter.altitude_m, other.altitude_m, self.layer_bottom_m, self.layer_top_m)

    def budget(self) -> LinkBudget:
        return LinkBudget(
            tx_power_db=self.tx_power_db,
            tx_gain_db=self.transmitter.gain_db,
            rx_gain_db=self.receiver.gain_db,
            wavelength_m=self.wavelength_m,
            noise_db=self.noise_db,
        )

    def atmosphere(self) -> AtmosphereSpec:
        if self.visibility_km is not None:
            return AtmosphereSpec(self.alpha_db_per_km, self.visibility_km, provenance="derived")
        return AtmosphereSpec(self.alpha_db_per_km)

    def main_geometry(self) -> LinkGeometry:
        return LinkGeometry(
            distance_m=self.main_distance_m,
            pointing_error_rad=self.pointing_error_rad,
            beam_divergence_rad=self.beam_divergence_rad,
            attenuating_path_m=self._attenuating_path(self.receiver),
            pointing_penalty_db=self.pointing_penalty_db,
        )

    def eavesdropper_spec(self) -> EavesdropperSpec:
        return EavesdropperSpec(
            gain_db=self.eavesdropper.gain_db,
            distance_m=self.eve_distance_m,
            noise_db=self.eve_noise_db,
            profile=profile_named(self.eve_profile),
            attenuating_path_m=self._attenuating_path(self.eavesdropper),
        )

    def evaluate(self) -> SecrecyResult:
        return evaluate_link_pair(self.budget(), self.main_geometry(), self.atmosphere(), self.eavesdropper_spec())

    def to_flat(self) -> dict[str, Any]:
        """Flat key/value view; the inverse of :meth:`with_overrides`."""
        out: dict[str, Any] = {"name": self.name}
        for prefix, node in (("tx", self.transmitter), ("rx", self.receiver), ("eve", self.eavesdropper)):
            out[f"{prefix}_role"] = node.role.value
            out[f"{prefix}_altitude_m"] = node.altitude_m
            out[f"{prefix}_gain_db"] = node.gain_db
            out[f"{prefix}_incline_deg"] = node.incline_deg
        for key in _SCALAR_FIELDS:
            out[key] = getattr(self, key)
        return out

    def with_overrides(self, overrides: Mapping[str, Any] | None = None) -> Scenario:
        if not overrides:
            return self
        unknown = sorted(set(overrides) - set(OVERRIDE_KEYS))
        if unknown:
            raise ConfigError(f"unknown scenario keys: {', '.join(unknown)}")
        flat = self.to_flat()
        for key, value in overrides.items():
            flat[key] = _coerce(key, value)
        if "visibility_km" in overrides and flat["visibility_km"] is not None and "alpha_db_per_km" not in overrides:
            flat["alpha_db_per_km"] = kim_attenuation_db_per_km(flat["visibility_km"], flat["wavelength_m"])
        if "alpha_db_per_km" in overrides and "visibility_km" not in overrides:
            flat["visibility_km"] = None
        return _from_flat(flat)


_NODE_FIELDS = ("role", "altitude_m", "gain_db", "incline_deg")
_STRING_KEYS = {"name", "eve_profile", "mover", "tx_role", "rx_role", "eve_role"}
_OPTIONAL_KEYS = {
    "visibility_km",
    "layer_bottom_m",
    "layer_top_m",
    "pointing_penalty_db",
    "tx_incline_deg",
    "rx_incline_deg",
    "eve_incline_deg",
}
_SCALAR_FIELDS = tuple(
    f.name for f in dataclasses.fields(Scenario) if f.name not in ("name", "transmitter", "receiver", "eavesdropper")
)
OVERRIDE_KEYS = ("name",) + tuple(f"{p}_{f}" for p in ("tx", "rx", "eve") for f in _NODE_FIELDS) + _SCALAR_FIELDS


def _coerce(key: str, value: Any) -> Any:
    if key in _STRING_KEYS:
        if not isinstance(value, str):
            raise ConfigError(f"{key} must be a string, got {value!r}")
        return value
    if value is None:
        if key in _OPTIONAL_KEYS:
            return None
        raise ConfigError(f"{key} must not be null")
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{key} must be a number, got {value!r}")
    value = float(value)
    if not math.isfinite(value):
        raise ConfigError(f"{key} must be finite")
    return value


def _from_flat(flat: Mapping[str, Any]) -> Scenario:
    nodes = {}
    for prefix in ("tx", "rx", "eve"):
        try:
            nodes[prefix] = NodeSpec(*(flat[f"{prefix}_{f}"] for f in _NODE_FIELDS))
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    kwargs = {k: flat[k] for k in _SCALAR_FIELDS if k in flat}
    return Scenario(name=flat["name"], transmitter=nodes["tx"], receiver=nodes["rx"], eavesdropper=nodes["eve"], **kwargs)


_ORBITAL = Scenario(
    name="leom-hapgs",
    transmitter=NodeSpec(Role.LEOM, 700e3, 42.1, incline_deg=55.0),
    receiver=NodeSpec(Role.HAPGS, 20e3, 52.1),
    eavesdropper=NodeSpec(Role.LEOE, 600e3, 30.0),
    tx_power_db=80.0,
    alpha_db_per_km=1.0,
    layer_bottom_m=20e3,
    layer_top_m=20e3 + CALIBRATED_LAYER_THICKNESS_M,
    pointing_error_rad=10e-6,
    beam_divergence_rad=20e-6,
    eve_profile="orbital",
    mover="transmitter",
)

_AERIAL = Scenario(
    name="hapgs-lap",
    transmitter=NodeSpec(Role.HAPGS, 20e3, 42.1),
    receiver=NodeSpec(Role.LAP, 150.0, 52.1, incline_deg=25.0),
    eavesdropper=NodeSpec(Role.LAPSE, 1e3, 35.0),
    tx_power_db=80.0,
    alpha_db_per_km=10.0,
    layer_bottom_m=0.0,
    layer_top_m=2e3,
    pointing_error_rad=10e-6,
    beam_divergence_rad=20e-6,
    eve_profile="aerial",
    mover="receiver",
)

ORBITAL_ALPHA_RANGE_DB_PER_KM = (1.0, 10.0)
AERIAL_ALPHA_RANGE_DB_PER_KM = (10.0, 100.0)


def scenario_leom_hapgs(overrides: Mapping[str, Any] | None = None) -> Scenario:
    """LEOM -> HAPGS downlink tapped by an orbital LEOE 100 km below the LEOM."""
    return _ORBITAL.with_overrides(overrides)


def scenario_hapgs_lap(overrides: Mapping[str, Any] | None = None) -> Scenario:
    """HAPGS -> LAP link tapped by a LAPSE hovering at 1 km."""
    return _AERIAL.with_overrides(overrides)


PRESETS: dict[str, Callable[[Mapping[str, Any] | None], Scenario]] = {
    "orbital": scenario_leom_hapgs,
    "leom-hapgs": scenario_leom_hapgs,
    "aerial": scenario_hapgs_lap,
    "hapgs-lap": scenario_hapgs_lap,
}


def preset(name: str, overrides: Mapping[str, Any] | None = None) -> Scenario:
    try:
        factory = PRESETS[name]
    except KeyError:
        raise ConfigError(f"unknown scenario {name!r}; expected one of {sorted(PRESETS)}") from None
    return factory(overrides)


def scenario_kind(scenario: Scenario) -> str:
    """``orbital`` or ``aerial``, from the eavesdropper's impairment profile."""
    return scenario.eve_profile
