"""Parameter sweeps over a scenario and the three secrecy assessments.

Sweep variables and the scenario field each one drives:

=============  ===========================================================
main_distance  axis coordinate of the moving main-link node (the scenario's
               ``mover``); the eavesdropper follows at ``eve_offset_m`` when
               that is set, otherwise it stays put
eve_distance   axis coordinate of the eavesdropper
eve_gain       eavesdropper antenna gain, dB
tx_power       transmit power, dB
alpha          attenuation coefficient, dB/km
=============  ===========================================================

Grids include both endpoints. Rows come back in ascending grid order no
matter how many worker threads evaluated them.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence

from .errors import ConfigError, DomainError, SweepPointError
from .scenarios import Scenario
from .secrecy import SecrecyResult

SWEEP_VARIABLES = ("main_distance", "eve_distance", "eve_gain", "tx_power", "alpha")
VARIABLE_UNITS = {
    "main_distance": "m",
    "eve_distance": "m",
    "eve_gain": "dB",
    "tx_power": "dB",
    "alpha": "dB/km",
}
_GRID_EPS = 1e-9


@dataclass(frozen=True)
class SweepSpec:
    variable: str
    start: float
    stop: float
    step: float
    scenario: Scenario
    eve_offset_m: float | None = None

    def __post_init__(self) -> None:
        if self.variable not in SWEEP_VARIABLES:
            raise ConfigError(f"unknown sweep variable {self.variable!r}; expected one of {', '.join(SWEEP_VARIABLES)}")
        for name in ("start", "stop", "step"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
                raise ConfigError(f"sweep {name} must be a finite number, got {value!r}")
        if self.step <= 0:
            raise ConfigError(f"sweep step must be > 0, got {self.step!r}")
        if self.stop < self.start:
            raise ConfigError(f"sweep range is empty: start {self.start!r} > stop {self.stop!r}")
        if self.eve_offset_m is not None and self.variable != "main_distance":
            raise ConfigError("eve_offset_m only applies to main_distance sweeps")

    @property
    def unit(self) -> str:
        return VARIABLE_UNITS[self.variable]

    def grid(self) -> list[float]:
        n = int(math.floor((self.stop - self.start) / self.step + _GRID_EPS)) + 1
        return [self.start + i * self.step for i in range(n)]

    def scenario_at(self, value: float) -> Scenario:
        return apply_variable(self.scenario, self.variable, value, self.eve_offset_m)


def apply_variable(scenario: Scenario, variable: str, value: float, eve_offset_m: float | None = None) -> Scenario:
    if variable == "main_distance":
        prefix = "tx" if scenario.mover == "transmitter" else "rx"
        changes: dict[str, Any] = {f"{prefix}_altitude_m": value}
        if eve_offset_m is not None:
            changes["eve_altitude_m"] = value + eve_offset_m
        return scenario.with_overrides(changes)
    if variable == "eve_distance":
        return scenario.with_overrides({"eve_altitude_m": value})
    if variable == "eve_gain":
        return scenario.with_overrides({"eve_gain_db": value})
    if variable == "tx_power":
        return scenario.with_overrides({"tx_power_db": value})
    if variable == "alpha":
        return scenario.with_overrides({"alpha_db_per_km": value})
    raise ConfigError(f"unknown sweep variable {variable!r}")


@dataclass(frozen=True)
class SweepRow:
    value: float
    result: SecrecyResult
    main_distance_m: float
    eve_distance_m: float


def _evaluate_point(spec: SweepSpec, value: float) -> SweepRow:
    try:
        scenario = spec.scenario_at(value)
        result = scenario.evaluate()
    except DomainError as exc:
        raise SweepPointError(spec.variable, value, exc) from exc
    except ConfigError as exc:
        raise ConfigError(f"{spec.variable}={value!r}: {exc}") from exc
    return SweepRow(value, result, scenario.main_distance_m, scenario.eve_distance_m)


def run_sweep(spec: SweepSpec, workers: int = 1) -> list[SweepRow]:
    grid = spec.grid()
    if workers <= 1 or len(grid) < 2:
        return [_evaluate_point(spec, v) for v in grid]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda v: _evaluate_point(spec, v), grid))


def zero_secrecy_region(rows: Sequence[SweepRow]) -> list[tuple[float, float]]:
    """Maximal runs of consecutive grid points with zero secrecy capacity."""
    if not rows:
        raise DomainError("zero_secrecy_region needs at least one row")
    regions: list[tuple[float, float]] = []
    start: float | None = None
    prev = rows[0].value
    for row in rows:
        if row.result.secrecy_bps_hz == 0.0:
            if start is None:
                start = row.value
        elif start is not None:
            regions.append((start, prev))
            start = None
        prev = row.value
    if start is not None:
        regions.append((start, prev))
    return regions


@dataclass(frozen=True)
class AssessmentPreset:
    """One of the three assessments: a family of sweeps, one per series value."""

    which: int
    series_variable: str
    series: tuple[float, ...]
    variable: str
    start: float
    stop: float
    step: float
    eve_offset_m: float | None = None
    overrides: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.which not in (1, 2, 3):
            raise ConfigError(f"assessment must be 1, 2 or 3, got {self.which!r}")
        if self.series_variable not in SWEEP_VARIABLES:
            raise ConfigError(f"unknown series variable {self.series_variable!r}")
        if self.series_variable == self.variable:
            raise ConfigError("series variable and sweep variable must differ")
        if not self.series:
            raise ConfigError("assessment series must not be empty")


@dataclass(frozen=True)
class SeriesResult:
    value: float
    rows: tuple[SweepRow, ...]
    zero_regions: tuple[tuple[float, float], ...]

    def saturation_deltas(self) -> list[tuple[float, float, float]]:
        """``(x, x_next, C_s(x_next) - C_s(x))`` for consecutive grid points."""
        return [
            (a.value, b.value, b.result.secrecy_bps_hz - a.result.secrecy_bps_hz)
            for a, b in zip(self.rows, self.rows[1:])
        ]


@dataclass(frozen=True)
class AssessmentReport:
    which: int
    scenario: Scenario
    preset: AssessmentPreset
    series: tuple[SeriesResult, ...]

    def series_label(self, series: SeriesResult) -> str:
        return f"{self.preset.series_variable}={series.value:g} {VARIABLE_UNITS[self.preset.series_variable]}"


def assessment_report(
    which: int,
    scenario: Scenario,
    presets: Mapping[int, AssessmentPreset],
    overrides: Mapping[str, Any] | None = None,
    workers: int = 1,
) -> AssessmentReport:
    """Run every series of assessment ``which`` against ``scenario``."""
    try:
        preset = presets[which]
    except KeyError:
        raise ConfigError(f"no assessment {which!r} configured for scenario {scenario.name!r}") from None
    base = scenario.with_overrides(preset.overrides).with_overrides(overrides)
    results = []
    for value in preset.series:
        spec = SweepSpec(
            variable=preset.variable,
            start=preset.start,
            stop=preset.stop,
            step=preset.step,
            scenario=apply_variable(base, preset.series_variable, value),
            eve_offset_m=preset.eve_offset_m,
        )
        rows = tuple(run_sweep(spec, workers=workers))
        results.append(SeriesResult(value, rows, tuple(zero_secrecy_region(rows))))
    return AssessmentReport(which, base, preset, tuple(results))
