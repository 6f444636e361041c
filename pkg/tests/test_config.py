import pytest
import yaml

from fsosec.config import (
    CONFIG_DIR_ENV,
    bundled_config_text,
    default_config,
    load_config,
    parse_config,
    scenario_document,
)
from fsosec.errors import ConfigError
from fsosec.scenarios import preset
from fsosec.sweeps import assessment_report, run_sweep


@pytest.mark.parametrize("kind", ["orbital", "aerial"])
def test_bundled_scenario_equals_preset(kind):
    cfg = default_config(kind)
    assert cfg.scenario == preset(kind)
    assert set(cfg.assessments) == {1, 2, 3}


def test_bundled_sweep_has_13_rows():
    cfg = default_config("orbital")
    assert len(run_sweep(cfg.sweep)) == 13


@pytest.mark.parametrize("kind", ["orbital", "aerial"])
def test_scenario_document_round_trip(kind):
    s = preset(kind, {"tx_power_db": 93.5, "visibility_km": 2.0})
    text = yaml.safe_dump(scenario_document(s))
    assert parse_config(text).scenario == s


def test_minimal_document_uses_preset():
    cfg = parse_config("scenario: aerial\nbudget: {tx_power_db: 70}\n")
    assert cfg.scenario == preset("aerial", {"tx_power_db": 70.0})
    assert cfg.sweep is None and cfg.assessments == {}


@pytest.mark.parametrize(
    "text",
    [
        "scenario: orbital\nbudget: {tx_pwr: 1}\n",
        "scenario: orbital\nmystery: 1\n",
        "scenario: orbital\nschema_version: 2\n",
        "scenario: venus\n",
        "budget: {tx_power_db: 1}\n",
        "scenario: orbital\nsweep: {variable: tx_power, start: 1, stop: 2, step: 0}\n",
        "scenario: orbital\nsweep: {variable: tx_power, start: 1, stop: 2, step: 1, fixed: {tx_power_db: 3}}\n",
        "scenario: orbital\nsweep: {variable: wind, start: 1, stop: 2, step: 1}\n",
        "scenario: orbital\nassessments: {1: {series_variable: alpha, series: [x], variable: tx_power, start: 1, stop: 2, step: 1}}\n",
        "scenario: orbital\nnodes: {transmitter: {altitude_m: -5}}\n",
        "- just\n- a list\n",
    ],
)
def test_bad_documents_raise_config_error(text):
    with pytest.raises(ConfigError):
        parse_config(text)


def test_yaml_error_reports_location():
    with pytest.raises(ConfigError, match="line 2"):
        parse_config("scenario: orbital\nbudget: @x\nname: y\n")


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "absent.yaml")


def test_config_dir_environment(tmp_path, monkeypatch):
    text = bundled_config_text("orbital").replace("tx_power_db: 80", "tx_power_db: 77")
    (tmp_path / "orbital.yaml").write_text(text)
    monkeypatch.setenv(CONFIG_DIR_ENV, str(tmp_path))
    assert default_config("orbital").scenario.tx_power_db == 77.0
    assert default_config("aerial").scenario == preset("aerial")


# -- shapes of the bundled assessments ----------------------------------------


def _report(kind, which):
    cfg = default_config(kind)
    return assessment_report(which, cfg.scenario, cfg.assessments)


def _secrecy(series):
    return [r.result.secrecy_bps_hz for r in series.rows]


def test_orbital_assessment1_non_increasing_in_distance_and_alpha():
    report = _report("orbital", 1)
    curves = [_secrecy(s) for s in report.series]
    for c in curves:
        assert all(b <= a for a, b in zip(c, c[1:]))
        assert c[-1] == 0.0
    for lo, hi in zip(curves, curves[1:]):
        assert all(h <= l for l, h in zip(lo, hi))
    assert all(v == 0.0 for v in curves[-1])


def test_aerial_assessment1_prefix_shrinks_with_alpha():
    report = _report("aerial", 1)
    assert [s.value for s in report.series] == [10.0, 20.0, 30.0, 80.0]
    nonzero = [sum(v > 0 for v in _secrecy(s)) for s in report.series]
    assert all(b <= a for a, b in zip(nonzero, nonzero[1:]))
    assert nonzero[-1] == 0


def test_orbital_assessment2_zero_region_around_transmitter():
    report = _report("orbital", 2)
    first = report.series[0]
    assert any(lo <= 600e3 and hi >= 800e3 for lo, hi in first.zero_regions)
    for lo, hi in zip(report.series, report.series[1:]):
        assert all(h <= l for l, h in zip(_secrecy(lo), _secrecy(hi)))


def test_aerial_assessment2_decreasing_in_eve_distance():
    report = _report("aerial", 2)
    for s in report.series:
        c = _secrecy(s)
        assert all(b <= a for a, b in zip(c, c[1:]))


def test_orbital_assessment3_tables():
    report = _report("orbital", 3)
    eve = [[r.result.cap_eve_bps_hz for r in s.rows] for s in report.series]
    assert all(e == eve[0] for e in eve)
    for s in report.series:
        main = [r.result.cap_main_bps_hz for r in s.rows]
        assert all(b > a for a, b in zip(main, main[1:]))


def test_aerial_assessment3_series_values():
    report = _report("aerial", 3)
    assert [s.value for s in report.series] == [10.0, 15.0, 20.0, 25.0]
