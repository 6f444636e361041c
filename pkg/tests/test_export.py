import csv
import io
import json

import pytest

from fsosec.config import default_config
from fsosec.export import (
    REPORT_COLUMNS,
    SWEEP_COLUMNS,
    plot_series,
    report_csv,
    report_dict,
    sweep_csv,
    sweep_dict,
    to_json,
    write_atomic,
)
from fsosec.sweeps import assessment_report, run_sweep


@pytest.fixture(scope="module")
def orbital():
    return default_config("orbital")


def test_sweep_csv_layout(orbital):
    rows = run_sweep(orbital.sweep)
    text = sweep_csv(rows)
    lines = text.splitlines()
    assert lines[0] == ",".join(SWEEP_COLUMNS)
    assert len(lines) == 14
    parsed = list(csv.DictReader(io.StringIO(text)))
    assert float(parsed[0]["variable"]) == rows[0].value
    assert float(parsed[0]["secrecy"]) == rows[0].result.secrecy_bps_hz  # repr round-trips


def test_report_csv_layout(orbital):
    report = assessment_report(1, orbital.scenario, orbital.assessments)
    lines = report_csv(report).splitlines()
    assert lines[0] == ",".join(REPORT_COLUMNS)
    assert len(lines) == 1 + 4 * 13
    assert {line.split(",")[0] for line in lines[1:]} == {"1.0", "3.0", "5.0", "7.0"}


def test_json_report_contents(orbital):
    report = assessment_report(3, orbital.scenario, orbital.assessments)
    doc = json.loads(to_json(report_dict(report)))
    assert doc["assessment"] == 3 and doc["series_variable"] == "alpha"
    assert len(doc["series"]) == 4
    first = doc["series"][0]
    assert first["label"] == "alpha=1 dB/km"
    assert len(first["saturation_deltas"]) == len(first["rows"]) - 1
    assert set(first["rows"][0]["main_channel"]) == {"rx_power_db", "snr_db", "attenuation_db", "pointing_db", "path_loss_db"}


def test_sweep_dict(orbital):
    doc = sweep_dict(orbital.sweep, run_sweep(orbital.sweep))
    assert doc["variable"] == "main_distance" and doc["unit"] == "m"
    assert len(doc["rows"]) == 13


def test_plot_series_files(orbital):
    report = assessment_report(3, orbital.scenario, orbital.assessments)
    files = plot_series(report)
    assert sorted(files) == [f"assessment3_orbital_alpha_{a}.csv" for a in (1, 3, 5, 7)]
    assert next(iter(files.values())).splitlines()[0] == "tx_power_dB,cap_main,cap_eve,secrecy"


def test_write_atomic(tmp_path):
    target = tmp_path / "out.csv"
    write_atomic(target, "a,b\n")
    write_atomic(target, "c,d\n")
    assert target.read_text() == "c,d\n"
    assert [p.name for p in tmp_path.iterdir()] == ["out.csv"]


def test_write_atomic_leaves_nothing_on_failure(tmp_path):
    with pytest.raises(OSError):
        write_atomic(tmp_path / "missing_dir" / "x.csv", "data")
    assert list(tmp_path.iterdir()) == []
