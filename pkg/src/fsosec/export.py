"""CSV/JSON serialisation of sweeps and assessment reports.

CSV layout (``,`` separator, ``.`` decimal point, one header row):

* sweep:        ``variable,snr_main,snr_eve,cap_main,cap_eve,secrecy``
* assessment:   ``series,variable,snr_main,snr_eve,cap_main,cap_eve,secrecy``

``variable`` and ``series`` are in SI-ish base units (m, dB, dB/km); SNRs are
linear ratios and capacities are in bps/Hz. Floats are written with
``repr`` so that the text round-trips exactly.
"""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from pathlib import Path
from typing import Any, Iterable, Sequence

from .physics import ChannelResult
from .sweeps import VARIABLE_UNITS, AssessmentReport, SweepRow, SweepSpec, zero_secrecy_region

SWEEP_COLUMNS = ("variable", "snr_main", "snr_eve", "cap_main", "cap_eve", "secrecy")
REPORT_COLUMNS = ("series",) + SWEEP_COLUMNS


def _num(x: float) -> str:
    return repr(float(x))


def _row_values(row: SweepRow) -> list[str]:
    r = row.result
    return [_num(row.value), _num(r.snr_main), _num(r.snr_eve), _num(r.cap_main_bps_hz), _num(r.cap_eve_bps_hz), _num(r.secrecy_bps_hz)]


def _csv_text(header: Sequence[str], rows: Iterable[Sequence[str]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def sweep_csv(rows: Sequence[SweepRow]) -> str:
    return _csv_text(SWEEP_COLUMNS, (_row_values(r) for r in rows))


def report_csv(report: AssessmentReport) -> str:
    return _csv_text(
        REPORT_COLUMNS,
        ([_num(s.value)] + _row_values(r) for s in report.series for r in s.rows),
    )


def _channel_dict(channel: ChannelResult | None) -> dict[str, float] | None:
    if channel is None:
        return None
    b = channel.breakdown
    return {
        "rx_power_db": channel.rx_power_db,
        "snr_db": channel.snr_db,
        "attenuation_db": b.attenuation_db,
        "pointing_db": b.pointing_db,
        "path_loss_db": b.path_loss_db,
    }


def row_dict(row: SweepRow) -> dict[str, Any]:
    r = row.result
    return {
        "variable": row.value,
        "main_distance_m": row.main_distance_m,
        "eve_distance_m": row.eve_distance_m,
        "snr_main": r.snr_main,
        "snr_eve": r.snr_eve,
        "cap_main": r.cap_main_bps_hz,
        "cap_eve": r.cap_eve_bps_hz,
        "secrecy": r.secrecy_bps_hz,
        "main_channel": _channel_dict(r.main),
        "eve_channel": _channel_dict(r.eve),
    }


def sweep_dict(spec: SweepSpec, rows: Sequence[SweepRow]) -> dict[str, Any]:
    return {
        "variable": spec.variable,
        "unit": spec.unit,
        "start": spec.start,
        "stop": spec.stop,
        "step": spec.step,
        "eve_offset_m": spec.eve_offset_m,
        "scenario": spec.scenario.to_flat(),
        "zero_regions": [list(z) for z in zero_secrecy_region(rows)] if rows else [],
        "rows": [row_dict(r) for r in rows],
    }


def report_dict(report: AssessmentReport) -> dict[str, Any]:
    preset = report.preset
    series = []
    for s in report.series:
        entry: dict[str, Any] = {
            "label": report.series_label(s),
            "value": s.value,
            "zero_regions": [list(z) for z in s.zero_regions],
            "rows": [row_dict(r) for r in s.rows],
        }
        if preset.variable == "tx_power":
            entry["saturation_deltas"] = [
                {"from": a, "to": b, "delta_secrecy": d} for a, b, d in s.saturation_deltas()
            ]
        series.append(entry)
    return {
        "assessment": report.which,
        "scenario": report.scenario.to_flat(),
        "series_variable": preset.series_variable,
        "series_unit": VARIABLE_UNITS[preset.series_variable],
        "sweep": {
            "variable": preset.variable,
            "unit": VARIABLE_UNITS[preset.variable],
            "start": preset.start,
            "stop": preset.stop,
            "step": preset.step,
            "eve_offset_m": preset.eve_offset_m,
        },
        "series": series,
    }


def to_json(doc: Any) -> str:
    return json.dumps(doc, indent=2) + "\n"


def plot_series(report: AssessmentReport) -> dict[str, str]:
    """One small CSV per series, keyed by file name, with the plotted axes only."""
    preset = report.preset
    x_name = f"{preset.variable}_{VARIABLE_UNITS[preset.variable].replace('/', '_per_')}"
    if preset.variable == "tx_power":
        header = (x_name, "cap_main", "cap_eve", "secrecy")
        pick = lambda r: [_num(r.result.cap_main_bps_hz), _num(r.result.cap_eve_bps_hz), _num(r.result.secrecy_bps_hz)]  # noqa: E731
    else:
        header = (x_name, "secrecy")
        pick = lambda r: [_num(r.result.secrecy_bps_hz)]  # noqa: E731
    files = {}
    for s in report.series:
        name = f"assessment{report.which}_{report.scenario.eve_profile}_{preset.series_variable}_{s.value:g}.csv"
        files[name] = _csv_text(header, ([_num(r.value)] + pick(r) for r in s.rows))
    return files


def write_atomic(path: str | os.PathLike[str], text: str) -> None:
    """Write ``text`` to ``path`` through a temporary file and a rename."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent or ".")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise
