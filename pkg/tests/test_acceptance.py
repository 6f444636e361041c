"""Acceptance criteria 1-8; each test records one PASS/FAIL verdict line."""

import math
import random
import sys
import time

import yaml

import oracle
from conftest import record
from fsosec.cli import main
from fsosec.config import default_config
from fsosec.export import REPORT_COLUMNS, SWEEP_COLUMNS
from fsosec.physics import (
    AtmosphereSpec,
    LinkBudget,
    LinkGeometry,
    atmospheric_attenuation,
    free_space_loss,
    pointing_loss,
)
from fsosec.registry import bundled_registry, bundled_registry_text, load_registry, protections_for, validate_traceability
from fsosec.scenarios import scenario_leom_hapgs
from fsosec.secrecy import AERIAL, ORBITAL, EavesdropperSpec, evaluate_link_pair
from fsosec.sweeps import SweepSpec, assessment_report, run_sweep

FIELDS = (
    ("snr_main", "snr_main"),
    ("snr_eve", "snr_eve"),
    ("cap_main_bps_hz", "cap_main"),
    ("cap_eve_bps_hz", "cap_eve"),
    ("secrecy_bps_hz", "secrecy"),
)


def _random_link(rng: random.Random):
    aerial = rng.random() < 0.5
    d = 10 ** rng.uniform(1.0, 6.3)
    attenuated = None if rng.random() < 0.5 else rng.uniform(0.0, d)
    link = oracle.Link(
        tx_power_db=rng.uniform(0.0, 120.0),
        tx_gain_db=rng.uniform(0.0, 60.0),
        rx_gain_db=rng.uniform(0.0, 60.0),
        wavelength_m=rng.uniform(8e-7, 1.6e-6),
        noise_db=rng.uniform(-150.0, -100.0),
        distance_m=d,
        alpha_db_per_km=rng.choice([0.0, rng.uniform(0.0, 10.0), rng.uniform(10.0, 100.0)]),
        attenuated_m=attenuated,
        theta=rng.uniform(0.0, 3e-5),
        divergence=rng.uniform(5e-6, 1e-4),
        eve_gain_db=rng.uniform(0.0, 80.0),
        eve_distance_m=10 ** rng.uniform(0.0, 6.3),
        eve_noise_db=rng.uniform(-150.0, -100.0),
        eve_atmosphere=aerial,
    )
    if aerial and rng.random() < 0.5:
        link.eve_attenuated_m = rng.uniform(0.0, link.eve_distance_m)
    return link


def _evaluate(link):
    budget = LinkBudget(link.tx_power_db, link.tx_gain_db, link.rx_gain_db, link.wavelength_m, link.noise_db)
    geom = LinkGeometry(link.distance_m, link.theta, link.divergence, attenuating_path_m=link.attenuated_m)
    eve = EavesdropperSpec(
        link.eve_gain_db,
        link.eve_distance_m,
        link.eve_noise_db,
        AERIAL if link.eve_atmosphere else ORBITAL,
        attenuating_path_m=link.eve_attenuated_m,
    )
    return evaluate_link_pair(budget, geom, AtmosphereSpec(link.alpha_db_per_km), eve)


def test_criterion_1_oracle_equivalence():
    rng = random.Random(20240601)
    links = [_random_link(rng) for _ in range(1000)]
    t0 = time.perf_counter()
    worst = 0.0
    failures = 0
    for link in links:
        got = _evaluate(link)
        ref = oracle.evaluate(link)
        for attr, key in FIELDS:
            a, b = getattr(got, attr), float(ref[key])
            if not math.isclose(a, b, rel_tol=1e-9, abs_tol=1e-12):
                failures += 1
            elif abs(b) >= sys.float_info.min:  # subnormals carry fewer digits
                worst = max(worst, abs(a - b) / abs(b))
    elapsed = time.perf_counter() - t0
    ok = failures == 0 and elapsed < 10.0
    record(1, ok, f"1000 random configs vs 50-digit oracle, {failures} mismatches, worst rel err {worst:.2e} (normal-range values), {elapsed:.2f} s")
    assert ok


def test_criterion_2_clamp_and_symmetry():
    rng = random.Random(7)
    negatives = 0
    for _ in range(10_000):
        res = _evaluate(_random_link(rng))
        negatives += res.secrecy_bps_hz < 0.0

    budget = LinkBudget(80.0, 42.1, 52.1, 1550e-9, -130.0)
    same = evaluate_link_pair(budget, LinkGeometry(4e5), AtmosphereSpec(0.0), EavesdropperSpec(52.1, 4e5))

    p = 700e3
    base = scenario_leom_hapgs({"tx_altitude_m": p, "eve_gain_db": 30.0})
    worst = 0.0
    for k in range(1, 16):
        x = 40e3 * k
        below = base.with_overrides({"eve_altitude_m": p - x}).evaluate().secrecy_bps_hz
        above = base.with_overrides({"eve_altitude_m": p + x}).evaluate().secrecy_bps_hz
        worst = max(worst, abs(below - above))
    ok = negatives == 0 and same.secrecy_bps_hz == 0.0 and worst < 1e-9
    record(2, ok, f"C_s<0 in {negatives}/10000 samples; identical channels C_s={same.secrecy_bps_hz}; max |C_s(p-x)-C_s(p+x)| over 15 offsets = {worst:.1e}")
    assert ok


def test_criterion_3_orbital_eve_independent_of_alpha():
    cfg = default_config("orbital")
    report = assessment_report(3, cfg.scenario, cfg.assessments)
    tables = [[r.result.cap_eve_bps_hz for r in s.rows] for s in report.series]
    alphas = [s.value for s in report.series]
    ok = alphas == [1.0, 3.0, 5.0, 7.0] and all(t == tables[0] for t in tables)
    record(3, ok, f"eavesdropper capacity tables bit-identical across alpha={alphas}")
    assert ok


def test_criterion_4_power_saturation():
    checked = 0
    worst = 0.0
    for kind in ("orbital", "aerial"):
        cfg = default_config(kind)
        report = assessment_report(3, cfg.scenario, cfg.assessments)
        for s in report.series:
            for a, b in zip(s.rows, s.rows[1:]):
                if b.value - a.value != 10.0:
                    continue
                if min(a.result.snr_main, a.result.snr_eve, b.result.snr_main, b.result.snr_eve) > 1e3:
                    checked += 1
                    worst = max(worst, abs(b.result.secrecy_bps_hz - a.result.secrecy_bps_hz))
    ok = checked > 0 and worst < 1e-3
    record(4, ok, f"{checked} +10 dB steps with both SNRs > 1e3, max |dC_s| = {worst:.2e} bps/Hz")
    assert ok


def test_criterion_5_monotonicity():
    t0 = time.perf_counter()
    violations = []

    # C_s non-increasing in alpha, orbital, pointwise over 13 distances.
    cfg = default_config("orbital")
    spec = cfg.sweep
    alphas = [0.5 * i for i in range(21)]
    curves = [run_sweep(SweepSpec(spec.variable, spec.start, spec.stop, spec.step, spec.scenario.with_overrides({"alpha_db_per_km": a}), spec.eve_offset_m)) for a in alphas]
    assert len(curves[0]) == 13
    for lo, hi in zip(curves, curves[1:]):
        if any(h.result.secrecy_bps_hz > l.result.secrecy_bps_hz for l, h in zip(lo, hi)):
            violations.append("alpha")

    # C_s non-increasing in G_e over the assessment-2 series, both scenarios.
    for kind in ("orbital", "aerial"):
        c = default_config(kind)
        report = assessment_report(2, c.scenario, c.assessments)
        if [s.value for s in report.series] != [30.0, 50.0, 70.0, 80.0]:
            violations.append(f"{kind} G_e series")
        for lo, hi in zip(report.series, report.series[1:]):
            if any(h.result.secrecy_bps_hz > l.result.secrecy_bps_hz for l, h in zip(lo.rows, hi.rows)):
                violations.append(f"{kind} G_e")

    # Loss factors on random inputs.
    rng = random.Random(99)
    samples = 10_000
    for _ in range(samples):
        a, d, k = rng.uniform(0.01, 5.0), rng.uniform(1.0, 2e4), rng.uniform(1.001, 2.0)
        lam = rng.uniform(8e-7, 1.6e-6)
        div = rng.uniform(5e-6, 1e-4)
        theta = rng.uniform(0.0, 2.0 * div)
        if not atmospheric_attenuation(AtmosphereSpec(a * k), d) < atmospheric_attenuation(AtmosphereSpec(a), d):
            violations.append("attenuation vs alpha")
        if not atmospheric_attenuation(AtmosphereSpec(a), d * k) < atmospheric_attenuation(AtmosphereSpec(a), d):
            violations.append("attenuation vs distance")
        if not free_space_loss(d * k, lam) < free_space_loss(d, lam):
            violations.append("path loss vs distance")
        if not pointing_loss(theta * k + 1e-7, div) < pointing_loss(theta, div):
            violations.append("pointing vs angle")
    elapsed = time.perf_counter() - t0
    ok = not violations and elapsed < 5.0
    record(5, ok, f"alpha/G_e orderings and {samples} random loss-factor samples, {len(violations)} violations, {elapsed:.2f} s")
    assert ok


ANCHORS = {200e3: 5.876, 700e3: 2.041, 1300e3: 0.216}


def test_criterion_6_calibrated_anchors():
    cfg = default_config("orbital")
    report = assessment_report(1, cfg.scenario, cfg.assessments)
    by_alpha = {s.value: {r.value: r.result.secrecy_bps_hz for r in s.rows} for s in report.series}
    deviations = {x: by_alpha[1.0][x] - y for x, y in ANCHORS.items()}
    zero_at_7 = all(v == 0.0 for v in by_alpha[7.0].values())
    ok = all(abs(d) <= 0.5 for d in deviations.values()) and zero_at_7
    table = ", ".join(f"{x / 1e3:.0f} km {d:+.4f}" for x, d in deviations.items())
    record(6, ok, f"alpha=1 anchor deviations: {table}; alpha=7 identically zero: {zero_at_7}")
    assert ok


def test_criterion_7_registry_fidelity():
    reg = bundled_registry()
    report = validate_traceability(reg)
    domains = [t.domain for t in reg.threats]
    exf = [p.id for p in protections_for(reg, "EXF-0003")]
    # The source link table has 10 rows (3 + 2 + 2 + 3).
    counts_ok = (
        len(reg.links) == 10
        and domains.count("environmental") == 3
        and domains.count("cyber") == 10
        and len({p.id for p in reg.protections}) == 7
    )
    flipped = 0
    doc = yaml.safe_load(bundled_registry_text())
    for threat_id in list(doc["mappings"]):
        mutated = yaml.safe_load(bundled_registry_text())
        del mutated["mappings"][threat_id]
        flipped += not validate_traceability(load_registry(mutated)).passed
    ok = report.passed and not report.findings and counts_ok and exf == ["CM0003", "CM0029", "CM0002"] and flipped == len(doc["mappings"])
    record(
        7,
        ok,
        f"validate passed with {len(report.findings)} findings; links {len(reg.links)} (3+2+2+3 catalog rows; a count of 11 has no matching source row), "
        f"threats {domains.count('environmental')} env + {domains.count('cyber')} cyber, protections {len(reg.protections)}; "
        f"EXF-0003 -> {exf}; {flipped}/{len(doc['mappings'])} single-mapping removals fail validation",
    )
    assert ok


def test_criterion_8_determinism(tmp_path):
    invocations = [
        ["sweep", "--scenario", "orbital"],
        ["sweep", "--scenario", "aerial", "--format", "json"],
        ["assess", "1", "orbital"],
        ["assess", "2", "aerial", "--workers", "3"],
        ["assess", "3", "orbital", "--format", "json"],
    ]
    identical = 0
    headers_ok = True
    for i, argv in enumerate(invocations):
        outputs = []
        for run in range(2):
            path = tmp_path / f"{i}_{run}.out"
            assert main(argv + ["--output", str(path)]) == 0
            outputs.append(path.read_bytes())
        identical += outputs[0] == outputs[1]
        if "--format" not in argv:
            header = outputs[0].decode().splitlines()[0]
            expected = SWEEP_COLUMNS if argv[0] == "sweep" else REPORT_COLUMNS
            headers_ok &= header == ",".join(expected)
    ok = identical == len(invocations) and headers_ok
    record(8, ok, f"{identical}/{len(invocations)} invocations byte-identical across runs; CSV headers match documented order: {headers_ok}")
    assert ok
