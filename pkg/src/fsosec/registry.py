"""Threat -> protection traceability registry.

Registry file format (YAML, ``schema_version: 1``)::

    schema_version: 1
    elements:                      # technical elements and their SHALL text
      - name: FSO/RF Management
        secure_blocks: ["The FSO/RF Management SHALL ..."]
    links:                         # TT&C link catalog
      - {direction: "Uplink (HAPGS → LEOM)", function: Command, description: "..."}
    threats:
      - {id: NAT-001, domain: environmental, name: "...",
         target_element: FSO/RF Management, passive: true}
    protections:
      - {id: PRO-001, name: "...", kind: introduced}
    mappings:                      # threat id -> protection ids
      NAT-001: [PRO-001]

Every section is optional. When ``elements`` is omitted the element set is
taken from the threats' ``target_element`` values.

Identifier formats:

* environmental threats ``NAT-nnn``; cyber threats ``XX-nnnn`` or
  ``XXX-nnnn`` with an optional ``.nn`` sub-technique suffix
* introduced protections ``PRO-nnn``; catalog countermeasures ``CMnnnn``

The registry is immutable once loaded.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Any, Mapping

import yaml

from .errors import (
    DanglingReferenceError,
    DuplicateIdError,
    RegistryError,
    RegistryParseError,
    UnknownIdError,
)

SCHEMA_VERSION = 1

ENVIRONMENTAL_ID = re.compile(r"^NAT-\d{3}$")
CYBER_ID = re.compile(r"^[A-Z]{2,3}-\d{4}(\.\d{2})?$")
INTRODUCED_ID = re.compile(r"^PRO-\d{3}$")
COUNTERMEASURE_ID = re.compile(r"^CM\d{4}$")

DOMAINS = ("cyber", "environmental")
PROTECTION_KINDS = ("sparta-countermeasure", "introduced")


class TtcFunction(str, Enum):
    COMMAND = "Command"
    TELEMETRY = "Telemetry"
    TRACKING = "Tracking"


@dataclass(frozen=True)
class TtcLink:
    direction: str
    function: TtcFunction
    description: str = ""


@dataclass(frozen=True)
class ThreatTechnique:
    id: str
    domain: str
    name: str
    target_element: str | None
    passive: bool = False


@dataclass(frozen=True)
class ProtectionTechnique:
    id: str
    name: str
    kind: str


@dataclass(frozen=True)
class TraceRegistry:
    links: tuple[TtcLink, ...] = ()
    threats: tuple[ThreatTechnique, ...] = ()
    protections: tuple[ProtectionTechnique, ...] = ()
    mappings: tuple[tuple[str, tuple[str, ...]], ...] = ()
    elements: tuple[str, ...] = ()
    secure_blocks: tuple[tuple[str, tuple[str, ...]], ...] = ()

    def threat(self, threat_id: str) -> ThreatTechnique:
        for t in self.threats:
            if t.id == threat_id:
                return t
        raise UnknownIdError(f"unknown threat id {threat_id!r}")

    def protection(self, protection_id: str) -> ProtectionTechnique:
        for p in self.protections:
            if p.id == protection_id:
                return p
        raise UnknownIdError(f"unknown protection id {protection_id!r}")

    def mapping(self) -> dict[str, tuple[str, ...]]:
        return dict(self.mappings)


@dataclass(frozen=True)
class Finding:
    severity: str  # "error" or "info"
    code: str
    subject: str
    message: str

    def as_dict(self) -> dict[str, str]:
        return {"severity": self.severity, "code": self.code, "subject": self.subject, "message": self.message}


@dataclass(frozen=True)
class ValidationReport:
    findings: tuple[Finding, ...] = ()

    @property
    def passed(self) -> bool:
        return not any(f.severity == "error" for f in self.findings)

    @property
    def errors(self) -> list[Finding]:
        return [f for f in self.findings if f.severity == "error"]

    def as_dict(self) -> dict[str, Any]:
        return {"passed": self.passed, "findings": [f.as_dict() for f in self.findings]}

    def to_text(self) -> str:
        lines = [f"traceability: {'PASS' if self.passed else 'FAIL'} ({len(self.findings)} findings)"]
        lines += [f"  [{f.severity}] {f.code} {f.subject}: {f.message}" for f in self.findings]
        return "\n".join(lines) + "\n"


# -- loading -----------------------------------------------------------------


def _seq(doc: Mapping[str, Any], key: str) -> list[Any]:
    value = doc.get(key)
    if value is None:
        return []
    if not isinstance(value, list):
        raise RegistryParseError(f"{key} must be a list")
    return value


def _entry(item: Any, where: str, required: tuple[str, ...], optional: tuple[str, ...] = ()) -> dict[str, Any]:
    if not isinstance(item, Mapping):
        raise RegistryParseError(f"{where} must be a mapping")
    unknown = sorted(set(item) - set(required) - set(optional))
    if unknown:
        raise RegistryParseError(f"{where}: unknown keys {', '.join(map(str, unknown))}")
    missing = [k for k in required if k not in item]
    if missing:
        raise RegistryParseError(f"{where}: missing {', '.join(missing)}")
    return dict(item)


def _text(value: Any, where: str) -> str:
    if not isinstance(value, str):
        raise RegistryParseError(f"{where} must be a string, got {value!r}")
    return value


def _build(doc: Mapping[str, Any]) -> TraceRegistry:
    unknown = sorted(set(doc) - {"schema_version", "elements", "links", "threats", "protections", "mappings"})
    if unknown:
        raise RegistryParseError(f"unknown top-level keys: {', '.join(map(str, unknown))}")
    version = doc.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise RegistryParseError(f"unsupported schema_version {version!r}")

    links = []
    for i, item in enumerate(_seq(doc, "links")):
        e = _entry(item, f"links[{i}]", ("direction", "function"), ("description",))
        try:
            function = TtcFunction(e["function"])
        except ValueError:
            raise RegistryParseError(
                f"links[{i}].function must be one of {', '.join(f.value for f in TtcFunction)}, got {e['function']!r}"
            ) from None
        links.append(TtcLink(_text(e["direction"], f"links[{i}].direction"), function, _text(e.get("description", ""), f"links[{i}].description")))

    threats = []
    for i, item in enumerate(_seq(doc, "threats")):
        e = _entry(item, f"threats[{i}]", ("id", "domain", "name"), ("target_element", "passive"))
        target = e.get("target_element")
        if target is not None:
            target = _text(target, f"threats[{i}].target_element")
        passive = e.get("passive", False)
        if not isinstance(passive, bool):
            raise RegistryParseError(f"threats[{i}].passive must be true or false")
        threats.append(
            ThreatTechnique(
                _text(e["id"], f"threats[{i}].id"),
                _text(e["domain"], f"threats[{i}].domain"),
                _text(e["name"], f"threats[{i}].name"),
                target,
                passive,
            )
        )

    protections = []
    for i, item in enumerate(_seq(doc, "protections")):
        e = _entry(item, f"protections[{i}]", ("id", "name", "kind"))
        protections.append(
            ProtectionTechnique(
                _text(e["id"], f"protections[{i}].id"),
                _text(e["name"], f"protections[{i}].name"),
                _text(e["kind"], f"protections[{i}].kind"),
            )
        )

    raw_mappings = doc.get("mappings") or {}
    if not isinstance(raw_mappings, Mapping):
        raise RegistryParseError("mappings must be a mapping of threat id to protection id list")
    mappings = []
    for key, ids in raw_mappings.items():
        key = _text(key, "mappings key")
        if ids is None:
            ids = []
        if not isinstance(ids, list) or not all(isinstance(x, str) for x in ids):
            raise RegistryParseError(f"mappings.{key} must be a list of protection ids")
        mappings.append((key, tuple(ids)))

    elements: list[str] = []
    blocks = []
    raw_elements = doc.get("elements")
    if raw_elements is None:
        for t in threats:
            if t.target_element is not None and t.target_element not in elements:
                elements.append(t.target_element)
                blocks.append((t.target_element, ()))
    else:
        for i, item in enumerate(_seq(doc, "elements")):
            e = _entry(item, f"elements[{i}]", ("name",), ("secure_blocks",))
            name = _text(e["name"], f"elements[{i}].name")
            statements = e.get("secure_blocks") or []
            if not isinstance(statements, list) or not all(isinstance(s, str) for s in statements):
                raise RegistryParseError(f"elements[{i}].secure_blocks must be a list of strings")
            elements.append(name)
            blocks.append((name, tuple(statements)))

    return TraceRegistry(tuple(links), tuple(threats), tuple(protections), tuple(mappings), tuple(elements), tuple(blocks))


_STRICT_ERRORS: dict[str, type[RegistryError]] = {
    "malformed-id": RegistryParseError,
    "bad-domain": RegistryParseError,
    "bad-kind": RegistryParseError,
    "duplicate-id": DuplicateIdError,
    "duplicate-link": DuplicateIdError,
    "duplicate-element": DuplicateIdError,
    "dangling-threat": DanglingReferenceError,
    "dangling-protection": DanglingReferenceError,
    "unknown-element": DanglingReferenceError,
}


def load_registry(document: str | Mapping[str, Any] | None, strict: bool = True) -> TraceRegistry:
    """Parse a registry document (YAML text or an already-parsed mapping).

    With ``strict`` set, structural problems (malformed or duplicate ids,
    dangling references) raise. Traceability gaps never raise; use
    :func:`validate_traceability` for those. With ``strict`` off only
    unreadable documents raise, so a damaged registry can still be
    inspected.
    """
    if isinstance(document, str):
        try:
            document = yaml.safe_load(document)
        except yaml.YAMLError as exc:
            mark = getattr(exc, "problem_mark", None)
            if mark is not None:
                raise RegistryParseError("invalid YAML", mark.line + 1, mark.column + 1) from None
            raise RegistryParseError("invalid YAML") from None
    if document is None:
        document = {}
    if not isinstance(document, Mapping):
        raise RegistryParseError("registry document must be a mapping")
    registry = _build(document)
    if strict:
        for finding in _structural_findings(registry):
            error = _STRICT_ERRORS.get(finding.code)
            if error is not None:
                raise error(f"{finding.subject}: {finding.message}")
    return registry


def load_registry_file(path: str | os.PathLike[str], strict: bool = True) -> TraceRegistry:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise RegistryError(f"cannot read registry {path}: {exc.strerror or exc}") from None
    return load_registry(text, strict=strict)


def bundled_registry_text() -> str:
    return resources.files("fsosec").joinpath("data").joinpath("registry.yaml").read_text(encoding="utf-8")


def bundled_registry() -> TraceRegistry:
    return load_registry(bundled_registry_text())


def registry_document(registry: TraceRegistry) -> dict[str, Any]:
    """Canonical document form; ``load_registry`` of it gives ``registry`` back."""
    blocks = dict(registry.secure_blocks)
    return {
        "schema_version": SCHEMA_VERSION,
        "elements": [{"name": name, "secure_blocks": list(blocks.get(name, ()))} for name in registry.elements],
        "links": [{"direction": l.direction, "function": l.function.value, "description": l.description} for l in registry.links],
        "threats": [
            {"id": t.id, "domain": t.domain, "name": t.name, "target_element": t.target_element, "passive": t.passive}
            for t in registry.threats
        ],
        "protections": [{"id": p.id, "name": p.name, "kind": p.kind} for p in registry.protections],
        "mappings": {k: list(v) for k, v in registry.mappings},
    }


def dump_registry(registry: TraceRegistry) -> str:
    return yaml.safe_dump(registry_document(registry), sort_keys=False, allow_unicode=True, width=100)


# -- queries -----------------------------------------------------------------


def threats_for_element(registry: TraceRegistry, element: str) -> list[ThreatTechnique]:
    if element not in registry.elements:
        raise UnknownIdError(f"unknown technical element {element!r}")
    return [t for t in registry.threats if t.target_element == element]


def protections_for(registry: TraceRegistry, threat_id: str) -> list[ProtectionTechnique]:
    registry.threat(threat_id)
    ids = registry.mapping().get(threat_id, ())
    return [registry.protection(pid) for pid in ids]


# -- validation --------------------------------------------------------------


def _duplicates(values: list[str]) -> list[str]:
    seen: set[str] = set()
    dup: list[str] = []
    for v in values:
        if v in seen and v not in dup:
            dup.append(v)
        seen.add(v)
    return dup


def _structural_findings(registry: TraceRegistry) -> list[Finding]:
    out: list[Finding] = []
    err = lambda code, subject, message: out.append(Finding("error", code, subject, message))  # noqa: E731

    for t in registry.threats:
        if t.domain not in DOMAINS:
            err("bad-domain", t.id, f"domain must be cyber or environmental, got {t.domain!r}")
        elif t.domain == "environmental" and not ENVIRONMENTAL_ID.match(t.id):
            err("malformed-id", t.id, "environmental threat ids look like NAT-001")
        elif t.domain == "cyber" and not CYBER_ID.match(t.id):
            err("malformed-id", t.id, "cyber threat ids look like EXF-0003 or REC-0005.01")
    for p in registry.protections:
        if p.kind not in PROTECTION_KINDS:
            err("bad-kind", p.id, f"kind must be one of {', '.join(PROTECTION_KINDS)}, got {p.kind!r}")
        elif p.kind == "introduced" and not INTRODUCED_ID.match(p.id):
            err("malformed-id", p.id, "introduced protection ids look like PRO-001")
        elif p.kind == "sparta-countermeasure" and not COUNTERMEASURE_ID.match(p.id):
            err("malformed-id", p.id, "countermeasure ids look like CM0029")

    for dup in _duplicates([t.id for t in registry.threats] + [p.id for p in registry.protections]):
        err("duplicate-id", dup, "id declared more than once")
    for dup in _duplicates([k for k, _ in registry.mappings]):
        err("duplicate-id", dup, "threat mapped more than once")
    for dup in _duplicates(list(registry.elements)):
        err("duplicate-element", dup, "element declared more than once")
    seen_links: set[tuple[str, TtcFunction]] = set()
    for link in registry.links:
        key = (link.direction, link.function)
        if key in seen_links:
            err("duplicate-link", link.direction, f"{link.function.value} listed more than once")
        seen_links.add(key)

    threat_ids = {t.id for t in registry.threats}
    protection_ids = {p.id for p in registry.protections}
    for key, ids in registry.mappings:
        if key not in threat_ids:
            err("dangling-threat", key, "mapping key is not a declared threat")
        for pid in ids:
            if pid not in protection_ids:
                err("dangling-protection", key, f"maps to undeclared protection {pid}")
    for t in registry.threats:
        if t.target_element is not None and t.target_element not in registry.elements:
            err("unknown-element", t.id, f"targets undeclared element {t.target_element!r}")
    return out


def validate_traceability(registry: TraceRegistry) -> ValidationReport:
    """Check that every threat is targeted and protected, and all ids resolve.

    Unused protections are reported as informational findings only.
    """
    findings = _structural_findings(registry)
    mapping = registry.mapping()
    for t in registry.threats:
        if not t.target_element:
            findings.append(Finding("error", "missing-target", t.id, "threat has no target element"))
        if not mapping.get(t.id):
            findings.append(Finding("error", "unmapped-threat", t.id, "threat has no protection"))
    used = {pid for ids in mapping.values() for pid in ids}
    for p in registry.protections:
        if p.id not in used:
            findings.append(Finding("info", "unused-protection", p.id, "protection is not mapped to any threat"))
    return ValidationReport(tuple(findings))


def coverage_report(registry: TraceRegistry) -> dict[str, Any]:
    """Per-element threat/protection counts plus registry-wide totals."""
    mapping = registry.mapping()
    elements: dict[str, Any] = {}
    for name in registry.elements:
        threats = [t for t in registry.threats if t.target_element == name]
        protections: list[str] = []
        for t in threats:
            for pid in mapping.get(t.id, ()):
                if pid not in protections:
                    protections.append(pid)
        elements[name] = {
            "threats": len(threats),
            "by_domain": {d: sum(t.domain == d for t in threats) for d in DOMAINS},
            "protections": len(protections),
            "protection_ids": protections,
            "unmapped_threats": [t.id for t in threats if not mapping.get(t.id)],
        }
    used = {pid for ids in mapping.values() for pid in ids}
    return {
        "totals": {
            "links": len(registry.links),
            "threats": len(registry.threats),
            "protections": len(registry.protections),
            "mappings": len(registry.mappings),
            "threats_by_domain": {d: sum(t.domain == d for t in registry.threats) for d in DOMAINS},
            "passive_threats": sum(t.passive for t in registry.threats),
        },
        "elements": elements,
        "untargeted_threats": [t.id for t in registry.threats if not t.target_element],
        "unmapped_threats": [t.id for t in registry.threats if not mapping.get(t.id)],
        "unused_protections": [p.id for p in registry.protections if p.id not in used],
    }


def coverage_text(report: Mapping[str, Any]) -> str:
    totals = report["totals"]
    by_domain = ", ".join(f"{d} {n}" for d, n in totals["threats_by_domain"].items())
    lines = [
        f"links {totals['links']}, threats {totals['threats']} ({by_domain}), protections {totals['protections']}",
    ]
    for name, e in report["elements"].items():
        lines.append(
            f"{name}: {e['threats']} threats ({', '.join(f'{d} {n}' for d, n in e['by_domain'].items())}), "
            f"{e['protections']} protections"
        )
    for key in ("untargeted_threats", "unmapped_threats", "unused_protections"):
        if report[key]:
            lines.append(f"{key.replace('_', ' ')}: {', '.join(report[key])}")
    return "\n".join(lines) + "\n"
