"""SLA document assembly, validation, and canonical JSON (de)serialization.

Canonical form (the single byte representation used for golden files and
content-derived ids):

- UTF-8, no insignificant whitespace, ``ensure_ascii`` off;
- fixed key order: ``schema_version``, ``application`` (``type``,
  ``agreement_start``, ``agreement_end``), ``slos``, ``workflow``
  (``activities``, ``edges``); constraint objects use ``metric_id``,
  ``priority``, ``operator``, ``value``, ``unit``; activity objects use
  ``id``, ``name``, ``deployment_layer``, ``programming_model``,
  ``constraints``;
- activities emitted in topological order, constraints and edges in
  input order;
- numbers in Python's shortest round-trip decimal form;
- timestamps as ISO-8601 UTC with a trailing ``Z``.

:func:`parse` accepts any JSON matching the schema regardless of key
order or whitespace and rejects unknown fields, so
``parse(serialize_canonical(d))`` structurally equals ``d``.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Any, Sequence

from .catalog import OPERATORS, Catalog
from .errors import (
    JsonSyntaxError,
    SchemaShapeError,
    SchemaVersionUnsupported,
    WindowInverted,
)
from .model import (
    PRIORITIES,
    SEVERITY_ERROR,
    Constraint,
    Finding,
    SlaHeader,
    check_constraint,
)
from .workflow import ActivityNode, Workflow, topological_order, validate_workflow

SCHEMA_VERSION = "1.0"

_TIMESTAMP_RE = re.compile(
    r"^(\d{4})-(\d{2})-(\d{2})T(\d{2}):(\d{2}):(\d{2})(?:\.(\d{1,6}))?Z$"
)


@dataclass(frozen=True, slots=True)
class SlaDocument:
    """Header + application-level SLOs + bound workflow."""

    schema_version: str
    header: SlaHeader
    app_slos: tuple[Constraint, ...]
    workflow: Workflow


@dataclass(frozen=True, slots=True)
class ValidationReport:
    """Findings sorted by (path, code); valid iff none has severity error."""

    findings: tuple[Finding, ...]
    valid: bool

    @classmethod
    def from_findings(cls, findings: Sequence[Finding]) -> "ValidationReport":
        ordered = tuple(sorted(findings, key=lambda f: (f.path, f.code)))
        return cls(
            findings=ordered,
            valid=not any(f.severity == SEVERITY_ERROR for f in ordered),
        )

    def to_json_dict(self) -> dict:
        return {"valid": self.valid, "findings": [f.to_json_dict() for f in self.findings]}


def parse_timestamp(text: str) -> datetime:
    """Parse an ISO-8601 UTC timestamp with a trailing Z (only form accepted)."""
    match = _TIMESTAMP_RE.match(text)
    if not match:
        raise ValueError(
            f"timestamp {text!r} must be ISO-8601 UTC with a trailing Z, "
            f"e.g. 2024-01-01T00:00:00Z"
        )
    year, month, day, hour, minute, second = (int(g) for g in match.groups()[:6])
    fraction = match.group(7)
    microsecond = int(fraction.ljust(6, "0")) if fraction else 0
    return datetime(year, month, day, hour, minute, second, microsecond, tzinfo=timezone.utc)


def format_timestamp(ts: datetime) -> str:
    """Canonical rendering: seconds precision, microseconds only when nonzero."""
    base = ts.strftime("%Y-%m-%dT%H:%M:%S")
    if ts.microsecond:
        return f"{base}.{ts.microsecond:06d}Z"
    return f"{base}Z"


def compose(
    header: SlaHeader, app_slos: Sequence[Constraint], workflow: Workflow
) -> SlaDocument:
    """Assemble a document at the current schema version.

    Raises WindowInverted unless agreement_start < agreement_end.
    """
    if header.agreement_start >= header.agreement_end:
        raise WindowInverted(
            f"agreement_start {format_timestamp(header.agreement_start)} is not before "
            f"agreement_end {format_timestamp(header.agreement_end)}"
        )
    return SlaDocument(
        schema_version=SCHEMA_VERSION,
        header=header,
        app_slos=tuple(app_slos),
        workflow=workflow,
    )


def validate_document(catalog: Catalog, doc: SlaDocument) -> ValidationReport:
    """Aggregate header, app-SLO, and workflow findings; deterministic order."""
    findings: list[Finding] = []

    if doc.schema_version != SCHEMA_VERSION:
        findings.append(
            Finding(
                code="SCHEMA_VERSION_UNSUPPORTED",
                severity=SEVERITY_ERROR,
                path="schema_version",
                message=f"schema_version {doc.schema_version!r} is not supported "
                f"(expected {SCHEMA_VERSION!r})",
            )
        )
    if doc.header.agreement_start >= doc.header.agreement_end:
        findings.append(
            Finding(
                code="WINDOW_INVERTED",
                severity=SEVERITY_ERROR,
                path="header",
                message="agreement_start must be strictly before agreement_end",
            )
        )

    app_metrics = {m.metric_id: m for m in catalog.application_slos}
    for i, constraint in enumerate(doc.app_slos):
        path = f"app_slos[{i}]"
        definition = app_metrics.get(constraint.metric_id)
        if definition is None:
            findings.append(
                Finding(
                    code="UNKNOWN_METRIC",
                    severity=SEVERITY_ERROR,
                    path=path,
                    message=f"metric {constraint.metric_id!r} is not an application-level SLO",
                )
            )
            continue
        findings.extend(f.at(path) for f in check_constraint(definition, constraint))

    findings.extend(validate_workflow(catalog, doc.workflow))
    return ValidationReport.from_findings(findings)


# --- canonical serialization ---


def _constraint_json(constraint: Constraint) -> dict:
    return {
        "metric_id": constraint.metric_id,
        "priority": constraint.priority,
        "operator": constraint.operator,
        "value": constraint.value,
        "unit": constraint.unit,
    }


def _node_json(node: ActivityNode) -> dict:
    if node.deployment_layer is None:
        raise ValueError(
            f"node {node.node_id!r} is not bound to a deployment layer; "
            f"serialize only documents that validate cleanly"
        )
    model: dict | None = None
    if node.programming_model is not None:
        model = {
            "name": node.programming_model,
            "constraints": [_constraint_json(c) for c in node.model_constraints],
        }
    return {
        "id": node.node_id,
        "name": node.activity_name,
        "deployment_layer": {
            "name": node.deployment_layer,
            "constraints": [_constraint_json(c) for c in node.layer_constraints],
        },
        "programming_model": model,
        "constraints": [_constraint_json(c) for c in node.activity_constraints],
    }


def document_to_json_dict(doc: SlaDocument) -> dict:
    """The document as nested dicts in canonical key order."""
    nodes_by_id = {node.node_id: node for node in doc.workflow.nodes}
    if len(nodes_by_id) != len(doc.workflow.nodes):
        raise ValueError("workflow has duplicate node ids; serialize valid documents only")
    order = topological_order(doc.workflow)
    return {
        "schema_version": doc.schema_version,
        "application": {
            "type": doc.header.application_type,
            "agreement_start": format_timestamp(doc.header.agreement_start),
            "agreement_end": format_timestamp(doc.header.agreement_end),
        },
        "slos": [_constraint_json(c) for c in doc.app_slos],
        "workflow": {
            "activities": [_node_json(nodes_by_id[node_id]) for node_id in order],
            "edges": [{"from": src, "to": dst} for src, dst in doc.workflow.edges],
        },
    }


def serialize_canonical(doc: SlaDocument) -> bytes:
    """Byte-deterministic canonical JSON; see the module docstring.

    The caller is responsible for the document being valid per
    :func:`validate_document`; the serializer does not re-validate.
    """
    return json.dumps(
        document_to_json_dict(doc),
        ensure_ascii=False,
        separators=(",", ":"),
        allow_nan=False,
    ).encode("utf-8")


def document_id(doc: SlaDocument) -> str:
    """Lowercase hex SHA-256 of the canonical bytes; stable across processes."""
    return hashlib.sha256(serialize_canonical(doc)).hexdigest()


# --- parsing ---


def _shape(path: str, message: str) -> SchemaShapeError:
    return SchemaShapeError(path, message)


def _require_object(value: Any, path: str, keys: tuple[str, ...]) -> dict:
    if not isinstance(value, dict):
        raise _shape(path, f"expected an object, got {type(value).__name__}")
    missing = [k for k in keys if k not in value]
    if missing:
        raise _shape(path, f"missing required field(s): {', '.join(missing)}")
    extra = [k for k in value if k not in keys]
    if extra:
        raise _shape(path, f"unexpected field(s): {', '.join(extra)}")
    return value


def _require_string(value: Any, path: str, *, nonempty: bool = False) -> str:
    if not isinstance(value, str):
        raise _shape(path, f"expected a string, got {type(value).__name__}")
    if nonempty and not value:
        raise _shape(path, "must not be empty")
    return value


def _require_array(value: Any, path: str) -> list:
    if not isinstance(value, list):
        raise _shape(path, f"expected an array, got {type(value).__name__}")
    return value


def _parse_ts_field(obj: dict, key: str, path: str) -> datetime:
    text = _require_string(obj[key], f"{path}.{key}")
    try:
        return parse_timestamp(text)
    except ValueError as exc:
        raise _shape(f"{path}.{key}", str(exc)) from None


def _parse_constraint(value: Any, path: str, scope: str) -> Constraint:
    obj = _require_object(value, path, ("metric_id", "priority", "operator", "value", "unit"))
    metric_id = _require_string(obj["metric_id"], f"{path}.metric_id", nonempty=True)
    priority = _require_string(obj["priority"], f"{path}.priority")
    if priority not in PRIORITIES:
        raise _shape(f"{path}.priority", f"must be one of {'|'.join(PRIORITIES)}")
    operator = _require_string(obj["operator"], f"{path}.operator")
    if operator not in OPERATORS:
        raise _shape(f"{path}.operator", f"must be one of {'|'.join(OPERATORS)}")
    raw = obj["value"]
    if not isinstance(raw, (bool, int, float, str)):
        raise _shape(f"{path}.value", "must be a number, string, or boolean")
    unit = _require_string(obj["unit"], f"{path}.unit")
    return Constraint(
        metric_id=metric_id,
        scope=scope,
        priority=priority,
        operator=operator,
        value=raw,
        unit=unit,
    )


def _parse_binding(value: Any, path: str, scope: str) -> tuple[str, tuple[Constraint, ...]]:
    obj = _require_object(value, path, ("name", "constraints"))
    name = _require_string(obj["name"], f"{path}.name", nonempty=True)
    constraints = tuple(
        _parse_constraint(c, f"{path}.constraints[{j}]", scope)
        for j, c in enumerate(_require_array(obj["constraints"], f"{path}.constraints"))
    )
    return name, constraints


def _parse_node(value: Any, path: str) -> ActivityNode:
    obj = _require_object(
        value, path, ("id", "name", "deployment_layer", "programming_model", "constraints")
    )
    node_id = _require_string(obj["id"], f"{path}.id", nonempty=True)
    name = _require_string(obj["name"], f"{path}.name", nonempty=True)
    layer_name, layer_constraints = _parse_binding(
        obj["deployment_layer"], f"{path}.deployment_layer", "layer"
    )
    model_name: str | None = None
    model_constraints: tuple[Constraint, ...] = ()
    if obj["programming_model"] is not None:
        model_name, model_constraints = _parse_binding(
            obj["programming_model"], f"{path}.programming_model", "model"
        )
    activity_constraints = tuple(
        _parse_constraint(c, f"{path}.constraints[{j}]", "activity")
        for j, c in enumerate(_require_array(obj["constraints"], f"{path}.constraints"))
    )
    return ActivityNode(
        node_id=node_id,
        activity_name=name,
        deployment_layer=layer_name,
        programming_model=model_name,
        activity_constraints=activity_constraints,
        layer_constraints=layer_constraints,
        model_constraints=model_constraints,
    )


def _reject_constant(text: str) -> float:
    raise ValueError(f"non-finite number {text} is not valid JSON")


def parse(data: bytes | str) -> SlaDocument:
    """Parse a full SLA document, tolerant of key order and whitespace only.

    Raises JsonSyntaxError for malformed JSON, SchemaVersionUnsupported for
    a version this toolkit cannot read, and SchemaShapeError (with a path)
    for missing/extra/ill-typed fields.
    """
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise JsonSyntaxError(f"input is not valid UTF-8: {exc}") from None
    try:
        root = json.loads(data, parse_constant=_reject_constant)
    except ValueError as exc:
        raise JsonSyntaxError(str(exc)) from None

    obj = _require_object(root, "$", ("schema_version", "application", "slos", "workflow"))
    version = _require_string(obj["schema_version"], "$.schema_version")
    if version != SCHEMA_VERSION:
        raise SchemaVersionUnsupported(
            f"schema_version {version!r} is not supported (expected {SCHEMA_VERSION!r})"
        )

    app = _require_object(
        obj["application"], "$.application", ("type", "agreement_start", "agreement_end")
    )
    header = SlaHeader(
        application_type=_require_string(app["type"], "$.application.type"),
        agreement_start=_parse_ts_field(app, "agreement_start", "$.application"),
        agreement_end=_parse_ts_field(app, "agreement_end", "$.application"),
    )

    app_slos = tuple(
        _parse_constraint(c, f"$.slos[{i}]", "application")
        for i, c in enumerate(_require_array(obj["slos"], "$.slos"))
    )

    wf = _require_object(obj["workflow"], "$.workflow", ("activities", "edges"))
    nodes = tuple(
        _parse_node(n, f"$.workflow.activities[{i}]")
        for i, n in enumerate(_require_array(wf["activities"], "$.workflow.activities"))
    )
    edges = []
    for k, e in enumerate(_require_array(wf["edges"], "$.workflow.edges")):
        edge = _require_object(e, f"$.workflow.edges[{k}]", ("from", "to"))
        edges.append(
            (
                _require_string(edge["from"], f"$.workflow.edges[{k}].from", nonempty=True),
                _require_string(edge["to"], f"$.workflow.edges[{k}].to", nonempty=True),
            )
        )

    return SlaDocument(
        schema_version=version,
        header=header,
        app_slos=app_slos,
        workflow=Workflow(nodes=nodes, edges=tuple(edges)),
    )
