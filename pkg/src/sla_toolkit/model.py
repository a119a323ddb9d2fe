"""Constraint and SLA structure types, plus single-constraint rule checks.

A constraint binds one catalog metric, within one scope, to a priority,
a comparison operator, a threshold value, and a unit. Rule violations are
reported as :class:`Finding` values with codes from the closed registry
below; whole-document validation composes these (see
:mod:`sla_toolkit.workflow` and :mod:`sla_toolkit.composer`).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from datetime import datetime, timezone

from .catalog import OPERATORS, MetricDefinition
from .errors import (
    ConstraintError,
    EnumValueUnknown,
    OperatorNotAllowed,
    UnitMismatch,
    ValueOutOfRange,
    ValueTypeMismatch,
)

PRIORITIES = ("high", "normal", "low")
SCOPES = ("application", "activity", "layer", "model")

SEVERITY_ERROR = "error"
SEVERITY_WARNING = "warning"

# Closed finding-code registry (v1).
FINDING_CODES = frozenset(
    {
        "OPERATOR_NOT_ALLOWED",
        "VALUE_OUT_OF_RANGE",
        "VALUE_TYPE_MISMATCH",
        "UNIT_MISMATCH",
        "ENUM_VALUE_UNKNOWN",
        "UNKNOWN_METRIC",
        "UNKNOWN_ACTIVITY",
        "DUPLICATE_NODE_ID",
        "DANGLING_EDGE",
        "WORKFLOW_CYCLE",
        "EMPTY_WORKFLOW",
        "WINDOW_INVERTED",
        "SCHEMA_VERSION_UNSUPPORTED",
        "MAPPING_MISMATCH",
    }
)

ConstraintValue = int | float | str | bool

_CONSTRAINT_EXCEPTIONS: dict[str, type[ConstraintError]] = {
    "OPERATOR_NOT_ALLOWED": OperatorNotAllowed,
    "VALUE_OUT_OF_RANGE": ValueOutOfRange,
    "VALUE_TYPE_MISMATCH": ValueTypeMismatch,
    "UNIT_MISMATCH": UnitMismatch,
    "ENUM_VALUE_UNKNOWN": EnumValueUnknown,
}


@dataclass(frozen=True, slots=True)
class Finding:
    """One machine-readable validation result."""

    code: str
    severity: str
    path: str
    message: str

    def __post_init__(self) -> None:
        if self.code not in FINDING_CODES:
            raise ValueError(f"finding code {self.code!r} is not in the registry")
        if self.severity not in (SEVERITY_ERROR, SEVERITY_WARNING):
            raise ValueError(f"unknown severity {self.severity!r}")

    def at(self, path: str) -> Finding:
        """Copy of this finding anchored at ``path``."""
        return replace(self, path=path)

    def to_json_dict(self) -> dict:
        return {
            "code": self.code,
            "severity": self.severity,
            "path": self.path,
            "message": self.message,
        }


@dataclass(frozen=True, slots=True)
class Constraint:
    """A user-specified bound on one metric within one scope."""

    metric_id: str
    scope: str
    priority: str
    operator: str
    value: ConstraintValue
    unit: str = ""

    def __post_init__(self) -> None:
        if self.scope not in SCOPES:
            raise ValueError(f"scope must be one of {SCOPES}, got {self.scope!r}")
        if self.priority not in PRIORITIES:
            raise ValueError(f"priority must be one of {PRIORITIES}, got {self.priority!r}")
        if self.operator not in OPERATORS:
            raise ValueError(f"operator must be one of {OPERATORS}, got {self.operator!r}")


@dataclass(frozen=True, slots=True)
class SlaHeader:
    """Application type plus the agreement window (UTC, start < end)."""

    application_type: str
    agreement_start: datetime
    agreement_end: datetime

    def __post_init__(self) -> None:
        for label, ts in (("agreement_start", self.agreement_start),
                          ("agreement_end", self.agreement_end)):
            if ts.tzinfo is None or ts.utcoffset() != timezone.utc.utcoffset(None):
                raise ValueError(f"{label} must be timezone-aware UTC")


def _error(code: str, message: str) -> Finding:
    return Finding(code=code, severity=SEVERITY_ERROR, path="", message=message)


def _value_type_matches(value_type: str, value: ConstraintValue) -> bool:
    # bool is an int subclass; test it first so True never passes as numeric.
    if isinstance(value, bool):
        return value_type == "boolean"
    if isinstance(value, (int, float)):
        return value_type in ("numeric", "percentage")
    if isinstance(value, str):
        return value_type in ("enum", "string")
    return False


def check_constraint(definition: MetricDefinition, constraint: Constraint) -> list[Finding]:
    """Check one constraint against its metric definition.

    Pure; returns one finding per violated rule (empty list when all
    hold), sorted by (path, code). Findings carry an empty path — callers
    anchor them with :meth:`Finding.at`.
    """
    findings: list[Finding] = []

    if constraint.operator not in definition.allowed_operators:
        findings.append(
            _error(
                "OPERATOR_NOT_ALLOWED",
                f"operator {constraint.operator!r} not allowed for metric "
                f"{definition.metric_id!r} (allowed: {'|'.join(definition.allowed_operators)})",
            )
        )

    if not _value_type_matches(definition.value_type, constraint.value):
        findings.append(
            _error(
                "VALUE_TYPE_MISMATCH",
                f"metric {definition.metric_id!r} expects a {definition.value_type} value, "
                f"got {constraint.value!r}",
            )
        )
    else:
        if definition.value_type in ("numeric", "percentage") and definition.has_range:
            low, high = definition.range_min, definition.range_max
            if (low is not None and constraint.value < low) or (
                high is not None and constraint.value > high
            ):
                bounds = f"[{'-inf' if low is None else low}, {'inf' if high is None else high}]"
                findings.append(
                    _error(
                        "VALUE_OUT_OF_RANGE",
                        f"value {constraint.value!r} outside range {bounds} "
                        f"of metric {definition.metric_id!r}",
                    )
                )
        if definition.value_type == "enum" and constraint.value not in (
            definition.enum_values or ()
        ):
            findings.append(
                _error(
                    "ENUM_VALUE_UNKNOWN",
                    f"value {constraint.value!r} not one of "
                    f"{'|'.join(definition.enum_values or ())} "
                    f"for metric {definition.metric_id!r}",
                )
            )

    if constraint.unit != definition.unit:
        findings.append(
            _error(
                "UNIT_MISMATCH",
                f"metric {definition.metric_id!r} uses unit {definition.unit!r}, "
                f"got {constraint.unit!r}",
            )
        )

    findings.sort(key=lambda f: (f.path, f.code))
    return findings


def make_constraint(
    definition: MetricDefinition,
    scope: str,
    priority: str,
    operator: str,
    value: ConstraintValue,
    unit: str = "",
) -> Constraint:
    """Build a constraint, raising the typed error for the first violated rule.

    Succeeds exactly when :func:`check_constraint` returns no findings for
    the same inputs.
    """
    constraint = Constraint(
        metric_id=definition.metric_id,
        scope=scope,
        priority=priority,
        operator=operator,
        value=value,
        unit=unit,
    )
    findings = check_constraint(definition, constraint)
    if findings:
        first = findings[0]
        raise _CONSTRAINT_EXCEPTIONS[first.code](first.message)
    return constraint
