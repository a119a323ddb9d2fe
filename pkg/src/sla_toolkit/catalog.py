"""Metric/activity schema catalog: the extensible vocabulary source.

A catalog is a directory of UTF-8, RFC-4180 CSV tables:

- ``manifest.csv`` — ``activity,file,deployment_layer,programming_model``;
  row order defines activity order, ``programming_model`` may be empty.
- ``activities/<file>.csv`` — one metric table per activity (may be
  header-only when the activity carries no metrics of its own).
- ``resources/<resource_id>.csv`` — metric table per deployment layer or
  programming model; line 1 is ``#kind=deployment_layer`` or
  ``#kind=programming_model``, the header follows on line 2.
- ``application.csv`` — application-level SLO metric definitions.
- ``catalog.txt`` — single-line version string.

Metric tables share one header:
``metric_id,display_name,category,value_type,unit,range_min,range_max,enum_values,allowed_operators``
where ``enum_values`` and ``allowed_operators`` are pipe-separated and
empty optional cells are the empty string. An empty ``range_min`` or
``range_max`` on a numeric metric means that side is unbounded.

Loading is a pure function of the directory snapshot; a loaded
:class:`Catalog` is immutable and safe to share across threads. New
activities, layers, and models are added by editing the files only.
"""

from __future__ import annotations

import csv
import re
from dataclasses import dataclass
from importlib import resources as importlib_resources
from pathlib import Path

from .errors import (
    ActivityNotFound,
    CatalogNotFound,
    DanglingReference,
    DuplicateIdentifier,
    EmptyCatalog,
    TableParseError,
)

IDENTIFIER_RE = re.compile(r"^[a-z][a-z0-9_]*$")

CATEGORIES = frozenset({"slo", "config"})
VALUE_TYPES = frozenset({"numeric", "percentage", "enum", "boolean", "string"})
OPERATORS = ("lt", "lte", "gt", "gte", "eq", "neq")
EQUALITY_OPERATORS = frozenset({"eq", "neq"})

KIND_DEPLOYMENT_LAYER = "deployment_layer"
KIND_PROGRAMMING_MODEL = "programming_model"
RESOURCE_KINDS = frozenset({KIND_DEPLOYMENT_LAYER, KIND_PROGRAMMING_MODEL})

_METRIC_HEADER = [
    "metric_id",
    "display_name",
    "category",
    "value_type",
    "unit",
    "range_min",
    "range_max",
    "enum_values",
    "allowed_operators",
]
_MANIFEST_HEADER = ["activity", "file", "deployment_layer", "programming_model"]


@dataclass(frozen=True, slots=True)
class MetricDefinition:
    """One catalog row: a named SLO or configuration metric.

    ``unit`` is a free-text label; the empty string means unitless.
    ``range_min``/``range_max`` apply to numeric and percentage metrics
    only, with ``None`` meaning unbounded on that side. Percentage metrics
    must carry explicit bounds within [0, 100].
    """

    metric_id: str
    display_name: str
    category: str
    value_type: str
    unit: str = ""
    range_min: float | None = None
    range_max: float | None = None
    enum_values: tuple[str, ...] | None = None
    allowed_operators: tuple[str, ...] = OPERATORS

    def __post_init__(self) -> None:
        if not IDENTIFIER_RE.match(self.metric_id):
            raise ValueError(f"metric_id {self.metric_id!r} is not lowercase snake_case")
        if self.category not in CATEGORIES:
            raise ValueError(f"category must be one of {sorted(CATEGORIES)}, got {self.category!r}")
        if self.value_type not in VALUE_TYPES:
            raise ValueError(
                f"value_type must be one of {sorted(VALUE_TYPES)}, got {self.value_type!r}"
            )
        if not self.allowed_operators:
            raise ValueError("allowed_operators must not be empty")
        unknown = [op for op in self.allowed_operators if op not in OPERATORS]
        if unknown:
            raise ValueError(f"unknown operators {unknown}")
        if len(set(self.allowed_operators)) != len(self.allowed_operators):
            raise ValueError("allowed_operators contains duplicates")

        if self.value_type in ("numeric", "percentage"):
            if self.enum_values is not None:
                raise ValueError("enum_values only apply to enum metrics")
            if self.range_min is not None and self.range_max is not None:
                if self.range_min > self.range_max:
                    raise ValueError("range_min must not exceed range_max")
            if self.value_type == "percentage":
                if self.range_min is None or self.range_max is None:
                    raise ValueError("percentage metrics require explicit range bounds")
                if self.range_min < 0 or self.range_max > 100:
                    raise ValueError("percentage range must lie within [0, 100]")
        else:
            if self.range_min is not None or self.range_max is not None:
                raise ValueError(f"{self.value_type} metrics cannot define a numeric range")
            bad_ops = [op for op in self.allowed_operators if op not in EQUALITY_OPERATORS]
            if bad_ops:
                raise ValueError(f"{self.value_type} metrics only allow eq/neq, got {bad_ops}")
            if self.value_type == "enum":
                if not self.enum_values:
                    raise ValueError("enum metrics require non-empty enum_values")
                if len(set(self.enum_values)) != len(self.enum_values):
                    raise ValueError("enum_values contains duplicates")
            elif self.enum_values is not None:
                raise ValueError("enum_values only apply to enum metrics")

    @property
    def has_range(self) -> bool:
        return self.range_min is not None or self.range_max is not None

    def to_json_dict(self) -> dict:
        return {
            "metric_id": self.metric_id,
            "display_name": self.display_name,
            "category": self.category,
            "value_type": self.value_type,
            "unit": self.unit,
            "range_min": self.range_min,
            "range_max": self.range_max,
            "enum_values": list(self.enum_values) if self.enum_values else None,
            "allowed_operators": list(self.allowed_operators),
        }


@dataclass(frozen=True, slots=True)
class ResourceSchema:
    """A deployment layer or programming model with its metric vocabulary."""

    resource_id: str
    kind: str
    display_name: str
    metrics: tuple[MetricDefinition, ...]

    def __post_init__(self) -> None:
        if not IDENTIFIER_RE.match(self.resource_id):
            raise ValueError(f"resource_id {self.resource_id!r} is not lowercase snake_case")
        if self.kind not in RESOURCE_KINDS:
            raise ValueError(f"kind must be one of {sorted(RESOURCE_KINDS)}, got {self.kind!r}")
        _require_unique_metric_ids(self.metrics, f"resource {self.resource_id!r}")


@dataclass(frozen=True, slots=True)
class ActivityDefinition:
    """A workflow activity with its layer/model mapping and own metrics."""

    activity_name: str
    deployment_layer: str
    programming_model: str | None
    own_metrics: tuple[MetricDefinition, ...]

    def __post_init__(self) -> None:
        if not self.activity_name:
            raise ValueError("activity_name must not be empty")
        _require_unique_metric_ids(self.own_metrics, f"activity {self.activity_name!r}")


@dataclass(frozen=True, slots=True)
class Catalog:
    """A fully resolved, immutable catalog snapshot."""

    activities: dict[str, ActivityDefinition]
    resources: dict[str, ResourceSchema]
    application_slos: tuple[MetricDefinition, ...]
    version: str


@dataclass(frozen=True, slots=True)
class ActivitySchema:
    """An activity merged with the metric vocabularies of its scopes.

    Metric identity within the merged view is the pair (scope, metric_id);
    the same metric_id in two scopes does not collide.
    """

    activity_name: str
    deployment_layer: str
    programming_model: str | None
    activity_metrics: tuple[MetricDefinition, ...]
    layer_metrics: tuple[MetricDefinition, ...]
    model_metrics: tuple[MetricDefinition, ...]

    def metric(self, scope: str, metric_id: str) -> MetricDefinition | None:
        """Look up a metric definition by (scope, metric_id); None if absent."""
        group = {
            "activity": self.activity_metrics,
            "layer": self.layer_metrics,
            "model": self.model_metrics,
        }.get(scope)
        if group is None:
            raise ValueError(f"unknown scope {scope!r}")
        for definition in group:
            if definition.metric_id == metric_id:
                return definition
        return None

    def to_json_dict(self) -> dict:
        return {
            "name": self.activity_name,
            "deployment_layer": self.deployment_layer,
            "programming_model": self.programming_model,
            "metrics": {
                "activity": [m.to_json_dict() for m in self.activity_metrics],
                "layer": [m.to_json_dict() for m in self.layer_metrics],
                "model": [m.to_json_dict() for m in self.model_metrics],
            },
        }


def _require_unique_metric_ids(metrics: tuple[MetricDefinition, ...], owner: str) -> None:
    seen: set[str] = set()
    for m in metrics:
        if m.metric_id in seen:
            raise ValueError(f"duplicate metric_id {m.metric_id!r} in {owner}")
        seen.add(m.metric_id)


def _split_cell(cell: str) -> tuple[str, ...]:
    return tuple(part for part in cell.split("|") if part) if cell else ()


def _parse_bound(cell: str, column: str) -> float | None:
    if cell == "":
        return None
    try:
        value = float(cell)
    except ValueError:
        raise ValueError(f"{column} must be a number or empty, got {cell!r}") from None
    if value != value or value in (float("inf"), float("-inf")):
        raise ValueError(f"{column} must be finite, got {cell!r}")
    return value


def _parse_metric_row(row: dict[str, str]) -> MetricDefinition:
    enum_values = _split_cell(row["enum_values"])
    return MetricDefinition(
        metric_id=row["metric_id"],
        display_name=row["display_name"],
        category=row["category"],
        value_type=row["value_type"],
        unit=row["unit"],
        range_min=_parse_bound(row["range_min"], "range_min"),
        range_max=_parse_bound(row["range_max"], "range_max"),
        enum_values=enum_values or None,
        allowed_operators=_split_cell(row["allowed_operators"]),
    )


def _read_rows(path: Path, expected_header: list[str], *, skip_comment: bool = False):
    """Yield (line_number, row_dict) pairs after validating the header."""
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise CatalogNotFound(f"missing catalog file: {path}") from None
    except UnicodeDecodeError as exc:
        raise TableParseError(path.name, 0, f"not valid UTF-8: {exc}") from None

    lines = text.splitlines()
    offset = 0
    kind = None
    if skip_comment:
        if not lines or not lines[0].startswith("#kind="):
            raise TableParseError(path.name, 1, "resource tables must start with a #kind= comment")
        kind = lines[0][len("#kind=") :].strip()
        offset = 1

    reader = csv.reader(lines[offset:], strict=True)
    try:
        header = next(reader)
    except StopIteration:
        raise TableParseError(path.name, offset + 1, "missing header row") from None
    except csv.Error as exc:
        raise TableParseError(path.name, offset + 1, f"malformed CSV: {exc}") from None
    if header != expected_header:
        raise TableParseError(
            path.name, offset + 1, f"expected header {expected_header}, got {header}"
        )

    rows = []
    try:
        for i, record in enumerate(reader, start=offset + 2):
            if not record:
                continue
            if len(record) != len(expected_header):
                raise TableParseError(
                    path.name, i, f"expected {len(expected_header)} cells, got {len(record)}"
                )
            rows.append((i, dict(zip(expected_header, record))))
    except csv.Error as exc:
        raise TableParseError(
            path.name, offset + reader.line_num, f"malformed CSV: {exc}"
        ) from None
    return kind, rows


def _load_metric_table(path: Path, *, skip_comment: bool = False):
    kind, rows = _read_rows(path, _METRIC_HEADER, skip_comment=skip_comment)
    metrics: list[MetricDefinition] = []
    seen: set[str] = set()
    for line, row in rows:
        try:
            metric = _parse_metric_row(row)
        except ValueError as exc:
            raise TableParseError(path.name, line, str(exc)) from None
        if metric.metric_id in seen:
            raise DuplicateIdentifier(
                f"{path.name}:{line}: duplicate metric_id {metric.metric_id!r}"
            )
        seen.add(metric.metric_id)
        metrics.append(metric)
    return kind, tuple(metrics)


def load_catalog(root_path: str | Path) -> Catalog:
    """Load and fully resolve the catalog under ``root_path``.

    Deterministic: two loads of the same directory yield structurally
    equal catalogs. Raises a typed error rather than ever returning a
    partially valid catalog.
    """
    root = Path(root_path)
    manifest_path = root / "manifest.csv"
    if not root.is_dir():
        raise CatalogNotFound(f"catalog root does not exist: {root}")
    if not manifest_path.is_file():
        raise CatalogNotFound(f"missing manifest: {manifest_path}")

    version_path = root / "catalog.txt"
    if not version_path.is_file():
        raise CatalogNotFound(f"missing version file: {version_path}")
    try:
        version = version_path.read_text(encoding="utf-8").strip()
    except UnicodeDecodeError as exc:
        raise TableParseError(version_path.name, 1, f"not valid UTF-8: {exc}") from None

    resources: dict[str, ResourceSchema] = {}
    resources_dir = root / "resources"
    if resources_dir.is_dir():
        for path in sorted(resources_dir.glob("*.csv")):
            resource_id = path.stem
            kind, metrics = _load_metric_table(path, skip_comment=True)
            if kind not in RESOURCE_KINDS:
                raise TableParseError(path.name, 1, f"unknown resource kind {kind!r}")
            try:
                schema = ResourceSchema(
                    resource_id=resource_id,
                    kind=kind,
                    display_name=resource_id.replace("_", " ").capitalize(),
                    metrics=metrics,
                )
            except ValueError as exc:
                raise TableParseError(path.name, 1, str(exc)) from None
            resources[resource_id] = schema

    _, manifest_rows = _read_rows(manifest_path, _MANIFEST_HEADER)
    if not manifest_rows:
        raise EmptyCatalog(f"{manifest_path} defines zero activities")

    activities: dict[str, ActivityDefinition] = {}
    for line, row in manifest_rows:
        name = row["activity"]
        if not name:
            raise TableParseError(manifest_path.name, line, "activity name must not be empty")
        if name in activities:
            raise DuplicateIdentifier(f"duplicate activity name {name!r} in manifest")
        layer_id = row["deployment_layer"]
        model_id = row["programming_model"] or None

        layer = resources.get(layer_id)
        if layer is None or layer.kind != KIND_DEPLOYMENT_LAYER:
            raise DanglingReference(
                f"activity {name!r} names deployment_layer {layer_id!r}, "
                f"which is not a deployment_layer resource"
            )
        if model_id is not None:
            model = resources.get(model_id)
            if model is None or model.kind != KIND_PROGRAMMING_MODEL:
                raise DanglingReference(
                    f"activity {name!r} names programming_model {model_id!r}, "
                    f"which is not a programming_model resource"
                )

        _, own_metrics = _load_metric_table(root / "activities" / row["file"])
        try:
            activities[name] = ActivityDefinition(
                activity_name=name,
                deployment_layer=layer_id,
                programming_model=model_id,
                own_metrics=own_metrics,
            )
        except ValueError as exc:
            raise TableParseError(manifest_path.name, line, str(exc)) from None

    _, application_slos = _load_metric_table(root / "application.csv")

    return Catalog(
        activities=activities,
        resources=resources,
        application_slos=application_slos,
        version=version,
    )


def list_activities(catalog: Catalog) -> list[str]:
    """Activity names in catalog (manifest) order."""
    return list(catalog.activities)


def list_application_slos(catalog: Catalog) -> list[MetricDefinition]:
    """Application-scope SLO metric definitions, in table order."""
    return list(catalog.application_slos)


def resolve_activity_schema(catalog: Catalog, activity_name: str) -> ActivitySchema:
    """Merge an activity with the metric vocabularies of its layer and model."""
    definition = catalog.activities.get(activity_name)
    if definition is None:
        raise ActivityNotFound(f"unknown activity {activity_name!r}")
    layer = catalog.resources[definition.deployment_layer]
    model_metrics: tuple[MetricDefinition, ...] = ()
    if definition.programming_model is not None:
        model_metrics = catalog.resources[definition.programming_model].metrics
    return ActivitySchema(
        activity_name=activity_name,
        deployment_layer=definition.deployment_layer,
        programming_model=definition.programming_model,
        activity_metrics=definition.own_metrics,
        layer_metrics=layer.metrics,
        model_metrics=model_metrics,
    )


def default_catalog_path() -> Path:
    """Path of the catalog bundled with the package."""
    return Path(str(importlib_resources.files("sla_toolkit") / "data" / "catalog"))
