"""Seeded random generators for documents, request bodies, and catalogs."""

from __future__ import annotations

import json
import random
from datetime import datetime, timedelta, timezone
from pathlib import Path

from sla_toolkit.catalog import Catalog, MetricDefinition, load_catalog, resolve_activity_schema
from sla_toolkit.composer import SlaDocument, document_to_json_dict
from sla_toolkit.model import PRIORITIES, Constraint, SlaHeader
from sla_toolkit.workflow import ActivityNode, Workflow

METRIC_HEADER = (
    "metric_id,display_name,category,value_type,unit,"
    "range_min,range_max,enum_values,allowed_operators"
)


def in_range_value(rng: random.Random, metric: MetricDefinition):
    """A value satisfying the metric's type and range."""
    if metric.value_type in ("numeric", "percentage"):
        low = metric.range_min if metric.range_min is not None else -1000.0
        high = metric.range_max if metric.range_max is not None else low + 1000.0
        if rng.random() < 0.5:
            return rng.randint(int(low), int(high))
        return round(rng.uniform(low, high), 3)
    if metric.value_type == "enum":
        return rng.choice(list(metric.enum_values or ("missing",)))
    if metric.value_type == "boolean":
        return rng.choice([True, False])
    return f"text-{rng.randint(0, 99)}"


def valid_constraint(rng: random.Random, metric: MetricDefinition, scope: str) -> Constraint:
    return Constraint(
        metric_id=metric.metric_id,
        scope=scope,
        priority=rng.choice(PRIORITIES),
        operator=rng.choice(metric.allowed_operators),
        value=in_range_value(rng, metric),
        unit=metric.unit,
    )


def random_header(rng: random.Random) -> SlaHeader:
    start = datetime(2024, 1, 1, tzinfo=timezone.utc) + timedelta(
        days=rng.randint(0, 365), seconds=rng.randint(0, 86399)
    )
    end = start + timedelta(days=rng.randint(1, 900), seconds=rng.randint(1, 86399))
    return SlaHeader(
        application_type=rng.choice(
            ["Remote Health Monitoring", "Smart Building", "Fleet Télémetrie", "app-x"]
        ),
        agreement_start=start,
        agreement_end=end,
    )


def random_valid_document(catalog: Catalog, rng: random.Random) -> SlaDocument:
    """A generator-built document that must always validate cleanly."""
    names = list(catalog.activities)
    count = rng.randint(1, 6)
    chosen = [rng.choice(names) for _ in range(count)]

    nodes = []
    for i, name in enumerate(chosen):
        schema = resolve_activity_schema(catalog, name)

        def pick(metrics, scope):
            selected = [m for m in metrics if rng.random() < 0.4]
            return tuple(valid_constraint(rng, m, scope) for m in selected)

        nodes.append(
            ActivityNode(
                node_id=f"n{i}",
                activity_name=name,
                deployment_layer=schema.deployment_layer,
                programming_model=schema.programming_model,
                activity_constraints=pick(schema.activity_metrics, "activity"),
                layer_constraints=pick(schema.layer_metrics, "layer"),
                model_constraints=pick(schema.model_metrics, "model"),
            )
        )

    edges = []
    for i in range(count):
        for j in range(i + 1, count):
            if rng.random() < 0.3:
                edges.append((f"n{i}", f"n{j}"))

    app_slos = tuple(
        valid_constraint(rng, m, "application")
        for m in catalog.application_slos
        if rng.random() < 0.5
    )

    return SlaDocument(
        schema_version="1.0",
        header=random_header(rng),
        app_slos=app_slos,
        workflow=Workflow(nodes=tuple(nodes), edges=tuple(edges)),
    )


# --- shape-valid request bodies, some semantically broken ---


def _mutate_body(body: dict, rng: random.Random) -> None:
    """Apply one semantic mutation; the body stays schema-shaped."""
    mutations = []
    slos = body["slos"]
    activities = body["workflow"]["activities"]

    if slos:
        mutations += [
            lambda: slos[0].update(metric_id="sampling_rate"),
            lambda: slos[0].update(value=-5),
            lambda: slos[0].update(unit="furlongs"),
            lambda: slos[0].update(value="sixty"),
        ]
    mutations += [
        lambda: body["application"].update(
            agreement_start=body["application"]["agreement_end"],
            agreement_end=body["application"]["agreement_start"],
        ),
        lambda: body["workflow"]["edges"].append(
            {"from": activities[-1]["id"], "to": activities[0]["id"]}
        ),
        lambda: body["workflow"]["edges"].append({"from": activities[0]["id"], "to": "ghost"}),
        lambda: activities.append(dict(activities[0])),
        lambda: activities[0].update(name="Frobnicate"),
        lambda: activities[0]["deployment_layer"].update(name="edge_of_tomorrow"),
        lambda: activities[0]["constraints"].append(
            {"metric_id": "no_such_metric", "priority": "low", "operator": "eq",
             "value": 1, "unit": ""}
        ),
    ]
    modeless = [a for a in activities if a["programming_model"] is None]
    if modeless:
        mutations.append(
            lambda: modeless[0].update(
                programming_model={"name": "stream_processing", "constraints": []}
            )
        )
    rng.choice(mutations)()


def random_document_body(catalog: Catalog, rng: random.Random) -> bytes:
    """JSON body for the service: parseable, valid or semantically broken."""
    body = document_to_json_dict(random_valid_document(catalog, rng))
    body = json.loads(json.dumps(body))  # deep copy, JSON types only
    if rng.random() < 0.7:
        for _ in range(rng.randint(1, 3)):
            _mutate_body(body, rng)
    return json.dumps(body, indent=rng.choice([None, 2]), sort_keys=rng.random() < 0.5).encode()


# --- constraint fuzzing against arbitrary metric definitions ---


def random_metric(rng: random.Random) -> MetricDefinition:
    value_type = rng.choice(["numeric", "percentage", "enum", "boolean", "string"])
    kwargs: dict = {
        "metric_id": f"m{rng.randrange(1000)}",
        "display_name": "fuzz metric",
        "category": rng.choice(["slo", "config"]),
        "value_type": value_type,
        "unit": rng.choice(["", "ms", "seconds", "percent"]),
    }
    if value_type == "numeric":
        if rng.random() < 0.7:
            kwargs["range_min"] = rng.choice([0, -50, 10])
        if rng.random() < 0.7:
            low = kwargs.get("range_min") or 0
            kwargs["range_max"] = low + rng.randrange(1, 200)
    elif value_type == "percentage":
        kwargs["range_min"], kwargs["range_max"] = 0, rng.choice([50, 100])
    elif value_type == "enum":
        kwargs["enum_values"] = ("red", "green", "blue")
    if value_type in ("enum", "boolean", "string"):
        kwargs["allowed_operators"] = rng.choice([("eq",), ("neq",), ("eq", "neq")])
    else:
        operators = ["lt", "lte", "gt", "gte", "eq", "neq"]
        rng.shuffle(operators)
        kwargs["allowed_operators"] = tuple(operators[: rng.randrange(1, 7)])
    return MetricDefinition(**kwargs)


def random_constraint(rng: random.Random, metric: MetricDefinition) -> Constraint:
    value = rng.choice(
        [
            rng.randrange(-100, 300),
            round(rng.uniform(-100, 300), 2),
            rng.choice(["red", "green", "mauve", "text"]),
            rng.choice([True, False]),
        ]
    )
    return Constraint(
        metric_id=metric.metric_id,
        scope=rng.choice(["application", "activity", "layer", "model"]),
        priority=rng.choice(PRIORITIES),
        operator=rng.choice(["lt", "lte", "gt", "gte", "eq", "neq"]),
        value=value,
        unit=rng.choice(["", "ms", "seconds", "percent"]),
    )


def randomized_constraint_cases(count: int, seed: int = 20240131):
    rng = random.Random(seed)
    for _ in range(count):
        metric = random_metric(rng)
        yield metric, random_constraint(rng, metric)


# --- synthetic catalog directories ---


def metric_row(
    metric_id: str,
    *,
    display_name: str | None = None,
    category: str = "slo",
    value_type: str = "numeric",
    unit: str = "",
    range_min: str = "",
    range_max: str = "",
    enum_values: str = "",
    allowed_operators: str = "lt|lte|gt|gte|eq|neq",
) -> str:
    if value_type in ("enum", "boolean", "string") and allowed_operators.startswith("lt"):
        allowed_operators = "eq|neq"
    return ",".join(
        [
            metric_id,
            display_name or metric_id.replace("_", " "),
            category,
            value_type,
            unit,
            range_min,
            range_max,
            enum_values,
            allowed_operators,
        ]
    )


def write_catalog(
    root: Path,
    *,
    activities: list[tuple[str, str, str, str | None, list[str]]],
    resources: dict[str, tuple[str, list[str]]],
    application_rows: list[str],
    version: str = "test-1",
) -> Path:
    """Write a catalog directory.

    ``activities``: (name, file, layer_id, model_id, metric rows);
    ``resources``: resource_id -> (kind, metric rows).
    """
    (root / "activities").mkdir(parents=True, exist_ok=True)
    (root / "resources").mkdir(parents=True, exist_ok=True)
    (root / "catalog.txt").write_text(version + "\n", encoding="utf-8")

    manifest = ["activity,file,deployment_layer,programming_model"]
    for name, file, layer, model, rows in activities:
        manifest.append(f'"{name}",{file},{layer},{model or ""}')
        (root / "activities" / file).write_text(
            "\n".join([METRIC_HEADER, *rows]) + "\n", encoding="utf-8"
        )
    (root / "manifest.csv").write_text("\n".join(manifest) + "\n", encoding="utf-8")

    for resource_id, (kind, rows) in resources.items():
        (root / "resources" / f"{resource_id}.csv").write_text(
            "\n".join([f"#kind={kind}", METRIC_HEADER, *rows]) + "\n", encoding="utf-8"
        )

    (root / "application.csv").write_text(
        "\n".join([METRIC_HEADER, *application_rows]) + "\n", encoding="utf-8"
    )
    return root


def copy_default_catalog(target: Path) -> Path:
    """Copy the bundled catalog so tests can extend it file-by-file."""
    import shutil

    from sla_toolkit.catalog import default_catalog_path

    shutil.copytree(default_catalog_path(), target)
    return target


def load_default() -> Catalog:
    from sla_toolkit.catalog import default_catalog_path

    return load_catalog(default_catalog_path())
