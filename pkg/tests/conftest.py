from __future__ import annotations

from datetime import datetime, timezone
from pathlib import Path

import pytest

from sla_toolkit.catalog import (
    Catalog,
    default_catalog_path,
    list_activities,
    load_catalog,
    resolve_activity_schema,
)
from sla_toolkit.composer import SlaDocument, compose
from sla_toolkit.model import SlaHeader, make_constraint
from sla_toolkit.workflow import ActivityNode, build_workflow, map_activity

TESTS_DIR = Path(__file__).parent
GOLDEN_PATH = TESTS_DIR / "data" / "golden_rhms.json"
RHMS_DRAFT_PATH = TESTS_DIR.parent / "samples" / "rhms_draft.json"


@pytest.fixture(scope="session")
def catalog() -> Catalog:
    return load_catalog(default_catalog_path())


def build_rhms_document(catalog: Catalog) -> SlaDocument:
    """The golden scenario, assembled through the public API."""
    header = SlaHeader(
        application_type="Remote Health Monitoring",
        agreement_start=datetime(2024, 1, 1, tzinfo=timezone.utc),
        agreement_end=datetime(2025, 1, 1, tzinfo=timezone.utc),
    )
    response_time = next(
        m for m in catalog.application_slos if m.metric_id == "end_to_end_response_time"
    )
    app_slo = make_constraint(response_time, "application", "high", "lt", 60, "seconds")

    connectivity = resolve_activity_schema(catalog, "Ingest data").metric(
        "layer", "network_connectivity"
    )
    layer_constraint = make_constraint(connectivity, "layer", "high", "eq", 100, "percent")

    nodes = []
    for i, name in enumerate(list_activities(catalog), start=1):
        mapping = map_activity(catalog, name)
        nodes.append(
            ActivityNode(
                node_id=f"n{i}",
                activity_name=name,
                deployment_layer=mapping.deployment_layer,
                programming_model=mapping.programming_model,
                layer_constraints=(layer_constraint,) if name == "Ingest data" else (),
            )
        )
    edges = [(f"n{i}", f"n{i + 1}") for i in range(1, 5)]
    return compose(header, [app_slo], build_workflow(nodes, edges))


@pytest.fixture()
def rhms_document(catalog: Catalog) -> SlaDocument:
    return build_rhms_document(catalog)
