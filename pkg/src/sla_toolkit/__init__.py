"""End-to-end SLA specification toolkit for multi-layer IoT applications.

Specify application-level SLOs, a workflow of activities bound to
deployment layers and programming models, and per-activity constraints
drawn from an extensible CSV catalog; compose, validate, canonically
serialize, and persist the resulting SLA document.
"""

from .catalog import (
    ActivityDefinition,
    ActivitySchema,
    Catalog,
    MetricDefinition,
    ResourceSchema,
    default_catalog_path,
    list_activities,
    list_application_slos,
    load_catalog,
    resolve_activity_schema,
)
from .composer import (
    SCHEMA_VERSION,
    SlaDocument,
    ValidationReport,
    compose,
    document_id,
    parse,
    serialize_canonical,
    validate_document,
)
from .model import (
    Constraint,
    Finding,
    SlaHeader,
    check_constraint,
    make_constraint,
)
from .store import DocumentStore, StoredSlaSummary
from .workflow import (
    ActivityNode,
    Mapping,
    Workflow,
    build_workflow,
    map_activity,
    topological_order,
    validate_workflow,
)

__version__ = "0.1.0"

__all__ = [
    "ActivityDefinition",
    "ActivityNode",
    "ActivitySchema",
    "Catalog",
    "Constraint",
    "DocumentStore",
    "Finding",
    "Mapping",
    "MetricDefinition",
    "ResourceSchema",
    "SCHEMA_VERSION",
    "SlaDocument",
    "SlaHeader",
    "StoredSlaSummary",
    "ValidationReport",
    "Workflow",
    "build_workflow",
    "check_constraint",
    "compose",
    "default_catalog_path",
    "document_id",
    "list_activities",
    "list_application_slos",
    "load_catalog",
    "make_constraint",
    "map_activity",
    "parse",
    "resolve_activity_schema",
    "serialize_canonical",
    "topological_order",
    "validate_document",
    "validate_workflow",
    "__version__",
]
