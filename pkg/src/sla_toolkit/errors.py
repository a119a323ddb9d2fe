"""Exception types raised across the toolkit.

Validation of whole documents never raises: rule violations are returned
as findings (see :mod:`sla_toolkit.model`). Exceptions are reserved for
malformed inputs, broken preconditions, and I/O failures.
"""

from __future__ import annotations


class SlaToolkitError(Exception):
    """Base class for all toolkit errors."""


# --- catalog loading ---


class CatalogNotFound(SlaToolkitError):
    """Catalog root, manifest, or a file the manifest references is missing."""


class TableParseError(SlaToolkitError):
    """A catalog CSV row is malformed; carries file and line for diagnostics."""

    def __init__(self, file: str, line: int, message: str):
        super().__init__(f"{file}:{line}: {message}")
        self.file = file
        self.line = line

    @property
    def message(self) -> str:
        return self.args[0]


class DanglingReference(SlaToolkitError):
    """An activity names a resource_id that does not resolve to the right kind."""


class DuplicateIdentifier(SlaToolkitError):
    """Two catalog entries share an identifier that must be unique."""


class EmptyCatalog(SlaToolkitError):
    """The manifest defines zero activities."""


class ActivityNotFound(SlaToolkitError):
    """Lookup of an activity name the catalog does not define."""


# --- constraint construction ---


class ConstraintError(SlaToolkitError):
    """A constraint violates its metric definition; carries the finding code."""

    code = "CONSTRAINT_INVALID"


class OperatorNotAllowed(ConstraintError):
    code = "OPERATOR_NOT_ALLOWED"


class ValueOutOfRange(ConstraintError):
    code = "VALUE_OUT_OF_RANGE"


class ValueTypeMismatch(ConstraintError):
    code = "VALUE_TYPE_MISMATCH"


class UnitMismatch(ConstraintError):
    code = "UNIT_MISMATCH"


class EnumValueUnknown(ConstraintError):
    code = "ENUM_VALUE_UNKNOWN"


# --- workflow construction ---


class EmptyWorkflow(SlaToolkitError):
    """A workflow must contain at least one activity node."""


class DuplicateNodeId(SlaToolkitError):
    """Two workflow nodes share a node_id."""


class DanglingEdge(SlaToolkitError):
    """An edge endpoint names a node_id absent from the workflow."""


class WorkflowCycle(SlaToolkitError):
    """The workflow graph is cyclic; carries one witness cycle."""

    def __init__(self, cycle: list[str]):
        super().__init__(f"workflow contains a cycle: {' -> '.join(cycle)}")
        self.cycle = list(cycle)


# --- document composition and parsing ---


class WindowInverted(SlaToolkitError):
    """agreement_start is not strictly before agreement_end."""


class JsonSyntaxError(SlaToolkitError):
    """Input bytes are not syntactically valid JSON."""


class SchemaVersionUnsupported(SlaToolkitError):
    """The document declares a schema_version this toolkit cannot read."""


class SchemaShapeError(SlaToolkitError):
    """JSON is well-formed but does not match the document schema."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path

    @property
    def message(self) -> str:
        return self.args[0]


# --- document store ---


class StoreError(SlaToolkitError):
    """Base class for store failures."""


class StoreIoError(StoreError):
    """Reading or writing the store layout failed."""


class StoreLocked(StoreError):
    """Another writer held the store lock beyond the acquisition timeout."""


class DocumentNotFound(StoreError):
    """No stored document under the requested id."""


class CorruptDocument(StoreError):
    """Stored bytes fail the hash check against the filename id."""
