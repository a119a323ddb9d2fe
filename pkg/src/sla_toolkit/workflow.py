"""Activity DAG construction, ordering, and validation against the catalog.

:func:`build_workflow` raises typed errors on structural violations so a
workflow assembled through the API is valid by construction. Parsed
documents take the raw :class:`Workflow` constructor instead, and
:func:`validate_workflow` reports the same structural violations — plus
catalog/constraint rule violations — as findings.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Iterable, Sequence

from .catalog import ActivitySchema, Catalog, resolve_activity_schema
from .errors import (
    ActivityNotFound,
    DanglingEdge,
    DuplicateNodeId,
    EmptyWorkflow,
    WorkflowCycle,
)
from .model import SEVERITY_ERROR, Constraint, Finding, check_constraint

Edge = tuple[str, str]


@dataclass(frozen=True, slots=True)
class ActivityNode:
    """One workflow node: a catalog activity plus its scoped constraints.

    ``deployment_layer``/``programming_model`` record the node's binding;
    they must match the catalog's mapping for the activity, which
    :func:`validate_workflow` enforces. ``None`` means unbound (drafts
    only) and never survives validation of a complete document.
    """

    node_id: str
    activity_name: str
    deployment_layer: str | None = None
    programming_model: str | None = None
    activity_constraints: tuple[Constraint, ...] = ()
    layer_constraints: tuple[Constraint, ...] = ()
    model_constraints: tuple[Constraint, ...] = ()


@dataclass(frozen=True, slots=True)
class Workflow:
    """A graph of activity nodes with data-flow edges.

    The raw constructor accepts any shape; use :func:`build_workflow` for
    a validated DAG.
    """

    nodes: tuple[ActivityNode, ...]
    edges: tuple[Edge, ...] = ()


@dataclass(frozen=True, slots=True)
class Mapping:
    """An activity's deployment layer and optional programming model."""

    deployment_layer: str
    programming_model: str | None


def _duplicate_indices(nodes: Sequence[ActivityNode]) -> list[int]:
    """Indices of nodes whose node_id already appeared earlier."""
    seen: set[str] = set()
    duplicates = []
    for i, node in enumerate(nodes):
        if node.node_id in seen:
            duplicates.append(i)
        seen.add(node.node_id)
    return duplicates


def _dangling_edge_indices(nodes: Sequence[ActivityNode], edges: Sequence[Edge]) -> list[int]:
    known = {node.node_id for node in nodes}
    return [i for i, (src, dst) in enumerate(edges) if src not in known or dst not in known]


def _find_cycle(node_ids: Iterable[str], edges: Iterable[Edge]) -> list[str] | None:
    """First cycle under deterministic (sorted node_id) traversal, or None.

    Edges with unknown endpoints are ignored; self-loops are length-1
    cycles. The witness lists the cycle's nodes in traversal order.
    """
    order = sorted(set(node_ids))
    known = set(order)
    adjacency: dict[str, list[str]] = {node_id: [] for node_id in order}
    for src, dst in edges:
        if src in known and dst in known:
            adjacency[src].append(dst)
    for neighbors in adjacency.values():
        neighbors.sort()

    WHITE, GRAY, BLACK = 0, 1, 2
    color = {node_id: WHITE for node_id in order}
    parent: dict[str, str | None] = {}

    for start in order:
        if color[start] != WHITE:
            continue
        parent[start] = None
        stack: list[tuple[str, int]] = [(start, 0)]
        color[start] = GRAY
        while stack:
            node, next_index = stack[-1]
            if next_index < len(adjacency[node]):
                stack[-1] = (node, next_index + 1)
                neighbor = adjacency[node][next_index]
                if color[neighbor] == GRAY:
                    # neighbor is on the stack: walk parents back to it.
                    cycle = [node]
                    current = parent[node]
                    while cycle[-1] != neighbor and current is not None:
                        cycle.append(current)
                        current = parent[current]
                    cycle.reverse()
                    return cycle
                if color[neighbor] == WHITE:
                    color[neighbor] = GRAY
                    parent[neighbor] = node
                    stack.append((neighbor, 0))
            else:
                color[node] = BLACK
                stack.pop()
    return None


def build_workflow(
    nodes: Sequence[ActivityNode], edges: Sequence[Edge] = ()
) -> Workflow:
    """Build a workflow, enforcing all structural invariants.

    Raises EmptyWorkflow, DuplicateNodeId, DanglingEdge, or WorkflowCycle
    (with one witness cycle) in that check order.
    """
    nodes = tuple(nodes)
    edges = tuple((str(src), str(dst)) for src, dst in edges)
    if not nodes:
        raise EmptyWorkflow("a workflow requires at least one activity node")
    duplicates = _duplicate_indices(nodes)
    if duplicates:
        raise DuplicateNodeId(f"duplicate node_id {nodes[duplicates[0]].node_id!r}")
    dangling = _dangling_edge_indices(nodes, edges)
    if dangling:
        src, dst = edges[dangling[0]]
        raise DanglingEdge(f"edge ({src!r}, {dst!r}) names an unknown node")
    cycle = _find_cycle((node.node_id for node in nodes), edges)
    if cycle is not None:
        raise WorkflowCycle(cycle)
    return Workflow(nodes=nodes, edges=edges)


def topological_order(workflow: Workflow) -> list[str]:
    """Node ids with every edge source before its target; ties broken by
    ascending node_id. Deterministic and invariant under edge-list
    permutation. Requires an acyclic workflow."""
    indegree: dict[str, int] = {node.node_id: 0 for node in workflow.nodes}
    successors: dict[str, list[str]] = {node.node_id: [] for node in workflow.nodes}
    for src, dst in workflow.edges:
        successors[src].append(dst)
        indegree[dst] += 1

    ready = [node_id for node_id, degree in indegree.items() if degree == 0]
    heapq.heapify(ready)
    ordered: list[str] = []
    while ready:
        node_id = heapq.heappop(ready)
        ordered.append(node_id)
        for successor in successors[node_id]:
            indegree[successor] -= 1
            if indegree[successor] == 0:
                heapq.heappush(ready, successor)
    if len(ordered) != len(indegree):
        raise WorkflowCycle(_find_cycle(indegree, workflow.edges) or [])
    return ordered


def map_activity(catalog: Catalog, activity_name: str) -> Mapping:
    """The catalog's layer/model mapping for an activity (pure lookup)."""
    definition = catalog.activities.get(activity_name)
    if definition is None:
        raise ActivityNotFound(f"unknown activity {activity_name!r}")
    return Mapping(
        deployment_layer=definition.deployment_layer,
        programming_model=definition.programming_model,
    )


def _finding(code: str, path: str, message: str) -> Finding:
    return Finding(code=code, severity=SEVERITY_ERROR, path=path, message=message)


def _check_scope_constraints(
    schema: ActivitySchema,
    scope: str,
    constraints: Sequence[Constraint],
    path_prefix: str,
    findings: list[Finding],
) -> None:
    for j, constraint in enumerate(constraints):
        path = f"{path_prefix}[{j}]"
        definition = schema.metric(scope, constraint.metric_id)
        if definition is None:
            findings.append(
                _finding(
                    "UNKNOWN_METRIC",
                    path,
                    f"metric {constraint.metric_id!r} is not defined in the "
                    f"{scope} scope of activity {schema.activity_name!r}",
                )
            )
            continue
        findings.extend(f.at(path) for f in check_constraint(definition, constraint))


def validate_workflow(catalog: Catalog, workflow: Workflow) -> list[Finding]:
    """All structural and catalog findings for a workflow, sorted by (path, code).

    Structural checks mirror :func:`build_workflow` exactly; per-node
    checks resolve each activity against the catalog, require the node's
    layer/model binding to equal the catalog mapping, and check every
    constraint against its (scope, metric_id) definition.
    """
    findings: list[Finding] = []

    if not workflow.nodes:
        findings.append(_finding("EMPTY_WORKFLOW", "workflow", "workflow has no activity nodes"))
    for i in _duplicate_indices(workflow.nodes):
        findings.append(
            _finding(
                "DUPLICATE_NODE_ID",
                f"workflow.activities[{i}]",
                f"duplicate node_id {workflow.nodes[i].node_id!r}",
            )
        )
    for k in _dangling_edge_indices(workflow.nodes, workflow.edges):
        src, dst = workflow.edges[k]
        findings.append(
            _finding(
                "DANGLING_EDGE",
                f"workflow.edges[{k}]",
                f"edge ({src!r}, {dst!r}) names an unknown node",
            )
        )
    cycle = _find_cycle((node.node_id for node in workflow.nodes), workflow.edges)
    if cycle is not None:
        findings.append(
            _finding("WORKFLOW_CYCLE", "workflow", f"cycle: {' -> '.join(cycle)}")
        )

    for i, node in enumerate(workflow.nodes):
        node_path = f"workflow.activities[{i}]"
        try:
            schema = resolve_activity_schema(catalog, node.activity_name)
        except ActivityNotFound:
            findings.append(
                _finding(
                    "UNKNOWN_ACTIVITY",
                    node_path,
                    f"activity {node.activity_name!r} is not in the catalog",
                )
            )
            continue

        if node.deployment_layer != schema.deployment_layer:
            findings.append(
                _finding(
                    "MAPPING_MISMATCH",
                    node_path,
                    f"node binds deployment_layer {node.deployment_layer!r} but the "
                    f"catalog maps {node.activity_name!r} to {schema.deployment_layer!r}",
                )
            )
        if node.programming_model != schema.programming_model:
            findings.append(
                _finding(
                    "MAPPING_MISMATCH",
                    node_path,
                    f"node binds programming_model {node.programming_model!r} but the "
                    f"catalog maps {node.activity_name!r} to {schema.programming_model!r}",
                )
            )

        _check_scope_constraints(
            schema, "activity", node.activity_constraints, f"{node_path}.constraints", findings
        )
        _check_scope_constraints(
            schema, "layer", node.layer_constraints, f"{node_path}.layer.constraints", findings
        )
        if schema.programming_model is None:
            if node.model_constraints:
                findings.append(
                    _finding(
                        "MAPPING_MISMATCH",
                        node_path,
                        f"node carries programming-model constraints but activity "
                        f"{node.activity_name!r} maps to no programming model",
                    )
                )
        else:
            _check_scope_constraints(
                schema, "model", node.model_constraints, f"{node_path}.model.constraints", findings
            )

    findings.sort(key=lambda f: (f.path, f.code))
    return findings
