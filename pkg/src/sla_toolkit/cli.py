"""Command-line entry point.

stdout carries machine-readable payload only (canonical document bytes,
report JSON, catalog JSON, ids); prose and diagnostics go to stderr so
commands compose in shell pipelines. Exit codes: 0 success, 1 validation
failure, 2 usage error, 3 I/O error.

``sla build`` consumes a draft: the same JSON shape as a full document
but with optional sections omitted — ``schema_version``, ``slos``,
``edges``, and per-activity ``constraints`` default to empty, a missing
``deployment_layer``/``programming_model`` binding is filled from the
catalog, and a missing constraint ``unit`` defaults to the metric's unit.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from pathlib import Path
from typing import Any

from .catalog import (
    Catalog,
    default_catalog_path,
    list_activities,
    load_catalog,
    resolve_activity_schema,
)
from .composer import (
    SCHEMA_VERSION,
    SlaDocument,
    parse,
    parse_timestamp,
    serialize_canonical,
    validate_document,
)
from .errors import (
    ActivityNotFound,
    ConstraintError,
    JsonSyntaxError,
    SchemaShapeError,
    SchemaVersionUnsupported,
    SlaToolkitError,
    StoreError,
    WorkflowCycle,
)
from .model import OPERATORS, PRIORITIES, Constraint, SlaHeader
from .store import DocumentStore
from .workflow import ActivityNode, Workflow

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_USAGE = 2
EXIT_IO = 3


# --- draft loading ---


def _shape(path: str, message: str) -> SchemaShapeError:
    return SchemaShapeError(path, message)


def _obj(value: Any, path: str, required: tuple[str, ...], optional: tuple[str, ...]) -> dict:
    if not isinstance(value, dict):
        raise _shape(path, f"expected an object, got {type(value).__name__}")
    missing = [k for k in required if k not in value]
    if missing:
        raise _shape(path, f"missing required field(s): {', '.join(missing)}")
    extra = [k for k in value if k not in required and k not in optional]
    if extra:
        raise _shape(path, f"unexpected field(s): {', '.join(extra)}")
    return value


def _str(value: Any, path: str) -> str:
    if not isinstance(value, str):
        raise _shape(path, f"expected a string, got {type(value).__name__}")
    return value


def _arr(value: Any, path: str) -> list:
    if not isinstance(value, list):
        raise _shape(path, f"expected an array, got {type(value).__name__}")
    return value


def _draft_constraint(value: Any, path: str, scope: str, unit_default) -> Constraint:
    obj = _obj(value, path, ("metric_id", "priority", "operator", "value"), ("unit",))
    metric_id = _str(obj["metric_id"], f"{path}.metric_id")
    priority = _str(obj["priority"], f"{path}.priority")
    if priority not in PRIORITIES:
        raise _shape(f"{path}.priority", f"must be one of {'|'.join(PRIORITIES)}")
    operator = _str(obj["operator"], f"{path}.operator")
    if operator not in OPERATORS:
        raise _shape(f"{path}.operator", f"must be one of {'|'.join(OPERATORS)}")
    raw = obj["value"]
    if not isinstance(raw, (bool, int, float, str)):
        raise _shape(f"{path}.value", "must be a number, string, or boolean")
    if "unit" in obj:
        unit = _str(obj["unit"], f"{path}.unit")
    else:
        unit = unit_default(metric_id)
    return Constraint(
        metric_id=metric_id, scope=scope, priority=priority, operator=operator,
        value=raw, unit=unit,
    )


def _draft_constraints(obj: dict, key: str, path: str, scope: str, unit_default) -> tuple:
    if key not in obj or obj[key] is None:
        return ()
    return tuple(
        _draft_constraint(c, f"{path}.{key}[{j}]", scope, unit_default)
        for j, c in enumerate(_arr(obj[key], f"{path}.{key}"))
    )


def load_draft(data: bytes | str, catalog: Catalog) -> SlaDocument:
    """Build an (unvalidated) document from a draft, binding via the catalog."""
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        root = json.loads(data)
    except ValueError as exc:
        raise JsonSyntaxError(str(exc)) from None

    obj = _obj(root, "$", ("application", "workflow"), ("schema_version", "slos"))
    version = _str(obj.get("schema_version", SCHEMA_VERSION), "$.schema_version")

    app = _obj(obj["application"], "$.application",
               ("type", "agreement_start", "agreement_end"), ())
    try:
        start = parse_timestamp(_str(app["agreement_start"], "$.application.agreement_start"))
        end = parse_timestamp(_str(app["agreement_end"], "$.application.agreement_end"))
    except ValueError as exc:
        raise _shape("$.application", str(exc)) from None
    header = SlaHeader(
        application_type=_str(app["type"], "$.application.type"),
        agreement_start=start,
        agreement_end=end,
    )

    app_metrics = {m.metric_id: m for m in catalog.application_slos}

    def app_unit(metric_id: str) -> str:
        metric = app_metrics.get(metric_id)
        return metric.unit if metric else ""

    app_slos = tuple(
        _draft_constraint(c, f"$.slos[{i}]", "application", app_unit)
        for i, c in enumerate(_arr(obj.get("slos", []), "$.slos"))
    )

    wf = _obj(obj["workflow"], "$.workflow", ("activities",), ("edges",))
    nodes = []
    for i, raw_node in enumerate(_arr(wf["activities"], "$.workflow.activities")):
        path = f"$.workflow.activities[{i}]"
        node_obj = _obj(raw_node, path, ("id", "name"),
                        ("deployment_layer", "programming_model", "constraints"))
        name = _str(node_obj["name"], f"{path}.name")

        try:
            schema = resolve_activity_schema(catalog, name)
        except ActivityNotFound:
            schema = None

        def scope_unit(scope: str):
            def lookup(metric_id: str) -> str:
                metric = schema.metric(scope, metric_id) if schema else None
                return metric.unit if metric else ""
            return lookup

        layer_name = schema.deployment_layer if schema else None
        layer_constraints: tuple = ()
        if node_obj.get("deployment_layer") is not None:
            layer_obj = _obj(node_obj["deployment_layer"], f"{path}.deployment_layer",
                             (), ("name", "constraints"))
            if "name" in layer_obj:
                layer_name = _str(layer_obj["name"], f"{path}.deployment_layer.name")
            layer_constraints = _draft_constraints(
                layer_obj, "constraints", f"{path}.deployment_layer", "layer",
                scope_unit("layer"),
            )

        model_name = schema.programming_model if schema else None
        model_constraints: tuple = ()
        if node_obj.get("programming_model") is not None:
            model_obj = _obj(node_obj["programming_model"], f"{path}.programming_model",
                             (), ("name", "constraints"))
            if "name" in model_obj:
                model_name = _str(model_obj["name"], f"{path}.programming_model.name")
            model_constraints = _draft_constraints(
                model_obj, "constraints", f"{path}.programming_model", "model",
                scope_unit("model"),
            )

        nodes.append(
            ActivityNode(
                node_id=_str(node_obj["id"], f"{path}.id"),
                activity_name=name,
                deployment_layer=layer_name,
                programming_model=model_name,
                activity_constraints=_draft_constraints(
                    node_obj, "constraints", path, "activity", scope_unit("activity")
                ),
                layer_constraints=layer_constraints,
                model_constraints=model_constraints,
            )
        )

    edges = []
    for k, raw_edge in enumerate(_arr(wf.get("edges", []), "$.workflow.edges")):
        edge = _obj(raw_edge, f"$.workflow.edges[{k}]", ("from", "to"), ())
        edges.append(
            (
                _str(edge["from"], f"$.workflow.edges[{k}].from"),
                _str(edge["to"], f"$.workflow.edges[{k}].to"),
            )
        )

    return SlaDocument(
        schema_version=version,
        header=header,
        app_slos=app_slos,
        workflow=Workflow(nodes=tuple(nodes), edges=tuple(edges)),
    )


# --- command handlers ---


def _print_json(obj: Any, file=None) -> None:
    print(json.dumps(obj, indent=2, ensure_ascii=False), file=file or sys.stdout)


def _diag(code: str, message: str) -> None:
    _print_json({"code": code, "message": message}, file=sys.stderr)


def _read_input(spec: str) -> bytes:
    if spec == "-":
        return sys.stdin.buffer.read()
    return Path(spec).read_bytes()


def _catalog_dir(args: argparse.Namespace) -> Path:
    if args.catalog:
        return Path(args.catalog)
    env = os.environ.get("SLA_CATALOG_DIR")
    return Path(env) if env else default_catalog_path()


def _store_dir(args: argparse.Namespace) -> Path:
    if args.store:
        return Path(args.store)
    env = os.environ.get("SLA_STORE_DIR")
    if not env:
        raise SystemExit2("--store is required (or set SLA_STORE_DIR)")
    return Path(env)


class SystemExit2(Exception):
    """Usage error discovered after argparse (missing env-backed option)."""


def _cmd_catalog_list(args: argparse.Namespace) -> int:
    catalog = load_catalog(_catalog_dir(args))
    entries = [
        {
            "name": definition.activity_name,
            "deployment_layer": definition.deployment_layer,
            "programming_model": definition.programming_model,
        }
        for definition in catalog.activities.values()
    ]
    _print_json(entries)
    return EXIT_OK


def _cmd_catalog_show(args: argparse.Namespace) -> int:
    catalog = load_catalog(_catalog_dir(args))
    try:
        schema = resolve_activity_schema(catalog, args.activity)
    except ActivityNotFound as exc:
        _diag("UNKNOWN_ACTIVITY", str(exc))
        return EXIT_INVALID
    _print_json(schema.to_json_dict())
    return EXIT_OK


def _cmd_validate(args: argparse.Namespace) -> int:
    catalog = load_catalog(_catalog_dir(args))
    data = _read_input(args.file)
    try:
        doc = parse(data)
    except JsonSyntaxError as exc:
        _diag("JSON_SYNTAX", str(exc))
        return EXIT_INVALID
    except SchemaVersionUnsupported as exc:
        _diag("SCHEMA_VERSION_UNSUPPORTED", str(exc))
        return EXIT_INVALID
    except SchemaShapeError as exc:
        _diag("SCHEMA_SHAPE", str(exc))
        return EXIT_INVALID
    report = validate_document(catalog, doc)
    _print_json(report.to_json_dict())
    return EXIT_OK if report.valid else EXIT_INVALID


def _cmd_build(args: argparse.Namespace) -> int:
    catalog = load_catalog(_catalog_dir(args))
    data = _read_input(args.draft)
    try:
        doc = load_draft(data, catalog)
    except (JsonSyntaxError, SchemaShapeError) as exc:
        _diag("SCHEMA_SHAPE" if isinstance(exc, SchemaShapeError) else "JSON_SYNTAX", str(exc))
        return EXIT_INVALID
    report = validate_document(catalog, doc)
    if not report.valid:
        _print_json(report.to_json_dict(), file=sys.stderr)
        return EXIT_INVALID
    payload = serialize_canonical(doc)
    sys.stdout.buffer.write(payload)
    sys.stdout.buffer.flush()
    print(hashlib.sha256(payload).hexdigest(), file=sys.stderr)
    return EXIT_OK


def _cmd_store_put(args: argparse.Namespace) -> int:
    store = DocumentStore(_store_dir(args))
    data = _read_input(args.file)
    try:
        doc = parse(data)
        doc_id = store.put(doc)
    except (JsonSyntaxError, SchemaShapeError, SchemaVersionUnsupported,
            WorkflowCycle, ValueError) as exc:
        _diag("SCHEMA_SHAPE", str(exc))
        return EXIT_INVALID
    print(doc_id)
    return EXIT_OK


def _cmd_store_get(args: argparse.Namespace) -> int:
    store = DocumentStore(_store_dir(args))
    sys.stdout.buffer.write(store.get_bytes(args.id))
    sys.stdout.buffer.flush()
    return EXIT_OK


def _cmd_store_list(args: argparse.Namespace) -> int:
    store = DocumentStore(_store_dir(args))
    _print_json([s.to_json_dict() for s in store.list()])
    return EXIT_OK


def _cmd_serve(args: argparse.Namespace) -> int:
    from .service import ServiceConfig
    from .service import run as run_service

    assets = args.assets or os.environ.get("SLA_ASSETS_DIR")
    config = ServiceConfig(
        catalog_path=_catalog_dir(args),
        store_path=_store_dir(args),
        bind_address=args.bind,
        assets_path=Path(assets) if assets else None,
        cors_origins=tuple(args.cors_origin or ()),
    )
    run_service(config)
    return EXIT_OK


def _add_catalog_flag(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--catalog",
        metavar="DIR",
        help="catalog directory (default: $SLA_CATALOG_DIR, else the bundled catalog)",
    )


def _add_store_flag(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--store", metavar="DIR", help="store directory (default: $SLA_STORE_DIR)"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sla",
        description="Specify, validate, and persist SLAs for multi-layer IoT applications.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_catalog = sub.add_parser("catalog", help="inspect the metric/activity catalog")
    catalog_sub = p_catalog.add_subparsers(dest="subcommand", required=True)
    p_list = catalog_sub.add_parser("list", help="list activities")
    _add_catalog_flag(p_list)
    p_list.set_defaults(handler=_cmd_catalog_list)
    p_show = catalog_sub.add_parser("show", help="show one activity's merged schema")
    p_show.add_argument("activity")
    _add_catalog_flag(p_show)
    p_show.set_defaults(handler=_cmd_catalog_show)

    p_validate = sub.add_parser("validate", help="validate a full SLA document")
    p_validate.add_argument("file", help="document path, or - for stdin")
    _add_catalog_flag(p_validate)
    p_validate.set_defaults(handler=_cmd_validate)

    p_build = sub.add_parser("build", help="build canonical SLA JSON from a draft")
    p_build.add_argument("--from", dest="draft", required=True,
                         help="draft path, or - for stdin")
    _add_catalog_flag(p_build)
    p_build.set_defaults(handler=_cmd_build)

    p_store = sub.add_parser("store", help="persist and retrieve SLA documents")
    store_sub = p_store.add_subparsers(dest="subcommand", required=True)
    p_put = store_sub.add_parser("put", help="store a document")
    p_put.add_argument("file")
    _add_store_flag(p_put)
    p_put.set_defaults(handler=_cmd_store_put)
    p_get = store_sub.add_parser("get", help="print stored canonical bytes")
    p_get.add_argument("id")
    _add_store_flag(p_get)
    p_get.set_defaults(handler=_cmd_store_get)
    p_slist = store_sub.add_parser("list", help="list stored document summaries")
    _add_store_flag(p_slist)
    p_slist.set_defaults(handler=_cmd_store_list)

    p_serve = sub.add_parser("serve", help="run the HTTP service")
    _add_catalog_flag(p_serve)
    _add_store_flag(p_serve)
    p_serve.add_argument("--bind", default="127.0.0.1:8000", metavar="HOST:PORT")
    p_serve.add_argument("--assets", metavar="DIR",
                         help="built wizard assets to serve at / (default: $SLA_ASSETS_DIR)")
    p_serve.add_argument("--cors-origin", action="append", metavar="ORIGIN",
                         help="allowed CORS origin (repeatable)")
    p_serve.set_defaults(handler=_cmd_serve)

    return parser


def run(argv: list[str]) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE

    try:
        return args.handler(args)
    except SystemExit2 as exc:
        print(f"sla: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as exc:
        _diag("IO_ERROR", str(exc))
        return EXIT_IO
    except StoreError as exc:
        _diag(type(exc).__name__, str(exc))
        return EXIT_IO
    except ConstraintError as exc:
        _diag(exc.code, str(exc))
        return EXIT_INVALID
    except SlaToolkitError as exc:
        _diag(type(exc).__name__, str(exc))
        return EXIT_IO


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
