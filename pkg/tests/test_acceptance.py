"""Acceptance suite: one test per criterion, each printing a PASS line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines; the suite uses larger corpora than the per-module tests and is the
release gate for this toolkit.
"""

from __future__ import annotations

import hashlib
import json
import multiprocessing
import random
import time
from dataclasses import replace
from pathlib import Path

from fastapi.testclient import TestClient

import docgen
import oracles
import store_worker
from conftest import GOLDEN_PATH, RHMS_DRAFT_PATH, build_rhms_document
from sla_toolkit.catalog import (
    default_catalog_path,
    list_activities,
    load_catalog,
    resolve_activity_schema,
)
from sla_toolkit.cli import load_draft, run
from sla_toolkit.composer import (
    document_id,
    parse,
    serialize_canonical,
    validate_document,
)
from sla_toolkit.errors import WorkflowCycle
from sla_toolkit.model import check_constraint
from sla_toolkit.service import ServiceConfig, create_app
from sla_toolkit.store import DocumentStore
from sla_toolkit.workflow import ActivityNode, build_workflow

SRC_ROOT = Path(__file__).parents[1] / "src"


def _ok(name: str) -> None:
    print(f"ACCEPTANCE {name}: PASS")


def _source_tree_digest() -> str:
    digest = hashlib.sha256()
    for path in sorted(SRC_ROOT.rglob("*.py")):
        digest.update(path.as_posix().encode())
        digest.update(path.read_bytes())
    return digest.hexdigest()


def test_rhms_golden_scenario(catalog):
    started = time.perf_counter()

    draft = RHMS_DRAFT_PATH.read_bytes()
    doc = load_draft(draft, catalog)
    report = validate_document(catalog, doc)
    assert report.valid and report.findings == ()

    payload = serialize_canonical(doc)
    assert payload == GOLDEN_PATH.read_bytes()

    doc_id = document_id(doc)
    assert len(doc_id) == 64 and set(doc_id) <= set("0123456789abcdef")
    assert doc_id == hashlib.sha256(payload).hexdigest()
    assert doc_id == document_id(build_rhms_document(catalog))

    elapsed = time.perf_counter() - started
    assert elapsed < 1.0, f"golden scenario took {elapsed:.3f}s"
    _ok("rhms-golden-scenario")


def test_mapping_conformance(catalog):
    analysis = resolve_activity_schema(catalog, "Real-time Analysis")
    assert (analysis.deployment_layer, analysis.programming_model) == (
        "cloud",
        "stream_processing",
    )
    capture = resolve_activity_schema(catalog, "Capture Event of Interest (EoI)")
    assert (capture.deployment_layer, capture.programming_model) == ("iot_device", None)
    _ok("mapping-conformance")


def test_round_trip_property_1000_documents(catalog):
    rng = random.Random(16180339)
    failures = 0
    for _ in range(1000):
        doc = docgen.random_valid_document(catalog, rng)
        data = serialize_canonical(doc)
        reparsed = parse(data)
        if reparsed != doc or serialize_canonical(reparsed) != data:
            failures += 1
    assert failures == 0
    _ok("round-trip-property")


def test_dag_oracle_equivalence_10000_graphs():
    rng = random.Random(27182818)
    node = ActivityNode(
        node_id="x", activity_name="Ingest data",
        deployment_layer="cloud", programming_model="ingestion",
    )
    for _ in range(10000):
        count = rng.randint(1, 6)
        ids = [f"n{i}" for i in range(count)]
        edges = [
            (rng.choice(ids), rng.choice(ids)) for _ in range(rng.randint(0, count * 2))
        ]
        nodes = [replace(node, node_id=i) for i in ids]
        expected = oracles.has_cycle(ids, edges)
        try:
            build_workflow(nodes, edges)
            detected = False
        except WorkflowCycle as exc:
            detected = True
            witness = exc.cycle
            assert witness, "cycle witness must not be empty"
            for src, dst in zip(witness, witness[1:] + witness[:1]):
                assert (src, dst) in edges, f"witness {witness} is not a cycle of {edges}"
        assert detected == expected, (ids, edges)
    _ok("dag-oracle-equivalence")


def test_constraint_validator_equivalence_10000_cases():
    for metric, constraint in docgen.randomized_constraint_cases(10000, seed=31415926):
        expected = oracles.constraint_finding_codes(metric, constraint)
        actual = sorted(f.code for f in check_constraint(metric, constraint))
        assert actual == expected, (metric, constraint)
    _ok("constraint-validator-equivalence")


def test_extendibility_without_code_change(tmp_path, capsys):
    source_before = _source_tree_digest()
    root = docgen.copy_default_catalog(tmp_path / "catalog")

    (root / "activities" / "detect_anomaly.csv").write_text(
        docgen.METRIC_HEADER + "\n"
        + docgen.metric_row("detection_window", unit="ms", range_min="0") + "\n",
        encoding="utf-8",
    )
    with open(root / "manifest.csv", "a", encoding="utf-8") as fh:
        fh.write("Detect anomaly,detect_anomaly.csv,edge,stream_processing\n")

    # CLI picks the new activity up.
    assert run(["catalog", "list", "--catalog", str(root)]) == 0
    names = [e["name"] for e in json.loads(capsys.readouterr().out)]
    assert "Detect anomaly" in names

    # The service exposes it.
    config = ServiceConfig(catalog_path=root, store_path=tmp_path / "store")
    with TestClient(create_app(config)) as client:
        served = [e["name"] for e in client.get("/catalog/activities").json()]
        assert "Detect anomaly" in served

        # And it is usable in a valid, storable document.
        draft = {
            "application": {
                "type": "Anomaly Detection",
                "agreement_start": "2024-01-01T00:00:00Z",
                "agreement_end": "2025-01-01T00:00:00Z",
            },
            "workflow": {
                "activities": [
                    {
                        "id": "n1",
                        "name": "Detect anomaly",
                        "constraints": [
                            {"metric_id": "detection_window", "priority": "high",
                             "operator": "lt", "value": 250, "unit": "ms"}
                        ],
                    }
                ]
            },
        }
        catalog = load_catalog(root)
        doc = load_draft(json.dumps(draft), catalog)
        assert validate_document(catalog, doc).valid
        response = client.post("/sla", content=serialize_canonical(doc))
        assert response.status_code == 201

    assert _source_tree_digest() == source_before, "extendibility must not touch source"
    _ok("extendibility-zero-code-diff")


def test_store_integrity_under_concurrent_writers(tmp_path):
    store_root = tmp_path / "store"
    workers = [
        multiprocessing.Process(
            target=store_worker.run_writer, args=(str(store_root), w, 100)
        )
        for w in range(4)
    ]
    for proc in workers:
        proc.start()
    for proc in workers:
        proc.join(timeout=300)
        assert proc.exitcode == 0

    store = DocumentStore(store_root)
    files = sorted(store.slas_dir.glob("*.json"))
    assert len(files) == 400
    for path in files:
        assert hashlib.sha256(path.read_bytes()).hexdigest() == path.stem
    assert store.rebuild_index() == store.list()
    assert len(store.list()) == 400
    _ok("store-integrity-concurrent-writers")


def test_service_differential_200_bodies(tmp_path, catalog):
    config = ServiceConfig(
        catalog_path=default_catalog_path(), store_path=tmp_path / "store"
    )
    rng = random.Random(14142135)
    with TestClient(create_app(config)) as client:
        for _ in range(200):
            body = docgen.random_document_body(catalog, rng)
            response = client.post("/sla/validate", content=body)
            assert response.status_code == 200
            expected = validate_document(catalog, parse(body)).to_json_dict()
            assert response.json() == expected
    _ok("service-differential-suite")


def test_document_id_injective_over_10000_documents(catalog):
    # Module invariant backing the golden criterion's "stable id" claim.
    rng = random.Random(2718)
    by_id: dict[str, bytes] = {}
    corpus: set[bytes] = set()
    base = build_rhms_document(catalog)
    docs = [replace(base, app_slos=(replace(base.app_slos[0], value=i),))
            for i in range(8000)]
    docs += [docgen.random_valid_document(catalog, rng) for _ in range(2000)]
    for doc in docs:
        data = serialize_canonical(doc)
        doc_id = document_id(doc)
        corpus.add(data)
        if doc_id in by_id:
            assert by_id[doc_id] == data, "distinct documents collided on one id"
        by_id[doc_id] = data
    assert len(corpus) >= 10000
    assert len(by_id) == len(corpus)
    _ok("document-id-injectivity")
