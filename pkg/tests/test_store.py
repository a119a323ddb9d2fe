from __future__ import annotations

import hashlib
import json
import random
import time

import pytest

import docgen
from sla_toolkit.composer import serialize_canonical
from sla_toolkit.errors import CorruptDocument, DocumentNotFound, StoreLocked
from sla_toolkit.store import DocumentStore


@pytest.fixture()
def store(tmp_path) -> DocumentStore:
    return DocumentStore(tmp_path / "store")


def test_put_is_idempotent(store, rhms_document):
    first = store.put(rhms_document)
    second = store.put(rhms_document)
    assert first == second
    assert len(store.list()) == 1
    assert len(list(store.slas_dir.glob("*.json"))) == 1


def test_stored_bytes_equal_canonical_serialization(store, rhms_document):
    doc_id = store.put(rhms_document)
    raw = (store.slas_dir / f"{doc_id}.json").read_bytes()
    assert raw == serialize_canonical(rhms_document)
    assert hashlib.sha256(raw).hexdigest() == doc_id


def test_get_round_trips(store, rhms_document):
    assert store.get(store.put(rhms_document)) == rhms_document


def test_get_unknown_id(store):
    with pytest.raises(DocumentNotFound):
        store.get("0" * 64)


def test_tampered_file_fails_hash_check(store, rhms_document):
    doc_id = store.put(rhms_document)
    path = store.slas_dir / f"{doc_id}.json"
    data = bytearray(path.read_bytes())
    data[7] ^= 0x20
    path.write_bytes(bytes(data))
    with pytest.raises(CorruptDocument):
        store.get(doc_id)


def test_empty_store_lists_nothing(store):
    assert store.list() == []


def test_distinct_puts_accumulate(store, catalog):
    rng = random.Random(321)
    ids = {store.put(docgen.random_valid_document(catalog, rng)) for _ in range(12)}
    summaries = store.list()
    assert len(summaries) == len(ids) == len(list(store.slas_dir.glob("*.json")))
    keys = [(s.created_at, s.id) for s in summaries]
    assert keys == sorted(keys)


def test_summary_application_type_matches_document(store, catalog):
    rng = random.Random(17)
    for _ in range(5):
        store.put(docgen.random_valid_document(catalog, rng))
    for summary in store.list():
        assert store.get(summary.id).header.application_type == summary.application_type
        assert summary.size_bytes == len(store.get_bytes(summary.id))


def test_delete_removes_document_and_entry(store, rhms_document, catalog):
    rng = random.Random(9)
    other = docgen.random_valid_document(catalog, rng)
    keep_id = store.put(other)
    drop_id = store.put(rhms_document)
    store.delete(drop_id)
    with pytest.raises(DocumentNotFound):
        store.get(drop_id)
    assert [s.id for s in store.list()] == [keep_id]
    with pytest.raises(DocumentNotFound):
        store.delete(drop_id)


def test_index_is_rebuildable_from_directory(store, catalog):
    rng = random.Random(55)
    for _ in range(8):
        store.put(docgen.random_valid_document(catalog, rng))
    assert store.rebuild_index() == store.list()


def test_index_survives_deletion_and_rebuild(store, catalog):
    rng = random.Random(56)
    ids = [store.put(docgen.random_valid_document(catalog, rng)) for _ in range(4)]
    store.delete(ids[1])
    assert store.rebuild_index() == store.list()


def test_held_lock_times_out(tmp_path, rhms_document):
    store = DocumentStore(tmp_path / "store", lock_timeout=0.2)
    store.root.mkdir(parents=True, exist_ok=True)
    store.lock_path.write_text(json.dumps({"pid": 1, "acquired_at": "2099-01-01T00:00:00Z"}))
    started = time.monotonic()
    with pytest.raises(StoreLocked):
        store.put(rhms_document)
    assert time.monotonic() - started >= 0.2


def test_stale_lock_is_broken_with_warning(tmp_path, rhms_document, caplog):
    store = DocumentStore(tmp_path / "store", lock_timeout=1.0, lock_stale_after=0.05)
    store.root.mkdir(parents=True, exist_ok=True)
    store.lock_path.write_text(json.dumps({"pid": 1, "acquired_at": "2000-01-01T00:00:00Z"}))
    time.sleep(0.1)
    with caplog.at_level("WARNING"):
        doc_id = store.put(rhms_document)
    assert doc_id
    assert any("stale" in record.message for record in caplog.records)


def test_lock_file_records_pid_and_time(tmp_path):
    store = DocumentStore(tmp_path / "store")
    store.root.mkdir(parents=True, exist_ok=True)
    with store._lock():
        payload = json.loads(store.lock_path.read_text())
        assert payload["pid"] > 0
        assert payload["acquired_at"].endswith("Z")
    assert not store.lock_path.exists()
