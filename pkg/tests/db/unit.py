# TO RUN TESTS: PYTHONPATH=src poetry run python -m pytest tests/db/unit.py -q
import pytest
from unittest.mock import MagicMock
from sqlalchemy.exc import SQLAlchemyError

from db.driver import cache_url
from db.schema import StoredSystem
from db.system_store import (
    MakeSystemStore,
    StaleSystemError,
    SystemStoreError,
    cartan_key,
    content_hash,
)
from models.enums import Block
from models.rootdata import build_root_datum
from models.scalar import qint
from tests.db.util import a2, small_system, stored_row


@pytest.fixture
def empty_session():
    session = MagicMock()
    session.scalars.return_value.first.return_value = None
    return session


# verify we add and flush a new system row with its rules
def test_save_system_success(empty_session):
    store = MakeSystemStore(empty_session)
    row = store.save(a2(), Block.E, small_system())

    empty_session.add.assert_called_once_with(row)
    empty_session.flush.assert_called_once()
    empty_session.delete.assert_not_called()
    assert isinstance(row, StoredSystem)
    assert row.type_label == "A2"
    assert row.block is Block.E
    assert row.certified
    assert [r.lhs for r in row.rules] == [[2, 1, 1], [2, 2, 1]]


# verify an existing row for the same key is replaced
def test_save_replaces_existing():
    session = MagicMock()
    old = stored_row(a2())
    session.scalars.return_value.first.return_value = old
    store = MakeSystemStore(session)
    store.save(a2(), Block.E, small_system())
    session.delete.assert_called_once_with(old)
    assert session.flush.call_count == 2


# verify we catch DB failures
def test_save_system_db_failure(empty_session):
    empty_session.flush.side_effect = SQLAlchemyError("boom")
    store = MakeSystemStore(empty_session)
    with pytest.raises(SystemStoreError):
        store.save(a2(), Block.E, small_system())
    empty_session.rollback.assert_called_once()


def test_load_miss(empty_session):
    store = MakeSystemStore(empty_session)
    assert store.load(a2(), Block.E, 16) is None


def test_load_db_failure():
    session = MagicMock()
    session.scalars.side_effect = SQLAlchemyError("boom")
    store = MakeSystemStore(session)
    with pytest.raises(SystemStoreError):
        store.load(a2(), Block.E, 16)


# verify stored rules come back as exact scalars
def test_load_decodes_rules():
    session = MagicMock()
    session.scalars.return_value.first.return_value = stored_row(a2())
    system = MakeSystemStore(session).load(a2(), Block.E, 16)

    assert system.certified
    assert system.overlaps_checked == 3
    assert system.rules[(2, 1, 1)][(1, 2, 1)] == qint(2)
    assert system.rules[(2, 2, 1)] == small_system().rules[(2, 2, 1)]


def test_load_stale_hash():
    session = MagicMock()
    session.scalars.return_value.first.return_value = stored_row(a2(), content="0" * 64)
    with pytest.raises(StaleSystemError):
        MakeSystemStore(session).load(a2(), Block.E, 16)


def test_delete_missing(empty_session):
    assert MakeSystemStore(empty_session).delete(a2(), Block.E, 16) is False
    empty_session.delete.assert_not_called()


def test_delete_db_failure():
    session = MagicMock()
    session.scalars.return_value.first.return_value = stored_row(a2())
    session.flush.side_effect = SQLAlchemyError("boom")
    with pytest.raises(SystemStoreError):
        MakeSystemStore(session).delete(a2(), Block.E, 16)
    session.rollback.assert_called_once()


def test_content_hash_depends_on_cartan():
    assert content_hash(build_root_datum("B", 2)) != content_hash(build_root_datum("C", 2))
    assert content_hash(a2()) == content_hash(build_root_datum("A", 2))
    assert cartan_key(a2()) == "2,-1;-1,2"


def test_cache_url(tmp_path):
    assert cache_url(":memory:") == "sqlite+pysqlite:///:memory:"
    url = cache_url(tmp_path / "nested")
    assert url.endswith("nested/systems.sqlite")
    assert (tmp_path / "nested").is_dir()
