# db/system_store.py
from __future__ import annotations

import hashlib
import json
import logging
from typing import Protocol

from sqlalchemy import select
from sqlalchemy.exc import SQLAlchemyError
from sqlalchemy.orm import Session, sessionmaker

from algebra.rewriting import RewritingSystem
from algebra.uqg import SystemLoader, block_relators, complete_block_system
from models.enums import Block
from models.rootdata import RootDatum
from models.scalar import from_json, to_json

from .driver import session_scope
from .schema import StoredRule, StoredSystem

logger = logging.getLogger(__name__)


class SystemStore(Protocol):
    def load(self, rd: RootDatum, block: Block, degree_cap: int) -> RewritingSystem | None: ...
    def save(self, rd: RootDatum, block: Block, system: RewritingSystem) -> StoredSystem: ...
    def delete(self, rd: RootDatum, block: Block, degree_cap: int) -> bool: ...
    def count(self) -> int: ...


class RewritingStoreError(Exception):
    """Base class for rewriting system store errors."""


class SystemStoreError(RewritingStoreError):
    """Unexpected storage/backend failure."""


class StaleSystemError(RewritingStoreError):
    """Stored rules were completed from different relators."""


def cartan_key(rd: RootDatum) -> str:
    return ";".join(",".join(str(x) for x in row) for row in rd.cartan)


def content_hash(rd: RootDatum) -> str:
    """sha256 over the Cartan matrix and the Serre relators the block system is completed from."""
    relators = [
        sorted([list(word), to_json(c)] for word, c in poly.items())
        for poly in block_relators(rd)
    ]
    payload = json.dumps({"cartan": cartan_key(rd), "relators": relators}, sort_keys=True)
    return hashlib.sha256(payload.encode()).hexdigest()


def _rule_rows(system: RewritingSystem) -> list[StoredRule]:
    rows = []
    for position, (lhs, rhs) in enumerate(sorted(system.rules.items(), key=lambda kv: (len(kv[0]), kv[0]))):
        rows.append(
            StoredRule(
                position=position,
                lhs=list(lhs),
                rhs=[[list(word), to_json(c)] for word, c in sorted(rhs.items())],
            )
        )
    return rows


def _to_system(row: StoredSystem) -> RewritingSystem:
    rules = {
        tuple(rule.lhs): {tuple(word): from_json(c) for word, c in rule.rhs}
        for rule in row.rules
    }
    return RewritingSystem(
        rules,
        label=f"U({row.type_label}) Serre",
        degree_cap=row.degree_cap,
        certified=row.certified,
        overlaps_checked=row.overlaps_checked,
    )


class _SystemStore(SystemStore):
    def __init__(self, session: Session) -> None:
        self._session = session

    def _row(self, rd: RootDatum, block: Block, degree_cap: int) -> StoredSystem | None:
        stmt = select(StoredSystem).filter_by(
            type_label=rd.name, cartan=cartan_key(rd), block=block, degree_cap=degree_cap
        )
        return self._session.scalars(stmt).first()

    def load(self, rd: RootDatum, block: Block, degree_cap: int) -> RewritingSystem | None:
        try:
            row = self._row(rd, block, degree_cap)
        except SQLAlchemyError as e:
            raise SystemStoreError("database error") from e
        if row is None:
            return None
        if row.content_hash != content_hash(rd):
            raise StaleSystemError(f"{rd.name}/{block}: content hash mismatch")
        return _to_system(row)

    def save(self, rd: RootDatum, block: Block, system: RewritingSystem) -> StoredSystem:
        try:
            existing = self._row(rd, block, system.degree_cap)
            if existing is not None:
                self._session.delete(existing)
                self._session.flush()
            row = StoredSystem(
                type_label=rd.name,
                rank=rd.rank,
                cartan=cartan_key(rd),
                block=block,
                degree_cap=system.degree_cap,
                content_hash=content_hash(rd),
                certified=system.certified,
                overlaps_checked=system.overlaps_checked,
                rules=_rule_rows(system),
            )
            self._session.add(row)
            self._session.flush()
        except SQLAlchemyError as e:
            self._session.rollback()
            raise SystemStoreError("database error") from e
        return row

    def delete(self, rd: RootDatum, block: Block, degree_cap: int) -> bool:
        try:
            row = self._row(rd, block, degree_cap)
            if row is None:
                return False
            self._session.delete(row)
            self._session.flush()
        except SQLAlchemyError as e:
            self._session.rollback()
            raise SystemStoreError("database error") from e
        return True

    def count(self) -> int:
        try:
            return len(self._session.scalars(select(StoredSystem.id)).all())
        except SQLAlchemyError as e:
            raise SystemStoreError("database error") from e


def MakeSystemStore(session: Session) -> SystemStore:
    return _SystemStore(session)


def cached_system_loader(session_factory: sessionmaker[Session], *, progress: bool = False) -> SystemLoader:
    """SystemLoader that reads completed systems from the cache and completes and stores on a miss.

    Uncertified systems (degree cap hit) are never stored. A store failure is
    logged and the freshly completed system is used anyway.
    """

    def load(rd: RootDatum, block: Block, degree_cap: int) -> RewritingSystem:
        try:
            with session_scope(session_factory) as session:
                system = MakeSystemStore(session).load(rd, block, degree_cap)
        except StaleSystemError as e:
            logger.warning("ignoring cached system: %s", e)
            system = None
        except SystemStoreError:
            logger.exception("system cache unreadable, completing %s/%s", rd.name, block)
            system = None
        if system is not None:
            logger.debug("cache hit %s/%s cap=%d (%d rules)", rd.name, block, degree_cap, len(system))
            return system

        system = complete_block_system(rd, block, degree_cap, progress=progress)
        if system.certified:
            try:
                with session_scope(session_factory) as session:
                    MakeSystemStore(session).save(rd, block, system)
            except SystemStoreError:
                logger.exception("could not cache %s/%s", rd.name, block)
        return system

    return load
