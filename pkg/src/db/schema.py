# db/schema.py
from datetime import datetime
from typing import List

from sqlalchemy import JSON, Boolean, DateTime, Enum, ForeignKey, Index, Integer, String, UniqueConstraint, func, text
from sqlalchemy.orm import DeclarativeBase, Mapped, mapped_column, relationship

from models.enums import Block


class Base(DeclarativeBase):
    pass


class StoredSystem(Base):
    __tablename__ = "rewriting_systems"
    __table_args__ = (
        UniqueConstraint("type_label", "cartan", "block", "degree_cap", name="uq_rewriting_systems_key"),
    )

    id: Mapped[int] = mapped_column(Integer, primary_key=True, autoincrement=True)
    type_label: Mapped[str] = mapped_column(String(32), nullable=False)
    rank: Mapped[int] = mapped_column(Integer, nullable=False)
    # Cartan matrix as "2,-1;-1,2"; distinguishes direct sums sharing a type label
    cartan: Mapped[str] = mapped_column(String(512), nullable=False)
    block: Mapped[Block] = mapped_column(Enum(Block), nullable=False)
    degree_cap: Mapped[int] = mapped_column(Integer, nullable=False)
    content_hash: Mapped[str] = mapped_column(String(64), nullable=False)
    certified: Mapped[bool] = mapped_column(Boolean, nullable=False, default=False, server_default=text("0"))
    overlaps_checked: Mapped[int] = mapped_column(Integer, nullable=False, default=0)
    created_at: Mapped[datetime] = mapped_column(
        DateTime(timezone=True), server_default=func.now(), nullable=False
    )

    rules: Mapped[List["StoredRule"]] = relationship(
        back_populates="system", cascade="all, delete-orphan", order_by="StoredRule.position"
    )


class StoredRule(Base):
    __tablename__ = "rewriting_rules"

    id: Mapped[int] = mapped_column(Integer, primary_key=True, autoincrement=True)
    system_id: Mapped[int] = mapped_column(ForeignKey("rewriting_systems.id", ondelete="CASCADE"), nullable=False)
    position: Mapped[int] = mapped_column(Integer, nullable=False)
    lhs: Mapped[list] = mapped_column(JSON, nullable=False)
    # [[word, numerator coefficients, denominator coefficients], ...]
    rhs: Mapped[list] = mapped_column(JSON, nullable=False)

    system: Mapped[StoredSystem] = relationship(back_populates="rules")

    __table_args__ = (Index("ix_rewriting_rules_system", "system_id"),)
