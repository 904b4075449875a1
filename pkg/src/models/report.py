from typing import Callable, List, Mapping, NamedTuple, Optional, Protocol

from pydantic import BaseModel

from models.enums import CheckStatus


class Residual(Protocol):
    def is_zero(self) -> bool: ...

    def __len__(self) -> int: ...


class Identity(NamedTuple):
    # label such as "serre/aij=-3/i=1,j=2"; residual() is zero iff the identity holds
    label: str
    residual: Callable[[], Residual]


class BoolResidual:
    """Residual for checks that are decided by a predicate."""

    def __init__(self, holds: bool, detail: str = ""):
        self.holds = holds
        self.detail = detail

    def is_zero(self) -> bool:
        return self.holds

    def __len__(self) -> int:
        return 0 if self.holds else 1

    def __str__(self) -> str:
        return self.detail or ("holds" if self.holds else "fails")


class TermsResidual:
    """Residual given as a mapping of surviving terms, e.g. a normalised tensor."""

    def __init__(self, terms: Mapping):
        self.terms = dict(terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __len__(self) -> int:
        return len(self.terms)

    def __str__(self) -> str:
        return f"{len(self.terms)} surviving terms"


class ReportRow(BaseModel):
    suite: str
    check: str
    identity: str
    status: CheckStatus
    ms: int
    max_terms: int
    detail: Optional[str] = None


class SuiteReport(BaseModel):
    suite: str
    rows: List[ReportRow]

    def counts(self) -> dict[CheckStatus, int]:
        out = {status: 0 for status in CheckStatus}
        for row in self.rows:
            out[row.status] += 1
        return out
