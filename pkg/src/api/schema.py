from pydantic import BaseModel

from typing import Optional, List

from models.report import ReportRow


class EvalRequest(BaseModel):
    case: str = "I-A2"
    expression: str


class EvalResponse(BaseModel):
    case: str
    rendered: str
    is_zero: bool


class RunSuiteRequest(BaseModel):
    suite: str
    checks: Optional[List[str]] = None
    long: bool = False
    degree_cap: Optional[int] = None


class RunSuiteResponse(BaseModel):
    suite: str
    passed: int
    failed: int
    skipped: int
    rows: List[ReportRow]
