from fastapi import HTTPException

from api.schema import EvalRequest, RunSuiteRequest
from config import CHECKS, SUITES
from models.rootdata import RootDataError, parse_case

MAX_EXPRESSION_LENGTH = 2000


def _validate_case(case_id: str) -> None:
    try:
        parse_case(case_id)
    except RootDataError as e:
        raise HTTPException(status_code=400, detail=str(e)) from e


def validate_eval_request(req: EvalRequest) -> None:
    _validate_case(req.case)
    if not req.expression.strip():
        raise HTTPException(status_code=400, detail="empty expression")
    if len(req.expression) > MAX_EXPRESSION_LENGTH:
        raise HTTPException(status_code=400, detail="expression too long")


def validate_run_suite_request(req: RunSuiteRequest) -> None:
    if req.suite not in SUITES:
        raise HTTPException(status_code=400, detail=f"unknown suite {req.suite!r}")
    for check in req.checks or ():
        if check not in CHECKS:
            raise HTTPException(status_code=400, detail=f"unknown check {check!r}")
    # only checked when provided
    if req.degree_cap is not None and req.degree_cap <= 0:
        raise HTTPException(status_code=400, detail="degree_cap must be positive")
