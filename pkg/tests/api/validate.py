from fastapi import HTTPException
import pytest

from api.schema import EvalRequest, RunSuiteRequest
from api.validate import MAX_EXPRESSION_LENGTH, validate_eval_request, validate_run_suite_request


def test_validate_accepts_valid_eval():
    validate_eval_request(EvalRequest(case="III-A7", expression="tau(1,+,B2)"))
    validate_eval_request(EvalRequest(case="I-A1xA1", expression="B1*B2"))


@pytest.mark.parametrize("bad_case", ["IV-A3", "II-B3", "III-A4", "I-Z2", ""])
def test_validate_rejects_bad_case(bad_case):
    with pytest.raises(HTTPException):
        validate_eval_request(EvalRequest(case=bad_case, expression="E1"))


@pytest.mark.parametrize("bad_expression", ["", "   ", "E1+" * MAX_EXPRESSION_LENGTH])
def test_validate_rejects_bad_expression(bad_expression):
    with pytest.raises(HTTPException):
        validate_eval_request(EvalRequest(expression=bad_expression))


def test_validate_accepts_valid_suite():
    validate_run_suite_request(RunSuiteRequest(suite="I-B3"))
    validate_run_suite_request(RunSuiteRequest(suite="core", checks=["scalar", "hopf"], degree_cap=20))


@pytest.mark.parametrize(
    "payload",
    [
        {"suite": "I-A5"},
        {"suite": "I-B3", "checks": ["relations", "bogus"]},
        {"suite": "I-B3", "degree_cap": 0},
    ],
)
def test_validate_rejects_bad_suite(payload):
    with pytest.raises(HTTPException):
        validate_run_suite_request(RunSuiteRequest(**payload))
