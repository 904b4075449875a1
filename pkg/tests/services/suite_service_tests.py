# TO RUN: PYTHONPATH=src poetry run python -m pytest tests/services/suite_service_tests.py -q
import pytest
from unittest.mock import patch

from algebra.rewriting import DegreeCapExceeded
from config import SuiteConfig
from models.enums import CheckStatus
from models.report import BoolResidual, Identity, ReportRow, SuiteReport
from models.rootdata import parse_case
from services.budget import BudgetExceeded
from services.suite_service import (
    LocalSuiteService,
    SuiteError,
    case_checks,
    evaluate,
    exit_code,
    failing,
    identities_for,
    plan,
    run_check,
    run_suite,
)


@pytest.fixture
def cfg():
    return SuiteConfig(cache_dir=None)


def _raise(exc):
    def compute():
        raise exc

    return compute


def _row(status):
    return ReportRow(suite="s", check="c", identity="x", status=status, ms=0, max_terms=0)


def test_case_checks():
    assert case_checks(parse_case("I-B3")) == ["relations", "endomorphism", "inverse", "braid", "coideal", "epsilon"]
    assert case_checks(parse_case("I-G2"))[-1] == "order"
    assert "commutator" in case_checks(parse_case("II-A7"))
    assert "commutator" not in case_checks(parse_case("II-A6"))
    assert case_checks(parse_case("II-E6"))[-1] == "tabulated"
    assert case_checks(parse_case("III-A7"))[-4:] == ["generators", "odd_lusztig", "semidirect", "ambient"]


def test_plan_filters_checks():
    cfg = SuiteConfig(suite="I-B3", checks="relations,braid", cache_dir=None)
    assert plan(cfg) == [("I-B3", "relations"), ("I-B3", "braid")]


def test_plan_all():
    tasks = plan(SuiteConfig(suite="all", cache_dir=None))
    assert tasks[0] == ("core", "scalar")
    assert ("classical", "classical") in tasks
    assert ("garside", "garside") in tasks
    assert all(suite != "II-E6" for suite, _ in tasks)


def test_evaluate_statuses(cfg):
    ok = evaluate("s", "c", Identity("ok", lambda: BoolResidual(True)), cfg)
    assert ok.status is CheckStatus.PASS
    assert ok.detail is None

    bad = evaluate("s", "c", Identity("bad", lambda: BoolResidual(False, "3 != 4")), cfg)
    assert bad.status is CheckStatus.FAIL
    assert bad.detail == "unequal: 3 != 4"


@pytest.mark.parametrize(
    "exc,status",
    [
        (BudgetExceeded("time", 10, 5), CheckStatus.SKIPPED),
        (DegreeCapExceeded((1, 2, 1, 2), 3), CheckStatus.SKIPPED),
        (RuntimeError("boom"), CheckStatus.FAIL),
    ],
)
def test_evaluate_errors(cfg, exc, status):
    row = evaluate("s", "c", Identity("x", _raise(exc)), cfg)
    assert row.status is status
    assert row.identity == "x"
    if status is CheckStatus.FAIL:
        assert row.detail == "RuntimeError: boom"


# verify long-only suites become a single skipped row without --long
def test_long_checks_are_gated(cfg):
    identities = identities_for("II-E6", "relations", cfg)
    assert len(identities) == 1
    row = evaluate("II-E6", "relations", identities[0], cfg)
    assert row.status is CheckStatus.SKIPPED
    assert row.detail == "requires --long"


def test_unknown_check(cfg):
    with pytest.raises(SuiteError):
        identities_for("core", "bogus", cfg)


def test_run_check_never_raises(cfg):
    with patch("services.suite_service.identities_for", side_effect=RuntimeError("boom")):
        rows = run_check("core", "scalar", cfg)
    assert len(rows) == 1
    assert rows[0].identity == "*"
    assert rows[0].status is CheckStatus.FAIL


def test_scalar_suite_passes():
    cfg = SuiteConfig(suite="core", checks="scalar", cache_dir=None)
    seen = []
    report = run_suite(cfg, on_rows=seen.append)
    assert report.suite == "core"
    assert len(seen) == 1
    assert report.rows
    assert failing(report.rows) == []
    assert exit_code(report) == 0


def test_small_case_suite():
    cfg = SuiteConfig(suite="I-B2", checks="relations,inverse,coideal", cache_dir=None)
    report = LocalSuiteService().run(cfg)
    assert {row.check for row in report.rows} == {"relations", "inverse", "coideal"}
    assert failing(report.rows) == []


def test_exit_code():
    passed = SuiteReport(suite="s", rows=[_row(CheckStatus.PASS)])
    skipped = SuiteReport(suite="s", rows=[_row(CheckStatus.PASS), _row(CheckStatus.SKIPPED)])
    failed = SuiteReport(suite="s", rows=[_row(CheckStatus.FAIL), _row(CheckStatus.SKIPPED)])
    assert exit_code(passed) == 0
    assert exit_code(skipped) == 1
    assert exit_code(skipped, allow_skip=True) == 0
    assert exit_code(failed, allow_skip=True) == 1
    assert failing(failed.rows) == failed.rows
