# TO RUN: PYTHONPATH=src poetry run python -m pytest tests/services/eval_service_tests.py -q
import pytest

from algebra.parser import ParseError, UnknownNodeError
from models.rootdata import RootDataError
from models.scalar import q
from services.eval_service import EvalResult, Evaluator, MakeEvalService


@pytest.fixture
def ev():
    return Evaluator("I-A2")


def test_nf_render(ev):
    assert ev.render("nf(E1*F1)") == "F1*E1 + (K1 - K1^-1)/(q - q^-1)"
    assert ev.render("E1 - E1") == "0"


def test_coideal_symbols_expand(ev):
    assert ev.run("B1 - F1 + K1^-1*E1").is_zero()


def test_lusztig_commands(ev):
    alg = ev.ctx.alg
    assert ev.run("Tinv(1, F1)") == alg.nf(-(alg.E(1) * alg.K(1)))
    assert ev.run("T(2, E2)") == alg.nf(-(alg.F(2) * alg.K(2)))


def test_tau_command(ev):
    ctx = ev.ctx
    expected = ctx.nf(ctx.B(1) * ctx.B(2) - (ctx.B(2) * ctx.B(1)).scale(q))
    assert ev.run("tau(1, -, B2)") == expected
    with pytest.raises(RootDataError):
        ev.run("tau(3, +, B1)")


def test_case_switch(ev):
    assert ev.render("case i-b2") == "case I-B2"
    assert ev.case_id == "I-B2"
    # B2 of I-B2 expands with the new root datum
    assert ev.run("B2 - F2 + K2^-1*E2").is_zero()
    with pytest.raises(RootDataError):
        ev.run("case II-B3")
    assert ev.case_id == "I-B2"


# verify errors inside a command point into the whole line
def test_parse_error_offset(ev):
    with pytest.raises(ParseError) as err:
        ev.run("nf(E1*(F1)")
    assert err.value.position == 9
    with pytest.raises(UnknownNodeError):
        ev.run("E3")


def test_service_evaluate():
    svc = MakeEvalService()
    assert svc.evaluate("I-A2", "E1 - E1") == EvalResult("0", True)
    out = svc.evaluate("I-A2", "nf(E1*K1)")
    assert not out.is_zero
    assert out.rendered == "q^-2*K1*E1"
    assert svc.evaluate("I-A2", "case I-B3") == EvalResult("case I-B3", False)
