# TO RUN: PYTHONPATH=src poetry run python -m pytest tests/services/chevalley_service_tests.py -q
import pytest
from sympy import Matrix, eye

from algebra.words import B
from models.scalar import q
from services.chevalley_service import (
    ChevalleyError,
    ad_braid,
    exp_nilpotent,
    realize,
    specialise,
    unit,
    verify_classical,
    verify_q1_degeneration,
)


def _failing(identities):
    return [ident.label for ident in identities if not ident.residual().is_zero()]


def test_exp_nilpotent():
    assert exp_nilpotent(unit(3, 1, 2)) == eye(3) + unit(3, 1, 2)
    x = unit(3, 1, 2) + unit(3, 2, 3)
    assert exp_nilpotent(x) == eye(3) + x + (x * x) / 2
    with pytest.raises(ChevalleyError):
        exp_nilpotent(Matrix([[1, 0], [0, 1]]))


def test_sl2_reflection():
    real = realize("I-A1")
    s = ad_braid(real, 1)
    assert s(real.e[1]) == -real.f[1]
    assert s(real.h[1]) == -real.h[1]


# verify the case III generator b_2 of sp-type in sl_4
def test_case3_generators():
    real = realize("III-A3")
    assert real.b(2) == unit(4, 3, 2) + unit(4, 1, 4)
    assert real.b(1) == real.f[1]
    assert set(real.k) == {"e1", "b1", "h1", "e3", "b3", "h3", "b2"}


@pytest.mark.parametrize("case_id", ["I-B3", "I-C3", "II-A6", "II-D5", "III-A3", "III-A5"])
def test_realizations_are_consistent(case_id):
    real = realize(case_id)
    real.check()
    for x in real.k.values():
        assert real.theta(x) == x


@pytest.mark.parametrize("case_id", ["II-E6", "I-G2", "I-F4"])
def test_no_realization(case_id):
    with pytest.raises(ChevalleyError):
        realize(case_id)


@pytest.mark.parametrize("case_id", ["I-A2", "I-B3", "I-C3", "II-A6", "II-D5", "III-A3"])
def test_classical_identities(case_id):
    identities = verify_classical(case_id)
    assert identities
    assert _failing(identities) == []


@pytest.mark.slow
@pytest.mark.parametrize("case_id", ["II-A7", "III-A7"])
def test_classical_identities_large(case_id):
    assert _failing(verify_classical(case_id)) == []


def test_case3_permutes_odd_generators():
    labels = {i.label for i in verify_classical("III-A3")}
    assert "classical/III-A3/Adbj/i=1,j=1" in labels
    assert "classical/III-A3/square/j=1" in labels


def test_specialise():
    real = realize("III-A3")
    x = (B(1) * B(2)).scale(q) - B(2) * B(1)
    assert specialise(real, x) == real.b(1) * real.b(2) - real.b(2) * real.b(1)


def test_q1_degeneration():
    identities = verify_q1_degeneration(2)
    assert len(identities) == 3
    assert _failing(identities) == []
