# TO RUN: PYTHONPATH=src poetry run python -m pytest tests/services/garside_service_tests.py -q
import pytest

from models.rootdata import RootDataError, build_root_datum, parse_case
from services.garside_service import (
    BraidWordError,
    CoxeterElement,
    braid_equal,
    coxeter_image,
    coxeter_ops,
    garside_normal_form,
    longest_element,
    parse_braid_word,
    render_braid_word,
    soundness_cross_check,
    verify_sigma_embedding,
)


@pytest.fixture
def a2():
    return build_root_datum("A", 2)


def _failing(identities):
    return [ident.label for ident in identities if not ident.residual().is_zero()]


def test_coxeter_ops(a2):
    s1 = CoxeterElement.reflection(a2, 1)
    s2 = CoxeterElement.reflection(a2, 2)
    assert coxeter_ops(s1, s1, "mul").is_identity()
    assert coxeter_ops(s1 * s2 * s1, None, "length") == 3
    assert s1 * s2 * s1 == longest_element(a2)
    left, right = coxeter_ops(s1 * s2, None, "descents")
    assert left == {1}
    assert right == {2}
    assert coxeter_ops(s1 * s2, None, "inverse") == s2 * s1
    assert str(s1 * s2) == "s1s2"
    with pytest.raises(ValueError):
        coxeter_ops(s1, None, "mul")
    with pytest.raises(ValueError):
        coxeter_ops(s1, s2, "conjugate")


def test_mixed_root_data(a2):
    with pytest.raises(RootDataError):
        CoxeterElement.reflection(a2, 1) * CoxeterElement.reflection(build_root_datum("B", 2), 1)


def test_longest_element_lengths():
    for name, rank, count in [("B", 3, 9), ("G", 2, 6), ("D", 5, 20)]:
        rd = build_root_datum(name, rank)
        assert longest_element(rd).length() == count


def test_normal_form_examples(a2):
    delta = garside_normal_form(a2, "s1 s2 s1")
    assert delta.infimum == 1
    assert delta.factors == ()
    empty = garside_normal_form(a2, "")
    assert (empty.infimum, empty.factors) == (0, ())
    square = garside_normal_form(a2, "s1 s1")
    assert square.infimum == 0
    assert [str(x) for x in square.factors] == ["s1", "s1"]
    assert str(square) == "D^0 (s1) (s1)"


def test_negative_letters(a2):
    inverse = garside_normal_form(a2, "s1^-1")
    assert inverse.infimum == -1
    assert [str(x) for x in inverse.factors] == ["s1s2"]
    assert garside_normal_form(a2, "s2 s2^-1") == garside_normal_form(a2, "")
    # the word read back from the normal form is the same braid
    nf = garside_normal_form(a2, "s1 s2^-1 s1 s1")
    assert braid_equal(a2, nf.to_word(a2), "s1 s2^-1 s1 s1")


def test_braid_equal(a2):
    assert braid_equal(a2, "s1 s2 s1", "s2 s1 s2")
    assert not braid_equal(a2, "s1 s2", "s2 s1")
    assert braid_equal(build_root_datum("A", 3), "s1 s3", "s3 s1")
    # same Weyl image, different braids
    assert not braid_equal(a2, "s1 s1", "")
    assert coxeter_image(a2, "s1 s1").is_identity()


def test_parse_braid_word(a2):
    assert parse_braid_word("s1 s2^-2 s1") == ((1, 1), (2, -1), (2, -1), (1, 1))
    assert parse_braid_word("s1*s2") == ((1, 1), (2, 1))
    assert render_braid_word(((1, 1), (2, -1))) == "s1 s2^-1"
    with pytest.raises(BraidWordError):
        parse_braid_word("t1")
    with pytest.raises(BraidWordError):
        parse_braid_word("s3", a2)


@pytest.mark.parametrize("case_id", ["I-B3", "II-A7", "II-A6", "II-D5", "II-E6", "III-A7", "III-A5"])
def test_sigma_embedding(case_id):
    identities = verify_sigma_embedding(parse_case(case_id))
    assert identities
    assert _failing(identities) == []


def test_sigma_embedding_labels():
    labels = [i.label for i in verify_sigma_embedding(parse_case("II-E6"))]
    assert "garside/II-E6/braid/i=2,j=3/m=4" in labels
    assert "garside/II-E6/tau-fixed/i=1" in labels
    labels = [i.label for i in verify_sigma_embedding(parse_case("III-A7"))]
    assert "garside/III-A7/commutes-wX/i=1" in labels


def test_soundness_cross_check():
    identities = soundness_cross_check(("A3", "B3"), pairs=100, seed=7)
    assert [i.label for i in identities] == ["garside/soundness/A3", "garside/soundness/B3"]
    assert _failing(identities) == []
