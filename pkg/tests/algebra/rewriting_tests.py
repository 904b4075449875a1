# TO RUN: PYTHONPATH=src poetry run python -m pytest tests/algebra/rewriting_tests.py -q
import copy
import pickle

import pytest

from algebra.rewriting import (
    DegreeCapExceeded,
    RewritingSystem,
    complete,
    deglex_key,
    leading_word,
    overlaps_between,
)
from algebra.uqg import block_relators
from models.rootdata import build_root_datum
from models.scalar import ONE, qint


def test_deglex_order():
    assert deglex_key((2, 1)) > deglex_key((1, 2))
    assert deglex_key((1, 1, 1)) > deglex_key((2, 2))
    assert leading_word({(1, 2): ONE, (2, 1): -ONE, (2,): ONE}) == (2, 1)


def test_overlaps_between():
    found = [ov.word for ov in overlaps_between((2, 2, 1), (2, 1, 1))]
    assert found == [(2, 2, 1, 1)]
    assert list(overlaps_between((2, 1), (2, 1))) == []


# verify a commuting pair completes to a single rule sorting the word
def test_commutation_rule():
    system = complete([{(2, 1): ONE, (1, 2): -ONE}], label="commuting")
    assert system.rules == {(2, 1): {(1, 2): ONE}}
    assert system.certified
    assert system.reduce_word((2, 2, 1, 1)) == {(1, 1, 2, 2): ONE}


def test_a2_serre_orientation():
    system = complete(block_relators(build_root_datum("A", 2)), label="A2")
    assert system.certified
    assert system.verify_certificate()
    assert system.rules[(2, 1, 1)] == {(1, 2, 1): qint(2), (1, 1, 2): -ONE}
    assert system.rules[(2, 2, 1)] == {(2, 1, 2): qint(2), (1, 2, 2): -ONE}


def test_reduce_is_linear():
    system = complete(block_relators(build_root_datum("A", 2)), label="A2")
    # the Serre relator itself reduces to zero
    assert system.reduce({(2, 1, 1): ONE, (1, 2, 1): -qint(2), (1, 1, 2): ONE}) == {}
    assert system.reduce({(1, 2): ONE}) == {(1, 2): ONE}
    assert system.is_irreducible((1, 2, 1))
    assert not system.is_irreducible((1, 2, 1, 1))


# verify a cap below the first overlap leaves the system uncertified
def test_low_cap_is_uncertified():
    system = complete(block_relators(build_root_datum("A", 2)), degree_cap=3, label="A2")
    assert not system.certified
    assert system.skipped_overlap is not None
    assert len(system.skipped_overlap) > 3
    assert "uncertified" in repr(system)


def test_relator_longer_than_cap():
    with pytest.raises(DegreeCapExceeded) as err:
        complete(block_relators(build_root_datum("A", 2)), degree_cap=2, label="A2")
    assert err.value.cap == 2


def test_invalid_cap():
    with pytest.raises(ValueError):
        complete([], degree_cap=0)


def test_empty_system():
    system = RewritingSystem({})
    assert len(system) == 0
    assert system.reduce_word((3, 1, 2)) == {(3, 1, 2): ONE}
    assert system.verify_certificate()


@pytest.mark.parametrize("name", ["B2", "A3"])
def test_small_types_certify(name):
    rd = build_root_datum(name[0], int(name[1:]))
    system = complete(block_relators(rd), label=name)
    assert system.certified
    assert system.verify_certificate()


# verify the error survives copy and pickling with its fields intact
def test_degree_cap_error_copy_and_pickle():
    err = DegreeCapExceeded((1, 2, 1), 2)
    for clone in (copy.copy(err), pickle.loads(pickle.dumps(err))):
        assert isinstance(clone, DegreeCapExceeded)
        assert clone.overlap == (1, 2, 1)
        assert clone.cap == 2
        assert str(clone) == str(err)

    custom = pickle.loads(pickle.dumps(DegreeCapExceeded((), 4, "unreduced residual")))
    assert str(custom) == "unreduced residual"
