# TO RUN: PYTHONPATH=src poetry run python -m pytest tests/algebra/words_tests.py -q
import pytest

from algebra.words import (
    AlgebraElement,
    AlgebraError,
    B,
    ContextMismatchError,
    E,
    F,
    GenSymbol,
    K,
    K_weight,
    UndefinedImageError,
    q_commutator,
    render_word,
    substitute,
)
from models.enums import GenKind
from models.scalar import ONE, q, qint


def test_product_is_free():
    x = E(1) * F(1)
    assert x.terms == {(GenSymbol(GenKind.E, 1), GenSymbol(GenKind.F, 1)): ONE}
    assert x != F(1) * E(1)


def test_add_zero_and_cancel():
    a = E(1) + F(2)
    assert a + AlgebraElement.zero() == a
    assert (a - a).is_zero()
    assert not (a - a)


def test_q_commutator():
    x = q_commutator(B(1), B(2))
    assert len(x) == 2
    assert x == B(1) * B(2) - (B(2) * B(1)).scale(q)
    assert q_commutator(B(1), B(2), 1) == B(1) * B(2) - B(2) * B(1)


def test_scalars_and_constants():
    x = (E(1) + 1).scale(qint(2))
    assert x.terms[()] == qint(2)
    assert AlgebraElement.const(3).constant() == 3
    assert E(1).constant() is None
    assert (E(1) / qint(2)).terms[(GenSymbol(GenKind.E, 1),)] == ONE / qint(2)


def test_powers():
    assert E(1) ** 0 == AlgebraElement.one()
    assert len((E(1) + F(1)) ** 2) == 4
    with pytest.raises(AlgebraError):
        E(1) ** -1


def test_context_mismatch():
    with pytest.raises(ContextMismatchError):
        E(1, "A2") + E(1, "B2")
    # context-free elements combine with anything
    assert (E(1, "A2") * F(1)).context == "A2"


def test_k_weight():
    assert K_weight((1, -2)) == K(1) * K(2, -1) * K(2, -1)
    assert str(GenSymbol(GenKind.KMINUS, 3)) == "K3^-1"
    assert GenSymbol(GenKind.KPLUS, 2).inverse() == GenSymbol(GenKind.KMINUS, 2)
    with pytest.raises(AlgebraError):
        GenSymbol(GenKind.E, 1).inverse()


def test_substitute():
    images = {GenSymbol(GenKind.B, 1): F(1) - K(1, -1) * E(1)}
    out = substitute(B(1) * B(1), images)
    assert len(out) == 4
    kept = substitute(B(1) * E(2), images, keep_missing=True)
    assert kept == (F(1) - K(1, -1) * E(1)) * E(2)
    with pytest.raises(UndefinedImageError):
        substitute(B(2), images, label="tau1")


def test_render():
    assert render_word(()) == "1"
    assert render_word((GenSymbol(GenKind.E, 1),) * 2 + (GenSymbol(GenKind.KMINUS, 2),) * 2) == "E1^2*K2^-2"
    assert str(F(1) - K(1, -1) * E(1)) == "F1 - K1^-1*E1"
    assert str(AlgebraElement.zero()) == "0"
