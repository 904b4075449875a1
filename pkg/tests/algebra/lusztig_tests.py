# TO RUN: PYTHONPATH=src poetry run python -m pytest tests/algebra/lusztig_tests.py -q
import pytest

from algebra.lusztig import (
    GeneratorImages,
    NormalizedMap,
    apply_chain,
    compose,
    lusztig_images,
    lusztig_map,
    t_wX,
    verify_identities,
    verify_T_properties,
)
from algebra.uqg import UqAlgebra
from algebra.words import AlgebraElement, GenSymbol, UndefinedImageError
from models.enums import GenKind
from models.rootdata import build_root_datum
from models.scalar import q


@pytest.fixture(scope="module")
def a2():
    return UqAlgebra(build_root_datum("A", 2))


@pytest.fixture(scope="module")
def b2():
    return UqAlgebra(build_root_datum("B", 2))


def test_inverse_images_a2(a2):
    t = lusztig_map(a2, 1, "inverse")
    E1, E2, F1, K1, K2 = a2.E(1), a2.E(2), a2.F(1), a2.K(1), a2.K(2)
    assert t(F1) == a2.nf(-(E1 * K1))
    assert t(E1) == a2.nf(-(a2.K(1, -1) * F1))
    assert t(K2) == a2.nf(K2 * K1)
    assert t(K1) == a2.nf(a2.K(1, -1))
    assert a2.equal(t(E2), E2 * E1 - (E1 * E2).scale(q**-1))


def test_forward_images_a2(a2):
    t = lusztig_map(a2, 1, "forward")
    E1, E2, F1 = a2.E(1), a2.E(2), a2.F(1)
    assert t(F1) == a2.nf(-(a2.K(1, -1) * E1))
    assert a2.equal(t(E2), E1 * E2 - (E2 * E1).scale(q**-1))


# verify T1 respects the E1 F1 commutator
def test_map_is_homomorphism(a2):
    t = lusztig_map(a2, 1, "forward")
    E1, F1 = a2.E(1), a2.F(1)
    lhs = t(E1 * F1 - F1 * E1)
    rhs = t((a2.K(1) - a2.K(1, -1)) / (q - q**-1))
    assert lhs == rhs


def test_inverse_round_trip_a2(a2):
    results = verify_identities(verify_T_properties(a2))
    assert results
    assert all(ok for _, ok in results), [label for label, ok in results if not ok]
    assert any(label.startswith("braid/T1T2/m=3") for label, _ in results)


def test_inverse_round_trip_b2(b2):
    results = verify_identities(verify_T_properties(b2, braid=False))
    assert all(ok for _, ok in results)


def test_chain_and_compose(a2):
    E1 = a2.E(1)
    # T1 T2 (E1) = E2 in A2
    assert apply_chain(a2, [(1, 1), (2, 1)], E1) == a2.nf(a2.E(2))
    fwd = lusztig_images(a2, 1, "forward")
    inv = lusztig_images(a2, 1, "inverse")
    both = compose(a2, fwd, inv)
    assert both.label == "T1T1^-1"
    for g, image in both.images.items():
        assert a2.equal(image, AlgebraElement.word([g], 1, a2.name))


def test_images_require_every_symbol(a2):
    phi = GeneratorImages({GenSymbol(GenKind.E, 1): a2.E(2)}, "partial", a2.name)
    assert GenSymbol(GenKind.E, 1) in phi
    with pytest.raises(UndefinedImageError):
        phi.image(GenSymbol(GenKind.F, 1))
    with pytest.raises(UndefinedImageError):
        NormalizedMap.from_images(a2, phi)(a2.F(1))


def test_t_wx_rank_check(a2):
    with pytest.raises(ValueError):
        t_wX(a2, 2)
