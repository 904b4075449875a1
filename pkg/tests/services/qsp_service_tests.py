# TO RUN: PYTHONPATH=src poetry run python -m pytest tests/services/qsp_service_tests.py -q
import pytest

from algebra.words import GenSymbol, UndefinedImageError
from models.enums import CaseVariant, GenKind
from models.rootdata import parse_case
from models.scalar import q, qint, qpow
from services.qsp_service import (
    CoidealContext,
    RelationInstance,
    get_algebra,
    get_context,
    relation_set,
    verify_coideal,
    verify_commutator_identity,
    verify_generator_forms,
    verify_relations,
)


def _failing(identities):
    return [ident.label for ident in identities if not ident.residual().is_zero()]


def test_case1_generators():
    ctx = get_context("I-A2")
    alg = ctx.alg
    assert ctx.variant is CaseVariant.I
    assert ctx.expand(ctx.B(1)) == alg.F(1) - alg.K(1, -1) * alg.E(1)
    assert ctx.symbols == [GenSymbol(GenKind.B, 1), GenSymbol(GenKind.B, 2)]


def test_case2_generators():
    ctx = get_context("II-A3")
    alg = ctx.alg
    # tau swaps 1 and 3
    assert ctx.expand(ctx.B(1)) == alg.F(1) - alg.K(1, -1) * alg.E(3)
    assert len(ctx.gens.cartan_part) == 2
    assert GenSymbol(GenKind.KPLUS, 2) in ctx.symbols


def test_contexts_are_shared():
    assert get_context("I-A2") is get_context(parse_case("i-a2"))
    assert get_context("I-A2").alg is get_algebra(parse_case("I-A2").root)


def test_context_rejects_wrong_algebra():
    with pytest.raises(ValueError):
        CoidealContext(parse_case("I-A2"), get_algebra(parse_case("I-B2").root))


def test_expand_unknown_node():
    ctx = get_context("I-A2")
    with pytest.raises(UndefinedImageError):
        ctx.expand(ctx.symbol(GenSymbol(GenKind.B, 3)))


@pytest.mark.parametrize("case_id", ["I-A2", "I-B2", "I-A1xA1", "I-A3", "II-A3", "II-A2"])
def test_relations_hold(case_id):
    ctx = get_context(case_id)
    identities = verify_relations(ctx)
    assert identities
    assert _failing(identities) == []


def test_case1_labels():
    labels = [rel.label for rel in relation_set(get_context("I-B2"))]
    assert "serre/aij=-2/i=2,j=1" in labels
    assert "serre/aij=-1/i=1,j=2" in labels


# verify a corrupted right-hand side is caught
def test_mutated_relation_fails():
    ctx = get_context("I-A2")
    rel = relation_set(ctx)[0]
    broken = RelationInstance(rel.label, rel.lhs, rel.rhs.scale(qint(2)))
    assert _failing(verify_relations(ctx, [broken])) == [rel.label]


@pytest.mark.parametrize("case_id", ["I-A2", "I-B2", "II-A3", "III-A3"])
def test_coideal_property(case_id):
    ctx = get_context(case_id)
    assert _failing(verify_coideal(ctx)) == []


def test_case3_relations_and_forms():
    ctx = get_context("III-A3")
    assert ctx.variant is CaseVariant.III
    assert _failing(verify_relations(ctx)) == []
    forms = verify_generator_forms(ctx)
    assert [f.label for f in forms] == ["generators/B2/ad=T_wX"]
    assert _failing(forms) == []


def test_extras_only_where_defined():
    assert verify_generator_forms(get_context("I-A2")) == []
    assert verify_commutator_identity(get_context("II-A2")) == []


def test_case3_torus_conjugation():
    ctx = get_context("III-A3")
    rels = {rel.label: rel for rel in relation_set(ctx)}
    # K_1 B_2 K_1^-1 = q B_2 since (alpha_1, alpha_2) = -1
    assert rels["K-B/i=1,j=2"].rhs == ctx.B(2).scale(qpow(1))
    assert rels["K-B/i=1,j=1"].rhs == ctx.B(1).scale(qpow(-2))
    torus = [rel for label, rel in rels.items() if label.startswith("K-B/")]
    assert len(torus) == 6
    assert _failing(verify_relations(ctx, torus)) == []


def test_case2_adjacent_orbit_serre():
    ctx = get_context("II-A2")
    rels = {rel.label: rel for rel in relation_set(ctx)}
    for i, j in [(1, 2), (2, 1)]:
        torus = ctx.KK(i, j).scale(q**-1) + ctx.KK(j, i).scale(q**2)
        rel = rels[f"serre/aij=-1/i={i},j={j}"]
        assert rel.rhs == (ctx.B(i) * torus).scale(qint(2))
        assert _failing(verify_relations(ctx, [rel])) == []
