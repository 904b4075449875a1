# TO RUN: PYTHONPATH=src poetry run python -m pytest tests/services/braid_action_service_tests.py -q
import pytest

from algebra.words import GenSymbol
from algebra.lusztig import lusztig_map
from models.enums import Direction, GenKind, LusztigDirection
from models.rootdata import RootDataError
from models.scalar import q
from services.braid_action_service import BraidActionService, epsilon, tau_images, verify_epsilon
from services.qsp_service import get_context


def _failing(identities):
    return [ident.label for ident in identities if not ident.residual().is_zero()]


B1, B2 = GenSymbol(GenKind.B, 1), GenSymbol(GenKind.B, 2)


@pytest.fixture(scope="module")
def a2():
    return BraidActionService.for_case("I-A2")


def test_case1_images(a2):
    ctx = a2.ctx
    minus = a2.tau(1, "tau_minus")
    assert minus.label == "tau_minus1"
    assert minus.image(B2) == ctx.B(1) * ctx.B(2) - (ctx.B(2) * ctx.B(1)).scale(q)
    assert minus.image(B1) == ctx.B(1)
    # tau_i reads the tau_i^- words backwards
    assert a2.tau(1).image(B2) == ctx.B(2) * ctx.B(1) - (ctx.B(1) * ctx.B(2)).scale(q)


def test_tau_is_cached(a2):
    assert a2.tau(2, Direction.TAU) is a2.tau(2, "tau")
    assert a2.sigma_rank == 2


def test_tau_out_of_range(a2):
    with pytest.raises(RootDataError):
        a2.tau(3)
    with pytest.raises(RootDataError):
        tau_images(a2.ctx, 0, "tau")


@pytest.mark.parametrize("direction", ["tau", "tau_minus"])
def test_endomorphism_a2(a2, direction):
    for i in (1, 2):
        identities = a2.verify_endomorphism(i, direction)
        assert identities
        assert _failing(identities) == []


def test_inverse_a2(a2):
    identities = a2.verify_inverse(1) + a2.verify_inverse(2)
    assert len(identities) == 8
    assert _failing(identities) == []


def test_braid_a2(a2):
    identities = a2.verify_braid()
    assert [i.label for i in identities] == ["braid/tau1tau2/m=3/B1", "braid/tau1tau2/m=3/B2"]
    assert _failing(identities) == []


def test_apply_composes_left_to_right(a2):
    ctx = a2.ctx
    plus, minus = a2.tau(1), a2.tau(1, "tau_minus")
    x = ctx.B(2) * ctx.B(1)
    assert a2.apply((plus, minus), x) == ctx.nf(x)
    assert a2.apply((), x) == ctx.nf(x)


def test_b2_inverse_and_order():
    svc = BraidActionService.for_case("I-B2")
    assert _failing(svc.verify_inverse(1) + svc.verify_inverse(2)) == []
    order = svc.verify_finite_order()
    assert order[0].label == "order/(tau1tau2)^2/B1"
    assert _failing(order) == []


def test_finite_order_needs_rank_two(a2):
    with pytest.raises(RootDataError):
        a2.verify_finite_order()


@pytest.mark.parametrize("case_id", ["I-A1", "I-A2", "I-A1xA1", "I-B2"])
def test_epsilon(case_id):
    assert _failing(verify_epsilon(get_context(case_id))) == []


def test_epsilon_values():
    ctx = get_context("I-A1xA1")
    assert epsilon(ctx, 1, 2).is_zero()
    ctx = get_context("I-A2")
    alg = ctx.alg
    assert epsilon(ctx, 1, 2) == (alg.F(2) * alg.K(1, -1) * alg.E(1)).scale(q**-1 - q)
    # the a_ij = -1 difference, checked directly against T_1^-1
    minus = tau_images(ctx, 1, Direction.TAU_MINUS).images.image(GenSymbol(GenKind.B, 2))
    t_inv = lusztig_map(alg, 1, LusztigDirection.INVERSE)
    diff = t_inv(ctx.expand(ctx.B(2))) - ctx.nf(minus)
    assert (diff - ctx.nf(epsilon(ctx, 1, 2))).is_zero()
    with pytest.raises(RootDataError):
        verify_epsilon(get_context("II-A3"))


def test_case2_small():
    svc = BraidActionService.for_case("II-A3")
    # the restricted braid group of II-A3 is of type B2
    assert svc.sigma_rank == 2
    assert _failing(svc.verify_inverse(1)) == []


def test_case3_middle_generator_round_trip():
    svc = BraidActionService.for_case("III-A3")
    ctx = svc.ctx
    plus, minus = svc.tau(1, Direction.TAU), svc.tau(1, Direction.TAU_MINUS)
    # tau_1(B_2) only carries inverse torus factors
    symbols = plus.image(B2).symbols()
    assert GenSymbol(GenKind.KMINUS, 1) in symbols
    assert GenSymbol(GenKind.KPLUS, 1) not in symbols
    assert GenSymbol(GenKind.KPLUS, 3) not in symbols
    assert (svc.apply((plus, minus), ctx.B(2)) - ctx.nf(ctx.B(2))).is_zero()
    assert (svc.apply((minus, plus), ctx.B(2)) - ctx.nf(ctx.B(2))).is_zero()
    cartan = svc.verify_cartan()
    assert cartan
    assert _failing(cartan) == []
    assert svc.verify_tabulated() == []


def test_case3_small():
    svc = BraidActionService.for_case("III-A3")
    assert svc.sigma_rank == 1
    assert _failing(svc.verify_odd_lusztig()) == []
    assert _failing(svc.verify_inverse(1)) == []


def test_case3_checks_need_case3(a2):
    with pytest.raises(RootDataError):
        a2.verify_odd_lusztig()
    assert a2.verify_cartan() == []
