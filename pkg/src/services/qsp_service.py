"""Coideal subalgebras U'_q(k) of U_q(g) for the three symmetric-pair cases.

Elements of U'_q(k) are written as formal expressions in coideal symbols:
B_i for every node, the torus K_j^{+-1} in case II, and E_j, K_j^{+-1} for odd
j in case III (where B_j = F_j for odd j). ``CoidealContext.expand`` replaces
the B symbols by their definitions; every check then runs in the normal form
of U_q(g).

    case I     B_i = F_i - K_i^-1 E_i
    case II    B_i = F_i - K_i^-1 E_tau(i),  plus K_i K_tau(i)^-1
    case III   B_i = F_i (i odd),  F_i - K_i^-1 ad(E_{i-1} E_{i+1})(E_i) (i even)
"""
from __future__ import annotations

import logging
import threading
from collections.abc import Callable, Mapping
from dataclasses import dataclass
from typing import NamedTuple

from algebra.lusztig import certified_residual, evaluate_images, t_wX
from algebra.rewriting import DEFAULT_DEGREE_CAP
from algebra.uqg import NormalElement, SystemLoader, TensorElement, UqAlgebra
from algebra.words import AlgebraElement, GenSymbol, K_weight, UndefinedImageError, q_commutator, substitute
from models.enums import CaseVariant, GenKind
from models.report import Identity, TermsResidual
from models.rootdata import CaseSpec, RootDatum, parse_case
from models.scalar import ONE, Scalar, divide, q, qbinomial, qint, qpow
from services import budget

logger = logging.getLogger(__name__)

_ALGEBRAS: dict[tuple, UqAlgebra] = {}
_ALGEBRAS_LOCK = threading.RLock()


def get_algebra(
    rd: RootDatum, *, degree_cap: int = DEFAULT_DEGREE_CAP, system_loader: SystemLoader | None = None
) -> UqAlgebra:
    """One UqAlgebra per root datum and cap, so normal-form caches are shared."""
    key = (rd.name, rd.cartan, degree_cap)
    with _ALGEBRAS_LOCK:
        alg = _ALGEBRAS.get(key)
        if alg is None:
            alg = UqAlgebra(rd, degree_cap=degree_cap, system_loader=system_loader)
            _ALGEBRAS[key] = alg
    return alg


@dataclass(frozen=True)
class GeneratorSet:
    case: CaseSpec
    b: dict[int, AlgebraElement]
    cartan_part: list[AlgebraElement]


class RelationInstance(NamedTuple):
    label: str
    lhs: AlgebraElement
    rhs: AlgebraElement


def coideal_generators(case: CaseSpec, alg: UqAlgebra) -> GeneratorSet:
    rd = case.root
    b: dict[int, AlgebraElement] = {}
    cartan: list[AlgebraElement] = []
    match case.variant:
        case CaseVariant.I:
            for i in rd.nodes:
                b[i] = alg.F(i) - alg.K(i, -1) * alg.E(i)
        case CaseVariant.IIA | CaseVariant.IID | CaseVariant.IIE:
            for i in rd.nodes:
                t = case.tau_of(i)
                b[i] = alg.F(i) - alg.K(i, -1) * alg.E(t)
                if t != i:
                    cartan.append(alg.K(i) * alg.K(t, -1))
        case CaseVariant.III:
            for i in rd.nodes:
                if i % 2:
                    b[i] = alg.F(i)
                    cartan += [alg.E(i), alg.F(i), alg.K(i), alg.K(i, -1)]
                else:
                    lifted = alg.adjoint_action(alg.E(i - 1) * alg.E(i + 1), alg.E(i))
                    b[i] = alg.F(i) - alg.K(i, -1) * lifted
    return GeneratorSet(case, b, cartan)


class CoidealContext:
    """A case together with its ambient algebra and generator expansions."""

    def __init__(self, case: CaseSpec, alg: UqAlgebra):
        if alg.rd.cartan != case.root.cartan:
            raise ValueError(f"algebra {alg.name} does not match case {case.case_id}")
        self.case = case
        self.alg = alg
        self.name = alg.name
        self.gens = coideal_generators(case, alg)
        self._b_images = {GenSymbol(GenKind.B, i): x for i, x in self.gens.b.items()}
        self._inclusion: dict[GenSymbol, NormalElement] | None = None

    @property
    def variant(self) -> CaseVariant:
        return self.case.variant

    @property
    def rd(self) -> RootDatum:
        return self.case.root

    @property
    def rank(self) -> int:
        return self.rd.rank

    def tau_of(self, i: int) -> int:
        return self.case.tau_of(i)

    @property
    def symbols(self) -> list[GenSymbol]:
        """Generators of U'_q(k) as formal symbols; maps are given on these."""
        out = [GenSymbol(GenKind.B, i) for i in self.rd.nodes]
        match self.variant:
            case CaseVariant.I:
                pass
            case CaseVariant.III:
                for j in self.case.wx:
                    out += [GenSymbol(GenKind.E, j), GenSymbol(GenKind.KPLUS, j), GenSymbol(GenKind.KMINUS, j)]
            case _:
                for j in self.rd.nodes:
                    out += [GenSymbol(GenKind.KPLUS, j), GenSymbol(GenKind.KMINUS, j)]
        return out

    # formal constructors

    def B(self, i: int) -> AlgebraElement:
        return AlgebraElement.gen(GenKind.B, self.rd.check_node(i), self.name)

    def E(self, i: int) -> AlgebraElement:
        return self.alg.E(i)

    def K(self, i: int, exponent: int = 1) -> AlgebraElement:
        return self.alg.K(i, exponent)

    def KK(self, i: int, j: int) -> AlgebraElement:
        """K_i K_j^-1."""
        return self.alg.K(i) * self.alg.K(j, -1)

    def const(self, c) -> AlgebraElement:
        return self.alg.const(c)

    def symbol(self, s: GenSymbol) -> AlgebraElement:
        return AlgebraElement.word([s], 1, self.name)

    # evaluation in U_q(g)

    def expand(self, a: AlgebraElement) -> AlgebraElement:
        for g in a.symbols():
            if g.kind is GenKind.B and g not in self._b_images:
                raise UndefinedImageError(g, f"U'_q(k) of {self.case.case_id}")
        return substitute(a, self._b_images, keep_missing=True, context=self.name)

    def nf(self, a: AlgebraElement) -> NormalElement:
        return self.alg.normal_form(self.expand(a))

    def inclusion(self) -> dict[GenSymbol, NormalElement]:
        if self._inclusion is None:
            self._inclusion = {s: self.nf(self.symbol(s)) for s in self.symbols}
        return self._inclusion

    def evaluate(self, images: Mapping[GenSymbol, NormalElement], a: AlgebraElement, label: str = "") -> NormalElement:
        """Value in U_q(g) of the formal element ``a`` with symbols sent to ``images``."""
        return evaluate_images(self.alg, images, a, label=label, on_terms=budget.checkpoint)

    def residual(self, a: AlgebraElement, b: AlgebraElement) -> NormalElement:
        return self.nf(a - b)


_CONTEXTS: dict[tuple, CoidealContext] = {}
# taken before _ALGEBRAS_LOCK, never after
_CONTEXTS_LOCK = threading.RLock()


def get_context(
    case: CaseSpec | str, *, degree_cap: int = DEFAULT_DEGREE_CAP, system_loader: SystemLoader | None = None
) -> CoidealContext:
    case = parse_case(case) if isinstance(case, str) else case
    key = (case.case_id, case.root.cartan, degree_cap)
    with _CONTEXTS_LOCK:
        ctx = _CONTEXTS.get(key)
        if ctx is None:
            alg = get_algebra(case.root, degree_cap=degree_cap, system_loader=system_loader)
            ctx = CoidealContext(case, alg)
            _CONTEXTS[key] = ctx
    return ctx


# relations


def serre_lhs(ctx: CoidealContext, i: int, j: int, coeffs: Callable[[int, int], Scalar] | None = None) -> AlgebraElement:
    """sum_s (-1)^s [n choose s]_i B_i^(n-s) B_j B_i^s with n = 1 - a_ij."""
    n = 1 - ctx.rd.a(i, j)
    d = ctx.rd.d_of(i)
    coeffs = coeffs or (lambda n_, s: qbinomial(n_, s, d))
    Bi, Bj = ctx.B(i), ctx.B(j)
    out = AlgebraElement.zero(ctx.name)
    for s in range(n + 1):
        c = coeffs(n, s)
        out = out + (Bi ** (n - s) * Bj * Bi**s).scale(c if s % 2 == 0 else -c)
    return out


def _case1_rhs(ctx: CoidealContext, i: int, j: int) -> AlgebraElement:
    a = ctx.rd.a(i, j)
    Bi, Bj = ctx.B(i), ctx.B(j)
    qinv = q**-1
    match a:
        case 0:
            return AlgebraElement.zero(ctx.name)
        case -1:
            return Bj.scale(-(ctx.alg.qi(i) ** -1))
        case -2:
            return (Bi * Bj - Bj * Bi).scale(-qinv * qint(2) ** 2)
        case -3:
            return (
                (Bi * Bi * Bj + Bj * Bi * Bi).scale(-qinv * (qint(3) ** 2 + 1))
                + (Bi * Bj * Bi).scale(qinv * qint(2) * (qint(2) * qint(4) + q**2 + q**-2))
                - Bj.scale(q**-2 * qint(3) ** 2)
            )
    raise ValueError(f"a_ij = {a} has no relation")


def _case1_relations(ctx: CoidealContext) -> list[RelationInstance]:
    rels: list[RelationInstance] = []
    for i in ctx.rd.nodes:
        for j in ctx.rd.nodes:
            if i == j:
                continue
            a = ctx.rd.a(i, j)
            if a == 0 and i > j:
                continue
            rels.append(RelationInstance(f"serre/aij={a}/i={i},j={j}", serre_lhs(ctx, i, j), _case1_rhs(ctx, i, j)))
    return rels


def _case2_relations(ctx: CoidealContext) -> list[RelationInstance]:
    rd = ctx.rd
    rels: list[RelationInstance] = []
    q_gap = q - q**-1
    for i in rd.nodes:
        ti = ctx.tau_of(i)
        if ti != i:
            torus = ctx.KK(i, ti)
            for j in rd.nodes:
                exponent = rd.pairing(ti, j) - rd.pairing(i, j)
                rels.append(
                    RelationInstance(
                        f"torus/i={i},j={j}", torus * ctx.B(j), (ctx.B(j) * torus).scale(qpow(exponent))
                    )
                )
    for i in rd.nodes:
        ti = ctx.tau_of(i)
        for j in rd.nodes:
            if i == j:
                continue
            a = rd.a(i, j)
            Bi, Bj = ctx.B(i), ctx.B(j)
            if a == 0:
                if i > j:
                    continue
                rhs = AlgebraElement.zero(ctx.name)
                if ti == j:
                    rhs = (ctx.KK(i, ti) - ctx.KK(ti, i)).scale(divide(ONE, q_gap))
                rels.append(RelationInstance(f"commute/i={i},j={j}", Bi * Bj - Bj * Bi, rhs))
            elif a == -1:
                rhs = AlgebraElement.zero(ctx.name)
                if ti == i:
                    rhs = rhs - Bj.scale(q**-1)
                if ti == j:
                    torus = ctx.KK(i, ti).scale(q**-1) + ctx.KK(ti, i).scale(q**2)
                    rhs = rhs + (Bi * torus).scale(qint(2))
                rels.append(RelationInstance(f"serre/aij=-1/i={i},j={j}", serre_lhs(ctx, i, j), rhs))
    return rels


def _case3_relations(ctx: CoidealContext) -> list[RelationInstance]:
    rd = ctx.rd
    rels: list[RelationInstance] = []
    q_gap = q - q**-1
    # conjugation by K_i scales B_j by q^{-(alpha_i, alpha_j)}
    for i in ctx.case.wx:
        for j in rd.nodes:
            rels.append(
                RelationInstance(
                    f"K-B/i={i},j={j}",
                    ctx.K(i) * ctx.B(j) * ctx.K(i, -1),
                    ctx.B(j).scale(qpow(-rd.pairing(i, j))),
                )
            )
    for i in ctx.case.wx:
        for j in rd.nodes:
            rhs = AlgebraElement.zero(ctx.name)
            if i == j:
                rhs = (ctx.K(i) - ctx.K(i, -1)).scale(divide(ONE, q_gap))
            rels.append(
                RelationInstance(f"E-B/i={i},j={j}", ctx.E(i) * ctx.B(j) - ctx.B(j) * ctx.E(i), rhs)
            )
    for i in rd.nodes:
        for j in rd.nodes:
            if i >= j or rd.a(i, j) != 0:
                continue
            rels.append(
                RelationInstance(
                    f"commute/i={i},j={j}", ctx.B(i) * ctx.B(j) - ctx.B(j) * ctx.B(i), AlgebraElement.zero(ctx.name)
                )
            )
    for i in rd.nodes:
        for j in rd.nodes:
            if i == j or rd.a(i, j) != -1:
                continue
            if i % 2:
                rels.append(RelationInstance(f"serre/i-odd/i={i},j={j}", serre_lhs(ctx, i, j), AlgebraElement.zero(ctx.name)))
                continue
            other = i + 1 if j == i - 1 else i - 1
            rhs = (ctx.B(j) * ctx.E(j) * ctx.E(other)).scale(q_gap**2) + (
                ctx.K(j, -1).scale(q**-1) + ctx.K(j).scale(q)
            ) * ctx.E(other)
            rels.append(RelationInstance(f"serre/i-even/i={i},j={j}", serre_lhs(ctx, i, j), rhs.scale(-(q**-1))))
    return rels


def relation_set(ctx: CoidealContext) -> list[RelationInstance]:
    match ctx.variant:
        case CaseVariant.I:
            return _case1_relations(ctx)
        case CaseVariant.III:
            return _case3_relations(ctx)
    return _case2_relations(ctx)


def verify_relations(ctx: CoidealContext, relations: list[RelationInstance] | None = None) -> list[Identity]:
    relations = relation_set(ctx) if relations is None else relations
    return [
        Identity(rel.label, certified_residual(ctx.alg, lambda r=rel: ctx.residual(r.lhs, r.rhs)))
        for rel in relations
    ]


# coideal property


def _tensor_identity(ctx: CoidealContext, label: str, x: AlgebraElement, expected: TensorElement) -> Identity:
    alg = ctx.alg

    def compute() -> TermsResidual:
        return TermsResidual(alg.normalize_tensor(alg.coproduct(ctx.expand(x)) - expected))

    return Identity(label, certified_residual(alg, compute))


def verify_coideal(ctx: CoidealContext) -> list[Identity]:
    """Explicit coproduct formulas whose left legs lie in U'_q(k)."""
    alg = ctx.alg
    one = alg.one()
    pure = TensorElement.pure
    identities: list[Identity] = []
    for i in ctx.rd.nodes:
        Bi = ctx.expand(ctx.B(i))
        match ctx.variant:
            case CaseVariant.I:
                expected = pure(Bi, alg.K(i, -1)) + pure(one, Bi)
            case CaseVariant.III:
                if i % 2 == 0:
                    continue
                expected = pure(Bi, alg.K(i, -1)) + pure(one, Bi)
            case _:
                k = ctx.KK(ctx.tau_of(i), i)
                expected = pure(Bi, alg.K(i, -1)) + pure(k, Bi) + pure(one - k, alg.F(i))
        identities.append(_tensor_identity(ctx, f"coideal/B{i}", ctx.B(i), expected))
    if ctx.variant is CaseVariant.III:
        for j in ctx.case.wx:
            Ej, Kj, Kinv = alg.E(j), alg.K(j), alg.K(j, -1)
            identities.append(_tensor_identity(ctx, f"coideal/E{j}", Ej, pure(Ej, one) + pure(Kj, Ej)))
            identities.append(_tensor_identity(ctx, f"coideal/K{j}", Kj, pure(Kj, Kj)))
            identities.append(_tensor_identity(ctx, f"coideal/K{j}^-1", Kinv, pure(Kinv, Kinv)))
    elif ctx.variant is not CaseVariant.I:
        for i in ctx.rd.nodes:
            ti = ctx.tau_of(i)
            if ti != i:
                k = ctx.KK(i, ti)
                identities.append(_tensor_identity(ctx, f"coideal/K{i}K{ti}^-1", k, pure(k, k)))
    return identities


def verify_generator_forms(ctx: CoidealContext) -> list[Identity]:
    """Case III: the ad-form of each even generator equals F_i - K_i^-1 T_wX(E_i)."""
    if ctx.variant is not CaseVariant.III:
        return []
    alg = ctx.alg
    identities: list[Identity] = []
    for i in ctx.rd.nodes:
        if i % 2:
            continue

        def compute(i=i) -> NormalElement:
            lifted = t_wX(alg, ctx.case.param)(alg.E(i))
            other = alg.normal_form(alg.F(i)) - alg.multiply(alg.normal_form(alg.K(i, -1)), lifted)
            return ctx.nf(ctx.B(i)) - other

        identities.append(Identity(f"generators/B{i}/ad=T_wX", certified_residual(alg, compute)))
    return identities


def verify_commutator_identity(ctx: CoidealContext) -> list[Identity]:
    """IIA with n = 2r-1, 2 <= i <= r-1 and j = i-1:

    [B_i,B_j]_q [B_ti,B_tj]_q - [B_ti,B_tj]_q [B_i,B_j]_q
        = q (tau_i^-(K_j K_tj^-1) - tau_i^-(K_tj K_j^-1)) / (q - q^-1)

    where tau_i^- acts on the torus as T_i T_tau(i).
    """
    if ctx.variant is not CaseVariant.IIA or ctx.case.param % 2 == 0:
        return []
    rd = ctx.rd
    r = (ctx.case.param + 1) // 2
    identities: list[Identity] = []
    for i in range(2, r):
        j = i - 1
        ti, tj = ctx.tau_of(i), ctx.tau_of(j)
        x = q_commutator(ctx.B(i), ctx.B(j))
        y = q_commutator(ctx.B(ti), ctx.B(tj))
        lhs = x * y - y * x
        mu = tuple(int(k == j) - int(k == tj) for k in rd.nodes)
        image = rd.weyl_image((i, ti), mu)
        plus = K_weight(image, ctx.name)
        minus = K_weight((-c for c in image), ctx.name)
        rhs = (plus - minus).scale(divide(q, q - q**-1))
        identities.append(
            Identity(
                f"IIA/commutator/i={i},j={j}",
                certified_residual(ctx.alg, lambda lhs=lhs, rhs=rhs: ctx.residual(lhs, rhs)),
            )
        )
    return identities
