"""Braid group actions tau_i, tau_i^- on U'_q(k) and their verification.

Maps are stored as formal images of the coideal symbols. A composite
tau_{i1} o ... o tau_{ik} is evaluated left to right: the composite of the
first k-1 letters is kept in normal form and applied to the formal image of
the last letter. Prefixes are memoised per symbol, so alternating braid words
share their work.

Case II maps are built from the tau-orbit that carries the restricted node:

    fixed node a         tau(B_j) = [B_j, B_a]_q for a_aj = -1, torus by T_a
    orbit {a, b}         a, b not adjacent, torus by T_a T_b
    orbit {r, r+1}       adjacent (A_2r), torus by T_r T_{r+1} T_r

and tau_i^- is given by the inverse rules of the same orbit.
"""
from __future__ import annotations

import logging
from collections.abc import Iterable, Sequence
from dataclasses import dataclass

from algebra.lusztig import GeneratorImages, apply_chain, certified_residual, lusztig_map, t_wX
from algebra.uqg import NormalElement
from algebra.words import AlgebraElement, GenSymbol, K_weight, q_commutator
from models.enums import CaseVariant, Direction, GenKind, LusztigDirection
from models.report import Identity
from models.rootdata import CaseSpec, RootDataError, i_sigma_theta, sigma_braid_type, sigma_root_datum
from models.scalar import ONE, divide, q, qint, vpow
from services import budget
from services.qsp_service import CoidealContext, get_context, relation_set

logger = logging.getLogger(__name__)

Chain = tuple[GeneratorImages, ...]


@dataclass(frozen=True)
class TauSpec:
    case: CaseSpec
    index: int
    direction: Direction
    images: GeneratorImages

    @property
    def label(self) -> str:
        return self.images.label


def _reverse(a: AlgebraElement) -> AlgebraElement:
    return AlgebraElement({w[::-1]: c for w, c in a.terms.items()}, a.context)


def _unit(rank: int, j: int) -> tuple[int, ...]:
    return tuple(int(k == j) for k in range(1, rank + 1))


# case I


def _case1_minus_image(ctx: CoidealContext, i: int, j: int) -> AlgebraElement:
    a = ctx.rd.a(i, j)
    Bi, Bj = ctx.B(i), ctx.B(j)
    if j == i or a == 0:
        return Bj
    match a:
        case -1:
            return Bi * Bj - (Bj * Bi).scale(ctx.alg.qi(i))
        case -2:
            inner = Bi * Bi * Bj - (Bi * Bj * Bi).scale(q * qint(2)) + (Bj * Bi * Bi).scale(q**2)
            return inner.scale(divide(ONE, qint(2))) + Bj
        case -3:
            inner = (
                Bi**3 * Bj
                - (Bi * Bi * Bj * Bi).scale(q * qint(3))
                + (Bi * Bj * Bi * Bi).scale(q**2 * qint(3))
                - (Bj * Bi**3).scale(q**3)
                + (Bi * Bj - (Bj * Bi).scale(q**3)).scale(q**-1)
            )
            return inner.scale(divide(ONE, qint(3) * qint(2))) + (Bi * Bj - (Bj * Bi).scale(q))
    raise RootDataError(f"a_{i}{j} = {a} has no tau image")


def _case1_images(ctx: CoidealContext, i: int, minus: bool) -> dict[GenSymbol, AlgebraElement]:
    images: dict[GenSymbol, AlgebraElement] = {}
    for j in ctx.rd.nodes:
        x = _case1_minus_image(ctx, i, j)
        # tau_i is tau_i^- with every word read backwards
        images[GenSymbol(GenKind.B, j)] = x if minus else _reverse(x)
    return images


# case II


def _orbit(ctx: CoidealContext, i: int) -> tuple[str, tuple[int, ...], tuple[int, ...]]:
    """(kind, orbit nodes, Lusztig word nodes) for the restricted node i."""
    word = tuple(node for node, _ in i_sigma_theta(ctx.case, i))
    orbit = tuple(sorted(set(word)))
    if len(orbit) == 1:
        return "fixed", orbit, word
    if ctx.rd.a(*orbit) == 0:
        return "pair", orbit, word
    return "adjacent", orbit, word


def _case2_images(ctx: CoidealContext, i: int, minus: bool) -> dict[GenSymbol, AlgebraElement]:
    rd = ctx.rd
    kind, orbit, word = _orbit(ctx, i)
    images: dict[GenSymbol, AlgebraElement] = {}
    for j in rd.nodes:
        mu = rd.weyl_image(word, _unit(rd.rank, j))
        images[GenSymbol(GenKind.KPLUS, j)] = K_weight(mu, ctx.name)
        images[GenSymbol(GenKind.KMINUS, j)] = K_weight((-c for c in mu), ctx.name)
    qc = q_commutator
    B, KK = ctx.B, ctx.KK
    for j in rd.nodes:
        Bj = B(j)
        image = Bj
        if kind == "fixed":
            (a,) = orbit
            if j != a and rd.a(a, j) == -1:
                image = qc(B(a), Bj) if minus else qc(Bj, B(a))
        elif kind == "pair":
            a, b = orbit
            adj_a = j not in orbit and rd.a(a, j) == -1
            adj_b = j not in orbit and rd.a(b, j) == -1
            if j == a:
                image = (KK(a, b) * B(b)).scale(q**-1) if minus else (KK(b, a) * B(b)).scale(q)
            elif j == b:
                image = (KK(b, a) * B(a)).scale(q**-1) if minus else (KK(a, b) * B(a)).scale(q)
            elif adj_a and adj_b:
                nested = qc(B(a), qc(B(b), Bj)) if minus else qc(qc(Bj, B(a)), B(b))
                image = nested.scale(q**-1) + Bj * KK(a, b)
            elif adj_a:
                image = (qc(B(a), Bj) if minus else qc(Bj, B(a))).scale(vpow(-1))
            elif adj_b:
                image = (qc(B(b), Bj) if minus else qc(Bj, B(b))).scale(vpow(-1))
        else:
            r, s = orbit
            if j == r - 1:
                if minus:
                    image = qc(B(s), qc(B(r), Bj)).scale(vpow(-3)) + (KK(s, r) * Bj).scale(vpow(1))
                else:
                    image = qc(qc(Bj, B(r)), B(s)).scale(vpow(-3)) + (KK(r, s) * Bj).scale(vpow(-1))
            elif j == r:
                image = (KK(s, r) * Bj).scale(vpow(-3)) if minus else (KK(r, s) * Bj).scale(vpow(3))
            elif j == s:
                image = (KK(r, s) * Bj).scale(vpow(-3)) if minus else (KK(s, r) * Bj).scale(vpow(3))
            elif j == s + 1:
                if minus:
                    image = qc(B(r), qc(B(s), Bj)).scale(vpow(-3)) + (KK(r, s) * Bj).scale(vpow(1))
                else:
                    image = qc(qc(Bj, B(s)), B(r)).scale(vpow(-3)) + (KK(s, r) * Bj).scale(vpow(-1))
        images[GenSymbol(GenKind.B, j)] = image
    return images


def e6_tabulated_images(ctx: CoidealContext, i: int) -> dict[GenSymbol, AlgebraElement]:
    """The tau_i of type IIE as tabulated node by node (tau_4(B_4) read as [B_4, B_2]_q)."""
    if ctx.variant is not CaseVariant.IIE:
        raise RootDataError(f"tabulated E6 maps need case II-E6, got {ctx.case.case_id}")
    qc, B, KK = q_commutator, ctx.B, ctx.KK
    half = vpow(-1)
    table: dict[int, dict[int, AlgebraElement]] = {
        1: {
            1: (KK(6, 1) * B(6)).scale(q),
            3: qc(B(3), B(1)).scale(half),
            5: qc(B(5), B(6)).scale(half),
            6: (KK(1, 6) * B(1)).scale(q),
        },
        2: {
            1: qc(B(1), B(3)).scale(half),
            3: (KK(5, 3) * B(5)).scale(q),
            4: qc(qc(B(4), B(3)), B(5)).scale(q**-1) + B(4) * KK(3, 5),
            5: (KK(3, 5) * B(3)).scale(q),
            6: qc(B(6), B(5)).scale(half),
        },
        3: {j: qc(B(j), B(4)) for j in (2, 3, 5)},
        4: {4: qc(B(4), B(2))},
    }
    if i not in table:
        raise RootDataError(f"restricted node {i} out of range for II-E6")
    return {GenSymbol(GenKind.B, j): table[i].get(j, B(j)) for j in ctx.rd.nodes}


# case III


def _case3_images(ctx: CoidealContext, i: int, minus: bool) -> dict[GenSymbol, AlgebraElement]:
    lo, mid, hi = 2 * i - 1, 2 * i, 2 * i + 1
    n = ctx.rank
    swap = {lo: hi, hi: lo}
    qc, B = q_commutator, ctx.B
    E, K = ctx.E, ctx.K
    images: dict[GenSymbol, AlgebraElement] = {}
    for s in ctx.symbols:
        if s.node % 2:
            images[s] = ctx.symbol(GenSymbol(s.kind, swap.get(s.node, s.node)))
    gap = q - q**-1
    Bm = B(mid)
    for j in range(2, n, 2):
        image = B(j)
        if j == mid - 2:
            image = (qc(qc(Bm, B(lo)), B(j)) if minus else qc(qc(B(j), B(lo)), Bm)).scale(vpow(-1))
        elif j == mid + 2:
            image = (qc(qc(Bm, B(hi)), B(j)) if minus else qc(qc(B(j), B(hi)), Bm)).scale(vpow(-1))
        # tau_i^-(B_mid) = q^-1 L_lo L_hi(B_mid) with L_a(Y) = (q - q^-1)[Y, B_a]_q E_a - q^2 Y K_a;
        # tau_i(B_mid) = q N_lo N_hi(B_mid) with N_a(Y) = q^-1 (q - q^-1)[B_a, Y]_q E_a - q^-2 Y K_a^-1,
        # and N_a inverts L_a on elements that commute with E_a and have K_a-weight q
        elif j == mid and minus:
            image = (
                (qc(qc(Bm, B(hi)), B(lo)) * E(lo) * E(hi)).scale(q**-1 * gap**2)
                - (qc(Bm, B(hi)) * K(lo) * E(hi)).scale(q * gap)
                - (qc(Bm, B(lo)) * K(hi) * E(lo)).scale(q * gap)
                + (Bm * K(lo) * K(hi)).scale(q**3)
            )
        elif j == mid:
            image = (
                (qc(B(hi), qc(B(lo), Bm)) * E(lo) * E(hi)).scale(q**-1 * gap**2)
                - (qc(B(hi), Bm) * K(lo, -1) * E(hi)).scale(q**-2 * gap)
                - (qc(B(lo), Bm) * K(hi, -1) * E(lo)).scale(q**-2 * gap)
                + (Bm * K(lo, -1) * K(hi, -1)).scale(q**-3)
            )
        images[GenSymbol(GenKind.B, j)] = image
    return images


def formal_lusztig_images(ctx: CoidealContext, j: int, direction: LusztigDirection | str) -> GeneratorImages:
    """T_j^{+-1} for odd j written in the coideal symbols of case III."""
    direction = LusztigDirection(direction)
    if ctx.variant is not CaseVariant.III or j % 2 == 0:
        raise RootDataError(f"T_{j} does not preserve U'_q(k) of {ctx.case.case_id}")
    ctx.rd.check_node(j)
    inverse = direction is LusztigDirection.INVERSE
    B, E, K = ctx.B, ctx.E, ctx.K
    images = {s: ctx.symbol(s) for s in ctx.symbols}
    if inverse:
        images[GenSymbol(GenKind.E, j)] = -(K(j, -1) * B(j))
        images[GenSymbol(GenKind.B, j)] = -(E(j) * K(j))
    else:
        images[GenSymbol(GenKind.E, j)] = -(B(j) * K(j))
        images[GenSymbol(GenKind.B, j)] = -(K(j, -1) * E(j))
    images[GenSymbol(GenKind.KPLUS, j)] = K(j, -1)
    images[GenSymbol(GenKind.KMINUS, j)] = K(j)
    for i in (j - 1, j + 1):
        if 1 <= i <= ctx.rank:
            images[GenSymbol(GenKind.B, i)] = q_commutator(B(j), B(i)) if inverse else q_commutator(B(i), B(j))
    return GeneratorImages(images, f"Tinv{j}" if inverse else f"T{j}", ctx.name)


def tau_images(ctx: CoidealContext, i: int, direction: Direction | str) -> TauSpec:
    direction = Direction(direction)
    _, sigma_rank = sigma_braid_type(ctx.case)
    if not 1 <= i <= sigma_rank:
        raise RootDataError(f"restricted node {i} out of range 1..{sigma_rank} for {ctx.case.case_id}")
    minus = direction is Direction.TAU_MINUS
    match ctx.variant:
        case CaseVariant.I:
            images = _case1_images(ctx, i, minus)
        case CaseVariant.III:
            images = _case3_images(ctx, i, minus)
        case _:
            images = _case2_images(ctx, i, minus)
    label = f"tau_minus{i}" if minus else f"tau{i}"
    return TauSpec(ctx.case, i, direction, GeneratorImages(images, label, ctx.name))


class BraidActionService:
    def __init__(self, ctx: CoidealContext) -> None:
        self.ctx = ctx
        self.alg = ctx.alg
        self._taus: dict[tuple[int, Direction], TauSpec] = {}
        self._formal_t: dict[tuple[int, LusztigDirection], GeneratorImages] = {}
        self._memo: dict[tuple[tuple[str, ...], GenSymbol], NormalElement] = {}

    @classmethod
    def for_case(cls, case: CaseSpec | str, **kw) -> "BraidActionService":
        return cls(get_context(case, **kw))

    @property
    def sigma_rank(self) -> int:
        return sigma_braid_type(self.ctx.case)[1]

    def tau(self, i: int, direction: Direction | str = Direction.TAU) -> GeneratorImages:
        direction = Direction(direction)
        key = (i, direction)
        if key not in self._taus:
            self._taus[key] = tau_images(self.ctx, i, direction)
        return self._taus[key].images

    def T(self, j: int, direction: LusztigDirection | str = LusztigDirection.FORWARD) -> GeneratorImages:
        direction = LusztigDirection(direction)
        key = (j, direction)
        if key not in self._formal_t:
            self._formal_t[key] = formal_lusztig_images(self.ctx, j, direction)
        return self._formal_t[key]

    # evaluation

    def image(self, chain: Sequence[GeneratorImages], s: GenSymbol) -> NormalElement:
        """(m_1 o ... o m_k)(s) in U_q(g)."""
        chain = tuple(chain)
        key = (tuple(m.label for m in chain), s)
        cached = self._memo.get(key)
        if cached is not None:
            return cached
        if not chain:
            out = self.ctx.nf(self.ctx.symbol(s))
        else:
            formal = chain[-1].image(s)
            prefix = chain[:-1]
            images = {g: self.image(prefix, g) for g in formal.symbols()}
            out = self.ctx.evaluate(images, formal, chain[-1].label)
        budget.checkpoint(len(out))
        self._memo[key] = out
        return out

    def apply(self, chain: Sequence[GeneratorImages], x: AlgebraElement) -> NormalElement:
        images = {g: self.image(chain, g) for g in x.symbols()}
        return self.ctx.evaluate(images, x)

    def clear(self) -> None:
        self._memo.clear()

    def _identity(self, label: str, left: Sequence[GeneratorImages], right: Sequence[GeneratorImages], x: AlgebraElement) -> Identity:
        return Identity(
            label,
            certified_residual(self.alg, lambda: self.apply(left, x) - self.apply(right, x)),
        )

    # checks

    def verify_endomorphism(self, i: int, direction: Direction | str) -> list[Identity]:
        phi = self.tau(i, direction)
        return [
            Identity(
                f"endomorphism/{phi.label}/{rel.label}",
                certified_residual(self.alg, lambda rel=rel: self.apply((phi,), rel.lhs - rel.rhs)),
            )
            for rel in relation_set(self.ctx)
        ]

    def verify_inverse(self, i: int) -> list[Identity]:
        plus, minus = self.tau(i, Direction.TAU), self.tau(i, Direction.TAU_MINUS)
        identities: list[Identity] = []
        for s in self.ctx.symbols:
            x = self.ctx.symbol(s)
            identities.append(self._identity(f"inverse/tau{i}.tau_minus{i}/{s}", (plus, minus), (), x))
            identities.append(self._identity(f"inverse/tau_minus{i}.tau{i}/{s}", (minus, plus), (), x))
        return identities

    def alternating(self, i: int, j: int, m: int, direction: Direction | str = Direction.TAU) -> Chain:
        return tuple(self.tau((i, j)[k % 2], direction) for k in range(m))

    def verify_braid(self, pairs: Iterable[tuple[int, int]] | None = None) -> list[Identity]:
        sigma = sigma_root_datum(self.ctx.case)
        if pairs is None:
            pairs = [(i, j) for i in sigma.nodes for j in sigma.nodes if i < j]
        identities: list[Identity] = []
        for i, j in pairs:
            m = sigma.m(i, j)
            left, right = self.alternating(i, j, m), self.alternating(j, i, m)
            for s in self.ctx.symbols:
                identities.append(
                    self._identity(f"braid/tau{i}tau{j}/m={m}/{s}", left, right, self.ctx.symbol(s))
                )
        return identities

    def verify_finite_order(self) -> list[Identity]:
        """(tau_1 tau_2)^k = id with k = 2 for B_2 and k = 3 for G_2."""
        case = self.ctx.case
        type_label = case.root.type_label
        if case.variant is not CaseVariant.I or case.root.rank != 2 or type_label not in ("B", "C", "G"):
            raise RootDataError(f"finite order is only claimed for I-B2 and I-G2, got {case.case_id}")
        power = 3 if type_label == "G" else 2
        identities: list[Identity] = []
        for i, j in ((1, 2), (2, 1)):
            chain = self.alternating(i, j, 2 * power)
            for s in self.ctx.symbols:
                identities.append(
                    self._identity(f"order/(tau{i}tau{j})^{power}/{s}", chain, (), self.ctx.symbol(s))
                )
        return identities

    def verify_cartan(self) -> list[Identity]:
        """Case II: tau_i on K_j K_tau(j)^-1 agrees with the designated Lusztig word."""
        ctx = self.ctx
        if ctx.variant in (CaseVariant.I, CaseVariant.III):
            return []
        identities: list[Identity] = []
        for i in range(1, self.sigma_rank + 1):
            word = i_sigma_theta(ctx.case, i)
            for direction in Direction:
                phi = self.tau(i, direction)
                for j in ctx.rd.nodes:
                    tj = ctx.tau_of(j)
                    if tj == j:
                        continue
                    x = ctx.KK(j, tj)

                    def compute(phi=phi, x=x, word=word) -> NormalElement:
                        return self.apply((phi,), x) - apply_chain(self.alg, word, x)

                    identities.append(
                        Identity(f"cartan/{phi.label}/K{j}K{tj}^-1", certified_residual(self.alg, compute))
                    )
        return identities

    def verify_tabulated(self) -> list[Identity]:
        """Case IIE: the tabulated tau_i agree with the orbit construction."""
        ctx = self.ctx
        if ctx.variant is not CaseVariant.IIE:
            return []
        identities: list[Identity] = []
        for i in range(1, 5):
            tabulated = e6_tabulated_images(ctx, i)
            phi = self.tau(i, Direction.TAU)
            for s, x in tabulated.items():
                identities.append(
                    Identity(
                        f"tabulated/tau{i}/{s}",
                        certified_residual(self.alg, lambda s=s, x=x, phi=phi: ctx.nf(x) - ctx.nf(phi.image(s))),
                    )
                )
        return identities

    # case III

    def _require_case3(self) -> int:
        if self.ctx.variant is not CaseVariant.III:
            raise RootDataError(f"{self.ctx.case.case_id} is not a case III pair")
        return self.ctx.case.param

    def verify_odd_lusztig(self) -> list[Identity]:
        """T_j^{+-1} (j odd) preserve U'_q(k), with the formal images above."""
        m = self._require_case3()
        ctx, alg = self.ctx, self.alg
        identities: list[Identity] = []
        for i in range(2, 2 * m - 1, 2):
            for j in (i - 1, i + 1):
                expected = ctx.B(j) * ctx.B(i) - (ctx.B(i) * ctx.B(j)).scale(q)

                def compute(i=i, j=j, expected=expected) -> NormalElement:
                    return lusztig_map(alg, j, LusztigDirection.INVERSE)(ctx.expand(ctx.B(i))) - ctx.nf(expected)

                identities.append(Identity(f"odd_lusztig/Tinv{j}(B{i})", certified_residual(alg, compute)))
        for j in ctx.case.wx:
            for direction in LusztigDirection:
                formal = self.T(j, direction)
                ambient = lusztig_map(alg, j, direction)
                for s in ctx.symbols:

                    def compute(s=s, formal=formal, ambient=ambient) -> NormalElement:
                        return ambient(ctx.expand(ctx.symbol(s))) - ctx.nf(formal.image(s))

                    identities.append(Identity(f"odd_lusztig/{formal.label}/{s}", certified_residual(alg, compute)))
        return identities

    def verify_semidirect(self) -> list[Identity]:
        m = self._require_case3()
        ctx = self.ctx
        tau, T = self.tau, self.T
        inv = LusztigDirection.INVERSE
        identities: list[Identity] = []
        for i in range(1, m):
            lo, hi = 2 * i - 1, 2 * i + 1
            for a, b in ((lo, hi), (hi, lo)):
                for s in ctx.symbols:
                    identities.append(
                        self._identity(f"semidirect/shift/tau{i}T{a}=T{b}tau{i}/{s}", (tau(i), T(a)), (T(b), tau(i)), ctx.symbol(s))
                    )
        for j in range(1, m):
            for i in range(1, m + 1):
                if j in (i, i - 1):
                    continue
                odd = 2 * i - 1
                for s in ctx.symbols:
                    identities.append(
                        self._identity(f"semidirect/commute/tau{j}T{odd}/{s}", (tau(j), T(odd)), (T(odd), tau(j)), ctx.symbol(s))
                    )
        for i in range(1, m):
            lo, mid, hi = 2 * i - 1, 2 * i, 2 * i + 1
            for k, tag in ((mid - 2, "semidirect/below"), (mid, "semidirect/middle"), (mid + 2, "semidirect/above")):
                if 2 <= k <= 2 * m - 2:
                    identities.append(
                        self._identity(
                            f"{tag}/tau{i}Tinv{lo}(B{k})", (tau(i), T(lo, inv)), (T(hi, inv), tau(i)), ctx.B(k)
                        )
                    )

            def bracket(i=i, lo=lo, mid=mid, hi=hi) -> NormalElement:
                x = self.image((tau(i),), GenSymbol(GenKind.B, lo))
                y = self.image((tau(i),), GenSymbol(GenKind.B, mid))
                lhs = self.alg.multiply(x, y) - self.alg.multiply(y, x).scale(q)
                return lhs - self.image((T(hi, inv), tau(i)), GenSymbol(GenKind.B, mid))

            identities.append(Identity(f"semidirect/bracket/i={i}", certified_residual(self.alg, bracket)))
            if mid + 2 <= 2 * m - 2:
                identities.append(
                    self._identity(f"semidirect/next/i={i}", (tau(i),), (T(hi, inv), tau(i)), ctx.B(mid + 2))
                )
        return identities

    def verify_ambient(self) -> list[Identity]:
        """Ambient identities for T_2i^-1 T_2i-1^-1 T_2i+1^-1 T_2i^-1 that motivate tau_i^-."""
        m = self._require_case3()
        alg = self.alg
        n = self.ctx.rank
        qc = q_commutator
        F, E, K = alg.F, alg.E, alg.K
        gap = q - q**-1
        identities: list[Identity] = []
        for i in range(1, m):
            lo, mid, hi = 2 * i - 1, 2 * i, 2 * i + 1
            word = [(mid, -1), (lo, -1), (hi, -1), (mid, -1)]
            expected = {
                mid - 2: qc(qc(F(mid), F(lo)), F(mid - 2)) if mid - 2 >= 1 else None,
                lo: F(hi),
                hi: F(lo),
                mid + 2: qc(qc(F(mid), F(hi)), F(mid + 2)) if mid + 2 <= n else None,
            }
            for j, rhs in expected.items():
                if rhs is None:
                    continue
                identities.append(
                    Identity(
                        f"ambient/F/i={i}/F{j}",
                        certified_residual(
                            alg, lambda word=word, j=j, rhs=rhs: apply_chain(alg, word, F(j)) - alg.normal_form(rhs)
                        ),
                    )
                )

            def source(word=word, mid=mid) -> NormalElement:
                lifted = t_wX(alg, m)(E(mid))
                x = alg.multiply(alg.normal_form(K(mid, -1)), lifted).scale(-1)
                return apply_chain(alg, word, x.to_element())

            def step_one(word=word, lo=lo, mid=mid, hi=hi) -> NormalElement:
                inner = apply_chain(alg, word + [(lo, 1), (hi, 1)], E(mid))
                return alg.multiply(alg.normal_form(-(K(lo) * K(mid) * K(hi))), inner)

            def step_two(lo=lo, mid=mid, hi=hi) -> NormalElement:
                inner = apply_chain(alg, [(lo, 1), (lo, 1), (hi, 1), (hi, 1)], F(mid))
                return alg.multiply(alg.normal_form(K(lo) * K(hi)), inner)

            final = (
                (qc(qc(F(mid), F(hi)), F(lo)) * E(lo) * E(hi)).scale(gap**2)
                - (qc(F(mid), F(hi)) * K(lo) * E(hi)).scale(q**2 * gap)
                - (qc(F(mid), F(lo)) * K(hi) * E(lo)).scale(q**2 * gap)
                + (F(mid) * K(lo) * K(hi)).scale(q**4)
            )
            identities.append(
                Identity(f"ambient/E/i={i}/step1", certified_residual(alg, lambda s=source, t=step_one: s() - t()))
            )
            identities.append(
                Identity(f"ambient/E/i={i}/step2", certified_residual(alg, lambda s=source, t=step_two: s() - t()))
            )
            identities.append(
                Identity(
                    f"ambient/E/i={i}/final",
                    certified_residual(alg, lambda s=source, f=final: s() - alg.normal_form(f)),
                )
            )
        return identities

    def verify_case3_extras(self) -> list[Identity]:
        return self.verify_odd_lusztig() + self.verify_semidirect() + self.verify_ambient()


# epsilon identities


def epsilon(ctx: CoidealContext, i: int, j: int) -> AlgebraElement:
    """T_i^-1(B_j) - tau_i^-(B_j) in case I, by the value of a_ij."""
    a = ctx.rd.a(i, j)
    alg = ctx.alg
    F, E, K = alg.F, alg.E, alg.K
    qi = alg.qi(i)
    gap = q - q**-1
    match a:
        case 2:
            return (K(i, -1) - K(i).scale(qi**-2)) * E(i)
        case 0:
            return AlgebraElement.zero(ctx.name)
        case -1:
            # K_i^-1 E_i F_j = q_i^-1 F_j K_i^-1 E_i leaves -(q_i - q_i^-1) F_j K_i^-1 E_i
            return (F(j) * K(i, -1) * E(i)).scale(qi**-1 - qi)
        case -2:
            inner = (
                (F(j) * K(i, -2)).scale(q**-1)
                + (F(j) * K(i, -2) * E(i) * E(i)).scale(q**2 - 1)
                + (F(i) * F(j) - (F(j) * F(i)).scale(q**2)) * K(i, -1) * E(i)
            )
            return inner.scale(-gap)
        case -3:
            half = divide(ONE, qint(2))
            divided = (F(i) * F(i) * F(j)).scale(half) - (F(i) * F(j) * F(i)).scale(q**2) + (
                F(j) * F(i) * F(i)
            ).scale(q**4 * half)
            inner = (
                divided * K(i, -1) * E(i)
                + (F(i) * F(j) - (F(j) * F(i)).scale(q**3))
                * (K(i, -2).scale(q**-1) + (K(i, -2) * E(i) * E(i)).scale(q**2 - 1))
                + (F(j) * K(i, -3) * E(i)).scale(q**-1 * (q**3 - q**-3))
                + (F(j) * K(i, -3) * E(i) ** 3).scale(q**3 * gap**2)
            )
            return inner.scale(-gap)
    raise RootDataError(f"no epsilon term for a_ij = {a}")


def verify_epsilon(ctx: CoidealContext) -> list[Identity]:
    if ctx.variant is not CaseVariant.I:
        raise RootDataError(f"epsilon identities live in case I, got {ctx.case.case_id}")
    alg = ctx.alg
    identities: list[Identity] = []
    for i in ctx.rd.nodes:
        minus = tau_images(ctx, i, Direction.TAU_MINUS).images
        t_inv = lusztig_map(alg, i, LusztigDirection.INVERSE)
        for j in ctx.rd.nodes:
            a = ctx.rd.a(i, j)

            def compute(i=i, j=j, minus=minus, t_inv=t_inv) -> NormalElement:
                lhs = t_inv(ctx.expand(ctx.B(j)))
                return lhs - ctx.nf(minus.image(GenSymbol(GenKind.B, j)) + epsilon(ctx, i, j))

            identities.append(
                Identity(f"epsilon/{ctx.rd.name}/aij={a}/i={i},j={j}", certified_residual(alg, compute))
            )
    return identities
