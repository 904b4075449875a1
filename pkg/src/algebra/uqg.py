"""The quantized enveloping algebra U_q(g) and its triangular normal form.

Normal monomials are F-word * K^k * E-word. The F- and E-words are reduced by
completed rewriting systems for the quantum Serre relations, the K-part is an
exponent vector. Products are built one generator at a time:

    E-word * F_j    straightened with E_i F_j = F_j E_i + d_ij (K_i - K_i^-1)/(q_i - q_i^-1)
    K^k * F_j       = q^-(k, a_j) F_j K^k
    E-word * K^k    = q^-(k, wt) K^k E-word

Relations follow the Jantzen conventions: K_i E_j = q^(a_i,a_j) E_j K_i,
Delta(E_i) = E_i (x) 1 + K_i (x) E_i, Delta(F_i) = F_i (x) K_i^-1 + 1 (x) F_i,
S(E_i) = -K_i^-1 E_i, S(F_i) = -F_i K_i.
"""
from __future__ import annotations

import logging
import threading
from collections.abc import Callable, Iterable, Mapping
from typing import Literal, NamedTuple

from algebra.rewriting import DEFAULT_DEGREE_CAP, DegreeCapExceeded, NodeWord, Poly, RewritingSystem, complete
from algebra.words import AlgebraElement, AlgebraError, ContextMismatchError, GenSymbol, Word, render_terms, render_word
from models.enums import Block, GenKind
from models.rootdata import RootDatum
from models.scalar import ONE, Scalar, qbinomial, qfactorial, qpow, scalar

logger = logging.getLogger(__name__)

SystemLoader = Callable[[RootDatum, Block, int], RewritingSystem]


class NormalMonomial(NamedTuple):
    fword: NodeWord
    kexp: tuple[int, ...]
    eword: NodeWord

    def degree(self) -> int:
        return len(self.fword) + len(self.eword)

    def to_word(self) -> Word:
        word: list[GenSymbol] = [GenSymbol(GenKind.F, a) for a in self.fword]
        for i, k in enumerate(self.kexp, start=1):
            kind = GenKind.KPLUS if k > 0 else GenKind.KMINUS
            word.extend([GenSymbol(kind, i)] * abs(k))
        word.extend(GenSymbol(GenKind.E, a) for a in self.eword)
        return tuple(word)

    def sort_key(self):
        return (-self.degree(), self.fword, tuple(-k for k in self.kexp), self.eword)


NTerms = dict[NormalMonomial, Scalar]


def _add_into(target: dict, key, c: Scalar) -> None:
    value = target.get(key, 0) + c
    if value:
        target[key] = value
    else:
        target.pop(key, None)


class NormalElement:
    """An element of U_q(g) in normal form."""

    __slots__ = ("algebra", "terms")

    def __init__(self, algebra: "UqAlgebra", terms: Mapping[NormalMonomial, Scalar] | None = None):
        self.algebra = algebra
        self.terms: NTerms = {m: c for m, c in (terms or {}).items() if c}

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __len__(self) -> int:
        return len(self.terms)

    def _check(self, other: "NormalElement") -> None:
        if other.algebra is not self.algebra and other.algebra.name != self.algebra.name:
            raise ContextMismatchError(f"cannot combine elements of {self.algebra.name} and {other.algebra.name}")

    def __eq__(self, other: object) -> bool:
        if isinstance(other, AlgebraElement):
            other = self.algebra.normal_form(other)
        if not isinstance(other, NormalElement):
            return NotImplemented
        self._check(other)
        return self.terms == other.terms

    __hash__ = None  # type: ignore[assignment]

    def __add__(self, other: "NormalElement") -> "NormalElement":
        self._check(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            _add_into(out, m, c)
        return NormalElement(self.algebra, out)

    def __neg__(self) -> "NormalElement":
        return NormalElement(self.algebra, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "NormalElement") -> "NormalElement":
        return self + (-other)

    def scale(self, c) -> "NormalElement":
        c = scalar(c)
        return NormalElement(self.algebra, {m: c * x for m, x in self.terms.items()})

    def __mul__(self, other) -> "NormalElement":
        if isinstance(other, NormalElement):
            self._check(other)
            return self.algebra.multiply(self, other)
        return self.scale(other)

    __rmul__ = scale

    def to_element(self) -> AlgebraElement:
        return AlgebraElement({m.to_word(): c for m, c in self.terms.items()}, self.algebra.name)

    def sorted_terms(self) -> list[tuple[NormalMonomial, Scalar]]:
        return sorted(self.terms.items(), key=lambda item: item[0].sort_key())

    def render(self) -> str:
        return render_terms((render_word(m.to_word()), c) for m, c in self.sorted_terms())

    def __str__(self) -> str:
        return self.render()

    def __repr__(self) -> str:
        return f"NormalElement({self.algebra.name}: {self.render()!r})"


class TensorElement:
    """Finite sum of pure tensors w1 (x) w2 of free words."""

    __slots__ = ("terms", "context")

    def __init__(self, terms: Mapping[tuple[Word, Word], Scalar] | None = None, context: str | None = None):
        self.terms: dict[tuple[Word, Word], Scalar] = {k: c for k, c in (terms or {}).items() if c}
        self.context = context

    @classmethod
    def pure(cls, left: AlgebraElement, right: AlgebraElement) -> "TensorElement":
        out: dict[tuple[Word, Word], Scalar] = {}
        for w1, c1 in left.terms.items():
            for w2, c2 in right.terms.items():
                _add_into(out, (w1, w2), c1 * c2)
        return cls(out, left.context or right.context)

    def __add__(self, other: "TensorElement") -> "TensorElement":
        out = dict(self.terms)
        for k, c in other.terms.items():
            _add_into(out, k, c)
        return TensorElement(out, self.context or other.context)

    def __neg__(self) -> "TensorElement":
        return TensorElement({k: -c for k, c in self.terms.items()}, self.context)

    def __sub__(self, other: "TensorElement") -> "TensorElement":
        return self + (-other)

    def scale(self, c) -> "TensorElement":
        c = scalar(c)
        return TensorElement({k: c * x for k, x in self.terms.items()}, self.context)

    def __mul__(self, other: "TensorElement") -> "TensorElement":
        out: dict[tuple[Word, Word], Scalar] = {}
        for (a1, a2), c in self.terms.items():
            for (b1, b2), d in other.terms.items():
                _add_into(out, (a1 + b1, a2 + b2), c * d)
        return TensorElement(out, self.context or other.context)


_SYSTEMS: dict[tuple, RewritingSystem] = {}
# held for the whole completion so a system is never completed twice
_SYSTEMS_LOCK = threading.RLock()


def complete_block_system(
    rd: RootDatum, block: Block = Block.E, degree_cap: int = DEFAULT_DEGREE_CAP, *, progress: bool = False
) -> RewritingSystem:
    """Completed rewriting system for U^+ (block E) or U^- (block F).

    The quantum Serre relators are the same on node-index words for both
    blocks, so both blocks share one completion per process.
    """
    key = (rd.name, rd.cartan, degree_cap)
    with _SYSTEMS_LOCK:
        system = _SYSTEMS.get(key)
        if system is None:
            system = complete(block_relators(rd), degree_cap=degree_cap, label=f"U({rd.name}) Serre", progress=progress)
            _SYSTEMS[key] = system
    return system


def block_relators(rd: RootDatum) -> list[Poly]:
    relators: list[Poly] = []
    for i in rd.nodes:
        for j in rd.nodes:
            if i == j:
                continue
            n = 1 - rd.a(i, j)
            poly: Poly = {}
            for s in range(n + 1):
                c = qbinomial(n, s, rd.d_of(i))
                _add_into(poly, (i,) * (n - s) + (j,) + (i,) * s, c if s % 2 == 0 else -c)
            relators.append(poly)
    return relators


class UqAlgebra:
    def __init__(
        self,
        rd: RootDatum,
        *,
        degree_cap: int = DEFAULT_DEGREE_CAP,
        system_loader: SystemLoader | None = None,
        progress: bool = False,
    ):
        self.rd = rd
        self.name = rd.name
        self.rank = rd.rank
        self.degree_cap = degree_cap
        self._loader = system_loader or (lambda r, b, cap: complete_block_system(r, b, cap, progress=progress))
        self._systems: dict[Block, RewritingSystem] = {}
        self._systems_lock = threading.RLock()
        self._pair = [[rd.pairing(i, j) for j in rd.nodes] for i in rd.nodes]
        self._zero_k = (0,) * rd.rank
        self._straighten: dict[tuple[NodeWord, int], dict] = {}
        self._gen_cache: dict[tuple[NormalMonomial, GenSymbol], NTerms] = {}
        self._word_cache: dict[Word, NTerms] = {}

    def __repr__(self) -> str:
        return f"UqAlgebra({self.name})"

    # rewriting systems

    def system(self, block: Block) -> RewritingSystem:
        with self._systems_lock:
            system = self._systems.get(block)
            if system is None:
                system = self._loader(self.rd, block, self.degree_cap)
                self._systems[block] = system
        return system

    @property
    def certified(self) -> bool:
        return self.system(Block.E).certified and self.system(Block.F).certified

    def clear_caches(self) -> None:
        self._straighten.clear()
        self._gen_cache.clear()
        self._word_cache.clear()

    # element constructors bound to this algebra

    def E(self, i: int) -> AlgebraElement:
        return AlgebraElement.gen(GenKind.E, self.rd.check_node(i), self.name)

    def F(self, i: int) -> AlgebraElement:
        return AlgebraElement.gen(GenKind.F, self.rd.check_node(i), self.name)

    def K(self, i: int, exponent: int = 1) -> AlgebraElement:
        self.rd.check_node(i)
        kind = GenKind.KPLUS if exponent >= 0 else GenKind.KMINUS
        return AlgebraElement.word([GenSymbol(kind, i)] * abs(exponent), 1, self.name)

    def one(self) -> AlgebraElement:
        return AlgebraElement.one(self.name)

    def const(self, c) -> AlgebraElement:
        return AlgebraElement.const(c, self.name)

    def zero(self) -> NormalElement:
        return NormalElement(self)

    def generators(self) -> list[AlgebraElement]:
        out: list[AlgebraElement] = []
        for i in self.rd.nodes:
            out += [self.E(i), self.F(i), self.K(i), self.K(i, -1)]
        return out

    def qi(self, i: int) -> Scalar:
        return qpow(self.rd.d_of(i))

    # relations

    def defining_relations(self) -> list[AlgebraElement]:
        rels: list[AlgebraElement] = []
        E, F, K = self.E, self.F, self.K
        for i in self.rd.nodes:
            rels.append(K(i) * K(i, -1) - 1)
            rels.append(K(i, -1) * K(i) - 1)
            qi = self.qi(i)
            for j in self.rd.nodes:
                if i < j:
                    rels.append(K(i) * K(j) - K(j) * K(i))
                rels.append(K(i) * E(j) - (E(j) * K(i)).scale(qpow(self._pair[i - 1][j - 1])))
                rels.append(K(i) * F(j) - (F(j) * K(i)).scale(qpow(-self._pair[i - 1][j - 1])))
                cross = E(i) * F(j) - F(j) * E(i)
                if i == j:
                    cross = cross - (K(i) - K(i, -1)) / (qi - qi**-1)
                rels.append(cross)
        for poly in block_relators(self.rd):
            for kind in (GenKind.E, GenKind.F):
                rels.append(
                    AlgebraElement({tuple(GenSymbol(kind, a) for a in w): c for w, c in poly.items()}, self.name)
                )
        return rels

    # normal form

    def _check_context(self, a: AlgebraElement) -> None:
        if a.context is not None and a.context != self.name:
            raise ContextMismatchError(f"element of {a.context} given to U_q({self.name})")

    def _wt_pair(self, k: tuple[int, ...], word: NodeWord) -> int:
        """(k, wt(word)) for K-exponent vector k."""
        total = 0
        for i, ki in enumerate(k):
            if ki:
                row = self._pair[i]
                total += ki * sum(row[a - 1] for a in word)
        return total

    def _straighten_ef(self, eword: NodeWord, j: int) -> dict[tuple[NodeWord, tuple[int, ...], NodeWord], Scalar]:
        """eword * F_j as sum of (F-part, K-exponents, E-word); the F-part is () or (j,)."""
        key = (eword, j)
        cached = self._straighten.get(key)
        if cached is not None:
            return cached
        out: dict = {}
        if not eword:
            out[((j,), self._zero_k, ())] = ONE
        else:
            head, a = eword[:-1], eword[-1]
            esys = self.system(Block.E)
            for (fp, kv, ew), c in self._straighten_ef(head, j).items():
                for w, d in esys.reduce_word(ew + (a,)).items():
                    _add_into(out, (fp, kv, w), c * d)
            if a == j:
                qj = self.qi(j)
                denom = qj - qj**-1
                p = sum(self._pair[j - 1][b - 1] for b in head)
                up = tuple(1 if n == j - 1 else 0 for n in range(self.rank))
                down = tuple(-x for x in up)
                _add_into(out, ((), up, head), qpow(-p) / denom)
                _add_into(out, ((), down, head), -qpow(p) / denom)
        self._straighten[key] = out
        return out

    def _times_generator(self, m: NormalMonomial, g: GenSymbol) -> NTerms:
        key = (m, g)
        cached = self._gen_cache.get(key)
        if cached is not None:
            return cached
        out: NTerms = {}
        node = g.node
        if not 1 <= node <= self.rank:
            raise AlgebraError(f"node {node} out of range for {self.name}")
        match g.kind:
            case GenKind.E:
                for w, c in self.system(Block.E).reduce_word(m.eword + (node,)).items():
                    _add_into(out, NormalMonomial(m.fword, m.kexp, w), c)
            case GenKind.KPLUS | GenKind.KMINUS:
                s = 1 if g.kind is GenKind.KPLUS else -1
                p = sum(self._pair[node - 1][a - 1] for a in m.eword)
                k = list(m.kexp)
                k[node - 1] += s
                out[NormalMonomial(m.fword, tuple(k), m.eword)] = qpow(-s * p)
            case GenKind.F:
                fsys = self.system(Block.F)
                for (fp, kv, ew), c in self._straighten_ef(m.eword, node).items():
                    if fp:
                        c = c * qpow(-sum(m.kexp[i] * self._pair[i][node - 1] for i in range(self.rank)))
                    k = tuple(x + y for x, y in zip(m.kexp, kv))
                    for fw, d in fsys.reduce_word(m.fword + fp).items():
                        _add_into(out, NormalMonomial(fw, k, ew), c * d)
            case _:
                raise AlgebraError(f"{g} is a coideal symbol; expand it in its case before normalising")
        self._gen_cache[key] = out
        return out

    def _apply_word(self, terms: NTerms, word: Iterable[GenSymbol]) -> NTerms:
        for g in word:
            nxt: NTerms = {}
            for m, c in terms.items():
                for m2, d in self._times_generator(m, g).items():
                    _add_into(nxt, m2, c * d)
            terms = nxt
            if not terms:
                break
        return terms

    def _nf_word(self, word: Word) -> NTerms:
        cached = self._word_cache.get(word)
        if cached is None:
            cached = self._apply_word({NormalMonomial((), self._zero_k, ()): ONE}, word)
            self._word_cache[word] = cached
        return cached

    def normal_form(self, a: AlgebraElement | NormalElement) -> NormalElement:
        if isinstance(a, NormalElement):
            return a
        self._check_context(a)
        out: NTerms = {}
        for word, c in a.terms.items():
            for m, d in self._nf_word(word).items():
                _add_into(out, m, c * d)
        return NormalElement(self, out)

    def nf(self, a: AlgebraElement | NormalElement) -> NormalElement:
        return self.normal_form(a)

    def multiply(self, a: NormalElement, b: NormalElement) -> NormalElement:
        out: NTerms = {}
        for m2, d in b.terms.items():
            part = self._apply_word(dict(a.terms), m2.to_word())
            for m, c in part.items():
                _add_into(out, m, c * d)
        return NormalElement(self, out)

    def is_zero(self, a: AlgebraElement | NormalElement) -> bool:
        """True iff a = 0 in U_q(g).

        A nonzero residual is only conclusive under a confluence certificate;
        without one this raises ``DegreeCapExceeded``.
        """
        residual = self.normal_form(a)
        if residual.is_zero():
            return True
        self.require_certificate()
        return False

    def require_certificate(self) -> None:
        for block in (Block.E, Block.F):
            system = self.system(block)
            if not system.certified:
                raise DegreeCapExceeded(
                    system.skipped_overlap or (), system.degree_cap,
                    f"unreduced residual: {system.label} has no confluence certificate at degree cap "
                    f"{system.degree_cap}; rerun with a larger --degree-cap",
                )

    def equal(self, a: AlgebraElement | NormalElement, b: AlgebraElement | NormalElement) -> bool:
        return self.is_zero(self._as_element(a) - self._as_element(b))

    def residual(self, a, b) -> NormalElement:
        return self.normal_form(self._as_element(a) - self._as_element(b))

    @staticmethod
    def _as_element(a: AlgebraElement | NormalElement) -> AlgebraElement:
        return a.to_element() if isinstance(a, NormalElement) else a

    # divided powers

    def divided_power(self, kind: GenKind | Literal["E", "F"], i: int, n: int) -> AlgebraElement:
        if n < 0:
            raise AlgebraError(f"divided power with negative exponent {n}")
        kind = GenKind[kind] if isinstance(kind, str) else kind
        if kind not in (GenKind.E, GenKind.F):
            raise AlgebraError(f"divided powers are defined for E and F, not {kind.name}")
        x = AlgebraElement.gen(kind, self.rd.check_node(i), self.name)
        return (x**n) / qfactorial(n, self.rd.d_of(i))

    # Hopf structure

    def _delta_gen(self, g: GenSymbol) -> TensorElement:
        one: Word = ()
        k = (GenSymbol(GenKind.KPLUS, g.node),)
        kinv = (GenSymbol(GenKind.KMINUS, g.node),)
        match g.kind:
            case GenKind.E:
                return TensorElement({((g,), one): ONE, (k, (g,)): ONE}, self.name)
            case GenKind.F:
                return TensorElement({((g,), kinv): ONE, (one, (g,)): ONE}, self.name)
            case GenKind.KPLUS | GenKind.KMINUS:
                return TensorElement({((g,), (g,)): ONE}, self.name)
        raise AlgebraError(f"{g} is a coideal symbol; expand it before applying the coproduct")

    def coproduct(self, a: AlgebraElement) -> TensorElement:
        self._check_context(a)
        total = TensorElement({}, self.name)
        for word, c in a.terms.items():
            t = TensorElement({((), ()): c}, self.name)
            for g in word:
                t = t * self._delta_gen(g)
            total = total + t
        return total

    def antipode(self, a: AlgebraElement) -> AlgebraElement:
        self._check_context(a)
        out = AlgebraElement.zero(self.name)
        for word, c in a.terms.items():
            term = AlgebraElement.const(c, self.name)
            for g in reversed(word):
                term = term * self._antipode_gen(g)
            out = out + term
        return out

    def _antipode_gen(self, g: GenSymbol) -> AlgebraElement:
        k = AlgebraElement.word([GenSymbol(GenKind.KPLUS, g.node)], 1, self.name)
        kinv = AlgebraElement.word([GenSymbol(GenKind.KMINUS, g.node)], 1, self.name)
        x = AlgebraElement.word([g], 1, self.name)
        match g.kind:
            case GenKind.E:
                return -(kinv * x)
            case GenKind.F:
                return -(x * k)
            case GenKind.KPLUS:
                return kinv
            case GenKind.KMINUS:
                return k
        raise AlgebraError(f"{g} is a coideal symbol; expand it before applying the antipode")

    def counit(self, a: AlgebraElement) -> Scalar:
        self._check_context(a)
        total = scalar(0)
        for word, c in a.terms.items():
            if any(g.kind not in (GenKind.KPLUS, GenKind.KMINUS) for g in word):
                if any(g.kind is GenKind.B for g in word):
                    raise AlgebraError("expand coideal symbols before applying the counit")
                continue
            total = total + c
        return total

    def hopf(self, x: AlgebraElement, op: Literal["coproduct", "antipode", "counit"]):
        match op:
            case "coproduct":
                return self.coproduct(x)
            case "antipode":
                return self.antipode(x)
            case "counit":
                return self.counit(x)
        raise ValueError(f"unknown Hopf operation {op!r}")

    def normalize_tensor(self, t: TensorElement) -> dict[tuple[NormalMonomial, NormalMonomial], Scalar]:
        out: dict[tuple[NormalMonomial, NormalMonomial], Scalar] = {}
        for (w1, w2), c in t.terms.items():
            left = self._nf_word(w1)
            right = self._nf_word(w2)
            for m1, c1 in left.items():
                for m2, c2 in right.items():
                    _add_into(out, (m1, m2), c * c1 * c2)
        return out

    def tensor_equal(self, a: TensorElement, b: TensorElement) -> bool:
        return not self.normalize_tensor(a - b)

    def adjoint_action(self, x: AlgebraElement, u: AlgebraElement) -> AlgebraElement:
        """ad(x)(u) = sum x_(1) u S(x_(2))."""
        self._check_context(u)
        out = AlgebraElement.zero(self.name)
        for (w1, w2), c in self.coproduct(x).terms.items():
            left = AlgebraElement.word(w1, c, self.name)
            right = self.antipode(AlgebraElement.word(w2, 1, self.name))
            out = out + left * u * right
        return self.normal_form(out).to_element()

    def hopf_axiom_residuals(self, x: AlgebraElement) -> dict[str, NormalElement]:
        """(eps (x) id) Delta - id, (id (x) eps) Delta - id and m(S (x) id) Delta - eps."""
        delta = self.coproduct(x)
        left_counit = AlgebraElement.zero(self.name)
        right_counit = AlgebraElement.zero(self.name)
        antipode_left = AlgebraElement.zero(self.name)
        for (w1, w2), c in delta.terms.items():
            a1 = AlgebraElement.word(w1, 1, self.name)
            a2 = AlgebraElement.word(w2, 1, self.name)
            left_counit = left_counit + a2.scale(c * self.counit(a1))
            right_counit = right_counit + a1.scale(c * self.counit(a2))
            antipode_left = antipode_left + (self.antipode(a1) * a2).scale(c)
        return {
            "counit_left": self.normal_form(left_counit - x),
            "counit_right": self.normal_form(right_counit - x),
            "antipode": self.normal_form(antipode_left - self.const(self.counit(x))),
        }
