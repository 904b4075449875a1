"""Lusztig's braid group automorphisms T_i^{+-1} and substitution maps.

With r = -a_ij and j != i:

    T_i^-1(E_i) = -K_i^-1 F_i        T_i(E_i) = -F_i K_i
    T_i^-1(F_i) = -E_i K_i           T_i(F_i) = -K_i^-1 E_i
    T_i^{+-1}(K_mu) = K_{s_i mu}
    T_i^-1(E_j) = sum_s (-1)^s q_i^-s E_i^(s) E_j E_i^(r-s)
    T_i(E_j)    = sum_s (-1)^s q_i^-s E_i^(r-s) E_j E_i^(s)
    T_i^-1(F_j) = sum_s (-1)^s q_i^s  F_i^(r-s) F_j F_i^(s)
    T_i(F_j)    = sum_s (-1)^s q_i^s  F_i^(s) F_j F_i^(r-s)
"""
from __future__ import annotations

import logging
import threading
from collections.abc import Callable, Iterable, Mapping, Sequence
from dataclasses import dataclass, field

from algebra.uqg import NormalElement, UqAlgebra
from algebra.words import AlgebraElement, GenSymbol, UndefinedImageError
from models.enums import GenKind, LusztigDirection
from models.report import Identity, Residual
from models.scalar import ONE

logger = logging.getLogger(__name__)

TermHook = Callable[[int], None]


@dataclass(frozen=True)
class GeneratorImages:
    """A map on generator symbols, extended multiplicatively."""

    images: Mapping[GenSymbol, AlgebraElement]
    label: str = ""
    context: str | None = None
    meta: dict = field(default_factory=dict, compare=False)

    def image(self, g: GenSymbol) -> AlgebraElement:
        try:
            return self.images[g]
        except KeyError:
            raise UndefinedImageError(g, self.label) from None

    def __contains__(self, g: GenSymbol) -> bool:
        return g in self.images

    def symbols(self) -> list[GenSymbol]:
        return list(self.images)


def ambient_generators(rank: int) -> list[GenSymbol]:
    out: list[GenSymbol] = []
    for i in range(1, rank + 1):
        out += [
            GenSymbol(GenKind.E, i),
            GenSymbol(GenKind.F, i),
            GenSymbol(GenKind.KPLUS, i),
            GenSymbol(GenKind.KMINUS, i),
        ]
    return out


def lusztig_images(alg: UqAlgebra, i: int, direction: LusztigDirection | str) -> GeneratorImages:
    direction = LusztigDirection(direction)
    rd = alg.rd
    rd.check_node(i)
    inverse = direction is LusztigDirection.INVERSE
    qi = alg.qi(i)
    Ei, Fi = alg.E(i), alg.F(i)
    Ki, Kinv = alg.K(i), alg.K(i, -1)
    images: dict[GenSymbol, AlgebraElement] = {}
    for j in rd.nodes:
        a = rd.a(i, j)
        # K_j -> K_j K_i^{-a_ij}
        images[GenSymbol(GenKind.KPLUS, j)] = alg.K(j) * alg.K(i, -a) if j != i else Kinv
        images[GenSymbol(GenKind.KMINUS, j)] = alg.K(j, -1) * alg.K(i, a) if j != i else Ki
        if j == i:
            if inverse:
                images[GenSymbol(GenKind.E, i)] = -(Kinv * Fi)
                images[GenSymbol(GenKind.F, i)] = -(Ei * Ki)
            else:
                images[GenSymbol(GenKind.E, i)] = -(Fi * Ki)
                images[GenSymbol(GenKind.F, i)] = -(Kinv * Ei)
            continue
        r = -a
        e_sum = alg.zero().to_element()
        f_sum = alg.zero().to_element()
        for s in range(r + 1):
            sign = ONE if s % 2 == 0 else -ONE
            Es, Ers = alg.divided_power(GenKind.E, i, s), alg.divided_power(GenKind.E, i, r - s)
            Fs, Frs = alg.divided_power(GenKind.F, i, s), alg.divided_power(GenKind.F, i, r - s)
            if inverse:
                e_sum = e_sum + (Es * alg.E(j) * Ers).scale(sign * qi**-s)
                f_sum = f_sum + (Frs * alg.F(j) * Fs).scale(sign * qi**s)
            else:
                e_sum = e_sum + (Ers * alg.E(j) * Es).scale(sign * qi**-s)
                f_sum = f_sum + (Fs * alg.F(j) * Frs).scale(sign * qi**s)
        images[GenSymbol(GenKind.E, j)] = e_sum
        images[GenSymbol(GenKind.F, j)] = f_sum
    label = f"T{i}^-1" if inverse else f"T{i}"
    return GeneratorImages(images, label, alg.name)


def evaluate_images(
    alg: UqAlgebra,
    images: Mapping[GenSymbol, NormalElement],
    a: AlgebraElement,
    *,
    label: str = "",
    on_terms: TermHook | None = None,
) -> NormalElement:
    """Substitute normalised images into ``a`` and multiply out in normal form."""
    total = alg.zero()
    for word, c in a.terms.items():
        prod = alg.normal_form(AlgebraElement.const(c, alg.name))
        for g in word:
            image = images.get(g)
            if image is None:
                raise UndefinedImageError(g, label)
            prod = alg.multiply(prod, image)
            if on_terms is not None:
                on_terms(len(prod))
            if not prod:
                break
        total = total + prod
        if on_terms is not None:
            on_terms(len(total))
    return total


class NormalizedMap:
    """A map with images already in normal form; the unit of every composition."""

    def __init__(self, alg: UqAlgebra, images: Mapping[GenSymbol, NormalElement], label: str = ""):
        self.alg = alg
        self.images = dict(images)
        self.label = label

    @classmethod
    def from_images(cls, alg: UqAlgebra, phi: GeneratorImages) -> "NormalizedMap":
        return cls(alg, {g: alg.normal_form(x) for g, x in phi.images.items()}, phi.label)

    @classmethod
    def identity(cls, alg: UqAlgebra) -> "NormalizedMap":
        return cls(
            alg,
            {g: alg.normal_form(AlgebraElement.word([g], 1, alg.name)) for g in ambient_generators(alg.rank)},
            "id",
        )

    def __call__(self, a: AlgebraElement | NormalElement, *, on_terms: TermHook | None = None) -> NormalElement:
        if isinstance(a, NormalElement):
            a = a.to_element()
        return evaluate_images(self.alg, self.images, a, label=self.label, on_terms=on_terms)

    def after(self, other: "NormalizedMap") -> "NormalizedMap":
        """self o other."""
        return NormalizedMap(
            self.alg,
            {g: self(x.to_element()) for g, x in other.images.items()},
            f"{self.label}{other.label}",
        )


def apply_endomorphism(alg: UqAlgebra, phi: GeneratorImages, a: AlgebraElement, **kw) -> NormalElement:
    return NormalizedMap.from_images(alg, phi)(a, **kw)


def compose(alg: UqAlgebra, phi: GeneratorImages, psi: GeneratorImages) -> GeneratorImages:
    """phi o psi as a new GeneratorImages with normalised images."""
    outer = NormalizedMap.from_images(alg, phi)
    images = {g: outer(x).to_element() for g, x in psi.images.items()}
    return GeneratorImages(images, f"{phi.label}{psi.label}", alg.name)


_LUSZTIG_CACHE: dict[tuple[int, str, int, LusztigDirection], NormalizedMap] = {}
_LUSZTIG_LOCK = threading.RLock()


def lusztig_map(alg: UqAlgebra, i: int, direction: LusztigDirection | str) -> NormalizedMap:
    direction = LusztigDirection(direction)
    key = (id(alg), alg.name, i, direction)
    with _LUSZTIG_LOCK:
        cached = _LUSZTIG_CACHE.get(key)
        if cached is None or cached.alg is not alg:
            cached = NormalizedMap.from_images(alg, lusztig_images(alg, i, direction))
            _LUSZTIG_CACHE[key] = cached
    return cached


def lusztig_word(alg: UqAlgebra, word: Sequence[tuple[int, int]]) -> NormalizedMap:
    """T_{i1}^{e1} o ... o T_{ik}^{ek} for the letters (i, e) of ``word``."""
    result = NormalizedMap.identity(alg)
    for node, sign in reversed(word):
        step = lusztig_map(alg, node, LusztigDirection.FORWARD if sign > 0 else LusztigDirection.INVERSE)
        result = step.after(result)
    return result


def apply_chain(alg: UqAlgebra, word: Sequence[tuple[int, int]], a: AlgebraElement, **kw) -> NormalElement:
    """Apply T_{i1}^{e1} ... T_{ik}^{ek} to a, innermost letter first."""
    x: AlgebraElement | NormalElement = a
    for node, sign in reversed(word):
        step = lusztig_map(alg, node, LusztigDirection.FORWARD if sign > 0 else LusztigDirection.INVERSE)
        x = step(x, **kw)
    return alg.normal_form(x)


def t_wX(alg: UqAlgebra, m: int) -> NormalizedMap:
    """T_{w_X} = T_1 T_3 ... T_{2m-1} on U_q(A_{2m-1}); the factors commute."""
    if alg.rank != 2 * m - 1:
        raise ValueError(f"T_wX needs A_{2 * m - 1}, got {alg.name}")
    result = lusztig_word(alg, [(j, 1) for j in range(1, 2 * m, 2)])
    result.label = "T_wX"
    return result


def certified_residual(alg: UqAlgebra, compute: Callable[[], Residual]) -> Callable[[], Residual]:
    """Defer ``compute``; a nonzero result is only trusted under a confluence certificate."""

    def run() -> Residual:
        res = compute()
        if not res.is_zero():
            alg.require_certificate()
        return res

    return run


def _alternating(i: int, j: int, m: int) -> list[tuple[int, int]]:
    return [((i, j)[k % 2], 1) for k in range(m)]


def verify_T_properties(alg: UqAlgebra, *, braid: bool = True) -> list[Identity]:
    rd = alg.rd
    identities: list[Identity] = []
    gens = ambient_generators(rd.rank)
    for i in rd.nodes:
        fwd = lusztig_map(alg, i, LusztigDirection.FORWARD)
        inv = lusztig_map(alg, i, LusztigDirection.INVERSE)
        for g in gens:
            x = AlgebraElement.word([g], 1, alg.name)
            identities.append(
                Identity(f"T{i}Tinv{i}/{g}", certified_residual(alg, lambda f=fwd, t=inv, x=x: alg.residual(f(t(x)), x)))
            )
            identities.append(
                Identity(f"Tinv{i}T{i}/{g}", certified_residual(alg, lambda f=fwd, t=inv, x=x: alg.residual(t(f(x)), x)))
            )
        for j in rd.nodes:
            if j != i and rd.a(i, j) == 0:
                for g in gens:
                    if g.node != j:
                        continue
                    x = AlgebraElement.word([g], 1, alg.name)
                    identities.append(
                        Identity(f"T{i}fixes/{g}", certified_residual(alg, lambda f=fwd, x=x: alg.residual(f(x), x)))
                    )
    if braid:
        for i in rd.nodes:
            for j in rd.nodes:
                if i >= j:
                    continue
                m = rd.m(i, j)
                left, right = _alternating(i, j, m), _alternating(j, i, m)
                for g in gens:
                    x = AlgebraElement.word([g], 1, alg.name)
                    identities.append(
                        Identity(
                            f"braid/T{i}T{j}/m={m}/{g}",
                            certified_residual(
                                alg,
                                lambda lw=left, rw=right, x=x: alg.residual(apply_chain(alg, lw, x), apply_chain(alg, rw, x)),
                            ),
                        )
                    )
    return identities


def verify_identities(identities: Iterable[Identity]) -> list[tuple[str, bool]]:
    """Evaluate identities in process; used by tests and the REPL."""
    return [(ident.label, ident.residual().is_zero()) for ident in identities]

