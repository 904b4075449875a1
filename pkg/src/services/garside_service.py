"""Word problem in spherical Artin braid groups by left-greedy normal form.

A braid is written Delta^d x_1 ... x_k with x_t simple (positive lifts of
Weyl group elements), no x_t equal to 1 or Delta, and each pair left
weighted: every left descent of x_{t+1} is a right descent of x_t. Weyl
group elements are stored as the images of the simple roots, in simple-root
coordinates.
"""
from __future__ import annotations

import logging
import random
import re
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterable, Sequence

from tqdm import tqdm

from models.enums import CaseVariant
from models.report import BoolResidual, Identity
from models.rootdata import BraidWordT, CaseSpec, RootDatum, RootDataError, i_sigma_theta, root_datum_from_name, sigma_root_datum

logger = logging.getLogger(__name__)


class BraidWordError(ValueError):
    """A braid word that cannot be read or does not fit its root datum."""


Vector = tuple[int, ...]


def _negative(x: Vector) -> bool:
    return any(c < 0 for c in x)


@dataclass(frozen=True)
class CoxeterElement:
    rd: RootDatum
    images: tuple[Vector, ...]

    @classmethod
    def identity(cls, rd: RootDatum) -> "CoxeterElement":
        return cls(rd, tuple(tuple(int(k == i) for k in range(rd.rank)) for i in range(rd.rank)))

    @classmethod
    def reflection(cls, rd: RootDatum, i: int) -> "CoxeterElement":
        rd.check_node(i)
        return cls(rd, tuple(rd.reflect(i, tuple(int(k == j) for k in range(rd.rank))) for j in range(rd.rank)))

    @classmethod
    def from_word(cls, rd: RootDatum, nodes: Iterable[int]) -> "CoxeterElement":
        w = cls.identity(rd)
        for i in nodes:
            w = w * cls.reflection(rd, i)
        return w

    def _check(self, other: "CoxeterElement") -> None:
        if self.rd.cartan != other.rd.cartan:
            raise RootDataError(f"Weyl group elements of {self.rd.name} and {other.rd.name} do not compose")

    def apply(self, x: Vector) -> Vector:
        out = [0] * self.rd.rank
        for c, image in zip(x, self.images):
            if c:
                for k, y in enumerate(image):
                    out[k] += c * y
        return tuple(out)

    def __mul__(self, other: "CoxeterElement") -> "CoxeterElement":
        self._check(other)
        return CoxeterElement(self.rd, tuple(self.apply(x) for x in other.images))

    def is_identity(self) -> bool:
        return self == CoxeterElement.identity(self.rd)

    def is_right_descent(self, i: int) -> bool:
        return _negative(self.images[i - 1])

    def right_descents(self) -> frozenset[int]:
        return frozenset(i for i in self.rd.nodes if self.is_right_descent(i))

    @cached_property
    def reduced_word(self) -> tuple[int, ...]:
        """A reduced word, read left to right."""
        word: list[int] = []
        w = self
        while True:
            descent = next((i for i in self.rd.nodes if w.is_right_descent(i)), None)
            if descent is None:
                return tuple(reversed(word))
            word.append(descent)
            w = w * CoxeterElement.reflection(self.rd, descent)

    def inverse(self) -> "CoxeterElement":
        return CoxeterElement.from_word(self.rd, reversed(self.reduced_word))

    def left_descents(self) -> frozenset[int]:
        return self.inverse().right_descents()

    def length(self) -> int:
        return sum(1 for root in self.rd.positive_roots if _negative(self.apply(root)))

    def __str__(self) -> str:
        if not self.reduced_word:
            return "1"
        return "".join(f"s{i}" for i in self.reduced_word)


@lru_cache(maxsize=None)
def longest_element(rd: RootDatum) -> CoxeterElement:
    w = CoxeterElement.identity(rd)
    while True:
        ascent = next((i for i in rd.nodes if not w.is_right_descent(i)), None)
        if ascent is None:
            return w
        w = w * CoxeterElement.reflection(rd, ascent)


def coxeter_ops(a: CoxeterElement, b: CoxeterElement | None, op: str):
    """Group arithmetic by name: mul, inverse, length or descents (left, right)."""
    match op:
        case "mul":
            if b is None:
                raise ValueError("mul needs two elements")
            return a * b
        case "inverse":
            return a.inverse()
        case "length":
            return a.length()
        case "descents":
            return a.left_descents(), a.right_descents()
    raise ValueError(f"unknown Coxeter operation {op!r}")


# braid words

_LETTER = re.compile(r"^s(\d+)(?:\^(-?\d+))?$")


def parse_braid_word(text: str, rd: RootDatum | None = None) -> BraidWordT:
    """Read words such as "s1 s2 s1^-1"; s_i^k expands to |k| letters."""
    letters: list[tuple[int, int]] = []
    for token in text.replace("*", " ").split():
        match = _LETTER.match(token.strip())
        if not match:
            raise BraidWordError(f"cannot read braid letter {token!r}")
        node = int(match.group(1))
        power = int(match.group(2)) if match.group(2) is not None else 1
        if rd is not None and not 1 <= node <= rd.rank:
            raise BraidWordError(f"node {node} out of range for {rd.name}")
        sign = 1 if power > 0 else -1
        letters.extend([(node, sign)] * abs(power))
    return tuple(letters)


def render_braid_word(word: BraidWordT) -> str:
    return " ".join(f"s{node}" if sign > 0 else f"s{node}^-1" for node, sign in word)


@dataclass(frozen=True)
class GarsideNormalForm:
    infimum: int
    factors: tuple[CoxeterElement, ...]

    def __str__(self) -> str:
        parts = [f"D^{self.infimum}"] + [f"({x})" for x in self.factors]
        return " ".join(parts)

    def to_word(self, rd: RootDatum) -> BraidWordT:
        return _delta_word(rd, self.infimum) + tuple((i, 1) for x in self.factors for i in x.reduced_word)


def _delta_word(rd: RootDatum, power: int) -> BraidWordT:
    w0 = longest_element(rd).reduced_word
    if power >= 0:
        return tuple((i, 1) for _ in range(power) for i in w0)
    return tuple((i, -1) for _ in range(-power) for i in reversed(w0))


def _left_weight(a: CoxeterElement, b: CoxeterElement) -> tuple[CoxeterElement, CoxeterElement]:
    """Move left descents of b into a until the pair is left weighted."""
    rd = a.rd
    while True:
        movable = b.left_descents() - a.right_descents()
        if not movable:
            return a, b
        s = CoxeterElement.reflection(rd, min(movable))
        a, b = a * s, s * b


def normalise_factors(rd: RootDatum, infimum: int, seq: Sequence[CoxeterElement]) -> GarsideNormalForm:
    delta = longest_element(rd)
    factors = list(seq)
    changed = True
    while changed:
        changed = False
        for t in range(len(factors) - 1):
            pair = _left_weight(factors[t], factors[t + 1])
            if pair != (factors[t], factors[t + 1]):
                factors[t], factors[t + 1] = pair
                changed = True
    lo, hi = 0, len(factors)
    while lo < hi and factors[lo] == delta:
        lo += 1
    while lo < hi and factors[hi - 1].is_identity():
        hi -= 1
    return GarsideNormalForm(infimum + lo, tuple(factors[lo:hi]))


def garside_normal_form(rd: RootDatum, word: BraidWordT | str) -> GarsideNormalForm:
    if isinstance(word, str):
        word = parse_braid_word(word, rd)
    delta = longest_element(rd)
    infimum = 0
    factors: list[CoxeterElement] = []
    for node, sign in word:
        rd.check_node(node)
        s = CoxeterElement.reflection(rd, node)
        if sign > 0:
            factors.append(s)
            continue
        # s^-1 = Delta^-1 (w0 s); pass Delta^-1 to the front, conjugating every factor
        factors = [delta * x * delta for x in factors]
        factors.append(delta * s)
        infimum -= 1
    return normalise_factors(rd, infimum, factors)


def braid_equal(rd: RootDatum, w1: BraidWordT | str, w2: BraidWordT | str) -> bool:
    return garside_normal_form(rd, w1) == garside_normal_form(rd, w2)


def coxeter_image(rd: RootDatum, word: BraidWordT | str) -> CoxeterElement:
    if isinstance(word, str):
        word = parse_braid_word(word, rd)
    return CoxeterElement.from_word(rd, (node for node, _ in word))


# checks


def _equality(label: str, rd: RootDatum, left: BraidWordT, right: BraidWordT) -> Identity:
    def compute() -> BoolResidual:
        nf1, nf2 = garside_normal_form(rd, left), garside_normal_form(rd, right)
        return BoolResidual(nf1 == nf2, f"{nf1} != {nf2}" if nf1 != nf2 else "")

    return Identity(label, compute)


def _image(case: CaseSpec, word: Iterable[int]) -> BraidWordT:
    return tuple(letter for i in word for letter in i_sigma_theta(case, i))


def verify_sigma_embedding(case: CaseSpec) -> list[Identity]:
    """The restricted braid group maps into Br(g), landing in its theta-fixed part."""
    sigma = sigma_root_datum(case)
    rd = case.root
    identities: list[Identity] = []
    for i in sigma.nodes:
        for j in sigma.nodes:
            if i >= j:
                continue
            m = sigma.m(i, j)
            left = _image(case, ((i, j)[k % 2] for k in range(m)))
            right = _image(case, ((j, i)[k % 2] for k in range(m)))
            identities.append(_equality(f"garside/{case.case_id}/braid/i={i},j={j}/m={m}", rd, left, right))
    for i in sigma.nodes:
        image = i_sigma_theta(case, i)
        if case.variant is CaseVariant.III:
            w_x = tuple((j, 1) for j in case.wx)
            identities.append(
                _equality(f"garside/{case.case_id}/commutes-wX/i={i}", rd, image + w_x, w_x + image)
            )
        elif case.variant is not CaseVariant.I:
            twisted = tuple((case.tau_of(node), sign) for node, sign in image)
            identities.append(_equality(f"garside/{case.case_id}/tau-fixed/i={i}", rd, image, twisted))
    return identities


def random_word(rng: random.Random, rank: int, length: int) -> BraidWordT:
    return tuple((rng.randint(1, rank), rng.choice((1, -1))) for _ in range(rng.randint(0, length)))


def soundness_cross_check(
    type_names: Sequence[str] = ("A3", "B3", "D5"),
    *,
    pairs: int = 1000,
    max_length: int = 8,
    seed: int = 0,
    progress: bool = False,
) -> list[Identity]:
    """braid_equal against Weyl group images on random word pairs.

    Pairs are half random and half a word against a braid-relation rewrite of
    itself, so that both outcomes are exercised.
    """
    rng = random.Random(seed)
    identities: list[Identity] = []
    for name in type_names:
        rd = root_datum_from_name(name)
        disagreements: list[str] = []
        for _ in tqdm(range(pairs), desc=f"garside {name}", disable=not progress):
            w1 = random_word(rng, rd.rank, max_length)
            w2 = _rewrite_once(rng, rd, w1) if rng.random() < 0.5 else random_word(rng, rd.rank, max_length)
            equal = braid_equal(rd, w1, w2)
            same_image = coxeter_image(rd, w1) == coxeter_image(rd, w2)
            if equal and not same_image:
                disagreements.append(f"{render_braid_word(w1)} | {render_braid_word(w2)}")
        logger.info("garside soundness %s: %d pairs, %d disagreements", name, pairs, len(disagreements))
        detail = "; ".join(disagreements[:3])
        identities.append(
            Identity(
                f"garside/soundness/{name}",
                lambda d=disagreements, detail=detail: BoolResidual(not d, detail),
            )
        )
    return identities


def _rewrite_once(rng: random.Random, rd: RootDatum, word: BraidWordT) -> BraidWordT:
    """Insert a braid relation or a cancelling pair at a random place."""
    pos = rng.randint(0, len(word))
    i = rng.randint(1, rd.rank)
    j = rng.randint(1, rd.rank)
    if i == j:
        sign = rng.choice((1, -1))
        insert: BraidWordT = ((i, sign), (i, -sign))
    else:
        m = rd.m(i, j)
        left = tuple(((i, j)[k % 2], 1) for k in range(m))
        right = tuple(((j, i)[k % 2], -1) for k in reversed(range(m)))
        insert = left + right
    return word[:pos] + insert + word[pos:]
