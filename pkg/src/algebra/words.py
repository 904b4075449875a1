"""Free-algebra elements over the generator symbols E_i, F_i, K_i^{+-1}, B_i.

An ``AlgebraElement`` is a finite linear combination of words with
coefficients in Q(v). Arithmetic here is free: nothing is reduced. Use
``UqAlgebra.normal_form`` for equality in U_q(g).
"""
from __future__ import annotations

from collections.abc import Callable, Iterable, Mapping
from typing import NamedTuple, Union

from sympy.polys.fields import FracElement

from models.enums import GenKind
from models.scalar import ONE, Scalar, divide, q, render_scalar, scalar


class AlgebraError(Exception):
    """Base class for algebra errors."""


class ContextMismatchError(AlgebraError):
    """Elements from different algebras were combined."""


class UndefinedImageError(AlgebraError, KeyError):
    """A substitution met a generator it has no image for."""

    def __init__(self, symbol: "GenSymbol", label: str = ""):
        self.symbol = symbol
        self.label = label
        super().__init__(f"{label or 'map'} has no image for {symbol}")

    def __reduce__(self):
        return type(self), (self.symbol, self.label)

    def __str__(self) -> str:
        return self.args[0]


class GenSymbol(NamedTuple):
    kind: GenKind
    node: int

    def __str__(self) -> str:
        match self.kind:
            case GenKind.KPLUS:
                return f"K{self.node}"
            case GenKind.KMINUS:
                return f"K{self.node}^-1"
        return f"{self.kind.name}{self.node}"

    def inverse(self) -> "GenSymbol":
        """K_i <-> K_i^-1; other symbols have no inverse symbol."""
        if self.kind is GenKind.KPLUS:
            return GenSymbol(GenKind.KMINUS, self.node)
        if self.kind is GenKind.KMINUS:
            return GenSymbol(GenKind.KPLUS, self.node)
        raise AlgebraError(f"{self} is not invertible as a symbol")


Word = tuple[GenSymbol, ...]
Coefficient = Union[int, Scalar]


def _merge_context(a: str | None, b: str | None) -> str | None:
    if a is None:
        return b
    if b is None or a == b:
        return a
    raise ContextMismatchError(f"cannot combine elements of {a} and {b}")


class AlgebraElement:
    __slots__ = ("terms", "context")

    def __init__(self, terms: Mapping[Word, Scalar] | None = None, context: str | None = None):
        self.terms: dict[Word, Scalar] = {w: c for w, c in (terms or {}).items() if c}
        self.context = context

    # constructors

    @classmethod
    def zero(cls, context: str | None = None) -> "AlgebraElement":
        return cls({}, context)

    @classmethod
    def const(cls, c: Coefficient, context: str | None = None) -> "AlgebraElement":
        return cls({(): scalar(c)}, context)

    @classmethod
    def one(cls, context: str | None = None) -> "AlgebraElement":
        return cls({(): ONE}, context)

    @classmethod
    def word(cls, word: Iterable[GenSymbol], c: Coefficient = 1, context: str | None = None) -> "AlgebraElement":
        return cls({tuple(word): scalar(c)}, context)

    @classmethod
    def gen(cls, kind: GenKind, node: int, context: str | None = None) -> "AlgebraElement":
        return cls({(GenSymbol(kind, node),): ONE}, context)

    # inspection

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms.items())

    def degree(self) -> int:
        return max((len(w) for w in self.terms), default=0)

    def symbols(self) -> set[GenSymbol]:
        return {g for w in self.terms for g in w}

    def constant(self) -> Scalar | None:
        """The scalar this element equals when it has no non-empty word, else None."""
        if any(self.terms.keys() - {()}):
            return None
        return self.terms.get((), scalar(0))

    def with_context(self, context: str | None) -> "AlgebraElement":
        return AlgebraElement(self.terms, context)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, FracElement)):
            other = AlgebraElement.const(other)
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        return self.terms == other.terms

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"AlgebraElement({render_words(self)!r})"

    def __str__(self) -> str:
        return render_words(self)

    # arithmetic

    @staticmethod
    def _lift(other, context: str | None) -> "AlgebraElement":
        if isinstance(other, AlgebraElement):
            return other
        return AlgebraElement.const(other, context)

    def __add__(self, other) -> "AlgebraElement":
        other = self._lift(other, self.context)
        ctx = _merge_context(self.context, other.context)
        out = dict(self.terms)
        for w, c in other.terms.items():
            out[w] = out.get(w, 0) + c
        return AlgebraElement(out, ctx)

    __radd__ = __add__

    def __neg__(self) -> "AlgebraElement":
        return AlgebraElement({w: -c for w, c in self.terms.items()}, self.context)

    def __sub__(self, other) -> "AlgebraElement":
        return self + (-self._lift(other, self.context))

    def __rsub__(self, other) -> "AlgebraElement":
        return self._lift(other, self.context) - self

    def scale(self, c: Coefficient) -> "AlgebraElement":
        c = scalar(c)
        if not c:
            return AlgebraElement({}, self.context)
        return AlgebraElement({w: c * x for w, x in self.terms.items()}, self.context)

    def __mul__(self, other) -> "AlgebraElement":
        if not isinstance(other, AlgebraElement):
            return self.scale(other)
        ctx = _merge_context(self.context, other.context)
        out: dict[Word, Scalar] = {}
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                w = w1 + w2
                out[w] = out.get(w, 0) + c1 * c2
        return AlgebraElement(out, ctx)

    def __rmul__(self, other) -> "AlgebraElement":
        if isinstance(other, AlgebraElement):
            return other.__mul__(self)
        return self.scale(other)

    def __truediv__(self, other: Coefficient) -> "AlgebraElement":
        return self.scale(divide(ONE, scalar(other)))

    def __pow__(self, n: int) -> "AlgebraElement":
        if n < 0:
            raise AlgebraError("negative powers are only defined for K symbols")
        out = AlgebraElement.one(self.context)
        for _ in range(n):
            out = out * self
        return out

    def map_coefficients(self, fn: Callable[[Scalar], Scalar]) -> "AlgebraElement":
        return AlgebraElement({w: fn(c) for w, c in self.terms.items()}, self.context)


# generator shorthands


def E(i: int, context: str | None = None) -> AlgebraElement:
    return AlgebraElement.gen(GenKind.E, i, context)


def F(i: int, context: str | None = None) -> AlgebraElement:
    return AlgebraElement.gen(GenKind.F, i, context)


def B(i: int, context: str | None = None) -> AlgebraElement:
    return AlgebraElement.gen(GenKind.B, i, context)


def K(i: int, exponent: int = 1, context: str | None = None) -> AlgebraElement:
    kind = GenKind.KPLUS if exponent >= 0 else GenKind.KMINUS
    return AlgebraElement.word([GenSymbol(kind, i)] * abs(exponent), 1, context)


def K_weight(lam: Iterable[int], context: str | None = None) -> AlgebraElement:
    """K_lam = prod K_i^{lam_i} for lam in simple-root coordinates."""
    word: list[GenSymbol] = []
    for i, e in enumerate(lam, start=1):
        kind = GenKind.KPLUS if e >= 0 else GenKind.KMINUS
        word.extend([GenSymbol(kind, i)] * abs(e))
    return AlgebraElement.word(word, 1, context)


def const(c: Coefficient, context: str | None = None) -> AlgebraElement:
    return AlgebraElement.const(c, context)


def q_commutator(a: AlgebraElement, b: AlgebraElement, c: Coefficient | None = None) -> AlgebraElement:
    """[a, b]_c = ab - c ba, with c = q by default."""
    return a * b - (b * a).scale(q if c is None else c)


def commutator(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    return a * b - b * a


def substitute(
    a: AlgebraElement,
    images: Mapping[GenSymbol, AlgebraElement],
    *,
    keep_missing: bool = False,
    label: str = "",
    context: str | None = None,
) -> AlgebraElement:
    """Replace every symbol by its image and multiply out (no reduction)."""
    out: dict[Word, Scalar] = {}
    result_ctx = context
    for word, c in a.terms.items():
        prod: dict[Word, Scalar] = {(): c}
        for g in word:
            image = images.get(g)
            if image is None:
                if not keep_missing:
                    raise UndefinedImageError(g, label)
                prod = {w + (g,): x for w, x in prod.items()}
                continue
            result_ctx = _merge_context(result_ctx, image.context)
            nxt: dict[Word, Scalar] = {}
            for w1, c1 in prod.items():
                for w2, c2 in image.terms.items():
                    w = w1 + w2
                    nxt[w] = nxt.get(w, 0) + c1 * c2
            prod = {w: x for w, x in nxt.items() if x}
        for w, x in prod.items():
            out[w] = out.get(w, 0) + x
    return AlgebraElement(out, result_ctx)


def render_word(word: Word) -> str:
    if not word:
        return "1"
    parts: list[str] = []
    i = 0
    while i < len(word):
        g = word[i]
        run = 1
        while i + run < len(word) and word[i + run] == g:
            run += 1
        if g.kind is GenKind.KMINUS:
            parts.append(f"K{g.node}^-{run}" if run > 1 else f"K{g.node}^-1")
        else:
            parts.append(f"{g}^{run}" if run > 1 else str(g))
        i += run
    return "*".join(parts)


def render_terms(terms: Iterable[tuple[str, Scalar]]) -> str:
    """Sum of ``coefficient*monomial`` pieces, grouping monomials that share a coefficient.

    Monomials keep their first-seen order; "1" stands for the empty monomial.
    """
    groups: dict[Scalar, list[str]] = {}
    order: list[Scalar] = []
    for mono, c in terms:
        if not c:
            continue
        key = c
        if key not in groups:
            # a group for -c is reused with a sign flip
            if -c in groups:
                groups[-c].append(f"-{mono}")
                continue
            groups[key] = []
            order.append(key)
        groups[key].append(mono)
    if not order:
        return "0"
    pieces: list[str] = []
    for c in order:
        monos = groups[c]
        pieces.append(_render_group(c, monos))
    text = pieces[0]
    for piece in pieces[1:]:
        text += f" - {piece[1:]}" if piece.startswith("-") else f" + {piece}"
    return text


def _render_group(c: Scalar, monos: list[str]) -> str:
    coeff = render_scalar(c)
    if coeff == "1":
        return _join_signed(monos)
    body = monos[0] if len(monos) == 1 else "(" + _join_signed(monos) + ")"
    if coeff == "-1":
        return f"-{body}" if not body.startswith("-") else body[1:]
    if body == "1":
        return coeff
    if "/" in coeff:
        num, den = coeff.split("/", 1)
        if num == "1":
            return f"{body}/{den}"
        if num == "-1":
            return f"-{body}/{den}"
        return f"{num}*{body}/{den}"
    if " " in coeff:
        coeff = f"({coeff})"
    return f"{coeff}*{body}"


def _join_signed(monos: list[str]) -> str:
    text = monos[0]
    for m in monos[1:]:
        text += f" - {m[1:]}" if m.startswith("-") else f" + {m}"
    return text


def render_words(a: AlgebraElement) -> str:
    return render_terms((render_word(w), c) for w, c in a.terms.items())
