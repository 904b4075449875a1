"""Exact arithmetic in the rational function field Q(v) with q = v**2.

Scalars are sympy ``FracElement`` values of the field ``QV``. sympy keeps
them in canonical form (coprime numerator and denominator, denominator with
positive leading coefficient), so structural equality is field equality.
Negative powers of v live in the denominator; there is no Laurent type.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Literal

from sympy import ZZ, Rational
from sympy.polys.fields import FracElement, field

QV, v = field("v", ZZ)

Scalar = FracElement

ZERO: Scalar = QV.zero
ONE: Scalar = QV.one
q: Scalar = v**2


class ScalarError(Exception):
    """Base class for scalar arithmetic errors."""


class ScalarDivisionError(ScalarError, ZeroDivisionError):
    """Division by the zero scalar."""


class PoleError(ScalarError):
    """Evaluation of a scalar at a pole of its denominator."""


class QuantumCombinatoricsError(ScalarError, ValueError):
    """Invalid argument to a quantum factorial or binomial."""


def scalar(value: int | Fraction | Rational | Scalar) -> Scalar:
    if isinstance(value, FracElement):
        return value
    if isinstance(value, Rational):
        return QV(int(value.p)) / QV(int(value.q))
    if isinstance(value, Fraction):
        return QV(value.numerator) / QV(value.denominator)
    return QV(int(value))


def vpow(k: int) -> Scalar:
    """v**k, i.e. q**(k/2)."""
    return v**k


def qpow(k: int) -> Scalar:
    return v ** (2 * k)


def divide(a: Scalar, b: Scalar) -> Scalar:
    if not b:
        raise ScalarDivisionError("division by zero scalar")
    return a / b


Op = Literal["add", "sub", "mul", "div", "neg"]


def scalar_arith(a: Scalar, b: Scalar, op: Op) -> Scalar:
    match op:
        case "add":
            return a + b
        case "sub":
            return a - b
        case "mul":
            return a * b
        case "div":
            return divide(a, b)
        case "neg":
            return -a
    raise ValueError(f"unknown scalar operation {op!r}")


@lru_cache(maxsize=None)
def qint(n: int, d: int = 1) -> Scalar:
    """The quantum integer [n]_i with q_i = q**d."""
    if n == 0:
        return ZERO
    if n < 0:
        return -qint(-n, d)
    qi = qpow(d)
    return (qi**n - qi**-n) / (qi - qi**-1)


@lru_cache(maxsize=None)
def qfactorial(n: int, d: int = 1) -> Scalar:
    if n < 0:
        raise QuantumCombinatoricsError(f"quantum factorial of negative {n}")
    out = ONE
    for k in range(2, n + 1):
        out = out * qint(k, d)
    return out


@lru_cache(maxsize=None)
def qbinomial(a: int, n: int, d: int = 1) -> Scalar:
    if n < 0:
        raise QuantumCombinatoricsError(f"quantum binomial with negative n={n}")
    num = ONE
    for k in range(n):
        num = num * qint(a - k, d)
    return num / qfactorial(n, d)


def quantum_combinatorics(
    kind: Literal["integer", "factorial", "binomial"], a: int | None, n: int, d: int = 1
) -> Scalar:
    if d <= 0:
        raise QuantumCombinatoricsError(f"symmetrizer must be positive, got {d}")
    match kind:
        case "integer":
            return qint(n, d)
        case "factorial":
            return qfactorial(n, d)
        case "binomial":
            if a is None:
                raise QuantumCombinatoricsError("binomial needs an upper argument")
            return qbinomial(a, n, d)
    raise QuantumCombinatoricsError(f"unknown kind {kind!r}")


def _coefficients(poly) -> dict[int, int]:
    return {monom[0]: int(coeff) for monom, coeff in poly.terms()}


def _eval_poly(coeffs: dict[int, int], point: Rational) -> Rational:
    return sum((Rational(c) * point**e for e, c in coeffs.items()), Rational(0))


def evaluate_at(s: Scalar, point: int | Fraction | Rational) -> Rational:
    """Exact value of ``s`` at v = point."""
    point = Rational(point.numerator, point.denominator) if isinstance(point, Fraction) else Rational(point)
    den = _eval_poly(_coefficients(s.denom), point)
    if den == 0:
        raise PoleError(f"{render_scalar(s)} has a pole at v={point}")
    return _eval_poly(_coefficients(s.numer), point) / den


def to_json(s: Scalar) -> list[list[list[int]]]:
    return [
        sorted([e, c] for e, c in _coefficients(s.numer).items()),
        sorted([e, c] for e, c in _coefficients(s.denom).items()),
    ]


def from_json(data: list[list[list[int]]]) -> Scalar:
    num, den = data
    ring = QV.ring
    numer = ring.from_dict({(e,): ZZ(c) for e, c in num})
    denom = ring.from_dict({(e,): ZZ(c) for e, c in den})
    return QV(numer) / QV(denom)


def _render_poly(coeffs: dict[int, int], var: str, scale: int) -> str:
    """Descending-power rendering; exponents are divided by ``scale``."""
    parts: list[str] = []
    for e in sorted(coeffs, reverse=True):
        c = coeffs[e]
        exp = e // scale
        if exp == 0:
            mono = ""
        elif exp == 1:
            mono = var
        else:
            mono = f"{var}^{exp}"
        mag = abs(c)
        if mono and mag == 1:
            body = mono
        elif mono:
            body = f"{mag}*{mono}"
        else:
            body = str(mag)
        if not parts:
            parts.append(body if c > 0 else f"-{body}")
        else:
            parts.append(f"+ {body}" if c > 0 else f"- {body}")
    return " ".join(parts) if parts else "0"


def _wrap(text: str) -> str:
    return f"({text})" if (" " in text or text.startswith("-")) else text


def render_scalar(s: Scalar) -> str:
    """Text form ``num/den``; uses q when every exponent is even.

    In q-form numerator and denominator are shifted by a common power so the
    denominator is as balanced a Laurent polynomial as possible, which turns
    v**2/(v**4 - 1) into 1/(q - q^-1).
    """
    num = _coefficients(s.numer)
    den = _coefficients(s.denom)
    if not num:
        return "0"
    if all(e % 2 == 0 for e in (*num, *den)):
        shift = (min(den) + max(den)) // 2
        shift -= shift % 2
        num = {e - shift: c for e, c in num.items()}
        den = {e - shift: c for e, c in den.items()}
        var, scale = "q", 2
    else:
        var, scale = "v", 1
    top = _render_poly(num, var, scale)
    if den == {0: 1}:
        return top
    return f"{_wrap(top)}/{_wrap(_render_poly(den, var, scale))}"
