"""Text syntax for algebra elements.

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*          '/' only by a scalar
    unary  := '-' unary | factor
    factor := atom ('^' ['-'] int)?               negative powers on K and scalars
    atom   := E<i> | F<i> | K<i> | B<i> | q | v | int | '[' int ']' ('_' int)? | '(' expr ')'

Commands accepted by ``parse_command``: ``nf(expr)``, ``tau(i, +|-, expr)``,
``T(i, expr)``, ``Tinv(i, expr)``, ``case <id>`` and a bare expression.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from algebra.words import AlgebraElement, AlgebraError, GenSymbol
from models.enums import GenKind
from models.rootdata import RootDatum
from models.scalar import ONE, divide, q, qint, v


class ParseError(AlgebraError):
    """Malformed expression text."""

    def __init__(self, position: int, message: str):
        self.position = position
        self.message = message
        super().__init__(f"{message} at offset {position}")

    def __reduce__(self):
        return type(self), (self.position, self.message)


class UnknownNodeError(ParseError):
    """A generator index outside the root datum."""


_TOKEN = re.compile(
    r"\s*(?:(?P<gen>[EFKB])(?P<node>\d+)|(?P<int>\d+)|(?P<name>[A-Za-z][A-Za-z0-9]*)|(?P<op>[-+*/^()\[\]_,]))"
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    pos: int


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(pos, f"unexpected character {text[pos]!r}")
        start = m.start(m.lastgroup)
        if m.group("gen"):
            tokens.append(Token("gen", m.group("gen") + m.group("node"), m.start("gen")))
        elif m.group("int"):
            tokens.append(Token("int", m.group("int"), start))
        elif m.group("name"):
            tokens.append(Token("name", m.group("name"), start))
        else:
            tokens.append(Token("op", m.group("op"), start))
        pos = m.end()
    tokens.append(Token("end", "", n))
    return tokens


class _Parser:
    def __init__(self, text: str, rd: RootDatum | None, b_rank: int | None, context: str | None):
        self.text = text
        self.tokens = tokenize(text)
        self.i = 0
        self.rd = rd
        self.b_rank = b_rank
        self.context = context

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def advance(self) -> Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, text: str) -> Token:
        if self.tok.text != text or self.tok.kind not in ("op", "name"):
            found = self.tok.text or "end of input"
            raise ParseError(self.tok.pos, f"expected {text!r}, found {found!r}")
        return self.advance()

    def at(self, text: str) -> bool:
        return self.tok.kind == "op" and self.tok.text == text

    def expect_int(self) -> int:
        if self.tok.kind != "int":
            raise ParseError(self.tok.pos, "expected an integer")
        return int(self.advance().text)

    def expr(self) -> AlgebraElement:
        out = self.term()
        while self.at("+") or self.at("-"):
            op = self.advance().text
            rhs = self.term()
            out = out + rhs if op == "+" else out - rhs
        return out

    def term(self) -> AlgebraElement:
        out = self.unary()
        while self.at("*") or self.at("/"):
            op = self.advance()
            rhs = self.unary()
            if op.text == "*":
                out = out * rhs
                continue
            c = rhs.constant()
            if c is None:
                raise ParseError(op.pos, "division is only defined by a scalar")
            if not c:
                raise ParseError(op.pos, "division by zero")
            out = out.scale(divide(ONE, c))
        return out

    def unary(self) -> AlgebraElement:
        if self.at("-"):
            self.advance()
            return -self.unary()
        return self.factor()

    def factor(self) -> AlgebraElement:
        start = self.tok.pos
        base, symbol = self.atom()
        if not self.at("^"):
            return base
        self.advance()
        negative = False
        if self.at("-"):
            self.advance()
            negative = True
        n = self.expect_int()
        if not negative:
            return base**n
        if symbol is not None and symbol.kind is GenKind.KPLUS:
            return AlgebraElement.word([symbol.inverse()] * n, 1, self.context)
        c = base.constant()
        if c is None:
            raise ParseError(start, "negative exponents are only allowed on K and on scalars")
        if not c:
            raise ParseError(start, "zero raised to a negative power")
        return AlgebraElement.const(divide(ONE, c**n), self.context)

    def _node(self, tok: Token, node: int, kind: str) -> int:
        limit = self.b_rank if kind == "B" else (self.rd.rank if self.rd is not None else None)
        if kind == "B" and limit is None:
            raise UnknownNodeError(tok.pos, "coideal generator B needs an active case")
        if node < 1 or (limit is not None and node > limit):
            raise UnknownNodeError(tok.pos, f"unknown node {node} in {tok.text}")
        return node

    def atom(self) -> tuple[AlgebraElement, GenSymbol | None]:
        tok = self.tok
        if tok.kind == "gen":
            self.advance()
            kind_letter, node = tok.text[0], int(tok.text[1:])
            node = self._node(tok, node, kind_letter)
            kind = {"E": GenKind.E, "F": GenKind.F, "K": GenKind.KPLUS, "B": GenKind.B}[kind_letter]
            symbol = GenSymbol(kind, node)
            return AlgebraElement.word([symbol], 1, self.context), symbol
        if tok.kind == "int":
            self.advance()
            return AlgebraElement.const(int(tok.text), self.context), None
        if tok.kind == "name" and tok.text in ("q", "v"):
            self.advance()
            return AlgebraElement.const(q if tok.text == "q" else v, self.context), None
        if self.at("["):
            self.advance()
            n = self.expect_int()
            self.expect("]")
            d = 1
            if self.at("_"):
                self.advance()
                idx_tok = self.tok
                node = self.expect_int()
                if self.rd is None:
                    raise UnknownNodeError(idx_tok.pos, "[n]_i needs a root datum")
                d = self.rd.d_of(self._node(idx_tok, node, "E"))
            return AlgebraElement.const(qint(n, d), self.context), None
        if self.at("("):
            self.advance()
            inner = self.expr()
            self.expect(")")
            return inner, None
        found = tok.text or "end of input"
        raise ParseError(tok.pos, f"unexpected {found!r}")


def parse_expression(
    text: str,
    *,
    rd: RootDatum | None = None,
    b_rank: int | None = None,
    context: str | None = None,
) -> AlgebraElement:
    """Parse ``text``; coideal B symbols stay formal and are bounded by ``b_rank``."""
    p = _Parser(text, rd, b_rank, context)
    out = p.expr()
    if p.tok.kind != "end":
        raise ParseError(p.tok.pos, f"unexpected {p.tok.text!r}")
    return out


@dataclass(frozen=True)
class Command:
    kind: str  # "expr", "nf", "tau", "T", "Tinv", "case"
    expression: str = ""
    index: int | None = None
    sign: str | None = None
    case_id: str | None = None
    offset: int = 0


_CALL = re.compile(r"^\s*(nf|tau|Tinv|T)\s*\(", re.ASCII)


def parse_command(text: str) -> Command:
    stripped = text.strip()
    if stripped.startswith("case ") or stripped == "case":
        case_id = stripped[4:].strip()
        if not case_id:
            raise ParseError(len(text), "case needs an identifier")
        return Command("case", case_id=case_id)
    m = _CALL.match(text)
    if not m:
        return Command("expr", expression=text)
    name = m.group(1)
    close = text.rstrip()
    if not close.endswith(")"):
        raise ParseError(len(close), f"{name}(...) is not closed")
    body_start = m.end()
    body = text[body_start : len(close) - 1]
    if name == "nf":
        return Command("nf", expression=body, offset=body_start)
    parts = body.split(",", 2 if name == "tau" else 1)
    expected = 3 if name == "tau" else 2
    if len(parts) != expected:
        raise ParseError(body_start, f"{name} expects {expected} arguments")
    try:
        index = int(parts[0])
    except ValueError:
        raise ParseError(body_start, f"{name}: node index must be an integer") from None
    if name == "tau":
        sign = parts[1].strip()
        if sign not in ("+", "-"):
            raise ParseError(body_start + len(parts[0]) + 1, "tau direction must be + or -")
        offset = body_start + len(parts[0]) + len(parts[1]) + 2
        return Command("tau", expression=parts[2], index=index, sign=sign, offset=offset)
    return Command(name, expression=parts[1], index=index, offset=body_start + len(parts[0]) + 1)
