from __future__ import annotations

import logging
from typing import NamedTuple, Protocol

from algebra.lusztig import lusztig_map
from algebra.parser import ParseError, parse_command, parse_expression
from algebra.rewriting import DEFAULT_DEGREE_CAP
from algebra.uqg import NormalElement, SystemLoader
from algebra.words import AlgebraElement
from models.enums import Direction, LusztigDirection
from services.braid_action_service import BraidActionService
from services.qsp_service import CoidealContext, get_context

logger = logging.getLogger(__name__)

DEFAULT_CASE = "I-A2"


class EvalResult(NamedTuple):
    rendered: str
    is_zero: bool


class ExpressionService(Protocol):
    def evaluate(self, case_id: str, text: str) -> EvalResult: ...


class Evaluator:
    """Stateful evaluator behind the REPL: remembers the active case."""

    def __init__(
        self,
        case_id: str = DEFAULT_CASE,
        *,
        degree_cap: int = DEFAULT_DEGREE_CAP,
        system_loader: SystemLoader | None = None,
    ) -> None:
        self.degree_cap = degree_cap
        self.system_loader = system_loader
        self._braids: dict[str, BraidActionService] = {}
        self.ctx = self._context(case_id)

    def _context(self, case_id: str) -> CoidealContext:
        return get_context(case_id, degree_cap=self.degree_cap, system_loader=self.system_loader)

    @property
    def case_id(self) -> str:
        return self.ctx.case.case_id

    def set_case(self, case_id: str) -> None:
        self.ctx = self._context(case_id)
        logger.info("active case %s", self.case_id)

    def _braid(self) -> BraidActionService:
        svc = self._braids.get(self.case_id)
        if svc is None:
            svc = self._braids[self.case_id] = BraidActionService(self.ctx)
        return svc

    def parse(self, text: str, offset: int = 0) -> AlgebraElement:
        try:
            return parse_expression(text, rd=self.ctx.rd, b_rank=self.ctx.rank, context=self.ctx.name)
        except ParseError as e:
            if not offset:
                raise
            raise type(e)(e.position + offset, e.message) from e

    def run(self, text: str) -> NormalElement | str:
        """Evaluate one REPL line; ``case <id>`` returns a confirmation string."""
        cmd = parse_command(text)
        match cmd.kind:
            case "case":
                self.set_case(cmd.case_id)
                return f"case {self.case_id}"
            case "tau":
                direction = Direction.TAU if cmd.sign == "+" else Direction.TAU_MINUS
                svc = self._braid()
                return svc.apply((svc.tau(cmd.index, direction),), self.parse(cmd.expression, cmd.offset))
            case "T" | "Tinv":
                direction = LusztigDirection.FORWARD if cmd.kind == "T" else LusztigDirection.INVERSE
                x = self.ctx.expand(self.parse(cmd.expression, cmd.offset))
                return lusztig_map(self.ctx.alg, self.ctx.rd.check_node(cmd.index), direction)(x)
        return self.ctx.nf(self.parse(cmd.expression, cmd.offset))

    def render(self, text: str) -> str:
        out = self.run(text)
        return out if isinstance(out, str) else out.render()


class _EvalService(ExpressionService):
    def __init__(self, *, degree_cap: int = DEFAULT_DEGREE_CAP, system_loader: SystemLoader | None = None) -> None:
        self.degree_cap = degree_cap
        self.system_loader = system_loader

    def evaluate(self, case_id: str, text: str) -> EvalResult:
        evaluator = Evaluator(case_id, degree_cap=self.degree_cap, system_loader=self.system_loader)
        out = evaluator.run(text)
        if isinstance(out, str):
            return EvalResult(out, False)
        return EvalResult(out.render(), out.is_zero())


def MakeEvalService(*, degree_cap: int = DEFAULT_DEGREE_CAP, system_loader: SystemLoader | None = None) -> ExpressionService:
    return _EvalService(degree_cap=degree_cap, system_loader=system_loader)
