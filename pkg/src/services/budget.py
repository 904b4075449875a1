"""Per-identity resource ceilings.

A ``Budget`` is activated around one identity evaluation; the product and
composition loops report their term counts through ``checkpoint``, which is a
no-op when no budget is active.
"""
import logging
import resource
import sys
import time
from contextlib import contextmanager
from contextvars import ContextVar
from typing import Iterator, Optional

logger = logging.getLogger(__name__)

DEFAULT_MEM_LIMIT = 8 * 1024**3
DEFAULT_TIME_BUDGET = 1800.0
DEFAULT_TERM_LIMIT = 2_000_000

# ru_maxrss is KiB on Linux and bytes on macOS
_RSS_UNIT = 1 if sys.platform == "darwin" else 1024


class BudgetExceeded(RuntimeError):
    """An identity ran past its time, memory or term ceiling."""

    def __init__(self, reason: str, value: float, limit: float):
        self.reason = reason
        self.value = value
        self.limit = limit
        super().__init__(f"{reason} budget exceeded: {value:.0f} > {limit:.0f}")

    def __reduce__(self):
        return type(self), (self.reason, self.value, self.limit)


def max_rss_bytes() -> int:
    return resource.getrusage(resource.RUSAGE_SELF).ru_maxrss * _RSS_UNIT


class Budget:
    def __init__(
        self,
        *,
        time_budget: float = DEFAULT_TIME_BUDGET,
        mem_limit: int = DEFAULT_MEM_LIMIT,
        term_limit: int = DEFAULT_TERM_LIMIT,
        check_every: int = 64,
    ) -> None:
        self.time_budget = time_budget
        self.mem_limit = mem_limit
        self.term_limit = term_limit
        self.check_every = check_every
        self.max_terms = 0
        self._ticks = 0
        self._started = time.monotonic()

    def restart(self) -> None:
        self.max_terms = 0
        self._ticks = 0
        self._started = time.monotonic()

    @property
    def elapsed(self) -> float:
        return time.monotonic() - self._started

    def check(self, terms: int = 0) -> None:
        if terms > self.max_terms:
            self.max_terms = terms
            if terms > self.term_limit:
                raise BudgetExceeded("terms", terms, self.term_limit)
        self._ticks += 1
        if self._ticks % self.check_every:
            return
        elapsed = self.elapsed
        if elapsed > self.time_budget:
            raise BudgetExceeded("time", elapsed, self.time_budget)
        rss = max_rss_bytes()
        if rss > self.mem_limit:
            raise BudgetExceeded("memory", rss, self.mem_limit)


_ACTIVE: ContextVar[Optional[Budget]] = ContextVar("active_budget", default=None)


@contextmanager
def active(budget: Budget) -> Iterator[Budget]:
    budget.restart()
    token = _ACTIVE.set(budget)
    try:
        yield budget
    finally:
        _ACTIVE.reset(token)


def checkpoint(terms: int = 0) -> None:
    budget = _ACTIVE.get()
    if budget is not None:
        budget.check(terms)


def current() -> Optional[Budget]:
    return _ACTIVE.get()
