"""Noncommutative completion for the positive and negative parts of U_q(g).

Words are tuples of node indices. The order is degree-lexicographic with
ascending node order, so for a relation the largest word leads. Completion
is the Buchberger / Knuth-Bendix loop on overlap ambiguities, processed by
increasing overlap degree up to a cap. A system is certified when no overlap
was skipped for exceeding the cap, i.e. every overlap of its final rules
resolved to zero.
"""
from __future__ import annotations

import heapq
import logging
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass

from tqdm import tqdm

from algebra.words import AlgebraError
from models.scalar import ONE, Scalar

logger = logging.getLogger(__name__)

NodeWord = tuple[int, ...]
Poly = dict[NodeWord, Scalar]

DEFAULT_DEGREE_CAP = 16


class DegreeCapExceeded(AlgebraError):
    """An overlap above the completion degree cap was needed."""

    def __init__(self, overlap: NodeWord, cap: int, message: str | None = None):
        self.overlap = overlap
        self.cap = cap
        self.message = message or (
            f"overlap {'.'.join(map(str, overlap))} of degree {len(overlap)} exceeds degree cap {cap}; "
            f"rerun with a larger --degree-cap"
        )
        super().__init__(self.message)

    def __reduce__(self):
        # copy and pickle (process pool results) rebuild from all three fields
        return type(self), (self.overlap, self.cap, self.message)


def deglex_key(word: NodeWord) -> tuple[int, NodeWord]:
    return len(word), word


def leading_word(poly: Mapping[NodeWord, Scalar]) -> NodeWord:
    return max(poly, key=deglex_key)


def _heap_entry(word: NodeWord):
    # heapq is a min-heap; negate so the deglex-largest word pops first
    return (-len(word), tuple(-x for x in word), word)


def _add_into(target: Poly, word: NodeWord, c: Scalar) -> None:
    value = target.get(word, 0) + c
    if value:
        target[word] = value
    else:
        target.pop(word, None)


@dataclass(frozen=True)
class Overlap:
    word: NodeWord
    left: NodeWord
    right: NodeWord
    shift: int

    @property
    def degree(self) -> int:
        return len(self.word)


def overlaps_between(l1: NodeWord, l2: NodeWord) -> Iterator[Overlap]:
    """Proper overlaps: a suffix of l1 equal to a prefix of l2."""
    for k in range(1, min(len(l1), len(l2))):
        if l1[-k:] == l2[:k]:
            yield Overlap(l1 + l2[k:], l1, l2, len(l1) - k)


class RewritingSystem:
    def __init__(
        self,
        rules: Mapping[NodeWord, Mapping[NodeWord, Scalar]],
        *,
        label: str = "",
        degree_cap: int = DEFAULT_DEGREE_CAP,
        certified: bool = False,
        overlaps_checked: int = 0,
        skipped_overlap: NodeWord | None = None,
    ):
        self.rules: dict[NodeWord, Poly] = {lhs: dict(rhs) for lhs, rhs in rules.items()}
        self.label = label
        self.degree_cap = degree_cap
        self.certified = certified
        self.overlaps_checked = overlaps_checked
        self.skipped_overlap = skipped_overlap
        self.max_lhs = max((len(lhs) for lhs in self.rules), default=0)
        self._cache: dict[NodeWord, Poly] = {}

    def __len__(self) -> int:
        return len(self.rules)

    def __repr__(self) -> str:
        flag = "certified" if self.certified else "uncertified"
        return f"RewritingSystem({self.label!r}, {len(self.rules)} rules, cap={self.degree_cap}, {flag})"

    def find_redex(self, word: NodeWord) -> tuple[int, NodeWord] | None:
        """Leftmost position at which some rule applies."""
        if not self.max_lhs:
            return None
        n = len(word)
        for start in range(n):
            for length in range(1, min(self.max_lhs, n - start) + 1):
                sub = word[start : start + length]
                if sub in self.rules:
                    return start, sub
        return None

    def is_irreducible(self, word: NodeWord) -> bool:
        return self.find_redex(word) is None

    def reduce(self, poly: Mapping[NodeWord, Scalar], *, use_cache: bool = True) -> Poly:
        """Full reduction; each word is rewritten once, largest first."""
        pool: Poly = {w: c for w, c in poly.items() if c}
        heap = [_heap_entry(w) for w in pool]
        heapq.heapify(heap)
        result: Poly = {}
        while heap:
            word = heapq.heappop(heap)[2]
            c = pool.pop(word, None)
            if not c:
                continue
            if use_cache and word in self._cache:
                for w, x in self._cache[word].items():
                    _add_into(result, w, c * x)
                continue
            redex = self.find_redex(word)
            if redex is None:
                _add_into(result, word, c)
                continue
            start, lhs = redex
            prefix, suffix = word[:start], word[start + len(lhs) :]
            for u, d in self.rules[lhs].items():
                new = prefix + u + suffix
                if new not in pool:
                    heapq.heappush(heap, _heap_entry(new))
                _add_into(pool, new, c * d)
        return result

    def reduce_word(self, word: NodeWord) -> Poly:
        cached = self._cache.get(word)
        if cached is None:
            cached = self.reduce({word: ONE}, use_cache=True)
            self._cache[word] = cached
        return cached

    def s_element(self, overlap: Overlap) -> Poly:
        """Difference of the two one-step resolutions of an overlap, fully reduced."""
        tail = overlap.word[len(overlap.left) :]
        head = overlap.word[: overlap.shift]
        poly: Poly = {}
        for u, d in self.rules[overlap.left].items():
            _add_into(poly, u + tail, d)
        for u, d in self.rules[overlap.right].items():
            _add_into(poly, head + u, -d)
        return self.reduce(poly, use_cache=False)

    def all_overlaps(self) -> Iterator[Overlap]:
        lhss = sorted(self.rules, key=deglex_key)
        for l1 in lhss:
            for l2 in lhss:
                yield from overlaps_between(l1, l2)

    def verify_certificate(self) -> bool:
        """Recheck local confluence: every overlap S-element reduces to zero."""
        for ov in self.all_overlaps():
            if self.s_element(ov):
                logger.warning("%s: overlap %s does not resolve", self.label, ov.word)
                return False
        # interreduced: no left side contains another one
        return all(self.is_irreducible(lhs[1:]) and self.is_irreducible(lhs[:-1]) for lhs in self.rules)



class _Completion:
    def __init__(self, label: str, cap: int, progress: bool):
        self.label = label
        self.cap = cap
        self.progress = progress
        # mutated in place; the reduction cache stays off until completion is over
        self.system = RewritingSystem({}, label=label, degree_cap=cap)
        self.queue: list[tuple[int, int, Overlap]] = []
        self.overlaps_checked = 0
        self.skipped: NodeWord | None = None
        self._counter = 0

    @property
    def rules(self) -> dict[NodeWord, Poly]:
        return self.system.rules

    def _push_overlaps(self, lhs: NodeWord) -> None:
        for other in list(self.rules):
            pairs = [(lhs, other)] if other == lhs else [(lhs, other), (other, lhs)]
            for l1, l2 in pairs:
                for ov in overlaps_between(l1, l2):
                    self._counter += 1
                    heapq.heappush(self.queue, (ov.degree, self._counter, ov))

    def _set_rule(self, lhs: NodeWord, rhs: Poly | None) -> None:
        if rhs is None:
            del self.rules[lhs]
        else:
            self.rules[lhs] = rhs
        self.system.max_lhs = max((len(l) for l in self.rules), default=0)

    def add(self, relator: Mapping[NodeWord, Scalar]) -> None:
        pending: list[Poly] = [dict(relator)]
        while pending:
            poly = self.system.reduce(pending.pop(), use_cache=False)
            if not poly:
                continue
            lead = leading_word(poly)
            if len(lead) > self.cap:
                raise DegreeCapExceeded(lead, self.cap, f"{self.label}: new rule {lead} is longer than degree cap {self.cap}")
            c = poly[lead]
            rhs = {w: -x / c for w, x in poly.items() if w != lead}
            # rules whose left side contains the new one go back on the pending pile
            for old in [l for l in self.rules if _contains(l, lead)]:
                back = {old: ONE}
                for w, x in self.rules[old].items():
                    _add_into(back, w, -x)
                self._set_rule(old, None)
                pending.append(back)
            self._set_rule(lead, rhs)
            for l in list(self.rules):
                self.rules[l] = self.system.reduce(self.rules[l], use_cache=False)
            logger.debug("%s: rule %s (%d terms)", self.label, lead, len(rhs))
            self._push_overlaps(lead)

    def run(self) -> RewritingSystem:
        bar = tqdm(desc=f"completing {self.label}", unit="overlap", disable=not self.progress, leave=False)
        current_degree = 0
        try:
            while self.queue:
                degree, _, ov = heapq.heappop(self.queue)
                if ov.left not in self.rules or ov.right not in self.rules:
                    continue
                if degree > self.cap:
                    if self.skipped is None:
                        self.skipped = ov.word
                    continue
                if degree != current_degree:
                    logger.debug("%s: overlaps of degree %d, %d rules", self.label, degree, len(self.rules))
                    current_degree = degree
                self.overlaps_checked += 1
                bar.update(1)
                s = self.system.s_element(ov)
                if s:
                    self.add(s)
        finally:
            bar.close()
        certified = self.skipped is None
        logger.info(
            "%s: %d rules after %d overlaps (%s)",
            self.label,
            len(self.rules),
            self.overlaps_checked,
            "certified" if certified else f"uncertified, first skipped overlap {self.skipped}",
        )
        return RewritingSystem(
            self.rules,
            label=self.label,
            degree_cap=self.cap,
            certified=certified,
            overlaps_checked=self.overlaps_checked,
            skipped_overlap=self.skipped,
        )


def _contains(word: NodeWord, sub: NodeWord) -> bool:
    n = len(sub)
    return any(word[i : i + n] == sub for i in range(len(word) - n + 1))


def complete(
    relators: Iterable[Mapping[NodeWord, Scalar]],
    *,
    degree_cap: int = DEFAULT_DEGREE_CAP,
    label: str = "",
    progress: bool = False,
) -> RewritingSystem:
    if degree_cap < 1:
        raise ValueError(f"degree cap must be positive, got {degree_cap}")
    state = _Completion(label, degree_cap, progress)
    for relator in relators:
        state.add(relator)
    return state.run()
