"""Cartan data for finite types and the symmetric-pair cases built on them.

Conventions (Bourbaki numbering throughout):

    a_ij = 2(a_i, a_j)/(a_i, a_i),   (a_i, a_i) = 2 d_i,   pairing(i, j) = d_i a_ij

so [h_i, e_j] = a_ij e_j and s_i(a_j) = a_j - a_ij a_i.

    type  short roots          d
    B_n   a_n                  (2, ..., 2, 1)
    C_n   a_1 .. a_{n-1}       (1, ..., 1, 2)
    F_4   a_3, a_4             (2, 2, 1, 1)
    G_2   a_1                  (1, 3)        a_12 = -3, a_21 = -1

Nodes are 1-based everywhere in the public API.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property

from models.enums import CaseVariant


class RootDataError(ValueError):
    """Invalid type, rank, case identifier or node."""


BraidLetter = tuple[int, int]
BraidWordT = tuple[BraidLetter, ...]


@dataclass(frozen=True)
class RootDatum:
    name: str
    cartan: tuple[tuple[int, ...], ...]
    d: tuple[int, ...]
    type_label: str | None = None
    tau: tuple[int, ...] | None = field(default=None, compare=False)

    @property
    def rank(self) -> int:
        return len(self.d)

    @property
    def nodes(self) -> range:
        return range(1, self.rank + 1)

    def a(self, i: int, j: int) -> int:
        return self.cartan[i - 1][j - 1]

    def pairing(self, i: int, j: int) -> int:
        return self.d[i - 1] * self.cartan[i - 1][j - 1]

    def d_of(self, i: int) -> int:
        return self.d[i - 1]

    def m(self, i: int, j: int) -> int:
        if i == j:
            return 1
        return {0: 2, 1: 3, 2: 4, 3: 6}[self.a(i, j) * self.a(j, i)]

    def check_node(self, i: int) -> int:
        if not 1 <= i <= self.rank:
            raise RootDataError(f"node {i} out of range for {self.name}")
        return i

    def pairing_with_weight(self, lam: tuple[int, ...], j: int) -> int:
        """(lam, a_j) for lam given in simple-root coordinates."""
        return sum(c * self.pairing(i, j) for i, c in enumerate(lam, start=1) if c)

    def reflect(self, i: int, x: tuple[int, ...]) -> tuple[int, ...]:
        coroot = sum(c * self.a(i, j) for j, c in enumerate(x, start=1) if c)
        if coroot == 0:
            return x
        out = list(x)
        out[i - 1] -= coroot
        return tuple(out)

    def weyl_image(self, nodes: tuple[int, ...] | list[int], x: tuple[int, ...]) -> tuple[int, ...]:
        """s_{i1} ... s_{ik}(x), innermost reflection last in ``nodes``."""
        for i in reversed(nodes):
            x = self.reflect(i, x)
        return x

    @cached_property
    def positive_roots(self) -> tuple[tuple[int, ...], ...]:
        simple = [tuple(1 if k == i else 0 for k in range(self.rank)) for i in range(self.rank)]
        seen = set(simple)
        frontier = list(simple)
        while frontier:
            nxt = []
            for root in frontier:
                for i in self.nodes:
                    image = self.reflect(i, root)
                    if image not in seen and all(c >= 0 for c in image):
                        seen.add(image)
                        nxt.append(image)
            frontier = nxt
        return tuple(sorted(seen, key=lambda r: (sum(r), r)))

    def validate(self) -> None:
        n = self.rank
        for i in range(n):
            if self.cartan[i][i] != 2:
                raise RootDataError(f"{self.name}: a_ii must be 2")
            for j in range(n):
                if i == j:
                    continue
                if self.cartan[i][j] > 0:
                    raise RootDataError(f"{self.name}: positive off-diagonal entry")
                if self.d[i] * self.cartan[i][j] != self.d[j] * self.cartan[j][i]:
                    raise RootDataError(f"{self.name}: not symmetrised by d")
                if self.cartan[i][j] * self.cartan[j][i] not in (0, 1, 2, 3):
                    raise RootDataError(f"{self.name}: not of finite type")
        if self.tau is not None:
            for i in range(n):
                if self.tau[self.tau[i] - 1] != i + 1:
                    raise RootDataError(f"{self.name}: tau is not an involution")
                for j in range(n):
                    if self.cartan[self.tau[i] - 1][self.tau[j] - 1] != self.cartan[i][j]:
                        raise RootDataError(f"{self.name}: tau is not a diagram automorphism")


_VALID_RANKS = {
    "A": lambda n: n >= 1,
    "B": lambda n: n >= 2,
    "C": lambda n: n >= 2,
    "D": lambda n: n >= 4,
    "E": lambda n: n in (6, 7, 8),
    "F": lambda n: n == 4,
    "G": lambda n: n == 2,
}


def _edges(type_label: str, n: int) -> list[tuple[int, int, int]]:
    """Edges (i, j, (a_i, a_j)) of the Dynkin diagram."""
    match type_label:
        case "A":
            return [(i, i + 1, -1) for i in range(1, n)]
        case "B":
            return [(i, i + 1, -2) for i in range(1, n)]
        case "C":
            return [(i, i + 1, -1) for i in range(1, n - 1)] + [(n - 1, n, -2)]
        case "D":
            return [(i, i + 1, -1) for i in range(1, n - 1)] + [(n - 2, n, -1)]
        case "E":
            return [(1, 3, -1), (2, 4, -1)] + [(i, i + 1, -1) for i in range(3, n)]
        case "F":
            return [(1, 2, -2), (2, 3, -2), (3, 4, -1)]
        case "G":
            return [(1, 2, -3)]
    raise RootDataError(f"unknown type {type_label!r}")


def _symmetrizer(type_label: str, n: int) -> tuple[int, ...]:
    match type_label:
        case "B":
            return tuple([2] * (n - 1) + [1])
        case "C":
            return tuple([1] * (n - 1) + [2])
        case "F":
            return (2, 2, 1, 1)
        case "G":
            return (1, 3)
    return tuple([1] * n)


def _from_form(name: str, d: tuple[int, ...], edges, type_label: str | None) -> RootDatum:
    n = len(d)
    cartan = [[0] * n for _ in range(n)]
    for i in range(n):
        cartan[i][i] = 2
    for i, j, form in edges:
        cartan[i - 1][j - 1] = 2 * form // (2 * d[i - 1])
        cartan[j - 1][i - 1] = 2 * form // (2 * d[j - 1])
    return RootDatum(name=name, cartan=tuple(map(tuple, cartan)), d=d, type_label=type_label)


def diagram_automorphism(type_label: str, n: int) -> tuple[int, ...] | None:
    match type_label:
        case "A":
            return tuple(n + 1 - i for i in range(1, n + 1))
        case "D":
            return tuple(list(range(1, n - 1)) + [n, n - 1])
        case "E" if n == 6:
            return (6, 2, 5, 4, 3, 1)
    return None


def build_root_datum(type_label: str, rank: int) -> RootDatum:
    type_label = type_label.upper()
    if type_label not in _VALID_RANKS or not _VALID_RANKS[type_label](rank):
        raise RootDataError(f"no finite type {type_label}{rank}")
    d = _symmetrizer(type_label, rank)
    rd = _from_form(f"{type_label}{rank}", d, _edges(type_label, rank), type_label)
    rd.validate()
    return rd


def direct_sum(*parts: RootDatum) -> RootDatum:
    n = sum(p.rank for p in parts)
    cartan = [[0] * n for _ in range(n)]
    d: list[int] = []
    offset = 0
    for p in parts:
        for i in range(p.rank):
            for j in range(p.rank):
                cartan[offset + i][offset + j] = p.cartan[i][j]
        d.extend(p.d)
        offset += p.rank
    rd = RootDatum(name="x".join(p.name for p in parts), cartan=tuple(map(tuple, cartan)), d=tuple(d))
    rd.validate()
    return rd


_NAME = re.compile(r"^([A-Ga-g])(\d+)$")


def root_datum_from_name(name: str) -> RootDatum:
    """'B3' or a direct sum such as 'A1xA1'."""
    parts = []
    for piece in name.split("x"):
        match = _NAME.match(piece.strip())
        if not match:
            raise RootDataError(f"cannot parse root datum name {name!r}")
        parts.append(build_root_datum(match.group(1), int(match.group(2))))
    return parts[0] if len(parts) == 1 else direct_sum(*parts)


@dataclass(frozen=True)
class CaseSpec:
    case_id: str
    variant: CaseVariant
    param: int
    root: RootDatum
    tau: tuple[int, ...] | None = None

    def tau_of(self, i: int) -> int:
        return self.tau[i - 1] if self.tau is not None else i

    @property
    def wx(self) -> tuple[int, ...]:
        """Odd nodes 1, 3, ..., 2m-1 (case III only)."""
        if self.variant is not CaseVariant.III:
            return ()
        return tuple(range(1, 2 * self.param, 2))

    @property
    def sigma_rank(self) -> int:
        return sigma_braid_type(self)[1]


_CASE = re.compile(r"^(I|II|III)-([A-G])(\d+)$")
# case I over a reducible root datum, e.g. "I-A1xA1"
_SUM_CASE = re.compile(r"^I-([A-G]\d+(?:X[A-G]\d+)+)$")


def parse_case(case_id: str) -> CaseSpec:
    text = case_id.strip().upper()
    summed = _SUM_CASE.match(text)
    if summed:
        rd = root_datum_from_name(summed.group(1).replace("X", "x"))
        return CaseSpec(f"I-{rd.name}", CaseVariant.I, rd.rank, rd)
    match = _CASE.match(text)
    if not match:
        raise RootDataError(f"unknown case identifier {case_id!r}")
    family, type_label, rank = match.group(1), match.group(2), int(match.group(3))
    case_id = f"{family}-{type_label}{rank}"
    if family == "I":
        return CaseSpec(case_id, CaseVariant.I, rank, build_root_datum(type_label, rank))
    if family == "II":
        tau = diagram_automorphism(type_label, rank)
        if type_label == "A" and rank >= 2:
            variant, param = CaseVariant.IIA, rank
        elif type_label == "D" and rank >= 5:
            variant, param = CaseVariant.IID, rank - 1
        elif type_label == "E" and rank == 6:
            variant, param = CaseVariant.IIE, 6
        else:
            raise RootDataError(f"case II needs A_n (n>=2), D_n (n>=5) or E6, got {type_label}{rank}")
        base = build_root_datum(type_label, rank)
        root = RootDatum(base.name, base.cartan, base.d, base.type_label, tau)
        root.validate()
        return CaseSpec(case_id, variant, param, root, tau)
    if type_label != "A" or rank % 2 == 0 or rank < 3:
        raise RootDataError(f"case III needs A_(2m-1) with m>=2, got {type_label}{rank}")
    return CaseSpec(case_id, CaseVariant.III, (rank + 1) // 2, build_root_datum(type_label, rank))


def sigma_braid_type(case: CaseSpec) -> tuple[str, int]:
    match case.variant:
        case CaseVariant.I:
            return case.root.type_label or case.root.name, case.root.rank
        case CaseVariant.IIA:
            r = (case.param + 1) // 2
            return ("A", 1) if r == 1 else ("B", r)
        case CaseVariant.IID:
            return "B", case.param
        case CaseVariant.IIE:
            return "F", 4
        case CaseVariant.III:
            return "A", case.param - 1
    raise RootDataError(f"unsupported case {case.case_id}")


def sigma_root_datum(case: CaseSpec) -> RootDatum:
    type_label, rank = sigma_braid_type(case)
    return build_root_datum(type_label, rank)


def i_sigma_theta(case: CaseSpec, i: int) -> BraidWordT:
    """Image of the restricted braid generator i as a positive word in Br(g)."""
    _, rank = sigma_braid_type(case)
    if not 1 <= i <= rank:
        raise RootDataError(f"node {i} out of range for the restricted braid group of {case.case_id}")
    match case.variant:
        case CaseVariant.I:
            nodes: tuple[int, ...] = (i,)
        case CaseVariant.IIA:
            n = case.param
            r = (n + 1) // 2
            if i != r:
                nodes = (i, n - i + 1)
            elif n % 2 == 0:
                nodes = (r, r + 1, r)
            else:
                nodes = (r,)
        case CaseVariant.IID:
            n = case.param
            nodes = (i,) if i != n else (n, n + 1)
        case CaseVariant.IIE:
            nodes = {1: (1, 6), 2: (3, 5), 3: (4,), 4: (2,)}[i]
        case CaseVariant.III:
            nodes = (2 * i, 2 * i - 1, 2 * i + 1, 2 * i)
    return tuple((node, 1) for node in nodes)
