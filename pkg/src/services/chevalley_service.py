"""Classical counterparts in matrix realizations of g.

Realizations (1-based matrix units E(a, b), bar k = index of -eps_k):

    A_n   sl_{n+1}      e_i = E(i, i+1)
    B_n   so_{2n+1}     e_i = E(i, i+1) - E(bar i+1, bar i), e_n = E(n, 0) - E(0, bar n), f_n = 2 e_n^t
    C_n   sp_{2n}       e_i as for B_n (i < n), e_n = E(n, bar n)
    D_n   so_{2n}       e_i as for B_n (i < n), e_n = E(n-1, bar n) - E(n, bar n-1)

Here 0 is the middle index of so_{2n+1}. Apart from f_n in type B, f_i = e_i^t, and
h_i = [e_i, f_i]. The involutions are

    I     theta(x) = -M x^t M^-1     (M = 1, except diag(1, 2, 4) blocks in type B)
    IIA   theta(x) = A x A^-1        (A antidiagonal with entries (-1)^k)
    IID   theta(x) = -P x^t P        (P swaps the indices of eps_n and -eps_n)
    III   theta(x) = -S x^t S^-1     (S block diagonal with J = [[0, 1], [-1, 0]])

Ad(s_i) is conjugation by g_i = exp(e_i) exp(-f_i) exp(e_i).
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Iterable

from sympy import Matrix, Rational, eye, zeros

from algebra.words import AlgebraElement, GenSymbol
from models.enums import CaseVariant, Direction, GenKind
from models.report import Identity, TermsResidual
from models.rootdata import CaseSpec, i_sigma_theta, parse_case, sigma_root_datum
from models.scalar import evaluate_at

logger = logging.getLogger(__name__)


class ChevalleyError(ValueError):
    """Base class for classical realization errors."""


def unit(size: int, a: int, b: int) -> Matrix:
    x = zeros(size, size)
    x[a - 1, b - 1] = 1
    return x


def bracket(x: Matrix, y: Matrix) -> Matrix:
    return x * y - y * x


def exp_nilpotent(x: Matrix) -> Matrix:
    result = eye(x.rows)
    term = eye(x.rows)
    for k in range(1, x.rows + 1):
        term = term * x / k
        if term.is_zero_matrix:
            return result
        result = result + term
    raise ChevalleyError("matrix is not nilpotent")


def matrix_residual(x: Matrix) -> TermsResidual:
    return TermsResidual({(r, c): x[r, c] for r in range(x.rows) for c in range(x.cols) if x[r, c] != 0})


@dataclass
class Realization:
    case: CaseSpec
    size: int
    e: dict[int, Matrix]
    f: dict[int, Matrix]
    theta: Callable[[Matrix], Matrix]
    h: dict[int, Matrix] = field(default_factory=dict)
    k: dict[str, Matrix] = field(default_factory=dict)
    _conjugators: dict[int, tuple[Matrix, Matrix]] = field(default_factory=dict, repr=False)

    @property
    def rd(self):
        return self.case.root

    def generators(self) -> dict[str, Matrix]:
        out: dict[str, Matrix] = {}
        for i in self.rd.nodes:
            out[f"e{i}"], out[f"f{i}"], out[f"h{i}"] = self.e[i], self.f[i], self.h[i]
        return out

    def b(self, j: int) -> Matrix:
        return self.k[f"b{j}"]

    def check(self) -> None:
        """Chevalley relations, theta^2 = id and theta-invariance of the listed k-generators."""
        rd = self.rd
        for i in rd.nodes:
            for j in rd.nodes:
                expected = self.h[i] if i == j else zeros(self.size, self.size)
                if bracket(self.e[i], self.f[j]) != expected:
                    raise ChevalleyError(f"{self.case.case_id}: [e{i}, f{j}] is wrong")
                if bracket(self.h[i], self.e[j]) != rd.a(i, j) * self.e[j]:
                    raise ChevalleyError(f"{self.case.case_id}: [h{i}, e{j}] != a_{i}{j} e{j}")
        for label, x in self.generators().items():
            if self.theta(self.theta(x)) != x:
                raise ChevalleyError(f"{self.case.case_id}: theta^2 moves {label}")
        for label, x in self.k.items():
            if self.theta(x) != x:
                raise ChevalleyError(f"{self.case.case_id}: {label} is not theta-fixed")

    # braid group action

    def conjugator(self, i: int) -> tuple[Matrix, Matrix]:
        if i not in self._conjugators:
            e, f = self.e[i], self.f[i]
            g = exp_nilpotent(e) * exp_nilpotent(-f) * exp_nilpotent(e)
            g_inv = exp_nilpotent(-e) * exp_nilpotent(f) * exp_nilpotent(-e)
            self._conjugators[i] = (g, g_inv)
        return self._conjugators[i]

    def word_conjugator(self, nodes: Iterable[int]) -> tuple[Matrix, Matrix]:
        g, g_inv = eye(self.size), eye(self.size)
        for i in nodes:
            gi, gi_inv = self.conjugator(i)
            g, g_inv = g * gi, gi_inv * g_inv
        return g, g_inv

    def ad(self, nodes: Iterable[int], y: Matrix) -> Matrix:
        """Ad(s_{i1} ... s_{ik})(y)."""
        g, g_inv = self.word_conjugator(nodes)
        return g * y * g_inv


def _a_type(n: int) -> tuple[int, dict[int, Matrix], dict[int, Matrix]]:
    size = n + 1
    e = {i: unit(size, i, i + 1) for i in range(1, n + 1)}
    return size, e, {i: x.T for i, x in e.items()}


def _chain(size: int, n: int, bar: Callable[[int], int]) -> dict[int, Matrix]:
    return {i: unit(size, i, i + 1) - unit(size, bar(i + 1), bar(i)) for i in range(1, n)}


def _b_type(n: int) -> tuple[int, dict[int, Matrix], dict[int, Matrix], Matrix]:
    size, zero = 2 * n + 1, n + 1

    def bar(k: int) -> int:
        return n + 1 + k

    e = _chain(size, n, bar)
    f = {i: x.T for i, x in e.items()}
    e[n] = unit(size, n, zero) - unit(size, zero, bar(n))
    f[n] = 2 * (unit(size, zero, n) - unit(size, bar(n), zero))
    weights = [1] * n + [2] + [4] * n
    return size, e, f, Matrix.diag(*weights)


def _c_type(n: int) -> tuple[int, dict[int, Matrix], dict[int, Matrix]]:
    size = 2 * n

    def bar(k: int) -> int:
        return n + k

    e = _chain(size, n, bar)
    e[n] = unit(size, n, bar(n))
    return size, e, {i: x.T for i, x in e.items()}


def _d_type(n: int) -> tuple[int, dict[int, Matrix], dict[int, Matrix]]:
    size = 2 * n

    def bar(k: int) -> int:
        return n + k

    e = _chain(size, n, bar)
    e[n] = unit(size, n - 1, bar(n)) - unit(size, n, bar(n - 1))
    return size, e, {i: x.T for i, x in e.items()}


def _transpose_involution(weights: Matrix) -> Callable[[Matrix], Matrix]:
    weights_inv = weights.inv()
    return lambda x: -weights * x.T * weights_inv


def _conjugation(a: Matrix) -> Callable[[Matrix], Matrix]:
    a_inv = a.inv()
    return lambda x: a * x * a_inv


def realize(case: CaseSpec | str) -> Realization:
    if isinstance(case, str):
        case = parse_case(case)
    rd = case.root
    type_label, n = rd.type_label, rd.rank
    if case.variant is CaseVariant.IIE or type_label not in ("A", "B", "C", "D"):
        raise ChevalleyError(f"no classical realization for {case.case_id}")
    weights = None
    match type_label:
        case "A":
            size, e, f = _a_type(n)
        case "B":
            size, e, f, weights = _b_type(n)
        case "C":
            size, e, f = _c_type(n)
        case _:
            size, e, f = _d_type(n)
    match case.variant:
        case CaseVariant.I:
            theta = _transpose_involution(weights if weights is not None else eye(size))
        case CaseVariant.IIA:
            a = zeros(size, size)
            for k in range(1, size + 1):
                a[k - 1, size - k] = (-1) ** k
            theta = _conjugation(a)
        case CaseVariant.IID:
            swap = eye(size)
            swap[n - 1, n - 1] = swap[2 * n - 1, 2 * n - 1] = 0
            swap[n - 1, 2 * n - 1] = swap[2 * n - 1, n - 1] = 1
            theta = _transpose_involution(swap)
        case _:
            s = zeros(size, size)
            for k in range(1, size, 2):
                s[k - 1, k] = 1
                s[k, k - 1] = -1
            theta = _transpose_involution(s)
    real = Realization(case, size, e, f, theta)
    real.h = {i: bracket(e[i], f[i]) for i in rd.nodes}
    if case.variant is CaseVariant.III:
        for j in case.wx:
            real.k[f"e{j}"], real.k[f"b{j}"], real.k[f"h{j}"] = e[j], f[j], real.h[j]
        for j in range(2, n, 2):
            real.k[f"b{j}"] = f[j] + theta(f[j])
    else:
        for i in rd.nodes:
            real.k[f"b{i}"] = f[i] + theta(f[i])
            ti = case.tau_of(i)
            if i < ti:
                real.k[f"h{i}-h{ti}"] = real.h[i] - real.h[ti]
    real.check()
    logger.debug("realized %s in %dx%d matrices", case.case_id, size, size)
    return real


def ad_braid(real: Realization, i: int) -> Callable[[Matrix], Matrix]:
    real.rd.check_node(i)
    return lambda y: real.ad((i,), y)


# checks


def _matrix_identity(label: str, compute: Callable[[], Matrix]) -> Identity:
    return Identity(label, lambda: matrix_residual(compute()))


def adbj_expected(real: Realization, i: int, j: int) -> Matrix:
    """Ad(s_2i s_2i-1 s_2i+1 s_2i)(b_j) in closed form (case III)."""
    b = real.b
    if j == 2 * i - 2:
        return bracket(bracket(b(j), b(2 * i - 1)), b(2 * i))
    if j == 2 * i - 1:
        return b(2 * i + 1)
    if j == 2 * i + 1:
        return b(2 * i - 1)
    if j == 2 * i + 2:
        return bracket(bracket(b(j), b(2 * i + 1)), b(2 * i))
    return b(j)


def _sigma_nodes(case: CaseSpec, k: int) -> tuple[int, ...]:
    return tuple(node for node, _ in i_sigma_theta(case, k))


def verify_classical(case: CaseSpec | str) -> list[Identity]:
    real = realize(case)
    case = real.case
    gens = real.generators()
    sigma = sigma_root_datum(case)
    identities: list[Identity] = []
    if case.variant is CaseVariant.III:
        m = case.param
        for i in range(1, m):
            word = _sigma_nodes(case, i)
            for j in range(1, 2 * m):
                identities.append(
                    _matrix_identity(
                        f"classical/{case.case_id}/Adbj/i={i},j={j}",
                        lambda word=word, i=i, j=j: real.ad(word, real.b(j)) - adbj_expected(real, i, j),
                    )
                )
    for k in sigma.nodes:
        word = _sigma_nodes(case, k)
        for label, x in gens.items():
            identities.append(
                _matrix_identity(
                    f"classical/{case.case_id}/theta-commutes/k={k}/{label}",
                    lambda word=word, x=x: real.ad(word, real.theta(x)) - real.theta(real.ad(word, x)),
                )
            )
    for k in sigma.nodes:
        for l in sigma.nodes:
            if k >= l:
                continue
            mkl = sigma.m(k, l)
            left = sum((_sigma_nodes(case, (k, l)[t % 2]) for t in range(mkl)), ())
            right = sum((_sigma_nodes(case, (l, k)[t % 2]) for t in range(mkl)), ())
            for label, x in gens.items():
                identities.append(
                    _matrix_identity(
                        f"classical/{case.case_id}/braid/k={k},l={l}/{label}",
                        lambda left=left, right=right, x=x: real.ad(left, x) - real.ad(right, x),
                    )
                )
    if case.variant is CaseVariant.III:
        for j in case.wx:
            if j + 1 < real.rd.rank:
                identities.append(
                    _matrix_identity(
                        f"classical/{case.case_id}/square/j={j}",
                        lambda j=j: real.ad((j, j), real.b(j + 1)) + real.b(j + 1),
                    )
                )
            for label, x in real.k.items():
                identities.append(
                    _matrix_identity(
                        f"classical/{case.case_id}/order4/j={j}/{label}",
                        lambda j=j, x=x: real.ad((j,) * 4, x) - x,
                    )
                )
    return identities


def specialise(real: Realization, x: AlgebraElement) -> Matrix:
    """Value at q = 1, K = 1 of a formal element in the matrix realization."""
    out = zeros(real.size, real.size)
    for word, c in x.terms.items():
        coefficient = evaluate_at(c, 1)
        if coefficient == 0:
            continue
        prod = eye(real.size)
        for g in word:
            match g.kind:
                case GenKind.B:
                    prod = prod * real.b(g.node)
                case GenKind.E:
                    prod = prod * real.e[g.node]
                case GenKind.F:
                    prod = prod * real.f[g.node]
        out = out + Rational(coefficient) * prod
    return out


def verify_q1_degeneration(m: int, **context_kw) -> list[Identity]:
    """tau_i at q = 1, K = 1 against Ad(s_2i s_2i-1 s_2i+1 s_2i) on b_j."""
    from services.braid_action_service import tau_images
    from services.qsp_service import get_context

    case = parse_case(f"III-A{2 * m - 1}")
    real = realize(case)
    ctx = get_context(case, **context_kw)
    identities: list[Identity] = []
    for i in range(1, m):
        images = tau_images(ctx, i, Direction.TAU).images
        word = _sigma_nodes(case, i)
        for j in range(1, 2 * m):
            formal = images.image(GenSymbol(GenKind.B, j))
            identities.append(
                _matrix_identity(
                    f"classical/q=1/i={i},j={j}",
                    lambda formal=formal, word=word, j=j: specialise(real, formal) - real.ad(word, real.b(j)),
                )
            )
    return identities
