"""Verification suites.

A suite is an ordered list of checks; a check expands into labelled
identities, each evaluated under its own Budget. Checks are the unit of work
handed to the process pool, so every worker rebuilds its own algebras (the
completed rewriting systems come from the shared sqlite cache).

Row status:
    pass     residual is zero
    fail     nonzero residual under a confluence certificate, or an unexpected error
    skipped  budget exhausted, degree cap hit, or a --long check without --long
"""
from __future__ import annotations

import logging
import random
import threading
import time
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, Iterator, Protocol

from tqdm import tqdm

from algebra.lusztig import verify_T_properties
from algebra.rewriting import DegreeCapExceeded
from algebra.uqg import SystemLoader
from algebra.words import AlgebraElement, GenSymbol
from config import CHECKS, SCRIPT_SUITES, SuiteConfig
from db.driver import cache_url, create_tables, make_engine, make_session_factory
from db.system_store import cached_system_loader
from models.enums import Block, CaseVariant, CheckStatus, Direction, GenKind
from models.report import BoolResidual, Identity, ReportRow, SuiteReport
from models.rootdata import CaseSpec, parse_case, root_datum_from_name
from models.scalar import ONE, ZERO, qbinomial, qfactorial, qint, scalar_arith, vpow
from services import budget
from services.braid_action_service import BraidActionService, verify_epsilon
from services.chevalley_service import verify_classical, verify_q1_degeneration
from services.garside_service import soundness_cross_check, verify_sigma_embedding
from services.qsp_service import (
    get_algebra,
    get_context,
    verify_coideal,
    verify_commutator_identity,
    verify_generator_forms,
    verify_relations,
)

logger = logging.getLogger(__name__)

CORE_TYPES = ("A2", "B2", "G2")
EPSILON_TYPES = ("A1", "A2", "A1xA1", "B2", "B3", "C3", "G2")
CERTIFIED_TYPES = ("A1", "A2", "A3", "B2", "B3", "C3", "G2")
LONG_CERTIFIED_TYPES = ("D5", "A7")
CLASSICAL_CASES = ("I-B3", "I-C3", "II-A7", "II-A6", "II-D5", "III-A7")
GARSIDE_CASES = ("II-A6", "II-A7", "II-D5", "II-E6", "III-A7", "III-A5")
ALL_SUITES = ("core", *SCRIPT_SUITES, "I-B2", "classical", "garside")

# (suite, check) pairs, or whole suites under "*", that only run with --long
LONG_CHECKS = {("I-G2", "braid"), ("I-G2", "order"), ("II-E6", "*")}


class NeedsLong(Exception):
    """Check is gated behind --long."""


class SuiteError(ValueError):
    """Suite or check name with no definition."""


# shared per process


_LOADERS: dict[str, SystemLoader] = {}
_SERVICES: dict[tuple[str, int], BraidActionService] = {}
_SHARED_LOCK = threading.RLock()


def system_loader(cfg: SuiteConfig) -> SystemLoader | None:
    if not cfg.cache_dir:
        return None
    with _SHARED_LOCK:
        loader = _LOADERS.get(cfg.cache_dir)
        if loader is None:
            engine = make_engine(cache_url(cfg.cache_dir))
            create_tables(engine)
            loader = cached_system_loader(make_session_factory(engine), progress=cfg.progress)
            _LOADERS[cfg.cache_dir] = loader
    return loader


def _context(case_id: str, cfg: SuiteConfig):
    return get_context(case_id, degree_cap=cfg.degree_cap, system_loader=system_loader(cfg))


def _service(case_id: str, cfg: SuiteConfig) -> BraidActionService:
    key = (case_id, cfg.degree_cap)
    with _SHARED_LOCK:
        svc = _SERVICES.get(key)
        if svc is None:
            svc = BraidActionService(_context(case_id, cfg))
            _SERVICES[key] = svc
    return svc


def _gated(label: str) -> Identity:
    def compute():
        raise NeedsLong("requires --long")

    return Identity(label, compute)


# suite layout


def case_checks(case: CaseSpec) -> list[str]:
    """Checks of a symmetric-pair suite: relations, endomorphism, inverse, braid, then extras."""
    checks = ["relations", "endomorphism", "inverse", "braid", "coideal"]
    match case.variant:
        case CaseVariant.I:
            checks.append("epsilon")
            if case.root.rank == 2 and case.root.type_label in ("B", "C", "G"):
                checks.append("order")
        case CaseVariant.III:
            checks += ["generators", "odd_lusztig", "semidirect", "ambient"]
        case _:
            checks.append("cartan")
            if case.variant is CaseVariant.IIA and case.param % 2:
                checks.append("commutator")
            if case.variant is CaseVariant.IIE:
                checks.append("tabulated")
    return checks


def suite_checks(suite: str) -> list[str]:
    match suite:
        case "core":
            return ["scalar", "certificate", "hopf", "lusztig", "epsilon"]
        case "classical":
            return ["classical"]
        case "garside":
            return ["garside"]
    return case_checks(parse_case(suite))


def plan(cfg: SuiteConfig) -> list[tuple[str, str]]:
    """(suite, check) tasks in execution order, after the --checks filter."""
    suites = ALL_SUITES if cfg.suite == "all" else (cfg.suite,)
    wanted = set(cfg.checks) if cfg.checks else None
    return [
        (suite, check)
        for suite in suites
        for check in suite_checks(suite)
        if wanted is None or check in wanted
    ]


# identity builders


def _scalar_identities() -> list[Identity]:
    identities: list[Identity] = []
    for d in (1, 2, 3):
        for n in range(1, 9):
            identities.append(
                Identity(
                    f"scalar/factorial/n={n},d={d}",
                    lambda n=n, d=d: BoolResidual(qint(n, d) * qfactorial(n - 1, d) == qfactorial(n, d)),
                )
            )
    for a in range(7):
        for n in range(a + 1):
            identities.append(
                Identity(
                    f"scalar/binomial-symmetry/a={a},n={n}",
                    lambda a=a, n=n: BoolResidual(qbinomial(a, n) == qbinomial(a, a - n)),
                )
            )

    def canonical() -> BoolResidual:
        rng = random.Random(0)
        for _ in range(200):
            a = vpow(rng.randint(-6, 6)) * rng.randint(-5, 5) + qint(rng.randint(1, 4))
            b = vpow(rng.randint(-6, 6)) * rng.randint(1, 5) + ONE
            if scalar_arith(scalar_arith(a, b, "add"), b, "sub") != a:
                return BoolResidual(False, f"(a + b) - b != a for a = {a}, b = {b}")
            if scalar_arith(scalar_arith(a, b, "mul"), b, "div") != a:
                return BoolResidual(False, f"(a * b) / b != a for a = {a}, b = {b}")
            if scalar_arith(a, a, "sub") != ZERO:
                return BoolResidual(False, f"a - a != 0 for a = {a}")
        return BoolResidual(True)

    identities.append(Identity("scalar/canonical-form", canonical))
    return identities


def _hopf_identities(cfg: SuiteConfig) -> list[Identity]:
    identities: list[Identity] = []
    for name in CORE_TYPES:
        alg = get_algebra(root_datum_from_name(name), degree_cap=cfg.degree_cap, system_loader=system_loader(cfg))
        for i in alg.rd.nodes:
            for kind in (GenKind.E, GenKind.F, GenKind.KPLUS, GenKind.KMINUS):
                g = GenSymbol(kind, i)
                x = AlgebraElement.word([g], 1, alg.name)
                for axiom in ("counit_left", "counit_right", "antipode"):
                    identities.append(
                        Identity(
                            f"hopf/{name}/{axiom}/{g}",
                            lambda alg=alg, x=x, axiom=axiom: alg.hopf_axiom_residuals(x)[axiom],
                        )
                    )
    return identities


def _lusztig_identities(cfg: SuiteConfig) -> list[Identity]:
    identities: list[Identity] = []
    for name in CORE_TYPES:
        alg = get_algebra(root_datum_from_name(name), degree_cap=cfg.degree_cap, system_loader=system_loader(cfg))
        braid = cfg.long or name != "G2"
        identities += verify_T_properties(alg, braid=braid)
        if not braid:
            identities.append(_gated(f"braid/{name}"))
    return identities


def _certificate_identities(cfg: SuiteConfig) -> list[Identity]:
    identities: list[Identity] = []
    for name in CERTIFIED_TYPES + LONG_CERTIFIED_TYPES:
        if name in LONG_CERTIFIED_TYPES and not cfg.long:
            identities.append(_gated(f"certificate/{name}"))
            continue
        alg = get_algebra(root_datum_from_name(name), degree_cap=cfg.degree_cap, system_loader=system_loader(cfg))
        for block in (Block.E, Block.F):

            def compute(alg=alg, block=block) -> BoolResidual:
                system = alg.system(block)
                if not system.certified:
                    raise DegreeCapExceeded(system.skipped_overlap or (), system.degree_cap)
                return BoolResidual(system.verify_certificate(), f"{system!r} has an unresolved overlap")

            identities.append(Identity(f"certificate/{name}/{block}", compute))
    return identities


def _case_identities(case_id: str, check: str, cfg: SuiteConfig) -> list[Identity]:
    ctx = _context(case_id, cfg)
    match check:
        case "relations":
            return verify_relations(ctx)
        case "coideal":
            return verify_coideal(ctx)
        case "generators":
            return verify_generator_forms(ctx)
        case "commutator":
            return verify_commutator_identity(ctx)
        case "epsilon":
            return verify_epsilon(ctx)
    svc = _service(case_id, cfg)
    nodes = range(1, svc.sigma_rank + 1)
    match check:
        case "endomorphism":
            return [ident for i in nodes for d in Direction for ident in svc.verify_endomorphism(i, d)]
        case "inverse":
            return [ident for i in nodes for ident in svc.verify_inverse(i)]
        case "braid":
            return svc.verify_braid()
        case "cartan":
            return svc.verify_cartan()
        case "tabulated":
            return svc.verify_tabulated()
        case "order":
            return svc.verify_finite_order()
        case "odd_lusztig":
            return svc.verify_odd_lusztig()
        case "semidirect":
            return svc.verify_semidirect()
        case "ambient":
            return svc.verify_ambient()
    raise SuiteError(f"check {check!r} is not defined for {case_id}")


def identities_for(suite: str, check: str, cfg: SuiteConfig) -> list[Identity]:
    if check not in CHECKS:
        raise SuiteError(f"unknown check {check!r}")
    if (suite, check) in LONG_CHECKS or (suite, "*") in LONG_CHECKS:
        if not cfg.long:
            return [_gated(check)]
    match check:
        case "scalar":
            return _scalar_identities()
        case "hopf":
            return _hopf_identities(cfg)
        case "lusztig":
            return _lusztig_identities(cfg)
        case "certificate":
            return _certificate_identities(cfg)
        case "epsilon" if suite == "core":
            return [
                ident
                for name in EPSILON_TYPES
                for ident in verify_epsilon(_context(f"I-{name}", cfg))
            ]
        case "classical":
            identities = [ident for case_id in CLASSICAL_CASES for ident in verify_classical(case_id)]
            for m in (2, 4):
                identities += verify_q1_degeneration(m, degree_cap=cfg.degree_cap, system_loader=system_loader(cfg))
            return identities
        case "garside":
            identities = [ident for case_id in GARSIDE_CASES for ident in verify_sigma_embedding(parse_case(case_id))]
            return identities + soundness_cross_check(progress=cfg.progress)
    return _case_identities(suite, check, cfg)


# evaluation


def evaluate(suite: str, check: str, identity: Identity, cfg: SuiteConfig) -> ReportRow:
    limits = budget.Budget(time_budget=cfg.time_budget, mem_limit=cfg.mem_limit)
    started = time.perf_counter()
    detail: str | None = None
    try:
        with budget.active(limits):
            residual = identity.residual()
        if residual.is_zero():
            status = CheckStatus.PASS
        else:
            status = CheckStatus.FAIL
            detail = f"unequal: {str(residual)[:500]}"
    except (budget.BudgetExceeded, DegreeCapExceeded, NeedsLong) as e:
        status, detail = CheckStatus.SKIPPED, str(e)
    except Exception as e:
        logger.exception("%s/%s/%s raised", suite, check, identity.label)
        status, detail = CheckStatus.FAIL, f"{type(e).__name__}: {e}"
    return ReportRow(
        suite=suite,
        check=check,
        identity=identity.label,
        status=status,
        ms=int((time.perf_counter() - started) * 1000),
        max_terms=limits.max_terms,
        detail=detail,
    )


def run_check(suite: str, check: str, cfg: SuiteConfig) -> list[ReportRow]:
    """Build and evaluate one check; never raises."""
    try:
        identities = identities_for(suite, check, cfg)
    except Exception as e:
        logger.exception("could not build %s/%s", suite, check)
        return [
            ReportRow(
                suite=suite, check=check, identity="*", status=CheckStatus.FAIL, ms=0, max_terms=0,
                detail=f"{type(e).__name__}: {e}",
            )
        ]
    rows = [
        evaluate(suite, check, ident, cfg)
        for ident in tqdm(identities, desc=f"{suite} {check}", unit="identity", disable=not cfg.progress, leave=False)
    ]
    report = SuiteReport(suite=suite, rows=rows)
    counts = report.counts()
    logger.info(
        "%s %s: %d pass, %d fail, %d skipped",
        suite, check, counts[CheckStatus.PASS], counts[CheckStatus.FAIL], counts[CheckStatus.SKIPPED],
    )
    return rows


def _run_task(task: tuple[str, str, SuiteConfig]) -> list[ReportRow]:
    return run_check(*task)


def _results(tasks: list[tuple[str, str, SuiteConfig]], workers: int) -> Iterator[list[ReportRow]]:
    if workers <= 1 or len(tasks) <= 1:
        yield from map(_run_task, tasks)
        return
    with ProcessPoolExecutor(max_workers=workers) as pool:
        yield from pool.map(_run_task, tasks)


def run_suite(cfg: SuiteConfig, on_rows: Callable[[list[ReportRow]], None] | None = None) -> SuiteReport:
    tasks = [(suite, check, cfg) for suite, check in plan(cfg)]
    logger.info("suite %s: %d checks, %d worker(s)", cfg.suite, len(tasks), cfg.workers)
    rows: list[ReportRow] = []
    for chunk in _results(tasks, cfg.workers):
        rows.extend(chunk)
        if on_rows is not None:
            on_rows(chunk)
    return SuiteReport(suite=cfg.suite, rows=rows)


def exit_code(report: SuiteReport, *, allow_skip: bool = False) -> int:
    counts = report.counts()
    if counts[CheckStatus.FAIL]:
        return 1
    if counts[CheckStatus.SKIPPED] and not allow_skip:
        return 1
    return 0


def failing(rows: Iterable[ReportRow]) -> list[ReportRow]:
    return [row for row in rows if row.status is not CheckStatus.PASS]


class SuiteService(Protocol):
    def run(self, cfg: SuiteConfig) -> SuiteReport: ...


class LocalSuiteService(SuiteService):
    """Runs suites in the calling process (plus its worker pool)."""

    def run(self, cfg: SuiteConfig) -> SuiteReport:
        return run_suite(cfg)
