import logging
from contextlib import asynccontextmanager

from fastapi import Depends, FastAPI, HTTPException

from algebra.parser import ParseError
from algebra.rewriting import DegreeCapExceeded
from algebra.words import AlgebraError
from api.schema import EvalRequest, EvalResponse, RunSuiteRequest, RunSuiteResponse
from api.validate import validate_eval_request, validate_run_suite_request
from config import ConfigError, SuiteConfig, load_config
from models.enums import CheckStatus
from services.eval_service import ExpressionService, MakeEvalService
from services.suite_service import LocalSuiteService, SuiteService, system_loader

logger = logging.getLogger(__name__)

settings: SuiteConfig | None = None


@asynccontextmanager
async def lifespan(app: FastAPI):
    global settings
    try:
        settings = load_config()
    except ConfigError as e:
        raise RuntimeError(f"invalid configuration: {e}") from e
    logger.info("cache dir %s, degree cap %d", settings.cache_dir, settings.degree_cap)
    yield


app = FastAPI(lifespan=lifespan)


def _settings() -> SuiteConfig:
    return settings if settings is not None else SuiteConfig()


@app.get("/health")
def health_check():
    """Health check endpoint for monitoring and testing."""
    return {"status": "healthy", "service": "qsp-braid"}


def get_eval_service() -> ExpressionService:
    cfg = _settings()
    return MakeEvalService(degree_cap=cfg.degree_cap, system_loader=system_loader(cfg))


def get_suite_service() -> SuiteService:
    return LocalSuiteService()


@app.post("/eval", response_model=EvalResponse)
def evaluate(payload: EvalRequest, svc: ExpressionService = Depends(get_eval_service)):
    """
    Parse, normalise and render an expression.

    Request body:
    - case (str): active case, e.g. "I-B3"; B symbols expand per this case.
    - expression (str): expression or command, e.g. "nf(E1*F1)" or "tau(1,-,B2)".
    """
    validate_eval_request(payload)
    try:
        out = svc.evaluate(payload.case, payload.expression)
    except ParseError as e:
        raise HTTPException(status_code=400, detail={"message": e.message, "position": e.position})
    except DegreeCapExceeded as e:
        raise HTTPException(status_code=422, detail=str(e))
    except AlgebraError as e:
        raise HTTPException(status_code=400, detail=str(e))
    except Exception:
        logger.exception("eval failed")
        raise HTTPException(status_code=500, detail="internal error")
    return EvalResponse(case=payload.case, rendered=out.rendered, is_zero=out.is_zero)


@app.post("/suites/run", response_model=RunSuiteResponse)
def run_suite(payload: RunSuiteRequest, svc: SuiteService = Depends(get_suite_service)):
    """
    Run a verification suite synchronously and return its report rows.

    Request body:
    - suite (str): suite id such as "I-B3", "core" or "garside".
    - checks (list[str], optional): restrict to these checks.
    - long (bool): include checks gated behind --long.
    - degree_cap (int, optional): completion degree cap.
    """
    validate_run_suite_request(payload)
    base = _settings()
    cfg = base.model_copy(
        update={
            "suite": payload.suite,
            "checks": payload.checks,
            "long": payload.long,
            "degree_cap": payload.degree_cap or base.degree_cap,
            "workers": 1,
            "progress": False,
        }
    )
    try:
        report = svc.run(cfg)
    except Exception:
        logger.exception("suite %s failed", payload.suite)
        raise HTTPException(status_code=500, detail="internal error")
    counts = report.counts()
    return RunSuiteResponse(
        suite=report.suite,
        passed=counts[CheckStatus.PASS],
        failed=counts[CheckStatus.FAIL],
        skipped=counts[CheckStatus.SKIPPED],
        rows=report.rows,
    )
