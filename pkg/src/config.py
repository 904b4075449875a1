import os
import re
from typing import Any, List, Optional

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, field_validator

from services.budget import DEFAULT_MEM_LIMIT, DEFAULT_TIME_BUDGET

load_dotenv()

DEFAULT_CACHE_DIR = ".qsp-cache"

SCRIPT_SUITES = ("I-B3", "I-C3", "I-G2", "II-A7", "II-A6", "II-D5", "III-A7")
SUITES = ("core", *SCRIPT_SUITES, "I-B2", "II-E6", "classical", "garside", "all")
CHECKS = (
    "relations",
    "endomorphism",
    "inverse",
    "braid",
    "coideal",
    "generators",
    "commutator",
    "cartan",
    "tabulated",
    "order",
    "epsilon",
    "odd_lusztig",
    "semidirect",
    "ambient",
    "scalar",
    "hopf",
    "lusztig",
    "certificate",
    "classical",
    "garside",
)

_SIZE = re.compile(r"^\s*(\d+(?:\.\d+)?)\s*([KMGT]?)B?\s*$", re.IGNORECASE)
_UNITS = {"": 1, "K": 1024, "M": 1024**2, "G": 1024**3, "T": 1024**4}
_TRUTHY = {"1", "true", "yes", "on"}


class ConfigError(ValueError):
    """Invalid suite configuration; the CLI exits with status 2."""


def parse_size(text: str | int) -> int:
    """'8G', '512M', '1024' -> bytes."""
    if isinstance(text, int):
        return text
    match = _SIZE.match(str(text))
    if not match:
        raise ConfigError(f"cannot parse memory size {text!r}")
    return int(float(match.group(1)) * _UNITS[match.group(2).upper()])


def truthy(text: Optional[str]) -> bool:
    return text is not None and text.strip().lower() in _TRUTHY


class SuiteConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    suite: str = "core"
    checks: Optional[List[str]] = None
    degree_cap: int = 16
    mem_limit: int = DEFAULT_MEM_LIMIT
    time_budget: float = DEFAULT_TIME_BUDGET
    long: bool = False
    json_path: Optional[str] = None
    cache_dir: Optional[str] = DEFAULT_CACHE_DIR
    workers: int = Field(default=1, ge=1)
    allow_skip: bool = False
    progress: bool = False
    log_level: str = "INFO"

    @field_validator("suite")
    @classmethod
    def _known_suite(cls, value: str) -> str:
        if value not in SUITES:
            raise ValueError(f"unknown suite {value!r}; expected one of {', '.join(SUITES)}")
        return value

    @field_validator("checks", mode="before")
    @classmethod
    def _split_checks(cls, value: Any) -> Any:
        if isinstance(value, str):
            value = [c.strip() for c in value.split(",") if c.strip()]
        return value or None

    @field_validator("checks")
    @classmethod
    def _known_checks(cls, value: Optional[List[str]]) -> Optional[List[str]]:
        for check in value or ():
            if check not in CHECKS:
                raise ValueError(f"unknown check {check!r}")
        return value

    @field_validator("degree_cap", "mem_limit")
    @classmethod
    def _positive(cls, value: int) -> int:
        if value <= 0:
            raise ValueError("must be positive")
        return value

    @field_validator("time_budget")
    @classmethod
    def _positive_seconds(cls, value: float) -> float:
        if value <= 0:
            raise ValueError("must be positive")
        return value

    @field_validator("log_level")
    @classmethod
    def _level(cls, value: str) -> str:
        value = value.upper()
        if value not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
            raise ValueError(f"unknown log level {value!r}")
        return value


def from_env() -> dict[str, Any]:
    """SuiteConfig fields set in the environment (or .env)."""
    values: dict[str, Any] = {}
    simple = {
        "SUITE": "suite",
        "CHECKS": "checks",
        "DEGREE_CAP": "degree_cap",
        "TIME_BUDGET": "time_budget",
        "JSON": "json_path",
        "CACHE_DIR": "cache_dir",
        "WORKERS": "workers",
        "LOG_LEVEL": "log_level",
    }
    for var, field in simple.items():
        value = os.getenv(var)
        if value:
            values[field] = value
    if os.getenv("MEM_LIMIT"):
        values["mem_limit"] = parse_size(os.getenv("MEM_LIMIT"))
    for var, field in (("LONG", "long"), ("ALLOW_SKIP", "allow_skip")):
        if os.getenv(var) is not None:
            values[field] = truthy(os.getenv(var))
    return values


def load_config(**overrides: Any) -> SuiteConfig:
    """Defaults, then environment, then explicit overrides (None means unset)."""
    values = from_env()
    values.update({k: v for k, v in overrides.items() if v is not None})
    if "mem_limit" in values:
        values["mem_limit"] = parse_size(values["mem_limit"])
    try:
        return SuiteConfig(**values)
    except ValueError as e:
        raise ConfigError(str(e)) from e
