# TO RUN: PYTHONPATH=src poetry run python -m pytest tests/config_tests.py -q
import pytest

from config import ConfigError, SuiteConfig, load_config, parse_size, truthy

ENV_VARS = ("SUITE", "CHECKS", "DEGREE_CAP", "TIME_BUDGET", "JSON", "CACHE_DIR", "WORKERS", "LOG_LEVEL", "MEM_LIMIT", "LONG", "ALLOW_SKIP")


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    for var in ENV_VARS:
        monkeypatch.delenv(var, raising=False)


@pytest.mark.parametrize(
    "text,expected",
    [("8G", 8 * 1024**3), ("512M", 512 * 1024**2), ("1024", 1024), ("2 GB", 2 * 1024**3), ("1.5k", 1536), (64, 64)],
)
def test_parse_size(text, expected):
    assert parse_size(text) == expected


@pytest.mark.parametrize("text", ["", "lots", "8X", "-1G"])
def test_parse_size_rejects(text):
    with pytest.raises(ConfigError):
        parse_size(text)


def test_truthy():
    assert truthy("yes") and truthy(" TRUE ") and truthy("1")
    assert not truthy(None) and not truthy("0") and not truthy("")


def test_defaults():
    cfg = load_config()
    assert cfg.suite == "core"
    assert cfg.checks is None
    assert cfg.degree_cap == 16
    assert cfg.workers == 1
    assert not cfg.long


# verify env values are read and explicit overrides win
def test_env_and_overrides(monkeypatch):
    monkeypatch.setenv("SUITE", "I-B3")
    monkeypatch.setenv("CHECKS", "relations, braid")
    monkeypatch.setenv("MEM_LIMIT", "4G")
    monkeypatch.setenv("LONG", "yes")
    cfg = load_config(degree_cap=20, suite=None)
    assert cfg.suite == "I-B3"
    assert cfg.checks == ["relations", "braid"]
    assert cfg.mem_limit == 4 * 1024**3
    assert cfg.long
    assert cfg.degree_cap == 20

    assert load_config(suite="garside").suite == "garside"


@pytest.mark.parametrize(
    "overrides",
    [
        {"suite": "I-A9"},
        {"checks": "relations,bogus"},
        {"degree_cap": 0},
        {"time_budget": -5},
        {"workers": 0},
        {"log_level": "chatty"},
        {"mem_limit": "huge"},
    ],
)
def test_load_config_errors(overrides):
    with pytest.raises(ConfigError):
        load_config(**overrides)


def test_config_is_frozen():
    cfg = SuiteConfig()
    with pytest.raises(ValueError):
        cfg.suite = "I-B3"
