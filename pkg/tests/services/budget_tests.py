# TO RUN: PYTHONPATH=src poetry run python -m pytest tests/services/budget_tests.py -q
import pickle

import pytest
from unittest.mock import patch

from services import budget
from services.budget import Budget, BudgetExceeded


def test_checkpoint_without_budget_is_noop():
    assert budget.current() is None
    budget.checkpoint(10**9)


def test_tracks_max_terms():
    b = Budget(term_limit=100)
    with budget.active(b):
        budget.checkpoint(5)
        budget.checkpoint(42)
        budget.checkpoint(7)
        assert budget.current() is b
    assert b.max_terms == 42
    assert budget.current() is None


def test_term_limit():
    b = Budget(term_limit=10)
    with pytest.raises(BudgetExceeded) as err:
        with budget.active(b):
            budget.checkpoint(11)
    assert err.value.reason == "terms"
    assert budget.current() is None


# verify time is only sampled every check_every ticks
def test_time_budget_sampled():
    b = Budget(time_budget=-1.0, check_every=4)
    with budget.active(b):
        for _ in range(3):
            budget.checkpoint(1)
        with pytest.raises(BudgetExceeded) as err:
            budget.checkpoint(1)
    assert err.value.reason == "time"


def test_memory_limit():
    b = Budget(mem_limit=1, check_every=1)
    with patch("services.budget.max_rss_bytes", return_value=10):
        with pytest.raises(BudgetExceeded) as err:
            b.check(0)
    assert err.value.reason == "memory"
    assert "memory budget exceeded" in str(err.value)


def test_active_restarts():
    b = Budget(term_limit=100)
    b.check(50)
    with budget.active(b):
        assert b.max_terms == 0


def test_budget_exceeded_pickles():
    clone = pickle.loads(pickle.dumps(BudgetExceeded("terms", 12, 10)))
    assert (clone.reason, clone.value, clone.limit) == ("terms", 12, 10)
    assert str(clone) == "terms budget exceeded: 12 > 10"
