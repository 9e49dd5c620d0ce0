"""Acceptance criteria at their stated tolerances; one PASS/FAIL line each."""

import pytest

from conftest import ACCEPTANCE_LINES
from qklab import acceptance

SEED = 0


@pytest.mark.parametrize("number", sorted(acceptance.CRITERIA))
def test_criterion(number):
    result = acceptance.CRITERIA[number](seed=SEED)
    ACCEPTANCE_LINES[number] = result.line()
    print(result.line())
    assert result.passed, result.line()


def test_thread_count_does_not_change_results(monkeypatch):
    one = acceptance.criterion_9(seed=3, count=8)
    monkeypatch.setenv("QKLAB_THREADS", "4")
    four = acceptance.criterion_9(seed=3, count=8)
    assert one.detail == four.detail
