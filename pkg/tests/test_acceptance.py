"""Acceptance gate: every verification criterion at full budget.

Each test runs one criterion at scale 1.0 with seed 0, prints its one-line
summary, and requires the status to be "pass" (an "inconclusive" produced
by a reduced budget also fails here, because the budget is not reduced).
"""

import pytest

from ocrskit.acceptance import CRITERIA


@pytest.mark.parametrize("criterion", CRITERIA,
                         ids=[c.__name__ for c in CRITERIA])
def test_criterion(criterion):
    result = criterion(scale=1.0, seed=0)
    print()
    print(result.line())
    assert result.status == "pass", result.detail
