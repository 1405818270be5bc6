"""Acceptance battery: one printed PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py -s`` to see the lines and the
details of each check.
"""

import pytest

from sobolev_markov.acceptance import run_criterion


@pytest.mark.parametrize("key", range(1, 11))
def test_criterion(key):
    result = run_criterion(key)
    print()
    print(result.line())
    for line in result.details:
        print(f"    {line}")
    assert result.passed, "\n".join(result.details)
