"""Acceptance gate: every criterion at its stated tolerance and budget.

One ``[PASS]``/``[FAIL]`` line is printed per criterion.  Criteria 4 and 5 are
known to fail on this build; see the README for the measured numbers.
"""

import pytest

from curvtrack.acceptance import CRITERIA, run_criterion

THREADS = 4


@pytest.mark.slow
@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number, capsys):
    result = run_criterion(number, threads=THREADS)
    with capsys.disabled():
        print("\n" + result.line())
    assert result.passed, result.detail
