"""Acceptance criteria, one test each, at their stated tolerances.

Every test prints its pass/fail line with the sub-checks below it; the
lines are also collected into the "acceptance criteria" section of the
terminal summary.  Run them alone with ``pytest tests/test_acceptance.py -s``.
"""

import pytest
from conftest import ACCEPTANCE_LINES

from gaborlike.verification import CRITERIA, format_table, run_criteria

SLOW = {"closed-forms", "frame", "chain3d", "figures", "norm", "parseval"}


@pytest.mark.parametrize(
    "key", [pytest.param(k, marks=pytest.mark.slow) if k in SLOW else k for k in CRITERIA]
)
def test_criterion(key):
    (result,) = run_criteria([key])
    print()
    print(format_table([result]))
    ACCEPTANCE_LINES.append(result.line())
    failed = [s.line().strip() for s in result.subs if not s.passed]
    assert result.passed, "; ".join(failed) or result.note or "over time limit"
