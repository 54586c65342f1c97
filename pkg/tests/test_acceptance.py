"""Acceptance criteria 1-13, each at its stated tolerance.

Every criterion prints one PASS/FAIL line (shown even without ``-s``) and
the test fails when the criterion does.  The same checks back
``fractel selftest --suite all``.
"""

import pytest

from fractel.selftest import CHECKS, format_record, run_check


@pytest.mark.parametrize("criterion", sorted(CHECKS))
def test_criterion(criterion, capsys):
    rec = run_check(CHECKS[criterion])
    with capsys.disabled():
        print("\n" + format_record(rec))
    assert rec["criterion"] == criterion
    assert rec["passed"], rec["detail"]
