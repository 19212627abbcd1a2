"""Acceptance criteria 1-8; one PASS/FAIL line per criterion is printed in the terminal summary."""

import pytest

from idemcore.suite import CRITERIA, run_criterion

RESULTS = {}


@pytest.mark.slow
@pytest.mark.parametrize("k", sorted(CRITERIA))
def test_criterion(k):
    title, checks, secs = run_criterion(k)
    failed = [c.canonical() for c in checks if not c.ok]
    RESULTS[k] = (title, not failed and bool(checks), len(checks), secs)
    print(f"criterion {k} ({title}): {'PASS' if RESULTS[k][1] else 'FAIL'} [{len(checks)} checks, {secs:.1f}s]")
    assert checks
    assert not failed, failed[:3]
