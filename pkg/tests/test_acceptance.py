"""Runs every acceptance criterion at its stated tolerance and runtime bound,
printing one pass/fail line per criterion."""

import pytest

from rmcodes.acceptance import CRITERIA, run_criterion, select
from rmcodes.report import PASS


@pytest.mark.parametrize("criterion", CRITERIA, ids=lambda c: f"criterion-{c.number}")
def test_criterion(criterion, capsys):
    check, elapsed = run_criterion(criterion, seed=0, enforce_bounds=True)
    with capsys.disabled():
        bound = f" (bound {criterion.bound_s:g}s)" if criterion.bound_s else ""
        print(f"\n{check.status.upper()}  {check.name} [{elapsed:.2f}s{bound}]: {check.details}")
    assert check.status == PASS, check.details
    if criterion.bound_s is not None:
        assert elapsed < criterion.bound_s


def test_filter_by_tag():
    assert [c.number for c in select("bernstein")] == [3]
    assert [c.number for c in select("4")] == [4]
    assert select("no-such-tag") == []
    assert len(select(None)) == 10
