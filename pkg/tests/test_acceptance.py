"""Acceptance criteria A1-A13, one test each, at their stated tolerances.

Each test prints one PASS/FAIL line; conftest repeats the lines in the
terminal summary so they show up without ``-s``.
"""
import pytest

from unbounded_dsp import acceptance

RESULTS: dict = {}


@pytest.mark.parametrize("cid", list(acceptance.CRITERIA))
def test_criterion(cid):
    res = acceptance.run(cid)
    print(res.line())
    RESULTS[cid] = res.line()
    assert res.passed, res.line()
