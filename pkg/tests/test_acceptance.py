"""Acceptance suite: every shipped criterion at its stated tolerance.

Each test prints its one-line verdict (visible with ``pytest -s`` or via
``purigeo selftest``) and then asserts it.
"""

import pytest

from purigeo import acceptance


@pytest.mark.parametrize(
    "index,name,check",
    acceptance.CRITERIA,
    ids=[f"criterion_{idx:02d}" for idx, _, _ in acceptance.CRITERIA],
)
def test_criterion(index, name, check):
    passed, detail = check()
    result = acceptance.CriterionResult(index=index, name=name, passed=bool(passed), detail=str(detail))
    print(result.line())
    assert result.passed, result.line()


def test_runner_collects_everything():
    results = acceptance.run([1, 3])
    assert [r.index for r in results] == [1, 3]
    assert all(r.passed for r in results)
