"""Acceptance criteria 1-10, one test each.

Each test prints the criterion's one-line verdict, which is also collected
into an "acceptance criteria" section at the end of the pytest run.
"""
import pytest

from substrate.acceptance import CRITERIA, Context, run_criterion


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number, record_line):
    res = run_criterion(number, Context(seed=0))
    print(res.line())
    record_line(res.line())
    assert res.error is None, res.error
    assert res.passed, res.line()
    assert res.in_time, res.line()


@pytest.mark.parametrize("fault, hit", [("wrong_index", {1, 2, 4, 7}), ("wrong_radius", {3}), ("wrong_area", {8})])
def test_injected_fault_is_caught(fault, hit):
    for n in sorted(hit):
        res = run_criterion(n, Context(seed=0, faults=(fault,)))
        print(res.line())
        assert not res.passed
