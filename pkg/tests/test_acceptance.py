"""Acceptance gate: every criterion at its stated tolerance.

Each test prints the criterion's pass/fail line (visible with ``pytest -s``
or on failure) and asserts it passed.  Scenario runs are cached inside
:mod:`gvfleet.acceptance`, so the two bundled scenarios and the
safety-enabled rerun are simulated once for the whole module.
"""

import pytest

from gvfleet import acceptance


def _check(criterion):
    result = criterion()
    print(result.line())
    assert result.passed, result.line()


def test_criterion_1_circular_scenario():
    _check(acceptance.criterion_circular_convergence)


def test_criterion_2_lissajous_scenario():
    _check(acceptance.criterion_lissajous_convergence)


def test_criterion_3_field_nonvanishing():
    _check(acceptance.criterion_field_nonvanishing)


def test_criterion_4_tracking_decay():
    _check(acceptance.criterion_tracking_decay)


def test_criterion_5_boundedness():
    _check(acceptance.criterion_boundedness)


def test_criterion_6_lyapunov_monotone():
    _check(acceptance.criterion_lyapunov_monotone)


def test_criterion_7_consensus_flow():
    _check(acceptance.criterion_consensus_flow)


def test_criterion_8_qp_filter():
    _check(acceptance.criterion_qp_filter)


def test_criterion_9_determinism():
    _check(acceptance.criterion_determinism)


def test_run_all_reports_every_criterion():
    results = acceptance.run_all()
    assert len(results) == len(acceptance.ALL_CRITERIA)
    assert all(r.passed for r in results), "\n".join(r.line() for r in results)
