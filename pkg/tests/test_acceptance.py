"""Acceptance suite: every criterion at its stated tolerance, one pass/fail
line each (see greenlinker.acceptance for the pinned tolerances)."""

import warnings

import pytest

from greenlinker import acceptance

_RESULTS = None


def _results():
    global _RESULTS
    if _RESULTS is None:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            _RESULTS = {r.name: r for r in acceptance.run_all(verbose=False)}
    return _RESULTS


@pytest.mark.parametrize("name", [name for name, _ in acceptance.CRITERIA])
def test_criterion(name):
    r = _results()[name]
    status = "PASS" if r.passed else "FAIL"
    print(f"[{status}] criterion {r.name}: {r.detail} ({r.seconds:.1f}s)")
    assert r.passed, f"criterion {r.name}: {r.detail}"
