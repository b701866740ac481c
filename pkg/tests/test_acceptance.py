"""Acceptance gate: every criterion at its stated tolerance.

Each test prints one pass/fail line (run pytest with -s to stream them);
the same checks back the `wpkernel validate` subcommand.
"""

import pytest

from wpkernel.acceptance import ALL_CRITERIA


@pytest.mark.parametrize("cid", sorted(ALL_CRITERIA))
def test_criterion(cid):
    result = ALL_CRITERIA[cid]()
    print(f"{result.line()}  ({result.elapsed:.1f}s)  {result.details}")
    assert result.passed, f"criterion {cid} failed: {result.details}"
