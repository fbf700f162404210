"""The full acceptance gate: every advertised check at full scale.

Each criterion prints its one-line verdict as it completes (visible even
under pytest capture) and the test asserts the verdict.  Sample counts here
are the full published ones — the CLI selftest runs the same list reduced.
"""

import pytest

from cdfun import criteria

_BY_NUMBER = {i: fn for i, fn in enumerate(criteria.CHECKS, start=1)}


@pytest.mark.parametrize("number", sorted(_BY_NUMBER))
def test_criterion(number, capsys):
    res = _BY_NUMBER[number](1.0, 42)
    assert res.number == number
    with capsys.disabled():
        print(f"\n{res.line()}", flush=True)
    assert res.passed, f"criterion {number} ({res.name}): {res.detail}"
