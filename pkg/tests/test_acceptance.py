"""The seven acceptance criteria at their stated tolerances (seed 0).

Each test prints one ``criterion N [PASS|FAIL] ...`` line to the terminal.
"""

import pytest

from ncgeo.verify import CRITERIA

SEED = 0


@pytest.mark.parametrize("number", sorted(CRITERIA), ids=lambda n: f"criterion_{n}")
def test_criterion(number, capsys):
    result = CRITERIA[number](SEED)
    with capsys.disabled():
        print("\n" + result.line())
    assert result.passed, result.detail
