import pytest

from qpca import acceptance

from conftest import ACCEPTANCE_LINES


@pytest.mark.parametrize("entry", acceptance.CRITERIA, ids=lambda e: f"criterion_{e[0]}")
def test_criterion(entry):
    result = acceptance.run_one(entry, acceptance.DEFAULT_SEED)
    line = result.line()
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert result.passed, result.detail
