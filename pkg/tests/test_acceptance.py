import pytest

from stmodent.acceptance import CRITERIA, AcceptConfig

from conftest import ACCEPTANCE_LINES


@pytest.mark.parametrize("cid", sorted(CRITERIA))
def test_criterion(cid):
    res = CRITERIA[cid](AcceptConfig())
    ACCEPTANCE_LINES.append(res.line())
    print(res.line())
    assert res.passed, res.details[:5]
