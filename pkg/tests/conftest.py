from __future__ import annotations

import numpy as np
import pytest

from ptwist.exactlin import GF32003, QQ

# filled by tests/test_acceptance.py: criterion number -> (passed, detail)
ACCEPTANCE_RESULTS: dict[int, tuple[bool, str]] = {}


@pytest.fixture(params=[QQ, GF32003], ids=["q", "fp32003"])
def field(request):
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_RESULTS):
        ok, detail = ACCEPTANCE_RESULTS[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
