from fractions import Fraction as Fr

import pytest

from cantor_avoid.arrangement import ParamRect
from cantor_avoid.cantor import TERNARY
from cantor_avoid.construction import ConstructionParams, PhiSchedule, run

# Narrow box on which the full certified construction runs in well under a second.
DEMO_RECT = ParamRect(Fr(0), Fr(1, 128), Fr(1, 2), Fr(65, 128))
DEMO_SEED = 2


def demo_params(depth=3, seed=DEMO_SEED):
    return ConstructionParams(rect=DEMO_RECT, phi=PhiSchedule(mul=1, add=1), depth=depth, seed=seed)


@pytest.fixture(scope="session")
def demo_trace():
    return run(TERNARY, demo_params())


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        ok, detail = results[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
