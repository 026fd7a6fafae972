import numpy as np
import pytest

_ACCEPTANCE = {}


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _ACCEPTANCE[report.nodeid] = (report.outcome, dict(report.user_properties))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for nodeid, (outcome, props) in _ACCEPTANCE.items():
        status = "PASS" if outcome == "passed" else "FAIL"
        name = props.get("criterion", nodeid.split("::")[-1])
        detail = props.get("detail", "")
        tr.write_line(f"{status}  {name}  {detail}".rstrip())
