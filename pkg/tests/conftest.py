import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from daestruct import build_signature, parse_model, read_sigma_file  # noqa: E402
from daestruct.data import read_text  # noqa: E402


@pytest.fixture(scope="session")
def crane():
    return read_sigma_file(read_text("crane.sig"))


@pytest.fixture(scope="session")
def crane_from_dae():
    return build_signature(parse_model(read_text("crane.dae")))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULT_LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
