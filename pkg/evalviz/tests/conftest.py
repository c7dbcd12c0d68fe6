import os
import subprocess
import sys

import pytest

ACCEPTANCE_LINES: list[str] = []


def record_acceptance(line: str) -> None:
    ACCEPTANCE_LINES.append(line)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def compile_via_cli(out_dir: str, tuple_str: str, rounds: int, improvement: float) -> str:
    """Drive the compiler through its public CLI (the external interface)
    and return the path of the emitted stim document."""
    subprocess.run(
        [
            sys.executable, "-m", "qccdc.cli", "compile", tuple_str,
            "--rounds", str(rounds), "--improvement", str(improvement),
            "--out", out_dir,
        ],
        check=True,
        capture_output=True,
    )
    stim_files = [f for f in os.listdir(out_dir) if f.endswith(".stim")]
    assert len(stim_files) == 1
    return os.path.join(out_dir, stim_files[0])


@pytest.fixture(scope="session")
def artifact_dir(tmp_path_factory):
    return tmp_path_factory.mktemp("compiled")
