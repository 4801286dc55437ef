from pathlib import Path

import pytest

from docamr.document import load_document

FIXTURES = Path(__file__).parent / "fixtures"
FIGURES = ["fig1", "fig3", "fig4", "fig5a", "fig5b", "fig5c"]

# lines printed by the acceptance suite, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def load_fig(name: str):
    return load_document(FIXTURES / f"{name}.amr", FIXTURES / f"{name}.json")


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
