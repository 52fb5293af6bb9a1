import pytest

from stylometrics.pipeline import RunConfig, run_all
from stylometrics.synthetic import write_fixture_corpus

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def fixture_corpus(tmp_path_factory):
    return write_fixture_corpus(tmp_path_factory.mktemp("fixture"), seed=1)


@pytest.fixture(scope="session")
def pipeline_runs(fixture_corpus, tmp_path_factory):
    """Two complete pipeline runs on the fixture corpus with identical configuration."""
    outs = []
    for name in ("run1", "run2"):
        out = tmp_path_factory.mktemp(name)
        run_all(RunConfig.from_file(fixture_corpus.config, out=str(out)))
        outs.append(out)
    return outs


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
