import pytest

from trialsieve import demo, metrics

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
from trialsieve.corpus import Store, ingest
from trialsieve.ruleset import compile_rules_dir


@pytest.fixture(scope="session")
def demo_dir(tmp_path_factory):
    d = tmp_path_factory.mktemp("demo")
    demo.init_demo(d)
    return d


@pytest.fixture(scope="session")
def demo_ruleset(demo_dir):
    return compile_rules_dir(demo_dir / "rules")


@pytest.fixture(scope="session")
def demo_store(demo_dir):
    store = Store(":memory:")
    summary = ingest(demo_dir / "corpus", store)
    assert summary.warnings == []
    return store


@pytest.fixture(scope="session")
def demo_gold(demo_dir, demo_ruleset):
    return metrics.read_labels_dir(demo_dir / "gold", demo_ruleset.criteria)
