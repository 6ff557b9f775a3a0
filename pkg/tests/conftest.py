import pytest

from radembed.condenser import CondenserConfig, condense_corpus
from radembed.syncorpus import GenerationConfig, generate_corpus


@pytest.fixture(scope="session")
def condenser_config():
    return CondenserConfig.default()


@pytest.fixture(scope="session")
def small_corpus():
    """Default-size synthetic corpus (2000 reports, seed 7) and its ground truth."""
    return generate_corpus(config=GenerationConfig(n_reports=2000, seed=7))


@pytest.fixture(scope="session")
def small_condensed(small_corpus, condenser_config):
    reports, _ = small_corpus
    return condense_corpus(reports, condenser_config)


def pytest_terminal_summary(terminalreporter):
    """One PASS/FAIL line per acceptance criterion."""
    lines = []
    for outcome in ("passed", "failed"):
        for rep in terminalreporter.stats.get(outcome, []):
            props = dict(getattr(rep, "user_properties", ()))
            if rep.when != "call" or "criterion" not in props:
                continue
            lines.append((int(props["criterion"].split(".")[0]), outcome, props))
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for _, outcome, props in sorted(lines, key=lambda t: t[0]):
        status = "PASS" if outcome == "passed" else "FAIL"
        extra = f" [{props['detail']}]" if "detail" in props else ""
        terminalreporter.write_line(f"{status} criterion {props['criterion']}{extra}")
