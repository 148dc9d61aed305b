import pytest

from weightseq import TruncationConfig, counterexample_beta3, gevrey, q_gevrey

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def cfg():
    return TruncationConfig()


@pytest.fixture(scope="session")
def g1():
    return gevrey(1, 512)


@pytest.fixture(scope="session")
def g2():
    return gevrey(2, 512)


@pytest.fixture(scope="session")
def g3():
    return gevrey(3, 512)


@pytest.fixture(scope="session")
def qg2():
    return q_gevrey(2, 512)


@pytest.fixture(scope="session")
def cex():
    return counterexample_beta3(5)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
