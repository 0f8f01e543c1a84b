import itertools

import pytest

from lyndonlab.words import LetterDistribution


def all_words(q, n):
    return itertools.product(range(1, q + 1), repeat=n)


@pytest.fixture
def binary():
    return LetterDistribution.uniform(2)


@pytest.fixture
def ternary():
    return LetterDistribution.uniform(3)


@pytest.fixture
def skewed():
    return LetterDistribution([0.5, 0.3, 0.2])


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
