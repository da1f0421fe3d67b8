import pytest

from support import FIG1_INPUTS, FIG1_SOURCE, analyze, profile


@pytest.fixture
def fig1_analysis():
    return analyze(FIG1_SOURCE)


@pytest.fixture
def fig1_result():
    return profile(FIG1_SOURCE, FIG1_INPUTS)
