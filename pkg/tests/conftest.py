import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from asgard.problems import build_l1_svm, build_sqrt_lasso, make_classification, reference_solution

settings.register_profile(
    "repo", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("repo")

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def sqrt_lasso_ref():
    """Seeded sqrt-LASSO desk instance with a 10^6-iteration reference value."""
    return reference_solution(build_sqrt_lasso(), "long_run", budget=10**6)


@pytest.fixture(scope="session")
def svm_problem():
    return build_l1_svm(make_classification(50, 20, seed=1), lam=0.1)


@pytest.fixture(scope="session")
def svm_lp_ref(svm_problem):
    return reference_solution(svm_problem, "lp_exact")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
