import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from nbinv import MatrixAlgebra, ScalarMatrixAlgebra

settings.register_profile("nbinv", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("nbinv")


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


def random_scalar_matrix(rng, n, k=2, shift=0.0):
    alg = ScalarMatrixAlgebra(k)
    t = MatrixAlgebra(alg, n).random(rng)
    return t + t.algebra.unit() * shift if shift else t


def dense_inverse(t):
    return np.linalg.inv(t.flatten())


_criteria: dict[str, str] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py::test_c" in report.nodeid and (report.when == "call" or report.failed):
        name = report.nodeid.split("::")[-1]
        if report.failed or name not in _criteria:
            _criteria[name] = "FAIL" if report.failed else "PASS"


def pytest_terminal_summary(terminalreporter):
    if _criteria:
        terminalreporter.section("acceptance criteria")
        for name in sorted(_criteria):
            terminalreporter.write_line(f"{_criteria[name]}  criterion {int(name[6:8])}: {name[9:].replace('_', ' ')}")
