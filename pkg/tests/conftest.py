import numpy as np
import pytest

from ncent.symplectic_core import as_variance, random_symplectic


def williamson_sample(nus, rng, scale=0.4):
    """S diag(nu/2) S^T in the interleaved basis, with a random symplectic S."""
    n = len(nus)
    S = random_symplectic(n, rng, scale)
    d = np.repeat(np.asarray(nus, dtype=float) / 2.0, 2)
    return as_variance(S @ np.diag(d) @ S.T)


@pytest.fixture
def rng():
    return np.random.default_rng(20261017)


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
