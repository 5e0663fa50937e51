import os
from pathlib import Path

import hypothesis
import numpy as np
import pytest

from opbmo.dyadic import TreeConfig
from opbmo.symbol import HaarSymbol

hypothesis.settings.register_profile("default", max_examples=40, deadline=None)
hypothesis.settings.register_profile("fast", max_examples=8, deadline=None)
hypothesis.settings.register_profile("thorough", max_examples=300, deadline=None)
hypothesis.settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

ROOT = Path(__file__).resolve().parent.parent
DATA = ROOT / "data"
GOLDEN = Path(__file__).resolve().parent / "golden"

# a non-normal, non-Hermitian matrix with ||A|| = 2
A_MAT = np.array([[0, 2j], [1, 0]])


def root_times(A, depth=2):
    """h_T * A as a Haar symbol."""
    A = np.asarray(A, dtype=complex)
    cfg = TreeConfig(depth, A.shape[0])
    coeffs = np.zeros((cfg.n_intervals,) + A.shape, dtype=complex)
    coeffs[0] = A
    return HaarSymbol(cfg, np.zeros_like(A), coeffs)


def symbol_with(cfg, entries, mean=None):
    """Haar symbol with the given {DyadicIndex: matrix} coefficients."""
    n = cfg.dim
    coeffs = np.zeros((cfg.n_intervals, n, n), dtype=complex)
    for I, M in entries.items():
        coeffs[I.bfs] = M
    return HaarSymbol(cfg, np.zeros((n, n)) if mean is None else mean, coeffs)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("tests.test_acceptance")
    if mod is None or not mod.LINES:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(mod.LINES):
        terminalreporter.write_line(mod.LINES[num])
