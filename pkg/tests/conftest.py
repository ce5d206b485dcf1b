import numpy as np
import pytest
from hypothesis import settings, strategies as st

from highspin2dcs.pauli import PauliOperatorSum, PauliString, PauliTerm

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


def pauli_strings(n_qubits: int):
    return st.text(alphabet="IXYZ", min_size=n_qubits, max_size=n_qubits).map(PauliString)


def coefficients():
    part = st.floats(-2.0, 2.0, allow_nan=False, allow_infinity=False)
    return st.builds(complex, part, part)


def operator_sums(n_qubits: int, max_terms: int = 6):
    term = st.builds(lambda c, s: PauliTerm(c, s), coefficients(), pauli_strings(n_qubits))
    return st.lists(term, max_size=max_terms).map(lambda ts: PauliOperatorSum(n_qubits, tuple(ts)))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("tests.test_acceptance")
    lines = getattr(mod, "VERDICTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda l: int(l.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
