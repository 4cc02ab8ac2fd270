import numpy as np
import pytest

from qre.hamlib import hubbard
from qre.pauli import PauliSum, random_word


def random_hamiltonian(rng, n, n_terms, scale=1.0):
    coeffs = {}
    for _ in range(n_terms):
        w = random_word(n, rng)
        if w.is_identity:
            continue
        coeffs[str(w)] = float(rng.uniform(-scale, scale))
    return PauliSum.from_dict(n, coeffs)


def corpus():
    """Small Hamiltonians (n <= 6) shared across module tests."""
    rng = np.random.default_rng(11)
    items = [
        ("hubbard_1x1_mu", hubbard(1, 1, mu=0.7)),
        ("hubbard_1x2", hubbard(1, 2)),
        ("hubbard_1x3", hubbard(1, 3)),
        ("hubbard_2x2", hubbard(2, 2)),
        ("hubbard_2x2_mu", hubbard(2, 2, t=0.5, U=2.0, mu=1.0)),
        ("hubbard_2x3", hubbard(2, 3)),
        ("hubbard_1x5", hubbard(1, 5, U=1.0)),
    ]
    for k, n in enumerate((2, 3, 4, 5, 6)):
        items.append((f"random_{n}q", random_hamiltonian(rng, n, 3 * n)))
    return items


CORPUS = corpus()


@pytest.fixture(params=CORPUS, ids=[name for name, _ in CORPUS])
def corpus_h(request):
    return request.param[1]


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
