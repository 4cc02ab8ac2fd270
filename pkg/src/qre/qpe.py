"""Perturbative Trotter-error estimates and resource arithmetic for single-ancilla QPE.

The leading energy shift of a Trotterized evolution is ``<phi0|V2|phi0> t^2``
where ``V2`` is a weighted triple sum of nested commutators over the term
list ``H_1..H_M, H_M..H_1``. That list is exactly the symmetric (second
order) splitting ``prod_k e^{-i H_k t/2} prod_k' e^{-i H_k' t/2}``, which is
what ``symmetric_step_unitary`` builds for the phase-fit check.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from .circuit import GateCount, controlled_trotter_cost
from .hamlib import spectral_norm
from .pauli import PauliSum, PauliTerm, PauliWord, commutes, multiply
from .sim import pauli_expectation

MAX_TERMS = 30


@dataclass(frozen=True)
class QpeBoundReport:
    M: int
    h_max: float
    e1_bound: float
    e1_exact: float | None
    t: float
    dt: float
    n_T: int
    n_C: int
    n_Q: int
    n_2Q: int | None
    epsilon: float
    norm: float
    norm_exact: bool

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "QpeBoundReport":
        return cls(**json.loads(text))


def _nested(c: PauliTerm, b: PauliTerm, a: PauliTerm) -> tuple[complex, PauliWord] | None:
    """``[c, [b, a]]`` for single Pauli terms, or ``None`` when it vanishes."""
    if commutes(b.word, a.word):
        return None
    ph1, inner = multiply(b.word, a.word)
    if commutes(c.word, inner):
        return None
    ph2, outer = multiply(c.word, inner)
    return 4 * ph1 * ph2 * a.coefficient * b.coefficient * c.coefficient, outer


def _v2_from_list(ops: list[PauliTerm], ground) -> float:
    L = len(ops)
    total = 0.0 + 0.0j
    cache: dict[PauliWord, float] = {}
    for mu in range(L - 1):
        for nu in range(mu + 1, L):
            if commutes(ops[nu].word, ops[mu].word):
                continue
            for nup in range(nu, L):
                res = _nested(ops[nup], ops[nu], ops[mu])
                if res is None:
                    continue
                coef, word = res
                if word not in cache:
                    cache[word] = pauli_expectation(ground, word)
                weight = 0.5 if nup == nu else 1.0
                total += weight * coef * cache[word]
    return float((-total / 24).real)


def _check_terms(h: PauliSum) -> list[PauliTerm]:
    terms = list(h.terms)
    if len(terms) > MAX_TERMS:
        raise ValueError(f"{len(terms)} terms exceeds the exact-evaluation cap of {MAX_TERMS}")
    return terms


def v2_exact(h: PauliSum, ground) -> float:
    """``<ground|V2|ground>`` over the doubled list ``H_1..H_M, H_M..H_1``."""
    terms = _check_terms(h)
    return _v2_from_list(terms + terms[::-1], ground)


def v2_exact_first_order(h: PauliSum, ground) -> float:
    """Same triple sum restricted to the single list ``H_1..H_M``."""
    return _v2_from_list(_check_terms(h), ground)


def v2_bound(h: PauliSum) -> float:
    """``h_max^3 M^3 / 24`` with ``M`` the non-identity term count."""
    M = len(h.terms)
    if M == 0:
        return 0.0
    h_max = float(np.max(np.abs(h.coefficients)))
    return h_max**3 * M**3 / 24


def symmetric_step_unitary(h: PauliSum, t: float) -> np.ndarray:
    """Dense ``prod_k e^{-i H_k t/2}`` forward then backward (identity offset included)."""
    from scipy.linalg import expm

    dim = 1 << h.n
    halves = [expm(-0.5j * t * term.coefficient * term.word.to_matrix()) for term in h.terms]
    u = np.eye(dim, dtype=complex)
    for m in halves + halves[::-1]:
        u = m @ u
    return np.exp(-1j * h.identity_offset * t) * u


def first_order_step_unitary(h: PauliSum, t: float) -> np.ndarray:
    from scipy.linalg import expm

    u = np.eye(1 << h.n, dtype=complex)
    for term in h.terms:
        u = expm(-1j * t * term.coefficient * term.word.to_matrix()) @ u
    return np.exp(-1j * h.identity_offset * t) * u


def phase_fit_shift(h: PauliSum, step=symmetric_step_unitary, times=(0.02, 0.04, 0.06, 0.08)) -> float:
    """Coefficient ``c`` in ``E_eff(t) - E0 ~ c t^2`` from Trotter-step eigenphases.

    For each ``t`` the step unitary is diagonalized, the eigenphase continuously
    connected to the ground state is converted to an energy, and a polynomial
    in ``t`` is fitted to the deviation from ``E0``.
    """
    from .hamlib import ground_state

    e0, psi0 = ground_state(h)
    devs = []
    for t in times:
        vals, vecs = np.linalg.eig(step(h, t))
        k = int(np.argmax(np.abs(vecs.conj().T @ psi0)))
        energy = -np.angle(vals[k] * np.exp(1j * e0 * t)) / t + e0
        devs.append(energy - e0)
    ts = np.asarray(times)
    # deviation = c2 t^2 + c3 t^3 + c4 t^4; keep c2
    A = np.column_stack([ts**2, ts**3, ts**4])
    coef, *_ = np.linalg.lstsq(A, np.asarray(devs), rcond=None)
    return float(coef[0])


def qpe_circuits(epsilon: float) -> int:
    """Single-ancilla iterative QPE runs one circuit per bit: ``ceil(log2(1/eps))``."""
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    return max(1, math.ceil(math.log2(1 / epsilon)))


def qpe_plan(
    h: PauliSum,
    epsilon: float = 1e-3,
    e1: float | None = None,
    trotter_base: GateCount | None = None,
    e1_exact: float | None = None,
) -> QpeBoundReport:
    """Trotter step length, step count, circuit count and CNOT total for QPE.

    ``e1`` is the magnitude of the ``t^2`` coefficient of the energy shift;
    it defaults to ``v2_bound(h)``. The evolution time is ``pi / (4 ||H||)``
    with the dense norm within the dense cap, otherwise the triangle bound
    (``norm_exact`` is then False and ``n_T`` is an over-estimate).
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    bound = v2_bound(h)
    if e1 is None:
        e1 = bound
    if e1 < 0:
        raise ValueError("e1 must be non-negative")
    norm, exact = spectral_norm(h)
    t = math.pi / (4 * norm) if norm > 0 else 1.0
    dt = math.sqrt(epsilon / e1) if e1 > 0 else t
    n_T = max(1, math.ceil(t / dt))
    n_2Q = controlled_trotter_cost(n_T, trotter_base) if trotter_base is not None else None
    h_max = float(np.max(np.abs(h.coefficients))) if len(h.terms) else 0.0
    return QpeBoundReport(
        M=len(h.terms),
        h_max=h_max,
        e1_bound=bound,
        e1_exact=e1_exact,
        t=t,
        dt=dt,
        n_T=n_T,
        n_C=qpe_circuits(epsilon),
        n_Q=h.n + 1,
        n_2Q=n_2Q,
        epsilon=epsilon,
        norm=norm,
        norm_exact=exact,
    )


def qpe_resources_from_steps(n: int, n_T: float, trotter_base: GateCount, epsilon: float = 1e-3):
    """Resource row when the Trotter-step count is known directly."""
    from .report import ResourceReport

    return ResourceReport(
        algorithm="qpe",
        n_Q=n + 1,
        n_C=qpe_circuits(epsilon),
        n_2Q=controlled_trotter_cost(n_T, trotter_base),
        provenance={"n_2Q": "estimated-upper"},
    )
