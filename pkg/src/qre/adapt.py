"""Minimal ADAPT-VQE over a qubit-excitation pool.

Pool generators are Hermitian ``G`` and enter the ansatz as ``exp(i theta G)``.
Every generator in the pool is a sum of mutually commuting Pauli words, so
the exponential factorizes into Pauli rotations without splitting error.
"""

from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import minimize

from .circuit import Circuit, GateCount, count_gates, synth_pauli_exponential
from .pauli import PauliSum, PauliWord, apply_word, commutes, to_sparse
from .sim import StateVector, validate_state

OPT_GTOL = 1e-8
OPT_MAX_ITER = 500

TRACE_COLUMNS = ("iter", "selected_label", "gradient", "energy", "n_2q_cumulative")


@dataclass(frozen=True, eq=False)
class PoolOperator:
    generator: PauliSum
    label: str
    support: tuple[int, ...] = ()

    def __post_init__(self):
        if self.generator.identity_offset != 0:
            raise ValueError("generator must be traceless")
        words = self.generator.words
        for a, b in itertools.combinations(words, 2):
            if not commutes(a, b):
                raise ValueError(f"generator terms of {self.label} do not commute")
        if not self.support:
            mask = 0
            for w in words:
                mask |= w.support
            object.__setattr__(self, "support", tuple(q for q in range(self.generator.n) if mask >> q & 1))

    @property
    def n(self) -> int:
        return self.generator.n

    def apply_g(self, vec: np.ndarray) -> np.ndarray:
        out = np.zeros_like(vec)
        for term in self.generator.terms:
            out += term.coefficient * apply_word(term.word, vec)
        return out

    def apply_exp(self, vec: np.ndarray, theta: float) -> np.ndarray:
        """``exp(i theta G) vec`` as a product of commuting Pauli rotations."""
        for term in self.generator.terms:
            a = theta * term.coefficient
            vec = math.cos(a) * vec + 1j * math.sin(a) * apply_word(term.word, vec)
        return vec


def _word(n: int, ops: dict[int, str]) -> PauliWord:
    return PauliWord.from_ops(n, ops)


def qe_single(n: int, i: int, j: int) -> PoolOperator:
    g = PauliSum.from_dict(n, {
        str(_word(n, {i: "X", j: "Y"})): 0.5,
        str(_word(n, {i: "Y", j: "X"})): -0.5,
    })
    return PoolOperator(g, f"s{i}_{j}", (i, j))


_DOUBLE_PATTERN = (
    ("XYXX", +1), ("YXXX", +1), ("YYYX", +1), ("YYXY", +1),
    ("XXYX", -1), ("XXXY", -1), ("YXYY", -1), ("XYYY", -1),
)


def qe_double(n: int, i: int, j: int, k: int, l: int) -> PoolOperator:
    coeffs = {}
    for letters, sign in _DOUBLE_PATTERN:
        w = _word(n, dict(zip((i, j, k, l), letters)))
        coeffs[str(w)] = sign / 8
    return PoolOperator(PauliSum.from_dict(n, coeffs), f"d{i}_{j}_{k}_{l}", tuple(sorted((i, j, k, l))))


def build_qe_pool(n: int) -> list[PoolOperator]:
    """Singles for every ``i<j``, then doubles for disjoint pairs ``(i,j) < (k,l)``."""
    if n < 2:
        raise ValueError("a qubit-excitation pool needs at least 2 qubits")
    pairs = list(itertools.combinations(range(n), 2))
    pool = [qe_single(n, i, j) for i, j in pairs]
    for (i, j), (k, l) in itertools.combinations(pairs, 2):
        if len({i, j, k, l}) == 4:
            pool.append(qe_double(n, i, j, k, l))
    return pool


def reference_state(n: int, n_particles: int) -> StateVector:
    """Computational basis state with qubits ``0..n_particles-1`` occupied."""
    if not 0 <= n_particles <= n:
        raise ValueError("particle number out of range")
    return StateVector.basis(n, "1" * n_particles + "0" * (n - n_particles))


def _amps(s) -> np.ndarray:
    return s.amplitudes if isinstance(s, StateVector) else np.asarray(s, dtype=complex)


def operator_gradient(h: PauliSum, state, op: PoolOperator, hmat=None) -> float:
    """``<state|[H, iG]|state>``, the energy slope of prepending ``exp(i theta G)``."""
    psi = _amps(state)
    if psi.shape[0] != 1 << h.n or op.n != h.n:
        raise ValueError("state, Hamiltonian and pool operator sizes differ")
    hmat = to_sparse(h) if hmat is None else hmat
    return float(-2 * np.vdot(hmat @ psi, op.apply_g(psi)).imag)


def prepare_ansatz(reference, ops: Sequence[PoolOperator], thetas: Sequence[float]) -> np.ndarray:
    psi = np.array(_amps(reference), dtype=complex)
    for op, th in zip(ops, thetas):
        psi = op.apply_exp(psi, th)
    return psi


def energy_and_gradient(hmat, reference, ops: Sequence[PoolOperator], thetas) -> tuple[float, np.ndarray]:
    """Energy and analytic parameter gradient by a single backward sweep."""
    psi = prepare_ansatz(reference, ops, thetas)
    sigma = hmat @ psi
    energy = float(np.vdot(psi, sigma).real)
    grad = np.zeros(len(ops))
    for k in range(len(ops) - 1, -1, -1):
        grad[k] = -2 * np.vdot(sigma, ops[k].apply_g(psi)).imag
        psi = ops[k].apply_exp(psi, -thetas[k])
        sigma = ops[k].apply_exp(sigma, -thetas[k])
    return energy, grad


@dataclass
class AdaptState:
    ansatz: list[tuple[PoolOperator, float]] = field(default_factory=list)
    energy: float = math.nan
    grad_norm: float = math.nan
    iterations: int = 0
    status: str = "running"
    trace: list[dict] = field(default_factory=list)

    @property
    def operators(self) -> list[PoolOperator]:
        return [op for op, _ in self.ansatz]

    @property
    def thetas(self) -> np.ndarray:
        return np.array([th for _, th in self.ansatz])

    def trace_csv(self) -> str:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=TRACE_COLUMNS, lineterminator="\n")
        w.writeheader()
        for row in self.trace:
            w.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in row.items()})
        return buf.getvalue()


def read_trace_csv(text: str) -> list[dict]:
    rows = []
    for rec in csv.DictReader(io.StringIO(text)):
        rows.append({
            "iter": int(rec["iter"]),
            "selected_label": rec["selected_label"],
            "gradient": float(rec["gradient"]),
            "energy": float(rec["energy"]),
            "n_2q_cumulative": int(rec["n_2q_cumulative"]),
        })
    return rows


def adapt_run(
    h: PauliSum,
    reference,
    pool: Sequence[PoolOperator],
    grad_tol: float = 1e-6,
    eps_target: float = 1e-3,
    E0_ref: float | None = None,
    max_iters: int = 50,
) -> AdaptState:
    """Grow the ansatz one operator at a time, reoptimizing all angles each step."""
    validate_state(reference, h.n)
    hmat = to_sparse(h)
    ref = _amps(reference)
    state = AdaptState()
    ops: list[PoolOperator] = []
    thetas = np.zeros(0)
    state.energy = float(np.vdot(ref, hmat @ ref).real)
    n_2q = 0

    while True:
        psi = prepare_ansatz(ref, ops, thetas)
        grads = np.array([operator_gradient(h, psi, op, hmat) for op in pool])
        state.grad_norm = float(np.linalg.norm(grads)) if len(grads) else 0.0
        if E0_ref is not None and abs(state.energy - E0_ref) < eps_target:
            state.status = "target-reached"
            break
        if state.grad_norm < grad_tol:
            state.status = "gradient-converged"
            break
        if state.iterations >= max_iters:
            state.status = "max-iterations"
            break

        # np.argmax returns the first maximum, giving lowest-index tie-breaking
        pick = int(np.argmax(np.abs(grads)))
        ops.append(pool[pick])
        x0 = np.append(thetas, 0.0)
        res = minimize(
            lambda x: energy_and_gradient(hmat, ref, ops, x),
            x0,
            jac=True,
            method="BFGS",
            options={"gtol": OPT_GTOL, "maxiter": OPT_MAX_ITER},
        )
        e_new, g_new = energy_and_gradient(hmat, ref, ops, res.x)
        if e_new <= state.energy + OPT_GTOL:
            thetas = np.asarray(res.x, dtype=float)
        else:
            # keep the warm start; it reproduces the previous energy with the new angle at zero
            thetas = x0
            e_new, g_new = energy_and_gradient(hmat, ref, ops, thetas)
        state.energy = e_new
        state.iterations += 1
        state.ansatz = list(zip(ops, thetas.tolist()))
        n_2q += _op_count(pool[pick]).n_2Q
        state.trace.append({
            "iter": state.iterations,
            "selected_label": pool[pick].label,
            "gradient": float(grads[pick]),
            "energy": e_new,
            "n_2q_cumulative": n_2q,
        })
        if np.max(np.abs(g_new)) > 1e-5 and not res.success:
            state.status = "optimizer-nonconvergence"
            break
    return state


def op_circuit(op: PoolOperator, theta: float) -> Circuit:
    c = Circuit(op.n, [])
    for term in op.generator.terms:
        # synth implements exp(-i c s P); s = -theta gives exp(i theta c P)
        c = c + synth_pauli_exponential(term, angle_scale=-theta)
    return c


def _op_count(op: PoolOperator) -> GateCount:
    return count_gates(op_circuit(op, 1.0))


def ansatz_circuit(state: AdaptState, n: int | None = None) -> Circuit:
    if n is None:
        if not state.ansatz:
            raise ValueError("qubit count needed for an empty ansatz")
        n = state.ansatz[0][0].n
    c = Circuit(n, [])
    for op, th in state.ansatz:
        c = c + op_circuit(op, th)
    return c


def ansatz_gate_count(state: AdaptState) -> GateCount:
    if not state.ansatz:
        return GateCount(0, 0, 0)
    return count_gates(ansatz_circuit(state))


def adapt_resources(n: int, n_terms: int, n_2q: int):
    """Direct energy estimation measures one circuit per Pauli term."""
    from .report import ResourceReport

    return ResourceReport(algorithm="adapt", n_Q=n, n_C=n_terms, n_2Q=n_2q)
