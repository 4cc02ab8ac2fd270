"""Dense statevector simulation.

Basis index ``k`` encodes qubit 0 as its most significant bit, so ``|10>``
means qubit 0 is in ``|1>``.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .circuit import Circuit, Gate
from .hamlib import check_dense, dense_eigh
from .pauli import PauliSum, PauliWord, apply_word, to_sparse

NORM_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class StateVector:
    n: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amps.shape[0] != 1 << self.n:
            raise ValueError(f"expected {1 << self.n} amplitudes, got {amps.shape[0]}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def basis(cls, n: int, bits: str | int) -> "StateVector":
        """Computational basis state from a bitstring (qubit 0 first) or index."""
        index = int(bits, 2) if isinstance(bits, str) else int(bits)
        amps = np.zeros(1 << n, dtype=complex)
        amps[index] = 1.0
        return cls(n, amps)

    @classmethod
    def zero(cls, n: int) -> "StateVector":
        return cls.basis(n, 0)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def overlap(self, other: "StateVector") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def fidelity(self, other: "StateVector") -> float:
        return abs(self.overlap(other)) ** 2


def _amps(s) -> np.ndarray:
    return s.amplitudes if isinstance(s, StateVector) else np.asarray(s, dtype=complex)


def validate_state(s, n: int | None = None, tol: float = NORM_TOL) -> None:
    amps = _amps(s)
    if n is not None and amps.shape[0] != 1 << n:
        raise ValueError(f"state dimension {amps.shape[0]} does not match {n} qubits")
    norm = np.linalg.norm(amps)
    if abs(norm - 1.0) > tol:
        raise ValueError(f"state is not normalized (norm {norm:.12g})")


def apply_gates(array: np.ndarray, n: int, gates: Sequence[Gate]) -> np.ndarray:
    """Apply gates to a ``(2**n,)`` vector or ``(2**n, k)`` batch of columns."""
    batch = array.shape[1:]
    psi = np.array(array, dtype=complex).reshape((2,) * n + batch)
    for g in gates:
        if g.is_cnot:
            c, t = g.qubits
            idx = [slice(None)] * psi.ndim
            idx[c] = 1
            sub = psi[tuple(idx)]
            # target axis shifts down by one once the control axis is indexed away
            axis = t if t < c else t - 1
            psi[tuple(idx)] = np.flip(sub, axis=axis)
        else:
            q = g.qubits[0]
            psi = np.moveaxis(np.tensordot(g.matrix, psi, axes=([1], [q])), 0, q)
    return psi.reshape((1 << n,) + batch)


def apply_circuit(s: StateVector, c: Circuit) -> StateVector:
    if s.n != c.n:
        raise ValueError(f"state has {s.n} qubits, circuit has {c.n}")
    out = apply_gates(s.amplitudes, c.n, c.gates)
    if c.global_phase:
        out = out * np.exp(1j * c.global_phase)
    return StateVector(c.n, out)


class Propagator:
    """Cached eigendecomposition of ``h`` for repeated exact evolution."""

    def __init__(self, h: PauliSum):
        check_dense(h.n, "exact evolution")
        self.n = h.n
        self.energies, self.vectors = dense_eigh(h)

    def evolve(self, amps: np.ndarray, t: float) -> np.ndarray:
        coeffs = self.vectors.conj().T @ amps
        return self.vectors @ (np.exp(-1j * self.energies * t) * coeffs)


def exact_evolve(h: PauliSum, t: float, s: StateVector) -> StateVector:
    """``exp(-iHt) s`` via dense eigendecomposition."""
    if s.n != h.n:
        raise ValueError("state and Hamiltonian sizes differ")
    return StateVector(h.n, Propagator(h).evolve(s.amplitudes, t))


def pauli_expectation(s, word: PauliWord) -> float:
    amps = _amps(s)
    if amps.shape[0] != 1 << word.n:
        raise ValueError("state and word sizes differ")
    return float(np.vdot(amps, apply_word(word, amps)).real)


def expectation(s, h: PauliSum) -> float:
    amps = _amps(s)
    if amps.shape[0] != 1 << h.n:
        raise ValueError("state and Hamiltonian sizes differ")
    return float(np.vdot(amps, to_sparse(h) @ amps).real)


def prepare_overlap_state(
    h: PauliSum, overlap_sq: float, seed: int | None = 0, ground: np.ndarray | None = None
) -> StateVector:
    """State with squared ground-state overlap exactly ``overlap_sq``.

    The orthogonal part is a seeded Gaussian direction projected off the
    ground state. ``ground`` may be supplied to skip the eigensolve.
    """
    if not 0 < overlap_sq <= 1:
        raise ValueError("overlap_sq must lie in (0, 1]")
    if ground is None:
        _, vecs = dense_eigh(h)
        ground = vecs[:, 0]
    ground = ground / np.linalg.norm(ground)
    rng = np.random.default_rng(seed)
    dim = ground.shape[0]
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    v -= np.vdot(ground, v) * ground
    v /= np.linalg.norm(v)
    b = np.sqrt(overlap_sq) * ground + np.sqrt(1 - overlap_sq) * v
    return StateVector(h.n, b / np.linalg.norm(b))


def permute_qubits(s: StateVector, layout: Sequence[int], n_out: int | None = None) -> StateVector:
    """Move logical qubit ``i`` to position ``layout[i]`` of an ``n_out``-qubit register.

    Extra register qubits are left in ``|0>``.
    """
    n_out = s.n if n_out is None else n_out
    psi = s.amplitudes.reshape((2,) * s.n)
    if n_out > s.n:
        pad = np.zeros((2,) * (n_out - s.n), dtype=complex)
        pad.reshape(-1)[0] = 1.0
        psi = np.multiply.outer(psi, pad)
    used = list(layout)
    free = [p for p in range(n_out) if p not in used]
    dest = used + free
    return StateVector(n_out, np.moveaxis(psi, list(range(n_out)), dest).reshape(-1))


def save_state(s: StateVector, path) -> None:
    """Binary dump: ``QSV1 <n>\\n`` then little-endian complex128 amplitudes."""
    with open(path, "wb") as fh:
        fh.write(f"QSV1 {s.n}\n".encode("ascii"))
        fh.write(np.asarray(s.amplitudes, dtype="<c16").tobytes())


def load_state(path) -> StateVector:
    data = Path(path).read_bytes()
    header, _, body = data.partition(b"\n")
    tag, n = header.decode("ascii").split()
    if tag != "QSV1":
        raise ValueError("not a QSV1 state file")
    return StateVector(int(n), np.frombuffer(body, dtype="<c16").copy())
