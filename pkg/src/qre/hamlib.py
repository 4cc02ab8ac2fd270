"""Benchmark Hamiltonians, the Pauli text format, and dense spectral tools."""

from __future__ import annotations

import os
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .pauli import DimensionError, FermionTerm, PauliSum, PauliTerm, PauliWord, jordan_wigner, to_sparse

DEFAULT_DENSE_CAP = 14


class CapabilityError(RuntimeError):
    """Requested operation exceeds the dense-simulation qubit cap."""


class ParseError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def dense_cap() -> int:
    """Qubit cap for dense linear algebra; ``QRE_DENSE_CAP`` overrides it."""
    value = os.environ.get("QRE_DENSE_CAP")
    return int(value) if value else DEFAULT_DENSE_CAP


def check_dense(n: int, what: str = "dense linear algebra") -> None:
    cap = dense_cap()
    if n > cap:
        raise CapabilityError(
            f"{what} on {n} qubits exceeds the dense cap of {cap}; "
            "use norm_upper_bound for norm estimates or raise QRE_DENSE_CAP"
        )


# ---------------------------------------------------------------- Hubbard


@dataclass(frozen=True)
class HubbardSpec:
    nx: int
    ny: int
    t: float = 1.0
    U: float = 4.0
    mu: float = 0.0

    def __post_init__(self):
        if self.nx < 1 or self.ny < 1:
            raise ValueError("lattice extents must be positive")

    @property
    def n_sites(self) -> int:
        return self.nx * self.ny

    def site(self, x: int, y: int) -> int:
        return x * self.ny + y

    def edges(self) -> list[tuple[int, int]]:
        """Nearest-neighbour pairs of the open-boundary lattice."""
        out = []
        for x in range(self.nx):
            for y in range(self.ny):
                if x + 1 < self.nx:
                    out.append((self.site(x, y), self.site(x + 1, y)))
                if y + 1 < self.ny:
                    out.append((self.site(x, y), self.site(x, y + 1)))
        return sorted(out)


def hubbard_fermion_terms(spec: HubbardSpec) -> list[FermionTerm]:
    terms = []
    for i, j in spec.edges():
        terms.append(FermionTerm.hop(i, j, -spec.t))
        terms.append(FermionTerm.hop(j, i, -spec.t))
    for i, j in spec.edges():
        terms.append(FermionTerm.density_density(i, j, spec.U))
    for i in range(spec.n_sites):
        terms.append(FermionTerm.number(i, -spec.mu))
    return terms


def build_hubbard(spec: HubbardSpec) -> PauliSum:
    """Spinless Hubbard model on an ``nx x ny`` open lattice, Jordan-Wigner mapped.

    Site ``(x, y)`` maps to qubit ``x * ny + y``.
    """
    return jordan_wigner(hubbard_fermion_terms(spec), spec.n_sites)


def hubbard(nx: int, ny: int, t: float = 1.0, U: float = 4.0, mu: float = 0.0) -> PauliSum:
    return build_hubbard(HubbardSpec(nx, ny, t, U, mu))


# ---------------------------------------------------------------- file format


def format_pauli_sum(h: PauliSum) -> str:
    lines = [f"qubits {h.n}"]
    if h.identity_offset != 0.0:
        lines.append(f"{h.identity_offset:.17e} {'I' * h.n}")
    for t in h.terms:
        lines.append(f"{t.coefficient:.17e} {t.word}")
    return "\n".join(lines) + "\n"


def parse_pauli_text(text: str) -> PauliSum:
    n = None
    terms = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if n is None:
            if len(parts) != 2 or parts[0] != "qubits":
                raise ParseError("expected header 'qubits <n>'", lineno)
            try:
                n = int(parts[1])
            except ValueError:
                raise ParseError(f"bad qubit count {parts[1]!r}", lineno) from None
            if n < 0:
                raise ParseError("qubit count must be non-negative", lineno)
            continue
        if len(parts) != 2:
            raise ParseError("expected '<coefficient> <word>'", lineno)
        try:
            coeff = float(parts[0])
        except ValueError:
            raise ParseError(f"bad coefficient {parts[0]!r}", lineno) from None
        if not np.isfinite(coeff):
            raise ParseError("coefficient must be finite", lineno)
        word = parts[1]
        if len(word) != n:
            raise DimensionError(f"line {lineno}: word length {len(word)} != {n} qubits")
        try:
            terms.append(PauliTerm(coeff, PauliWord.from_string(word)))
        except ValueError as exc:
            raise ParseError(str(exc), lineno) from None
    if n is None:
        raise ParseError("missing 'qubits <n>' header")
    return PauliSum(n, tuple(terms))


def load_pauli_file(path) -> PauliSum:
    return parse_pauli_text(Path(path).read_text(encoding="utf-8"))


def save_pauli_file(h: PauliSum, path) -> None:
    write_atomic(path, format_pauli_sum(h))


def write_atomic(path, text: str) -> None:
    """Write via a temporary file in the target directory, then rename."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# ---------------------------------------------------------------- spectra


@dataclass(frozen=True)
class SpectralInfo:
    E0: float
    E1: float
    Emax: float
    norm2: float
    eigenvalues: np.ndarray | None = None

    @property
    def gaps(self) -> tuple[float, float]:
        """``(E1 - E0, Emax - E0)``."""
        return self.E1 - self.E0, self.Emax - self.E0


def dense_matrix(h: PauliSum) -> np.ndarray:
    check_dense(h.n)
    return to_sparse(h).toarray()


def dense_eigh(h: PauliSum) -> tuple[np.ndarray, np.ndarray]:
    """Ascending eigenvalues and eigenvectors (columns) of the dense matrix."""
    vals, vecs = np.linalg.eigh(dense_matrix(h))
    return vals, vecs


def dense_spectrum(h: PauliSum) -> SpectralInfo:
    vals = np.linalg.eigvalsh(dense_matrix(h))
    e0 = float(vals[0])
    e1 = float(vals[1]) if len(vals) > 1 else e0
    emax = float(vals[-1])
    return SpectralInfo(e0, e1, emax, max(abs(e0), abs(emax)), vals)


def norm_upper_bound(h: PauliSum) -> float:
    return abs(h.identity_offset) + float(np.sum(np.abs(h.coefficients)))


def spectral_norm(h: PauliSum) -> tuple[float, bool]:
    """``(norm, exact)``: dense norm within the cap, else the triangle bound."""
    if h.n <= dense_cap():
        return dense_spectrum(h).norm2, True
    return norm_upper_bound(h), False


def ground_state(h: PauliSum) -> tuple[float, np.ndarray]:
    """Lowest eigenpair; degenerate ties resolve to the solver's first column."""
    vals, vecs = dense_eigh(h)
    return float(vals[0]), vecs[:, 0]
