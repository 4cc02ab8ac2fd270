"""Unitary quantum Krylov: subspaces, H/S matrices, thresholded GEVP, scans, resources."""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .circuit import GateCount, Strategy, controlled_trotter_cost, synth_trotter_step
from .hamlib import dense_eigh, spectral_norm
from .pauli import PauliSum, to_sparse
from .report import ResourceReport
from .sim import StateVector, apply_gates, prepare_overlap_state, validate_state

CHEMICAL_ACCURACY = 1e-3
NO_THRESHOLD_RTOL = 1e-14


@dataclass(frozen=True)
class Exact:
    """Exact evolution ``exp(-iHt)``."""


@dataclass(frozen=True)
class Trotter:
    r: int
    strategy: Strategy = "naive"


Evolution = Exact | Trotter


@dataclass(frozen=True)
class Threshold:
    """Overlap-matrix eigenvalue cutoff; ``delta=None`` means no threshold."""

    delta: float | None = None

    def __post_init__(self):
        if self.delta is not None and not math.isfinite(self.delta):
            raise ValueError("threshold must be finite")


@dataclass(frozen=True, eq=False)
class KrylovMatrices:
    d: int
    H: np.ndarray
    S: np.ndarray

    def leading(self, d: int) -> "KrylovMatrices":
        return KrylovMatrices(d, self.H[:d, :d], self.S[:d, :d])


@dataclass(frozen=True)
class GevpResult:
    energy: float
    retained: int
    status: str = "ok"

    @property
    def solved(self) -> bool:
        return self.status == "ok"


@dataclass(frozen=True)
class ScanRow:
    d: int
    n_trotter: int | None  # None for exact evolution
    energy: float
    error: float
    status: str

    @property
    def solved(self) -> bool:
        return self.status == "ok"


@dataclass(frozen=True)
class KrylovScan:
    rows: tuple[ScanRow, ...]
    E0: float
    t: float

    def column(self, n_trotter: int | None) -> list[ScanRow]:
        return [r for r in self.rows if r.n_trotter == n_trotter]

    def min_d(self, n_trotter: int | None, tol: float = CHEMICAL_ACCURACY) -> int | None:
        """Smallest d whose solved error is within ``tol``."""
        for row in self.column(n_trotter):
            if row.solved and abs(row.error) <= tol:
                return row.d
        return None

    def max_solved_d(self, n_trotter: int | None) -> int:
        return max((r.d for r in self.column(n_trotter) if r.solved), default=0)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["d", "n_trotter", "energy", "error", "status"])
        for r in self.rows:
            w.writerow([
                r.d,
                "exact" if r.n_trotter is None else r.n_trotter,
                repr(r.energy),
                repr(r.error),
                r.status,
            ])
        return buf.getvalue()


def read_scan_csv(text: str) -> list[ScanRow]:
    rows = []
    for rec in csv.DictReader(io.StringIO(text)):
        nt = None if rec["n_trotter"] == "exact" else int(rec["n_trotter"])
        rows.append(ScanRow(int(rec["d"]), nt, float(rec["energy"]), float(rec["error"]), rec["status"]))
    return rows


def default_time(h: PauliSum) -> float:
    """``pi / (4 ||H||)`` with the dense norm when affordable."""
    norm, _ = spectral_norm(h)
    if norm == 0:
        return 1.0
    return math.pi / (4 * norm)


def _step_unitary(h: PauliSum, t: float, evolution: Evolution) -> np.ndarray:
    if isinstance(evolution, Exact):
        vals, vecs = dense_eigh(h)
        return (vecs * np.exp(-1j * vals * t)) @ vecs.conj().T
    circ = synth_trotter_step(h, t, evolution.r, evolution.strategy)
    u = apply_gates(np.eye(1 << h.n, dtype=complex), h.n, circ.gates)
    return np.exp(1j * circ.global_phase) * u


def build_subspace(
    h: PauliSum, b: StateVector, d: int, evolution: Evolution = Exact(), t: float | None = None
) -> list[StateVector]:
    """Vectors ``U^j b`` for ``j = 0..d-1`` with ``U`` exact or Trotterized for time ``t``."""
    if d < 1:
        raise ValueError("d must be >= 1")
    validate_state(b, h.n)
    if t is None:
        t = default_time(h)
    if d == 1:
        return [b]
    u = _step_unitary(h, t, evolution)
    out = [b.amplitudes]
    for _ in range(d - 1):
        nxt = u @ out[-1]
        out.append(nxt / np.linalg.norm(nxt))
    return [StateVector(h.n, v) for v in out]


def assemble_matrices(h: PauliSum, basis: Sequence[StateVector]) -> KrylovMatrices:
    """``H_ij = <phi_i|H|phi_j>`` and ``S_ij = <phi_i|phi_j>``, Hermitian by construction."""
    if not basis:
        raise ValueError("basis must be nonempty")
    if any(v.n != h.n for v in basis):
        raise ValueError("basis vectors and Hamiltonian sizes differ")
    phi = np.column_stack([v.amplitudes for v in basis])
    hphi = to_sparse(h) @ phi
    H = phi.conj().T @ hphi
    S = phi.conj().T @ phi
    H = 0.5 * (H + H.conj().T)
    S = 0.5 * (S + S.conj().T)
    np.fill_diagonal(S, np.real(np.diag(S)))
    return KrylovMatrices(len(basis), H, S)


def solve_gevp(m: KrylovMatrices, thr: Threshold = Threshold()) -> GevpResult:
    """Lowest root of ``H c = E S c`` after discarding small overlap eigenvalues.

    Eigenpairs of ``S`` with eigenvalue above the cutoff are kept, where the
    cutoff is ``delta`` when given and ``1e-14 * max(eig S)`` otherwise. The
    problem is then solved in the retained eigenbasis, which requires every
    retained eigenvalue to be numerically positive; a negative ``delta`` that
    lets through non-positive eigenvalues, or an empty retained set, yields
    a failed result rather than an exception.
    """
    evals, evecs = np.linalg.eigh(m.S)
    scale = max(float(evals[-1]), 0.0)
    floor = NO_THRESHOLD_RTOL * scale
    if thr.delta is None:
        keep = evals > floor
        if not keep.all():
            return GevpResult(math.nan, int(keep.sum()), "singular")
    else:
        keep = evals > thr.delta
    retained = int(keep.sum())
    if retained == 0:
        return GevpResult(math.nan, 0, "empty")
    lam = evals[keep]
    if np.any(lam <= floor):
        return GevpResult(math.nan, retained, "not-positive-definite")
    v = evecs[:, keep] / np.sqrt(lam)
    h_white = v.conj().T @ m.H @ v
    h_white = 0.5 * (h_white + h_white.conj().T)
    if not np.all(np.isfinite(h_white)):
        return GevpResult(math.nan, retained, "non-finite")
    energy = float(np.linalg.eigvalsh(h_white)[0])
    if not math.isfinite(energy):
        return GevpResult(math.nan, retained, "non-finite")
    return GevpResult(energy, retained, "ok")


def _scan_column(args) -> list[ScanRow]:
    h, b, d_max, evolution, t, thr, E0 = args
    basis = build_subspace(h, b, d_max, evolution, t)
    full = assemble_matrices(h, basis)
    nt = None if isinstance(evolution, Exact) else evolution.r
    rows = []
    for d in range(1, d_max + 1):
        res = solve_gevp(full.leading(d), thr)
        err = res.energy - E0 if res.solved else math.nan
        rows.append(ScanRow(d, nt, res.energy, err, res.status))
    return rows


def convergence_scan(
    h: PauliSum,
    overlap_sq: float,
    d_max: int,
    trotter_steps_list: Iterable[int] = (),
    t: float | None = None,
    thr: Threshold = Threshold(),
    seed: int = 0,
    strategy: Strategy = "naive",
    jobs: int = 1,
) -> KrylovScan:
    """Krylov energy error for every ``d <= d_max`` and evolution setting.

    Columns appear in the given Trotter-step order followed by exact
    evolution. The reference vector and ``E0`` come from dense
    diagonalization.
    """
    vals, vecs = dense_eigh(h)
    E0 = float(vals[0])
    b = prepare_overlap_state(h, overlap_sq, seed, ground=vecs[:, 0])
    if t is None:
        t = math.pi / (4 * max(abs(vals[0]), abs(vals[-1])))
    settings: list[Evolution] = [Trotter(int(r), strategy) for r in trotter_steps_list]
    settings.append(Exact())
    tasks = [(h, b, d_max, ev, t, thr, E0) for ev in settings]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            columns = list(pool.map(_scan_column, tasks))
    else:
        columns = [_scan_column(task) for task in tasks]
    return KrylovScan(tuple(r for col in columns for r in col), E0, t)


def epperly_bound(gaps: tuple[float, float], overlap_sq: float, d: int) -> float:
    """Upper bound on ``E - E0`` after ``d`` unitary Krylov steps.

    ``gaps`` is ``(E1 - E0, E_{N-1} - E0)``.
    """
    g1, gmax = gaps
    if not g1 > 0:
        raise ValueError("spectral gap must be positive")
    if gmax < g1:
        raise ValueError("largest gap must be at least the first gap")
    if not 0 < overlap_sq <= 1:
        raise ValueError("overlap_sq must lie in (0, 1]")
    prefactor = 8 * gmax * (1 - overlap_sq) / overlap_sq
    return prefactor * (1 + math.pi * g1 / gmax) ** (-2 * d)


def epperly_dimension(gaps: tuple[float, float], overlap_sq: float, epsilon: float) -> float:
    """Real-valued ``d`` at which the bound equals ``epsilon`` (0 if already below)."""
    g1, gmax = gaps
    prefactor = 8 * gmax * (1 - overlap_sq) / overlap_sq
    if prefactor <= epsilon:
        return 0.0
    return math.log(prefactor / epsilon) / (2 * math.log1p(math.pi * g1 / gmax))


def linear_extrapolate(points: Sequence[tuple[float, float]], x_target: float) -> float:
    """Least-squares line through ``points`` evaluated at ``x_target``."""
    if len(points) < 2:
        raise ValueError("need at least two points")
    x = np.array([p[0] for p in points], dtype=float)
    y = np.array([p[1] for p in points], dtype=float)
    if np.ptp(x) == 0:
        raise ValueError("x values must not all coincide")
    slope, intercept = np.polyfit(x, y, 1)
    return float(slope * x_target + intercept)


def krylov_resources(
    d: int, n_groups: int, trotter_base: GateCount, n_T: float, n: int | None = None
) -> ResourceReport:
    """Circuit count ``d^2 * N_groups`` and controlled-Trotter CNOT estimate."""
    if d < 1 or n_groups < 1 or n_T < 1:
        raise ValueError("d, n_groups and n_T must be >= 1")
    return ResourceReport(
        algorithm="krylov",
        n_Q=None if n is None else n + 1,
        n_C=d * d * n_groups,
        n_2Q=controlled_trotter_cost(n_T, trotter_base),
        provenance={"n_C": "estimated-lower", "n_2Q": "estimated-lower"},
    )


def format_matrices(m: KrylovMatrices) -> str:
    """Text dump: ``KM1 d`` then H and S row-major as ``re im`` pairs."""
    lines = [f"KM1 {m.d}"]
    for mat in (m.H, m.S):
        for row in mat:
            lines.append(" ".join(f"{z.real:.17e} {z.imag:.17e}" for z in row))
    return "\n".join(lines) + "\n"


def parse_matrices(text: str) -> KrylovMatrices:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    tag, d = lines[0].split()
    if tag != "KM1":
        raise ValueError("not a KM1 matrix dump")
    d = int(d)
    vals = np.array([[float(v) for v in ln.split()] for ln in lines[1:]])
    z = vals[:, 0::2] + 1j * vals[:, 1::2]
    return KrylovMatrices(d, z[:d], z[d : 2 * d])
