"""Circuits over {arbitrary single-qubit U, CNOT}: synthesis, counting, routing."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Literal, Sequence

import numpy as np

from .pauli import PauliSum, PauliTerm, PauliWord

Strategy = Literal["naive", "grouped", "cancel"]
STRATEGIES = ("naive", "grouped", "cancel")

_TOL = 1e-12

H_GATE = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
S_GATE = np.array([[1, 0], [0, 1j]], dtype=complex)


def rz(angle: float) -> np.ndarray:
    """``exp(-i angle/2 Z)``."""
    return np.array([[np.exp(-0.5j * angle), 0], [0, np.exp(0.5j * angle)]], dtype=complex)


@dataclass(frozen=True, eq=False)
class Gate:
    kind: str  # "U" or "CNOT"
    qubits: tuple[int, ...]
    matrix: np.ndarray | None = None

    def __post_init__(self):
        if self.kind == "U":
            if len(self.qubits) != 1 or self.matrix is None:
                raise ValueError("U gate needs one qubit and a 2x2 matrix")
            m = np.asarray(self.matrix, dtype=complex)
            if m.shape != (2, 2) or not np.allclose(m.conj().T @ m, np.eye(2), atol=_TOL):
                raise ValueError("single-qubit matrix must be 2x2 unitary")
            object.__setattr__(self, "matrix", m)
        elif self.kind == "CNOT":
            if len(self.qubits) != 2 or self.qubits[0] == self.qubits[1]:
                raise ValueError("CNOT needs distinct control and target")
        else:
            raise ValueError(f"unknown gate kind {self.kind!r}")

    @classmethod
    def u(cls, q: int, matrix) -> "Gate":
        return cls("U", (q,), np.asarray(matrix, dtype=complex))

    @classmethod
    def cnot(cls, control: int, target: int) -> "Gate":
        return cls("CNOT", (control, target))

    @property
    def is_cnot(self) -> bool:
        return self.kind == "CNOT"

    def __repr__(self):
        if self.is_cnot:
            return f"CNOT({self.qubits[0]}, {self.qubits[1]})"
        return f"U({self.qubits[0]})"


@dataclass(frozen=True)
class Circuit:
    n: int
    gates: tuple[Gate, ...] = ()
    global_phase: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            if any(q < 0 or q >= self.n for q in g.qubits):
                raise ValueError(f"{g} acts outside {self.n} qubits")

    def __len__(self):
        return len(self.gates)

    def __add__(self, other: "Circuit") -> "Circuit":
        if other.n != self.n:
            raise ValueError("circuit widths differ")
        return Circuit(self.n, self.gates + other.gates, self.global_phase + other.global_phase)

    def repeat(self, times: int) -> "Circuit":
        return Circuit(self.n, self.gates * times, self.global_phase * times)

    def unitary(self) -> np.ndarray:
        """Dense unitary; qubit 0 is the most significant tensor factor."""
        from .sim import apply_gates

        eye = np.eye(1 << self.n, dtype=complex)
        return np.exp(1j * self.global_phase) * apply_gates(eye, self.n, self.gates)


@dataclass(frozen=True)
class GateCount:
    n_1Q: int = 0
    n_2Q: int = 0
    depth: int = 0


def count_gates(c: Circuit) -> GateCount:
    """Exact tally; depth by greedy layering on qubit availability."""
    level = [0] * c.n
    n1 = n2 = depth = 0
    for g in c.gates:
        if g.is_cnot:
            n2 += 1
        else:
            n1 += 1
        layer = 1 + max(level[q] for q in g.qubits)
        for q in g.qubits:
            level[q] = layer
        depth = max(depth, layer)
    return GateCount(n1, n2, depth)


def controlled_trotter_cost(n_T: float, base: GateCount) -> int:
    """Two-qubit gates for ``n_T`` controlled Trotter steps.

    A controlled single-qubit gate costs at most 3 CNOTs and a controlled
    CNOT (Toffoli) at most 6.
    """
    if n_T < 1:
        raise ValueError("n_T must be at least 1")
    return int(round(n_T * (3 * base.n_1Q + 6 * base.n_2Q)))


# ---------------------------------------------------------------- synthesis


def _basis_change(letter: str) -> np.ndarray | None:
    """``B`` with ``B Z B^dagger`` equal to the letter's Pauli, or ``None`` for Z."""
    if letter == "X":
        return H_GATE
    if letter == "Y":
        return S_GATE @ H_GATE
    return None


def ladder_order(word: PauliWord) -> list[int]:
    """Support qubits in CNOT-ladder order, ending on the last support qubit.

    Z-letter qubits go first so that consecutive exponentials with matching
    Z strings leave CNOTs adjacent for the cancellation pass.
    """
    qs = word.qubits()
    last, rest = qs[-1], qs[:-1]
    z_first = [q for q in rest if word.letter(q) == "Z"]
    others = [q for q in rest if word.letter(q) != "Z"]
    return z_first + others + [last]


def pauli_exponential_gates(word: PauliWord, theta: float) -> list[Gate]:
    """Gates for ``exp(-i theta word)`` (``word`` must not be the identity)."""
    if word.is_identity:
        raise ValueError("identity word has no circuit; treat it as a global phase")
    chain = ladder_order(word)
    pre, post = [], []
    for q in word.qubits():
        b = _basis_change(word.letter(q))
        if b is not None:
            pre.append(Gate.u(q, b.conj().T))
            post.append(Gate.u(q, b))
    ladder = [Gate.cnot(a, b) for a, b in zip(chain, chain[1:])]
    rot = Gate.u(chain[-1], rz(2 * theta))
    return pre + ladder + [rot] + ladder[::-1] + post


def synth_pauli_exponential(term: PauliTerm, angle_scale: float = 1.0) -> Circuit:
    """Circuit for ``exp(-i * coefficient * angle_scale * word)``."""
    gates = pauli_exponential_gates(term.word, term.coefficient * angle_scale)
    return Circuit(term.word.n, tuple(gates))


def term_order(h: PauliSum, strategy: Strategy) -> list[int]:
    """Order in which a Trotter step exponentiates the terms of ``h``."""
    if strategy == "naive":
        return list(range(len(h.terms)))
    if strategy in ("grouped", "cancel"):
        from .grouping import sorted_insertion_group

        groups = sorted_insertion_group(h, "full")
        return [i for g in groups.groups for i in g]
    raise ValueError(f"strategy must be one of {STRATEGIES}")


def synth_trotter_step(h: PauliSum, t: float, r: int = 1, strategy: Strategy = "naive") -> Circuit:
    """First-order product formula ``[prod_j exp(-i h_j t / r)]^r`` as a circuit.

    The identity offset becomes a global phase.
    """
    if r < 1:
        raise ValueError("r must be >= 1")
    if not math.isfinite(t):
        raise ValueError("t must be finite")
    order = term_order(h, strategy)
    dt = t / r
    step: list[Gate] = []
    for i in order:
        term = h.terms[i]
        step.extend(pauli_exponential_gates(term.word, term.coefficient * dt))
    circ = Circuit(h.n, tuple(step) * r, -h.identity_offset * t)
    if strategy == "cancel":
        circ = optimize(circ)
    return circ


def trotter_product_oracle(h: PauliSum, t: float, r: int, strategy: Strategy) -> np.ndarray:
    """Ordered product of dense matrix exponentials matching ``synth_trotter_step``."""
    from scipy.linalg import expm

    order = term_order(h, strategy)
    dim = 1 << h.n
    step = np.eye(dim, dtype=complex)
    for i in order:
        term = h.terms[i]
        step = expm(-1j * term.coefficient * (t / r) * term.word.to_matrix()) @ step
    return np.exp(-1j * h.identity_offset * t) * np.linalg.matrix_power(step, r)


# ---------------------------------------------------------------- peephole


def _is_diag(m: np.ndarray) -> bool:
    return abs(m[0, 1]) < _TOL and abs(m[1, 0]) < _TOL


def _is_xdiag(m: np.ndarray) -> bool:
    return abs(m[0, 0] - m[1, 1]) < _TOL and abs(m[0, 1] - m[1, 0]) < _TOL


def _commutes_with_cnot(g: Gate, control: int, target: int) -> bool:
    if g.is_cnot:
        c2, t2 = g.qubits
        return c2 != target and t2 != control
    q = g.qubits[0]
    if q == control:
        return _is_diag(g.matrix)
    if q == target:
        return _is_xdiag(g.matrix)
    return True


def _peephole_pass(gates: Sequence[Gate], n: int) -> tuple[list[Gate], float]:
    out: list[Gate | None] = []
    on_qubit: list[list[int]] = [[] for _ in range(n)]
    phase = 0.0

    def last_live(q: int) -> int | None:
        stack = on_qubit[q]
        while stack and out[stack[-1]] is None:
            stack.pop()
        return stack[-1] if stack else None

    def push(g: Gate):
        out.append(g)
        for q in g.qubits:
            on_qubit[q].append(len(out) - 1)

    for g in gates:
        if not g.is_cnot:
            q = g.qubits[0]
            j = last_live(q)
            if j is not None and not out[j].is_cnot:
                m = g.matrix @ out[j].matrix
                if _is_diag(m) and abs(m[0, 0] - m[1, 1]) < _TOL:
                    phase += float(np.angle(m[0, 0]))
                    out[j] = None
                else:
                    out[j] = Gate.u(q, m)
                continue
            push(g)
            continue
        control, target = g.qubits
        # walk back over gates on the two wires while they commute with g
        ia, ib = list(on_qubit[control]), list(on_qubit[target])
        cancelled = False
        while True:
            while ia and out[ia[-1]] is None:
                ia.pop()
            while ib and out[ib[-1]] is None:
                ib.pop()
            if not ia and not ib:
                break
            j = max(ia[-1] if ia else -1, ib[-1] if ib else -1)
            o = out[j]
            if o.is_cnot and o.qubits == g.qubits:
                out[j] = None
                cancelled = True
                break
            if not _commutes_with_cnot(o, control, target):
                break
            if ia and ia[-1] == j:
                ia.pop()
            if ib and ib[-1] == j:
                ib.pop()
        if not cancelled:
            push(g)
    return [g for g in out if g is not None], phase


def optimize(c: Circuit, max_passes: int = 10) -> Circuit:
    """Cancel CNOT pairs separated only by commuting gates and merge single-qubit runs.

    Never increases either gate count and preserves the unitary, including
    global phase.
    """
    gates = list(c.gates)
    phase = c.global_phase
    for _ in range(max_passes):
        new, dphase = _peephole_pass(gates, c.n)
        phase += dphase
        done = len(new) == len(gates)
        gates = new
        if done:
            break
    return Circuit(c.n, tuple(gates), phase)


# ---------------------------------------------------------------- text export


def format_circuit(c: Circuit) -> str:
    lines = [f"# qubits {c.n}", f"# phase {c.global_phase:.17e}"]
    for g in c.gates:
        if g.is_cnot:
            lines.append(f"CNOT {g.qubits[0]} {g.qubits[1]}")
        else:
            vals = []
            for z in g.matrix.reshape(-1):
                vals += [f"{z.real:.17e}", f"{z.imag:.17e}"]
            lines.append(f"U {g.qubits[0]} " + " ".join(vals))
    return "\n".join(lines) + "\n"


def parse_circuit(text: str, n: int | None = None) -> Circuit:
    gates = []
    phase = 0.0
    width = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            parts = line[1:].split()
            if len(parts) == 2 and parts[0] == "qubits" and n is None:
                n = int(parts[1])
            elif len(parts) == 2 and parts[0] == "phase":
                phase = float(parts[1])
            continue
        parts = line.split()
        if parts[0] == "CNOT" and len(parts) == 3:
            g = Gate.cnot(int(parts[1]), int(parts[2]))
        elif parts[0] == "U" and len(parts) == 10:
            v = [float(p) for p in parts[2:]]
            m = np.array([complex(v[2 * k], v[2 * k + 1]) for k in range(4)]).reshape(2, 2)
            g = Gate.u(int(parts[1]), m)
        else:
            raise ValueError(f"line {lineno}: cannot parse gate {line!r}")
        gates.append(g)
        width = max(width, max(g.qubits) + 1)
    return Circuit(n if n is not None else width, tuple(gates), phase)


# ---------------------------------------------------------------- routing


@dataclass(frozen=True)
class CouplingGraph:
    n: int
    edges: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        norm = set()
        for a, b in self.edges:
            if a == b:
                raise ValueError(f"self-loop on {a}")
            if not (0 <= a < self.n and 0 <= b < self.n):
                raise ValueError(f"edge ({a}, {b}) outside {self.n} qubits")
            norm.add((min(a, b), max(a, b)))
        object.__setattr__(self, "edges", frozenset(norm))
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for a, b in sorted(norm):
            adj[a].append(b)
            adj[b].append(a)
        object.__setattr__(self, "_adj", tuple(tuple(sorted(x)) for x in adj))

    @classmethod
    def line(cls, n: int) -> "CouplingGraph":
        return cls(n, frozenset((i, i + 1) for i in range(n - 1)))

    @classmethod
    def complete(cls, n: int) -> "CouplingGraph":
        return cls(n, frozenset((i, j) for i in range(n) for j in range(i + 1, n)))

    def neighbors(self, q: int) -> tuple[int, ...]:
        return self._adj[q]

    def adjacent(self, a: int, b: int) -> bool:
        return (min(a, b), max(a, b)) in self.edges

    def degree(self, q: int) -> int:
        return len(self._adj[q])

    def bfs_parents(self, source: int) -> list[int]:
        parent = [-1] * self.n
        parent[source] = source
        queue = deque([source])
        while queue:
            u = queue.popleft()
            for v in self._adj[u]:
                if parent[v] == -1:
                    parent[v] = u
                    queue.append(v)
        return parent

    def is_connected(self) -> bool:
        if self.n == 0:
            return True
        return all(p != -1 for p in self.bfs_parents(0))

    def shortest_path(self, a: int, b: int) -> list[int]:
        parent = self.bfs_parents(b)
        if parent[a] == -1:
            raise ValueError(f"no path between {a} and {b}")
        path = [a]
        while path[-1] != b:
            path.append(parent[path[-1]])
        return path


def heavy_hex(rows: int, cols: int) -> CouplingGraph:
    """Heavy-hex lattice with ``rows`` rows of ``cols`` hexagonal cells.

    ``rows + 1`` horizontal chains of ``4 * cols + 1`` qubits are joined by
    bridge qubits every fourth column, alternating offsets 0 and 2 between
    successive chain pairs. Chain qubits have degree <= 3 and bridges degree 2.
    Qubits are numbered chain by chain, each chain followed by the bridges
    below it.
    """
    if rows < 1 or cols < 1:
        raise ValueError("rows and cols must be positive")
    length = 4 * cols + 1
    edges = []
    index = 0
    chain_start = []
    bridge_cols = []
    for r in range(rows + 1):
        chain_start.append(index)
        index += length
        if r < rows:
            offset = 0 if r % 2 == 0 else 2
            cs = list(range(offset, length, 4))
            bridge_cols.append((index, cs))
            index += len(cs)
    for r in range(rows + 1):
        s = chain_start[r]
        edges += [(s + k, s + k + 1) for k in range(length - 1)]
    for r, (start, cs) in enumerate(bridge_cols):
        for k, col in enumerate(cs):
            bridge = start + k
            edges.append((chain_start[r] + col, bridge))
            edges.append((bridge, chain_start[r + 1] + col))
    return CouplingGraph(index, frozenset(edges))


def heavy_hex_for(n: int) -> CouplingGraph:
    """Smallest square-ish heavy-hex lattice with at least ``n`` qubits."""
    size = 1
    while True:
        for rows, cols in ((size, size), (size, size + 1), (size + 1, size + 1)):
            g = heavy_hex(rows, cols)
            if g.n >= n:
                return g
        size += 1


@dataclass(frozen=True)
class Routed:
    circuit: Circuit
    layout: tuple[int, ...]  # layout[logical] = physical qubit at the end


def _swap(a: int, b: int) -> list[Gate]:
    return [Gate.cnot(a, b), Gate.cnot(b, a), Gate.cnot(a, b)]


def route_with_layout(c: Circuit, g: CouplingGraph) -> Routed:
    """Greedy SWAP insertion along BFS shortest paths, trivial initial layout.

    Each blocked CNOT moves its control toward its target one SWAP at a time
    until the two are adjacent; there is no lookahead.
    """
    if g.n < c.n:
        raise ValueError(f"graph has {g.n} qubits but circuit needs {c.n}")
    if not g.is_connected():
        raise ValueError("coupling graph is disconnected")
    l2p = list(range(g.n))
    p2l = list(range(g.n))
    out: list[Gate] = []
    for gate in c.gates:
        if not gate.is_cnot:
            out.append(Gate.u(l2p[gate.qubits[0]], gate.matrix))
            continue
        a, b = gate.qubits
        pa, pb = l2p[a], l2p[b]
        if not g.adjacent(pa, pb):
            path = g.shortest_path(pa, pb)
            for u, v in zip(path[:-2], path[1:-1]):
                out.extend(_swap(u, v))
                la, lb = p2l[u], p2l[v]
                p2l[u], p2l[v] = lb, la
                l2p[la], l2p[lb] = v, u
            pa = l2p[a]
        out.append(Gate.cnot(pa, pb))
    return Routed(Circuit(g.n, tuple(out), c.global_phase), tuple(l2p[: c.n]))


def route(c: Circuit, g: CouplingGraph) -> Circuit:
    return route_with_layout(c, g).circuit


def conforms(c: Circuit, g: CouplingGraph) -> bool:
    return all(g.adjacent(*gate.qubits) for gate in c.gates if gate.is_cnot)


def routing_overhead(c: Circuit, g: CouplingGraph) -> float:
    """Ratio of routed to unrouted CNOT counts (1.0 for CNOT-free circuits)."""
    before = count_gates(c).n_2Q
    after = count_gates(route(c, g)).n_2Q
    return after / before if before else 1.0


def circuit_from_gates(n: int, gates: Iterable[Gate], phase: float = 0.0) -> Circuit:
    return Circuit(n, tuple(gates), phase)
