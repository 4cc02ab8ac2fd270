"""Acceptance suite: one test per criterion, each printing a single PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v`` (lines appear in the summary
section) or ``python3 tests/test_acceptance.py``.
"""

import math
import sys
import time
from pathlib import Path

import numpy as np
from scipy.linalg import expm

sys.path.insert(0, str(Path(__file__).parent))

from conftest import ACCEPTANCE_LINES, CORPUS, random_hamiltonian  # noqa: E402

from qre.adapt import (  # noqa: E402
    PoolOperator,
    adapt_run,
    build_qe_pool,
    energy_and_gradient,
    operator_gradient,
    reference_state,
)
from qre.circuit import (  # noqa: E402
    GateCount,
    controlled_trotter_cost,
    count_gates,
    heavy_hex_for,
    route_with_layout,
    routing_overhead,
    synth_trotter_step,
    term_order,
)
from qre.grouping import (  # noqa: E402
    check_partition,
    estimate_shots,
    maximally_mixed_shot_bound,
    shots_from_expectations,
    sorted_insertion_group,
)
from qre.hamlib import dense_spectrum, ground_state, hubbard  # noqa: E402
from qre.krylov import Threshold, convergence_scan, krylov_resources  # noqa: E402
from qre.pauli import PauliSum, to_sparse  # noqa: E402
from qre.qpe import qpe_circuits, qpe_plan, v2_bound, v2_exact  # noqa: E402
from qre.sim import StateVector, apply_circuit, permute_qubits  # noqa: E402

CHEM = 1e-3


def record(n, ok, detail, started):
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'} ({time.perf_counter() - started:.2f}s) {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def pauli_matrix(letters):
    single = {
        "I": np.eye(2),
        "X": np.array([[0, 1], [1, 0]]),
        "Y": np.array([[0, -1j], [1j, 0]]),
        "Z": np.diag([1, -1]),
    }
    out = np.array([[1.0 + 0j]])
    for c in letters:
        out = np.kron(out, single[c])
    return out


def exponential_product(h, t, order):
    u = np.eye(1 << h.n, dtype=complex)
    for i in order:
        term = h.terms[i]
        u = expm(-1j * t * term.coefficient * pauli_matrix(str(term.word))) @ u
    return np.exp(-1j * h.identity_offset * t) * u


def test_criterion_1_resource_arithmetic():
    t0 = time.perf_counter()
    n_c1 = krylov_resources(144, 2737, GateCount(1, 1), 1).n_C
    n_c2 = krylov_resources(144, 2692, GateCount(1, 1), 1).n_C
    qpe_nc = qpe_circuits(1e-3)
    n2q = controlled_trotter_cost(2.2e8, GateCount(n_1Q=6_050_622, n_2Q=13_016_100))
    checks = {
        "n_C(2737)=56733696": n_c1 == 56_733_696,
        "n_C(2737)~5.7e7": round(n_c1 / 1e7, 1) == 5.7,
        "n_C(2692)~5.6e7": round(n_c2 / 1e7, 1) == 5.6,
        "qpe n_C=10": qpe_nc == 10,
        "qpe n_2Q within 10% of 2.0e16": abs(n2q / 2.0e16 - 1) <= 0.10,
    }
    bad = [k for k, v in checks.items() if not v]
    record(1, not bad, f"n_C={n_c1} (144^2*2737; 56733696 is 144^2*2736), {n_c2}; qpe n_2Q={n2q:.3e}; failed={bad}", t0)


def test_criterion_2_krylov_correctness():
    t0 = time.perf_counter()
    parts = []
    ok = True
    for nx, ny in [(1, 2), (2, 2)]:
        h = hubbard(nx, ny, t=1.0, U=4.0, mu=0.0)
        scan = convergence_scan(h, 0.85, 8, seed=7)
        d = scan.min_d(None, CHEM)
        ok &= d is not None and d <= 8
        parts.append(f"{nx}x{ny}: E0={scan.E0:.6f} min_d={d}")
    record(2, ok, "; ".join(parts), t0)


def test_criterion_3_trotter_shape():
    t0 = time.perf_counter()
    h = hubbard(2, 3)
    levels = dense_spectrum(h)
    # time step set by the spectral range so the subspace reaches chemical accuracy
    t = math.pi / (levels.Emax - levels.E0)
    steps = [5, 10, 25]
    scan = convergence_scan(h, 0.85, 16, steps, t=t, seed=7, strategy="naive")
    exact = {r.d: r for r in scan.column(None)}
    violations = []
    for r in steps:
        for row in scan.column(r):
            ref = exact[row.d]
            if row.solved and ref.solved and row.error < ref.error - 1e-8:
                violations.append((r, row.d, ref.error - row.error))
    min_ds = [scan.min_d(r, CHEM) for r in steps + [None]]
    # an unreached accuracy counts as infinite dimension
    as_num = [math.inf if d is None else d for d in min_ds]
    part_b = all(b <= a for a, b in zip(as_num, as_num[1:]))
    part_a = not violations
    worst = max((v[2] for v in violations), default=0.0)
    detail = (f"(a) trotter>=exact-1e-8: {'PASS' if part_a else 'FAIL'} "
              f"[{len(violations)} violations, worst {worst:.2e}, at (r,d)={[v[:2] for v in violations]}]; "
              f"(b) min_d over r=5,10,25,exact = {min_ds}: {'PASS' if part_b else 'FAIL'}")
    record(3, part_a and part_b, detail, t0)


def test_criterion_4_thresholding():
    t0 = time.perf_counter()
    h = hubbard(2, 4)
    plain = convergence_scan(h, 0.98, 24, seed=7)
    cut = convergence_scan(h, 0.98, 24, seed=7, thr=Threshold(1e-4))
    solved = [r.energy for s in (plain, cut) for r in s.rows if r.solved]
    variational = all(e >= plain.E0 - 1e-6 for e in solved)
    a, b = plain.max_solved_d(None), cut.max_solved_d(None)
    record(4, b > a and variational,
           f"max solved d: none={a}, delta=1e-4 -> {b}; min(E)-E0={min(solved) - plain.E0:.3e}", t0)


def test_criterion_5_trotter_synthesis():
    t0 = time.perf_counter()
    worst = 0.0
    for _, h in CORPUS:
        if h.n > 6:
            continue
        for strategy in ("naive", "grouped", "cancel"):
            u = synth_trotter_step(h, 0.7, 1, strategy).unitary()
            ref = exponential_product(h, 0.7, term_order(h, strategy))
            worst = max(worst, np.linalg.norm(u - ref, 2))
    counts = {}
    ordered = True
    for n in (2, 3, 4):
        h = hubbard(n, n)
        c = [count_gates(synth_trotter_step(h, 1.0, 1, s)).n_2Q for s in ("naive", "grouped", "cancel")]
        counts[f"{n}x{n}"] = c
        ordered &= c[2] <= c[1] <= c[0]
    record(5, worst <= 1e-10 and ordered,
           f"max ||U - oracle|| = {worst:.2e}; CNOT naive/grouped/cancel = {counts}", t0)


def test_criterion_6_qpe_bound():
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)
    dominated = 0
    for _ in range(100):
        n = int(rng.integers(1, 5))
        h = random_hamiltonian(rng, n, int(rng.integers(1, 11)))
        if len(h.terms) == 0:
            h = PauliSum.from_dict(n, {"Z" + "I" * (n - 1): 1.0})
        dominated += v2_bound(h) >= abs(v2_exact(h, ground_state(h)[1]))
    commuting = [
        PauliSum.from_dict(3, {"ZII": 0.4, "IZZ": -1.2, "ZZZ": 0.3}),
        PauliSum.from_dict(2, {"XX": 1.0, "YY": 0.5, "ZZ": -0.7}),
        hubbard(2, 2, t=0.0),
    ]
    zero = max(abs(v2_exact(h, ground_state(h)[1])) for h in commuting)
    doubling = True
    for eps in (1e-2, 1e-3, 1e-4):
        a, b = qpe_plan(hubbard(2, 3), eps), qpe_plan(hubbard(2, 3), eps / 4)
        doubling &= abs(b.n_T - 2 * a.n_T) <= 1 and math.isclose(b.dt, a.dt / 2)
    record(6, dominated == 100 and zero <= 1e-12 and doubling,
           f"dominance {dominated}/100; commuting max|V2|={zero:.1e}; quartering eps doubles n_T: {doubling}", t0)


def test_criterion_7_adapt():
    t0 = time.perf_counter()
    x = PauliSum.from_dict(1, {"X": 1.0})
    y = PoolOperator(PauliSum.from_dict(1, {"Y": 1.0}), "y0")
    closed = adapt_run(x, StateVector.zero(1), [y], grad_tol=1e-8)
    closed_ok = abs(closed.energy + 1) <= 1e-6 and abs(closed.thetas[0] - math.pi / 4) <= 1e-6

    h12 = hubbard(1, 2)
    e12 = ground_state(h12)[0]
    s12 = adapt_run(h12, reference_state(2, 1), build_qe_pool(2), E0_ref=e12)

    h = hubbard(2, 2)
    e0 = ground_state(h)[0]
    ref = reference_state(4, 1)
    pool = build_qe_pool(4)
    s = adapt_run(h, ref, pool, E0_ref=e0)
    energies = [row["energy"] for row in s.trace]
    monotone = all(b <= a + 1e-12 for a, b in zip(energies, energies[1:]))

    # gradients against central differences, on the final ansatz state and on its parameters
    hm = to_sparse(h).toarray()
    thetas = s.thetas
    fd_err = 0.0
    psi = ref.amplitudes
    for op, th in s.ansatz:
        psi = op.apply_exp(psi, th)
    for op in pool:
        e = lambda a: np.vdot(op.apply_exp(psi, a), hm @ op.apply_exp(psi, a)).real
        fd_err = max(fd_err, abs(operator_gradient(h, psi, op) - (e(1e-5) - e(-1e-5)) / 2e-5))
    _, g = energy_and_gradient(hm, ref, s.operators, thetas)
    for k in range(len(thetas)):
        step = np.zeros(len(thetas))
        step[k] = 1e-5
        fd = (energy_and_gradient(hm, ref, s.operators, thetas + step)[0]
              - energy_and_gradient(hm, ref, s.operators, thetas - step)[0]) / 2e-5
        fd_err = max(fd_err, abs(g[k] - fd))
    ok = closed_ok and abs(s12.energy - e12) <= CHEM and abs(s.energy - e0) <= CHEM and monotone and fd_err <= 1e-6
    record(7, ok,
           f"closed form E={closed.energy:.8f} theta={closed.thetas[0]:.8f}; 1x2 |dE|={abs(s12.energy - e12):.1e}; "
           f"2x2 |dE|={abs(s.energy - e0):.1e} in {s.iterations} iterations, monotone={monotone}, max FD diff={fd_err:.1e}", t0)


def test_criterion_8_grouping_and_shots():
    t0 = time.perf_counter()
    valid = mm_equal = True
    for _, h in CORPUS:
        for relation in ("qubit-wise", "full"):
            g = sorted_insertion_group(h, relation)
            try:
                check_partition(h, g)
            except ValueError:
                valid = False
            mm = maximally_mixed_shot_bound(h, g, 3e-3)
            mm_equal &= mm == shots_from_expectations(h, g, np.zeros(len(h.terms)), 3e-3)
    # a diagonal Hamiltonian and a basis state: every term has a sharp value
    diag = hubbard(2, 3, t=0.0, mu=0.3)
    zero_shots = all(
        estimate_shots(diag, sorted_insertion_group(diag), StateVector.basis(6, bits), 3e-3).total_shots == 0
        for bits in ("000000", "101010", "110011", "111111")
    )
    record(8, valid and mm_equal and zero_shots,
           f"partitions valid: {valid}; MM == zeroed estimate: {mm_equal}; eigenstate shots zero: {zero_shots}; "
           "44-qubit files not present, ingestion part not run", t0)


def test_criterion_9_routing():
    t0 = time.perf_counter()
    rng = np.random.default_rng(9)
    perm_ok = True
    overheads = {}
    for name, h in CORPUS:
        if h.n > 5:
            continue
        c = synth_trotter_step(h, 0.5, 1, "cancel")
        g = heavy_hex_for(h.n)
        routed = route_with_layout(c, g)
        for _ in range(2):
            v = rng.standard_normal(1 << h.n) + 1j * rng.standard_normal(1 << h.n)
            s = StateVector(h.n, v / np.linalg.norm(v))
            want = permute_qubits(apply_circuit(s, c), routed.layout, g.n)
            got = apply_circuit(permute_qubits(s, range(h.n), g.n), routed.circuit)
            perm_ok &= np.linalg.norm(want.amplitudes - got.amplitudes) <= 1e-10
        if count_gates(c).n_2Q:
            overheads[name] = routing_overhead(c, g)
    for n in (2, 3, 4):
        overheads[f"hubbard_{n}x{n}"] = routing_overhead(synth_trotter_step(hubbard(n, n), 1.0), heavy_hex_for(n * n))
    big = routing_overhead(synth_trotter_step(hubbard(5, 5), 1.0), heavy_hex_for(25))
    at_least_one = all(v >= 1 for v in overheads.values()) and big >= 1
    record(9, perm_ok and at_least_one and big > 1.5,
           f"permutation oracle: {perm_ok}; min overhead {min(overheads.values()):.2f}; 5x5 Hubbard overhead {big:.2f}", t0)


if __name__ == "__main__":
    failed = 0
    for name, fn in list(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except AssertionError:
                failed += 1
    sys.exit(1 if failed else 0)
