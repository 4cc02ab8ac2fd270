"""Resource rows for the three algorithms, plus the large-system arithmetic."""

from qre.adapt import adapt_resources, adapt_run, ansatz_gate_count, build_qe_pool, reference_state
from qre.circuit import GateCount, count_gates, synth_trotter_step
from qre.grouping import sorted_insertion_group
from qre.hamlib import ground_state, hubbard
from qre.krylov import convergence_scan, krylov_resources
from qre.qpe import qpe_plan, qpe_resources_from_steps
from qre.report import ResourceReport, SystemInfo, format_table

h = hubbard(2, 2)
groups = sorted_insertion_group(h)
base = count_gates(synth_trotter_step(h, 1.0, 1, "cancel"))
e0 = ground_state(h)[0]

ad = adapt_run(h, reference_state(h.n, 1), build_qe_pool(h.n), E0_ref=e0)
scan = convergence_scan(h, 0.85, 10, [5, 10, 25], seed=7)
n_T = next(r for r in (5, 10, 25) if scan.min_d(r) is not None)
plan = qpe_plan(h, 1e-3, trotter_base=base)
reports = [
    adapt_resources(h.n, len(h.terms), ansatz_gate_count(ad).n_2Q),
    krylov_resources(scan.min_d(None), groups.n_groups, base, n_T, n=h.n),
    ResourceReport("qpe", plan.n_Q, plan.n_C, plan.n_2Q, provenance={"n_2Q": "estimated-upper"}),
]
print(format_table(SystemInfo("hubbard_2x2", h.n, len(h.terms), groups.n_groups), reports))

# the same arithmetic at the scale of a 44-qubit molecular Hamiltonian
step = GateCount(n_1Q=6_050_622, n_2Q=13_016_100)
print("Krylov circuits, d=144, 2737 groups:", krylov_resources(144, 2737, step, 50).n_C)
print("Krylov CNOTs, 50 controlled steps:   ", krylov_resources(144, 2737, step, 50).n_2Q)
print("QPE CNOTs, 2.2e8 controlled steps:   ", f"{qpe_resources_from_steps(44, 2.2e8, step).n_2Q:.3e}")
