"""ADAPT-VQE with a qubit-excitation pool on the 2x2 Hubbard model."""

from qre.adapt import adapt_run, ansatz_gate_count, build_qe_pool, reference_state
from qre.hamlib import ground_state, hubbard

h = hubbard(2, 2)
e0, _ = ground_state(h)
pool = build_qe_pool(h.n)
print(f"{len(pool)} pool operators, E0 = {e0:.6f}")

state = adapt_run(h, reference_state(h.n, 1), pool, E0_ref=e0)
for row in state.trace:
    print(f"iter {row['iter']}: add {row['selected_label']:<10} grad {row['gradient']:+.4f}  "
          f"E-E0 {row['energy'] - e0:.2e}  CNOTs {row['n_2q_cumulative']}")
print("status:", state.status, " two-qubit gates:", ansatz_gate_count(state).n_2Q)
