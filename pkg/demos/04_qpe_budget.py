"""Trotter-step budget for single-ancilla QPE from the second-order energy shift."""

from qre.circuit import count_gates, synth_trotter_step
from qre.hamlib import ground_state, hubbard
from qre.qpe import phase_fit_shift, qpe_plan, v2_bound, v2_exact

for nx, ny in [(1, 3), (2, 2), (2, 3)]:
    h = hubbard(nx, ny, mu=0.3)
    _, psi = ground_state(h)
    exact = v2_exact(h, psi)
    print(f"{nx}x{ny}: shift exact {exact:+.5f}, bound {v2_bound(h):.3e}, eigenphase fit {phase_fit_shift(h):+.5f}")

h = hubbard(2, 3)
base = count_gates(synth_trotter_step(h, 1.0, 1, "cancel"))
for label, e1 in (("bound", None), ("exact", abs(v2_exact(h, ground_state(h)[1])))):
    p = qpe_plan(h, 1e-3, e1, base)
    print(f"{label:>5}: dt={p.dt:.4f}, n_T={p.n_T}, circuits={p.n_C}, CNOTs={p.n_2Q}")
