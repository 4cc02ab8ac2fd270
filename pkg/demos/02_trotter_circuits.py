"""Synthesize Trotter steps three ways and route them onto a heavy-hex device."""

import numpy as np

from qre.circuit import count_gates, heavy_hex_for, routing_overhead, synth_trotter_step
from qre.hamlib import hubbard
from qre.sim import StateVector, apply_circuit, exact_evolve

print("n x n Hubbard, CNOTs per Trotter step")
print("  n   naive  grouped  cancel")
for n in (2, 3, 4, 5):
    h = hubbard(n, n)
    counts = [count_gates(synth_trotter_step(h, 1.0, 1, s)).n_2Q for s in ("naive", "grouped", "cancel")]
    print(f"  {n}  {counts[0]:6d}  {counts[1]:7d}  {counts[2]:6d}")

# first-order error shrinks as r grows
h = hubbard(2, 2)
psi = StateVector.basis(4, "1001")  # two particles; one alone sees no Trotter error here
target = exact_evolve(h, 1.0, psi)
for r in (1, 2, 4, 8, 16):
    out = apply_circuit(psi, synth_trotter_step(h, 1.0, r, "cancel"))
    print(f"r={r:2d}  infidelity {1 - out.fidelity(target):.3e}")

# restricted connectivity costs extra SWAPs
for n in (2, 3, 4, 5):
    c = synth_trotter_step(hubbard(n, n), 1.0, 1, "cancel")
    print(f"{n}x{n}: heavy-hex CNOT overhead {routing_overhead(c, heavy_hex_for(n * n)):.2f}x")
