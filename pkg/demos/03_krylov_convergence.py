"""Quantum Krylov energy error against subspace dimension, exact and Trotterized."""

import math

from qre.hamlib import dense_spectrum, hubbard
from qre.krylov import Threshold, convergence_scan, epperly_dimension

h = hubbard(2, 3)
levels = dense_spectrum(h)
t = math.pi / (levels.Emax - levels.E0)
scan = convergence_scan(h, 0.85, 14, [5, 10, 25], t=t, seed=7)

print(f"E0 = {levels.E0:.6f}, time step {t:.4f}")
print(" d   r=5        r=10       r=25       exact")
for d in range(1, 15):
    cells = []
    for r in (5, 10, 25, None):
        row = scan.column(r)[d - 1]
        cells.append(f"{row.error:.2e}" if row.solved else row.status[:9])
    print(f"{d:2d}   " + "   ".join(f"{c:>8}" for c in cells))
for r in (5, 10, 25, None):
    print("smallest chemically accurate d,", "exact" if r is None else f"r={r}", "->", scan.min_d(r))

# the convergence bound gives a (pessimistic) dimension estimate
print("bound suggests d ~", round(epperly_dimension(levels.gaps, 0.85, 1e-3), 1))

# thresholding keeps the solve alive once the overlap matrix turns singular
h = hubbard(2, 4)
plain = convergence_scan(h, 0.98, 24, seed=7)
cut = convergence_scan(h, 0.98, 24, seed=7, thr=Threshold(1e-4))
print("largest solvable d without threshold:", plain.max_solved_d(None), " with 1e-4:", cut.max_solved_d(None))
