"""Build small Hubbard models, group their Pauli terms and estimate measurement shots."""

import numpy as np

from qre.adapt import reference_state
from qre.grouping import estimate_shots, maximally_mixed_shot_bound, sorted_insertion_group
from qre.hamlib import dense_spectrum, format_pauli_sum, ground_state, hubbard
from qre.sim import StateVector

# the two-site model is small enough to read term by term
h = hubbard(1, 2)
print(format_pauli_sum(h))
print("spectrum:", np.round(dense_spectrum(h).eigenvalues, 6))

# grouping shrinks the number of distinct measurement settings
for nx, ny in [(2, 2), (2, 3), (3, 3)]:
    h = hubbard(nx, ny)
    qwc = sorted_insertion_group(h, "qubit-wise")
    full = sorted_insertion_group(h, "full")
    print(f"{nx}x{ny}: {len(h.terms)} terms, {qwc.n_groups} qubit-wise groups, {full.n_groups} fully commuting groups")

# shot counts at eps = 3e-3 for three input states
eps = 3e-3
h = hubbard(2, 3)
groups = sorted_insertion_group(h)
_, psi = ground_state(h)
print("maximally mixed:", maximally_mixed_shot_bound(h, groups, eps).total_shots)
print("product state:  ", estimate_shots(h, groups, reference_state(h.n, 2), eps).total_shots)
print("ground state:   ", estimate_shots(h, groups, StateVector(h.n, psi), eps).total_shots)
