"""Optional: plot a Krylov scan CSV written by ``qre krylov scan``. Needs matplotlib."""

import argparse
from pathlib import Path

import matplotlib.pyplot as plt

from qre.krylov import read_scan_csv

parser = argparse.ArgumentParser()
parser.add_argument("csv")
parser.add_argument("-o", "--output", default="krylov.png")
args = parser.parse_args()

rows = read_scan_csv(Path(args.csv).read_text())
fig, ax = plt.subplots(figsize=(5, 3.5))
for nt in dict.fromkeys(r.n_trotter for r in rows):
    col = [r for r in rows if r.n_trotter == nt and r.solved and r.error > 0]
    ax.semilogy([r.d for r in col], [r.error for r in col], "o-", label="exact" if nt is None else f"r={nt}")
ax.axhline(1e-3, color="gray", ls="--", lw=1)
ax.set_xlabel("subspace dimension d")
ax.set_ylabel("E - E0")
ax.legend()
fig.tight_layout()
fig.savefig(args.output, dpi=150)
print("wrote", args.output)
