"""Resource rows in the layout of the per-algorithm comparison table."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

TABLE_COLUMNS = ("system", "n", "N_terms", "N_groups", "algorithm", "n_Q", "n_C", "n_2Q", "provenance")
ALGORITHM_ORDER = ("adapt", "krylov", "qpe")
PROVENANCE = ("exact", "estimated-lower", "estimated-upper")


@dataclass(frozen=True)
class ResourceReport:
    algorithm: str
    n_Q: int | None
    n_C: int | None
    n_2Q: int | None
    n_1Q: int | None = None
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        for name in ("n_Q", "n_C", "n_2Q", "n_1Q"):
            value = getattr(self, name)
            if value is not None and value < 0:
                raise ValueError(f"{name} must be non-negative")
        for key, tag in self.provenance.items():
            if tag not in PROVENANCE:
                raise ValueError(f"unknown provenance {tag!r} for {key}")

    def provenance_text(self) -> str:
        """``field=tag`` pairs; fields without an entry are exact."""
        return ";".join(f"{k}={v}" for k, v in sorted(self.provenance.items())) or "exact"


@dataclass(frozen=True)
class SystemInfo:
    system: str
    n: int
    N_terms: int
    N_groups: int


def table_rows(info: SystemInfo, reports: list[ResourceReport]) -> list[dict]:
    by_algo = {r.algorithm: r for r in reports}
    rows = []
    for algo in ALGORITHM_ORDER:
        if algo not in by_algo:
            continue
        r = by_algo[algo]
        rows.append({
            "system": info.system,
            "n": info.n,
            "N_terms": info.N_terms,
            "N_groups": info.N_groups,
            "algorithm": algo,
            "n_Q": "" if r.n_Q is None else r.n_Q,
            "n_C": "" if r.n_C is None else r.n_C,
            "n_2Q": "" if r.n_2Q is None else r.n_2Q,
            "provenance": r.provenance_text(),
        })
    return rows


def format_table(info: SystemInfo, reports: list[ResourceReport]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=TABLE_COLUMNS, lineterminator="\n")
    w.writeheader()
    w.writerows(table_rows(info, reports))
    return buf.getvalue()
