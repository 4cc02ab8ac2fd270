"""Commuting-group partitioning by sorted insertion, and shot-count estimates."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from .pauli import PauliSum

Relation = Literal["qubit-wise", "full"]
RELATIONS = ("qubit-wise", "full")


@dataclass(frozen=True)
class MeasurementGroups:
    relation: str
    groups: tuple[tuple[int, ...], ...]

    def __len__(self):
        return len(self.groups)

    @property
    def n_groups(self) -> int:
        return len(self.groups)


@dataclass(frozen=True)
class ShotEstimate:
    epsilon: float
    per_group_sigma: tuple[float, ...]
    total_shots: int


def sorted_order(h: PauliSum) -> list[int]:
    """Term indices by descending |coefficient|, ties by word string."""
    return sorted(
        range(len(h.terms)),
        key=lambda i: (-abs(h.terms[i].coefficient), str(h.terms[i].word)),
    )


class _QwcGroup:
    # a term fits iff it agrees with the group's letter wherever both act
    __slots__ = ("members", "x", "z", "support")

    def __init__(self):
        self.members: list[int] = []
        self.x = self.z = self.support = 0

    def fits(self, x: int, z: int) -> bool:
        overlap = (x | z) & self.support
        return (overlap & ((x ^ self.x) | (z ^ self.z))) == 0

    def add(self, idx: int, x: int, z: int):
        self.members.append(idx)
        self.x |= x
        self.z |= z
        self.support |= x | z


class _FullGroup:
    __slots__ = ("members", "xs", "zs")

    def __init__(self):
        self.members: list[int] = []
        self.xs: list[int] = []
        self.zs: list[int] = []

    def fits(self, x: int, z: int) -> bool:
        for gx, gz in zip(self.xs, self.zs):
            if ((x & gz) ^ (z & gx)).bit_count() & 1:
                return False
        return True

    def add(self, idx: int, x: int, z: int):
        self.members.append(idx)
        self.xs.append(x)
        self.zs.append(z)


def sorted_insertion_group(h: PauliSum, relation: Relation = "qubit-wise") -> MeasurementGroups:
    """Greedy first-fit grouping of the non-identity terms of ``h``.

    Terms are visited by descending |coefficient|; each joins the first
    existing group whose members are all compatible with it, or opens a new
    group. Indices refer to ``h.terms``.
    """
    if relation not in RELATIONS:
        raise ValueError(f"relation must be one of {RELATIONS}")
    group_cls = _QwcGroup if relation == "qubit-wise" else _FullGroup
    groups: list = []
    for idx in sorted_order(h):
        w = h.terms[idx].word
        for g in groups:
            if g.fits(w.x, w.z):
                g.add(idx, w.x, w.z)
                break
        else:
            g = group_cls()
            g.add(idx, w.x, w.z)
            groups.append(g)
    return MeasurementGroups(relation, tuple(tuple(g.members) for g in groups))


def _total_shots(sigmas: Sequence[float], epsilon: float) -> int:
    return int(math.ceil((math.fsum(sigmas) / epsilon) ** 2))


def shots_from_expectations(
    h: PauliSum, groups: MeasurementGroups, expectations: np.ndarray, epsilon: float
) -> ShotEstimate:
    """Shot estimate from per-term Pauli expectations (covariances neglected)."""
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    coeffs = h.coefficients
    expectations = np.asarray(expectations, dtype=float)
    variances = np.clip(1.0 - expectations**2, 0.0, None)
    sigmas = tuple(
        math.sqrt(math.fsum(coeffs[i] ** 2 * variances[i] for i in g)) for g in groups.groups
    )
    return ShotEstimate(epsilon, sigmas, _total_shots(sigmas, epsilon))


def estimate_shots(h: PauliSum, groups: MeasurementGroups, state, epsilon: float) -> ShotEstimate:
    """Shots to reach precision ``epsilon`` when measuring ``groups`` on ``state``."""
    from .sim import pauli_expectation, validate_state

    validate_state(state, h.n)
    expectations = np.array([pauli_expectation(state, t.word) for t in h.terms])
    return shots_from_expectations(h, groups, expectations, epsilon)


def maximally_mixed_shot_bound(h: PauliSum, groups: MeasurementGroups, epsilon: float) -> ShotEstimate:
    return shots_from_expectations(h, groups, np.zeros(len(h.terms)), epsilon)


def check_partition(h: PauliSum, groups: MeasurementGroups) -> None:
    """Raise ``AssertionError`` unless ``groups`` is a valid partition of ``h``."""
    from .pauli import commutes, qubit_wise_commutes

    pred = qubit_wise_commutes if groups.relation == "qubit-wise" else commutes
    seen = [i for g in groups.groups for i in g]
    assert sorted(seen) == list(range(len(h.terms))), "groups must cover every term once"
    for g in groups.groups:
        for a in range(len(g)):
            for b in range(a + 1, len(g)):
                wa, wb = h.terms[g[a]].word, h.terms[g[b]].word
                assert pred(wa, wb), f"{wa} and {wb} are incompatible"
