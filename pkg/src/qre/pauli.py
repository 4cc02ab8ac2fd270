"""Pauli word algebra and the Jordan-Wigner transform.

Words are stored as a pair of integer bitmasks (``x``, ``z``) where bit ``i``
refers to qubit ``i``. The letter on a qubit is ``I`` for (0, 0), ``X`` for
(1, 0), ``Z`` for (0, 1) and ``Y`` for (1, 1). In strings, character ``i`` is
qubit ``i`` (leftmost character is qubit 0).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

DROP_TOL = 1e-12

_PHASES = (1, 1j, -1, -1j)


class DimensionError(ValueError):
    """Operands act on different numbers of qubits."""


@dataclass(frozen=True, order=True)
class PauliWord:
    n: int
    x: int = 0
    z: int = 0

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("qubit count must be non-negative")
        full = (1 << self.n) - 1
        if (self.x | self.z) & ~full:
            raise DimensionError(f"mask exceeds {self.n} qubits")

    @classmethod
    def from_string(cls, letters: str) -> "PauliWord":
        x = z = 0
        for i, ch in enumerate(letters.upper()):
            if ch == "X":
                x |= 1 << i
            elif ch == "Z":
                z |= 1 << i
            elif ch == "Y":
                x |= 1 << i
                z |= 1 << i
            elif ch != "I":
                raise ValueError(f"invalid Pauli letter {ch!r}")
        return cls(len(letters), x, z)

    @classmethod
    def from_ops(cls, n: int, ops: dict[int, str]) -> "PauliWord":
        """Build a word from a sparse ``{qubit: letter}`` mapping."""
        letters = ["I"] * n
        for q, ch in ops.items():
            if not 0 <= q < n:
                raise DimensionError(f"qubit {q} out of range for n={n}")
            letters[q] = ch
        return cls.from_string("".join(letters))

    @classmethod
    def identity(cls, n: int) -> "PauliWord":
        return cls(n, 0, 0)

    def letter(self, q: int) -> str:
        return "IXZY"[((self.x >> q) & 1) | (((self.z >> q) & 1) << 1)]

    def __str__(self) -> str:
        return "".join(self.letter(q) for q in range(self.n))

    def __repr__(self) -> str:
        return f"PauliWord('{self}')"

    @property
    def support(self) -> int:
        return self.x | self.z

    @property
    def weight(self) -> int:
        return self.support.bit_count()

    @property
    def is_identity(self) -> bool:
        return self.support == 0

    def qubits(self) -> list[int]:
        s = self.support
        return [q for q in range(self.n) if (s >> q) & 1]

    def n_y(self) -> int:
        return (self.x & self.z).bit_count()

    def to_matrix(self) -> np.ndarray:
        """Dense ``2**n`` matrix, qubit 0 as the most significant tensor factor."""
        out = np.ones((1, 1), dtype=complex)
        for q in range(self.n):
            out = np.kron(out, _SINGLE[self.letter(q)])
        return out

    def __mul__(self, other: "PauliWord") -> tuple[complex, "PauliWord"]:
        return multiply(self, other)


_SINGLE = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def _check(a: PauliWord, b: PauliWord) -> None:
    if a.n != b.n:
        raise DimensionError(f"word sizes differ: {a.n} != {b.n}")


def multiply(a: PauliWord, b: PauliWord) -> tuple[complex, PauliWord]:
    """Return ``(phase, word)`` with ``a @ b == phase * word``."""
    _check(a, b)
    ax, az, bx, bz = a.x, a.z, b.x, b.z
    a_x, a_y, a_z = ax & ~az, ax & az, az & ~ax
    b_x, b_y, b_z = bx & ~bz, bx & bz, bz & ~bx
    # XY = iZ, YZ = iX, ZX = iY and the reversed products carry -i
    plus = ((a_x & b_y) | (a_y & b_z) | (a_z & b_x)).bit_count()
    minus = ((a_y & b_x) | (a_z & b_y) | (a_x & b_z)).bit_count()
    phase = _PHASES[(plus - minus) % 4]
    return phase, PauliWord(a.n, ax ^ bx, az ^ bz)


def commutes(a: PauliWord, b: PauliWord) -> bool:
    _check(a, b)
    return ((a.x & b.z) ^ (a.z & b.x)).bit_count() % 2 == 0


def qubit_wise_commutes(a: PauliWord, b: PauliWord) -> bool:
    _check(a, b)
    overlap = a.support & b.support
    return (overlap & ((a.x ^ b.x) | (a.z ^ b.z))) == 0


@dataclass(frozen=True)
class PauliTerm:
    coefficient: float
    word: PauliWord

    def __post_init__(self):
        if not np.isfinite(self.coefficient):
            raise ValueError("coefficient must be finite")

    @classmethod
    def from_string(cls, coefficient: float, letters: str) -> "PauliTerm":
        return cls(float(coefficient), PauliWord.from_string(letters))

    def __str__(self):
        return f"{self.coefficient:+.6g} {self.word}"


@dataclass(frozen=True)
class PauliSum:
    """Real-weighted sum of Pauli words with a separate identity offset.

    The constructor normalizes its input: duplicate words are merged in order
    of first appearance, identity words fold into ``identity_offset`` and
    coefficients with magnitude below ``drop_tol`` are removed.
    """

    n: int
    terms: tuple[PauliTerm, ...] = ()
    identity_offset: float = 0.0
    drop_tol: float = field(default=DROP_TOL, compare=False, repr=False)

    def __post_init__(self):
        merged: dict[PauliWord, float] = {}
        offset = float(self.identity_offset)
        for term in self.terms:
            if term.word.n != self.n:
                raise DimensionError(f"term {term.word} does not act on {self.n} qubits")
            if term.word.is_identity:
                offset += term.coefficient
            else:
                merged[term.word] = merged.get(term.word, 0.0) + term.coefficient
        kept = tuple(
            PauliTerm(c, w) for w, c in merged.items() if abs(c) >= self.drop_tol
        )
        if abs(offset) < self.drop_tol:
            offset = 0.0
        object.__setattr__(self, "terms", kept)
        object.__setattr__(self, "identity_offset", offset)

    @classmethod
    def from_dict(cls, n: int, coeffs: dict, identity_offset: float = 0.0) -> "PauliSum":
        """Build from ``{word_or_string: coefficient}``."""
        terms = []
        for w, c in coeffs.items():
            word = PauliWord.from_string(w) if isinstance(w, str) else w
            terms.append(PauliTerm(float(c), word))
        return cls(n, tuple(terms), identity_offset)

    @classmethod
    def from_terms(cls, n: int, terms: Iterable[PauliTerm], identity_offset: float = 0.0):
        return cls(n, tuple(terms), identity_offset)

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self) -> Iterator[PauliTerm]:
        return iter(self.terms)

    @property
    def coefficients(self) -> np.ndarray:
        return np.array([t.coefficient for t in self.terms], dtype=float)

    @property
    def words(self) -> list[PauliWord]:
        return [t.word for t in self.terms]

    def as_dict(self) -> dict[str, float]:
        return {str(t.word): t.coefficient for t in self.terms}

    def __add__(self, other: "PauliSum") -> "PauliSum":
        if other.n != self.n:
            raise DimensionError("cannot add sums on different qubit counts")
        return PauliSum(
            self.n, self.terms + other.terms, self.identity_offset + other.identity_offset
        )

    def scale(self, factor: float) -> "PauliSum":
        return PauliSum(
            self.n,
            tuple(PauliTerm(factor * t.coefficient, t.word) for t in self.terms),
            factor * self.identity_offset,
        )

    def without_identity(self) -> "PauliSum":
        return PauliSum(self.n, self.terms)

    def to_matrix(self) -> np.ndarray:
        return to_sparse(self).toarray()

    def __str__(self):
        lines = [f"PauliSum(n={self.n}, offset={self.identity_offset:+.6g})"]
        lines += [f"  {t}" for t in self.terms]
        return "\n".join(lines)


def _basis_action(n: int, x: int, z: int, ny: int):
    """Columns, rows and values of a Pauli word as a permutation-with-phase.

    ``P |k> = i**ny * (-1)**popcount(k & z) |k ^ x>`` in the little-endian
    mask convention. Basis indices are big-endian (qubit 0 is the most
    significant bit), so masks are bit-reversed first.
    """
    xb = _reverse_bits(x, n)
    zb = _reverse_bits(z, n)
    k = np.arange(1 << n, dtype=np.int64)
    parity = np.bitwise_count(k & zb) & 1
    vals = (1j**ny) * (1 - 2 * parity.astype(float))
    return k, k ^ xb, vals


def _reverse_bits(mask: int, n: int) -> int:
    out = 0
    for q in range(n):
        if (mask >> q) & 1:
            out |= 1 << (n - 1 - q)
    return out


def to_sparse(h: PauliSum):
    """Sparse CSR matrix of ``h`` including the identity offset."""
    from scipy import sparse

    dim = 1 << h.n
    rows, cols, vals = [], [], []
    for t in h.terms:
        k, flipped, v = _basis_action(h.n, t.word.x, t.word.z, t.word.n_y())
        cols.append(k)
        rows.append(flipped)
        vals.append(t.coefficient * v)
    if h.identity_offset:
        k = np.arange(dim)
        rows.append(k)
        cols.append(k)
        vals.append(np.full(dim, h.identity_offset, dtype=complex))
    if not rows:
        return sparse.csr_matrix((dim, dim), dtype=complex)
    return sparse.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(dim, dim),
    )


def apply_word(word: PauliWord, vec: np.ndarray) -> np.ndarray:
    """Apply a Pauli word to a statevector (or to each column of a matrix)."""
    k, flipped, v = _basis_action(word.n, word.x, word.z, word.n_y())
    out = np.empty_like(vec, dtype=complex)
    if vec.ndim == 1:
        out[flipped] = v * vec[k]
    else:
        out[flipped] = v[:, None] * vec[k]
    return out


# ---------------------------------------------------------------- fermions


@dataclass(frozen=True)
class FermionTerm:
    """Product of ladder operators, applied right to left like the written string.

    ``factors`` holds ``(mode, dagger)`` pairs in written order, so
    ``((0, True), (1, False))`` is :math:`a^\\dagger_0 a_1`.
    """

    factors: tuple[tuple[int, bool], ...]
    coefficient: float = 1.0

    def __post_init__(self):
        if len(self.factors) > 4:
            raise ValueError("only quadratic and quartic fermion terms are supported")
        object.__setattr__(
            self, "factors", tuple((int(m), bool(d)) for m, d in self.factors)
        )

    @classmethod
    def number(cls, mode: int, coefficient: float = 1.0) -> "FermionTerm":
        return cls(((mode, True), (mode, False)), coefficient)

    @classmethod
    def hop(cls, i: int, j: int, coefficient: float = 1.0) -> "FermionTerm":
        return cls(((i, True), (j, False)), coefficient)

    @classmethod
    def density_density(cls, i: int, j: int, coefficient: float = 1.0) -> "FermionTerm":
        return cls(((i, True), (i, False), (j, True), (j, False)), coefficient)


def _ladder(mode: int, dagger: bool, n: int) -> dict[PauliWord, complex]:
    """JW image of a single ladder operator as ``{word: coefficient}``."""
    tail = (1 << mode) - 1
    x_word = PauliWord(n, 1 << mode, tail)
    y_word = PauliWord(n, 1 << mode, tail | (1 << mode))
    sign = -1 if dagger else 1
    return {x_word: 0.5, y_word: 0.5j * sign}


def _product(a: dict, b: dict) -> dict:
    out: dict[PauliWord, complex] = {}
    for wa, ca in a.items():
        for wb, cb in b.items():
            phase, w = multiply(wa, wb)
            out[w] = out.get(w, 0) + phase * ca * cb
    return out


def jordan_wigner_complex(
    terms: FermionTerm | Iterable[FermionTerm], n_modes: int
) -> dict[PauliWord, complex]:
    """JW image of a fermionic combination with complex coefficients."""
    if isinstance(terms, FermionTerm):
        terms = [terms]
    total: dict[PauliWord, complex] = {}
    for term in terms:
        for mode, _ in term.factors:
            if not 0 <= mode < n_modes:
                raise IndexError(f"mode {mode} out of range for {n_modes} modes")
        acc = {PauliWord.identity(n_modes): complex(term.coefficient)}
        for mode, dagger in term.factors:
            acc = _product(acc, _ladder(mode, dagger, n_modes))
        for w, c in acc.items():
            total[w] = total.get(w, 0) + c
    return total


def jordan_wigner(
    terms: FermionTerm | Iterable[FermionTerm], n_modes: int, drop_tol: float = DROP_TOL
) -> PauliSum:
    """Map a Hermitian fermionic combination to a real ``PauliSum``.

    Raises ``ValueError`` if the image has imaginary coefficients above
    ``drop_tol`` (the combination was not Hermitian).
    """
    image = jordan_wigner_complex(terms, n_modes)
    bad = [w for w, c in image.items() if abs(c.imag) > drop_tol]
    if bad:
        raise ValueError(f"non-Hermitian combination: imaginary weight on {bad[0]}")
    return PauliSum(
        n_modes,
        tuple(PauliTerm(c.real, w) for w, c in image.items()),
        drop_tol=drop_tol,
    )


def commutator(a: PauliTerm, b: PauliTerm) -> tuple[complex, PauliWord] | None:
    """``[a, b]`` for single terms: ``None`` if they commute, else ``(coef, word)``."""
    if commutes(a.word, b.word):
        return None
    phase, w = multiply(a.word, b.word)
    return 2 * phase * a.coefficient * b.coefficient, w


def random_word(n: int, rng: np.random.Generator) -> PauliWord:
    x = int(rng.integers(0, 1 << n)) if n else 0
    z = int(rng.integers(0, 1 << n)) if n else 0
    return PauliWord(n, x, z)


def words_from_strings(strings: Sequence[str]) -> list[PauliWord]:
    return [PauliWord.from_string(s) for s in strings]
