"""N-qubit Pauli strings in a two-bit-per-qubit encoding.

A Pauli string is stored as a pair of integer bit masks ``(x, z)`` plus a
phase exponent ``k`` so that the operator is ``i**k`` times the tensor product
of the single-qubit letters. Qubit ``j`` (1-based, leftmost in text) lives in
bit ``j - 1`` of each mask. The letter encoding is

====== ===== =====
letter x-bit z-bit
====== ===== =====
I      0     0
X      1     0
Z      0     1
Y      1     1
====== ===== =====

Phase bookkeeping is exact integer arithmetic modulo 4.

The generators of the exponentially enhanced strategy come from expanding
``(X + iY) ⊗ ... ⊗ (X + iY)`` into its Hermitian part ``H`` and anti-Hermitian
part ``iA``. Each is a sum of ``2**(N-1)`` mutually commuting strings made of
X and Y letters only; :func:`generate_terms` enumerates them.
"""

from __future__ import annotations

import enum
import itertools
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .exceptions import DimensionMismatch, InvalidInput, SizeLimitExceeded

MAX_ENUMERATION_QUBITS = 24
MAX_DENSE_QUBITS = 12

_PHASE_PREFIX = {0: "", 1: "i", 2: "-", 3: "-i"}
_PREFIX_PHASE = {v: k for k, v in _PHASE_PREFIX.items()}
_LABEL_RE = re.compile(r"^(-i|-|i|\+|)([IXYZ]+)$")

_LETTER_BITS = {"I": (0, 0), "X": (1, 0), "Z": (0, 1), "Y": (1, 1)}
_BITS_LETTER = {v: k for k, v in _LETTER_BITS.items()}

_SINGLE = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


class Generator(str, enum.Enum):
    """Which part of the expansion a term set belongs to."""

    H = "H"
    A = "A"


@dataclass(frozen=True)
class PauliString:
    """Phase times a tensor product of single-qubit Pauli letters.

    Parameters
    ----------
    n_qubits : int
        Number of qubits.
    x, z : int
        Bit masks; bit ``j-1`` describes qubit ``j``.
    phase_exp : int
        Global phase is ``1j ** phase_exp``; reduced modulo 4.
    """

    n_qubits: int
    x: int
    z: int
    phase_exp: int = 0

    def __post_init__(self):
        if self.n_qubits < 1:
            raise InvalidInput(f"n_qubits must be positive, got {self.n_qubits}")
        mask = (1 << self.n_qubits) - 1
        if self.x & ~mask or self.z & ~mask or self.x < 0 or self.z < 0:
            raise InvalidInput("bit masks exceed n_qubits")
        object.__setattr__(self, "phase_exp", self.phase_exp % 4)

    @classmethod
    def from_letters(cls, letters: Iterable[str], phase_exp: int = 0) -> "PauliString":
        letters = list(letters)
        x = z = 0
        for j, letter in enumerate(letters):
            try:
                xb, zb = _LETTER_BITS[letter]
            except KeyError:
                raise InvalidInput(f"unknown Pauli letter {letter!r}") from None
            x |= xb << j
            z |= zb << j
        return cls(len(letters), x, z, phase_exp)

    @classmethod
    def from_label(cls, label: str) -> "PauliString":
        """Parse text such as ``"-YXY"`` or ``"iZ"``."""
        m = _LABEL_RE.match(label.strip())
        if m is None:
            raise InvalidInput(f"cannot parse Pauli label {label!r}")
        prefix = "" if m.group(1) == "+" else m.group(1)
        return cls.from_letters(m.group(2), _PREFIX_PHASE[prefix])

    @classmethod
    def identity(cls, n_qubits: int) -> "PauliString":
        return cls(n_qubits, 0, 0, 0)

    @property
    def letters(self) -> str:
        return "".join(
            _BITS_LETTER[((self.x >> j) & 1, (self.z >> j) & 1)]
            for j in range(self.n_qubits)
        )

    @property
    def phase(self) -> complex:
        return (1, 1j, -1, -1j)[self.phase_exp]

    @property
    def n_y(self) -> int:
        """Number of Y letters."""
        return (self.x & self.z).bit_count()

    @property
    def is_hermitian(self) -> bool:
        return self.phase_exp in (0, 2)

    @property
    def label(self) -> str:
        return _PHASE_PREFIX[self.phase_exp] + self.letters

    def __str__(self) -> str:
        return self.label

    def __repr__(self) -> str:
        return f"PauliString({self.label!r})"

    def __mul__(self, other: "PauliString") -> "PauliString":
        return multiply(self, other)

    def __neg__(self) -> "PauliString":
        return PauliString(self.n_qubits, self.x, self.z, self.phase_exp + 2)


@dataclass(frozen=True)
class SignVector:
    """A choice r_j = +1 (X letter) or -1 (Y letter) for every qubit."""

    r: tuple[int, ...]

    def __post_init__(self):
        r = tuple(int(v) for v in self.r)
        if not r or any(v not in (1, -1) for v in r):
            raise InvalidInput(f"sign vector entries must be +1 or -1, got {self.r!r}")
        object.__setattr__(self, "r", r)

    def __len__(self) -> int:
        return len(self.r)

    @property
    def n_minus(self) -> int:
        return n_minus(self)


@dataclass(frozen=True)
class TermSet:
    """The ``2**(N-1)`` Pauli strings that sum to the generator ``H`` or ``A``."""

    n_qubits: int
    terms: tuple[PauliString, ...]
    kind: Generator

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)


def _check_same_size(p: PauliString, q: PauliString) -> None:
    if p.n_qubits != q.n_qubits:
        raise DimensionMismatch(f"{p.n_qubits}-qubit vs {q.n_qubits}-qubit Pauli string")


def multiply(p: PauliString, q: PauliString) -> PauliString:
    """Operator product ``p @ q`` with the phase tracked exactly.

    Each string is rewritten as ``i**(k + n_y) X^x Z^z``; moving ``Z^z1`` past
    ``X^x2`` costs a sign ``(-1)**|z1 & x2|``.
    """
    _check_same_size(p, q)
    x = p.x ^ q.x
    z = p.z ^ q.z
    k = (
        p.phase_exp
        + q.phase_exp
        + p.n_y
        + q.n_y
        + 2 * (p.z & q.x).bit_count()
        - (x & z).bit_count()
    )
    return PauliString(p.n_qubits, x, z, k)


def commutes(p: PauliString, q: PauliString) -> bool:
    """True iff the symplectic inner product of ``p`` and ``q`` vanishes."""
    _check_same_size(p, q)
    return ((p.x & q.z).bit_count() + (p.z & q.x).bit_count()) % 2 == 0


def n_minus(r: SignVector | Sequence[int]) -> int:
    """Number of entries equal to -1, i.e. the number of Y letters."""
    signs = r.r if isinstance(r, SignVector) else r
    return sum((1 - v) // 2 for v in signs)


def term_from_signs(r: SignVector | Sequence[int], kind: Generator | str) -> PauliString:
    """The signed string ``H(r)`` or ``A(r)``.

    Letters are X where ``r_j = +1`` and Y where ``r_j = -1``; the sign is
    ``(-1)**(N_-/2)`` for H and ``(-1)**((N_- - 1)/2)`` for A.
    """
    if not isinstance(r, SignVector):
        r = SignVector(tuple(r))
    kind = Generator(kind)
    nm = n_minus(r)
    if kind is Generator.H and nm % 2:
        raise InvalidInput(f"H terms need an even number of -1 entries, got {nm}")
    if kind is Generator.A and nm % 2 == 0:
        raise InvalidInput(f"A terms need an odd number of -1 entries, got {nm}")
    half = nm // 2
    letters = ["X" if v == 1 else "Y" for v in r.r]
    return PauliString.from_letters(letters, 2 * (half % 2))


def generate_terms(n_qubits: int, kind: Generator | str) -> TermSet:
    """All terms of H or A in lexicographic sign order (+1 before -1)."""
    kind = Generator(kind)
    if not 1 <= n_qubits <= MAX_ENUMERATION_QUBITS:
        raise SizeLimitExceeded(
            f"n_qubits must be in 1..{MAX_ENUMERATION_QUBITS}, got {n_qubits}"
        )
    return _generate_terms(n_qubits, kind)


@lru_cache(maxsize=64)
def _generate_terms(n_qubits: int, kind: Generator) -> TermSet:
    parity = 0 if kind is Generator.H else 1
    terms = tuple(
        term_from_signs(r, kind)
        for r in itertools.product((1, -1), repeat=n_qubits)
        if n_minus(r) % 2 == parity
    )
    return TermSet(n_qubits, terms, kind)


def dense_matrix(p: PauliString) -> np.ndarray:
    """Dense ``2**N x 2**N`` matrix of ``p`` in the computational basis.

    Basis index bit ``j-1`` set means qubit ``j`` is down, so qubit 1 is the
    least significant factor: the Kronecker product runs from qubit N down to
    qubit 1.
    """
    if p.n_qubits > MAX_DENSE_QUBITS:
        raise SizeLimitExceeded(
            f"dense matrices limited to {MAX_DENSE_QUBITS} qubits, got {p.n_qubits}"
        )
    out = np.array([[p.phase]], dtype=complex)
    for letter in reversed(p.letters):
        out = np.kron(out, _SINGLE[letter])
    return out


def dense_sum(terms: Iterable[PauliString]) -> np.ndarray:
    """Dense matrix of a sum of Pauli strings."""
    total = None
    for p in terms:
        m = dense_matrix(p)
        total = m if total is None else total + m
    if total is None:
        raise InvalidInput("cannot densify an empty sum")
    return total
