"""Dense pure-state simulation of N qubits.

Basis convention: bit ``j-1`` of a basis index is set when qubit ``j`` is
down, so index 0 is the all-up state and ``2**N - 1`` is all-down. Amplitudes
are stored as ``complex128`` throughout.

Evolution under the generators H and A is done the way they are built: as a
product of ``2**(N-1)`` commuting single-string exponentials
``exp(-i theta P) = cos(theta) - i sin(theta) P``, one sweep over the
amplitude array per string.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Union

import numpy as np

from .exceptions import (
    DimensionMismatch,
    InvalidInput,
    NonHermitian,
    NumericalFailure,
    SizeLimitExceeded,
)
from .pauli import MAX_DENSE_QUBITS, Generator, PauliString, TermSet

NORM_TOL = 1e-12
IMAG_TOL = 1e-10

Observable = Union[PauliString, TermSet, np.ndarray]


@dataclass(frozen=True, eq=False)
class StateVector:
    """Normalized amplitudes over the ``2**N`` computational basis states."""

    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=np.complex128)
        if amps.shape != (1 << self.n_qubits,):
            raise DimensionMismatch(
                f"expected {1 << self.n_qubits} amplitudes, got shape {amps.shape}"
            )
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1.0) > NORM_TOL * 10:
            raise InvalidInput(f"state is not normalized: <psi|psi> = {norm!r}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def _wrap(cls, n_qubits: int, amps: np.ndarray) -> "StateVector":
        # internal constructor: skips validation for arrays produced by unitaries
        obj = object.__new__(cls)
        amps.setflags(write=False)
        object.__setattr__(obj, "n_qubits", n_qubits)
        object.__setattr__(obj, "amplitudes", amps)
        return obj

    @classmethod
    def from_array(cls, amplitudes, normalize: bool = False) -> "StateVector":
        amps = np.asarray(amplitudes, dtype=np.complex128)
        dim = amps.shape[0]
        n = dim.bit_length() - 1
        if amps.ndim != 1 or dim != 1 << n or n < 1:
            raise DimensionMismatch(f"length {dim} is not a power of two >= 2")
        if normalize:
            amps = amps / np.linalg.norm(amps)
        return cls(n, amps)

    def __len__(self) -> int:
        return self.amplitudes.shape[0]

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def inner(self, other: "StateVector") -> complex:
        """``<self|other>``."""
        _check_match(self.n_qubits, other.n_qubits)
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def to_json_pairs(self) -> list[list[float]]:
        """Golden-file layout: ``[re, im]`` pairs in index order."""
        return [[float(a.real), float(a.imag)] for a in self.amplitudes]

    @classmethod
    def from_json_pairs(cls, pairs) -> "StateVector":
        arr = np.array([complex(re, im) for re, im in pairs])
        return cls.from_array(arr)


def _check_match(n1: int, n2: int) -> None:
    if n1 != n2:
        raise DimensionMismatch(f"{n1}-qubit vs {n2}-qubit operands")


def _check_dense_size(n_qubits: int) -> None:
    if not 1 <= n_qubits <= MAX_DENSE_QUBITS:
        raise SizeLimitExceeded(
            f"state vectors limited to 1..{MAX_DENSE_QUBITS} qubits, got {n_qubits}"
        )


@lru_cache(maxsize=None)
def _indices(n_qubits: int) -> np.ndarray:
    idx = np.arange(1 << n_qubits, dtype=np.int64)
    idx.setflags(write=False)
    return idx


def basis_state(n_qubits: int, index: int) -> StateVector:
    _check_dense_size(n_qubits)
    amps = np.zeros(1 << n_qubits, dtype=np.complex128)
    amps[index] = 1.0
    return StateVector._wrap(n_qubits, amps)


def prepare_all_up(n_qubits: int) -> StateVector:
    """``|up up ... up>``, basis index 0."""
    return basis_state(n_qubits, 0)


def prepare_all_down(n_qubits: int) -> StateVector:
    """``|down down ... down>``, basis index ``2**N - 1``."""
    return basis_state(n_qubits, (1 << n_qubits) - 1)


def _pauli_kernel(p: PauliString) -> tuple[np.ndarray, np.ndarray]:
    """Source indices and coefficients with ``(p psi)[b] = coef[b] * psi[src[b]]``.

    ``p = i**(k + n_y) X^x Z^z``; ``Z^z`` contributes ``(-1)**|z & b|`` on the
    source index ``b``, and ``X^x`` moves amplitude from ``b`` to ``b ^ x``.
    """
    src = _indices(p.n_qubits) ^ p.x
    parity = np.bitwise_count(src & p.z) & 1
    c = (1, 1j, -1, -1j)[(p.phase_exp + p.n_y) % 4]
    coef = np.where(parity == 1, -c, c)
    return src, coef


def _apply_pauli_array(amps: np.ndarray, p: PauliString) -> np.ndarray:
    src, coef = _pauli_kernel(p)
    return coef * amps[..., src]


def apply_pauli(state: StateVector, p: PauliString) -> StateVector:
    """Apply one Pauli string; a signed permutation of the amplitudes."""
    _check_match(state.n_qubits, p.n_qubits)
    return StateVector._wrap(state.n_qubits, _apply_pauli_array(state.amplitudes, p))


def _check_real_phase(p: PauliString) -> None:
    if not p.is_hermitian:
        raise NonHermitian(f"{p.label} has an imaginary phase; exp(-i theta P) is not unitary")


def _exp_terms_batch(amps: np.ndarray, terms, thetas: np.ndarray) -> np.ndarray:
    """Apply ``prod_P exp(-i theta_k P)`` to row ``k`` of ``amps``."""
    rows = [np.array(a, dtype=np.complex128, copy=True) for a in amps]
    c = np.cos(thetas)
    s = -1j * np.sin(thetas)
    for p in terms:
        _check_real_phase(p)
        src, coef = _pauli_kernel(p)
        for k, row in enumerate(rows):
            flipped = row[src]
            flipped *= coef
            flipped *= s[k]
            row *= c[k]
            row += flipped
    return np.array(rows)


def apply_exp_pauli(state: StateVector, p: PauliString, theta: float) -> StateVector:
    """``exp(-i theta p)`` for a Hermitian string: ``cos(theta) - i sin(theta) p``."""
    _check_match(state.n_qubits, p.n_qubits)
    _check_real_phase(p)
    pa = _apply_pauli_array(state.amplitudes, p)
    out = np.cos(theta) * state.amplitudes - 1j * np.sin(theta) * pa
    return StateVector._wrap(state.n_qubits, out)


def apply_exp_termset(state: StateVector, ts: TermSet, theta: float) -> StateVector:
    """``exp(-i theta sum(ts))`` as the ordered product of the term exponentials."""
    _check_match(state.n_qubits, ts.n_qubits)
    out = _exp_terms_batch(state.amplitudes[None, :], ts.terms, np.array([theta]))
    return StateVector._wrap(state.n_qubits, out[0])


def evolve_many(state: StateVector, ts: TermSet, thetas) -> list[StateVector]:
    """:func:`apply_exp_termset` at several angles in one pass over the terms."""
    _check_match(state.n_qubits, ts.n_qubits)
    thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
    block = np.repeat(state.amplitudes[None, :], thetas.size, axis=0)
    out = _exp_terms_batch(block, ts.terms, thetas)
    return [StateVector._wrap(state.n_qubits, out[k].copy()) for k in range(thetas.size)]


def closed_form_state(n_qubits: int, theta: float, kind: Generator | str,
                      start: str = "up") -> StateVector:
    """Evolved all-up / all-down state without touching the terms.

    Both generators act only on span{all-up, all-down}:
    ``H = 2**(N-1) (|up><down| + |down><up|)`` and
    ``A = 2**(N-1) (-i|up><down| + i|down><up|)``.
    """
    _check_dense_size(n_qubits)
    kind = Generator(kind)
    arg = (1 << (n_qubits - 1)) * theta
    c, s = np.cos(arg), np.sin(arg)
    up, down = 0, (1 << n_qubits) - 1
    amps = np.zeros(1 << n_qubits, dtype=np.complex128)
    if start == "up":
        amps[up] = c
        amps[down] = -1j * s if kind is Generator.H else s
    elif start == "down":
        amps[down] = c
        amps[up] = -1j * s if kind is Generator.H else -s
    else:
        raise InvalidInput(f"start must be 'up' or 'down', got {start!r}")
    return StateVector._wrap(n_qubits, amps)


def apply_observable(state: StateVector, op: Observable) -> np.ndarray:
    """Unnormalized vector ``op |psi>``.

    ``op`` may be a Pauli string, a term set (their sum), a dense matrix, or
    a 1-D array read as the diagonal of a diagonal observable.
    """
    amps = state.amplitudes
    if isinstance(op, PauliString):
        _check_match(state.n_qubits, op.n_qubits)
        return _apply_pauli_array(amps, op)
    if isinstance(op, TermSet):
        _check_match(state.n_qubits, op.n_qubits)
        out = np.zeros_like(amps)
        for p in op.terms:
            src, coef = _pauli_kernel(p)
            out += coef * amps[src]
        return out
    arr = np.asarray(op)
    if arr.ndim == 1:
        if arr.shape[0] != amps.shape[0]:
            raise DimensionMismatch(f"diagonal of length {arr.shape[0]} vs {amps.shape[0]}")
        return arr * amps
    if arr.ndim == 2:
        if arr.shape != (amps.shape[0], amps.shape[0]):
            raise DimensionMismatch(f"matrix of shape {arr.shape} vs dimension {amps.shape[0]}")
        return arr @ amps
    raise InvalidInput(f"unsupported observable of type {type(op).__name__}")


def check_hermitian(op: Observable) -> None:
    """Raise :class:`NonHermitian` unless ``op`` is Hermitian."""
    if isinstance(op, PauliString):
        if not op.is_hermitian:
            raise NonHermitian(f"{op.label} is not Hermitian")
        return
    if isinstance(op, TermSet):
        for p in op.terms:
            check_hermitian(p)
        return
    arr = np.asarray(op)
    if arr.ndim == 1:
        if np.iscomplexobj(arr) and np.max(np.abs(arr.imag), initial=0.0) > 1e-12:
            raise NonHermitian("diagonal observable has complex entries")
        return
    scale = max(1.0, float(np.max(np.abs(arr), initial=0.0)))
    if np.max(np.abs(arr - arr.conj().T), initial=0.0) > 1e-12 * scale:
        raise NonHermitian("matrix observable is not Hermitian")


def _real_part(value: complex, what: str) -> float:
    tol = IMAG_TOL * max(1.0, abs(value.real))
    if abs(value.imag) > tol:
        raise NumericalFailure(f"{what} has imaginary residue {value.imag:.3e}")
    return float(value.real)


def expectation(state: StateVector, op: Observable) -> float:
    """Real ``<psi|op|psi>`` for a Hermitian observable."""
    check_hermitian(op)
    value = complex(np.vdot(state.amplitudes, apply_observable(state, op)))
    return _real_part(value, "expectation value")


def all_up_probability(state: StateVector) -> float:
    """``|<up...up|psi>|**2``, the expectation of the all-up projector."""
    return float(abs(state.amplitudes[0]) ** 2)


def all_up_projector(n_qubits: int) -> np.ndarray:
    """Diagonal of ``prod_j (1 + sigma_z^j)/2``: one at index 0, zero elsewhere."""
    _check_dense_size(n_qubits)
    diag = np.zeros(1 << n_qubits)
    diag[0] = 1.0
    return diag


def sigma_z_diagonal(n_qubits: int, qubit: int) -> np.ndarray:
    """Diagonal of ``sigma_z`` on ``qubit`` (1-based)."""
    bits = (_indices(n_qubits) >> (qubit - 1)) & 1
    return 1.0 - 2.0 * bits
