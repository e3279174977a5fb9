"""Generalized Jaynes-Cummings model: one photon mode coupled to N qubits.

    H   = H_0 + H_I
    H_0 = (omega/2) sum_j sigma_z^j + Omega a^dag a
    H_I = (g/2) [a (X+iY)^{(x)N} + h.c.]

``(X+iY)^{(x)N} = 2**N |all-up><all-down|``, so the interaction only couples
``|n, all-up>`` with ``|n+1, all-down>`` with matrix element
``g 2**(N-1) sqrt(n+1)``. Every other joint basis state is an eigenstate of
``H_0`` and is annihilated by ``H_I``. The Hamiltonian is therefore a direct
sum of 2x2 blocks and 1x1 blocks, and truncating the photon space at
``fock_cutoff`` is exact for states with no weight on the top Fock level.

Joint amplitudes are stored as a ``(fock_cutoff + 1, 2**N)`` array indexed by
``(photon number, qubit basis index)``; the flattened dense ordering is
photon-major. Units have hbar = 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import (
    CutoffViolation,
    DegenerateBlock,
    DimensionMismatch,
    InvalidInput,
    SizeLimitExceeded,
    SupportViolation,
)
from .pauli import Generator, generate_terms
from .statevector import apply_exp_termset, basis_state

MAX_JC_QUBITS = 8
MAX_JC_CUTOFF = 8
NORM_TOL = 1e-12
SUPPORT_TOL = 1e-10


@dataclass(frozen=True)
class JCModel:
    n_qubits: int
    omega: float
    Omega: float
    g: float
    fock_cutoff: int

    def __post_init__(self):
        if self.n_qubits < 1:
            raise InvalidInput(f"n_qubits must be positive, got {self.n_qubits}")
        if not (self.omega > 0 and self.Omega > 0):
            raise InvalidInput("omega and Omega must be positive")
        if self.fock_cutoff < 1:
            raise InvalidInput(f"fock_cutoff must be >= 1, got {self.fock_cutoff}")

    @property
    def detuning(self) -> float:
        """``omega N - Omega``."""
        return self.omega * self.n_qubits - self.Omega

    def resonant(self) -> bool:
        return abs(self.detuning) <= 1e-12 * self.n_qubits * self.omega

    @property
    def qubit_dim(self) -> int:
        return 1 << self.n_qubits

    @property
    def dim(self) -> int:
        return (self.fock_cutoff + 1) * self.qubit_dim

    def coupling(self, n: int) -> float:
        """Off-diagonal element ``<n, up..up| H_I |n+1, down..down>``."""
        return self.g * 2.0 ** (self.n_qubits - 1) * math.sqrt(n + 1)

    def rabi_frequency(self, n: int) -> float:
        """``sqrt((omega N - Omega)**2 + g**2 (n+1) 2**(2N))``."""
        return math.sqrt(self.detuning ** 2 + self.g ** 2 * (n + 1) * 4.0 ** self.n_qubits)

    def with_cutoff(self, fock_cutoff: int) -> "JCModel":
        return JCModel(self.n_qubits, self.omega, self.Omega, self.g, fock_cutoff)


def cutoff_for(max_photon: int) -> int:
    """Cutoff policy: two levels above the highest occupied photon number."""
    return max_photon + 2


@dataclass(frozen=True, eq=False)
class JointState:
    """Normalized photon x qubit amplitudes, shape ``(fock_cutoff + 1, 2**N)``."""

    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=np.complex128)
        if amps.ndim != 2 or amps.shape[1] != 1 << self.n_qubits or amps.shape[0] < 2:
            raise DimensionMismatch(f"bad joint amplitude shape {amps.shape}")
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1.0) > 10 * NORM_TOL:
            raise InvalidInput(f"joint state is not normalized: {norm!r}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def fock_cutoff(self) -> int:
        return self.amplitudes.shape[0] - 1

    @classmethod
    def basis(cls, model: JCModel, photons: int, qubit_index: int) -> "JointState":
        if not 0 <= photons <= model.fock_cutoff:
            raise CutoffViolation(f"photon number {photons} exceeds cutoff {model.fock_cutoff}")
        amps = np.zeros((model.fock_cutoff + 1, model.qubit_dim), dtype=np.complex128)
        amps[photons, qubit_index] = 1.0
        return cls(model.n_qubits, amps)

    def flat(self) -> np.ndarray:
        return self.amplitudes.reshape(-1)

    def overlap(self, other: "JointState") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, unit-trace, positive ``2**N x 2**N`` qubit state."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=np.complex128)
        dim = m.shape[0]
        if m.ndim != 2 or m.shape != (dim, dim) or dim & (dim - 1) or dim < 2:
            raise DimensionMismatch(f"bad density matrix shape {m.shape}")
        if np.max(np.abs(m - m.conj().T)) > NORM_TOL:
            raise InvalidInput("density matrix is not Hermitian")
        if abs(np.trace(m) - 1.0) > NORM_TOL:
            raise InvalidInput(f"density matrix trace is {np.trace(m)!r}")
        if np.linalg.eigvalsh(m)[0] < -SUPPORT_TOL:
            raise InvalidInput("density matrix has a negative eigenvalue")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def n_qubits(self) -> int:
        return self.matrix.shape[0].bit_length() - 1

    def expectation(self, op: np.ndarray) -> float:
        """``tr(rho op)``; a 1-D ``op`` is read as a diagonal."""
        op = np.asarray(op)
        if op.ndim == 1:
            return float(np.real(np.dot(np.diag(self.matrix), op)))
        return float(np.real(np.trace(self.matrix @ op)))


def _check_dense(model: JCModel) -> None:
    if model.n_qubits > MAX_JC_QUBITS or model.fock_cutoff > MAX_JC_CUTOFF:
        raise SizeLimitExceeded(
            f"dense JC matrices limited to N <= {MAX_JC_QUBITS}, cutoff <= {MAX_JC_CUTOFF}"
        )


def _qubit_operators(n_qubits: int) -> tuple[np.ndarray, np.ndarray]:
    """``sum_j sigma_z^j`` and ``(X+iY)^{(x)N}`` as dense Kronecker products."""
    sz = np.diag([1.0, -1.0]).astype(complex)
    raising = np.array([[0, 1], [1, 0]], dtype=complex) + 1j * np.array([[0, -1j], [1j, 0]])
    eye = np.eye(2, dtype=complex)
    total_z = np.zeros((1 << n_qubits,) * 2, dtype=complex)
    for j in range(n_qubits):
        term = np.array([[1.0 + 0j]])
        # qubit 1 is the least significant factor
        for k in reversed(range(n_qubits)):
            term = np.kron(term, sz if k == j else eye)
        total_z += term
    product = np.array([[1.0 + 0j]])
    for _ in range(n_qubits):
        product = np.kron(product, raising)
    return total_z, product


def _photon_operators(cutoff: int) -> tuple[np.ndarray, np.ndarray]:
    a = np.diag(np.sqrt(np.arange(1, cutoff + 1, dtype=float)), k=1).astype(complex)
    return a, a.conj().T @ a


def hamiltonian_parts(model: JCModel) -> tuple[np.ndarray, np.ndarray]:
    """Dense ``(H_0, H_I)`` on the truncated joint space."""
    _check_dense(model)
    total_z, product = _qubit_operators(model.n_qubits)
    a, number = _photon_operators(model.fock_cutoff)
    eye_p = np.eye(model.fock_cutoff + 1)
    eye_q = np.eye(model.qubit_dim)
    h0 = 0.5 * model.omega * np.kron(eye_p, total_z) + model.Omega * np.kron(number, eye_q)
    coupling = np.kron(a, product)
    hi = 0.5 * model.g * (coupling + coupling.conj().T)
    return h0, hi


def build_hamiltonian(model: JCModel) -> np.ndarray:
    """Dense Hermitian ``H_0 + H_I``, photon-major ordering."""
    h0, hi = hamiltonian_parts(model)
    return h0 + hi


def commutator_H0_HI(model: JCModel) -> float:
    """Spectral norm of ``[H_0, H_I]``; vanishes at resonance."""
    h0, hi = hamiltonian_parts(model)
    return float(np.linalg.norm(h0 @ hi - hi @ h0, 2))


def analytic_eigenvalues(model: JCModel, n: int) -> tuple[float, float]:
    """``Omega (n + 1/2) +- Omega_1 / 2`` for the block ``{|n,up..>, |n+1,down..>}``."""
    if n < 0:
        raise InvalidInput(f"photon number must be >= 0, got {n}")
    center = model.Omega * (n + 0.5)
    half = model.rabi_frequency(n) / 2
    return center + half, center - half


def analytic_eigenstates(model: JCModel, n: int) -> tuple[JointState, JointState]:
    """The two block eigenstates ``(alpha |n, up..> + beta |n+1, down..>)/sqrt(2)``.

    ``alpha_pm = sqrt(1 +- D/Omega_1)``, ``beta_pm = +-sqrt(1 -+ D/Omega_1)``
    with ``D = omega N - Omega``. For ``g < 0`` both betas pick up the sign
    of ``g``, which keeps the states eigenvectors.
    """
    if n < 0 or n + 1 > model.fock_cutoff:
        raise CutoffViolation(f"block n = {n} needs fock_cutoff >= {n + 1}")
    rabi = model.rabi_frequency(n)
    if rabi == 0.0:
        raise DegenerateBlock(f"Omega_1 = 0 for n = {n}: block is degenerate")
    ratio = model.detuning / rabi
    sign = -1.0 if model.g < 0 else 1.0
    down = model.qubit_dim - 1
    states = []
    for pm in (1.0, -1.0):
        alpha = math.sqrt(max(0.0, 1 + pm * ratio))
        beta = pm * sign * math.sqrt(max(0.0, 1 - pm * ratio))
        amps = np.zeros((model.fock_cutoff + 1, model.qubit_dim), dtype=np.complex128)
        amps[n, 0] = alpha / math.sqrt(2)
        amps[n + 1, down] = beta / math.sqrt(2)
        states.append(JointState(model.n_qubits, amps))
    return states[0], states[1]


def _free_energies(model: JCModel) -> np.ndarray:
    """Diagonal of ``H_0`` as a ``(cutoff + 1, 2**N)`` array."""
    idx = np.arange(model.qubit_dim)
    total_z = model.n_qubits - 2 * np.bitwise_count(idx).astype(float)
    photons = np.arange(model.fock_cutoff + 1, dtype=float)
    return 0.5 * model.omega * total_z[None, :] + model.Omega * photons[:, None]


def evolve(model: JCModel, initial: JointState, t: float) -> JointState:
    """Exact ``exp(-i t H)|initial>`` using the block structure.

    Each coupled pair ``(|n, up..>, |n+1, down..>)`` evolves under

        exp(-i t Omega (n + 1/2)) [cos(t Omega_1/2) - i sin(t Omega_1/2) M]

    with ``M = (D sigma_z + 2 G sigma_x) / Omega_1``, the spectral form of the
    analytic eigensystem. All other basis states only pick up ``H_0`` phases.

    Raises
    ------
    CutoffViolation
        If the initial state has weight on the top Fock level.
    """
    if initial.n_qubits != model.n_qubits or initial.fock_cutoff != model.fock_cutoff:
        raise DimensionMismatch("joint state does not match the model dimensions")
    top = float(np.max(np.abs(initial.amplitudes[-1])))
    if top > NORM_TOL:
        raise CutoffViolation(
            f"initial state has amplitude {top:.3e} on photon number {model.fock_cutoff}; "
            f"raise fock_cutoff (policy: max photon + 2)"
        )
    amps = initial.amplitudes
    out = np.exp(-1j * t * _free_energies(model)) * amps
    down = model.qubit_dim - 1
    det = model.detuning
    for n in range(model.fock_cutoff):
        a0, a1 = amps[n, 0], amps[n + 1, down]
        if a0 == 0 and a1 == 0:
            continue
        rabi = model.rabi_frequency(n)
        phase = np.exp(-1j * t * model.Omega * (n + 0.5))
        c = math.cos(t * rabi / 2)
        if rabi > 0:
            s = math.sin(t * rabi / 2) / rabi
            mz, mx = det * s, 2 * model.coupling(n) * s
        else:
            mz = mx = 0.0
        out[n, 0] = phase * ((c - 1j * mz) * a0 - 1j * mx * a1)
        out[n + 1, down] = phase * (-1j * mx * a0 + (c + 1j * mz) * a1)
    return JointState(model.n_qubits, out)


def partial_trace_photons(state: JointState) -> DensityMatrix:
    """``rho[a, b] = sum_n amp(n, a) conj(amp(n, b))``."""
    amps = state.amplitudes
    return DensityMatrix(amps.T @ amps.conj())


def _check_support(rho: np.ndarray) -> None:
    dim = rho.shape[0]
    keep = np.zeros(dim, dtype=bool)
    keep[[0, dim - 1]] = True
    outside = np.abs(rho[~keep, :]).max(initial=0.0)
    outside = max(outside, np.abs(rho[:, ~keep]).max(initial=0.0))
    if outside > SUPPORT_TOL:
        raise SupportViolation(
            f"density matrix has weight {outside:.3e} outside span{{all-up, all-down}}"
        )


def kraus_operators(theta: float, n_qubits: int) -> list[np.ndarray]:
    """``h_r = exp(-i theta H)|phi_r><phi_r|`` for ``r = 0`` (all-up), ``1`` (all-down)."""
    ts = generate_terms(n_qubits, Generator.H)
    ops = []
    for index in (0, (1 << n_qubits) - 1):
        column = apply_exp_termset(basis_state(n_qubits, index), ts, theta).amplitudes
        h = np.zeros((1 << n_qubits,) * 2, dtype=np.complex128)
        h[:, index] = column
        ops.append(h)
    return ops


def kraus_map(rho0: DensityMatrix, theta: float, n_qubits: int) -> DensityMatrix:
    """``sum_r h_r rho0 h_r^dag`` with the operators of :func:`kraus_operators`.

    ``sum_r h_r^dag h_r`` is the projector onto span{all-up, all-down}, not the
    identity for N >= 2, so inputs must be supported on that span.
    """
    rho = rho0.matrix
    if rho.shape[0] != 1 << n_qubits:
        raise DimensionMismatch("density matrix does not match n_qubits")
    _check_support(rho)
    out = sum(h @ rho @ h.conj().T for h in kraus_operators(theta, n_qubits))
    return DensityMatrix(out)


def traced_evolution(model: JCModel, rho0: DensityMatrix, n: int, t: float) -> DensityMatrix:
    """Photon-traced evolution of the joint mixture ``sum_r rho0[r,r] |n+r, phi_r><n+r, phi_r|``.

    ``phi_0`` is all-up and ``phi_1`` all-down. Coherences of ``rho0`` between
    them have no counterpart in this embedding (the photon numbers differ)
    and are dropped.
    """
    rho = rho0.matrix
    _check_support(rho)
    down = model.qubit_dim - 1
    out = np.zeros_like(rho)
    for r, index in enumerate((0, down)):
        weight = float(rho[index, index].real)
        if weight == 0.0:
            continue
        state = evolve(model, JointState.basis(model, n + r, index), t)
        out = out + weight * partial_trace_photons(state).matrix
    return DensityMatrix(out)


def cqc_angle(model: JCModel, t: float, n: int) -> float:
    """``theta = t g sqrt(n + 1)``."""
    return t * model.g * math.sqrt(n + 1)
