"""Dispersions, uncertainty-relation precision and the quantum/classical bounds.

The central quantity is the error propagation formula

    delta_theta = Delta X / |d<X>/dtheta|

for a state family ``theta -> exp(-i theta G)|phi>`` and a measured
observable ``X``. It is bounded below by ``1/(2 Delta G)`` and, through
``Delta G <= (lambda_max - lambda_min)/2``, by the spectral-width bounds
returned by :func:`mt_bound` and :func:`bc_bound`.

:func:`run_cqc` runs the separable-in / entangling-unitary / separable-out
protocol: start all-up, evolve under the Pauli generator H or A, and measure
the probability that every qubit is still up.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .exceptions import (
    DegenerateGenerator,
    InvalidInput,
    NumericalFailure,
    SizeLimitExceeded,
    StationaryPoint,
)
from .pauli import MAX_DENSE_QUBITS, Generator, PauliString, TermSet, dense_sum, generate_terms
from .statevector import (
    Observable,
    StateVector,
    all_up_probability,
    all_up_projector,
    apply_observable,
    check_hermitian,
    closed_form_state,
    evolve_many,
    expectation,
    prepare_all_up,
)

VARIANCE_CLAMP = 1e-12
DERIVATIVE_FLOOR = 1e-8
DEFAULT_GRID_POINTS = 32


@dataclass(frozen=True)
class StrategyLabel:
    """Entanglement in preparation, unitary and measurement: each ``C`` or ``Q``."""

    preparation: str
    unitary: str
    measurement: str

    def __post_init__(self):
        for name in ("preparation", "unitary", "measurement"):
            if getattr(self, name) not in ("C", "Q"):
                raise InvalidInput(f"{name} must be 'C' or 'Q', got {getattr(self, name)!r}")

    @classmethod
    def parse(cls, text: str) -> "StrategyLabel":
        if len(text) != 3:
            raise InvalidInput(f"strategy labels have three letters, got {text!r}")
        return cls(*text)

    def __str__(self) -> str:
        return self.preparation + self.unitary + self.measurement


ALL_STRATEGIES = tuple(
    StrategyLabel(p, u, m) for p in "CQ" for u in "CQ" for m in "CQ"
)
CQC = StrategyLabel("C", "Q", "C")


@dataclass(frozen=True)
class DirectSumSpec:
    """N probes, each with its own generator of spectrum [lambda_m, lambda_M]."""

    n_probes: int
    lambda_max_single: float
    lambda_min_single: float

    def __post_init__(self):
        if self.n_probes < 1:
            raise InvalidInput(f"n_probes must be positive, got {self.n_probes}")
        if self.lambda_max_single < self.lambda_min_single:
            raise InvalidInput("lambda_max_single must be >= lambda_min_single")

    @property
    def d(self) -> float:
        return (self.lambda_max_single - self.lambda_min_single) / 2


@dataclass(frozen=True)
class PrecisionReport:
    n_qubits: int
    theta: float
    expectation_X: float
    dispersion_X: float
    derivative_X: float
    delta_theta: float
    dispersion_H: float
    mt_bound: float
    bc_bound: float
    nu: int = 1
    label: StrategyLabel = field(default=CQC)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["label"] = str(self.label)
        return out


# ---------------------------------------------------------------------------
# dispersions and bounds
# ---------------------------------------------------------------------------

def dispersion(state: StateVector, op: Observable) -> float:
    """Standard deviation ``sqrt(<op^2> - <op>^2)`` of a Hermitian observable.

    ``<op^2>`` is evaluated as ``||op psi||^2``. A negative variance residue
    within ``1e-12 * max(1, <op^2>)`` is clamped to zero.
    """
    check_hermitian(op)
    v = apply_observable(state, op)
    mean = complex(np.vdot(state.amplitudes, v)).real
    second = float(np.vdot(v, v).real)
    var = second - mean * mean
    if var < 0:
        if var < -VARIANCE_CLAMP * max(1.0, second):
            raise NumericalFailure(f"negative variance {var:.3e}")
        return 0.0
    return math.sqrt(var)


def spectral_bounds(op: Observable) -> tuple[float, float]:
    """``(lambda_min, lambda_max)`` of a Hermitian observable.

    The canonical H/A term sets have spectrum ``{-2**(N-1), 0, 2**(N-1)}``
    (only ``+-2**(N-1)`` for N = 1), which is used directly; other term sets
    and matrices are diagonalized densely.
    """
    check_hermitian(op)
    if isinstance(op, PauliString):
        return (-1.0, 1.0)
    if isinstance(op, TermSet):
        if op.terms == generate_terms(op.n_qubits, op.kind).terms:
            half = float(1 << (op.n_qubits - 1))
            return (-half, half)
        if op.n_qubits > MAX_DENSE_QUBITS:
            raise SizeLimitExceeded("term set too large to diagonalize densely")
        evals = np.linalg.eigvalsh(dense_sum(op.terms))
        return (float(evals[0]), float(evals[-1]))
    arr = np.asarray(op)
    if arr.ndim == 1:
        return (float(np.min(arr.real)), float(np.max(arr.real)))
    evals = np.linalg.eigvalsh(arr)
    return (float(evals[0]), float(evals[-1]))


def mt_bound(lambda_max: float, lambda_min: float) -> float:
    """Single-shot bound ``1/(lambda_max - lambda_min)``."""
    width = lambda_max - lambda_min
    if width <= 0:
        raise DegenerateGenerator(
            f"spectral width must be positive, got {lambda_max} - {lambda_min}"
        )
    return 1.0 / width


def bc_bound(lambda_max: float, lambda_min: float, nu: int) -> float:
    """Bound after ``nu`` repetitions: ``mt_bound / sqrt(nu)``."""
    if int(nu) != nu or nu < 1:
        raise InvalidInput(f"nu must be a positive integer, got {nu!r}")
    return mt_bound(lambda_max, lambda_min) / math.sqrt(nu)


def direct_sum_dispersion_bound(spec: DirectSumSpec) -> float:
    """Largest dispersion ``N d`` of a sum of single-probe generators."""
    return spec.n_probes * spec.d


def direct_sum_precision_bound(spec: DirectSumSpec) -> float:
    """``mt_bound`` for the direct-sum spectrum ``[N lambda_m, N lambda_M]``."""
    return mt_bound(spec.n_probes * spec.lambda_max_single,
                    spec.n_probes * spec.lambda_min_single)


def classical_dispersion(sigmas: Iterable[float]) -> float:
    """Dispersion of a sum of independent classical variables."""
    sig = np.asarray(list(sigmas), dtype=float)
    if np.any(sig < 0):
        raise InvalidInput("dispersions must be non-negative")
    return float(math.sqrt(float(np.sum(sig * sig))))


# ---------------------------------------------------------------------------
# precision of a state family
# ---------------------------------------------------------------------------

class EvolutionFamily:
    """``theta -> exp(-i theta G)|initial>`` for a Pauli term-set generator.

    Evaluation uses the factored product of commuting exponentials; ``many``
    evaluates several angles in one pass.
    """

    def __init__(self, initial: StateVector, generator: TermSet):
        self.initial = initial
        self.generator = generator

    def __call__(self, theta: float) -> StateVector:
        return self.many([theta])[0]

    def many(self, thetas: Sequence[float]) -> list[StateVector]:
        return evolve_many(self.initial, self.generator, thetas)


class DenseEvolutionFamily:
    """``theta -> exp(-i theta G)|initial>`` for a dense Hermitian generator."""

    def __init__(self, initial: StateVector, generator: np.ndarray):
        check_hermitian(generator)
        self.initial = initial
        self.generator = np.asarray(generator)
        self._evals, self._evecs = np.linalg.eigh(self.generator)
        self._coeffs = self._evecs.conj().T @ initial.amplitudes

    def __call__(self, theta: float) -> StateVector:
        amps = self._evecs @ (np.exp(-1j * theta * self._evals) * self._coeffs)
        return StateVector(self.initial.n_qubits, amps)

    def many(self, thetas: Sequence[float]) -> list[StateVector]:
        return [self(t) for t in thetas]


def _evaluate(family: Callable, thetas: Sequence[float]) -> list[StateVector]:
    many = getattr(family, "many", None)
    if many is not None:
        return list(many(thetas))
    return [family(t) for t in thetas]


def richardson_derivative(f_plus_h, f_minus_h, f_plus_h2, f_minus_h2, h) -> float:
    """Central differences at steps ``h`` and ``h/2`` with one Richardson step."""
    d_h = (f_plus_h - f_minus_h) / (2 * h)
    d_h2 = (f_plus_h2 - f_minus_h2) / h
    return (4 * d_h2 - d_h) / 3


def default_step(n_qubits: int) -> float:
    return 1e-5 * 2.0 ** (-n_qubits)


def _report(n_qubits, theta, state, observable, derivative, generator, nu, label):
    exp_x = expectation(state, observable)
    disp_x = dispersion(state, observable)
    if generator is not None:
        disp_h = dispersion(state, generator)
        lo, hi = spectral_bounds(generator)
        mt = mt_bound(hi, lo)
        bc = bc_bound(hi, lo, nu)
    else:
        disp_h = mt = bc = float("nan")
    scale = max(1.0, 2.0 * disp_h) if generator is not None else 1.0
    floor = DERIVATIVE_FLOOR * scale
    if not abs(derivative) >= floor:
        raise StationaryPoint(theta, derivative, floor)
    return PrecisionReport(
        n_qubits=n_qubits,
        theta=float(theta),
        expectation_X=exp_x,
        dispersion_X=disp_x,
        derivative_X=float(derivative),
        delta_theta=disp_x / abs(derivative),
        dispersion_H=disp_h,
        mt_bound=mt,
        bc_bound=bc,
        nu=int(nu),
        label=label,
    )


def precision(family: Callable[[float], StateVector], observable: Observable,
              theta: float, *, generator: Observable | None = None, nu: int = 1,
              label: StrategyLabel | str = CQC, step: float | None = None,
              derivative: Callable[[float], float] | None = None) -> PrecisionReport:
    """Error-propagation precision of ``family`` read out through ``observable``.

    The slope of ``<X>`` is taken from ``derivative`` when supplied, otherwise
    from a Richardson-extrapolated central difference with step ``step``
    (default ``1e-5 * 2**-N``). ``generator`` defaults to ``family.generator``
    and feeds the dispersion and spectral-bound fields.

    Raises
    ------
    StationaryPoint
        If ``|d<X>/dtheta|`` falls below ``1e-8 * max(1, 2 Delta G)``.
    """
    if isinstance(label, str):
        label = StrategyLabel.parse(label)
    if generator is None:
        generator = getattr(family, "generator", None)
    state = _evaluate(family, [theta])[0]
    if derivative is None:
        h = default_step(state.n_qubits) if step is None else step
        shifted = _evaluate(family, [theta + h, theta - h, theta + h / 2, theta - h / 2])
        vals = [expectation(s, observable) for s in shifted]
        slope = richardson_derivative(vals[0], vals[1], vals[2], vals[3], h)
    else:
        slope = derivative(theta)
    return _report(state.n_qubits, theta, state, observable, slope, generator, nu, label)


# ---------------------------------------------------------------------------
# the CQC protocol
# ---------------------------------------------------------------------------

def cqc_expectation(n_qubits: int, theta: float) -> float:
    """Closed form ``(1 + cos(theta 2**N)) / 2`` of the all-up probability."""
    return 0.5 * (1.0 + math.cos(theta * 2.0 ** n_qubits))


def cqc_derivative(n_qubits: int, theta: float) -> float:
    """Analytic slope ``-2**(N-1) sin(theta 2**N)`` of :func:`cqc_expectation`."""
    return -(2.0 ** (n_qubits - 1)) * math.sin(theta * 2.0 ** n_qubits)


def is_stationary(n_qubits: int, theta: float, tol: float = 1e-6) -> bool:
    """True when ``theta 2**N`` is within ``tol`` of a multiple of pi."""
    x = theta * 2.0 ** n_qubits / math.pi
    return abs(x - round(x)) * math.pi <= tol


def default_theta_grid(n_qubits: int, count: int = DEFAULT_GRID_POINTS) -> np.ndarray:
    """``count`` points uniform in ``(0.1, 0.9) * pi * 2**-N``."""
    return np.linspace(0.1, 0.9, count) * math.pi * 2.0 ** (-n_qubits)


def _check_cqc_args(n_qubits: int, derivative: str, evolution: str) -> None:
    if not 1 <= n_qubits <= MAX_DENSE_QUBITS:
        raise SizeLimitExceeded(f"n_qubits must be in 1..{MAX_DENSE_QUBITS}, got {n_qubits}")
    if derivative not in ("analytic", "numeric"):
        raise InvalidInput(f"derivative must be 'analytic' or 'numeric', got {derivative!r}")
    if evolution not in ("factored", "closed"):
        raise InvalidInput(f"evolution must be 'factored' or 'closed', got {evolution!r}")


def run_cqc_grid(n_qubits: int, thetas: Sequence[float],
                 generator: Generator | str = Generator.H, *,
                 derivative: str = "analytic", evolution: str = "factored",
                 nu: int = 1) -> list[PrecisionReport]:
    """:func:`run_cqc` over a grid, sharing one pass over the generator terms."""
    _check_cqc_args(n_qubits, derivative, evolution)
    kind = Generator(generator)
    ts = generate_terms(n_qubits, kind)
    thetas = [float(t) for t in thetas]
    h = default_step(n_qubits)
    if derivative == "numeric":
        offsets = (0.0, h, -h, h / 2, -h / 2)
    else:
        offsets = (0.0,)
    angles = [t + o for t in thetas for o in offsets]
    if evolution == "factored":
        states = evolve_many(prepare_all_up(n_qubits), ts, angles)
    else:
        states = [closed_form_state(n_qubits, a, kind) for a in angles]
    projector = all_up_projector(n_qubits)
    reports = []
    for i, theta in enumerate(thetas):
        block = states[i * len(offsets):(i + 1) * len(offsets)]
        if derivative == "numeric":
            p = [all_up_probability(s) for s in block[1:]]
            slope = richardson_derivative(p[0], p[1], p[2], p[3], h)
        else:
            slope = cqc_derivative(n_qubits, theta)
        reports.append(_report(n_qubits, theta, block[0], projector, slope, ts, nu, CQC))
    return reports


def run_cqc(n_qubits: int, theta: float, generator: Generator | str = Generator.H, *,
            derivative: str = "analytic", evolution: str = "factored",
            nu: int = 1) -> PrecisionReport:
    """Simulate the CQC protocol at one angle.

    Prepares all-up, applies ``exp(-i theta G)`` for ``G`` = H or A and
    reads out the all-up projector. ``derivative='analytic'`` uses the slope
    of the closed-form signal; ``'numeric'`` differentiates the simulated
    signal. ``evolution='closed'`` swaps the factored product for the
    closed-form state.
    """
    return run_cqc_grid(n_qubits, [theta], generator, derivative=derivative,
                        evolution=evolution, nu=nu)[0]
