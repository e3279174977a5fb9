"""Monte-Carlo repetition of the CQC protocol.

Each trial runs the protocol ``nu`` times, counts how often the all-up
outcome occurs, and inverts the signal ``(1 + cos(theta 2**N))/2`` on its
first monotonic branch ``theta 2**N in [0, pi]``. That inversion is the
maximum-likelihood estimate for the binomial outcome model.

The reported error is

    delta_nu = sqrt(mean_trials (theta_est / |d<theta_est>/dtheta| - theta)**2)

where the slope of the estimator's average is computed from the exact
binomial expectation of ``theta_est`` at ``theta +- step`` with
``step = 0.1 / (2**N sqrt(nu))``. For an unbiased estimator the slope is 1 and
``delta_nu`` is the RMS error.

Randomness: numpy's ``PCG64`` bit generator, one stream per trial spawned
from ``SeedSequence(seed)``, so results do not depend on how trials are
distributed over threads.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy import stats

from .exceptions import InvalidInput
from .metrology import bc_bound as _bc_bound
from .parallel import ordered_map
from .pauli import Generator, generate_terms
from .statevector import all_up_probability, apply_exp_termset, prepare_all_up

PROB_TOL = 1e-12
RNG_ALGORITHM = "PCG64 (numpy), per-trial streams via SeedSequence.spawn"


@dataclass(frozen=True)
class MonteCarloConfig:
    n_qubits: int
    theta_true: float
    nu: int
    trials: int
    seed: int = 0

    def __post_init__(self):
        if self.n_qubits < 1:
            raise InvalidInput(f"n_qubits must be positive, got {self.n_qubits}")
        if self.nu < 1 or self.trials < 1:
            raise InvalidInput("nu and trials must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise InvalidInput("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class EstimationResult:
    delta_nu_theta_empirical: float
    bc_bound: float
    theta_est_mean: float
    bias: float
    standard_error: float
    derivative_normalization: float
    clipped_fraction: float

    def to_dict(self) -> dict:
        return asdict(self)


def sample_outcomes(p: float, nu: int, rng: np.random.Generator) -> int:
    """Number of all-up outcomes in ``nu`` shots with success probability ``p``."""
    if not -PROB_TOL <= p <= 1 + PROB_TOL:
        raise InvalidInput(f"probability {p!r} outside [0, 1]")
    return int(rng.binomial(nu, min(max(p, 0.0), 1.0)))


def estimate_theta(success_fraction, n_qubits: int):
    """``arccos(2 p - 1) / 2**N``, clipped to the branch ``[0, pi / 2**N]``.

    Works elementwise on arrays.
    """
    arg = np.clip(2.0 * np.asarray(success_fraction, dtype=float) - 1.0, -1.0, 1.0)
    out = np.arccos(arg) / 2.0 ** n_qubits
    return float(out) if out.ndim == 0 else out


def signal_probability(n_qubits: int, theta: float) -> float:
    """All-up probability of the simulated evolved state."""
    ts = generate_terms(n_qubits, Generator.H)
    return all_up_probability(apply_exp_termset(prepare_all_up(n_qubits), ts, theta))


def mean_estimate(n_qubits: int, theta: float, nu: int) -> float:
    """Exact binomial average of :func:`estimate_theta` at true angle ``theta``."""
    p = min(max(0.5 * (1.0 + math.cos(theta * 2.0 ** n_qubits)), 0.0), 1.0)
    k = np.arange(nu + 1)
    return float(np.dot(stats.binom.pmf(k, nu, p), estimate_theta(k / nu, n_qubits)))


def derivative_normalization(n_qubits: int, theta: float, nu: int) -> float:
    """``|d<theta_est>/dtheta|`` by a two-sided difference of :func:`mean_estimate`."""
    step = 0.1 / (2.0 ** n_qubits * math.sqrt(nu))
    up = mean_estimate(n_qubits, theta + step, nu)
    down = mean_estimate(n_qubits, theta - step, nu)
    return abs(up - down) / (2 * step)


def _check_branch(cfg: MonteCarloConfig) -> None:
    margin = 5.0 / (2.0 ** cfg.n_qubits * math.sqrt(cfg.nu))
    upper = math.pi / 2.0 ** cfg.n_qubits
    if not margin <= cfg.theta_true <= upper - margin:
        raise InvalidInput(
            f"theta_true = {cfg.theta_true!r} must lie in [{margin:.6g}, {upper - margin:.6g}] "
            f"(monotonic branch minus a 5/(2^N sqrt(nu)) margin)"
        )


def run_monte_carlo(cfg: MonteCarloConfig) -> EstimationResult:
    """Repeat the CQC estimate ``cfg.trials`` times and summarize its error."""
    _check_branch(cfg)
    n = cfg.n_qubits
    p = signal_probability(n, cfg.theta_true)
    if p <= PROB_TOL or p >= 1 - PROB_TOL:
        raise InvalidInput("signal probability is 0 or 1; outcome variance vanishes")
    seeds = np.random.SeedSequence(cfg.seed).spawn(cfg.trials)

    def one_trial(ss):
        return sample_outcomes(p, cfg.nu, np.random.Generator(np.random.PCG64(ss)))

    counts = np.array(ordered_map(one_trial, seeds))
    estimates = np.atleast_1d(estimate_theta(counts / cfg.nu, n))
    norm = derivative_normalization(n, cfg.theta_true, cfg.nu)
    sq = (estimates / norm - cfg.theta_true) ** 2
    msq = float(np.mean(sq))
    delta = math.sqrt(msq)
    if cfg.trials > 1 and delta > 0:
        se = float(np.std(sq, ddof=1)) / math.sqrt(cfg.trials) / (2 * delta)
    else:
        se = float("nan")
    half = 2.0 ** (n - 1)
    mean_est = float(np.mean(estimates))
    clipped = float(np.mean((counts == 0) | (counts == cfg.nu)))
    return EstimationResult(
        delta_nu_theta_empirical=delta,
        bc_bound=_bc_bound(half, -half, cfg.nu),
        theta_est_mean=mean_est,
        bias=mean_est - cfg.theta_true,
        standard_error=se,
        derivative_normalization=norm,
        clipped_fraction=clipped,
    )


def fisher_information(n_qubits: int, theta: float) -> float:
    """Per-shot Fisher information of the binomial outcome model.

    Computed directly from the log-likelihood of one Bernoulli outcome; for
    this protocol it equals ``4**N`` wherever ``0 < p < 1``.
    """
    scale = 2.0 ** n_qubits
    p = 0.5 * (1.0 + math.cos(theta * scale))
    dp = -0.5 * scale * math.sin(theta * scale)
    return dp * dp / (p * (1.0 - p))
