"""Exit criteria for the package, one test per criterion.

Run ``pytest tests/test_acceptance.py`` to see one PASS/FAIL line per criterion
in the terminal summary.
"""

import itertools
import math
import time

import numpy as np

from qmet import cli
from qmet.estimation import MonteCarloConfig, run_monte_carlo
from qmet.jaynes_cummings import (
    DensityMatrix,
    JCModel,
    JointState,
    analytic_eigenstates,
    analytic_eigenvalues,
    build_hamiltonian,
    evolve,
    kraus_map,
    partial_trace_photons,
    traced_evolution,
)
from qmet.metrology import (
    DenseEvolutionFamily,
    EvolutionFamily,
    default_theta_grid,
    dispersion,
    precision,
    run_cqc_grid,
)
from qmet.exceptions import StationaryPoint
from qmet.pauli import TermSet, commutes, dense_matrix, dense_sum, generate_terms
from qmet.statevector import (
    StateVector,
    all_up_projector,
    evolve_many,
    prepare_all_down,
    prepare_all_up,
)

from conftest import oracle_generators, random_hermitian, random_state

MC_SEED = 20261015


def test_criterion_01_cqc_precision(acceptance):
    start = time.perf_counter()
    worst = {"analytic": 0.0, "numeric": 0.0}
    for n in range(1, 13):
        grid = default_theta_grid(n)
        for path in worst:
            for rep in run_cqc_grid(n, grid, "H", derivative=path):
                worst[path] = max(worst[path], abs(rep.delta_theta - 2.0 ** -n))
    elapsed = time.perf_counter() - start
    ok = worst["analytic"] <= 1e-9 and worst["numeric"] <= 1e-6 and elapsed <= 60
    acceptance(1, "CQC delta_theta = 2^-N, N=1..12", ok,
               f"max err analytic {worst['analytic']:.2e} (tol 1e-9), numeric "
               f"{worst['numeric']:.2e} (tol 1e-6), {elapsed:.1f}s (limit 60s)")


def test_criterion_02_dispersion_maximum(acceptance):
    worst = 0.0
    for n in range(1, 13):
        for kind in ("H", "A"):
            ts = generate_terms(n, kind)
            for state in (prepare_all_up(n), prepare_all_down(n)):
                worst = max(worst, abs(dispersion(state, ts) - 2 ** (n - 1)))
    acceptance(2, "Delta H = Delta A = 2^(N-1) on all-up/all-down, N<=12", worst <= 1e-9,
               f"max err {worst:.2e} (tol 1e-9)")


def test_criterion_03_closed_form_state(acceptance):
    thetas = np.linspace(0.05, 3.0, 16)
    worst = 0.0
    for n in range(1, 13):
        up, down = 0, 2 ** n - 1
        for kind in ("H", "A"):
            states = evolve_many(prepare_all_up(n), generate_terms(n, kind), thetas)
            for theta, state in zip(thetas, states):
                expected = np.zeros(2 ** n, dtype=complex)
                expected[up] = math.cos(2 ** (n - 1) * theta)
                s = math.sin(2 ** (n - 1) * theta)
                expected[down] = -1j * s if kind == "H" else s
                worst = max(worst, float(np.max(np.abs(state.amplitudes - expected))))
    acceptance(3, "factored product reproduces closed-form states, N<=12, 16 angles",
               worst <= 1e-10, f"max amplitude err {worst:.2e} (tol 1e-10)")


def test_criterion_04_algebraic_structure(acceptance):
    failures = []
    for n in range(1, 9):
        hs = generate_terms(n, "H").terms
        as_ = generate_terms(n, "A").terms
        for terms in (hs, as_):
            for p, q in itertools.combinations(terms, 2):
                if not commutes(p, q):
                    failures.append((p.label, q.label))
        for p in hs:
            for q in as_:
                if commutes(p, q):
                    failures.append((p.label, q.label))
    dense_mismatch = 0
    for n in range(1, 5):
        atoms = generate_terms(n, "H").terms + generate_terms(n, "A").terms
        for p, q in itertools.product(atoms, repeat=2):
            a, b = dense_matrix(p), dense_matrix(q)
            if commutes(p, q) != bool(np.all(a @ b == b @ a)):
                dense_mismatch += 1
    ok = not failures and dense_mismatch == 0
    acceptance(4, "intra-set commutation / cross anticommutation, N<=8", ok,
               f"{len(failures)} symplectic violations, {dense_mismatch} dense disagreements (N<=4)")


def test_criterion_05_operator_identity(acceptance):
    worst = 0.0
    for n in range(1, 7):
        lhs = dense_sum(generate_terms(n, "H")) + 1j * dense_sum(generate_terms(n, "A"))
        sx = np.array([[0, 1], [1, 0]], dtype=complex)
        sy = np.array([[0, -1j], [1j, 0]], dtype=complex)
        rhs = np.array([[1.0 + 0j]])
        for _ in range(n):
            rhs = np.kron(rhs, sx + 1j * sy)
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    acceptance(5, "dense H + iA = (X+iY)^{(x)N}, N<=6", worst <= 1e-12,
               f"max elementwise err {worst:.2e} (tol 1e-12)")


def test_criterion_06_uncertainty_relation(acceptance):
    rng = np.random.default_rng(6)
    checked = skipped = 0
    worst_margin = math.inf
    for trial in range(200):
        n = int(rng.integers(1, 6))
        dim = 2 ** n
        psi = StateVector.from_array(random_state(rng, dim))
        observable = random_hermitian(rng, dim)
        if trial % 2 == 0:
            family = DenseEvolutionFamily(psi, random_hermitian(rng, dim))
        else:
            ts = generate_terms(n, rng.choice(["H", "A"]))
            keep = rng.random(len(ts)) < 0.7
            terms = tuple(p for p, k in zip(ts.terms, keep) if k) or ts.terms[:1]
            family = EvolutionFamily(psi, TermSet(n, terms, ts.kind))
        theta = float(rng.uniform(-2, 2))
        try:
            rep = precision(family, observable, theta)
        except StationaryPoint:
            skipped += 1
            continue
        checked += 1
        worst_margin = min(worst_margin, rep.delta_theta - 1 / (2 * rep.dispersion_H))
    ok = worst_margin >= -1e-8 and checked > 0
    acceptance(6, "delta_theta >= 1/(2 Delta H) on 200 random triples, N<=5", ok,
               f"{checked} checked, {skipped} stationary, min margin {worst_margin:.2e} "
               f"(tol -1e-8)")


def test_criterion_07_jc_eigensystem(acceptance):
    worst_val = 0.0
    worst_overlap = 0.0
    for n_q in range(1, 5):
        for det in (0.0, 0.3, -0.4, 1.1, -2.5):
            for n in range(0, 6):
                model = JCModel(n_q, 3.0, n_q * 3.0 - det, 0.13, n + 2)
                evals, evecs = np.linalg.eigh(build_hamiltonian(model))
                for lam, vec in zip(analytic_eigenvalues(model, n),
                                    analytic_eigenstates(model, n)):
                    worst_val = max(worst_val, float(np.min(np.abs(evals - lam))))
                    space = evecs[:, np.abs(evals - lam) <= 1e-9]
                    captured = float(np.linalg.norm(space.conj().T @ vec.flat()) ** 2)
                    worst_overlap = max(worst_overlap, 1 - captured)
    ok = worst_val <= 1e-9 and worst_overlap <= 1e-9
    acceptance(7, "JC analytic eigensystem vs dense diagonalization, N<=4, n<=5", ok,
               f"max eigenvalue err {worst_val:.2e}, max 1-overlap {worst_overlap:.2e} (tol 1e-9)")


def test_criterion_08a_jc_signal(acceptance):
    worst = 0.0
    for n_q in range(1, 5):
        for n in range(0, 4):
            g = 0.09
            model = JCModel(n_q, 1.0, float(n_q), g, n + 2)
            for t in np.linspace(0.1, 20.0, 9):
                rho = partial_trace_photons(evolve(model, JointState.basis(model, n, 0), t))
                theta = t * g * math.sqrt(n + 1)
                expected = 0.5 * (1 + math.cos(theta * 2 ** n_q))
                worst = max(worst, abs(rho.expectation(all_up_projector(n_q)) - expected))
    acceptance("8a", "traced resonant JC evolution gives <X> = (1+cos(t g sqrt(n+1) 2^N))/2",
               worst <= 1e-10, f"max err {worst:.2e} (tol 1e-10)")


def test_criterion_08b_kraus_vs_traced_evolution(acceptance):
    worst = 0.0
    worst_case = ""
    for n_q in range(1, 4):
        g, n = 0.09, 1
        model = JCModel(n_q, 1.0, float(n_q), g, n + 3)
        for w in (1.0, 0.7, 0.5):
            rho0 = np.zeros((2 ** n_q,) * 2, dtype=complex)
            rho0[0, 0], rho0[-1, -1] = w, 1 - w
            rho0 = DensityMatrix(rho0)
            for t in (0.5, 2.0, 6.0):
                theta = t * g * math.sqrt(n + 1)
                diff = float(np.max(np.abs(kraus_map(rho0, theta, n_q).matrix
                                           - traced_evolution(model, rho0, n, t).matrix)))
                if diff > worst:
                    worst, worst_case = diff, f"N={n_q}, rho0[0,0]={w}, t={t}"
    acceptance("8b", "Kraus map equals photon-traced evolution on supported inputs",
               worst <= 1e-10, f"max density-matrix err {worst:.2e} (tol 1e-10) at {worst_case}")


def test_criterion_09_monte_carlo_scaling(acceptance):
    start = time.perf_counter()
    worst_rel = 0.0
    slopes = []
    for n in (2, 3, 4):
        deltas = []
        for nu in (1000, 10000):
            cfg = MonteCarloConfig(n, math.pi / 2 ** (n + 1), nu, 200,
                                   cli.row_seed(MC_SEED, n, nu))
            res = run_monte_carlo(cfg)
            target = 2.0 ** -n / math.sqrt(nu)
            worst_rel = max(worst_rel, abs(res.delta_nu_theta_empirical / target - 1))
            deltas.append(res.delta_nu_theta_empirical)
        slopes.append(math.log(deltas[1] / deltas[0]) / math.log(10))
    elapsed = time.perf_counter() - start
    slope_err = max(abs(s + 0.5) for s in slopes)
    ok = worst_rel <= 0.10 and slope_err <= 0.05 and elapsed <= 120
    acceptance(9, "Monte-Carlo delta_nu within 10% of 2^-N/sqrt(nu), slope -0.5", ok,
               f"max rel err {worst_rel:.3f} (tol 0.10), slopes "
               f"{', '.join(f'{s:.3f}' for s in slopes)} (tol 0.05), {elapsed:.1f}s (limit 120s)")


def test_criterion_10_cli_determinism(acceptance, tmp_path):
    mismatched = []
    for command in cli.COMMANDS:
        for fmt in ("csv", "json"):
            blobs = []
            for k in range(2):
                path = tmp_path / f"{command}-{fmt}-{k}"
                code = cli.main(["--command", command, "--n-min", "1", "--n-max", "4",
                                 "--theta-count", "8", "--format", fmt, "--seed", "99",
                                 "--out", str(path)])
                assert code == cli.EXIT_OK, f"{command} exited {code}"
                blobs.append(path.read_bytes())
            if blobs[0] != blobs[1]:
                mismatched.append(f"{command}/{fmt}")
    acceptance(10, "byte-identical CLI output across reruns", not mismatched,
               f"{2 * len(cli.COMMANDS) - len(mismatched)}/{2 * len(cli.COMMANDS)} "
               f"command/format pairs identical")
