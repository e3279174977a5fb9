"""Command-line front end: ``qmet --command <name> [options]``.

Commands
--------
precision-scan  CQC precision over an (N, theta) grid with baseline columns
jc-evolve       resonant/off-resonant Jaynes-Cummings time trace
bounds          quantum, direct-sum and classical dispersions and bounds per N
commute-check   exhaustive commutation structure of the H and A term sets
monte-carlo     repeated-estimation error versus the Cramer-Rao bound

Exit codes: 0 success, 1 validation failure, 2 numerical-property violation.
Every number is printed with 17 significant digits.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from . import estimation, jaynes_cummings as jc, metrology
from .exceptions import QmetError
from .parallel import ordered_map
from .pauli import MAX_DENSE_QUBITS, Generator, commutes, generate_terms
from .statevector import all_up_projector, prepare_all_down, prepare_all_up

COMMANDS = ("precision-scan", "jc-evolve", "bounds", "commute-check", "monte-carlo")
MAX_COMMUTE_QUBITS = 8

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_VIOLATION = 2


class ConfigError(Exception):
    """Invalid configuration, reported with the offending field."""


class PropertyViolation(Exception):
    """A checked property of the output does not hold."""


@dataclass
class ScanConfig:
    command: str
    n_min: int = 1
    n_max: int = 10
    theta_start: float | None = None
    theta_stop: float | None = None
    theta_count: int = metrology.DEFAULT_GRID_POINTS
    format: str = "csv"
    out: str | None = None
    seed: int = 0
    extra: dict = field(default_factory=dict)

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise ConfigError(f"field 'command': expected one of {', '.join(COMMANDS)}, "
                              f"got {self.command!r}")
        if self.format not in ("json", "csv"):
            raise ConfigError(f"field 'format': expected json or csv, got {self.format!r}")
        if not 1 <= self.n_min <= self.n_max:
            raise ConfigError(f"fields 'n_min'/'n_max': need 1 <= n_min <= n_max, "
                              f"got {self.n_min}..{self.n_max}")
        if self.theta_count < 1:
            raise ConfigError(f"field 'theta_count': theta grid is empty (count = {self.theta_count})")
        if (self.theta_start is None) != (self.theta_stop is None):
            raise ConfigError("fields 'theta_start'/'theta_stop': give both or neither")
        if not 0 <= self.seed < 2**64:
            raise ConfigError(f"field 'seed': must be a 64-bit unsigned integer, got {self.seed}")

    def theta_grid(self, n_qubits: int) -> np.ndarray:
        if self.theta_start is None:
            grid = metrology.default_theta_grid(n_qubits, self.theta_count)
        else:
            grid = np.linspace(self.theta_start, self.theta_stop, self.theta_count)
        for k, theta in enumerate(grid):
            if metrology.is_stationary(n_qubits, float(theta)):
                raise ConfigError(
                    f"field 'theta_grid': point {k} (theta = {theta:.17g}) is a stationary "
                    f"point theta*2^N = k*pi for N = {n_qubits}"
                )
        return grid

    def get(self, key: str, default: Any) -> Any:
        return self.extra.get(key, default)


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------

def _fmt(value: Any) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return "nan"
        return format(value, ".17g")
    return str(value)


def _json_value(value: Any) -> str:
    if isinstance(value, (float, np.floating)) and not math.isfinite(float(value)):
        return "null"
    if isinstance(value, (bool, np.bool_, int, np.integer, float, np.floating)):
        return _fmt(value)
    return json.dumps(str(value))


def render(rows: Sequence[dict], fmt: str, columns: Sequence[str] | None = None) -> str:
    """Rows as CSV (header + lines) or a JSON array of flat objects."""
    if columns is None:
        columns = list(rows[0]) if rows else []
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(row[c]) for c in columns])
        return buf.getvalue()
    lines = []
    for row in rows:
        body = ", ".join(f"{json.dumps(c)}: {_json_value(row[c])}" for c in columns)
        lines.append("  {" + body + "}")
    return "[\n" + ",\n".join(lines) + "\n]\n" if lines else "[]\n"


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def _n_values(cfg: ScanConfig, limit: int) -> range:
    if cfg.n_max > limit:
        raise ConfigError(f"field 'n_max': {cfg.command} supports N <= {limit}, got {cfg.n_max}")
    return range(cfg.n_min, cfg.n_max + 1)


def cmd_precision_scan(cfg: ScanConfig) -> tuple[list[dict], list[str]]:
    generator = cfg.get("generator", "H")
    derivative = cfg.get("derivative", "analytic")
    nu = int(cfg.get("nu", 1))
    if generator not in ("H", "A"):
        raise ConfigError(f"field 'generator': expected H or A, got {generator!r}")
    if derivative not in ("analytic", "numeric"):
        raise ConfigError(f"field 'derivative': expected analytic or numeric, got {derivative!r}")
    tol = 1e-9 if derivative == "analytic" else 1e-6
    ns = list(_n_values(cfg, MAX_DENSE_QUBITS))
    grids = {n: cfg.theta_grid(n) for n in ns}

    def scan(n):
        return metrology.run_cqc_grid(n, grids[n], generator, derivative=derivative, nu=nu)

    rows = []
    for n, reports in zip(ns, ordered_map(scan, ns)):
        baseline = metrology.DirectSumSpec(n, 1.0, -1.0)
        for rep in reports:
            row = rep.to_dict()
            row["delta_theta_expected"] = 2.0 ** (-n)
            row["direct_sum_dispersion"] = metrology.direct_sum_dispersion_bound(baseline)
            row["direct_sum_mt_bound"] = metrology.direct_sum_precision_bound(baseline)
            row["classical_dispersion"] = metrology.classical_dispersion(
                np.ones(1 << (n - 1)))
            rows.append(row)
            if abs(rep.delta_theta - 2.0 ** (-n)) > tol:
                raise PropertyViolation(
                    f"N={n} theta={rep.theta:.17g}: delta_theta={rep.delta_theta:.17g} "
                    f"differs from 2^-N by more than {tol:g}")
    return rows, list(rows[0]) if rows else []


def cmd_jc_evolve(cfg: ScanConfig) -> tuple[list[dict], list[str]]:
    n_qubits = int(cfg.get("n_qubits", 2))
    omega = float(cfg.get("omega", 1.0))
    Omega = float(cfg.get("Omega", n_qubits * omega))
    g = float(cfg.get("g", 0.1))
    photons = int(cfg.get("photon_number", 0))
    cutoff = int(cfg.get("fock_cutoff", jc.cutoff_for(photons)))
    try:
        model = jc.JCModel(n_qubits, omega, Omega, g, cutoff)
    except QmetError as exc:
        raise ConfigError(f"JC model: {exc}") from exc
    scale = abs(g) * math.sqrt(photons + 1) * 2.0 ** n_qubits
    period = 2 * math.pi / scale if scale > 0 else 1.0
    t_start = float(cfg.get("t_start", 0.0))
    t_stop = float(cfg.get("t_stop", 2 * period))
    t_count = int(cfg.get("t_count", 101))
    if t_count < 1:
        raise ConfigError(f"field 't_count': time grid is empty (count = {t_count})")
    initial = jc.JointState.basis(model, photons, 0)
    projector = all_up_projector(n_qubits)
    down = model.qubit_dim - 1
    rows = []
    for t in np.linspace(t_start, t_stop, t_count):
        state = jc.evolve(model, initial, float(t))
        rho = jc.partial_trace_photons(state)
        amp_up = state.amplitudes[photons, 0]
        amp_down = state.amplitudes[photons + 1, down]
        row = {
            "t": float(t),
            "theta": jc.cqc_angle(model, float(t), photons),
            "expectation_X": rho.expectation(projector),
            "population_all_up": float(rho.matrix[0, 0].real),
            "population_all_down": float(rho.matrix[down, down].real),
            "amp_n_up_re": float(amp_up.real),
            "amp_n_up_im": float(amp_up.imag),
            "amp_n1_down_re": float(amp_down.real),
            "amp_n1_down_im": float(amp_down.imag),
        }
        rows.append(row)
        if model.resonant():
            expected = 0.5 * (1 + math.cos(row["theta"] * 2.0 ** n_qubits))
            if abs(row["expectation_X"] - expected) > 1e-9:
                raise PropertyViolation(
                    f"t={t:.17g}: <X>={row['expectation_X']:.17g}, expected {expected:.17g}")
    return rows, list(rows[0]) if rows else []


def cmd_bounds(cfg: ScanConfig) -> tuple[list[dict], list[str]]:
    nu = int(cfg.get("nu", 1))
    if nu < 1:
        raise ConfigError(f"field 'nu': must be >= 1, got {nu}")

    def one(n):
        half = 2.0 ** (n - 1)
        baseline = metrology.DirectSumSpec(n, 1.0, -1.0)
        disp_h = metrology.dispersion(prepare_all_up(n), generate_terms(n, Generator.H))
        disp_a = metrology.dispersion(prepare_all_down(n), generate_terms(n, Generator.A))
        classical = metrology.classical_dispersion(np.ones(1 << (n - 1)))
        return {
            "n_qubits": n,
            "dispersion_H_all_up": disp_h,
            "dispersion_A_all_down": disp_a,
            "dispersion_max": half,
            "mt_bound": metrology.mt_bound(half, -half),
            "bc_bound": metrology.bc_bound(half, -half, nu),
            "nu": nu,
            "direct_sum_dispersion": metrology.direct_sum_dispersion_bound(baseline),
            "direct_sum_mt_bound": metrology.direct_sum_precision_bound(baseline),
            "classical_dispersion": classical,
            "quantum_classical_ratio": half / classical,
        }

    rows = ordered_map(one, list(_n_values(cfg, MAX_DENSE_QUBITS)))
    for row in rows:
        for key in ("dispersion_H_all_up", "dispersion_A_all_down"):
            if abs(row[key] - row["dispersion_max"]) > 1e-9:
                raise PropertyViolation(f"N={row['n_qubits']}: {key}={row[key]:.17g} "
                                        f"!= 2^(N-1)")
    return rows, list(rows[0]) if rows else []


def commute_report(n: int) -> tuple[dict, str | None]:
    """Pair counts for one N and the first counterexample, if any."""
    hs = generate_terms(n, Generator.H).terms
    as_ = generate_terms(n, Generator.A).terms
    first = None

    def intra(terms, name):
        nonlocal first
        count = good = 0
        for i in range(len(terms)):
            for j in range(i + 1, len(terms)):
                count += 1
                if commutes(terms[i], terms[j]):
                    good += 1
                elif first is None:
                    first = f"{name}: {terms[i].label} and {terms[j].label} anticommute"
        return count, good

    h_pairs, h_comm = intra(hs, "H")
    a_pairs, a_comm = intra(as_, "A")
    cross = anti = 0
    for p in hs:
        for q in as_:
            cross += 1
            if not commutes(p, q):
                anti += 1
            elif first is None:
                first = f"H/A: {p.label} and {q.label} commute"
    row = {
        "n_qubits": n,
        "h_pairs": h_pairs,
        "h_commuting": h_comm,
        "a_pairs": a_pairs,
        "a_commuting": a_comm,
        "cross_pairs": cross,
        "cross_anticommuting": anti,
        "ok": first is None,
    }
    return row, first


def cmd_commute_check(cfg: ScanConfig) -> tuple[list[dict], list[str]]:
    results = ordered_map(commute_report, list(_n_values(cfg, MAX_COMMUTE_QUBITS)))
    rows = [r for r, _ in results]
    for _, bad in results:
        if bad is not None:
            raise PropertyViolation(f"first counterexample: {bad}")
    return rows, list(rows[0]) if rows else []


def row_seed(seed: int, n: int, nu: int) -> int:
    """Per-row seed derived from the run seed, N and nu."""
    return int(np.random.SeedSequence([seed, n, nu]).generate_state(1, np.uint64)[0])


def cmd_monte_carlo(cfg: ScanConfig) -> tuple[list[dict], list[str]]:
    nu_values = [int(v) for v in cfg.get("nu_values", [1000, 10000])]
    trials = int(cfg.get("trials", 200))
    if not nu_values or min(nu_values) < 1:
        raise ConfigError("field 'nu_values': need a non-empty list of positive integers")
    if trials < 1:
        raise ConfigError(f"field 'trials': must be >= 1, got {trials}")
    tasks = [(n, nu) for n in _n_values(cfg, MAX_DENSE_QUBITS) for nu in nu_values]

    def one(task):
        n, nu = task
        theta = float(cfg.get("theta_true", math.pi / 2.0 ** (n + 1)))
        try:
            mc = estimation.MonteCarloConfig(n, theta, nu, trials, row_seed(cfg.seed, n, nu))
            res = estimation.run_monte_carlo(mc)
        except QmetError as exc:
            raise ConfigError(f"N={n} nu={nu}: {exc}") from exc
        return {"N": n, "nu": nu, "delta_nu_empirical": res.delta_nu_theta_empirical,
                "theta_true": theta, "trials": trials, **res.to_dict()}

    rows = ordered_map(one, tasks)
    for row in rows:
        if row["delta_nu_empirical"] < row["bc_bound"] - 3 * row["standard_error"]:
            raise PropertyViolation(
                f"N={row['N']} nu={row['nu']}: empirical error {row['delta_nu_empirical']:.17g} "
                f"below the Cramer-Rao bound by more than 3 standard errors")
    if cfg.format == "csv":
        return rows, ["N", "nu", "delta_nu_empirical", "bc_bound"]
    return rows, [k for k in rows[0] if k != "delta_nu_theta_empirical"] if rows else []


HANDLERS = {
    "precision-scan": cmd_precision_scan,
    "jc-evolve": cmd_jc_evolve,
    "bounds": cmd_bounds,
    "commute-check": cmd_commute_check,
    "monte-carlo": cmd_monte_carlo,
}


# ---------------------------------------------------------------------------
# argument handling
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qmet", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--command", choices=COMMANDS)
    parser.add_argument("--n-min", type=int, dest="n_min")
    parser.add_argument("--n-max", type=int, dest="n_max")
    parser.add_argument("--theta-start", type=float, dest="theta_start")
    parser.add_argument("--theta-stop", type=float, dest="theta_stop")
    parser.add_argument("--theta-count", type=int, dest="theta_count")
    parser.add_argument("--format", choices=("json", "csv"))
    parser.add_argument("--out", metavar="PATH")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--config", metavar="PATH",
                        help="JSON object of settings; flags override it")
    return parser


_FLAG_FIELDS = ("command", "n_min", "n_max", "theta_start", "theta_stop", "theta_count",
                "format", "out", "seed")


def _load_config(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a JSON object")
    return data


def make_config(args: argparse.Namespace) -> ScanConfig:
    data = _load_config(args.config) if args.config else {}
    data = {k.replace("-", "_"): v for k, v in data.items()}
    for name in _FLAG_FIELDS:
        value = getattr(args, name)
        if value is not None:
            data[name] = value
    if "command" not in data:
        raise ConfigError("field 'command': required (use --command or the config file)")
    known = {k: data.pop(k) for k in list(data) if k in _FLAG_FIELDS}
    try:
        cfg = ScanConfig(**known, extra=data)
        cfg.n_min, cfg.n_max, cfg.theta_count, cfg.seed = (
            int(cfg.n_min), int(cfg.n_max), int(cfg.theta_count), int(cfg.seed))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid configuration value: {exc}") from exc
    cfg.validate()
    return cfg


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = make_config(args)
        rows, columns = HANDLERS[cfg.command](cfg)
    except ConfigError as exc:
        print(f"qmet: validation error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except PropertyViolation as exc:
        print(f"qmet: property violation: {exc}", file=sys.stderr)
        return EXIT_VIOLATION
    except QmetError as exc:
        print(f"qmet: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    text = render(rows, cfg.format, columns)
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
