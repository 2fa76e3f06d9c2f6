"""Command-line front end.

Every subcommand reads its settings from flags and, optionally, a flat
``key = value`` file given with ``--config``. Flags win over the file.
Results go to ``--out`` as CSV tables plus a JSON sidecar named after the
command. Exit codes: 0 success, 2 configuration error, 3 computation error
(including failed checks).
"""
import argparse
import csv
from dataclasses import dataclass, field
import json
import math
from pathlib import Path
import sys

import numpy as np
from scipy.optimize import linear_sum_assignment

from . import dynamics, kernels, majorana, model, spectral, spin
from .numerics import eig_complex

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_COMPUTE = 3


class ConfigError(ValueError):
    """Invalid or inconsistent run configuration."""


def _positive_int(text):
    value = int(text)
    if value <= 0:
        raise ValueError(f"expected a positive integer, got {text}")
    return value


def _float_list(text):
    if isinstance(text, (list, tuple)):
        return [float(x) for x in text]
    return [float(x) for x in str(text).split(",") if x.strip()]


def _branch(text):
    if text not in ("minus", "plus"):
        raise ValueError(f"expected 'minus' or 'plus', got {text!r}")
    return text


def _scan_axis(text):
    if text not in ("mu", "ratio"):
        raise ValueError(f"expected 'mu' or 'ratio', got {text!r}")
    return text


def _method(text):
    if text not in ("closed", "eig"):
        raise ValueError(f"expected 'closed' or 'eig', got {text!r}")
    return text


# key -> (parser, default, help)
KEYS = {
    "J": (float, 1.0, "hopping J"),
    "delta_a": (float, 1.0, "pair strength delta_a"),
    "delta_b": (float, 1.0, "pair strength delta_b"),
    "mu": (float, 0.0, "chemical potential (pre-quench value is always 0)"),
    "N": (int, 4, "number of dimers (even)"),
    "zeta": (float, 0.0, "phase offset of the drive"),
    "dt": (float, 1e-3, "time step"),
    "T": (float, 2.0, "time horizon"),
    "scan": (_scan_axis, "mu", "scanned parameter: mu or ratio"),
    "values": (_float_list, [0.0, 0.001, 0.01], "comma-separated scan values"),
    "pair_sum": (float, 3.0, "delta_a + delta_b for ratio scans"),
    "t_max": (float, 20.0, "last time of the scan grid"),
    "t_points": (_positive_int, 401, "number of scan times"),
    "threshold": (float, 0.5, "fidelity drop threshold"),
    "workers": (_positive_int, 1, "threads for independent work items"),
    "branch": (_branch, "minus", "zero-mode branch: minus or plus"),
    "method": (_method, "closed", "ladder values: closed or eig"),
    "sites": (_positive_int, 8, "number of spins (even, at most 12)"),
}

MODEL_KEYS = ("J", "delta_a", "delta_b", "mu", "N")

COMMANDS = {
    "spectrum": MODEL_KEYS,
    "ground-state": MODEL_KEYS + ("workers",),
    "fixed-line-drive": ("J", "N", "zeta", "dt", "T"),
    "quench-scan": MODEL_KEYS + ("scan", "values", "pair_sum", "t_max", "t_points",
                                 "threshold", "workers"),
    "zero-modes": MODEL_KEYS + ("branch",),
    "ladder-energy": MODEL_KEYS + ("method",),
    "spin-check": ("sites",),
    "heisenberg-check": ("sites",),
    "oracle-verify": ("J", "delta_a", "delta_b", "N"),
}

COMMAND_HELP = {
    "spectrum": "closed-form quasiparticle energies on the momentum grid",
    "ground-state": "block ground state and its energy",
    "fixed-line-drive": "fidelity under the time-dependent pair drive",
    "quench-scan": "fidelity over time and mu or delta_a/delta_b after a quench",
    "zero-modes": "resonant zero modes of the Majorana ladder and their profile",
    "ladder-energy": "half-filled ladder energy against the elliptic closed form",
    "spin-check": "GHZ identities of the spin picture",
    "heisenberg-check": "x-polarized states of the Heisenberg ring",
    "oracle-verify": "brute-force cross-checks at small size",
}


@dataclass(frozen=True)
class RunConfig:
    command: str
    values: dict
    out: Path
    params: model.ModelParams = None
    sources: dict = field(default_factory=dict)

    def __getitem__(self, key):
        return self.values[key]


def read_config_file(path):
    """Parse a flat ``key = value`` file; ``#`` starts a comment."""
    out = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc.strerror}") from None
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def _convert(key, raw):
    parser = KEYS[key][0]
    try:
        return parser(raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{key}: cannot parse {raw!r} ({exc})") from None


def build_parser():
    parser = argparse.ArgumentParser(prog="nhkitaev", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")
    for name, keys in COMMANDS.items():
        cmd = sub.add_parser(name, help=COMMAND_HELP[name], description=COMMAND_HELP[name])
        cmd.add_argument("--config", help="flat key = value file; flags override it")
        cmd.add_argument("--out", default="out", help="output directory (default: out)")
        for key in keys:
            _, default, text = KEYS[key]
            flag = "--" + key.replace("_", "-")
            shown = ",".join(map(str, default)) if isinstance(default, list) else default
            cmd.add_argument(flag, dest=key, default=None, metavar=key.upper(),
                             help=f"{text} (default: {shown})")
    return parser


def parse_config(argv=None):
    """Parse flags and the optional config file into a validated :class:`RunConfig`.

    Raises
    ------
    ConfigError
        Unknown key, unparsable value or a violated precondition.
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        if exc.code == 0:
            raise
        raise ConfigError("invalid command line (see --help)") from None
    keys = COMMANDS[args.command]
    values, sources = {}, {}
    for key in keys:
        values[key] = KEYS[key][1]
        sources[key] = "default"
    if args.config:
        for key, raw in read_config_file(args.config).items():
            if key not in keys:
                raise ConfigError(f"unknown key {key!r} for {args.command} "
                                  f"(allowed: {', '.join(keys)})")
            values[key] = _convert(key, raw)
            sources[key] = "file"
    for key in keys:
        raw = getattr(args, key)
        if raw is not None:
            values[key] = _convert(key, raw)
            sources[key] = "flag"
    params = _validate(args.command, values)
    return RunConfig(args.command, values, Path(args.out), params, sources)


def _validate(command, v):
    """Check command preconditions; returns the ModelParams, if any."""
    params = None
    try:
        if "N" in v:
            params = model.ModelParams(J=v["J"], delta_a=v.get("delta_a", 1.0),
                                       delta_b=v.get("delta_b", 1.0),
                                       mu=v.get("mu", 0.0), N=v["N"])
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None
    for key in ("dt", "T", "t_max"):
        if key in v and not (v[key] > 0 and math.isfinite(v[key])):
            raise ConfigError(f"{key} must be positive and finite, got {v[key]}")
    if command in ("spectrum", "ground-state", "zero-modes", "ladder-energy") and v["mu"] != 0.0:
        raise ConfigError(f"{command} is defined at mu = 0 (got mu = {v['mu']})")
    if command == "fixed-line-drive" and v["T"] / v["dt"] > 1e7:
        raise ConfigError("T / dt exceeds 1e7 steps")
    if command == "quench-scan":
        if not 0.0 < v["threshold"] < 1.0:
            raise ConfigError(f"threshold must lie in (0, 1), got {v['threshold']}")
        if not v["values"]:
            raise ConfigError("values must list at least one scan value")
        if v["scan"] == "ratio" and any(r <= 0 for r in v["values"]):
            raise ConfigError("ratio scan values must be positive")
    if command in ("spin-check", "heisenberg-check"):
        L = v["sites"]
        if L % 2 or L < 4 or L > spin.MAX_SITES:
            raise ConfigError(f"sites must be even, between 4 and {spin.MAX_SITES}, got {L}")
    if command == "oracle-verify" and 2 * v["N"] > model.FOCK_MAX_SITES:
        raise ConfigError(f"oracle-verify needs 2N <= {model.FOCK_MAX_SITES}, got N = {v['N']}")
    return params


# ---------------------------------------------------------------- output


def fmt(x):
    """Fixed 17-significant-digit text for CSV cells."""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    if x is None:
        return ""
    return str(x)


def write_csv(path, header, rows):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(x) for x in row])
    return path


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else str(x)
    if isinstance(x, complex):
        return [x.real, x.imag]
    if isinstance(x, Path):
        return x.name
    return x


def write_json(path, data):
    path.parent.mkdir(parents=True, exist_ok=True)
    text = json.dumps(_jsonable(data), indent=2, sort_keys=True)
    path.write_text(text + "\n", encoding="utf-8")
    return path


# -------------------------------------------------------------- commands


def _run_spectrum(cfg):
    p = cfg.params
    rows, worst = [], 0.0
    for k in model.momentum_grid(p.N).pairs:
        closed = np.array([spectral.quasiparticle_energy(p, k, b) for b in spectral.BANDS])
        numeric = eig_complex(model.core_matrix(p, k), left=False).values
        worst = max(worst, _multiset_distance(closed, numeric))
        for b, e in zip(spectral.BANDS, closed):
            rows.append((k, b.rho, b.sigma, e.real, e.imag))
    csv_path = write_csv(cfg.out / "spectrum.csv", ["k", "rho", "sigma", "re", "im"], rows)
    return {"outputs": [csv_path], "max_eig_mismatch": worst, "passed": worst <= 1e-10}


def _run_ground_state(cfg):
    p = cfg.params
    gs = spectral.ground_state(p, workers=cfg["workers"])
    residuals = spectral.block_residuals(gs)
    rows = []
    blocks = [("zero", gs.zero_factor), ("pi", gs.pi_factor)]
    blocks += [(k, v) for k, v in gs.pair_vectors.items()]
    for name, vec in blocks:
        for i, a in enumerate(vec.amplitudes):
            rows.append((name, i, a.real, a.imag))
    csv_path = write_csv(cfg.out / "ground_state.csv", ["block", "index", "re", "im"], rows)
    worst = max(residuals.values())
    return {"outputs": [csv_path], "energy": gs.energy.real,
            "energy_imag": gs.energy.imag, "max_block_residual": worst,
            "passed": worst <= 1e-10}


def _run_drive(cfg):
    drive = dynamics.sine_drive(cfg["zeta"], cfg["dt"], cfg["T"])
    pre = dynamics.drive_params(model.ModelParams(J=cfg["J"], N=cfg["N"]), drive, 0.0)
    series = dynamics.evolve_driven(pre, drive)
    rows = zip(series.times, series.values, series.raw)
    csv_path = write_csv(cfg.out / "fidelity.csv", ["t", "fidelity", "raw"], rows)
    deviation = float(np.max(np.abs(series.values - 1.0)))
    return {"outputs": [csv_path], "max_deviation_from_one": deviation,
            "convergence_estimate": series.convergence_estimate,
            "converged": series.converged, "normalization_policy": series.normalization_policy,
            "overflow_time": series.overflow_time,
            "passed": deviation <= 1e-6 and bool(series.converged)}


def _run_scan(cfg):
    p = cfg.params
    if cfg["scan"] == "mu":
        families = dynamics.mu_family(p.J, p.delta_a, p.delta_b, p.N)
    else:
        families = dynamics.ratio_family(p.J, cfg["pair_sum"], p.mu, p.N)
    times = np.linspace(0.0, cfg["t_max"], cfg["t_points"])
    res = dynamics.scan_quench(*families, times, cfg["values"], threshold=cfg["threshold"],
                               workers=cfg["workers"])
    header = ["t"] + [fmt(x) for x in res.params]
    rows = ([t] + list(row) for t, row in zip(res.times, res.values))
    csv_path = write_csv(cfg.out / "quench_scan.csv", header, rows)
    return {"outputs": [csv_path], "scan": cfg["scan"], "params": res.params,
            "drop_times": res.drop_times, "threshold": res.threshold,
            "failures": res.failures, "normalization_policy": dynamics.NORMALIZED,
            "passed": not res.failures}


def _run_zero_modes(cfg):
    p = cfg.params
    pair = majorana.zero_modes(p, cfg["branch"])
    res = majorana.resonance(p)
    residuals = majorana.zero_mode_residuals(p, cfg["branch"])
    edge = majorana.edge_state(pair)
    header = ["site", "sublattice", "re", "im", "abs"]
    outs = [write_csv(cfg.out / "edge_profile.csv", header, majorana.profile_rows(edge)),
            write_csv(cfg.out / "psi_L.csv", header, majorana.profile_rows(pair.psi_L)),
            write_csv(cfg.out / "psi_R.csv", header, majorana.profile_rows(pair.psi_R))]
    worst = max(residuals.values())
    return {"outputs": outs, "lambda": pair.lam, "gamma": res.gamma, "beta": res.beta,
            "lambda_plus": res.lambda_plus, "lambda_minus": res.lambda_minus,
            "residuals": residuals, "passed": worst <= 1e-10}


def _run_ladder(cfg):
    e = majorana.ladder_ground_energy(cfg.params, cfg["method"])
    csv_path = write_csv(cfg.out / "ladder_energy.csv",
                         ["N", "closed_form", "numeric", "relative_error", "eccentricity"],
                         [(cfg.params.N, e.closed_form, e.numeric, e.relative_error, e.eccentricity)])
    return {"outputs": [csv_path], "closed_form": e.closed_form, "numeric": e.numeric,
            "relative_error": e.relative_error, "passed": e.relative_error <= 1e-3}


def _checks_result(cfg, checks, name):
    rows = [(c.name, c.residual, c.tolerance, c.passed) for c in checks]
    csv_path = write_csv(cfg.out / name, ["identity", "residual", "tolerance", "passed"], rows)
    return {"outputs": [csv_path], "checks": {c.name: c.residual for c in checks},
            "passed": all(c.passed for c in checks)}


def _run_spin(cfg):
    return _checks_result(cfg, spin.ghz_report(cfg["sites"]), "spin_check.csv")


def _run_heisenberg(cfg):
    return _checks_result(cfg, spin.heisenberg_ring_check(cfg["sites"]), "heisenberg_check.csv")


def _multiset_distance(a, b):
    a, b = np.asarray(a), np.asarray(b)
    if a.shape != b.shape:
        return math.inf
    cost = np.abs(a[:, None] - b[None, :])
    r, c = linear_sum_assignment(cost)
    return float(cost[r, c].max()) if a.size else 0.0


def oracle_checks(p):
    """Brute-force cross-checks at ``mu = 0``; list of ``spin.IdentityCheck``."""
    p = p.with_(mu=0.0)
    out = []
    worst = 0.0
    for k in model.momentum_grid(p.N).pairs:
        closed = [spectral.quasiparticle_energy(p, k, b) for b in spectral.BANDS]
        worst = max(worst, _multiset_distance(closed, eig_complex(model.core_matrix(p, k)).values))
    out.append(spin.IdentityCheck("band energies vs eig(h_k)", worst, 1e-10))

    w = eig_complex(model.fock_hamiltonian(p), left=False).values
    out.append(spin.IdentityCheck("ground energy vs Fock minimum",
                                  abs(w.real.min() - spectral.ground_energy(p)), 1e-9))

    if p.N > 1 and abs(p.pair_sum - 2 * p.J) < 1e-12 and 2 * p.N <= spin.MAX_SITES:
        sw = eig_complex(spin.spin_hamiltonian(p).matrix, left=False).values
        out.append(spin.IdentityCheck("spin vs Fock spectrum", _multiset_distance(sw, w), 1e-9))

    times = np.linspace(0.0, 5.0, 51)
    pos = p.with_(mu=0.05)
    blocks = dynamics.evolve_quench(p, pos, times).values
    try:
        full = dynamics.evolve_quench_fock(p, pos, times).values
        out.append(spin.IdentityCheck("quench blocks vs full Fock",
                                      float(np.max(np.abs(blocks - full))), 1e-9))
    except ValueError:
        pass  # degenerate real-space ground state: no unique oracle state

    lw = eig_complex(majorana.build_majorana(p, 0.0).matrix, left=False).values
    out.append(spin.IdentityCheck("ladder spectrum vs eig(h_D)",
                                  _multiset_distance(majorana.ladder_spectrum(p), lw), 1e-10))
    return out


def _run_oracle(cfg):
    return _checks_result(cfg, oracle_checks(cfg.params), "oracle_verify.csv")


RUNNERS = {
    "spectrum": _run_spectrum,
    "ground-state": _run_ground_state,
    "fixed-line-drive": _run_drive,
    "quench-scan": _run_scan,
    "zero-modes": _run_zero_modes,
    "ladder-energy": _run_ladder,
    "spin-check": _run_spin,
    "heisenberg-check": _run_heisenberg,
    "oracle-verify": _run_oracle,
}


def run(cfg):
    """Execute one configured command; returns the exit status."""
    result = RUNNERS[cfg.command](cfg)
    meta = {
        "command": cfg.command,
        "config": cfg.values,
        "sources": cfg.sources,
        "backend": kernels.BACKEND,
        "result": {k: v for k, v in result.items() if k != "outputs"},
        "outputs": sorted(p.name for p in result["outputs"]),
    }
    write_json(cfg.out / f"{cfg.command.replace('-', '_')}.json", meta)
    return EXIT_OK if result["passed"] else EXIT_COMPUTE


def main(argv=None):
    try:
        cfg = parse_config(argv)
    except ConfigError as exc:
        print(f"nhkitaev: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        status = run(cfg)
    except (ValueError, ArithmeticError, np.linalg.LinAlgError, OSError) as exc:
        print(f"nhkitaev: {cfg.command} failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    if status != EXIT_OK:
        print(f"nhkitaev: {cfg.command}: checks failed, see {cfg.out}", file=sys.stderr)
    return status


if __name__ == "__main__":
    sys.exit(main())
