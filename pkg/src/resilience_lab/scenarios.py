"""Scenario registry, config files, CSV emission and run manifests.

Each scenario reproduces one figure-style dataset at desk scale. Configs are
flat ``key = value`` text files; every run writes fixed-format CSVs plus a
manifest with the config hash and per-file checksums so identical configs
reproduce identical bytes.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import os
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import detection
from .bounds import (
    TimeGrid,
    Trajectory,
    bound_ladder,
    certify_lemma,
    disorder_trace_bound,
    ensemble_rms_error,
    ensemble_trace_distance,
    frobenius_norm,
)
from .control import (
    ControlScenario,
    GibbsSweep,
    angular_khz,
    build_two_qubit_scenario,
    gate_error_sweep,
    load_pulse_table,
)
from .dynamics import (
    basis_state,
    haar_state,
    plus_state,
    propagator_const,
    subsystem_entropy,
)
from .fermion import (
    SectorBasis,
    build_hubbard,
    hubbard_perturbation,
    project_to_sector,
    site_qubits,
)
from .operators import diagonal_values
from .perturbation import (
    RNG_IDENTITY,
    build_qimf_1d,
    build_qimf_2d,
    lattice_qimf_noise,
    sample,
    standard_qimf_noise,
)

try:
    from importlib.metadata import version as _pkg_version

    CODE_VERSION = _pkg_version("resilience-lab")
except Exception:  # pragma: no cover
    CODE_VERSION = "unknown"

OUTPUT_ROOT_ENV = "RESILIENCE_LAB_OUT"


# ---------------------------------------------------------------------------
# configs
# ---------------------------------------------------------------------------

_COMMON_QIMF = {
    "seed": 7,
    "sigma_sq": 0.01,
    "sigma_is_variance": True,
    "eta": 0.01,
}

DEFAULTS: dict[str, dict] = {
    "fig2_longtime": {
        **_COMMON_QIMF,
        "n_sites": 10,
        "t_final": 6.0,
        "n_points": 61,
        "crossover_rel_tol": 0.05,
    },
    "fig2_segment": {
        **_COMMON_QIMF,
        "n_sites": 10,
        "t_final": 6.0,
        "n_points": 61,
        "segment_dt": 0.1,
        "haar_seeds": [11, 12],
    },
    "fig3_hubbard_segment": {
        "L": 8,
        "coulomb": 0.5,
        "delta": 0.01,
        "t_final": 6.0,
        "n_points": 61,
        "segment_dt": 0.1,
        "occupied_sites": [0, 2, 4, 6],
    },
    "fig4_crossterms": {
        **_COMMON_QIMF,
        "n_sites": 10,
        "times": [0.0, 0.5, 1.0, 2.0, 4.0, 6.0],
        "near_zero": 0.1,
        "initial_state": "typical",
    },
    "fig5_control_sweep": {
        "pulses": ["x_pi", "x_half_pi", "x_two_pi"],
        "n_spectators": 4,
        "delta_ez_mhz": 200.0,
        "j_khz": 100.0,
        "delta_khz": 50.0,
        "epsilon": 0.001,
        "angular": True,
        "t_min": 0.008,
        "t_max": 0.48,
        "t_step": 0.008,
    },
    "fig6_disorder_vs_imperfection": {
        **_COMMON_QIMF,
        "n_sites": 6,
        "t_final": 3.0,
        "n_points": 13,
        "n_samples": 200,
    },
    "fig7_hubbard_longtime": {
        "L": 8,
        "coulomb": 0.5,
        "delta": 0.01,
        "t_final": 6.0,
        "n_points": 31,
        "occupied_sites": [0, 2, 4, 6],
        "crossover_rel_tol": 0.05,
    },
    "supp_qimf2d": {
        **_COMMON_QIMF,
        "rows": 4,
        "cols": 3,
        "t_final": 3.0,
        "n_points": 31,
        "crossover_rel_tol": 0.05,
    },
    "supp_twoqubit": {
        "n_spectators": 6,
        "j_angular_mhz": 10.0 * math.pi,
        "delta_khz": 100.0,
        "j_res_khz": 100.0,
        "t_final": 100.0,
        "n_points": 41,
    },
    "lemma_certification": {
        "trials": 1000,
        "seed": 0,
        "max_qubits": 5,
    },
}


@dataclass(frozen=True)
class ScenarioConfig:
    scenario: str
    params: dict

    @classmethod
    def from_text(cls, text: str) -> "ScenarioConfig":
        scenario = None
        overrides = {}
        errors = []
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                errors.append(f"line {lineno}: expected 'key = value'")
                continue
            key, value = (part.strip() for part in line.split("=", 1))
            if key == "scenario":
                scenario = value
            else:
                overrides[key] = (lineno, _parse_value(value))
        if scenario is None:
            errors.append("missing required key 'scenario'")
        elif scenario not in DEFAULTS:
            errors.append(
                f"unknown scenario {scenario!r}; choose from {sorted(DEFAULTS)}"
            )
        if not errors and scenario is not None and scenario in DEFAULTS:
            allowed = DEFAULTS[scenario]
            for key, (lineno, _) in overrides.items():
                if key not in allowed:
                    errors.append(
                        f"line {lineno}: unknown key {key!r} for {scenario}"
                    )
        if errors:
            raise ValueError("config validation failed:\n  " + "\n  ".join(errors))
        params = dict(DEFAULTS[scenario])
        params.update({k: v for k, (_, v) in overrides.items()})
        return cls(scenario, params)

    @classmethod
    def from_file(cls, path) -> "ScenarioConfig":
        return cls.from_text(Path(path).read_text())

    @classmethod
    def defaults(cls, scenario: str) -> "ScenarioConfig":
        if scenario not in DEFAULTS:
            raise ValueError(f"unknown scenario {scenario!r}")
        return cls(scenario, dict(DEFAULTS[scenario]))

    def canonical(self) -> str:
        return json.dumps(
            {"scenario": self.scenario, "params": self.params},
            sort_keys=True,
            separators=(",", ":"),
        )

    def digest(self) -> str:
        return hashlib.sha256(self.canonical().encode()).hexdigest()


def _parse_value(text: str):
    lowered = text.lower()
    if lowered in ("true", "false"):
        return lowered == "true"
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text.strip("'\"")


@dataclass
class RunManifest:
    scenario: str
    config_hash: str
    code_version: str
    rng_identity: str
    wall_clock_s: float
    outputs: dict[str, str]
    metadata: dict = field(default_factory=dict)

    def write(self, path) -> None:
        payload = {
            "scenario": self.scenario,
            "config_hash": self.config_hash,
            "code_version": self.code_version,
            "rng_identity": self.rng_identity,
            "wall_clock_s": round(self.wall_clock_s, 3),
            "outputs": self.outputs,
            "metadata": self.metadata,
        }
        Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# CSV plumbing
# ---------------------------------------------------------------------------


def _fmt(value) -> str:
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.10e}"
    return str(value)


def _write_csv(path, comments: list[str], columns: dict) -> None:
    names = list(columns)
    rows = len(next(iter(columns.values())))
    with open(path, "w", newline="") as fh:
        for line in comments:
            fh.write(f"# {line}\n")
        writer = csv.writer(fh)
        writer.writerow(names)
        for i in range(rows):
            writer.writerow([_fmt(columns[name][i]) for name in names])


def _sigma(params: dict) -> float:
    s = params["sigma_sq"]
    return math.sqrt(s) if params["sigma_is_variance"] else s


def _initial_states(n: int, haar_seeds=()) -> dict[str, np.ndarray]:
    out = {"typical": basis_state(n), "atypical": plus_state(n)}
    for s in haar_seeds:
        rng = np.random.Generator(np.random.Philox(s))
        out[f"haar{s}"] = haar_state(n, rng)
    return out


def one_segment_error(h0, h_noisy, psi_t, dt: float) -> float:
    """||(U0(dt) - U(dt)) psi(t)|| for a single simulation segment."""
    if dt <= 0:
        raise ValueError("segment length must be positive")
    u0 = propagator_const(h0, dt)
    u1 = propagator_const(h_noisy, dt)
    return float(np.linalg.norm((u0 - u1) @ np.asarray(psi_t, dtype=complex)))


def _check_ladder(report, label: str) -> None:
    violations = report.ladder_violations()
    if violations:
        raise RuntimeError(
            f"bound-ladder ordering violated in {label}: " + "; ".join(violations[:5])
        )


# ---------------------------------------------------------------------------
# scenario runners
# ---------------------------------------------------------------------------


def _run_fig2_longtime(p: dict, outdir: Path):
    n = p["n_sites"]
    h0 = build_qimf_1d(n)
    model = standard_qimf_noise(n, _sigma(p), p["eta"])
    real = sample(model, p["seed"])
    grid = TimeGrid.regular(p["t_final"], p["n_points"])
    columns = {"time": grid.points}
    meta = {"deltas": [float(d) for d in real.deltas]}
    for label, psi in _initial_states(n).items():
        report = bound_ladder(
            h0, real.h_pert, psi, grid, crossover_rel_tol=p["crossover_rel_tol"]
        )
        _check_ladder(report, f"fig2_longtime/{label}")
        for name, vals in report.columns.items():
            columns[f"{label}_{name}"] = vals
        meta[f"crossover_{label}"] = report.crossover
    _write_csv(
        outdir / "bound_ladder.csv",
        ["long-time analog error and its bound ladder, 1D transverse-field Ising"],
        columns,
    )
    return ["bound_ladder.csv"], meta


def _run_fig2_segment(p: dict, outdir: Path):
    n = p["n_sites"]
    h0 = build_qimf_1d(n)
    model = standard_qimf_noise(n, _sigma(p), p["eta"])
    real = sample(model, p["seed"])
    h1 = (h0 + real.h_pert).simplify()
    dt = p["segment_dt"]
    diff = propagator_const(h0, dt) - propagator_const(h1, dt)
    grid = TimeGrid.regular(p["t_final"], p["n_points"])
    pairs = [(0, j) for j in (1, 2, 3, 4)]
    columns = {"time": grid.points}
    for label, psi in _initial_states(n, p["haar_seeds"]).items():
        traj = Trajectory(h0, psi)
        seg = np.empty(grid.points.size)
        ents = {pair: np.empty(grid.points.size) for pair in pairs}
        for i, t in enumerate(grid.points):
            psi_t = traj.state(t)
            seg[i] = np.linalg.norm(diff @ psi_t)
            for pair in pairs:
                ents[pair][i] = subsystem_entropy(psi_t, pair, n, "bits")
        columns[f"{label}_segment_error"] = seg
        for (a, b), vals in ents.items():
            columns[f"{label}_entropy_{a}{b}"] = vals
    meta = {
        "segment_dt": dt,
        "frobenius_reference": dt * frobenius_norm(real.h_pert),
        "deltas": [float(d) for d in real.deltas],
    }
    _write_csv(
        outdir / "segment_error.csv",
        ["one-segment simulation error and two-qubit entropies along the ideal trajectory"],
        columns,
    )
    return ["segment_error.csv"], meta


def _hubbard_sector(p: dict):
    L = p["L"]
    basis = SectorBasis(L, L // 2, L // 2)
    h0 = project_to_sector(build_hubbard(L, p["coulomb"]), basis, sparse=True)
    pert = hubbard_perturbation(L, p["delta"])
    diag_full = diagonal_values(pert).real
    import scipy.sparse

    h1 = h0 + scipy.sparse.diags(diag_full[basis.states])
    psi0 = np.zeros(basis.dimension, dtype=complex)
    psi0[basis.occupation_index([(s, "both") for s in p["occupied_sites"]])] = 1.0
    return basis, h0, h1, pert, diag_full, psi0


def _run_fig3(p: dict, outdir: Path):
    basis, h0, h1, pert, diag_full, psi0 = _hubbard_sector(p)
    from scipy.sparse.linalg import expm_multiply

    dt = p["segment_dt"]
    grid = TimeGrid.regular(p["t_final"], p["n_points"])
    traj = Trajectory(h0, psi0, lift=basis.to_full)
    pairs = [(2 * j, 2 * j + 1) for j in range(basis.L // 2)]
    gen0 = (-1j * dt) * h0.astype(complex)
    gen1 = (-1j * dt) * h1.astype(complex)
    seg = np.empty(grid.points.size)
    ents = {pair: np.empty(grid.points.size) for pair in pairs}
    mean_ent = np.empty(grid.points.size)
    for i, t in enumerate(grid.points):
        psi_t = traj.state(t)
        seg[i] = np.linalg.norm(
            expm_multiply(gen0, psi_t) - expm_multiply(gen1, psi_t)
        )
        full = traj.lifted(t)
        for pair in pairs:
            ents[pair][i] = subsystem_entropy(
                full, site_qubits(pair), 2 * basis.L, "bits"
            )
        mean_ent[i] = np.mean([ents[pair][i] for pair in pairs])
    columns = {"time": grid.points, "segment_error": seg, "mean_entropy_bits": mean_ent}
    for (a, b), vals in ents.items():
        columns[f"entropy_sites_{a}_{b}"] = vals
    meta = {
        "sector_dimension": basis.dimension,
        "segment_dt": dt,
        "frobenius_reference": dt * frobenius_norm(pert),
    }
    _write_csv(
        outdir / "hubbard_segment.csv",
        ["one-segment Fermi-Hubbard error vs two-site entanglement entropy"],
        columns,
    )
    return ["hubbard_segment.csv"], meta


def _run_fig4(p: dict, outdir: Path):
    n = p["n_sites"]
    h0 = build_qimf_1d(n)
    model = standard_qimf_noise(n, _sigma(p), p["eta"])
    real = sample(model, p["seed"])
    psi = _initial_states(n)[p["initial_state"]]
    traj = Trajectory(h0, psi)
    files = []
    meta = {"n_pairs": None, "near_zero_threshold": p["near_zero"], "near_zero_fraction": {}}
    all_rows = {"time": [], "left_term": [], "right_term": [], "value": []}
    for t in p["times"]:
        records = detection.cross_term_expectations(real.h_pert, traj.state(t))
        meta["n_pairs"] = len(records)
        frac = np.mean([abs(r.value) < p["near_zero"] for r in records])
        meta["near_zero_fraction"][f"{t:g}"] = float(frac)
        for r in records:
            all_rows["time"].append(t)
            all_rows["left_term"].append(r.left)
            all_rows["right_term"].append(r.right)
            all_rows["value"].append(r.value)
    _write_csv(
        outdir / "cross_terms.csv",
        ["normalized cross-term expectations of the perturbation structure pairs"],
        all_rows,
    )
    files.append("cross_terms.csv")
    return files, meta


def _run_fig5(p: dict, outdir: Path):
    table = load_pulse_table(angular=p["angular"])
    temps = tuple(sorted(
        1.0 / t
        for t in np.arange(p["t_min"], p["t_max"] + 1e-12, p["t_step"])
    ))
    from .control import angular_mhz

    scenario = ControlScenario(
        n_spectators=p["n_spectators"],
        n_targets=1,
        delta_ez=angular_mhz(p["delta_ez_mhz"]),
        j_coupling=angular_khz(p["j_khz"]),
        delta=angular_khz(p["delta_khz"]),
        epsilon=p["epsilon"],
    )
    sweep = GibbsSweep(temps, n_system=scenario.n_qubits)
    columns = {"pulse": [], "temperature": [], "entropy_bits": [], "error": []}
    meta = {"theta": scenario.theta, "tilde_ez": scenario.tilde_ez}
    for name in p["pulses"]:
        rows = gate_error_sweep(scenario, table[name], sweep)
        entropies = [r[1] for r in rows]
        errors = [r[2] for r in rows]
        if any(b < a - 1e-12 for a, b in zip(entropies, entropies[1:])):
            raise RuntimeError("entropy not non-decreasing in temperature")
        for temp, ent, err in rows:
            columns["pulse"].append(name)
            columns["temperature"].append(temp)
            columns["entropy_bits"].append(ent)
            columns["error"].append(err)
        meta[f"max_entropy_{name}"] = max(entropies)
        meta[f"error_span_{name}"] = [errors[0], errors[-1]]
    _write_csv(
        outdir / "control_sweep.csv",
        ["gate error vs initial-state entanglement over a Gibbs temperature sweep"],
        columns,
    )
    return ["control_sweep.csv"], meta


def _run_fig6(p: dict, outdir: Path):
    n = p["n_sites"]
    h0 = build_qimf_1d(n)
    sigma = _sigma(p)
    dis_model = standard_qimf_noise(n, sigma, 0.0)
    imp_model = standard_qimf_noise(n, 0.0, p["eta"])
    imp_real = sample(imp_model, p["seed"])
    grid = TimeGrid.regular(p["t_final"], p["n_points"])
    columns = {"time": grid.points}
    meta = {"n_samples": p["n_samples"]}
    for label, psi in _initial_states(n).items():
        traj = Trajectory(h0, psi)
        dis_bound = disorder_trace_bound(dis_model, traj, grid)
        full_bound = disorder_trace_bound(
            standard_qimf_noise(n, sigma, p["eta"]), traj, grid
        )
        dist = np.empty(grid.points.size)
        stderr = np.empty(grid.points.size)
        rms = np.empty(grid.points.size)
        rms_se = np.empty(grid.points.size)
        imp_dist = np.empty(grid.points.size)
        noisy = Trajectory((h0 + imp_real.h_pert).simplify(), psi)
        for i, t in enumerate(grid.points):
            if t == 0.0:
                dist[i] = stderr[i] = rms[i] = rms_se[i] = imp_dist[i] = 0.0
                continue
            dist[i], stderr[i] = ensemble_trace_distance(
                h0, dis_model, psi, t, p["n_samples"], p["seed"]
            )
            rms[i], rms_se[i] = ensemble_rms_error(
                h0, dis_model, psi, t, p["n_samples"], p["seed"]
            )
            overlap = abs(np.vdot(traj.state(t), noisy.state(t))) ** 2
            imp_dist[i] = 2.0 * math.sqrt(max(0.0, 1.0 - overlap))
        columns[f"{label}_disorder_distance"] = dist
        columns[f"{label}_disorder_stderr"] = stderr
        columns[f"{label}_disorder_rms_error"] = rms
        columns[f"{label}_disorder_rms_stderr"] = rms_se
        columns[f"{label}_disorder_bound"] = dis_bound
        columns[f"{label}_imperfection_distance"] = imp_dist
        columns[f"{label}_combined_bound"] = full_bound
    _write_csv(
        outdir / "disorder_vs_imperfection.csv",
        ["ensemble trace distance: stochastic disorder vs static imperfection"],
        columns,
    )
    return ["disorder_vs_imperfection.csv"], meta


def _run_fig7(p: dict, outdir: Path):
    basis, h0, h1, pert, diag_full, psi0 = _hubbard_sector(p)
    grid = TimeGrid.regular(p["t_final"], p["n_points"])
    report = bound_ladder(
        h0,
        pert,
        psi0,
        grid,
        lift=basis.to_full,
        crossover_rel_tol=p["crossover_rel_tol"],
        sector_spectral=float(np.abs(diag_full).max()),
        h_noisy=h1,
    )
    _check_ladder(report, "fig7_hubbard_longtime")
    columns = {"time": grid.points, **report.columns}
    meta = {"sector_dimension": basis.dimension, "crossover": report.crossover}
    _write_csv(
        outdir / "hubbard_ladder.csv",
        ["long-time Fermi-Hubbard error and bound ladder in the half-filled sector"],
        columns,
    )
    return ["hubbard_ladder.csv"], meta


def _run_qimf2d(p: dict, outdir: Path):
    rows, cols = p["rows"], p["cols"]
    n = rows * cols
    h0 = build_qimf_2d(rows, cols)
    model = lattice_qimf_noise(rows, cols, _sigma(p), p["eta"])
    real = sample(model, p["seed"])
    grid = TimeGrid.regular(p["t_final"], p["n_points"])
    columns = {"time": grid.points}
    meta = {"lattice": [rows, cols], "deltas": [float(d) for d in real.deltas]}
    for label, psi in _initial_states(n).items():
        report = bound_ladder(
            h0, real.h_pert, psi, grid, crossover_rel_tol=p["crossover_rel_tol"]
        )
        _check_ladder(report, f"supp_qimf2d/{label}")
        for name, vals in report.columns.items():
            columns[f"{label}_{name}"] = vals
        meta[f"crossover_{label}"] = report.crossover
    _write_csv(
        outdir / "qimf2d_ladder.csv",
        ["2D transverse-field Ising lattice bound ladder"],
        columns,
    )
    return ["qimf2d_ladder.csv"], meta


def _run_twoqubit(p: dict, outdir: Path):
    scenario = ControlScenario(
        n_spectators=p["n_spectators"],
        n_targets=2,
        j_coupling=p["j_angular_mhz"] * 1e-3,
        delta=angular_khz(p["delta_khz"]),
        j_residue=angular_khz(p["j_res_khz"]),
    )
    h_rot, h_pert = build_two_qubit_scenario(scenario)
    grid = TimeGrid.regular(p["t_final"], p["n_points"])
    columns = {"time": grid.points}
    meta = {
        "gate_time_ns": math.pi / scenario.j_coupling,
        "n_pert_terms": len(h_pert.terms),
    }
    for label, psi in _initial_states(scenario.n_qubits).items():
        report = bound_ladder(h_rot, h_pert, psi, grid)
        _check_ladder(report, f"supp_twoqubit/{label}")
        for name, vals in report.columns.items():
            columns[f"{label}_{name}"] = vals
    _write_csv(
        outdir / "twoqubit_ladder.csv",
        ["ZZ entangling gate with residual couplings: error and bound ladder"],
        columns,
    )
    return ["twoqubit_ladder.csv"], meta


def _run_lemma(p: dict, outdir: Path):
    trials = certify_lemma(p["trials"], p["seed"], p["max_qubits"])
    columns = {
        "trial": list(range(len(trials))),
        "n_qubits": [t.n_qubits for t in trials],
        "expectation": [t.expectation for t in trials],
        "trace_part": [t.trace_part for t in trials],
        "delta": [t.delta for t in trials],
        "margin": [t.margin for t in trials],
    }
    meta = {"violations": 0, "trials": len(trials)}
    _write_csv(
        outdir / "lemma_trials.csv",
        ["random PSD-operator expectation lemma certification"],
        columns,
    )
    return ["lemma_trials.csv"], meta


RUNNERS = {
    "fig2_longtime": _run_fig2_longtime,
    "fig2_segment": _run_fig2_segment,
    "fig3_hubbard_segment": _run_fig3,
    "fig7_hubbard_longtime": _run_fig7,
    "fig4_crossterms": _run_fig4,
    "fig5_control_sweep": _run_fig5,
    "fig6_disorder_vs_imperfection": _run_fig6,
    "supp_qimf2d": _run_qimf2d,
    "supp_twoqubit": _run_twoqubit,
    "lemma_certification": _run_lemma,
}


def list_scenarios() -> list[str]:
    return list(RUNNERS)


def run_scenario(cfg: ScenarioConfig, output_root=None) -> RunManifest:
    root = Path(
        output_root or os.environ.get(OUTPUT_ROOT_ENV, "results")
    )
    outdir = root / cfg.scenario
    outdir.mkdir(parents=True, exist_ok=True)
    start = time.monotonic()
    files, meta = RUNNERS[cfg.scenario](cfg.params, outdir)
    elapsed = time.monotonic() - start
    checksums = {
        name: hashlib.sha256((outdir / name).read_bytes()).hexdigest()
        for name in files
    }
    manifest = RunManifest(
        scenario=cfg.scenario,
        config_hash=cfg.digest(),
        code_version=CODE_VERSION,
        rng_identity=RNG_IDENTITY,
        wall_clock_s=elapsed,
        outputs=checksums,
        metadata=meta,
    )
    manifest.write(outdir / "manifest.json")
    return manifest
