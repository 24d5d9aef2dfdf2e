"""``hc-lab``: run experiments from flags or a TOML config, write deterministic reports, replay them.

Usage::

    hc-lab <experiment> [--flag value ...]
    hc-lab run <experiment> [--flag value ...]
    hc-lab run --config experiment.toml
    hc-lab replay out/counterexample/report.json

Exit status is 0 when every check in the report passes, 1 when a check or
the pipeline fails (the failing check is named on stderr) and 2 for an
invalid configuration.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
import time
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from . import reporting
from .cardinal import SampledEntire
from .contraction import (
    BlockState,
    ConvergenceError,
    Schedule,
    ScheduleError,
    SparsenessError,
    auto_schedule,
    contraction_map,
    empirical_lipschitz,
    map_Dinv,
    newton_solve,
    sparseness_report,
    target_y_star,
    verify_vanishing,
)
from .counterexample import (
    LogAbs,
    build_bundle,
    bundle_to_dict,
    defect_certificate,
    g_lattice_profile,
    growth_ratio,
    lattice_residue_check,
    s_interlace,
    verify_interp_6c,
)
from .debranges import (
    ModelError,
    ScheduleInfeasible,
    build_clark,
    construct_example,
    export_model_json,
    inner_db,
    inner_db_quadrature,
    kernel_db,
    power_spectrum,
)
from .herglotz import LatticeCauchyTransform, NoSignChange, closeness_sums, l_delta, locate_gap_zeros
from .lattice import LatticeSequence, PowerLaw
from .pair_sigma import residue_check, s_diagonal_check

log = logging.getLogger("hclab")

SCHEMA = "hc-lab-report/1"
EXPERIMENTS = ("counterexample", "pair-verify", "zero-density", "debranges-build")
GROWTH_Y = [1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0]
REPLAY_RTOL = 1e-12


class ConfigError(ValueError):
    """Invalid configuration; the message names the field."""


# ---------------------------------------------------------------------------
# configuration


@dataclass
class ExperimentConfig:
    """Every tunable of every experiment, with its default.

    ``window`` means the dense lattice window ``W`` for the counterexample
    experiments, ``N`` for zero-density and the largest spectrum index for
    debranges-build; ``None`` selects the experiment's own default.
    """

    experiment: str = "counterexample"
    blocks: int | None = None
    base_m: int | str = "auto"
    tol: float = 1e-13
    window: int | None = None
    delta: float = 0.1
    out_dir: str = "hc-lab-out"
    seed: int = 0
    format: str = "json"
    svg: bool = False
    a0: float = 1.0
    gamma: float = 1.5
    n_min: int = -200
    exponent: float = 1.0

    def resolved(self) -> "ExperimentConfig":
        """Fill the experiment-dependent defaults."""
        blocks = {"counterexample": 4, "pair-verify": 4, "zero-density": 4, "debranges-build": 4}
        window = {"counterexample": 1024, "pair-verify": 1024, "zero-density": 200, "debranges-build": 4200}
        out = ExperimentConfig(**asdict(self))
        if out.blocks is None:
            out.blocks = blocks[out.experiment]
        if out.window is None:
            out.window = window[out.experiment]
        return out

    def validate(self) -> None:
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"field 'experiment': unknown experiment {self.experiment!r}; "
                              f"choose one of {', '.join(EXPERIMENTS)}")
        if self.blocks is not None and self.blocks < 1:
            raise ConfigError("field 'blocks': K must be at least 1")
        if not (self.base_m == "auto" or (isinstance(self.base_m, int) and self.base_m >= 1)):
            raise ConfigError("field 'base_m': must be 'auto' or a positive integer")
        for name in ("tol", "delta", "a0", "gamma"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"field '{name}': must be positive")
        if not self.delta < 0.5:
            raise ConfigError("field 'delta': must be below 1/2")
        if self.window is not None and self.window < 4:
            raise ConfigError("field 'window': must be at least 4")
        if self.format not in ("json", "csv"):
            raise ConfigError("field 'format': must be 'json' or 'csv'")
        if self.exponent < 0:
            raise ConfigError("field 'exponent': must be non-negative")


_FIELD_TYPES = {
    "experiment": (str,), "blocks": (int,), "base_m": (int, str), "tol": (float, int), "window": (int,),
    "delta": (float, int), "out_dir": (str,), "seed": (int,), "format": (str,), "svg": (bool,),
    "a0": (float, int), "gamma": (float, int), "n_min": (int,), "exponent": (float, int),
}


def _coerce(key: str, value):
    kinds = _FIELD_TYPES[key]
    if isinstance(value, bool) and bool not in kinds:
        raise ConfigError(f"field '{key}': expected {kinds[0].__name__}, got a boolean")
    if not isinstance(value, kinds):
        raise ConfigError(f"field '{key}': expected {kinds[0].__name__}, got {type(value).__name__}")
    if float in kinds and isinstance(value, int):
        return float(value)
    return value


def load_config_file(path) -> dict:
    """Parse a TOML config; decode errors carry the line and column."""
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config {path}: {exc}") from exc
    data = dict(data.get("experiment_config", data))
    out = {}
    for key, value in data.items():
        k = key.replace("-", "_")
        if k not in _FIELD_TYPES:
            raise ConfigError(f"config {path}: unknown field '{key}'")
        out[k] = _coerce(k, value)
    return out


def _base_m(text: str):
    if text == "auto":
        return "auto"
    try:
        return int(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError("expected 'auto' or an integer") from exc


def make_config(args: argparse.Namespace) -> ExperimentConfig:
    values = {}
    if getattr(args, "config", None):
        values.update(load_config_file(args.config))
    if getattr(args, "experiment", None):
        values["experiment"] = args.experiment
    for f in fields(ExperimentConfig):
        v = getattr(args, f.name, None)
        if v is not None and f.name != "experiment":
            values[f.name] = v
    cfg = ExperimentConfig(**values)
    cfg.validate()
    return cfg.resolved()


# ---------------------------------------------------------------------------
# experiments


@dataclass
class Outcome:
    """Report plus side artifacts of one run."""

    report: dict
    tables: dict  # filename -> (header, rows)
    plots: dict  # filename -> (title, series, log_y, xlabel, ylabel)
    extra: dict  # filename -> writer callable


def _check(checks: dict, name: str, ok) -> None:
    checks[name] = bool(ok)


def _schedule_from(cfg: ExperimentConfig) -> Schedule:
    if cfg.base_m == "auto":
        return auto_schedule(cfg.blocks, a0=cfg.a0)
    return Schedule.geometric(cfg.blocks, int(cfg.base_m), cfg.a0)


def _bundle(cfg: ExperimentConfig, stored: dict | None, window: int):
    """Solve (or rebuild from stored schedule and ``r``) and assemble the bundle."""
    if stored is None:
        sch = _schedule_from(cfg)
        b = build_bundle(sch, window=window, tol=cfg.tol)
        return b, b.iterations, b.trace
    s = stored["schedule"]
    sch = Schedule(np.asarray(s["n_k"], dtype=np.int64), s["base_M"], s["horizon"], s["a0"])
    b = build_bundle(sch, BlockState(np.asarray(stored["r"], dtype=float)), window=window)
    b = dataclasses.replace(b, iterations=int(stored["iterations"]))
    return b, b.iterations, []


def _fixed_point_section(cfg, b, iterations) -> dict:
    sch, r = b.schedule, b.state.r
    r_star = map_Dinv(target_y_star(sch).y).r
    residual = float(np.max(np.abs(contraction_map(r, sch, r_star) - r)))
    alpha = b.state.alpha
    return {
        "K": sch.K,
        "base_M": sch.base_M,
        "iterations": iterations,
        "fixed_point_residual": residual,
        "r_min": float(np.min(r)),
        "r_max": float(np.max(r)),
        "alpha": alpha,
        "r_in_range": bool(np.all((r > 0.5) & (r < 1.5))),
        "alpha_in_range": bool(np.all((alpha > 1) & (alpha < 3))),
    }


def _counterexample_sections(cfg, b, iterations, checks, full: bool) -> dict:
    sch = b.schedule
    sec = {"inputs": bundle_to_dict(b)}
    fp = _fixed_point_section(cfg, b, iterations)
    sec["fixed_point"] = fp
    _check(checks, "fixed_point.iterations_le_25", iterations <= 25)
    _check(checks, "fixed_point.residual", fp["fixed_point_residual"] <= max(10 * cfg.tol, 1e-12))
    _check(checks, "fixed_point.r_in_range", fp["r_in_range"])
    _check(checks, "fixed_point.alpha_in_range", fp["alpha_in_range"])
    van = verify_vanishing(sch, b.state)
    sec["vanishing"] = van.to_dict()
    _check(checks, "vanishing.h_and_S_at_s_k", van.passed)
    if full:
        sp = sparseness_report(sch, seed=cfg.seed)
        sec["sparseness"] = sp.to_dict()
        _check(checks, "sparseness.surrogates", sp.passed)
        lip = empirical_lipschitz(sch, 100, cfg.seed)
        sec["contraction"] = {"pairs": 100, "ball_radius": 0.01, "lipschitz": lip, "audit_bound": 0.5}
        _check(checks, "contraction.lipschitz_le_half", lip <= 0.5)
        newton = newton_solve(sch)
        diff = float(np.max(np.abs(newton.r - b.state.r)))
        sec["newton"] = {"sup_difference": diff, "tolerance": 1e-10}
        _check(checks, "newton.agreement", diff <= 1e-10)
    inter = s_interlace(b)
    sec["interlace"] = inter.to_dict()
    _check(checks, "interlace.one_zero_per_interval", inter.passed)
    ps = b.pair_system()
    res = residue_check(ps)
    sdiag = s_diagonal_check(ps)
    sec["residues"] = res.to_dict()
    sec["s_diagonal"] = sdiag.to_dict()
    _check(checks, "residues.pair_identities", res.passed)
    _check(checks, "residues.S_diagonal", sdiag.passed)
    lat = lattice_residue_check(b)
    sec["lattice_residue"] = {"max_rel_err": lat, "tolerance": 1e-8}
    _check(checks, "lattice_residue.G1S1_eq_aG", lat <= 1e-8)
    if full:
        prof = g_lattice_profile(b)
        sec["g_profile"] = prof.to_dict()
        _check(checks, "g_profile.band_linear_growth_tail", prof.passed)
        rng = np.random.default_rng(cfg.seed)
        W = b.window
        zs = rng.uniform(-W / 2, W / 2, 20) + 1j * rng.uniform(0.5, 2.0, 20)
        interp = verify_interp_6c(b, zs)
        sec["interpolation"] = interp.to_dict()
        _check(checks, "interpolation.identity", interp.passed)
        growth = {}
        for name, fn in (("h", b.log_abs_h), ("G", b.log_abs_G), ("G1S1", b.log_abs_G1S1)):
            g = growth_ratio(LogAbs(fn), GROWTH_Y)
            growth[name] = g.to_dict()
            _check(checks, f"growth.{name}_band", g.passed)
        sec["growth"] = growth
    cert = defect_certificate(b)
    cd = cert.to_dict()
    enough = cert.report.lambda1.size >= 10 and cert.report.lambda2.size >= 10
    cd["samples_per_side_ok"] = bool(enough)
    cd["note"] = ("at least 10 sampled points per side" if enough else
                  f"Lambda_1 has only {cert.report.lambda1.size} points at K = {sch.K}; "
                  "the 10-per-side requirement applies from K = 10")
    sec["certificate"] = cd
    _check(checks, "certificate.orthogonality_residuals", cert.report.passed)
    _check(checks, "certificate.negative_control", cert.control_residual >= cert.control_floor)
    if sch.K >= 10:
        _check(checks, "certificate.samples_per_side", enough)
    return sec


def _counterexample_artifacts(b, trace) -> tuple[dict, dict]:
    W = b.window
    n = np.arange(-W, W + 1)
    tables = {
        "lattice.csv": (["n", "a_n", "G_n", "h_n"],
                        list(zip(n, b.a.at(n).real, b.G_lattice.at(n).real, b.h(n.astype(complex)).real))),
        "trace.csv": (["iteration", "step_sup", "max_abs_h_s_k"], [tuple(r) for r in trace]),
    }
    y = np.asarray(GROWTH_Y)
    rows, series = [], {}
    for name, fn in (("h", b.log_abs_h), ("G", b.log_abs_G), ("G1S1", b.log_abs_G1S1)):
        g = growth_ratio(LogAbs(fn), y)
        series[name] = (y, g.values)
        rows += [(name, yy, vv) for yy, vv in zip(y, g.values)]
    tables["growth.csv"] = (["function", "y", "y_abs_f_exp_minus_pi_y"], rows)
    zs = b.S_zeros_split
    m, u = np.asarray(zs.m), np.asarray(zs.u).real
    dense = np.abs(m) <= W
    plots = {
        "growth.svg": ("growth bands y|f(iy)|e^(-pi y)", series, False, "y", "value"),
        "zero_displacement.svg": ("distance of S zeros to the lattice",
                                  {"|offset|": (m[dense] + u[dense], np.abs(u[dense]))}, True, "x", "distance"),
    }
    return tables, plots


def run_counterexample(cfg: ExperimentConfig, stored: dict | None = None) -> Outcome:
    b, iterations, trace = _bundle(cfg, stored, cfg.window)
    checks = {}
    sections = _counterexample_sections(cfg, b, iterations, checks, full=True)
    tables, plots = _counterexample_artifacts(b, trace)
    return Outcome(_report(cfg, sections, checks), tables, plots, {})


def run_pair_verify(cfg: ExperimentConfig, stored: dict | None = None) -> Outcome:
    b, iterations, trace = _bundle(cfg, stored, cfg.window)
    checks = {}
    sections = _counterexample_sections(cfg, b, iterations, checks, full=False)
    tables, _ = _counterexample_artifacts(b, trace)
    return Outcome(_report(cfg, sections, checks), {"lattice.csv": tables["lattice.csv"]}, {}, {})


def _shifted_transform_zeros(N: int):
    """Gap zeros of ``1 + sum c_n/(x - n)`` with ``c_0 = 1``, ``c_n = n**-2``."""
    f = SampledEntire(LatticeSequence([0], [1.0], PowerLaw(2)))
    return locate_gap_zeros(LatticeCauchyTransform(f, -N - 1, N + 1, 1.0))


def run_zero_density(cfg: ExperimentConfig, stored: dict | None = None) -> Outcome:
    N = int(cfg.window)
    b, iterations, _ = _bundle(cfg, stored, max(2 * N, 256))
    checks = {}
    zs = b.S_zeros_split
    m, u = np.asarray(zs.m), np.asarray(zs.u).real
    dense = np.abs(m) <= b.window
    x, dist = (m + u)[dense], np.abs(u)[dense]
    grid = sorted({max(N // 4, 1), max(N // 2, 1), N})
    values = [l_delta(x, 0.0, cfg.delta, n) for n in grid]
    _check(checks, "l_delta.non_increasing", all(a >= c for a, c in zip(values, values[1:])))
    gz = _shifted_transform_zeros(N)
    k = np.floor(gz.x).astype(np.int64)
    band = (np.abs(k) >= N // 2) & (np.abs(k) <= N)
    max_d = float(np.max(gz.distance[band]))
    _check(checks, "shifted_transform.max_distance_le_0.05", max_d <= 0.05)
    t = np.arange(-b.window, b.window + 1, dtype=float)
    s_dense = np.sort(x[(x > -b.window) & (x < b.window)])
    close = closeness_sums(t, s_dense) if s_dense.size == t.size - 1 else None
    sections = {
        "inputs": bundle_to_dict(b),
        "l_delta": {"delta": cfg.delta, "N": grid, "L_delta": values},
        "shifted_transform": {"b": 1.0, "masses": "c_0 = 1, c_n = n^-2", "band": [N // 2, N],
                              "max_lattice_distance": max_d, "bound": 0.05},
        "closeness": close.to_dict() if close is not None else None,
        "displacement": {"max_distance": float(np.max(dist)), "mean_distance": float(np.mean(dist))},
    }
    rows = [(int(a), float(c)) for a, c in zip(grid, values)]
    tables = {
        "l_delta.csv": (["N", "L_delta"], rows),
        "zeros.csv": (["interval", "anchor", "offset"],
                      [(int(np.where(uu > 0, mm, mm - 1)), int(mm), float(uu))
                       for mm, uu in zip(m[dense], u[dense])]),
    }
    plots = {
        "l_delta.svg": (f"L_delta(N), delta = {cfg.delta}", {"L_delta": (np.array(grid, float), values)},
                        False, "N", "fraction"),
        "zero_displacement.svg": ("distance of S zeros to the lattice", {"|offset|": (x, dist)},
                                  True, "x", "distance"),
    }
    return Outcome(_report(cfg, sections, checks), tables, plots, {})


def _two_point_section(checks: dict) -> dict:
    m = build_clark([-1.0, 1.0], [1.0, 1.0])
    z = np.array([0.3 + 0.2j, -2.0 + 1.0j, 5.0 + 0.0j, 0.5j])
    ratio = m.E(z) / (-(z + 1j) ** 2)
    e_err = float(np.max(np.abs(ratio / ratio[0] - 1.0)))
    phi = m.phase_derivative(np.array([-1.0, 1.0])) * m.masses
    k00 = kernel_db(m, 0.0, 0.0).real
    a, c = [1.0, 0.5], [0.2, -1.0]
    disc = inner_db(m, a, c)
    quad, qerr = inner_db_quadrature(m, a, c)
    parseval = abs(disc - quad) / abs(disc)
    _check(checks, "two_point.E_proportional_to_(z+i)^2", e_err <= 1e-10)
    _check(checks, "two_point.phi_prime_mu", float(np.max(np.abs(phi - 1))) <= 1e-10)
    _check(checks, "two_point.K00", abs(k00 - 2 / np.pi) <= 1e-10)
    _check(checks, "two_point.parseval_vs_quadrature", parseval <= 1e-6)
    return {"E_ratio_spread": e_err, "phi_prime_mu": phi, "K00": k00, "parseval": disc,
            "quadrature": quad, "quadrature_error_estimate": qerr, "parseval_rel_diff": parseval,
            "model_checks": m.checks}


def run_debranges(cfg: ExperimentConfig, stored: dict | None = None) -> Outcome:
    checks = {}
    two = _two_point_section(checks)
    idx, t = power_spectrum(cfg.n_min, int(cfg.window), cfg.gamma)
    res = construct_example(idx, t, K=cfg.blocks, N=cfg.exponent)
    pipe = res.to_dict()
    pipe["steps"]["i_schedule"]["labels_n_k"] = [int(v) for v in idx[res.schedule.n]]
    _check(checks, "pipeline.c_band_ratio_le_10", res.c_band_ratio <= 10)
    _check(checks, "pipeline.linear_growth", res.linear_growth)
    _check(checks, "pipeline.weighted_tail_lt_1e-3", res.weighted_tail() < 1e-3)
    _check(checks, "pipeline.residual_ext", res.ext.passed)
    _check(checks, "pipeline.c_recomputed", res.c_recomputed_err <= 1e-6)
    _check(checks, "pipeline.shifted_zeros_in_half_interval", res.shifted_in_range)
    sections = {
        "inputs": {"spectrum": {"n_min": cfg.n_min, "n_max": int(cfg.window), "gamma": cfg.gamma}},
        "two_point": two,
        "pipeline": pipe,
    }
    rows = list(zip(idx, t, res.a, res.c, res.c ** 2))
    tables = {"coefficients.csv": (["n", "t_n", "a_n", "c_n", "mu_n"], rows)}
    labels = idx.astype(float)
    plots = {"c_profile.svg": ("|c_n| along the window", {"|c_n|": (labels, np.abs(res.c))}, True, "n", "|c_n|")}
    extra = {"model.json": lambda path: export_model_json(path, res.model)}
    return Outcome(_report(cfg, sections, checks), tables, plots, extra)


RUNNERS = {
    "counterexample": run_counterexample,
    "pair-verify": run_pair_verify,
    "zero-density": run_zero_density,
    "debranges-build": run_debranges,
}


OUTPUT_ONLY = ("out_dir", "format", "svg")


def _inputs_only(cfg: ExperimentConfig) -> dict:
    """Config fields that affect the computed values (output location and format excluded)."""
    return {k: v for k, v in asdict(cfg).items() if k not in OUTPUT_ONLY}


def _report(cfg: ExperimentConfig, sections: dict, checks: dict) -> dict:
    return {
        "schema": SCHEMA,
        "experiment": cfg.experiment,
        "config": _inputs_only(cfg),
        "defaults": _inputs_only(ExperimentConfig(experiment=cfg.experiment).resolved()),
        "checks": checks,
        "failed": [k for k, v in checks.items() if not v],
        "passed": all(checks.values()),
        "sections": sections,
    }


def execute(cfg: ExperimentConfig, stored: dict | None = None) -> Outcome:
    return RUNNERS[cfg.experiment](cfg, stored)


def write_outcome(cfg: ExperimentConfig, out: Outcome) -> Path:
    """Write report, tables and plots under ``out_dir/experiment``; returns the report path."""
    d = Path(cfg.out_dir) / cfg.experiment
    d.mkdir(parents=True, exist_ok=True)
    path = d / "report.json"
    reporting.write_json(path, out.report)
    for name, (header, rows) in out.tables.items():
        reporting.write_csv(d / name, header, rows)
    if cfg.svg:
        for name, (title, series, log_y, xl, yl) in out.plots.items():
            reporting.write_svg(d / name, title, series, log_y, xl, yl)
    for name, writer in out.extra.items():
        writer(d / name)
    return path


# ---------------------------------------------------------------------------
# replay


def _compare(old, new, path: str, out: list) -> None:
    if isinstance(old, dict) and isinstance(new, dict):
        for k in old.keys() | new.keys():
            if k not in old or k not in new:
                out.append(f"{path}.{k}: present in only one report")
            else:
                _compare(old[k], new[k], f"{path}.{k}", out)
    elif isinstance(old, list) and isinstance(new, list):
        if len(old) != len(new):
            out.append(f"{path}: length {len(old)} != {len(new)}")
            return
        for i, (a, b) in enumerate(zip(old, new)):
            _compare(a, b, f"{path}[{i}]", out)
    elif isinstance(old, bool) or isinstance(new, bool):
        if old != new:
            out.append(f"{path}: {old} != {new}")
    elif isinstance(old, (int, float)) and isinstance(new, (int, float)):
        if old != new and abs(old - new) > REPLAY_RTOL * max(abs(old), abs(new), 1e-300):
            out.append(f"{path}: stored {old!r}, recomputed {new!r}")
    elif old != new:
        out.append(f"{path}: stored {old!r}, recomputed {new!r}")


def replay(report_path) -> tuple[dict, list]:
    """Recompute a stored report from its stored inputs and list every differing value."""
    try:
        stored = json.loads(Path(report_path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot load report {report_path}: {exc}") from exc
    if not isinstance(stored, dict) or stored.get("schema") != SCHEMA:
        raise ConfigError(f"{report_path}: schema mismatch (expected {SCHEMA})")
    for key in ("experiment", "config", "sections", "checks"):
        if key not in stored:
            raise ConfigError(f"{report_path}: schema mismatch (missing '{key}')")
    conf = {k: _coerce(k, v) if v is not None else None for k, v in stored["config"].items()
            if k in _FIELD_TYPES}
    cfg = ExperimentConfig(**conf)
    cfg.validate()
    inputs = stored["sections"].get("inputs")
    use = inputs if cfg.experiment != "debranges-build" else None
    fresh = execute(cfg, use)
    new = json.loads(reporting.dumps(fresh.report))
    diffs = []
    _compare(stored, new, "report", diffs)
    return new, diffs


# ---------------------------------------------------------------------------
# command line


def _add_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="TOML file with experiment settings (flags override it)")
    p.add_argument("--blocks", type=int, help="number of blocks K")
    p.add_argument("--base-m", dest="base_m", type=_base_m, help="schedule base M or 'auto'")
    p.add_argument("--tol", type=float, help="fixed-point tolerance")
    p.add_argument("--window", type=int, help="lattice window W, density range N or spectrum end")
    p.add_argument("--delta", type=float, help="distance threshold for L_delta")
    p.add_argument("--out-dir", dest="out_dir", help="output directory")
    p.add_argument("--seed", type=int, help="seed for sampled checks")
    p.add_argument("--format", choices=("json", "csv"), help="stdout summary format")
    p.add_argument("--svg", action="store_const", const=True, help="also write SVG plots")
    p.add_argument("--gamma", type=float, help="spectrum exponent for debranges-build")
    p.add_argument("--n-min", dest="n_min", type=int, help="first spectrum index for debranges-build")
    p.add_argument("--exponent", type=float, help="separation exponent N for debranges-build")
    p.add_argument("--a0", type=float, help="coefficient a_0 of the counterexample")
    p.add_argument("-v", "--verbose", action="store_true")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: config error: {message}", file=sys.stderr)
        sys.exit(2)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="hc-lab", description="Mixed kernel/biorthogonal system experiments.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    run = sub.add_parser("run", help="run an experiment")
    run.add_argument("experiment", nargs="?", choices=EXPERIMENTS)
    _add_flags(run)
    for name in EXPERIMENTS:
        sp = sub.add_parser(name, help=f"run the {name} experiment")
        sp.set_defaults(experiment=name)
        _add_flags(sp)
    rp = sub.add_parser("replay", help="recompute a stored report and compare")
    rp.add_argument("report")
    rp.add_argument("-v", "--verbose", action="store_true")
    return p


def _summary(report: dict, fmt: str) -> str:
    if fmt == "json":
        return reporting.dumps({"experiment": report["experiment"], "passed": report["passed"],
                                "checks": report["checks"]})
    lines = ["check,passed"] + [f"{k},{str(v).lower()}" for k, v in report["checks"].items()]
    return "\r\n".join(lines) + "\r\n"


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # usage errors (2) and --help (0) become return codes
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    try:
        if args.command == "replay":
            new, diffs = replay(args.report)
            for d in diffs[:50]:
                print(f"mismatch: {d}", file=sys.stderr)
            ok = not diffs and new["passed"]
            print(reporting.dumps({"report": str(args.report), "mismatches": len(diffs),
                                   "checks_passed": new["passed"], "identical": not diffs}), end="")
            return 0 if ok else 1
        cfg = make_config(args)
    except ConfigError as exc:
        print(f"hc-lab: config error: {exc}", file=sys.stderr)
        return 2
    start = time.perf_counter()
    try:
        out = execute(cfg)
    except (ScheduleError, SparsenessError, ConvergenceError, ScheduleInfeasible, ModelError,
            NoSignChange, RuntimeError, ValueError) as exc:
        print(f"hc-lab: pipeline failure in {cfg.experiment}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    path = write_outcome(cfg, out)
    log.info("%s finished in %.2f s, report at %s", cfg.experiment, time.perf_counter() - start, path)
    sys.stdout.write(_summary(out.report, cfg.format))
    if not out.report["passed"]:
        print(f"hc-lab: failed checks: {', '.join(out.report['failed'])}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
