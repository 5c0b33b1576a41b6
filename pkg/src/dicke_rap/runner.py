"""Scenario configs, protocol execution and bit-stable data export.

All run_* functions consume a validated config and write CSV/JSON artifacts
whose bytes depend only on the config and package version: floats are
printed with 17 significant digits, JSON keys are sorted, and no
timestamps or environment details are recorded.
"""
from __future__ import annotations

import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .design import best_oat_overlap, optimize_ess_drive
from .errors import ConfigError, ContrastUndefinedError, DickeRapError
from .metrics import gain_db, qfi_triple, wineland_xi2
from .propagator import Trace, free_evolve_oat, instantaneous_spectrum, propagate
from .schedules import (
    ChirpSchedule,
    CouplingSchedule,
    Schedule,
    crossing_period,
    crossing_times,
    dicke_protocol,
    ess_protocol,
)
from .spin_core import SpinState, SpinSystem, dicke_state, expectation, fidelity
from .targets import EssTarget, ess_for_contrast, ess_ground_state
from .wigner import SphereField, wigner_grid

log = logging.getLogger("dicke_rap")

CONFIG_VERSION = 1
DEFAULT_SAMPLES = 601


def _fmt(x) -> str:
    return format(float(x), ".17g")


def _dump_json(obj, path: Path):
    path.write_text(json.dumps(obj, sort_keys=True, indent=2) + "\n")


# ---------------------------------------------------------------------------
# config parsing (fail-closed: unknown keys are rejected)

def _check_keys(d: dict, allowed: set[str], where: str):
    unknown = set(d) - allowed
    if unknown:
        raise ConfigError(f"unknown key(s) in {where}: {sorted(unknown)}")


def _need(d: dict, key: str, where: str):
    if key not in d:
        raise ConfigError(f"missing required key {key!r} in {where}")
    return d[key]


def _as_number(x, key, positive=False, nonnegative=False):
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise ConfigError(f"{key} must be a number, got {x!r}")
    v = float(x)
    if positive and not v > 0:
        raise ConfigError(f"{key} must be > 0, got {v}")
    if nonnegative and v < 0:
        raise ConfigError(f"{key} must be >= 0, got {v}")
    return v


def _as_int(x, key, minimum=None):
    if isinstance(x, bool) or not isinstance(x, int):
        raise ConfigError(f"{key} must be an integer, got {x!r}")
    if minimum is not None and x < minimum:
        raise ConfigError(f"{key} must be >= {minimum}, got {x}")
    return x


def _as_even_atoms(x, key="n_atoms"):
    n = _as_int(x, key, minimum=2)
    if n % 2 != 0:
        raise ConfigError(f"{key} must be even, got {n}")
    return n


def _check_version(d: dict, where: str):
    v = _need(d, "version", where)
    if v != CONFIG_VERSION:
        raise ConfigError(f"unsupported config version {v!r} (expected {CONFIG_VERSION})")


@dataclass(frozen=True)
class TargetSpec:
    kind: str                     # "dicke" | "ess"
    m: int | None = None
    contrast: float | None = None
    contrast_fraction: float | None = None

    def resolve_contrast(self, system: SpinSystem) -> float:
        if self.contrast is not None:
            return self.contrast
        return self.contrast_fraction * system.total_spin


def _parse_target(d, n_atoms: int, where: str) -> TargetSpec:
    if not isinstance(d, dict):
        raise ConfigError(f"{where} must be an object")
    kind = _need(d, "kind", where)
    s = n_atoms / 2
    if kind == "dicke":
        _check_keys(d, {"kind", "m"}, where)
        m = _as_int(_need(d, "m", where), f"{where}.m")
        if abs(m) > s:
            raise ConfigError(f"{where}.m = {m} outside the ladder |m| <= {s}")
        return TargetSpec(kind="dicke", m=m)
    if kind == "ess":
        _check_keys(d, {"kind", "contrast", "contrast_fraction"}, where)
        if ("contrast" in d) == ("contrast_fraction" in d):
            raise ConfigError(
                f"{where} needs exactly one of 'contrast' or 'contrast_fraction'")
        if "contrast" in d:
            c = _as_number(d["contrast"], f"{where}.contrast", positive=True)
            if not c < s:
                raise ConfigError(f"{where}.contrast must be < S = {s}")
            return TargetSpec(kind="ess", contrast=c)
        f = _as_number(d["contrast_fraction"], f"{where}.contrast_fraction",
                       positive=True)
        if not f < 1:
            raise ConfigError(f"{where}.contrast_fraction must be < 1")
        return TargetSpec(kind="ess", contrast_fraction=f)
    raise ConfigError(f"{where}.kind must be 'dicke' or 'ess', got {kind!r}")


@dataclass(frozen=True)
class CustomSchedule:
    t1: float
    t2: float
    t_on: float
    t_off: float
    cutoff_time: float
    t_start: float
    t_end: float


def _parse_custom_schedule(d, where: str) -> CustomSchedule:
    if not isinstance(d, dict):
        raise ConfigError(f"{where} must be an object")
    keys = {"t1", "t2", "t_on", "t_off", "cutoff_time", "t_start", "t_end"}
    _check_keys(d, keys, where)
    vals = {k: _as_number(_need(d, k, where), f"{where}.{k}") for k in keys}
    return CustomSchedule(**vals)


@dataclass(frozen=True)
class PostEvolution:
    duration: float
    samples: int


@dataclass(frozen=True)
class ScenarioConfig:
    n_atoms: int
    alpha: float
    omega_max: float
    protocol: str                 # "dicke" | "ess" | "custom"
    target: TargetSpec
    chi: float = 1.0
    samples: int = DEFAULT_SAMPLES
    rtol: float | None = None
    atol: float | None = None
    post_evolution: PostEvolution | None = None
    schedule: CustomSchedule | None = None


_SCENARIO_KEYS = {"version", "n_atoms", "chi", "alpha", "omega_max", "protocol",
                  "target", "samples", "rtol", "atol", "post_evolution",
                  "schedule"}


def parse_scenario_config(d: dict, where: str = "config") -> ScenarioConfig:
    _check_version(d, where)
    _check_keys(d, _SCENARIO_KEYS, where)
    n_atoms = _as_even_atoms(_need(d, "n_atoms", where))
    chi = _as_number(d.get("chi", 1.0), "chi", positive=True)
    alpha = _as_number(_need(d, "alpha", where), "alpha", positive=True)
    omega_max = _as_number(_need(d, "omega_max", where), "omega_max",
                           nonnegative=True)
    protocol = _need(d, "protocol", where)
    if protocol not in ("dicke", "ess", "custom"):
        raise ConfigError(f"protocol must be dicke, ess or custom, got {protocol!r}")
    target = _parse_target(_need(d, "target", where), n_atoms, f"{where}.target")
    if protocol == "dicke":
        if target.kind != "dicke":
            raise ConfigError("protocol 'dicke' requires a dicke target")
        if not (0 <= target.m < n_atoms / 2):
            raise ConfigError(
                f"dicke protocol needs 0 <= target m < S, got m = {target.m}")
        if omega_max == 0:
            raise ConfigError("protocol 'dicke' requires omega_max > 0")
    if protocol == "ess":
        if target.kind != "ess":
            raise ConfigError("protocol 'ess' requires an ess target")
        if omega_max == 0:
            raise ConfigError("protocol 'ess' requires omega_max > 0")
    samples = _as_int(d.get("samples", DEFAULT_SAMPLES), "samples", minimum=2)
    rtol = atol = None
    if "rtol" in d:
        rtol = _as_number(d["rtol"], "rtol", positive=True)
        if not 1e-14 <= rtol <= 1e-3:
            raise ConfigError(f"rtol must lie in [1e-14, 1e-3], got {rtol}")
    if "atol" in d:
        atol = _as_number(d["atol"], "atol", positive=True)
        if not 1e-16 <= atol <= 1e-3:
            raise ConfigError(f"atol must lie in [1e-16, 1e-3], got {atol}")
    post = None
    if "post_evolution" in d:
        p = d["post_evolution"]
        if not isinstance(p, dict):
            raise ConfigError("post_evolution must be an object")
        _check_keys(p, {"duration", "samples"}, "post_evolution")
        post = PostEvolution(
            duration=_as_number(_need(p, "duration", "post_evolution"),
                                "post_evolution.duration", positive=True),
            samples=_as_int(p.get("samples", 1024), "post_evolution.samples",
                            minimum=16))
    sched = None
    if protocol == "custom":
        sched = _parse_custom_schedule(_need(d, "schedule", where),
                                       f"{where}.schedule")
    elif "schedule" in d:
        raise ConfigError("'schedule' is only allowed with protocol 'custom'")
    return ScenarioConfig(n_atoms=n_atoms, chi=chi, alpha=alpha,
                          omega_max=omega_max, protocol=protocol, target=target,
                          samples=samples, rtol=rtol, atol=atol,
                          post_evolution=post, schedule=sched)


def _resolved_config_dict(cfg: ScenarioConfig) -> dict:
    d = asdict(cfg)
    d["version"] = CONFIG_VERSION
    return d


# ---------------------------------------------------------------------------
# schedule / target resolution

def build_schedule(cfg: ScenarioConfig, system: SpinSystem) -> Schedule:
    if cfg.protocol == "dicke":
        return dicke_protocol(system, cfg.alpha, cfg.omega_max, cfg.target.m)
    if cfg.protocol == "ess":
        return ess_protocol(system, cfg.alpha, cfg.omega_max)
    c = cfg.schedule
    return Schedule(chirp=ChirpSchedule(alpha=cfg.alpha, cutoff_time=c.cutoff_time),
                    coupling=CouplingSchedule(omega_max=cfg.omega_max, t1=c.t1,
                                              t2=c.t2, t_on=c.t_on, t_off=c.t_off),
                    t_start=c.t_start, t_end=c.t_end)


def resolve_target(cfg: ScenarioConfig, system: SpinSystem):
    """Returns (target_state, description dict)."""
    if cfg.target.kind == "dicke":
        return dicke_state(system, cfg.target.m), {"kind": "dicke", "m": cfg.target.m}
    tgt = ess_for_contrast(system, cfg.target.resolve_contrast(system))
    desc = {"kind": "ess", "omega_ratio": tgt.omega_ratio,
            "contrast": tgt.contrast, "eigenvalue": tgt.eigenvalue}
    return tgt.state, desc


# ---------------------------------------------------------------------------
# trace CSV

def trace_metric_columns(trace: Trace, target_state: SpinState) -> dict:
    """QFI triple, mean spin, Sz variance and target fidelity per sample."""
    n = len(trace.sample_times)
    cols = {k: np.empty(n) for k in ("f_x", "f_y", "f_z", "sx", "var_sz")}
    for i in range(n):
        st = trace.state(i)
        trip = qfi_triple(st)
        cols["f_x"][i] = trip.f_x
        cols["f_y"][i] = trip.f_y
        cols["f_z"][i] = trip.f_z
        cols["sx"][i] = expectation(st, "sx")
        cols["var_sz"][i] = (expectation(st, "sz2")
                             - expectation(st, "sz") ** 2)
    cols["fidelity_to_target"] = np.abs(
        trace.amplitudes @ np.conj(target_state.amplitudes)) ** 2
    return cols


def write_trace_csv(path: Path, trace: Trace, cols: dict):
    sys_ = trace.system
    s = int(sys_.total_spin)
    mheaders = [f"p_m_{m}" for m in range(-s, s + 1)]
    header = (["t", "alpha_t_over_chi", "beta", "omega", "norm"] + mheaders
              + ["f_x", "f_y", "f_z", "sx", "var_sz", "fidelity_to_target"])
    alpha = trace.schedule.chirp.alpha
    pops = trace.populations
    norms = trace.norms
    lines = [",".join(header)]
    for i, t in enumerate(trace.sample_times):
        # alpha is stored in chi^2 units and t in 1/chi units, so the
        # dimensionless alpha*t/chi of the figures is just their product
        row = [t, alpha * t, trace.beta[i], trace.omega[i], norms[i]]
        row.extend(pops[i])
        row.extend(cols[k][i] for k in ("f_x", "f_y", "f_z", "sx", "var_sz",
                                        "fidelity_to_target"))
        lines.append(",".join(_fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# simulate

def _propagate_kwargs(cfg: ScenarioConfig) -> dict:
    kw = {}
    if cfg.rtol is not None:
        kw["rtol"] = cfg.rtol
    if cfg.atol is not None:
        kw["atol"] = cfg.atol
    return kw


def run_simulate(cfg: ScenarioConfig, out_dir: Path) -> dict:
    """Run one scenario; writes trace.csv, summary.json (and post.csv)."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    system = SpinSystem(cfg.n_atoms, cfg.chi)
    schedule = build_schedule(cfg, system)
    target_state, target_desc = resolve_target(cfg, system)
    init = dicke_state(system, int(system.total_spin))
    samples = np.linspace(schedule.t_start, schedule.t_end, cfg.samples)
    log.info("simulate: N=%d protocol=%s span=[%g, %g]", cfg.n_atoms,
             cfg.protocol, schedule.t_start, schedule.t_end)
    trace = propagate(system, schedule, init, samples, **_propagate_kwargs(cfg))
    cols = trace_metric_columns(trace, target_state)
    write_trace_csv(out_dir / "trace.csv", trace, cols)

    final = trace.final_state
    trip = qfi_triple(final)
    sx = expectation(final, "sx")
    var_sz = expectation(final, "sz2") - expectation(final, "sz") ** 2
    try:
        xi2 = wineland_xi2(final)
        xi2_val, gain, undefined = xi2, gain_db(xi2), False
    except ContrastUndefinedError:
        xi2_val, gain, undefined = None, None, True
    summary = {
        "artifact_version": __version__,
        "config": _resolved_config_dict(cfg),
        "schedule": {
            "t1": schedule.coupling.t1, "t2": schedule.coupling.t2,
            "t_on": schedule.coupling.t_on, "t_off": schedule.coupling.t_off,
            "cutoff_time": schedule.chirp.cutoff_time,
            "t_start": schedule.t_start, "t_end": schedule.t_end,
            "crossing_period": crossing_period(system, cfg.alpha),
        },
        "target": target_desc,
        "final": {
            "fidelity_to_target": float(cols["fidelity_to_target"][-1]),
            "qfi": {"x": trip.f_x, "y": trip.f_y, "z": trip.f_z},
            "sx": sx, "var_sz": var_sz,
            "xi2": xi2_val, "xi2_undefined": undefined, "gain_db": gain,
            "norm_drift_max": float(np.abs(trace.norms - 1.0).max()),
        },
        "post_evolution": None,
    }

    if cfg.post_evolution is not None:
        post = _post_evolution_scan(final, target_state, cfg.post_evolution)
        summary["post_evolution"] = post["summary"]
        _write_post_csv(out_dir / "post.csv", post)

    _dump_json(summary, out_dir / "summary.json")
    return summary


def _post_evolution_scan(state: SpinState, target_state: SpinState,
                         post: PostEvolution) -> dict:
    """Overlap and squeezing along a window of free shearing evolution."""
    chi = state.system.chi
    m2 = state.system.m_values() ** 2
    ts = np.linspace(0.0, post.duration, post.samples)
    phases = np.exp(-1j * chi * np.outer(ts, m2))
    evolved = phases * state.amplitudes[None, :]
    overlap = np.abs(evolved @ np.conj(target_state.amplitudes)) ** 2
    sx = np.empty(post.samples)
    var_sz = np.empty(post.samples)
    xi2 = np.empty(post.samples)
    n = state.system.n_atoms
    for i in range(post.samples):
        st = SpinState(state.system, evolved[i])
        sx[i] = expectation(st, "sx")
        var_sz[i] = expectation(st, "sz2") - expectation(st, "sz") ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        xi2 = np.where(np.abs(sx) > 1e-9 * state.system.total_spin,
                       var_sz * n / sx ** 2, np.nan)
        gain = np.where(np.isfinite(xi2) & (xi2 > 0), -10 * np.log10(xi2), np.nan)
    ovl_best, t_best = best_oat_overlap(state, target_state)
    best_state = free_evolve_oat(state, t_best)
    try:
        xi2_best = wineland_xi2(best_state)
        gain_best = gain_db(xi2_best)
    except ContrastUndefinedError:
        xi2_best = gain_best = None
    return {
        "t": ts, "overlap": overlap, "sx": sx, "var_sz": var_sz,
        "xi2": xi2, "gain_db": gain,
        "summary": {
            "duration": post.duration, "samples": post.samples,
            "max_overlap": ovl_best, "t_at_max": t_best,
            "xi2_at_max": xi2_best, "gain_db_at_max": gain_best,
        },
    }


def _write_post_csv(path: Path, post: dict):
    header = ["t_offset", "overlap", "sx", "var_sz", "xi2", "gain_db"]
    lines = [",".join(header)]
    for i in range(len(post["t"])):
        lines.append(",".join(_fmt(post[k][i]) for k in
                              ("t", "overlap", "sx", "var_sz", "xi2", "gain_db")))
    path.write_text("\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# sweep-scaling

@dataclass(frozen=True)
class SweepConfig:
    n_list: tuple[int, ...]
    contrast_fraction: float
    alpha: float
    omega_max: float
    chi: float = 1.0
    rtol: float | None = None
    atol: float | None = None


def parse_sweep_config(d: dict, where: str = "config") -> SweepConfig:
    _check_version(d, where)
    _check_keys(d, {"version", "n_list", "contrast_fraction", "alpha",
                    "omega_max", "chi", "rtol", "atol"}, where)
    raw = _need(d, "n_list", where)
    if not isinstance(raw, list) or not raw:
        raise ConfigError("n_list must be a non-empty list of even integers")
    n_list = tuple(_as_even_atoms(n, "n_list entry") for n in raw)
    f = _as_number(_need(d, "contrast_fraction", where), "contrast_fraction",
                   positive=True)
    if not f < 1:
        raise ConfigError("contrast_fraction must be < 1")
    return SweepConfig(
        n_list=n_list, contrast_fraction=f,
        alpha=_as_number(_need(d, "alpha", where), "alpha", positive=True),
        omega_max=_as_number(_need(d, "omega_max", where), "omega_max",
                             positive=True),
        chi=_as_number(d.get("chi", 1.0), "chi", positive=True),
        rtol=_as_number(d["rtol"], "rtol", positive=True) if "rtol" in d else None,
        atol=_as_number(d["atol"], "atol", positive=True) if "atol" in d else None)


def _sweep_row(args) -> dict:
    n, cfg = args
    system = SpinSystem(n, cfg.chi)
    target = ess_for_contrast(system, cfg.contrast_fraction * system.total_spin)
    drive = optimize_ess_drive(system, cfg.alpha, cfg.omega_max, target,
                               rtol=cfg.rtol, atol=cfg.atol)
    ideal_xi2 = wineland_xi2(target.state)
    rap_xi2 = wineland_xi2(drive.aligned)
    return {
        "n": n, "omega_ratio": target.omega_ratio,
        "ideal_xi2": ideal_xi2, "ideal_gain_db": gain_db(ideal_xi2),
        "rap_xi2": rap_xi2, "rap_gain_db": gain_db(rap_xi2),
        "rap_overlap": drive.overlap,
        "t2": drive.t2, "t_off": drive.t_off, "oat_time": drive.oat_time,
    }


_SCALING_COLUMNS = ["n", "omega_ratio", "ideal_xi2", "ideal_gain_db",
                    "rap_xi2", "rap_gain_db", "rap_overlap", "t2", "t_off",
                    "oat_time"]


def run_sweep_scaling(cfg: SweepConfig, out_dir: Path, jobs: int = 1) -> list[dict]:
    """Ideal vs passage-produced gain per atom number; writes scaling.csv."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    work = [(n, cfg) for n in cfg.n_list]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_sweep_row, work))
    else:
        rows = [_sweep_row(w) for w in work]
    lines = [",".join(_SCALING_COLUMNS)]
    for row in rows:
        lines.append(",".join(
            (str(row[c]) if c == "n" else _fmt(row[c])) for c in _SCALING_COLUMNS))
    (out_dir / "scaling.csv").write_text("\n".join(lines) + "\n")
    return rows


# ---------------------------------------------------------------------------
# robustness

@dataclass(frozen=True)
class RobustnessConfig:
    n_actual: tuple[int, ...]
    n_design_factor: float
    contrast_fraction: float
    alpha: float
    omega_max: float
    chi: float = 1.0
    rtol: float | None = None
    atol: float | None = None


def parse_robustness_config(d: dict, where: str = "config") -> RobustnessConfig:
    _check_version(d, where)
    _check_keys(d, {"version", "n_actual", "n_design_factor",
                    "contrast_fraction", "alpha", "omega_max", "chi",
                    "rtol", "atol"}, where)
    raw = _need(d, "n_actual", where)
    if isinstance(raw, int) and not isinstance(raw, bool):
        raw = [raw]
    if not isinstance(raw, list) or not raw:
        raise ConfigError("n_actual must be an even integer or list of them")
    n_actual = tuple(_as_even_atoms(n, "n_actual entry") for n in raw)
    factor = _as_number(_need(d, "n_design_factor", where), "n_design_factor",
                        positive=True)
    for n in n_actual:
        nd = round(n * factor)
        if nd % 2 != 0 or nd < 2:
            raise ConfigError(
                f"n_design = round({n} * {factor}) = {nd} must be even and >= 2")
    f = _as_number(d.get("contrast_fraction", 0.5), "contrast_fraction",
                   positive=True)
    if not f < 1:
        raise ConfigError("contrast_fraction must be < 1")
    return RobustnessConfig(
        n_actual=n_actual, n_design_factor=factor, contrast_fraction=f,
        alpha=_as_number(_need(d, "alpha", where), "alpha", positive=True),
        omega_max=_as_number(_need(d, "omega_max", where), "omega_max",
                             positive=True),
        chi=_as_number(d.get("chi", 1.0), "chi", positive=True),
        rtol=_as_number(d["rtol"], "rtol", positive=True) if "rtol" in d else None,
        atol=_as_number(d["atol"], "atol", positive=True) if "atol" in d else None)


def _robustness_entry(n_actual: int, cfg: RobustnessConfig) -> dict:
    n_design = round(n_actual * cfg.n_design_factor)
    system = SpinSystem(n_actual, cfg.chi)
    target = ess_for_contrast(system, cfg.contrast_fraction * system.total_spin)
    matched = optimize_ess_drive(system, cfg.alpha, cfg.omega_max, target,
                                 rtol=cfg.rtol, atol=cfg.atol)
    gain_matched = matched.gain_db
    if n_design == n_actual:
        gain_mm, overlap_mm = gain_matched, matched.overlap
    else:
        design_system = SpinSystem(n_design, cfg.chi)
        design_target = ess_for_contrast(
            design_system, cfg.contrast_fraction * design_system.total_spin)
        design = optimize_ess_drive(design_system, cfg.alpha, cfg.omega_max,
                                    design_target, rtol=cfg.rtol, atol=cfg.atol)
        kw = {}
        if cfg.rtol is not None:
            kw["rtol"] = cfg.rtol
        if cfg.atol is not None:
            kw["atol"] = cfg.atol
        init = dicke_state(system, int(system.total_spin))
        sched = design.schedule
        trace = propagate(system, sched, init,
                          np.linspace(sched.t_start, sched.t_end, 201), **kw)
        overlap_mm, d = best_oat_overlap(trace.final_state, target.state)
        gain_mm = gain_db(wineland_xi2(free_evolve_oat(trace.final_state, d)))
    return {
        "n_actual": n_actual, "n_design": n_design,
        "gain_matched_db": gain_matched, "gain_mismatched_db": gain_mm,
        "decrease_db": gain_matched - gain_mm,
        "overlap_matched": matched.overlap, "overlap_mismatched": overlap_mm,
        "t2_matched": matched.t2, "t_off_matched": matched.t_off,
    }


def run_robustness(cfg: RobustnessConfig, out_dir: Path) -> dict:
    """Gain loss when driving with parameters designed for a different N."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    entries = [_robustness_entry(n, cfg) for n in cfg.n_actual]
    worst = max(e["decrease_db"] for e in entries)
    result = {
        "artifact_version": __version__,
        "config": {**asdict(cfg), "version": CONFIG_VERSION},
        "entries": entries,
        "worst_decrease_db": worst,
    }
    _dump_json(result, out_dir / "robustness.json")
    return result


# ---------------------------------------------------------------------------
# levels

@dataclass(frozen=True)
class LevelsConfig:
    n_atoms: int
    alpha: float
    omega_max: float
    n_levels: int
    chi: float = 1.0
    samples: int = DEFAULT_SAMPLES
    schedule: CustomSchedule | None = None


def parse_levels_config(d: dict, where: str = "config") -> LevelsConfig:
    _check_version(d, where)
    _check_keys(d, {"version", "n_atoms", "alpha", "omega_max", "n_levels",
                    "chi", "samples", "schedule"}, where)
    n_atoms = _as_even_atoms(_need(d, "n_atoms", where))
    n_levels = _as_int(d.get("n_levels", 5), "n_levels", minimum=1)
    if n_levels > n_atoms + 1:
        raise ConfigError(f"n_levels must be <= N+1 = {n_atoms + 1}")
    sched = None
    if "schedule" in d:
        sched = _parse_custom_schedule(d["schedule"], f"{where}.schedule")
    return LevelsConfig(
        n_atoms=n_atoms,
        alpha=_as_number(_need(d, "alpha", where), "alpha", positive=True),
        omega_max=_as_number(_need(d, "omega_max", where), "omega_max",
                             nonnegative=True),
        n_levels=n_levels,
        chi=_as_number(d.get("chi", 1.0), "chi", positive=True),
        samples=_as_int(d.get("samples", DEFAULT_SAMPLES), "samples", minimum=2),
        schedule=sched)


def _diabatic_m_order(n_levels: int) -> list[int]:
    """m values of the lowest diabatic parabola states: 0, 1, -1, 2, -2, ..."""
    order = [0]
    k = 1
    while len(order) < n_levels:
        order.append(k)
        if len(order) < n_levels:
            order.append(-k)
        k += 1
    return order[:n_levels]


def run_levels(cfg: LevelsConfig, out_dir: Path) -> dict:
    """Instantaneous spectrum along the protocol; writes levels.csv/.json."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    system = SpinSystem(cfg.n_atoms, cfg.chi)
    if cfg.schedule is not None:
        c = cfg.schedule
        schedule = Schedule(
            chirp=ChirpSchedule(alpha=cfg.alpha, cutoff_time=c.cutoff_time),
            coupling=CouplingSchedule(omega_max=cfg.omega_max, t1=c.t1, t2=c.t2,
                                      t_on=c.t_on, t_off=c.t_off),
            t_start=c.t_start, t_end=c.t_end)
    else:
        if cfg.omega_max > 0:
            schedule = dicke_protocol(system, cfg.alpha, cfg.omega_max, 0)
        else:
            base = dicke_protocol(system, cfg.alpha, 1.0, 0)
            schedule = Schedule(
                chirp=base.chirp,
                coupling=CouplingSchedule(omega_max=0.0, t1=base.coupling.t1,
                                          t2=base.coupling.t2,
                                          t_on=base.coupling.t_on,
                                          t_off=base.coupling.t_off),
                t_start=base.t_start, t_end=base.t_end)
    ts = np.linspace(schedule.t_start, schedule.t_end, cfg.samples)
    m_order = _diabatic_m_order(cfg.n_levels)
    s = int(system.total_spin)
    header = (["t"] + [f"e_diab_m_{m}" for m in m_order]
              + [f"e_adiab_{i}" for i in range(cfg.n_levels)])
    lines = [",".join(header)]
    for t in ts:
        eigs, diab = instantaneous_spectrum(system, schedule, t)
        row = [t]
        row.extend(diab[s + m] for m in m_order)
        row.extend(eigs[: cfg.n_levels])
        lines.append(",".join(_fmt(v) for v in row))
    (out_dir / "levels.csv").write_text("\n".join(lines) + "\n")
    info = {
        "artifact_version": __version__,
        "config": {**asdict(cfg), "version": CONFIG_VERSION},
        "crossings": [{"m": m, "t": t}
                      for m, t in crossing_times(system, cfg.alpha)],
        "crossing_period": crossing_period(system, cfg.alpha),
    }
    _dump_json(info, out_dir / "levels.json")
    return info


# ---------------------------------------------------------------------------
# ess-target export

def parse_ess_target_config(d: dict, where: str = "config") -> dict:
    _check_version(d, where)
    _check_keys(d, {"version", "n_atoms", "chi", "omega_ratio", "contrast",
                    "contrast_fraction"}, where)
    n_atoms = _as_even_atoms(_need(d, "n_atoms", where))
    chi = _as_number(d.get("chi", 1.0), "chi", positive=True)
    picks = [k for k in ("omega_ratio", "contrast", "contrast_fraction") if k in d]
    if len(picks) != 1:
        raise ConfigError(
            "need exactly one of omega_ratio, contrast, contrast_fraction")
    key = picks[0]
    val = _as_number(d[key], key, nonnegative=(key == "omega_ratio"))
    if key != "omega_ratio":
        s = n_atoms / 2
        hi = s if key == "contrast" else 1.0
        if not (0 < val < hi):
            raise ConfigError(f"{key} must lie in (0, {hi})")
    return {"n_atoms": n_atoms, "chi": chi, key: val}


def run_ess_target(cfg: dict, out_dir: Path) -> dict:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    system = SpinSystem(cfg["n_atoms"], cfg["chi"])
    if "omega_ratio" in cfg:
        tgt = ess_ground_state(system, cfg["omega_ratio"])
    elif "contrast" in cfg:
        tgt = ess_for_contrast(system, cfg["contrast"])
    else:
        tgt = ess_for_contrast(system,
                               cfg["contrast_fraction"] * system.total_spin)
    try:
        xi2 = wineland_xi2(tgt.state)
        gain = gain_db(xi2)
    except ContrastUndefinedError:
        xi2 = gain = None
    payload = {
        "artifact_version": __version__,
        "config": {**cfg, "version": CONFIG_VERSION},
        "n_atoms": system.n_atoms, "chi": system.chi,
        "omega_ratio": tgt.omega_ratio, "eigenvalue": tgt.eigenvalue,
        "contrast": tgt.contrast, "xi2": xi2, "gain_db": gain,
        "amplitudes": [float(a.real) for a in tgt.state.amplitudes],
    }
    _dump_json(payload, out_dir / "ess_target.json")
    return payload


# ---------------------------------------------------------------------------
# wigner export

def parse_wigner_config(d: dict, where: str = "config") -> dict:
    _check_version(d, where)
    scenario_keys = dict(d)
    extra = {}
    for k in ("time", "n_theta", "n_phi"):
        if k in scenario_keys:
            extra[k] = scenario_keys.pop(k)
    cfg = parse_scenario_config(scenario_keys, where)
    n_theta = _as_int(extra.get("n_theta", max(cfg.n_atoms + 1, 16)),
                      "n_theta", minimum=2)
    n_phi = _as_int(extra.get("n_phi", max(2 * cfg.n_atoms + 1, 32)),
                    "n_phi", minimum=4)
    time = extra.get("time", "final")
    if time != "final":
        time = _as_number(time, "time")
    return {"scenario": cfg, "time": time, "n_theta": n_theta, "n_phi": n_phi}


def write_sphere_csv(path: Path, fieldv: SphereField):
    lines = ["theta,phi,w"]
    for i, th in enumerate(fieldv.theta):
        for j, ph in enumerate(fieldv.phi):
            lines.append(",".join((_fmt(th), _fmt(ph), _fmt(fieldv.values[i, j]))))
    path.write_text("\n".join(lines) + "\n")


def run_wigner(cfg: dict, out_dir: Path) -> dict:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    scenario: ScenarioConfig = cfg["scenario"]
    system = SpinSystem(scenario.n_atoms, scenario.chi)
    schedule = build_schedule(scenario, system)
    init = dicke_state(system, int(system.total_spin))
    samples = np.linspace(schedule.t_start, schedule.t_end, scenario.samples)
    trace = propagate(system, schedule, init, samples,
                      **_propagate_kwargs(scenario))
    if cfg["time"] == "final":
        idx = len(samples) - 1
    else:
        idx = int(np.argmin(np.abs(samples - cfg["time"])))
    state = trace.state(idx)
    fieldv = wigner_grid(state, cfg["n_theta"], cfg["n_phi"])
    write_sphere_csv(out_dir / "wigner.csv", fieldv)
    info = {
        "artifact_version": __version__,
        "config": {**_resolved_config_dict(scenario), "time": cfg["time"],
                   "n_theta": cfg["n_theta"], "n_phi": cfg["n_phi"]},
        "sample_time": float(samples[idx]),
        "sphere_integral": fieldv.sphere_integral(),
    }
    _dump_json(info, out_dir / "wigner.json")
    return info
