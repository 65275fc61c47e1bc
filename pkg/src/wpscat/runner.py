"""Execute experiment configs and write their reports."""
from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .config import ExperimentConfig
from .dynamics import PotentialSpec, PropagatorConfig
from .errors import ConfigInvalid, NotCauchy, ResourceLimit, WpscatError
from .grid import Field, GridSpec, make_grid
from .lab import (ConvergenceTable, DiagnosticSeries, Thresholds, bound_state_solve, classify_state,
                  cone_domination, cook_wave_operator, duhamel_residual, inverse_wave_limit,
                  kuroda_envelope_check, lemma32_decay_scan, lemma33_cone_scan, probe_battery,
                  scat_diagnostic)
from .lab.series import fit_exponent
from .regions import make_region
from .wavepacket import annulus_window, gaussian_packet, make_window

SCHEMA_VERSION = "1.0"

# declared budgets
MAX_PHASE_ENTRIES = 1 << 26
MAX_STEPS = 5_000_000
MAX_POINTS_2D = 256


@dataclass
class Report:
    experiment: str
    config: dict
    series: list[DiagnosticSeries] = field(default_factory=list)
    tables: list[ConvergenceTable] = field(default_factory=list)
    scalars: dict = field(default_factory=dict)
    verdict: str | None = None
    provenance: dict = field(default_factory=dict)
    error: dict | None = None

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "experiment": self.experiment,
            "config": self.config,
            "results": {
                "series": [_series_dict(s) for s in self.series],
                "tables": [_table_dict(t) for t in self.tables],
                "scalars": dict(self.scalars),
                "verdict": self.verdict,
            },
            "provenance": self.provenance,
            "error": self.error,
        }


def _series_dict(s: DiagnosticSeries) -> dict:
    return {"region": s.region, "times": s.times, "values": s.values, "shears": s.shears,
            "fit_exponent": s.fit_exponent, "fit_window": list(s.fit_window), "verdict": s.verdict,
            "reference": s.reference}


def _table_dict(t: ConvergenceTable) -> dict:
    return {"horizons": t.horizons, "diffs": t.diffs, "fitted_exponent": t.fitted_exponent,
            "converged": t.converged}


# ---------------------------------------------------------------- building blocks

def _grid(cfg: ExperimentConfig) -> tuple[GridSpec, int]:
    g = cfg.grid
    try:
        grid = make_grid(g["dim"], g["half_width"], g["points"])
    except WpscatError as exc:
        raise ConfigInvalid(f"key 'grid': {exc}") from exc
    stride = int(g.get("x_stride", 1))
    if stride < 1 or grid.points % stride:
        raise ConfigInvalid("key 'grid.x_stride' must divide grid.points")
    return grid, stride


def _potential(params: dict) -> PotentialSpec:
    try:
        return PotentialSpec(**params)
    except (TypeError, ValueError) as exc:
        raise ConfigInvalid(f"key 'potential': {exc}") from exc


def _propagator(cfg: ExperimentConfig) -> PropagatorConfig:
    sch = cfg.schedule
    try:
        return PropagatorConfig(dt=float(sch.get("dt", 0.01)), t_tolerance=float(sch.get("t_tolerance", 1e-9)))
    except ValueError as exc:
        raise ConfigInvalid(f"key 'schedule.dt': {exc}") from exc


def _thresholds(cfg: ExperimentConfig) -> Thresholds:
    return Thresholds(**cfg.thresholds)


def _window(cfg: ExperimentConfig, grid: GridSpec):
    params = dict(cfg.window)
    kind = params.pop("kind", None)
    if kind is None:
        raise ConfigInvalid("missing key 'window.kind'")
    try:
        return make_window(kind, grid, **params)
    except TypeError as exc:
        raise ConfigInvalid(f"key 'window': {exc}") from exc
    except ValueError as exc:
        if isinstance(exc, WpscatError):
            raise
        raise ConfigInvalid(f"key 'window': {exc}") from exc


def _region(cfg: ExperimentConfig):
    params = dict(cfg.region)
    variant = params.pop("variant", None)
    if variant is None:
        raise ConfigInvalid("missing key 'region.variant'")
    try:
        return make_region(variant, **params)
    except (TypeError, ValueError) as exc:
        raise ConfigInvalid(f"key 'region': {exc}") from exc


def _state(cfg: ExperimentConfig, grid: GridSpec, V: PotentialSpec, prop: PropagatorConfig,
           th: Thresholds) -> Field:
    st = dict(cfg.state)
    kind = st.get("kind")
    if kind == "gaussian":
        return gaussian_packet(grid, st.get("width", 1.0), st.get("center", 0.0), st.get("momentum", 0.0))
    if kind == "annulus":
        return annulus_window(grid, st["low"], st["high"], st.get("sharpness", 1.0)).field
    if kind == "bound_state":
        W = _potential(st["potential"]) if "potential" in st else V
        return bound_state_solve(W, grid)[1]
    if kind == "cook_image":
        base = gaussian_packet(grid, st.get("width", 1.0), st.get("center", 0.0), st.get("momentum", 0.0))
        horizons = st.get("horizons", [10, 20, 40, 80])
        tau = float(cfg.schedule.get("tau", 0.0))
        return cook_wave_operator(base, tau, V, horizons, prop, st.get("sign", 1), th)[0]
    raise ConfigInvalid(f"key 'state.kind': unknown state {kind!r}")


def _check_budget(cfg: ExperimentConfig, grid: GridSpec, stride: int, prop: PropagatorConfig) -> None:
    if grid.dim == 2 and grid.points > MAX_POINTS_2D:
        raise ResourceLimit(f"2D grids are limited to {MAX_POINTS_2D} points per axis")
    if cfg.experiment in ("diagnostic", "classify", "duhamel"):
        entries = (grid.points // stride) ** grid.dim * grid.size
        if entries > MAX_PHASE_ENTRIES:
            raise ResourceLimit(f"phase-space array of {entries} entries exceeds {MAX_PHASE_ENTRIES}")
    sch = cfg.schedule
    spans = [abs(float(t)) for key in ("times", "horizons") for t in sch.get(key, [])]
    spans += [abs(float(sch[k])) for k in ("T", "t") if k in sch]
    spans += [abs(float(t)) for t in cfg.state.get("horizons", [])]
    if spans and max(spans) / prop.dt > MAX_STEPS:
        raise ResourceLimit(f"horizon {max(spans)} at dt={prop.dt} exceeds {MAX_STEPS} steps")


def _stable(a: float, b: float, th: Thresholds) -> str:
    if not (math.isfinite(a) and math.isfinite(b)):
        return "not_applicable"
    return "passed" if abs(a - b) <= th.stability_shift else "failed"


# ---------------------------------------------------------------- experiments

def _run_diagnostic(cfg, grid, stride, V, prop, th, report):
    f = _state(cfg, grid, V, prop, th)
    window, region = _window(cfg, grid), _region(cfg)
    sch = cfg.schedule
    tau = float(sch.get("tau", 0.0))
    times = sch.get("times") or list(np.linspace(tau, tau + float(sch.get("T", 50.0)), sch.get("samples", 6)))
    series = scat_diagnostic(f, tau, V, window, region, times, prop, stride, th, sch.get("fit_window"))
    report.series.append(series)
    report.verdict = series.verdict
    if sch.get("stability_check", True) and not V.is_zero:
        half = scat_diagnostic(f, tau, V, window, region, times, prop.halved(), stride, th, sch.get("fit_window"))
        report.provenance["dt_stability"] = _stable(series.fit_exponent, half.fit_exponent, th)
    else:
        report.provenance["dt_stability"] = "not_applicable"


def _run_classify(cfg, grid, stride, V, prop, th, report):
    f = _state(cfg, grid, V, prop, th)
    window, region = _window(cfg, grid), _region(cfg)
    sch = cfg.schedule
    a = getattr(region, "a", None)
    R = getattr(region, "R", getattr(region, "N", None))
    label = classify_state(f, float(sch.get("tau", 0.0)), V, window, a, R, float(sch.get("T", 50.0)), prop,
                           stride, int(sch.get("samples", 6)), region, th)
    report.verdict = label
    report.provenance["dt_stability"] = "not_applicable"


def _run_cook(cfg, grid, stride, V, prop, th, report):
    st = dict(cfg.state)
    base = gaussian_packet(grid, st.get("width", 1.0), st.get("center", 0.0), st.get("momentum", 0.0))
    sch = cfg.schedule
    horizons = sch.get("horizons", [10, 20, 40, 80])
    tau, sign = float(sch.get("tau", 0.0)), int(sch.get("sign", 1))
    out, table = cook_wave_operator(base, tau, V, horizons, prop, sign, th)
    report.tables.append(table)
    report.scalars.update({"output_norm": out.norm(), "fitted_exponent": table.fitted_exponent,
                           "converged": table.converged})
    if sch.get("stability_check", True) and not V.is_zero:
        _, half = cook_wave_operator(base, tau, V, horizons, prop.halved(), sign, th, strict=False)
        report.provenance["dt_stability"] = _stable(table.fitted_exponent, half.fitted_exponent, th)
    else:
        report.provenance["dt_stability"] = "not_applicable"


def _run_inverse(cfg, grid, stride, V, prop, th, report):
    f = _state(cfg, grid, V, prop, th)
    horizons = cfg.schedule.get("horizons", [10, 20, 40, 80])
    out, table = inverse_wave_limit(f, V, horizons, prop, th)
    report.tables.append(table)
    report.scalars.update({"output_norm": out.norm(), "fitted_exponent": table.fitted_exponent,
                           "converged": table.converged})
    if cfg.state.get("kind") == "cook_image":
        st = cfg.state
        base = gaussian_packet(grid, st.get("width", 1.0), st.get("center", 0.0), st.get("momentum", 0.0))
        report.scalars["round_trip_defect"] = (out - base).norm()
    report.provenance["dt_stability"] = "not_applicable"


def _lemma_setup(cfg, grid):
    window, region = _window(cfg, grid), _region(cfg)
    sch = cfg.schedule
    s_list = sch.get("s_list", [5, 7, 10, 14, 20, 28, 40, 50])
    fit = tuple(sch.get("fit_window", (5.0, 50.0)))
    return window, region, s_list, fit, int(sch.get("power_iterations", 0)), float(sch.get("probe_width", 1.0))


def _run_lemma32(cfg, grid, stride, V, prop, th, report):
    window, region, s_list, fit, iters, pw = _lemma_setup(cfg, grid)
    probes = probe_battery(grid, region.a, region.R, pw)
    series = lemma32_decay_scan(V, window, probes, region.a, region.R, s_list, stride, iters, cfg.seed, th, fit)
    report.series.append(series)
    report.scalars["fit_exponent"] = series.fit_exponent
    report.provenance["dt_stability"] = "not_applicable"


def _run_lemma33(cfg, grid, stride, V, prop, th, report):
    window, region, s_list, fit, iters, pw = _lemma_setup(cfg, grid)
    sch = cfg.schedule
    b_values = sch.get("b_values", [region.b])
    curves = {}
    for b in b_values:
        probes = probe_battery(grid, region.a, b, pw)
        curves[b] = lemma33_cone_scan(V, window, probes, region.a, b, region.sign, s_list, stride, iters,
                                      cfg.seed, th, fit)
        report.series.append(curves[b])
        report.scalars[f"fit_exponent_b{b:g}"] = curves[b].fit_exponent
    if len(b_values) == 2:
        b1, b2 = b_values
        ok, _ = cone_domination(curves[b1], curves[b2], b1, float(sch.get("domination_tol", 0.3)))
        report.scalars["dominated"] = ok
    report.provenance["dt_stability"] = "not_applicable"


def _run_kuroda(cfg, grid, stride, V, prop, th, report):
    sch = cfg.schedule
    f = _state(cfg, grid, V, prop, th)
    rep = kuroda_envelope_check(f, float(sch["K_lo"]), float(sch["K_hi"]), float(sch.get("margin", 0.5)),
                                int(sch.get("l", 2)), sch.get("t_list", [2, 5, 10, 20]))
    times, vals = rep.times, rep.constants
    report.series.append(DiagnosticSeries(times, vals, fit_exponent(times, vals), (min(times), max(times)),
                                          "bounded" if rep.bounded else "undetermined", region="outside_K'",
                                          shears=[0.0] * len(times)))
    report.scalars.update({"ratio": rep.ratio, "bounded": rep.bounded})
    report.provenance["dt_stability"] = "not_applicable"


def _run_duhamel(cfg, grid, stride, V, prop, th, report):
    sch = cfg.schedule
    f = _state(cfg, grid, V, prop, th)
    window = _window(cfg, grid)
    r = duhamel_residual(f, float(sch.get("t0", 0.0)), float(sch.get("t", 1.0)), V, window,
                         int(sch.get("quad_steps", 16)), prop, stride)
    report.scalars["residual"] = r
    report.provenance["dt_stability"] = "not_applicable"


def _run_bound(cfg, grid, stride, V, prop, th, report):
    E, w = bound_state_solve(V, grid)
    report.scalars.update({"energy": E, "norm": w.norm()})
    report.provenance["dt_stability"] = "not_applicable"


_RUNNERS = {
    "diagnostic": _run_diagnostic, "classify": _run_classify, "cook": _run_cook,
    "inverse_cook": _run_inverse, "lemma32": _run_lemma32, "lemma33": _run_lemma33,
    "kuroda": _run_kuroda, "duhamel": _run_duhamel, "bound_state": _run_bound,
}


def run_experiment(cfg: ExperimentConfig) -> Report:
    """Run one config. Config problems raise ConfigInvalid; numerical failures land in ``report.error``."""
    grid, stride = _grid(cfg)
    V = _potential(cfg.potential)
    prop = _propagator(cfg)
    try:
        th = _thresholds(cfg)
    except TypeError as exc:
        raise ConfigInvalid(f"key 'thresholds': {exc}") from exc
    # defaults filled in by the library are echoed here so the report is self-describing
    resolved = {"potential": asdict(V), "propagator": asdict(prop), "thresholds": asdict(th),
                "grid": {"dim": grid.dim, "half_width": grid.half_width, "points": grid.points, "x_stride": stride}}
    report = Report(cfg.experiment, cfg.to_dict(), provenance={"version": __version__, "resolved": resolved})
    try:
        _check_budget(cfg, grid, stride, prop)
        _RUNNERS[cfg.experiment](cfg, grid, stride, V, prop, th, report)
    except ConfigInvalid:
        raise
    except WpscatError as exc:
        report.error = {"type": type(exc).__name__, "message": str(exc)}
        if isinstance(exc, NotCauchy) and exc.table is not None:
            report.tables.append(exc.table)
        report.provenance.setdefault("dt_stability", "not_run")
    return report


# ---------------------------------------------------------------- output

SERIES_HEADER = ("t", "value", "region", "shear")
TABLE_HEADER = ("T", "diff", "fitted_exponent")
SCALAR_HEADER = ("quantity", "value")


def _fmt(x) -> str:
    if isinstance(x, bool) or x is None or isinstance(x, str):
        return str(x)
    return format(float(x), ".17g")


def _json_value(x):
    if isinstance(x, dict):
        return {k: _json_value(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_json_value(v) for v in x]
    if isinstance(x, (bool, str)) or x is None:
        return x
    if isinstance(x, (int, np.integer)):
        return int(x)
    x = float(x)
    if not math.isfinite(x):
        return None
    return float(format(x, ".17g"))


def emit_report(report: Report, out_dir, fmt: str = "csv") -> list[Path]:
    """Write the report as CSV files or as report.json under ``out_dir``; returns the paths."""
    from .errors import IoFailure

    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        if fmt == "json":
            path = out / "report.json"
            path.write_text(json.dumps(_json_value(report.to_dict()), indent=2, sort_keys=True) + "\n")
            return [path]
        if fmt != "csv":
            raise ValueError(f"unknown format {fmt!r}")
        paths = [out / "series.csv", out / "table.csv", out / "scalars.csv"]
        with paths[0].open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(SERIES_HEADER)
            for s in report.series:
                for t, v, sh in zip(s.times, s.values, s.shears):
                    w.writerow((_fmt(t), _fmt(v), s.region, _fmt(sh)))
        with paths[1].open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(TABLE_HEADER)
            for tab in report.tables:
                for T, d in zip(tab.horizons, tab.diffs):
                    w.writerow((_fmt(T), _fmt(d), _fmt(tab.fitted_exponent)))
        with paths[2].open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(SCALAR_HEADER)
            rows = dict(report.scalars)
            if report.verdict is not None:
                rows["verdict"] = report.verdict
            if report.error is not None:
                rows["error"] = report.error["type"]
            for k in sorted(rows):
                w.writerow((k, _fmt(rows[k])))
        return paths
    except OSError as exc:
        raise IoFailure(f"cannot write report to {out}: {exc}") from exc
