"""Time series records, decay fits and verdict rules shared by the experiments."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

VERDICT_LABELS = {"decaying": "scattering-like", "plateau": "bound-like", "undetermined": "undetermined"}


@dataclass(frozen=True)
class Thresholds:
    decay_ratio: float = 0.05
    plateau_ratio: float = 0.5
    cauchy_tol: float = 5e-3
    stability_shift: float = 0.1


def fit_exponent(times, values, window=None) -> float:
    """Slope of log(value) against log(1 + t) over ``window`` (inclusive); nan if < 2 usable points."""
    t = np.asarray(times, dtype=float)
    v = np.asarray(values, dtype=float)
    sel = v > 0
    if window is not None:
        sel &= (t >= window[0] - 1e-12) & (t <= window[1] + 1e-12)
    if sel.sum() < 2:
        return float("nan")
    return float(np.polyfit(np.log1p(np.abs(t[sel])), np.log(v[sel]), 1)[0])


def verdict(final: float, reference: float, th: Thresholds) -> str:
    if reference <= 0:
        return "undetermined"
    if final <= th.decay_ratio * reference:
        return "decaying"
    if final >= th.plateau_ratio * reference:
        return "plateau"
    return "undetermined"


@dataclass
class DiagnosticSeries:
    times: list[float]
    values: list[float]
    fit_exponent: float
    fit_window: tuple[float, float]
    verdict: str
    reference: float = 0.0
    region: str = ""
    shears: list[float] = field(default_factory=list)

    def __post_init__(self):
        if any(b <= a for a, b in zip(self.times, self.times[1:])):
            raise ValueError("times must be strictly increasing")
        if any(v < 0 for v in self.values):
            raise ValueError("series values must be non-negative")


def make_series(times, values, th: Thresholds, reference: float, region: str = "",
                shears=None, fit_window=None, use_inf: bool = False) -> DiagnosticSeries:
    """Build a series; the verdict compares the final (or running-minimum) value to ``reference``."""
    times = [float(t) for t in times]
    values = [float(v) for v in values]
    if fit_window is None:
        pos = [t for t in times if t > 0] or times
        fit_window = (min(pos), max(pos)) if pos else (0.0, 0.0)
    last = min(values) if use_inf else values[-1]
    return DiagnosticSeries(
        times=times,
        values=values,
        fit_exponent=fit_exponent(times, values, fit_window),
        fit_window=tuple(float(w) for w in fit_window),
        verdict=verdict(last, reference, th) if values else "undetermined",
        reference=float(reference),
        region=region,
        shears=[float(s) for s in (shears if shears is not None else [0.0] * len(times))],
    )


@dataclass
class ConvergenceTable:
    horizons: list[float]
    diffs: list[float]
    fitted_exponent: float
    converged: bool

    @classmethod
    def from_states(cls, horizons, states, scale: float, th: Thresholds) -> "ConvergenceTable":
        diffs = [float((b - a).norm()) for a, b in zip(states, states[1:])]
        exp = fit_exponent(horizons[: len(diffs)], diffs)
        return cls([float(h) for h in horizons], diffs, exp, _cauchy(diffs, scale, th))


def _cauchy(diffs, scale: float, th: Thresholds) -> bool:
    if not diffs:
        return True
    if max(diffs) <= 1e-12 * max(scale, 1.0):
        return True
    past = diffs[1:]
    monotone = all(b < a for a, b in zip(past, past[1:]))
    return monotone and diffs[-1] <= th.cauchy_tol * scale
