"""Wave operators as Cook limits over geometric horizon ladders.

    W(tau) u0  ~  U(tau, tau + sign*T) exp(-i sign*T H0) u0      (T -> infinity)
    W^-1 u0    ~  exp(i T H0) U(T, 0) u0
"""
from __future__ import annotations

import numpy as np

from ..dynamics import PotentialSpec, PropagatorConfig, evolve_full, free_propagate, propagate_series
from ..errors import DomainEscape, LowFrequencyMass, NotCauchy
from ..grid import Field, boundary_mass, fourier_forward
from .series import ConvergenceTable, Thresholds


def low_frequency_mass(f: Field, cut: float) -> float:
    """Fraction of |f_hat|^2 carried by |xi| <= cut."""
    fh = np.abs(fourier_forward(f).values) ** 2
    rho = np.sqrt(sum(c**2 for c in f.grid.freq_coords())) * np.ones(f.grid.shape)
    total = fh.sum()
    return float(fh[rho <= cut].sum() / total) if total > 0 else 0.0


def _check_horizons(horizons) -> list[float]:
    hs = [float(h) for h in horizons]
    if not hs or any(b <= a for a, b in zip(hs, hs[1:])) or hs[0] <= 0:
        raise ValueError("horizons must be positive and strictly increasing")
    return hs


def _guard(f: Field, what: str, tol: float = 1e-8) -> None:
    m = boundary_mass(f)
    if m > tol * max(f.norm() ** 2, 1e-300):
        raise DomainEscape(f"{what}: mass {m:.3g} reached the box edge; enlarge half_width")


def cook_wave_operator(
    u0: Field,
    tau: float,
    V: PotentialSpec,
    horizons,
    cfg: PropagatorConfig = PropagatorConfig(),
    sign: int = 1,
    thresholds: Thresholds = Thresholds(),
    low_freq_cut: float = 0.2,
    low_freq_tol: float = 1e-6,
    strict: bool = True,
) -> tuple[Field, ConvergenceTable]:
    """Approximate W_sign(tau) u0; raises NotCauchy unless the ladder converges (when ``strict``)."""
    hs = _check_horizons(horizons)
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    lf = low_frequency_mass(u0, low_freq_cut)
    if lf > low_freq_tol:
        raise LowFrequencyMass(f"{lf:.3g} of the spectral mass sits in |xi| <= {low_freq_cut}")
    states = []
    for T in hs:
        free = free_propagate(u0, sign * T)
        _guard(free, f"free state at T={T}")
        states.append(evolve_full(free, tau + sign * T, tau, V, cfg))
    table = ConvergenceTable.from_states(hs, states, u0.norm(), thresholds)
    if strict and not table.converged:
        raise NotCauchy(f"Cook ladder did not settle: diffs {table.diffs}", table)
    return states[-1], table


def inverse_wave_limit(
    u0: Field,
    V: PotentialSpec,
    horizons,
    cfg: PropagatorConfig = PropagatorConfig(),
    thresholds: Thresholds = Thresholds(),
    strict: bool = True,
) -> tuple[Field, ConvergenceTable]:
    """Approximate exp(i T H0) U(T, 0) u0 as T grows."""
    hs = _check_horizons(horizons)
    evolved = propagate_series(u0, 0.0, hs, V, cfg)
    for T, u in zip(hs, evolved):
        _guard(u, f"evolved state at T={T}")
    states = [free_propagate(u, -T) for T, u in zip(hs, evolved)]
    table = ConvergenceTable.from_states(hs, states, u0.norm(), thresholds)
    if strict and not table.converged:
        raise NotCauchy(f"inverse limit did not settle: diffs {table.diffs}", table)
    return states[-1], table
