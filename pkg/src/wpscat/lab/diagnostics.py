"""The D_scat diagnostic, the bound/scattering classifier and Duhamel residuals."""
from __future__ import annotations

import numpy as np

from ..dynamics import PotentialSpec, PropagatorConfig, propagate_series
from ..errors import ZeroState
from ..grid import Field, inner_product
from ..regions import GammaAR, build_mask, masked_norm, shear_array, sheared_wpt
from ..wavepacket import PhaseSpaceField, Window, evolve_window, phase_norm, wpt_array, wpt_forward
from .series import VERDICT_LABELS, DiagnosticSeries, Thresholds, make_series


def scat_diagnostic(
    f: Field,
    tau: float,
    V: PotentialSpec,
    window: Window,
    region,
    times,
    cfg: PropagatorConfig = PropagatorConfig(),
    x_stride: int = 1,
    thresholds: Thresholds = Thresholds(),
    fit_window=None,
) -> DiagnosticSeries:
    """Masked phase-space norm of U(t, tau) f at each t.

    Sheared regions look at W_{Phi(t-tau)}[U(t,tau) f](x + (t-tau) xi, xi); the
    static variants (KaN, XiD, XiDR) use the plain transform with the fixed
    window, and KaN takes the running infimum before the verdict. The verdict
    compares against the full phase-space norm at the first time.
    """
    times = [float(t) for t in times]
    if not window.normalized or not window.nonzero_mean:
        raise ValueError("diagnostic window must be normalized with nonzero mean")
    states = propagate_series(f, tau, times, V, cfg)
    mask = build_mask(region, f.grid, x_stride)
    values, shears = [], []
    reference = None
    for t, u in zip(times, states):
        s = t - tau if region.sheared else 0.0
        w = evolve_window(window, s) if region.sheared else window
        F = sheared_wpt(w, u, s, x_stride)
        if reference is None:
            reference = phase_norm(F)
        values.append(masked_norm(F, mask))
        shears.append(s)
    use_inf = type(region).__name__ == "KaN"
    return make_series(times, values, thresholds, reference or 0.0, type(region).__name__,
                       shears, fit_window, use_inf=use_inf)


def classify_state(
    f: Field,
    tau: float,
    V: PotentialSpec,
    window: Window,
    a: float,
    R: float,
    T: float,
    cfg: PropagatorConfig = PropagatorConfig(),
    x_stride: int = 1,
    samples: int = 6,
    region=None,
    thresholds: Thresholds = Thresholds(),
) -> str:
    """scattering-like, bound-like or undetermined, from the Gamma_{a,R} diagnostic up to tau + T."""
    if f.norm() == 0:
        raise ZeroState("cannot classify the zero state")
    if not V.time_independent:
        raise ValueError("classification needs a time-independent potential")
    region = GammaAR(a, R) if region is None else region
    times = tau + np.linspace(0.0, T, samples)
    if type(region).__name__ == "KaN":
        # geometric subsequence t_N for the static-region variant
        times = tau + np.concatenate([[0.0], T * 2.0 ** -np.arange(samples - 2, -1, -1)])
    series = scat_diagnostic(f, tau, V, window, region, times, cfg, x_stride, thresholds)
    return VERDICT_LABELS[series.verdict]


def bound_overlap_series(u0: Field, omega: Field, energy: float, V: PotentialSpec, times,
                         cfg: PropagatorConfig = PropagatorConfig()) -> list[float]:
    """|<U(t,0) u0, exp(-i t E) omega>| at each t."""
    states = propagate_series(u0, 0.0, times, V, cfg)
    return [abs(inner_product(u, omega * np.exp(-1j * t * energy))) for t, u in zip(times, states)]


def duhamel_residual(
    psi: Field,
    t0: float,
    t: float,
    V: PotentialSpec,
    window: Window,
    quad_steps: int,
    cfg: PropagatorConfig = PropagatorConfig(),
    x_stride: int = 1,
) -> float:
    """Phase-space norm of the defect in the characteristic-curve representation

        W_{phi(t-t0)}[U(t,t0) psi](x, xi)
          = e^{-i(t-t0)|xi|^2/2} W_{phi0} psi(x - (t-t0) xi, xi)
            - i int_{t0}^{t} e^{-i(t-s)|xi|^2/2} W_{phi(s-t0)}[V(s) U(s,t0) psi](x - (t-s) xi, xi) ds

    with the integral done by the trapezoid rule on ``quad_steps`` intervals.
    """
    if quad_steps < 2:
        raise ValueError("quad_steps must be at least 2")
    g = psi.grid
    if t == t0:
        return 0.0
    nodes = np.linspace(t0, t, quad_steps + 1)
    states = propagate_series(psi, t0, nodes, V, cfg)
    xi2 = _xi_squared(g, x_stride)
    phi = window.field.values

    def transported(phi_s, u, lag):
        W = wpt_array(phi_s, u, g, x_stride)
        return np.exp(-0.5j * lag * xi2) * shear_array(W, g, x_stride, -lag)

    lhs = wpt_array(evolve_window(window, t - t0).field.values, states[-1].values, g, x_stride)
    rhs = transported(phi, psi.values, t - t0)
    weights = np.full(nodes.size, nodes[1] - nodes[0])
    weights[[0, -1]] *= 0.5
    integral = np.zeros_like(rhs)
    if not V.is_zero:
        for s, w, u in zip(nodes, weights, states):
            phi_s = evolve_window(window, s - t0).field.values
            integral += w * transported(phi_s, V.on_grid(s, g) * u.values, t - s)
    rhs = rhs - 1j * integral
    return phase_norm(PhaseSpaceField(g, x_stride, lhs - rhs))


def _xi_squared(grid, x_stride):
    d = grid.dim
    out = 0.0
    for i in range(d):
        shape = [1] * (2 * d)
        shape[d + i] = grid.points
        out = out + grid.xi.reshape(shape) ** 2
    return out
