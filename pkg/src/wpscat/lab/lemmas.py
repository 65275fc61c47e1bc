"""Decay scans for the potential term of the characteristic-curve representation.

For s >= 0 the scans estimate the operator norm of

    T_s psi = chi_region(x, xi) * W_{phi(s)}[V(s) psi](x + sign*s*xi, xi)

over a declared family of probe states, optionally enlarged by a power-iteration
maximizer built on the exact discrete adjoint. The region is the complement of
Gamma_{a,R} for the first scan and the outgoing/incoming cone Gamma_a^{b,+-} for
the second. Phase-space points whose sheared argument leaves the computational
box (less the window's spread) are dropped from the region, since the periodic
grid cannot represent them; so are xi rows within the window band of Nyquist,
where the transform would pair them with aliased frequencies.

Also the free-flow envelope check away from the classical cone x/t in K.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..dynamics import PotentialSpec, free_propagate
from ..errors import BadSpectralSupport, WindowBandViolation
from ..grid import Field, GridSpec
from ..regions import Complement, GammaAR, GammaConeOut, shear_array
from ..wavepacket import Window, band_leakage, gaussian_packet, sigma_norm, wpt_rows, wpt_rows_adjoint
from .series import DiagnosticSeries, Thresholds, make_series


def check_annulus(window: Window, a: float) -> None:
    """The window must carry a band (L/2, L) certificate with L <= a/6."""
    if window.band is None:
        raise WindowBandViolation("window has no Fourier annulus certificate")
    lo, hi = window.band
    if hi > a / 6 * (1 + 1e-12) or lo < hi / 2 * (1 - 1e-12):
        raise WindowBandViolation(f"band {window.band} is not inside (L/2, L) with L <= a/6 = {a / 6:g}")


def probe_battery(grid: GridSpec, a: float, R: float, width: float = 1.0) -> list[Field]:
    """Normalized Gaussians centred at |x| in {0, R/2, R} with momenta {0, a, 2a} (both signs)."""
    centres = sorted({c * u for c in (0.0, R / 2, R) for u in (1, -1)})
    momenta = sorted({p * u for p in (0.0, a, 2 * a) for u in (1, -1)})
    out = []
    for c in centres:
        for p in momenta:
            if grid.dim == 1:
                out.append(gaussian_packet(grid, width, c, p))
            else:
                out.append(gaussian_packet(grid, width, (c, 0.0), (p, 0.0)))
    return out


def _row_coords(grid: GridSpec, rows):
    """Broadcastable x and xi coordinates on the listed spatial rows times the full xi grid."""
    d = grid.dim
    idx = np.asarray(rows, dtype=int).reshape(len(rows), d)
    X = tuple(grid.x[idx[:, i]].reshape((len(rows),) + (1,) * d) for i in range(d))
    XI = []
    for i in range(d):
        shape = [1] * (d + 1)
        shape[1 + i] = grid.points
        XI.append(grid.xi.reshape(shape))
    return X, tuple(XI)


def _window_core(phi: np.ndarray, grid: GridSpec, tail: float = 1e-10) -> float:
    """Radius outside which the window carries at most ``tail`` of its squared norm."""
    r = grid.radius().ravel()
    w = np.abs(phi.ravel()) ** 2
    order = np.argsort(r)[::-1]
    outer = np.cumsum(w[order]) / w.sum()
    k = np.searchsorted(outer, tail)
    return float(r[order][min(k, r.size - 1)])


class _Operator:
    """T_s on a set of phase-space rows, with its exact discrete adjoint.

    For the outgoing shear the free transport law gives
    W_{phi(s)}[g](x + s xi, xi) = exp(-i s |xi|^2 / 2) W_{phi0}[exp(i s H0) g](x, xi),
    so only the rows meeting the region are transformed. The incoming shear
    transforms every strided row with the evolved window and resamples.
    """

    def __init__(self, grid, phi0, pot, region, s, sign, x_stride, margin, band_hi):
        self.grid, self.pot, self.s, self.sign = grid, pot, s, sign
        d = grid.dim
        self.outgoing = sign == 1
        nodes = [tuple(int(x_stride * j) for j in ij) for ij in np.ndindex(*((grid.points // x_stride,) * d))]
        keep, masks = [], []
        for i in range(0, len(nodes), 256):
            chunk = nodes[i : i + 256]
            X, XI = _row_coords(grid, chunk)
            m = region.indicator(X, XI) & _in_cell(X, XI, sign * s, grid.half_width - margin)
            # rows within band_hi of Nyquist pair with aliased frequencies of the window
            for xi in XI:
                m = m & (np.abs(xi) + band_hi < np.pi / grid.spacing)
            m = np.broadcast_to(m, (len(chunk),) + grid.shape)
            for node, row in zip(chunk, m):
                if row.any() or not self.outgoing:
                    keep.append(node)
                    masks.append(row)
        self.rows = keep
        self.mask = np.array(masks, dtype=bool).reshape((len(keep),) + grid.shape)
        if self.outgoing:
            self.phi = phi0
            self.chirp = np.exp(-0.5j * s * sum(c**2 for c in grid.freq_coords()))
        else:
            self.phi = free_propagate(Field(grid, phi0), s).values
        self.x_stride = x_stride
        self.weight = (x_stride * grid.spacing) ** d

    def _shear(self, W, shear):
        g, d = self.grid, self.grid.dim
        nx = g.points // self.x_stride
        out = shear_array(W.reshape((nx,) * d + g.shape), g, self.x_stride, shear)
        return out.reshape(W.shape)

    def apply(self, psi: np.ndarray) -> np.ndarray:
        g = self.grid
        if not self.rows:
            return np.zeros((0,) + g.shape, dtype=complex)
        if self.outgoing:
            back = free_propagate(Field(g, self.pot * psi), -self.s).values
            return self.mask * self.chirp * wpt_rows(self.phi, back, g, self.rows)
        W = wpt_rows(self.phi, self.pot * psi, g, self.rows)
        return self.mask * self._shear(W, -self.s)

    def adjoint(self, G: np.ndarray) -> np.ndarray:
        g = self.grid
        if not self.rows:
            return np.zeros(g.shape, dtype=complex)
        if self.outgoing:
            F = self.mask * np.conj(self.chirp) * G
            back = wpt_rows_adjoint(self.phi, F, g, self.rows, self.weight)
            return self.pot * free_propagate(Field(g, back), self.s).values
        F = self._shear(self.mask * G, self.s)
        return self.pot * wpt_rows_adjoint(self.phi, F, g, self.rows, self.weight)

    def gram(self, psi: np.ndarray, with_adjoint: bool = True):
        """(||T psi||, T* T psi); the outgoing case streams over row chunks to bound memory."""
        g = self.grid
        if not self.outgoing:
            G = self.apply(psi)
            return self.norm_of(G), (self.adjoint(G) if with_adjoint else None)
        back = free_propagate(Field(g, self.pot * psi), -self.s).values
        total, acc = 0.0, np.zeros(g.shape, dtype=complex)
        step = max(1, (1 << 21) // g.size)
        for i in range(0, len(self.rows), step):
            rows = self.rows[i : i + step]
            G = self.mask[i : i + step] * self.chirp * wpt_rows(self.phi, back, g, rows)
            total += float(np.sum(np.abs(G) ** 2))
            if with_adjoint:
                acc += wpt_rows_adjoint(self.phi, np.conj(self.chirp) * G, g, rows, self.weight)
        nrm = float(np.sqrt(total * self.cell))
        if not with_adjoint:
            return nrm, None
        return nrm, self.pot * free_propagate(Field(g, acc), self.s).values

    @property
    def cell(self) -> float:
        g = self.grid
        return (self.x_stride * g.spacing * g.freq_step) ** g.dim

    def norm_of(self, G: np.ndarray) -> float:
        return float(np.sqrt(np.sum(np.abs(G) ** 2) * self.cell))


def _in_cell(X, XI, shear: float, limit: float):
    """Sheared argument x + shear*xi stays within ``limit`` of the origin."""
    z2 = sum((x + shear * xi) ** 2 for x, xi in zip(X, XI))
    return z2 <= limit**2


def _power_sup(op: _Operator, seed_state: np.ndarray, iterations: int, rng) -> float:
    """Largest ||T psi|| / ||psi|| seen along a power iteration on T*T."""
    g = op.grid
    noise = rng.standard_normal(g.shape) + 1j * rng.standard_normal(g.shape)
    psi = seed_state + 0.1 * noise * np.abs(seed_state).max()
    best = 0.0
    for _ in range(iterations):
        nrm = np.sqrt(np.sum(np.abs(psi) ** 2) * g.cell)
        if nrm == 0:
            return best
        val, psi = op.gram(psi / nrm)
        best = max(best, val)
    return best


def _scan(V, phi0, probes, region, sign, s_list, x_stride, power_iterations, seed,
          thresholds, fit_window, name):
    g = phi0.grid
    rng = np.random.default_rng(seed)
    core = _window_core(phi0.field.values, g)
    hi = phi0.band[1]
    values, shears = [], []
    for s in s_list:
        s = float(s)
        shears.append(sign * s)
        if V.is_zero:
            values.append(0.0)
            continue
        # contributions come from |y| up to |x + sign*s*xi| + s*hi + core
        op = _Operator(g, phi0.field.values, V.on_grid(s, g), region, s, sign, x_stride, s * hi + core, hi)
        probe_vals = [op.gram(p.values, with_adjoint=False)[0] for p in probes]
        best = max(probe_vals, default=0.0)
        if power_iterations > 0 and op.rows:
            seed_state = probes[int(np.argmax(probe_vals))].values if probes else np.ones(g.shape, complex)
            best = max(best, _power_sup(op, seed_state, power_iterations, rng))
        values.append(best)
    return make_series(s_list, values, thresholds, values[0] if values else 0.0, name, shears, fit_window)


def lemma32_decay_scan(
    V: PotentialSpec,
    phi0: Window,
    probes,
    a: float,
    R: float,
    s_list,
    x_stride: int = 1,
    power_iterations: int = 0,
    seed: int = 0,
    thresholds: Thresholds = Thresholds(),
    fit_window=(5.0, 50.0),
) -> DiagnosticSeries:
    """sup over probes of ||T_s psi|| on the complement of Gamma_{a,R}, for each s."""
    check_annulus(phi0, a)
    region = Complement(GammaAR(a, R))
    return _scan(V, phi0, probes, region, 1, s_list, x_stride, power_iterations, seed,
                 thresholds, fit_window, "Complement(GammaAR)")


def lemma33_cone_scan(
    V: PotentialSpec,
    phi0: Window,
    probes,
    a: float,
    b: float,
    sign: int,
    s_list,
    x_stride: int = 1,
    power_iterations: int = 0,
    seed: int = 0,
    thresholds: Thresholds = Thresholds(),
    fit_window=(5.0, 50.0),
) -> DiagnosticSeries:
    """sup over probes of ||T_s psi|| on Gamma_a^{b,sign} with the shear x + sign*s*xi."""
    check_annulus(phi0, a)
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    return _scan(V, phi0, probes, GammaConeOut(a, b, sign), sign, s_list, x_stride, power_iterations,
                 seed, thresholds, fit_window, "GammaConeOut")


def cone_domination(curve_b: DiagnosticSeries, curve_2b: DiagnosticSeries, b: float,
                    tol: float = 0.3) -> tuple[bool, list[tuple[float, float, float]]]:
    """Check value(s; 2b) <= value(s - b; b) * (1 + tol) wherever s - b is a sampled time.

    Returns the verdict and the compared triples (s, value(s; 2b), value(s - b; b)).
    """
    lookup = {round(t, 9): v for t, v in zip(curve_b.times, curve_b.values)}
    rows = []
    for s, v2 in zip(curve_2b.times, curve_2b.values):
        key = round(s - b, 9)
        if key in lookup:
            rows.append((s, v2, lookup[key]))
    ok = bool(rows) and all(v2 <= v1 * (1 + tol) for _, v2, v1 in rows)
    return ok, rows


@dataclass
class EnvelopeReport:
    times: list[float]
    constants: list[float]
    ratio: float
    bounded: bool


def kuroda_envelope_check(
    f: Field,
    K_lo: float,
    K_hi: float,
    margin: float,
    l: int,
    t_list,
    max_ratio: float = 3.0,
    leak_tol: float = 1e-8,
) -> EnvelopeReport:
    """Empirical constant C(t) = sup_{x/t outside K'} |e^{-itH0} f(x)| <x>^l / ||f||_Sigma(l).

    K is the annulus K_lo <= |xi| <= K_hi and K' its open fattening by ``margin``.
    """
    leak = band_leakage(f, K_lo - 1e-12, K_hi + 1e-12)
    if not (0 < K_lo < K_hi) or leak > leak_tol:
        raise BadSpectralSupport(f"spectral mass outside [{K_lo}, {K_hi}]: {leak:.3g}")
    g = f.grid
    r = g.radius()
    weight = (1 + r**2) ** (l / 2)
    scale = sigma_norm(f, l)
    consts = []
    for t in t_list:
        t = float(t)
        if t == 0:
            raise ValueError("the envelope estimate excludes t = 0")
        u = np.abs(free_propagate(f, t).values)
        speed = r / abs(t)
        outside = (speed <= K_lo - margin) | (speed >= K_hi + margin)
        consts.append(float(np.max((u * weight)[outside])) / scale if outside.any() else 0.0)
    pos = [c for c in consts if c > 0]
    ratio = max(pos) / min(pos) if pos else 1.0
    return EnvelopeReport([float(t) for t in t_list], consts, ratio, ratio <= max_ratio)
