"""Wave packet transform W_phi f(x, xi) = int conj(phi(y - x)) f(y) exp(-i y.xi) dy.

Phase-space samples live on a product grid: x nodes are the spatial nodes taken
with stride ``x_stride`` and xi nodes are the full centered frequency grid.
Values are stored with the x axes first, shape (Nx,)*dim + (N,)*dim.

With this Fourier convention the phase-space pairing picks up a (2 pi)^dim:

    (W_phi f, W_psi g) = (2 pi)^dim (psi, phi) (f, g)

and the inverse carries the matching 1 / ((2 pi)^dim ||phi||^2).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
import scipy.fft as sfft

from .dynamics import free_propagate
from .errors import BadBand, GridMismatch, UnsupportedOrder, ZeroWindow
from .grid import Field, GridSpec, forward_array, fourier_forward, inverse_array, l2_norm

_CHUNK = 1 << 22  # complex entries per batch of phase-space rows


@dataclass
class Window:
    field: Field
    normalized: bool = False
    nonzero_mean: bool = False
    band: tuple[float, float] | None = None

    def __post_init__(self):
        if self.normalized and abs(self.field.norm() - 1) > 1e-10:
            raise ValueError("window flagged normalized but ||phi|| != 1")
        if self.nonzero_mean and abs(_mean(self.field)) <= 1e-6:
            raise ValueError("window flagged nonzero_mean but phi_hat(0) vanishes")
        if self.band is not None and band_leakage(self.field, *self.band) > 1e-8:
            raise ValueError("window Fourier mass leaks outside its declared band")

    @property
    def grid(self) -> GridSpec:
        return self.field.grid


def _mean(f: Field) -> complex:
    return complex(np.sum(f.values) * f.grid.cell)


def band_leakage(f: Field, lo: float, hi: float) -> float:
    """Fraction of Fourier mass outside the open annulus lo < |xi| < hi."""
    fh = np.abs(fourier_forward(f).values) ** 2
    rho = np.sqrt(sum(c**2 for c in f.grid.freq_coords())) * np.ones(f.grid.shape)
    outside = (rho <= lo) | (rho >= hi)
    total = fh.sum()
    return float(fh[outside].sum() / total) if total > 0 else 0.0


@dataclass
class PhaseSpaceField:
    grid: GridSpec
    x_stride: int
    values: np.ndarray

    def __post_init__(self):
        want = (self.grid.points // self.x_stride,) * self.grid.dim + self.grid.shape
        if self.values.shape != want:
            raise GridMismatch(f"phase values shape {self.values.shape}, expected {want}")

    @property
    def x(self) -> np.ndarray:
        return self.grid.x[:: self.x_stride]

    @property
    def xi(self) -> np.ndarray:
        return self.grid.xi

    @property
    def cell(self) -> float:
        return (self.x_stride * self.grid.spacing * self.grid.freq_step) ** self.grid.dim

    def norm(self) -> float:
        return phase_norm(self)

    def __sub__(self, other):
        _compatible(self, other)
        return PhaseSpaceField(self.grid, self.x_stride, self.values - other.values)

    def __add__(self, other):
        _compatible(self, other)
        return PhaseSpaceField(self.grid, self.x_stride, self.values + other.values)

    def __mul__(self, c):
        return PhaseSpaceField(self.grid, self.x_stride, self.values * c)

    __rmul__ = __mul__


def _compatible(F: PhaseSpaceField, G: PhaseSpaceField) -> None:
    if F.grid != G.grid or F.x_stride != G.x_stride:
        raise GridMismatch("phase-space fields live on different grids")


def phase_inner(F: PhaseSpaceField, G: PhaseSpaceField) -> complex:
    _compatible(F, G)
    return complex(np.vdot(G.values, F.values) * F.cell)


def phase_norm(F: PhaseSpaceField) -> float:
    return float(np.sqrt(np.sum(np.abs(F.values) ** 2) * F.cell))


def _check_stride(grid: GridSpec, x_stride: int) -> int:
    s = int(x_stride)
    if s < 1 or grid.points % s:
        raise ValueError(f"x_stride must be a positive divisor of {grid.points}")
    return s


def _shifted_windows(phi: np.ndarray, grid: GridSpec, rows) -> np.ndarray:
    """phi(y - x_m) on the y grid for every retained node index m (a tuple per row)."""
    N = grid.points
    if grid.dim == 1:
        m = np.array([r[0] for r in rows])
        k = np.arange(N)
        return phi[(k[None, :] - m[:, None] + N // 2) % N]
    return np.stack([np.roll(phi, (m1 - N // 2, m2 - N // 2), axis=(0, 1)) for m1, m2 in rows])


def _all_rows(grid: GridSpec, s: int) -> list[tuple[int, ...]]:
    nodes = range(0, grid.points, s)
    return list(itertools.product(nodes, repeat=grid.dim))


def _batches(grid: GridSpec, rows):
    per = max(1, _CHUNK // grid.size)
    for i in range(0, len(rows), per):
        yield i, rows[i : i + per]


def wpt_rows(phi: np.ndarray, f: np.ndarray, grid: GridSpec, rows) -> np.ndarray:
    """W_phi f at the spatial nodes listed in ``rows`` (index tuples), all xi; shape (len(rows),) + grid.shape."""
    out = np.empty((len(rows),) + grid.shape, dtype=complex)
    cphi = np.conj(phi)
    for i, chunk in _batches(grid, rows):
        out[i : i + len(chunk)] = forward_array(_shifted_windows(cphi, grid, chunk) * f, grid)
    return out


def wpt_rows_adjoint(phi: np.ndarray, F: np.ndarray, grid: GridSpec, rows, x_weight: float) -> np.ndarray:
    """Adjoint of ``wpt_rows``; ``x_weight`` is the spatial quadrature weight of one row."""
    out = np.zeros(grid.shape, dtype=complex)
    for i, chunk in _batches(grid, rows):
        g = inverse_array(F[i : i + len(chunk)], grid)
        out += np.sum(_shifted_windows(phi, grid, chunk) * g, axis=0)
    return out * x_weight * (2 * np.pi) ** grid.dim


def wpt_array(phi: np.ndarray, f: np.ndarray, grid: GridSpec, x_stride: int = 1) -> np.ndarray:
    s = _check_stride(grid, x_stride)
    nx = grid.points // s
    return wpt_rows(phi, f, grid, _all_rows(grid, s)).reshape((nx,) * grid.dim + grid.shape)


def wpt_forward(window: Window, f: Field, x_stride: int = 1) -> PhaseSpaceField:
    if window.grid != f.grid:
        raise GridMismatch("window and field live on different grids")
    return PhaseSpaceField(f.grid, x_stride, wpt_array(window.field.values, f.values, f.grid, x_stride))


def wpt_adjoint_array(phi: np.ndarray, F: np.ndarray, grid: GridSpec, x_stride: int) -> np.ndarray:
    """Exact adjoint of ``wpt_array`` for the phase and spatial quadrature pairings."""
    s = _check_stride(grid, x_stride)
    Fr = F.reshape((-1,) + grid.shape)
    return wpt_rows_adjoint(phi, Fr, grid, _all_rows(grid, s), (s * grid.spacing) ** grid.dim)


def wpt_inverse(window: Window, F: PhaseSpaceField) -> Field:
    if window.grid != F.grid:
        raise GridMismatch("window and phase field live on different grids")
    nrm2 = l2_norm(window.field) ** 2
    if nrm2 == 0:
        raise ZeroWindow("window vanishes identically")
    adj = wpt_adjoint_array(window.field.values, F.values, F.grid, F.x_stride)
    return Field(F.grid, adj / ((2 * np.pi) ** F.grid.dim * nrm2))


def evolve_window(window: Window, t: float) -> Window:
    w = Window(free_propagate(window.field, t), band=None)
    # flags carry over: free evolution is unitary and leaves |phi_hat| untouched
    w.normalized, w.nonzero_mean, w.band = window.normalized, window.nonzero_mean, window.band
    return w


def gaussian_packet(grid: GridSpec, width: float = 1.0, center=0.0, momentum=0.0) -> Field:
    """Normalized exp(-|x-c|^2/(2 width^2) + i p.x)."""
    c = np.broadcast_to(np.asarray(center, dtype=float), (grid.dim,))
    p = np.broadcast_to(np.asarray(momentum, dtype=float), (grid.dim,))
    X = grid.coords()
    arg = sum((Xi - ci) ** 2 for Xi, ci in zip(X, c)) / (2 * width**2)
    vals = np.exp(-arg + 1j * sum(Xi * pi for Xi, pi in zip(X, p))) * np.ones(grid.shape)
    f = Field(grid, vals)
    return f * (1 / f.norm())


def gaussian_window(grid: GridSpec, width: float = 1.0, center=0.0, momentum=0.0) -> Window:
    f = gaussian_packet(grid, width, center, momentum)
    return Window(f, normalized=True, nonzero_mean=abs(_mean(f)) > 1e-6)


def smooth_bump(u: np.ndarray, sharpness: float = 1.0) -> np.ndarray:
    """exp(k (1 - 1/(1-u^2))) on |u| < 1, zero elsewhere (C-infinity), k = sharpness.

    Larger k concentrates the bump near u = 0 and trades a wider spatial core
    for faster decay of the spatial tail.
    """
    out = np.zeros_like(u, dtype=float)
    inside = np.abs(u) < 1
    out[inside] = np.exp(sharpness * (1 - 1 / (1 - u[inside] ** 2)))
    return out


def annulus_window(grid: GridSpec, low: float, high: float, sharpness: float = 1.0) -> Window:
    """Window whose Fourier transform is a smooth bump supported in low < |xi| < high."""
    if not 0 < low < high:
        raise BadBand(f"need 0 < low < high, got ({low}, {high})")
    if high >= np.pi / grid.spacing:
        raise BadBand("annulus exceeds the grid Nyquist frequency")
    if not sharpness > 0:
        raise BadBand("sharpness must be positive")
    rho = np.sqrt(sum(c**2 for c in grid.freq_coords())) * np.ones(grid.shape)
    u = (2 * rho - (low + high)) / (high - low)
    f = Field(grid, inverse_array(smooth_bump(u, sharpness).astype(complex), grid))
    f = f * (1 / f.norm())
    return Window(f, normalized=True, nonzero_mean=False, band=(low, high))


def make_window(kind: str, grid: GridSpec, **params) -> Window:
    if kind == "gaussian_scat":
        return gaussian_window(grid, **params)
    if kind == "fourier_annulus":
        return annulus_window(grid, **params)
    raise ValueError(f"unknown window kind {kind!r}")


def _multi_indices(dim: int, order: int):
    for combo in itertools.product(range(order + 1), repeat=2 * dim):
        if sum(combo) == order:
            yield combo[:dim], combo[dim:]


def sigma_norm(f: Field, l: int) -> float:
    """sum over |alpha + beta| = l of ||x^beta d^alpha f||, derivatives taken spectrally."""
    if l not in (0, 1, 2, 3):
        raise UnsupportedOrder(f"order must be in 0..3, got {l}")
    g = f.grid
    k = np.meshgrid(*([g.k_fft] * g.dim), indexing="ij", sparse=True)
    X = g.coords()
    fh = sfft.fftn(f.values)
    total = 0.0
    for alpha, beta in _multi_indices(g.dim, l):
        mult = np.ones(g.shape, dtype=complex)
        for ki, a in zip(k, alpha):
            mult = mult * (1j * ki) ** a
        d = sfft.ifftn(mult * fh)
        for Xi, b in zip(X, beta):
            d = d * Xi**b
        total += l2_norm(Field(g, d))
    return total
