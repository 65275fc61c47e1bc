"""Phase-space regions, indicator masks and the sheared wave packet transform.

A region is evaluated pointwise on the (x, xi) product grid of a
PhaseSpaceField. All inequalities are closed, matching the set definitions;
a relative slack of 1e-12 absorbs round-off on nodes that sit exactly on a
boundary.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.fft as sfft

from .errors import DimMismatch, GridMismatch, ShearOutOfDomain
from .grid import Field, GridSpec
from .wavepacket import PhaseSpaceField, Window, wpt_array

_EPS = 1e-12


def _le(u, c):
    return u <= c + _EPS * max(1.0, abs(c))


def _ge(u, c):
    return u >= c - _EPS * max(1.0, abs(c))


@dataclass(frozen=True)
class GammaAR:
    """|xi| <= a or |x| >= R."""

    a: float
    R: float
    sheared = True

    def indicator(self, X, XI, dot=None):
        return _le(_norm(XI), self.a) | _ge(_norm(X), self.R)


@dataclass(frozen=True)
class GammaConeOut:
    """|xi| >= a, |x| >= b and sign * x.xi >= 0."""

    a: float
    b: float
    sign: int = 1
    sheared = True

    def indicator(self, X, XI, dot=None):
        d = _dot(X, XI)
        return _ge(_norm(XI), self.a) & _ge(_norm(X), self.b) & (self.sign * d >= 0)


@dataclass(frozen=True)
class KaN:
    """|xi| <= a or |x| <= N (evaluated on the unsheared transform)."""

    a: float
    N: float
    sheared = False

    def indicator(self, X, XI, dot=None):
        return _le(_norm(XI), self.a) | _le(_norm(X), self.N)


@dataclass(frozen=True)
class TildeGamma:
    """|xi| <= a or -sign * cos(theta(x, xi)) >= sigma; needs dim >= 2.

    Where x = 0 or xi = 0 the angle is undefined and membership falls back to
    the |xi| <= a clause alone.
    """

    a: float
    sigma: float
    sign: int = 1
    sheared = True
    min_dim = 2

    def indicator(self, X, XI, dot=None):
        nx, nxi = _norm(X), _norm(XI)
        d = _dot(X, XI)
        with np.errstate(invalid="ignore", divide="ignore"):
            cos = np.where((nx > 0) & (nxi > 0), d / (nx * nxi), np.nan)
        cone = np.nan_to_num(-self.sign * cos, nan=-np.inf)
        return _le(nxi, self.a) | _ge(cone, self.sigma)


@dataclass(frozen=True)
class XiD:
    """|xi| <= d."""

    d: float
    sheared = False

    def indicator(self, X, XI, dot=None):
        return _le(_norm(XI), self.d) & np.ones_like(_norm(X), dtype=bool)


@dataclass(frozen=True)
class XiDR:
    """|xi| > d and |x| <= r."""

    d: float
    r: float
    sheared = False

    def indicator(self, X, XI, dot=None):
        return ~_le(_norm(XI), self.d) & _le(_norm(X), self.r)


@dataclass(frozen=True)
class Complement:
    region: object

    @property
    def sheared(self):
        return self.region.sheared

    def indicator(self, X, XI, dot=None):
        return ~self.region.indicator(X, XI)


REGIONS = {c.__name__: c for c in (GammaAR, GammaConeOut, KaN, TildeGamma, XiD, XiDR)}


def make_region(variant: str, **params):
    try:
        cls = REGIONS[variant]
    except KeyError:
        raise ValueError(f"unknown region variant {variant!r}") from None
    return cls(**params)


def _norm(V):
    return np.sqrt(sum(v**2 for v in V))


def _dot(X, XI):
    return sum(x * xi for x, xi in zip(X, XI))


def phase_coords(grid: GridSpec, x_stride: int):
    """Sparse broadcastable x and xi coordinate tuples on the phase grid."""
    d = grid.dim
    xs = grid.x[::x_stride]
    X, XI = [], []
    for i in range(d):
        shape = [1] * (2 * d)
        shape[i] = xs.size
        X.append(xs.reshape(shape))
        shape = [1] * (2 * d)
        shape[d + i] = grid.points
        XI.append(grid.xi.reshape(shape))
    return tuple(X), tuple(XI)


@dataclass
class Mask:
    region: object
    indicator: np.ndarray
    grid: GridSpec
    x_stride: int

    def complement(self) -> "Mask":
        return Mask(Complement(self.region), ~self.indicator, self.grid, self.x_stride)


def build_mask(region, grid: GridSpec, x_stride: int = 1) -> Mask:
    if grid.dim < getattr(region, "min_dim", 1) or (
        isinstance(region, Complement) and grid.dim < getattr(region.region, "min_dim", 1)
    ):
        raise DimMismatch(f"{type(region).__name__} needs dim >= 2")
    X, XI = phase_coords(grid, x_stride)
    nx = grid.points // x_stride
    ind = np.broadcast_to(region.indicator(X, XI), (nx,) * grid.dim + grid.shape)
    return Mask(region, np.ascontiguousarray(ind), grid, x_stride)


def masked_norm(F: PhaseSpaceField, m: Mask) -> float:
    if F.grid != m.grid or F.x_stride != m.x_stride:
        raise GridMismatch("mask and phase field live on different grids")
    return float(np.sqrt(np.sum(np.abs(F.values[m.indicator]) ** 2) * F.cell))


def shear_array(values: np.ndarray, grid: GridSpec, x_stride: int, shear: float) -> np.ndarray:
    """G(x, xi) = F(x + shear*xi, xi) by band-limited periodic interpolation along x."""
    if shear == 0:
        return values.copy()
    d = grid.dim
    nx = grid.points // x_stride
    kappa = 2 * np.pi * sfft.fftfreq(nx, d=x_stride * grid.spacing)
    axes = tuple(range(d))
    out = sfft.fftn(values, axes=axes)
    for i in range(d):
        shape_k = [1] * (2 * d)
        shape_k[i] = nx
        shape_xi = [1] * (2 * d)
        shape_xi[d + i] = grid.points
        out *= np.exp(1j * shear * kappa.reshape(shape_k) * grid.xi.reshape(shape_xi))
    return sfft.ifftn(out, axes=axes)


def check_shear(values: np.ndarray, grid: GridSpec, shear: float, rel_tol: float = 1e-10,
                max_displacement: float | None = None) -> None:
    """Raise ShearOutOfDomain if a xi row carrying mass is displaced by a full period or more."""
    if shear == 0:
        return
    d = grid.dim
    limit = 2 * grid.half_width if max_displacement is None else max_displacement
    energy = np.sum(np.abs(values) ** 2, axis=tuple(range(d)))
    total = energy.sum()
    if total == 0:
        return
    XI = np.meshgrid(*([grid.xi] * d), indexing="ij")
    disp = abs(shear) * np.max(np.abs(np.stack(XI)), axis=0)
    bad = (energy > rel_tol * total) & (disp >= limit)
    if np.any(bad):
        raise ShearOutOfDomain(
            f"shear {shear} displaces rows carrying mass by up to {disp[bad].max():.3g} "
            f">= periodic cell {limit:.3g}"
        )


def sheared_wpt(window: Window, f: Field, shear: float, x_stride: int = 1,
                check: bool = True) -> PhaseSpaceField:
    """W_window f evaluated at (x + shear*xi, xi)."""
    if window.grid != f.grid:
        raise GridMismatch("window and field live on different grids")
    W = wpt_array(window.field.values, f.values, f.grid, x_stride)
    if check:
        check_shear(W, f.grid, shear)
    return PhaseSpaceField(f.grid, x_stride, shear_array(W, f.grid, x_stride, shear))
