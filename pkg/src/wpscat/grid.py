"""Uniform periodic grids, continuum-normalized Fourier transforms and L2 pairings.

Conventions:

    F f(xi)    = int exp(-i x.xi) f(x) dx
    F^-1 g(x)  = (2 pi)^-n int exp(i x.xi) g(xi) dxi

Spatial nodes are x_k = -L + k h (k = 0..N-1, h = 2L/N); frequency nodes are
xi_j = (pi/L) j for j = -N/2..N/2-1, stored in ascending (centered) order.
Arrays in 2D use ``indexing="ij"`` so axis 0 is x_1 and axis 1 is x_2.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.fft as sfft

from .errors import GridMismatch, NonPositiveExtent, NonPowerOfTwo, UnsupportedDim


@dataclass(frozen=True)
class GridSpec:
    dim: int
    half_width: float
    points: int

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise UnsupportedDim(f"dim must be 1 or 2, got {self.dim}")
        if not self.half_width > 0:
            raise NonPositiveExtent(f"half_width must be positive, got {self.half_width}")
        n = int(self.points)
        if n != self.points or n < 16 or n & (n - 1):
            raise NonPowerOfTwo(f"points must be a power of two >= 16, got {self.points}")

    @property
    def spacing(self) -> float:
        return 2.0 * self.half_width / self.points

    @property
    def freq_step(self) -> float:
        return np.pi / self.half_width

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.points,) * self.dim

    @property
    def size(self) -> int:
        return self.points**self.dim

    @property
    def cell(self) -> float:
        """Quadrature weight h^dim."""
        return self.spacing**self.dim

    @property
    def x(self) -> np.ndarray:
        return -self.half_width + self.spacing * np.arange(self.points)

    @property
    def xi(self) -> np.ndarray:
        return self.freq_step * np.arange(-self.points // 2, self.points // 2)

    @property
    def k_fft(self) -> np.ndarray:
        """Angular frequencies in FFT storage order."""
        return 2 * np.pi * sfft.fftfreq(self.points, d=self.spacing)

    def coords(self) -> tuple[np.ndarray, ...]:
        return np.meshgrid(*([self.x] * self.dim), indexing="ij", sparse=True)

    def radius(self) -> np.ndarray:
        """|x| on the full grid."""
        c = self.coords()
        return np.sqrt(sum(ci**2 for ci in c)) * np.ones(self.shape)

    def freq_coords(self) -> tuple[np.ndarray, ...]:
        return np.meshgrid(*([self.xi] * self.dim), indexing="ij", sparse=True)

    def k2_fft(self) -> np.ndarray:
        """|k|^2 in FFT storage order, broadcast to the full grid shape."""
        k = np.meshgrid(*([self.k_fft] * self.dim), indexing="ij", sparse=True)
        return sum(ki**2 for ki in k) * np.ones(self.shape)

    @cached_property
    def _centering_phase(self) -> np.ndarray:
        # exp(i L xi_j) = (-1)^j, one factor per axis
        j = np.arange(-self.points // 2, self.points // 2)
        s = np.where(j % 2 == 0, 1.0, -1.0)
        out = s
        for _ in range(self.dim - 1):
            out = np.multiply.outer(out, s)
        return out


def make_grid(dim: int, half_width: float, points: int) -> GridSpec:
    return GridSpec(int(dim), float(half_width), points)


@dataclass
class Field:
    """Samples of a function on a grid (or on its frequency grid, see fourier_forward)."""

    grid: GridSpec
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != self.grid.shape:
            raise GridMismatch(
                f"values shape {self.values.shape} does not match grid shape {self.grid.shape}"
            )

    def norm(self) -> float:
        return l2_norm(self)

    def copy(self) -> "Field":
        return Field(self.grid, self.values.copy())

    def __add__(self, other: "Field") -> "Field":
        _same_grid(self.grid, other.grid)
        return Field(self.grid, self.values + other.values)

    def __sub__(self, other: "Field") -> "Field":
        _same_grid(self.grid, other.grid)
        return Field(self.grid, self.values - other.values)

    def __mul__(self, c) -> "Field":
        return Field(self.grid, self.values * c)

    __rmul__ = __mul__


def _same_grid(a: GridSpec, b: GridSpec) -> None:
    if a != b:
        raise GridMismatch(f"grid mismatch: {a} vs {b}")


def forward_array(values: np.ndarray, grid: GridSpec, axes=None) -> np.ndarray:
    """Continuum-normalized forward transform along the trailing ``grid.dim`` axes."""
    if axes is None:
        axes = tuple(range(-grid.dim, 0))
    out = sfft.fftshift(sfft.fftn(values, axes=axes), axes=axes)
    out *= grid.cell * grid._centering_phase
    return out


def inverse_array(values: np.ndarray, grid: GridSpec, axes=None) -> np.ndarray:
    if axes is None:
        axes = tuple(range(-grid.dim, 0))
    tmp = values * grid._centering_phase
    return sfft.ifftn(sfft.ifftshift(tmp, axes=axes), axes=axes) / grid.cell


def fourier_forward(f: Field) -> Field:
    """Approximate f_hat on the frequency grid; values indexed like ``grid.xi``."""
    return Field(f.grid, forward_array(f.values, f.grid))


def fourier_inverse(F: Field) -> Field:
    return Field(F.grid, inverse_array(F.values, F.grid))


def inner_product(f: Field, g: Field) -> complex:
    _same_grid(f.grid, g.grid)
    return complex(np.vdot(g.values, f.values) * f.grid.cell)


def l2_norm(f: Field) -> float:
    return float(np.sqrt(np.sum(np.abs(f.values) ** 2) * f.grid.cell))


def boundary_mass(f: Field, guard: float = 4.0) -> float:
    """Squared norm carried by nodes within ``guard`` of the box edge (any axis)."""
    g = f.grid
    edge = np.abs(g.x) >= g.half_width - guard
    if g.dim == 1:
        sel = edge
    else:
        sel = edge[:, None] | edge[None, :]
    return float(np.sum(np.abs(f.values[sel]) ** 2) * g.cell)
