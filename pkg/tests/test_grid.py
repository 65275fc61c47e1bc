import numpy as np
import pytest
from hypothesis import given, strategies as st

from wpscat import Field, fourier_forward, fourier_inverse, gaussian_packet, inner_product, make_grid
from wpscat.errors import GridMismatch, NonPositiveExtent, NonPowerOfTwo, UnsupportedDim
from wpscat.grid import boundary_mass

powers = st.sampled_from([16, 32, 64, 128, 256])


def test_grid_nodes():
    g = make_grid(1, 10.0, 64)
    assert g.x[0] == -10.0 and np.isclose(g.x[-1], 10.0 - g.spacing)
    assert np.isclose(g.xi[1] - g.xi[0], np.pi / 10.0)
    assert g.xi[32] == 0.0


@pytest.mark.parametrize("args, err", [
    ((1, 10.0, 100), NonPowerOfTwo),
    ((3, 10.0, 64), UnsupportedDim),
    ((1, 0.0, 64), NonPositiveExtent),
    ((1, -2.0, 64), NonPositiveExtent),
])
def test_grid_rejects_bad_params(args, err):
    with pytest.raises(err):
        make_grid(*args)


def test_gaussian_transform_matches_closed_form():
    # int exp(-x^2/2) exp(-i x xi) dx = sqrt(2 pi) exp(-xi^2/2)
    g = make_grid(1, 20.0, 256)
    f = Field(g, np.exp(-g.x**2 / 2))
    fh = fourier_forward(f).values
    assert np.allclose(fh, np.sqrt(2 * np.pi) * np.exp(-g.xi**2 / 2), atol=1e-12)


def test_shifted_gaussian_picks_up_phase():
    g = make_grid(1, 20.0, 256)
    c = 1.5
    fh = fourier_forward(Field(g, np.exp(-((g.x - c) ** 2) / 2))).values
    want = np.sqrt(2 * np.pi) * np.exp(-g.xi**2 / 2 - 1j * c * g.xi)
    assert np.allclose(fh, want, atol=1e-12)


@given(n=powers, seed=st.integers(0, 2**31 - 1))
def test_fourier_roundtrip(n, seed):
    g = make_grid(1, 5.0, n)
    rng = np.random.default_rng(seed)
    f = Field(g, rng.normal(size=n) + 1j * rng.normal(size=n))
    back = fourier_inverse(fourier_forward(f))
    assert np.allclose(back.values, f.values, atol=1e-12 * np.abs(f.values).max())


@given(seed=st.integers(0, 2**31 - 1))
def test_plancherel(seed):
    # ||f_hat||^2 dxi = 2 pi ||f||^2 dx
    g = make_grid(1, 8.0, 64)
    rng = np.random.default_rng(seed)
    f = Field(g, rng.normal(size=64) + 1j * rng.normal(size=64))
    fh = fourier_forward(f).values
    lhs = np.sum(np.abs(fh) ** 2) * g.freq_step
    assert np.isclose(lhs, 2 * np.pi * f.norm() ** 2, rtol=1e-12)


def test_2d_roundtrip_and_inner_product():
    g = make_grid(2, 6.0, 32)
    f = gaussian_packet(g, 1.0, (0.5, -0.5), (1.0, 0.0))
    assert np.isclose(f.norm(), 1.0)
    assert np.allclose(fourier_inverse(fourier_forward(f)).values, f.values, atol=1e-12)
    assert np.isclose(inner_product(f, f), 1.0)


def test_field_shape_and_grid_checks():
    g, h = make_grid(1, 5.0, 32), make_grid(1, 6.0, 32)
    with pytest.raises(GridMismatch):
        Field(g, np.zeros(16))
    with pytest.raises(GridMismatch):
        Field(g, np.zeros(32)) + Field(h, np.zeros(32))


def test_boundary_mass_sees_edge_mass():
    g = make_grid(1, 20.0, 256)
    assert boundary_mass(gaussian_packet(g, 1.0)) < 1e-20
    assert boundary_mass(gaussian_packet(g, 1.0, center=19.0)) > 0.1
