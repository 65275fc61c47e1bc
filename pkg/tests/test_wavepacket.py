import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from wpscat import Field, annulus_window, gaussian_packet, gaussian_window, make_grid, wpt_forward, wpt_inverse
from wpscat.errors import BadBand, GridMismatch, UnsupportedOrder, ZeroWindow
from wpscat.wavepacket import (Window, band_leakage, phase_inner, phase_norm, sigma_norm, smooth_bump,
                               wpt_adjoint_array, wpt_array)


@pytest.fixture(scope="module")
def grid():
    return make_grid(1, 20.0, 128)


def test_transform_of_gaussian_closed_form(grid):
    # window and state are unit-width Gaussians at the origin:
    # W(x, xi) = sqrt(pi) exp(-x^2/4 - xi^2/4 - i x xi/2) / sqrt(pi)
    phi = Field(grid, np.exp(-grid.x**2 / 2))
    W = wpt_array(phi.values, phi.values, grid)
    X, XI = grid.x[:, None], grid.xi[None, :]
    want = np.sqrt(np.pi) * np.exp(-X**2 / 4 - XI**2 / 4 - 0.5j * X * XI)
    assert np.allclose(W, want, atol=1e-10)


@given(seed=st.integers(0, 2**31 - 1), stride=st.sampled_from([1, 2, 4]))
@settings(max_examples=10)
def test_adjoint_pairing(seed, stride):
    grid = make_grid(1, 10.0, 64)
    rng = np.random.default_rng(seed)
    phi = gaussian_packet(grid, 1.5, 0.3, 0.5).values
    f = rng.normal(size=64) + 1j * rng.normal(size=64)
    F = rng.normal(size=(64 // stride, 64)) + 1j * rng.normal(size=(64 // stride, 64))
    cell_phase = (stride * grid.spacing * grid.freq_step)
    lhs = np.vdot(F, wpt_array(phi, f, grid, stride)) * cell_phase
    rhs = np.vdot(wpt_adjoint_array(phi, F, grid, stride), f) * grid.spacing
    assert np.isclose(lhs, rhs, rtol=1e-10)


def test_inverse_recovers_state(grid):
    f = gaussian_packet(grid, 1.0, -2.0, 1.0) + 0.5 * gaussian_packet(grid, 2.0, 3.0)
    for w in (gaussian_window(grid, 1.0), gaussian_window(grid, 2.0, momentum=1.0)):
        back = wpt_inverse(w, wpt_forward(w, f))
        assert (back - f).norm() < 1e-10


def test_phase_norm_isometry(grid):
    f = gaussian_packet(grid, 1.3, 1.0, -0.5)
    w = gaussian_window(grid, 1.0)
    F = wpt_forward(w, f)
    assert np.isclose(phase_norm(F) ** 2, 2 * np.pi, rtol=1e-10)
    assert np.isclose(phase_inner(F, F), 2 * np.pi, rtol=1e-10)


def test_zero_window_rejected(grid):
    w = Window(Field(grid, np.zeros(grid.shape)))
    F = wpt_forward(gaussian_window(grid), gaussian_packet(grid))
    with pytest.raises(ZeroWindow):
        wpt_inverse(w, F)


def test_grid_mismatch(grid):
    other = make_grid(1, 10.0, 128)
    with pytest.raises(GridMismatch):
        wpt_forward(gaussian_window(other), gaussian_packet(grid))


def test_window_flags_are_validated(grid):
    f = gaussian_packet(grid)
    with pytest.raises(ValueError):
        Window(f * 2, normalized=True)
    with pytest.raises(ValueError):
        Window(annulus_window(grid, 1.0, 2.0).field, nonzero_mean=True)


def test_annulus_window_band(grid):
    w = annulus_window(grid, 1.0, 2.0, sharpness=4.0)
    assert w.band == (1.0, 2.0)
    assert band_leakage(w.field, 1.0, 2.0) < 1e-12
    assert np.isclose(w.field.norm(), 1.0)


@pytest.mark.parametrize("lo, hi, k", [(2.0, 1.0, 1.0), (0.0, 1.0, 1.0), (1.0, 50.0, 1.0), (1.0, 2.0, 0.0)])
def test_annulus_rejects_bad_band(grid, lo, hi, k):
    with pytest.raises(BadBand):
        annulus_window(grid, lo, hi, k)


@given(u=st.floats(-2, 2))
def test_smooth_bump_bounds(u):
    v = smooth_bump(np.array([u]), 3.0)[0]
    assert 0.0 <= v <= 1.0
    if abs(u) >= 1:
        assert v == 0.0


def test_sigma_norm_order_zero_and_one(grid):
    f = Field(grid, np.exp(-grid.x**2 / 2) / np.pi**0.25)
    assert np.isclose(sigma_norm(f, 0), 1.0)
    # ||f'|| = ||x f|| = 1/sqrt(2) for the normalized unit Gaussian
    assert np.isclose(sigma_norm(f, 1), np.sqrt(2), rtol=1e-8)
    with pytest.raises(UnsupportedOrder):
        sigma_norm(f, 4)


def test_2d_transform_inverse():
    g = make_grid(2, 8.0, 32)
    f = gaussian_packet(g, 1.0, (1.0, 0.0), (0.0, 1.0))
    w = gaussian_window(g, 1.2)
    back = wpt_inverse(w, wpt_forward(w, f))
    assert (back - f).norm() < 1e-9
