import numpy as np
import pytest
from hypothesis import given, strategies as st

from wpscat import gaussian_packet, gaussian_window, make_grid, make_region, wpt_forward
from wpscat.errors import DimMismatch, ShearOutOfDomain
from wpscat.regions import (Complement, GammaAR, GammaConeOut, KaN, TildeGamma, build_mask, check_shear,
                            masked_norm, shear_array, sheared_wpt)
from wpscat.wavepacket import phase_norm

coord = st.floats(-50, 50, allow_nan=False)


@given(x=coord, xi=coord)
def test_gamma_ar_membership(x, xi):
    r = GammaAR(1.0, 5.0)
    inside = bool(r.indicator((np.array(x),), (np.array(xi),)))
    assert inside == (abs(xi) <= 1.0 or abs(x) >= 5.0)
    assert bool(Complement(r).indicator((np.array(x),), (np.array(xi),))) != inside


def test_boundaries_are_closed():
    X, XI = (np.array([5.0, 4.0]),), (np.array([3.0, 1.0]),)
    assert GammaAR(1.0, 5.0).indicator(X, XI).all()
    assert GammaConeOut(3.0, 5.0).indicator((np.array(5.0),), (np.array(3.0),))
    assert KaN(0.5, 10.0).indicator((np.array(10.0),), (np.array(7.0),))


def test_cone_sign():
    X, XI = (np.array([10.0, 10.0]),), (np.array([3.0, -3.0]),)
    assert list(GammaConeOut(2.0, 5.0, 1).indicator(X, XI)) == [True, False]
    assert list(GammaConeOut(2.0, 5.0, -1).indicator(X, XI)) == [False, True]


def test_tilde_gamma_needs_2d():
    with pytest.raises(DimMismatch):
        build_mask(TildeGamma(1.0, 0.5), make_grid(1, 10.0, 32))
    m = build_mask(TildeGamma(1.0, 0.5), make_grid(2, 10.0, 16), 2)
    assert m.indicator.shape == (8, 8, 16, 16)


def test_make_region_unknown():
    with pytest.raises(ValueError):
        make_region("Nowhere", a=1)


def test_mask_split_is_pythagorean():
    g = make_grid(1, 20.0, 128)
    F = wpt_forward(gaussian_window(g), gaussian_packet(g, 1.0, 2.0, 1.0))
    m = build_mask(GammaAR(0.8, 4.0), g)
    total = masked_norm(F, m) ** 2 + masked_norm(F, m.complement()) ** 2
    assert np.isclose(total, phase_norm(F) ** 2)


def test_shear_moves_a_bump():
    g = make_grid(1, 20.0, 128)
    F = wpt_forward(gaussian_window(g), gaussian_packet(g, 1.0, 0.0, 1.0)).values
    G = shear_array(F, g, 1, 2.0)
    j = np.argmin(np.abs(g.xi - 1.0))
    # row xi = 1 is translated by -2: G(x, 1) = F(x + 2, 1)
    assert np.argmax(np.abs(G[:, j])) == np.argmax(np.abs(F[:, j])) - round(2.0 / g.spacing)
    assert np.allclose(shear_array(G, g, 1, -2.0), F, atol=1e-10)


def test_shear_out_of_domain():
    g = make_grid(1, 10.0, 64)
    F = wpt_forward(gaussian_window(g), gaussian_packet(g, 1.0, 0.0, 2.0)).values
    with pytest.raises(ShearOutOfDomain):
        check_shear(F, g, 20.0)
    check_shear(F, g, 1.0)


def test_zero_shear_is_plain_transform():
    g = make_grid(1, 10.0, 64)
    f, w = gaussian_packet(g, 1.0, 1.0, 1.0), gaussian_window(g)
    assert np.array_equal(sheared_wpt(w, f, 0.0).values, wpt_forward(w, f).values)
