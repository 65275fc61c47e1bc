import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from wpscat import (Field, PotentialSpec, PropagatorConfig, evolve_full, free_propagate, gaussian_packet,
                    make_grid, poschl_teller)
from wpscat.dynamics import (apply_hamiltonian, group_law_defect, potential_eval, propagate_series,
                             verify_short_range)
from wpscat.errors import StepUnderflow


@pytest.fixture(scope="module")
def grid():
    return make_grid(1, 64.0, 512)


def test_free_gaussian_spreading(grid):
    # |u(t,x)|^2 for a unit Gaussian has variance (1 + t^2)/2
    f = gaussian_packet(grid, 1.0)
    for t in (0.5, 2.0, 5.0):
        u = free_propagate(f, t)
        var = np.sum(grid.x**2 * np.abs(u.values) ** 2) * grid.spacing
        assert np.isclose(var, (1 + t**2) / 2, rtol=1e-10)


def test_free_group_law(grid):
    f = gaussian_packet(grid, 1.0, 0, 1.0)
    a = free_propagate(free_propagate(f, 1.3), 2.1)
    assert (a - free_propagate(f, 3.4)).norm() < 1e-12


def test_zero_potential_matches_free(grid):
    f = gaussian_packet(grid, 1.0, 0, 1.0)
    u = evolve_full(f, 0.0, 3.0, PotentialSpec("zero"), PropagatorConfig(0.1))
    assert (u - free_propagate(f, 3.0)).norm() < 1e-13


@given(seed=st.integers(0, 1000), t=st.floats(0.1, 5.0))
@settings(max_examples=10)
def test_unitarity(seed, t):
    g = make_grid(1, 32.0, 256)
    rng = np.random.default_rng(seed)
    f = gaussian_packet(g, rng.uniform(0.5, 2.0), rng.uniform(-3, 3), rng.uniform(-2, 2))
    u = evolve_full(f, 0.0, t, poschl_teller(), PropagatorConfig(0.05))
    assert abs(u.norm() - 1.0) < 1e-12


def test_backward_run_inverts(grid):
    f = gaussian_packet(grid, 1.0, 0, 1.0)
    V = PotentialSpec("modulated_inverse_poly", C=1.0, delta=2.0, core=1.0)
    cfg = PropagatorConfig(0.02)
    u = evolve_full(evolve_full(f, 0.0, 2.0, V, cfg), 2.0, 0.0, V, cfg)
    assert (u - f).norm() < 1e-10


def test_strang_second_order(grid):
    f = gaussian_packet(grid, 1.0, 0, 1.0)
    V = PotentialSpec("inverse_poly", C=1.0, delta=2.0, core=1.0)
    ref = evolve_full(f, 0.0, 2.0, V, PropagatorConfig(0.0025))
    errs = [(evolve_full(f, 0.0, 2.0, V, PropagatorConfig(dt)) - ref).norm() for dt in (0.04, 0.02, 0.01)]
    rates = np.log2(np.array(errs[:-1]) / errs[1:])
    assert np.all(np.abs(rates - 2) < 0.2)


def test_group_law_aligned_is_exact(grid):
    f = gaussian_packet(grid, 1.0, 0, 1.0)
    V = PotentialSpec("inverse_poly", C=1.0, delta=2.0)
    assert group_law_defect(V, PropagatorConfig(0.01), f, 0.0, 1.0, 2.0) < 1e-12


def test_series_matches_direct(grid):
    f = gaussian_packet(grid, 1.0, 0, 1.0)
    V = poschl_teller()
    cfg = PropagatorConfig(0.05)
    series = propagate_series(f, 0.0, [1.0, 2.0], V, cfg)
    assert (series[1] - evolve_full(f, 0.0, 2.0, V, cfg)).norm() < 1e-12


def test_step_policy():
    cfg = PropagatorConfig(0.1)
    assert cfg.steps(1.0) == 10
    assert cfg.steps(1.05) == 11
    with pytest.raises(StepUnderflow):
        PropagatorConfig(0.1, t_tolerance=0.0).steps(0.0)


def test_potential_envelope(grid):
    V = PotentialSpec("inverse_poly", C=2.0, delta=1.5)
    assert np.isclose(potential_eval(V, 0.0, 3.0), 2.0 * 4**-1.5)
    assert verify_short_range(V, grid, [0.0]) >= 0
    pt = poschl_teller(1.0, 2.0)
    assert verify_short_range(pt, grid, [0.0]) >= 0
    mod = PotentialSpec("modulated_inverse_poly", C=1.0, delta=2.0, core=1.0)
    assert verify_short_range(mod, grid, np.linspace(0, 20, 11)) >= 0


@pytest.mark.parametrize("kw", [dict(family="nope"), dict(delta=1.0), dict(C=-1.0),
                                dict(family="inverse_poly", C=1.0, strength=2.0)])
def test_potential_validation(kw):
    with pytest.raises(ValueError):
        PotentialSpec(**kw)


def test_pt_ground_state_is_eigenvector():
    g = make_grid(1, 30.0, 512)
    w = Field(g, 1 / np.cosh(g.x) / np.sqrt(2))
    Hw = apply_hamiltonian(w, poschl_teller())
    assert (Hw - (-0.5) * w).norm() < 1e-8
