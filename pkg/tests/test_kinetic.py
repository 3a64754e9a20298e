import math

import numpy as np
import pytest
from scipy.integrate import cumulative_trapezoid

from twospecies import initial, kinetic
from twospecies.errors import (
    ConfigurationError,
    DegenerateInputError,
    DegenerateKernelError,
    DomainError,
    HorizonError,
)
from twospecies.measures import GridDensity


@pytest.fixture(scope="module")
def uniform_sol():
    f1, f2 = initial.uniform_halves(1e-3)
    return kinetic.solve(f1, f2, t_max=0.75, tol=1e-10)


@pytest.fixture(scope="module")
def tent_sol():
    f1, f2 = initial.tent(1e-3)
    return kinetic.solve(f1, f2, t_max=0.75, tol=1e-10)


def volterra_march(f1, khat, n):
    """Trapezoid time-marching for a = f1 + khat * a; independent of the series."""
    h = f1.step
    fv = np.pad(f1.values, (0, max(0, n + 1 - f1.values.size)))[: n + 1]
    kv = np.pad(khat.values, (0, max(0, n + 1 - khat.values.size)))[: n + 1]
    a = np.zeros(n + 1)
    a[0] = fv[0]
    for m in range(1, n + 1):
        s = 0.5 * kv[m] * a[0] + np.dot(kv[m - 1:0:-1], a[1:m])
        a[m] = (fv[m] + h * s) / (1 - 0.5 * h * kv[0])
    return a


# -- convolve ---------------------------------------------------------------

def test_convolve_constants():
    f = GridDensity(1e-3, np.ones(1001))
    c = kinetic.convolve(f, f)
    assert float(c(0.5)) == pytest.approx(0.5, abs=1e-6)
    # (1 * 1)(t) = t on [0, 1] and 2 - t on [1, 2]; past t = 1 the jump of the
    # boxcar at its support bound is sampled by the trapezoid rule, an O(h) error
    t = np.linspace(0, 2, 41)
    exact = np.minimum(t, 2 - t)
    np.testing.assert_allclose(c(t)[t <= 1], exact[t <= 1], atol=1e-6)
    assert np.max(np.abs(c(t) - exact)) <= 1.001e-3


def test_convolve_with_zero():
    f = GridDensity(0.01, np.ones(101))
    z = GridDensity(0.01, np.zeros(101))
    assert not kinetic.convolve(f, z).values.any()


def test_convolve_fft_matches_direct():
    rng = np.random.default_rng(3)
    f = GridDensity(1e-3, rng.uniform(0, 1, 800))
    g = GridDensity(1e-3, rng.uniform(0, 1, 600))
    d = kinetic.convolve(f, g, method="direct").values
    q = kinetic.convolve(f, g, method="fft").values
    np.testing.assert_allclose(q, d, atol=1e-10)


def test_convolve_rejects_mismatched_steps():
    with pytest.raises(ConfigurationError):
        kinetic.convolve(GridDensity(0.1, [1, 1]), GridDensity(0.2, [1, 1]))


# -- renewal_density ------------------------------------------------------

def test_renewal_uniform_closed_form(uniform_sol):
    # for the uniform halves data a = 1/2 + int_0^t a, so a(t) = e^t / 2
    assert float(uniform_sol.a(0.5)) == pytest.approx(0.5 * math.exp(0.5), abs=1e-5)
    t = uniform_sol.times[uniform_sol.times <= 0.65]
    np.testing.assert_allclose(uniform_sol.a.values[: t.size], 0.5 * np.exp(t), atol=1e-6)


def test_renewal_uniform_picard_oracle(uniform_sol):
    t = uniform_sol.times[uniform_sol.times <= 0.65]
    a = np.full(t.size, 0.5)
    for _ in range(40):
        a = 0.5 + cumulative_trapezoid(a, t, initial=0.0)
    np.testing.assert_allclose(uniform_sol.a.values[: t.size], a, atol=1e-9)


def test_renewal_tent_matches_time_marching():
    f1, f2 = initial.tent(2e-3)
    khat = f2.scaled(1 / f2.total_mass)
    a = kinetic.renewal_density(f1, khat, 0.7, tol=1e-12)
    ref = volterra_march(f1, khat, a.values.size - 1)
    np.testing.assert_allclose(a.values, ref, rtol=0, atol=1e-10)


@pytest.mark.parametrize("tol", [1e-4, 1e-8, 1e-12])
def test_renewal_truncation_bound(tol):
    f1, f2 = initial.uniform_halves(2e-3)
    khat = f2.scaled(2.0)
    a = kinetic.renewal_density(f1, khat, 0.6, tol=tol)
    ref = volterra_march(f1, khat, a.values.size - 1)
    assert np.max(np.abs(a.values - ref)) < tol


def test_renewal_zero_f1_gives_zero():
    z = GridDensity(0.01, np.zeros(101))
    k = GridDensity(0.01, np.ones(101))
    assert not kinetic.renewal_density(z, k, 1.0).values.any()


def test_renewal_rejects_unnormalized_kernel():
    f = GridDensity(0.01, np.ones(101))
    with pytest.raises(DomainError):
        kinetic.renewal_density(f, f.scaled(0.5), 1.0)


def test_renewal_rejects_atom_at_origin():
    h = 0.01
    spike = np.zeros(101)
    spike[0] = 2 / h
    with pytest.raises(DegenerateKernelError):
        kinetic.renewal_density(GridDensity(h, np.ones(101)), GridDensity(h, spike), 1.0)


def test_renewal_rejects_nonpositive_tol():
    f = GridDensity(0.01, np.ones(101))
    with pytest.raises(DomainError):
        kinetic.renewal_density(f, f, 1.0, tol=0.0)


# -- loss, blow-up, evaluation ----------------------------------------------

def test_total_loss_reaches_half_at_ln2(uniform_sol):
    assert float(uniform_sol.loss(math.log(2))) == pytest.approx(0.5, abs=1e-6)
    assert uniform_sol.loss.values[0] == 0.0
    assert np.all(np.diff(uniform_sol.loss.values) >= 0)


def test_blowup_uniform_is_ln2(uniform_sol):
    assert kinetic.blowup_time(uniform_sol) == pytest.approx(math.log(2), abs=1e-6)


def test_horizon_stops_at_floor(uniform_sol):
    # default floor 1e-3 N2(0): N2(t) = 1 - e^t / 2 hits 5e-4 at ln(2 - 1e-3)
    assert uniform_sol.n2_floor == pytest.approx(5e-4)
    assert uniform_sol.horizon == pytest.approx(math.log(2 - 1e-3), abs=1e-6)


def test_solve_grows_window_until_blowup():
    f1, f2 = initial.uniform_halves(1e-3)
    sol = kinetic.solve(f1, f2)
    assert sol.t_max >= sol.horizon
    assert sol.horizon == pytest.approx(math.log(2 - 1e-3), abs=1e-6)


def test_f1_at_origin_equals_renewal_density(uniform_sol):
    g = kinetic.f1_eval(uniform_sol, 0.5)
    assert float(g.values[0]) == pytest.approx(0.82436, abs=1e-5)
    assert abs(float(g.values[0]) - float(uniform_sol.a(0.5))) <= 10 * 1e-10


def test_f1_eval_uniform_closed_form(uniform_sol):
    # f1(x, t) = 1/2 1[x + t <= 1] + int_0^t 1[x + t - s <= 1] a(s) ds with a = e^s / 2
    t = 0.4
    g = kinetic.f1_eval(uniform_sol, t)
    x = g.nodes
    lower = np.clip(x + t - 1, 0, t)
    expected = 0.5 * (x + t <= 1) + 0.5 * (np.exp(t) - np.exp(lower))
    smooth = x + t < 1 - 2e-3
    np.testing.assert_allclose(g.values[smooth], expected[smooth], atol=1e-5)
    # for x + t > 1 the time integral crosses the jump of f2bar at x = 1,
    # which the trapezoid rule resolves only to O(h)
    assert np.max(np.abs(g.values - expected)) < g.step


def test_f2_eval_scales_initial_density(uniform_sol):
    g = kinetic.f2_eval(uniform_sol, 0.5)
    scale = uniform_sol.n2_at(0.5) / uniform_sol.n2_zero
    assert scale == pytest.approx(2 - math.exp(0.5), abs=1e-6)
    # density value is 1/2 times the scale factor
    assert float(g(0.3)) == pytest.approx(0.5 * (2 - math.exp(0.5)), abs=1e-6)


@pytest.mark.parametrize("t", [0.0, 0.1, 0.25, 0.4, 0.6])
def test_mass_balance(tent_sol, t):
    n1 = kinetic.f1_eval(tent_sol, t).total_mass
    n2 = kinetic.f2_eval(tent_sol, t).total_mass
    assert n1 + n2 == pytest.approx(1 - float(tent_sol.loss(t)), abs=1e-5)
    assert n2 == pytest.approx(tent_sol.n2_at(t), abs=1e-12)


def test_f1_eval_off_grid_time_interpolates(tent_sol):
    t = 0.3 + 0.4e-3
    lo, hi = kinetic.f1_eval(tent_sol, 0.3), kinetic.f1_eval(tent_sol, 0.301)
    mid = kinetic.f1_eval(tent_sol, t)
    np.testing.assert_allclose(mid.values, 0.6 * lo.values + 0.4 * hi.values, atol=1e-12)


def test_eval_beyond_horizon_raises(uniform_sol):
    with pytest.raises(HorizonError):
        kinetic.f1_eval(uniform_sol, 0.7)
    with pytest.raises(DomainError):
        kinetic.f2_eval(uniform_sol, -0.1)


def test_solve_rejects_empty_species_two():
    f1 = GridDensity(0.01, np.ones(101))
    with pytest.raises(DegenerateInputError):
        kinetic.solve(f1, GridDensity(0.01, np.zeros(101)))


# -- residual -----------------------------------------------------------------

def test_residual_small(uniform_sol):
    assert kinetic.renewal_residual(uniform_sol) < 1e-5


def test_residual_shrinks_quadratically():
    res = []
    for h in (1e-3, 5e-4, 2.5e-4):
        f1, f2 = initial.tent(h)
        res.append(kinetic.renewal_residual(kinetic.solve(f1, f2, t_max=0.75, tol=1e-12)))
    r1, r2 = res[0] / res[1], res[1] / res[2]
    assert r1 == pytest.approx(4.0, rel=0.05) and r2 == pytest.approx(4.0, rel=0.05)
