import csv
import io
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twospecies import initial, kinetic, scheme
from twospecies.errors import ConfigurationError, DegenerateInputError, HorizonError
from twospecies.measures import GridDensity, ks_distance, pair_distance

EPS = np.finfo(float).eps


@pytest.fixture
def uniform_state():
    return scheme.scheme_init(*initial.uniform_halves(1e-3), 0.25)


def test_init_uniform_bins(uniform_state):
    np.testing.assert_allclose(uniform_state.mu1.masses, [0.125] * 4, atol=1e-15)
    np.testing.assert_allclose(uniform_state.mu2.masses, [0.125] * 4, atol=1e-15)
    assert uniform_state.n2 == pytest.approx(0.5)
    assert uniform_state.time == 0.0


def test_init_tent_two_bins():
    s = scheme.scheme_init(*initial.tent(1e-3), 0.5)
    np.testing.assert_allclose(s.mu1.masses, [0.25, 0.25], atol=1e-14)
    np.testing.assert_allclose(s.mu2.masses, [0.25, 0.25], atol=1e-14)


def test_init_rejects_unnormalized():
    f = GridDensity(0.01, np.ones(101))
    with pytest.raises(ConfigurationError):
        scheme.scheme_init(f, f, 0.25)


def test_init_rejects_empty_species_two():
    f = GridDensity(0.01, np.ones(101))
    with pytest.raises(DegenerateInputError):
        scheme.scheme_init(f, GridDensity(0.01, np.zeros(101)), 0.25)


@pytest.mark.parametrize("delta", [0.3, 0.0015])
def test_init_rejects_non_dividing_delta(delta):
    with pytest.raises(ConfigurationError):
        scheme.scheme_init(*initial.uniform_halves(1e-3), delta)


def test_one_step_by_hand(uniform_state):
    s = scheme.scheme_step(uniform_state)
    # first bin 0.125 leaves; a quarter of species 2 converts
    np.testing.assert_allclose(s.mu1.masses, [0.15625, 0.15625, 0.15625, 0.03125], atol=1e-15)
    np.testing.assert_allclose(s.mu2.masses, [0.09375] * 4, atol=1e-15)
    assert s.n2 == pytest.approx(0.375, abs=1e-15)
    assert s.loss_history == pytest.approx((0.125,))
    assert s.time == 0.25


def test_step_leaves_input_untouched(uniform_state):
    before = uniform_state.mu1.masses.copy()
    scheme.scheme_step(uniform_state)
    np.testing.assert_array_equal(uniform_state.mu1.masses, before)


def test_run_counts(uniform_state):
    states = scheme.scheme_run(uniform_state, 0.5)
    assert [s.time for s in states] == [0.0, 0.25, 0.5]
    assert all(b.n2 < a.n2 for a, b in zip(states, states[1:]))


def test_run_stops_when_species_two_exhausted():
    s0 = scheme.scheme_init(*initial.uniform_halves(1e-3), 0.25)
    # losses 0.125, 0.15625, 0.1953..., cumulative passes 0.5 at the fourth step
    with pytest.raises(HorizonError):
        scheme.scheme_run(s0, 1.0)


def test_snapshot_at_is_piecewise_constant(uniform_state):
    states = scheme.scheme_run(uniform_state, 0.5)
    assert scheme.snapshot_at(states, 0.0) is states[0]
    assert scheme.snapshot_at(states, 0.2499) is states[0]
    assert scheme.snapshot_at(states, 0.25) is states[1]
    assert scheme.snapshot_at(states, 0.5) is states[2]
    with pytest.raises(HorizonError):
        scheme.snapshot_at(states, 0.75)


def test_invariants_tent():
    f1, f2 = initial.tent(1.25e-4)
    states = scheme.scheme_run(scheme.scheme_init(f1, f2, 0.0125), 0.4)
    n1 = states[0].n1
    base = states[0].mu2.masses
    nz = base > 0
    for a, b in zip(states, states[1:]):
        assert abs(b.mu1.total_mass - a.mu1.total_mass) <= 10 * EPS
    for s in states:
        assert s.mu1.total_mass == pytest.approx(n1, abs=1e-14)
        assert s.mu2.total_mass == pytest.approx(s.n2, abs=100 * EPS)
        ratio = s.mu2.masses[nz] / base[nz]
        assert ratio.max() - ratio.min() <= 100 * EPS * ratio.mean()
        assert np.all(s.mu1.masses >= 0) and np.all(s.mu2.masses >= 0)
        # the ledger is an exact sequential subtraction
        expected = states[0].n2
        for dl in s.loss_history:
            expected -= dl
        assert s.n2 == expected


@settings(max_examples=40, deadline=None)
@given(
    st.lists(st.floats(0.0, 3.0), min_size=9, max_size=9),
    st.lists(st.floats(0.01, 3.0), min_size=9, max_size=9),
    st.floats(0.05, 0.95),
)
def test_invariants_random_data(v1, v2, share):
    f1 = GridDensity(0.125, v1)
    f2 = GridDensity(0.125, v2)
    if f1.total_mass == 0:
        f1 = GridDensity(0.125, np.ones(9))
    f1 = f1.scaled(share / f1.total_mass)
    f2 = f2.scaled((1 - share) / f2.total_mass)
    s = scheme.scheme_init(f1, f2, 0.25)
    n1 = s.n1
    for _ in range(3):
        if s.n2 - s.mu1.masses[0] <= 0:
            break
        s = scheme.scheme_step(s)
        assert s.mu1.total_mass == pytest.approx(n1, abs=1e-13)
        assert s.mu2.total_mass == pytest.approx(s.n2, abs=1e-13)
        assert s.mu1.total_mass + s.n2 == pytest.approx(1 - sum(s.loss_history), abs=1e-13)


def test_converges_to_kinetic_first_order():
    f1, f2 = initial.tent(1.25e-4)
    sol = kinetic.solve(f1, f2, t_max=0.75)
    errs = []
    for delta in (0.05, 0.025, 0.0125):
        states = scheme.scheme_run(scheme.scheme_init(f1, f2, delta), 0.4)
        worst = 0.0
        for s in states:
            for t in (s.time, min(s.time + delta, 0.4)):
                worst = max(worst, pair_distance(s.pair(), sol.pair_at(t)))
        errs.append(worst)
    assert errs[0] / errs[1] == pytest.approx(2.0, rel=0.1)
    assert errs[1] / errs[2] == pytest.approx(2.0, rel=0.1)


def test_initial_binning_error_bounded_by_delta():
    f1, f2 = initial.tent(1e-3)
    s = scheme.scheme_init(f1, f2, 0.05)
    assert ks_distance(s.mu1, f1) <= 0.05 * 2
    assert ks_distance(s.mu2, f2) <= 0.05 * 2


def test_csv_export(uniform_state):
    states = scheme.scheme_run(uniform_state, 0.5)
    rows = list(csv.DictReader(io.StringIO(scheme.snapshots_csv(states))))
    assert len(rows) == 3 * 4
    assert list(rows[0]) == ["t", "bin", "mu1", "mu2", "n2"]
    last = [r for r in rows if float(r["t"]) == 0.5]
    assert math.fsum(float(r["mu1"]) for r in last) == pytest.approx(0.5)
    assert float(last[0]["n2"]) == states[-1].n2
