import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import free_closed_form
from spectral_lab.errors import InvalidSpec, SiteBudgetExceeded
from spectral_lab.potentials import Free, Perturbed, Sparse, Sturmian
from spectral_lab.propagator import (
    basis_gram,
    canonical_initial,
    canonical_pair,
    log_checkpoints,
    propagate,
    site_budget,
    solution_values,
    step,
    wronskian,
)


def test_step():
    assert step(0, 1, 0, 0) == 0
    assert step(1, 0, 0, 0) == -1
    assert step(0, 1, 2, 0) == 2


def test_wronskian_formula():
    assert wronskian((1, 2), (3, 4)) == 2
    assert wronskian((1, 2), (1, 2)) == 0
    for phi in np.linspace(-1.5, math.pi / 2, 9):
        u1, u2 = canonical_initial(phi)
        assert wronskian(u1, u2) == pytest.approx(1.0, abs=1e-15)


def test_canonical_initial_data():
    assert canonical_initial(0.0) == ((-0.0, 1.0), (1.0, 0.0))
    assert canonical_initial(math.pi / 2) == ((-1.0, 0.0), (0.0, 1.0))
    with pytest.raises(InvalidSpec):
        canonical_initial(-math.pi / 2)


@pytest.mark.parametrize(
    "E, L, expected",
    [(0.0, [4.0], math.sqrt(2)), (0.0, [2.5], math.sqrt(1.5)), (2.0, [3.0], math.sqrt(14))],
)
def test_free_truncated_norms(E, L, expected):
    t = propagate(Free(), E, (0.0, 1.0), L)
    assert t.norms[-1] == pytest.approx(expected, rel=1e-15)


def test_norm_is_piecewise_linear_in_L():
    L = np.array([5.0, 5.25, 5.5, 5.75, 6.0])
    t = propagate(Sturmian(1, "golden", 0), 0.3, (0.2, 0.9), L)
    sq = t.norms**2
    np.testing.assert_allclose(np.diff(sq), np.diff(sq)[0], rtol=1e-12)


def test_norms_nondecreasing_and_terminal_window():
    spec = Sturmian(1, "golden", 0)
    L = log_checkpoints(5000, 10, 30)
    t = propagate(spec, 0.7, (0.0, 1.0), L)
    assert np.all(np.diff(t.norms) >= 0)
    a, b = t.terminal
    full = solution_values(spec, 0.7, (0.0, 1.0), t.N)
    scale = 2.0 ** t.terminal_exp
    assert a * scale == pytest.approx(full[t.N - 1], rel=1e-12)
    assert b * scale == pytest.approx(full[t.N], rel=1e-12)


def test_free_closed_form_oracle():
    E, init = 0.6, (0.3, -0.8)
    u = solution_values(Free(), E, init, 10_000)
    n = np.arange(10_001)
    ref = np.array([free_closed_form(E, init, k) for k in n])
    assert np.max(np.abs(u - ref)) / np.max(np.abs(ref)) < 1e-8


@settings(max_examples=40, deadline=None)
@given(
    a=st.floats(-3, 3), b=st.floats(-3, 3), E=st.floats(-2.5, 3.5),
    x=st.tuples(st.floats(-1, 1), st.floats(-1, 1)), y=st.tuples(st.floats(-1, 1), st.floats(-1, 1)),
)
def test_linearity(a, b, E, x, y):
    spec = Perturbed(Sturmian(1, "golden", 0), 1, 2, "alternating")
    if x == (0.0, 0.0) or y == (0.0, 0.0):
        return
    n = 300  # short enough that gap energies stay in double range
    ux = solution_values(spec, E, x, n)
    uy = solution_values(spec, E, y, n)
    uz = solution_values(spec, E, (a * x[0] + b * y[0], a * x[1] + b * y[1]), n)
    scale = max(1.0, np.max(np.abs(a * ux)) + np.max(np.abs(b * uy)))
    assert np.max(np.abs(uz - (a * ux + b * uy))) <= 1e-12 * scale


def test_rescaling_preserves_norms():
    # outside the spectrum the solution grows far beyond 2**512
    E, L = 3.5, [300.0, 1000.0, 3000.0]
    t = propagate(Free(), E, (0.0, 1.0), L)
    assert t.terminal_exp > 0
    with mpmath.workdps(30):
        k = mpmath.acosh(mpmath.mpf(E) / 2)
        for Li, got in zip(L, t.log_norms):
            exact = mpmath.log(mpmath.fsum((mpmath.sinh(n * k) / mpmath.sinh(k)) ** 2 for n in range(1, int(Li) + 1))) / 2
            assert got == pytest.approx(float(exact), rel=1e-13)


def test_wronskian_conserved_with_rescaling():
    spec = Sturmian(1, "golden", 0)
    pair = canonical_pair(spec, 0.7, 0.3, log_checkpoints(10**5, 100, 32))
    assert np.max(pair.wronskian_deviation) < 1e-9


def test_keep_values_matches_streaming():
    spec = Perturbed(Sparse(0.5), 1, 2, "plus")
    L = log_checkpoints(4000, 10, 16)
    a = propagate(spec, 0.4, (0.6, 0.8), L)
    b = propagate(spec, 0.4, (0.6, 0.8), L, keep_values=True)
    np.testing.assert_allclose(a.norms, b.norms, rtol=1e-13)


def test_basis_gram_reproduces_any_initial_condition():
    spec = Sturmian(1, "golden", 0)
    L = log_checkpoints(20_000, 100, 16)
    gram = basis_gram(spec, 0.9, L)
    for init in [(0.6, 0.8), (-0.28, 0.96), (1.0, 0.0)]:
        t = propagate(spec, 0.9, init, L)
        np.testing.assert_allclose(gram.log_norms(init), t.log_norms, rtol=0, atol=1e-10)


def test_left_direction_mirrors_sites():
    spec = Sturmian(1, "golden", 0)
    init = (0.3, 0.7)  # (u(0), u(1))
    u = solution_values(spec, 0.2, init, 50, direction="left")
    # u lives on sites 1, 0, -1, ..., reflected to m = 1 - n
    assert (u[0], u[1]) == (0.7, 0.3)
    V = spec.array(-60, 2)
    val = {n: V[n + 60] for n in range(-60, 2)}
    for m in range(1, 49):
        n = 1 - m
        assert u[m + 1] == pytest.approx((0.2 - val[n]) * u[m] - u[m - 1], abs=1e-12)


def test_site_budget(monkeypatch):
    with pytest.raises(SiteBudgetExceeded):
        propagate(Free(), 0.0, (0.0, 1.0), [1e3], budget=500)
    monkeypatch.setenv("SPECTRAL_LAB_SITE_BUDGET", "100")
    assert site_budget(10**6) == 100
    with pytest.raises(SiteBudgetExceeded):
        propagate(Free(), 0.0, (0.0, 1.0), [1e3])


def test_rejects_zero_initial_data():
    with pytest.raises(InvalidSpec):
        propagate(Free(), 0.0, (0.0, 0.0), [10.0])


def test_default_schedule():
    L = log_checkpoints(1000)
    assert L.size == 64 and L[0] == 100 and L[-1] == 1000
