import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from espinsim.device import H_PLANCK, MU_B, exchange_energy
from espinsim.fitting import FitError, fit_swap_rate, levenberg_marquardt, swap_rate_model

TRUE = (-7.1e-3, -24.4, 0.98)
EPS = np.linspace(20.0, 150.0, 12)


def test_model_formula():
    a, b, t = TRUE
    eps = 55.4
    j0 = exchange_energy(eps, t)
    dez = 0.4 * MU_B * (a + b * eps * 1e-6)
    assert swap_rate_model(eps, a, b, t) == pytest.approx(2 * np.hypot(j0, dez) / H_PLANCK, rel=1e-14)


def test_noiseless_recovery():
    y = swap_rate_model(EPS, *TRUE)
    res = fit_swap_rate(np.column_stack([EPS, y]), initial_guess=(-5e-3, -10.0, 1.5))
    assert res.residual_norm < 1e-10
    assert (res.a, res.b, res.t) == pytest.approx(TRUE, rel=1e-6)
    assert res.converged


def test_multistart_without_guess():
    y = swap_rate_model(EPS, *TRUE)
    res = fit_swap_rate(np.column_stack([EPS, y]))
    assert res.residual_norm < 1e-8
    assert res.a < 0
    assert (res.a, res.b, res.t) == pytest.approx(TRUE, rel=1e-4)


@pytest.mark.parametrize("seed", range(5))
def test_noisy_recovery_within_10_percent(seed):
    rng = np.random.default_rng(seed)
    y = swap_rate_model(EPS, *TRUE) * (1 + 0.01 * rng.standard_normal(EPS.size))
    res = fit_swap_rate(np.column_stack([EPS, y]), initial_guess=(-5e-3, -10.0, 1.5))
    for got, want in zip((res.a, res.b, res.t), TRUE):
        assert abs(got / want - 1) < 0.10
    assert set(res.uncertainty) == {"a", "b", "t"}
    assert all(v >= 0 for v in res.uncertainty.values())


def test_fixed_slope_matches_reduced_model():
    y = swap_rate_model(EPS, -7.1e-3, 0.0, 0.98)
    res = fit_swap_rate(np.column_stack([EPS, y]), initial_guess=(-3e-3, 0.0, 1.2), fix_b=0.0)
    assert res.b == 0.0
    assert res.uncertainty["b"] == 0.0
    assert res.a == pytest.approx(-7.1e-3, rel=1e-6)
    assert res.t == pytest.approx(0.98, rel=1e-6)


def test_sign_canonicalization():
    y = swap_rate_model(EPS, *TRUE)
    res = fit_swap_rate(np.column_stack([EPS, y]), initial_guess=(7e-3, 24.0, 1.0))
    assert res.a < 0 and res.b < 0


def test_input_validation():
    with pytest.raises(ValueError):
        fit_swap_rate([(1.0, 1.0)] * 3)
    with pytest.raises(ValueError):
        fit_swap_rate(np.zeros((5, 3)))
    with pytest.raises(ValueError):
        fit_swap_rate([(-1.0, 1.0)] * 5)


def test_nonconvergence_reports_best():
    y = swap_rate_model(EPS, *TRUE) * (1 + 0.05 * np.sin(EPS))
    with pytest.raises(FitError) as info:
        fit_swap_rate(np.column_stack([EPS, y]), initial_guess=(-5e-3, -10.0, 1.5), max_iter=1)
    assert info.value.best.residual_norm >= 0


def test_lm_on_rosenbrock_like_problem():
    def fun(p):
        return np.array([10 * (p[1] - p[0] ** 2), 1 - p[0]])

    p, cost, _, ok = levenberg_marquardt(fun, np.array([-1.2, 1.0]), np.array([-5.0, -5.0]), np.array([5.0, 5.0]))
    assert ok and cost < 1e-20
    assert p == pytest.approx([1, 1], abs=1e-8)


def test_lm_respects_bounds():
    def fun(p):
        return np.array([p[0] - 3.0])

    p, _, _, _ = levenberg_marquardt(fun, np.array([0.0]), np.array([-1.0]), np.array([1.0]))
    assert p[0] == pytest.approx(1.0)


@settings(max_examples=15, deadline=None)
@given(perm_seed=st.integers(0, 2**32 - 1))
def test_order_invariance(perm_seed):
    rng = np.random.default_rng(1)
    y = swap_rate_model(EPS, *TRUE) * (1 + 0.01 * rng.standard_normal(EPS.size))
    data = np.column_stack([EPS, y])
    ref = fit_swap_rate(data, initial_guess=(-5e-3, -10.0, 1.5))
    shuffled = data[np.random.default_rng(perm_seed).permutation(EPS.size)]
    res = fit_swap_rate(shuffled, initial_guess=(-5e-3, -10.0, 1.5))
    assert (res.a, res.b, res.t) == (ref.a, ref.b, ref.t)
