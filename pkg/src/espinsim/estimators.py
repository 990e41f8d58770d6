"""scikit-learn compatible wrappers.

``SwapRateRegressor`` learns ``(a, b, t)`` from ``X = eps`` (ueV, one
column) and ``y = 1/tau_SWAP`` (1/ns).  ``SingletReturnModel`` and
``ConcurrenceModel`` are parameter-only predictors: ``fit`` validates the
input and records its width, ``predict`` runs the simulator.
"""

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from . import core
from .device import DeviceParams
from .fitting import fit_swap_rate, swap_rate_model
from .measure import concurrence_analytic, singlet_probability
from .noise import NuclearBath, mean_and_stderr, sample_batch
from .pulses import InitPolicy, Mode, gate_final_states, initial_states


class SwapRateRegressor(RegressorMixin, BaseEstimator):
    """Detuning dependence of the swap rate with a linear Zeeman gradient.

    Parameters
    ----------
    a0, b0, t0 : float or None
        Starting point in T, T/eV and ueV.  ``None`` for all three uses the
        built-in multi-start grid.
    g : float
        g-factor of the gradient model.
    fix_b : float or None
        Hold the gradient slope at this value.
    max_iter : int
    """

    def __init__(self, a0=None, b0=None, t0=None, g=-0.4, fix_b=None, max_iter=200):
        self.a0 = a0
        self.b0 = b0
        self.t0 = t0
        self.g = g
        self.fix_b = fix_b
        self.max_iter = max_iter

    def fit(self, X, y):
        X, y = check_X_y(X, y, ensure_min_samples=4)
        if X.shape[1] != 1:
            raise ValueError("X must have a single column of detunings (ueV)")
        guess = None
        if self.a0 is not None or self.b0 is not None or self.t0 is not None:
            guess = (
                -5e-3 if self.a0 is None else self.a0,
                0.0 if self.b0 is None else self.b0,
                1.0 if self.t0 is None else self.t0,
            )
        res = fit_swap_rate(
            np.column_stack([X[:, 0], y]), guess, g=self.g, fix_b=self.fix_b, max_iter=self.max_iter
        )
        self.a_, self.b_, self.t_ = res.a, res.b, res.t
        self.result_ = res
        self.n_features_in_ = 1
        return self

    def predict(self, X):
        check_is_fitted(self, "result_")
        X = check_array(X)
        return swap_rate_model(X[:, 0], self.a_, self.b_, self.t_, self.g)


class SingletReturnModel(RegressorMixin, BaseEstimator):
    """Noise-averaged singlet probability for rows ``[tau_ex_ns, eps_ueV]``."""

    def __init__(
        self,
        params=None,
        delta=None,
        mode="IDEAL",
        policy="MIX_50_50",
        shots=2000,
        seed=0,
        noise=True,
    ):
        self.params = params
        self.delta = delta
        self.mode = mode
        self.policy = policy
        self.shots = shots
        self.seed = seed
        self.noise = noise

    def fit(self, X, y=None):
        X = check_array(X)
        if X.shape[1] != 2:
            raise ValueError("X must have columns [tau_ex_ns, eps_ueV]")
        Mode(self.mode)
        InitPolicy(self.policy)
        self.n_features_in_ = 2
        return self

    def _device(self):
        p = DeviceParams() if self.params is None else self.params
        if self.delta is not None:
            p = p.replace(delta_override=float(self.delta))
        return p

    def predict(self, X, return_std=False):
        check_is_fitted(self, "n_features_in_")
        X = check_array(X)
        p = self._device()
        bath = NuclearBath.from_params(p) if self.noise else NuclearBath()
        if bath.is_silent:
            noise = (np.zeros(1),) * 3
        else:
            noise = sample_batch(bath, self.shots, self.seed)
        out = np.empty(len(X))
        err = np.empty(len(X))
        for eps in np.unique(X[:, 1]):
            rows = np.flatnonzero(X[:, 1] == eps)
            mean, var = 0.0, 0.0
            for psi0, w in initial_states(self.policy):
                states = gate_final_states(p, X[rows, 0], eps, psi0, noise, self.mode)
                m, e = mean_and_stderr(singlet_probability(states), axis=0)
                mean = mean + w * m
                var = var + (w * e) ** 2
            out[rows] = mean
            err[rows] = np.sqrt(var)
        return (out, err) if return_std else out


class ConcurrenceModel(RegressorMixin, BaseEstimator):
    """Closed-form concurrence for rows ``[tau_ex_ns, J0_ueV]``."""

    def __init__(self, delta=0.74):
        self.delta = delta

    def fit(self, X, y=None):
        X = check_array(X)
        if X.shape[1] != 2:
            raise ValueError("X must have columns [tau_ex_ns, J0_ueV]")
        self.n_features_in_ = 2
        return self

    def predict(self, X):
        check_is_fitted(self, "n_features_in_")
        X = check_array(X)
        alpha = X[:, 1] * X[:, 0] / (2 * core.HBAR)
        return np.atleast_1d(concurrence_analytic(self.delta, alpha))
