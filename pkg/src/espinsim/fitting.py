"""Fit of the swap rate ``1/tau_SWAP`` against detuning.

Model::

    1/tau_SWAP(eps) = 2 sqrt(J0(eps)^2 + dEz(eps)^2) / h
    J0 = 2 t^2 / eps,   dEz = |g| mu_B (a + b eps)

The solver is a box-constrained Levenberg-Marquardt iteration with a
central-difference Jacobian, run on relative residuals so that a
multiplicative noise level weighs all points alike.  The model only sees
``dEz**2``, so ``(a, b)`` and ``(-a, -b)`` fit equally well; results are
reported on the ``a <= 0`` branch.
"""

import dataclasses
import itertools
import logging

import numpy as np

from .device import H_PLANCK, MU_B

logger = logging.getLogger(__name__)

# internal parameter scaling: a in mT, b in T/eV, t in ueV
_SCALE = np.array([1e-3, 1.0, 1.0])
_LOWER = np.array([-100.0, -1000.0, 1e-6])
_UPPER = np.array([100.0, 1000.0, 10.0])


def swap_rate_model(eps, a, b, t, g=-0.4):
    """``1/tau_SWAP`` in 1/ns; ``eps`` in ueV, ``a`` in T, ``b`` in T/eV, ``t`` in ueV."""
    eps = np.asarray(eps, dtype=float)
    j0 = 2.0 * t * t / eps
    dez = abs(g) * MU_B * (a + b * eps * 1e-6)
    return 2.0 * np.hypot(j0, dez) / H_PLANCK


@dataclasses.dataclass
class FitResult:
    a: float  # T
    b: float  # T/eV
    t: float  # ueV
    residual_norm: float
    uncertainty: dict
    converged: bool = True
    n_iter: int = 0
    g: float = -0.4

    def predict(self, eps):
        return swap_rate_model(eps, self.a, self.b, self.t, self.g)

    def as_dict(self):
        return dataclasses.asdict(self)


class FitError(RuntimeError):
    """Raised when no start converges; ``best`` holds the best-so-far fit."""

    def __init__(self, message, best):
        super().__init__(message)
        self.best = best


def _jacobian(fun, p, fixed):
    r0 = fun(p)
    J = np.zeros((r0.size, p.size))
    for j in range(p.size):
        if fixed[j]:
            continue
        h = 1e-6 * max(1.0, abs(p[j]))
        dp = np.zeros_like(p)
        dp[j] = h
        J[:, j] = (fun(p + dp) - fun(p - dp)) / (2 * h)
    return r0, J


def levenberg_marquardt(fun, p0, lower, upper, fixed=None, max_iter=200, xtol=1e-12, ftol=1e-12):
    """Minimize ``0.5 ||fun(p)||^2`` inside the box ``[lower, upper]``.

    Returns ``(p, cost, n_iter, converged)``.  Steps that leave the box are
    projected back onto it.
    """
    p = np.clip(np.asarray(p0, dtype=float), lower, upper)
    fixed = np.zeros(p.size, bool) if fixed is None else np.asarray(fixed, bool)
    r, J = _jacobian(fun, p, fixed)
    cost = 0.5 * r @ r
    lam = 1e-3
    nu = 2.0
    free = ~fixed
    for it in range(1, max_iter + 1):
        A = J[:, free].T @ J[:, free]
        g = J[:, free].T @ r
        if np.max(np.abs(g)) < 1e-30:
            return p, cost, it, True
        while True:
            step = np.linalg.solve(A + lam * np.diag(np.maximum(np.diag(A), 1e-30)), -g)
            trial = p.copy()
            trial[free] = np.clip(p[free] + step, lower[free], upper[free])
            rt = fun(trial)
            ct = 0.5 * rt @ rt
            predicted = -(g @ step + 0.5 * step @ A @ step)
            rho = (cost - ct) / predicted if predicted > 0 else -1.0
            if ct < cost and rho > 0:
                lam *= max(1 / 3, 1 - (2 * rho - 1) ** 3)
                nu = 2.0
                break
            lam *= nu
            nu *= 2
            if lam > 1e16:
                # no descent direction left: p is a local minimum
                return p, cost, it, True
        moved = np.max(np.abs(trial - p) / np.maximum(1.0, np.abs(p)))
        improved = cost - ct
        p = trial
        r, J = _jacobian(fun, p, fixed)
        cost = 0.5 * r @ r
        if moved < xtol or improved <= ftol * max(cost, 1e-300) or cost < 1e-30:
            return p, cost, it, True
    return p, cost, max_iter, False


def _default_starts(fix_b):
    a_vals = (-20.0, -5.0, 5.0, 20.0)
    b_vals = (0.0,) if fix_b else (-50.0, 0.0, 50.0)
    t_vals = (0.5, 1.0, 2.0)
    return [np.array(s) for s in itertools.product(a_vals, b_vals, t_vals)]


def fit_swap_rate(data, initial_guess=None, g=-0.4, fix_b=None, max_iter=200):
    """Least-squares fit of ``(a, b, t)`` to ``[(eps_ueV, inv_tau_per_ns), ...]``.

    ``initial_guess`` is ``(a_T, b_T_per_eV, t_ueV)``.  ``fix_b`` holds ``b``
    at the given value (T/eV) and fits ``(a, t)`` only.  Falls back to a
    coarse multi-start grid when the supplied guess does not converge.
    """
    arr = np.asarray(data, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError("data must be a sequence of (eps, inv_tau) pairs")
    order = np.lexsort((arr[:, 1], arr[:, 0]))
    eps, y = arr[order, 0], arr[order, 1]
    if eps.size < 4:
        raise ValueError("need at least 4 data points")
    if np.any(eps <= 0) or np.any(y <= 0):
        raise ValueError("detunings and rates must be positive")

    def residuals(q):
        a, b, t = q * _SCALE
        return swap_rate_model(eps, a, b, t, g) / y - 1.0

    fixed = np.array([False, fix_b is not None, False])

    def from_start(s):
        s = np.array(s, dtype=float)
        if fix_b is not None:
            s[1] = fix_b
        return levenberg_marquardt(residuals, s, _LOWER, _UPPER, fixed, max_iter)

    runs = []
    if initial_guess is not None:
        runs.append(from_start(np.asarray(initial_guess, dtype=float) / _SCALE))
    if not runs or not runs[0][3]:
        if runs:
            logger.info("initial guess stalled; trying multi-start grid")
        runs.extend(from_start(s) for s in _default_starts(fix_b is not None))
    # lowest cost wins; converged runs first, ties keep the earliest start
    best = min(runs, key=lambda run: (not run[3], run[1]))
    q, cost, n_iter, converged = best
    if q[0] > 0:
        q = q * np.array([-1.0, -1.0, 1.0])

    r = residuals(q)
    _, J = _jacobian(residuals, q, fixed)
    free = ~fixed
    dof = max(1, eps.size - int(free.sum()))
    s2 = (r @ r) / dof
    sig = np.zeros(3)
    try:
        cov = np.linalg.inv(J[:, free].T @ J[:, free]) * s2
        sig[free] = np.sqrt(np.clip(np.diag(cov), 0, None))
    except np.linalg.LinAlgError:
        sig[free] = np.nan
    a, b, t = q * _SCALE
    sa, sb, st = sig * _SCALE
    result = FitResult(
        a=float(a),
        b=float(b),
        t=float(t),
        residual_norm=float(np.linalg.norm(r)),
        uncertainty={"a": float(sa), "b": float(sb), "t": float(st)},
        converged=bool(converged),
        n_iter=int(n_iter),
        g=g,
    )
    if not converged:
        raise FitError(f"fit did not converge in {max_iter} iterations", result)
    return result
