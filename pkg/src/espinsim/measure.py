"""Readout observables and concurrence."""

import dataclasses

import numpy as np

from .core import TwoSpinState, make_special_state

_SINGLET = make_special_state("SINGLET").amplitudes


def _amps(psi):
    return psi.amplitudes if isinstance(psi, TwoSpinState) else np.asarray(psi, dtype=complex)


def singlet_probability(psi):
    """Projective spin-blockade readout ``|<S|psi>|^2``.

    Accepts a state or an array of amplitudes with trailing dimension 4.
    """
    a = _amps(psi)
    p = np.abs(a @ np.conj(_SINGLET)) ** 2
    p = np.clip(p, 0.0, 1.0)
    return float(p) if np.ndim(p) == 0 else p


def antiparallel_probability(psi):
    """Weight on ``|ud>`` and ``|du>``."""
    a = _amps(psi)
    p = np.abs(a[..., 1]) ** 2 + np.abs(a[..., 2]) ** 2
    p = np.clip(p, 0.0, 1.0)
    return float(p) if np.ndim(p) == 0 else p


def concurrence_pure(psi):
    """Pure-state concurrence ``2 |a_uu a_dd - a_ud a_du|``."""
    a = _amps(psi)
    c = 2.0 * np.abs(a[..., 0] * a[..., 3] - a[..., 1] * a[..., 2])
    c = np.clip(c, 0.0, 1.0)
    return float(c) if np.ndim(c) == 0 else c


def concurrence_analytic(Delta, alpha):
    """Closed-form concurrence after the exchange stage.

    ``Delta = dEz / J0`` and ``alpha = J0 tau_ex / (2 hbar)``.
    """
    Delta = np.asarray(Delta, dtype=float)
    alpha = np.asarray(alpha, dtype=float)
    w = 1.0 + Delta**2
    x = np.sqrt(w) * alpha
    s, c = np.sin(x), np.cos(x)
    out = np.abs(s) / w * np.sqrt(w * c**2 + Delta**2 * s**2)
    return float(out) if out.ndim == 0 else out


@dataclasses.dataclass(frozen=True)
class ReadoutModel:
    """Affine map from probability to charge-sensor signal (arbitrary units)."""

    scale: float = 1.0
    offset: float = 0.0

    def __post_init__(self):
        if not self.scale > 0:
            raise ValueError("readout scale must be > 0")


def readout_signal(P, model=ReadoutModel()):
    P = np.asarray(P, dtype=float)
    if np.any((P < 0) | (P > 1)):
        raise ValueError("probability outside [0, 1]")
    out = model.scale * P + model.offset
    return float(out) if out.ndim == 0 else out
