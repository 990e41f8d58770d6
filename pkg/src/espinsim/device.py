"""Device parameter models and the stage Hamiltonian.

Units: energies in ueV, times in ns, frequencies in GHz unless a name says
otherwise (``*_MHz``), fields in T, the Zeeman-gradient slope in T/eV.

Stage Hamiltonians live in a frame co-rotating at the drive frequency for
both spins, with the rotating-wave approximation.  The left spin's Zeeman
energy is pinned to the drive (``B0_T=None``) unless an explicit external
field is given; the right spin sits ``delta_Ez`` below it, where
``delta_Ez = E_zL - E_zR`` is a signed quantity.
"""

import dataclasses
import math
import warnings
from typing import Optional

import numpy as np

from .core import H_PLANCK, S_DOT_S, SX_L, SX_R, SY_L, SY_R, SZ_L, SZ_R

MU_B = 57.88382  # ueV / T


class ExchangeValidityWarning(UserWarning):
    """Detuning is outside the ``eps >> t`` regime of ``J0 = 2 t^2 / eps``."""


@dataclasses.dataclass(frozen=True)
class DeviceParams:
    """Physical parameters of the double dot.

    Defaults are the operating point quoted for the two-qubit experiment:
    ``g = -0.394``, ``t = 0.98 ueV``, ``a = -7.1 mT``, ``b = -24.4 T/eV``,
    ``f_ac = 11.1 GHz``, ``f_Rabi = 1.2 MHz``, nuclear spread ``0.275 MHz``
    for both spins and a stage-B detuning of 277 ueV.

    ``delta_override`` fixes the ratio ``delta_Ez / J0`` directly, bypassing
    the ``a + b*eps`` gradient model.  ``B0_T = None`` means the field is
    parked on the left-spin resonance.
    """

    g: float = -0.394
    t_ueV: float = 0.98
    a_T: float = -7.1e-3
    b_T_per_eV: float = -24.4
    f_ac_GHz: float = 11.1
    f_rabi_MHz: float = 1.2
    sigma_L_MHz: float = 0.275
    sigma_R_MHz: float = 0.275
    B0_T: Optional[float] = None
    eps_B_ueV: float = 277.0
    delta_override: Optional[float] = None
    drive_right: bool = False
    f_rabi_R_MHz: Optional[float] = None

    def __post_init__(self):
        if not self.t_ueV > 0:
            raise ValueError(f"t_ueV must be > 0, got {self.t_ueV}")
        if self.sigma_L_MHz < 0 or self.sigma_R_MHz < 0:
            raise ValueError("nuclear spreads sigma_L_MHz, sigma_R_MHz must be >= 0")
        if self.f_rabi_MHz < 0:
            raise ValueError(f"f_rabi_MHz must be >= 0, got {self.f_rabi_MHz}")
        if self.f_rabi_R_MHz is not None and self.f_rabi_R_MHz < 0:
            raise ValueError("f_rabi_R_MHz must be >= 0")
        if self.g == 0:
            raise ValueError("g must be nonzero")
        if not self.f_ac_GHz > 0:
            raise ValueError("f_ac_GHz must be > 0")
        if not self.eps_B_ueV > 0:
            raise ValueError("eps_B_ueV must be > 0")

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)

    def as_dict(self):
        return dataclasses.asdict(self)


def exchange_energy(eps, t):
    """Exchange splitting ``J0 = 2 t^2 / eps`` (ueV).

    Warns with :class:`ExchangeValidityWarning` when ``eps < 3 t``.
    """
    eps_arr = np.asarray(eps, dtype=float)
    if np.any(eps_arr <= 0):
        raise ValueError(f"detuning must be > 0 ueV, got {eps}")
    if np.any(eps_arr < 3 * t):
        warnings.warn(
            f"eps={eps} ueV is not >> t={t} ueV; J0 = 2t^2/eps is outside its validity range",
            ExchangeValidityWarning,
            stacklevel=2,
        )
    j0 = 2.0 * t * t / eps_arr
    return float(j0) if j0.ndim == 0 else j0


def zeeman_offset(eps, params, signed=False):
    """Zeeman offset ``|g| mu_B (a + b eps)`` in ueV.

    ``eps`` is in ueV and is converted to eV for the slope term.  Returns the
    magnitude unless ``signed`` is set.
    """
    dB = params.a_T + params.b_T_per_eV * np.asarray(eps, dtype=float) * 1e-6
    dEz = abs(params.g) * MU_B * dB
    out = dEz if signed else np.abs(dEz)
    return float(out) if np.ndim(out) == 0 else out


def delta_ez(eps, params):
    """Signed ``E_zL - E_zR`` used by the simulator at detuning ``eps``.

    With ``delta_override`` set this is ``delta_override * J0(eps)``;
    otherwise the linear gradient model.
    """
    if params.delta_override is not None:
        return params.delta_override * exchange_energy(eps, params.t_ueV)
    return zeeman_offset(eps, params, signed=True)


def resonance_field(f_ac, g):
    """External field (T) where ``h f_ac`` matches the Zeeman splitting."""
    if g == 0:
        raise ValueError("g must be nonzero")
    if not f_ac > 0:
        raise ValueError("f_ac must be > 0")
    return H_PLANCK * f_ac / (abs(g) * MU_B)


def rabi_from_power(P_MW, kappa):
    """Rabi frequency ``kappa * sqrt(P_MW)`` (MHz for kappa in MHz/sqrt(mW))."""
    P = np.asarray(P_MW, dtype=float)
    if np.any(P < 0):
        raise ValueError("microwave power must be >= 0")
    out = kappa * np.sqrt(P)
    return float(out) if out.ndim == 0 else out


def swap_time(J0, deltaEz=0.0):
    """Half period of the exchange oscillation, ``h / (2 sqrt(J0^2 + dEz^2))`` in ns."""
    J0 = np.asarray(J0, dtype=float)
    if np.any(J0 <= 0):
        raise ValueError("J0 must be > 0")
    out = H_PLANCK / (2.0 * np.hypot(J0, deltaEz))
    return float(out) if out.ndim == 0 else out


def nop_time(J0, deltaEz=0.0):
    """Full exchange period ``2 * tau_SWAP``."""
    return 2.0 * swap_time(J0, deltaEz)


def spin_detunings(eps, params, B0=None):
    """Rotating-frame detunings ``(df_L, df_R)`` in GHz at detuning ``eps``."""
    field = params.B0_T if B0 is None else B0
    f_L = params.f_ac_GHz if field is None else abs(params.g) * MU_B * field / H_PLANCK
    f_R = f_L - delta_ez(eps, params) / H_PLANCK
    return f_L - params.f_ac_GHz, f_R - params.f_ac_GHz


def build_stage_hamiltonian(
    stage_kind,
    eps,
    params,
    noise_sample=None,
    drive_on=False,
    drive_phase=0.0,
    exchange=True,
    B0=None,
):
    """4x4 rotating-frame Hamiltonian (ueV) of a B or C stage.

    ``H = h df_L S_zL + h df_R S_zR + J0(eps) S_L.S_R + h f_Rabi S_phi,L``
    where the drive term is present only when ``drive_on``.  Nuclear shifts
    from ``noise_sample`` (MHz) are added to the detunings.
    """
    if stage_kind not in ("B", "C"):
        raise ValueError(f"stage {stage_kind!r} has no Hamiltonian dynamics; expected 'B' or 'C'")
    df_L, df_R = spin_detunings(eps, params, B0=B0)
    if noise_sample is not None:
        df_L += noise_sample.df_L * 1e-3
        df_R += noise_sample.df_R * 1e-3
    h = H_PLANCK * (df_L * SZ_L + df_R * SZ_R)
    if exchange:
        h = h + exchange_energy(eps, params.t_ueV) * S_DOT_S
    if drive_on:
        c, s = math.cos(drive_phase), math.sin(drive_phase)
        h = h + H_PLANCK * params.f_rabi_MHz * 1e-3 * (c * SX_L + s * SY_L)
        if params.drive_right:
            f_R = params.f_rabi_MHz if params.f_rabi_R_MHz is None else params.f_rabi_R_MHz
            h = h + H_PLANCK * f_R * 1e-3 * (c * SX_R + s * SY_R)
    return h

