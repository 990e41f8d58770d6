"""Simulator for two electron spins in a double quantum dot.

Covers single-spin EDSR rotations, exchange-driven two-qubit cycles,
quasi-static nuclear noise, Pauli-blockade readout, and the sweeps built on
them (EDSR spectrum, Rabi scans, singlet-return maps, swap-rate fits,
concurrence maps).  Energies are in ueV, times in ns, frequencies in GHz
unless a name says otherwise.
"""

__version__ = "0.1.0"

from .core import TwoSpinState, fidelity, make_basis_state, make_special_state  # noqa: E402
from .device import DeviceParams, exchange_energy, swap_time  # noqa: E402
from .measure import concurrence_analytic, concurrence_pure, singlet_probability  # noqa: E402
from .pulses import InitPolicy, Mode  # noqa: E402

__all__ = [
    "__version__",
    "TwoSpinState",
    "fidelity",
    "make_basis_state",
    "make_special_state",
    "DeviceParams",
    "exchange_energy",
    "swap_time",
    "concurrence_analytic",
    "concurrence_pure",
    "singlet_probability",
    "InitPolicy",
    "Mode",
]
