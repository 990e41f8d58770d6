"""Numerical experiments: EDSR spectrum, Rabi traces, singlet maps,
swap-time extraction and concurrence maps.

Sweeps return :class:`SweepResult` grids.  Noise-averaged sweeps reuse the
same per-shot noise draws for every grid cell (common random numbers), which
keeps traces smooth in the swept variable and makes every cell deterministic
given ``(params, seed, shots)``.
"""

import dataclasses
import math
from typing import Optional

import numpy as np

from . import core
from .device import (
    H_PLANCK,
    MU_B,
    DeviceParams,
    build_stage_hamiltonian,
    delta_ez,
    exchange_energy,
    resonance_field,
    swap_time,
)
from .measure import antiparallel_probability, concurrence_analytic, singlet_probability
from .noise import DEFAULT_SHOTS, NuclearBath, mean_and_stderr, sample_batch
from .pulses import InitPolicy, Mode, gate_final_states, initial_states, rabi_final_states


class ExtractionError(ValueError):
    """No usable oscillation in a trace."""


@dataclasses.dataclass(frozen=True)
class Axis:
    name: str
    unit: str
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float).reshape(-1))

    @property
    def label(self):
        return f"{self.name}_{self.unit}" if self.unit else self.name


@dataclasses.dataclass
class SweepResult:
    """Gridded observable with its axes.

    ``data`` has one dimension per axis, in axis order.  ``extra`` holds
    derived per-cell columns (e.g. the exchange energy of each row) that are
    written alongside the axes.
    """

    observable: str
    axes: list
    data: np.ndarray
    stderr: Optional[np.ndarray] = None
    extra: dict = dataclasses.field(default_factory=dict)
    metadata: dict = dataclasses.field(default_factory=dict)

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=float)
        shape = tuple(len(ax.values) for ax in self.axes)
        if self.data.shape != shape:
            raise ValueError(f"grid shape {self.data.shape} does not match axes {shape}")
        if not np.all(np.isfinite(self.data)):
            raise ValueError("sweep produced non-finite values")
        if self.stderr is not None:
            self.stderr = np.broadcast_to(np.asarray(self.stderr, dtype=float), shape).copy()
        for key, col in list(self.extra.items()):
            self.extra[key] = np.broadcast_to(np.asarray(col, dtype=float), shape).copy()

    @property
    def shape(self):
        return self.data.shape

    def axis(self, name):
        for ax in self.axes:
            if ax.name == name:
                return ax
        raise KeyError(name)

    def row(self, i):
        """1-D sweep along the last axis at index ``i`` of the first."""
        if self.data.ndim != 2:
            raise ValueError("row() needs a 2-D sweep")
        err = None if self.stderr is None else self.stderr[i]
        extra = {k: v[i] for k, v in self.extra.items()}
        meta = dict(self.metadata)
        first = self.axes[0]
        meta[first.label] = float(first.values[i])
        return SweepResult(self.observable, [self.axes[-1]], self.data[i], err, extra, meta)

    def columns(self):
        """Long-form columns: one entry per grid cell, C order."""
        grids = np.meshgrid(*[ax.values for ax in self.axes], indexing="ij")
        cols = {ax.label: g.ravel() for ax, g in zip(self.axes, grids)}
        for key, col in self.extra.items():
            cols[key] = col.ravel()
        cols[self.observable] = self.data.ravel()
        if self.stderr is not None:
            cols[f"{self.observable}_stderr"] = self.stderr.ravel()
        return cols


def _bath(params, bath):
    return NuclearBath.from_params(params) if bath is None else bath


def _noise(bath, shots, seed):
    if bath.is_silent:
        z = np.zeros(1)
        return (z, z, z), 1
    return sample_batch(bath, shots, seed), int(shots)


def _meta(params, seed, shots, **more):
    meta = {"params": params.as_dict(), "seed": int(seed), "shots": int(shots)}
    meta.update(more)
    return meta


# --------------------------------------------------------------------------
# spectroscopy and Rabi


def _time_averaged(h, psi0, observable):
    """Infinite-time average of ``<psi(t)|O|psi(t)>`` under constant ``h``.

    Coherences between distinct eigenvalues average out; degenerate blocks
    are kept whole.
    """
    w, v = np.linalg.eigh(h)
    scale = max(1.0, float(np.max(np.abs(w))))
    groups = []
    start = 0
    for k in range(1, len(w) + 1):
        if k == len(w) or w[k] - w[k - 1] > 1e-12 * scale:
            groups.append(slice(start, k))
            start = k
    total = 0.0
    for g in groups:
        vg = v[:, g]
        proj_psi = vg @ (np.conj(vg.T) @ psi0)
        total += float(np.real(np.vdot(proj_psi, observable @ proj_psi)))
    return total


_ANTIPARALLEL = np.diag([0.0, 1.0, 1.0, 0.0]).astype(complex)


def edsr_spectrum(B0_values, params=DeviceParams(), delta_B_T=None):
    """Time-averaged antiparallel probability vs external field under c.w. drive.

    Both spins see the drive.  Exchange is left out, so the two lines sit at
    the single-spin resonances: the left one at ``resonance_field(f_ac, g)``
    and the right one shifted by ``delta_Ez / (|g| mu_B)``.  ``delta_B_T``
    programs a fixed field offset between the dots instead of the gradient
    model.
    """
    B0_values = np.asarray(B0_values, dtype=float).reshape(-1)
    p = params.replace(drive_right=True)
    if delta_B_T is not None:
        p = p.replace(delta_override=None, a_T=float(delta_B_T), b_T_per_eV=0.0)
    psi0 = core.make_special_state("T_PLUS").amplitudes
    out = np.empty(B0_values.size)
    for i, B in enumerate(B0_values):
        h = build_stage_hamiltonian("B", p.eps_B_ueV, p, drive_on=True, exchange=False, B0=B)
        out[i] = _time_averaged(h, psi0, _ANTIPARALLEL)
    dEz = float(delta_ez(p.eps_B_ueV, p))
    B_left = resonance_field(p.f_ac_GHz, p.g)
    meta = _meta(
        p,
        0,
        1,
        resonance_left_T=B_left,
        resonance_right_T=B_left + dEz / (abs(p.g) * MU_B),
    )
    return SweepResult("P_antiparallel", [Axis("B0", "T", B0_values)], out, metadata=meta)


def rabi_scan(taus, params=DeviceParams(), bath=None, shots=DEFAULT_SHOTS, seed=0, exchange=False, policy="T_PLUS"):
    """Noise-averaged antiparallel probability vs drive time (ns)."""
    taus = np.asarray(taus, dtype=float).reshape(-1)
    if np.any(taus < 0):
        raise ValueError("drive times must be >= 0")
    bath = _bath(params, bath)
    noise, used = _noise(bath, shots, seed)
    vals = 0.0
    err2 = 0.0
    for psi0, w in initial_states(policy):
        states = rabi_final_states(params, taus, psi0, noise, exchange=exchange)
        m, e = mean_and_stderr(antiparallel_probability(states), axis=0)
        vals = vals + w * m
        err2 = err2 + (w * e) ** 2
    meta = _meta(params, seed, used, policy=InitPolicy(policy).value)
    return SweepResult("P_antiparallel", [Axis("tau_EDSR", "ns", taus)], vals, np.sqrt(err2), metadata=meta)


# --------------------------------------------------------------------------
# two-qubit gate


def default_tau_grid(J0, dEz=0.0, n=200, periods=4):
    """``n`` points from 0 to ``periods * tau_NOP``."""
    return np.linspace(0.0, periods * 2 * swap_time(J0, dEz), n)


def gate_state(params, tau_ex, eps_C, mode=Mode.IDEAL, init="T_PLUS", noise=None):
    """Output state of one cycle without noise averaging (amplitudes)."""
    psi0 = core.make_special_state(init) if isinstance(init, str) else init
    if noise is None:
        noise = (np.zeros(1),) * 3
    return gate_final_states(params, [tau_ex], eps_C, psi0, noise, mode)[0, 0]


def ps_map(
    taus,
    eps_list,
    params=DeviceParams(),
    delta_override=None,
    bath=None,
    shots=DEFAULT_SHOTS,
    seed=0,
    mode=Mode.IDEAL,
    policy=InitPolicy.MIX_50_50,
    random_phase=False,
):
    """Singlet return probability over (stage-C detuning, exchange time).

    Rows follow ``eps_list``; the extra column ``J0_ueV`` labels each row by
    its exchange energy.  ``delta_override`` (ratio dEz/J0) replaces the
    gradient model when given.
    """
    taus = np.asarray(taus, dtype=float).reshape(-1)
    eps_arr = np.asarray(eps_list, dtype=float).reshape(-1)
    if np.any(eps_arr <= 0):
        raise ValueError("stage-C detunings must be > 0 ueV")
    if np.any(taus < 0):
        raise ValueError("exchange times must be >= 0")
    p = params if delta_override is None else params.replace(delta_override=float(delta_override))
    bath = _bath(p, bath)
    noise, used = _noise(bath, shots, seed)
    data = np.zeros((eps_arr.size, taus.size))
    err = np.zeros_like(data)
    for i, eps in enumerate(eps_arr):
        err2 = 0.0
        for psi0, w in initial_states(policy):
            states = gate_final_states(p, taus, eps, psi0, noise, mode, random_phase=random_phase)
            m, e = mean_and_stderr(singlet_probability(states), axis=0)
            data[i] += w * m
            err2 = err2 + (w * e) ** 2
        err[i] = np.sqrt(err2)
    j0 = exchange_energy(eps_arr, p.t_ueV)
    meta = _meta(p, seed, used, mode=Mode(mode).value, policy=InitPolicy(policy).value)
    return SweepResult(
        "P_S",
        [Axis("eps", "ueV", eps_arr), Axis("tau_ex", "ns", taus)],
        data,
        err,
        extra={"J0_ueV": np.asarray(j0)[:, None]},
        metadata=meta,
    )


# --------------------------------------------------------------------------
# period extraction


def _parabolic_peak(mag, k):
    a, b, c = np.log(mag[k - 1 : k + 2] + 1e-300)
    denom = a - 2 * b + c
    if denom == 0:
        return float(k)
    return k + 0.5 * (a - c) / denom


def dominant_frequency(times, values, pad=64):
    """Dominant oscillation frequency (1/time unit) of a uniformly sampled trace.

    Hann-windowed, zero-padded DFT with a log-parabolic refinement of the
    peak bin.  Frequencies below one cycle per record are ignored.
    """
    times = np.asarray(times, dtype=float)
    x = np.asarray(values, dtype=float)
    n = x.size
    if n < 8 or times.size != n:
        raise ExtractionError("trace too short for spectral estimation")
    dt = np.diff(times)
    if np.any(dt <= 0) or np.ptp(dt) > 1e-6 * dt.mean():
        raise ExtractionError("trace must be uniformly sampled in increasing order")
    dt = dt.mean()
    if np.ptp(x) < 1e-12 * max(1.0, np.max(np.abs(x))):
        raise ExtractionError("flat trace has no oscillation")
    win = np.hanning(n)
    xw = (x - np.sum(win * x) / np.sum(win)) * win
    nfft = 1 << int(math.ceil(math.log2(n * pad)))
    mag = np.abs(np.fft.rfft(xw, nfft))
    freqs = np.fft.rfftfreq(nfft, dt)
    span = dt * (n - 1)
    usable = freqs >= 1.0 / span
    usable[-1] = False
    if not np.any(usable[1:]):
        raise ExtractionError("no usable frequency bins")
    k = int(np.argmax(np.where(usable, mag, -np.inf)))
    if k <= 0 or mag[k] <= 1e-9 * np.sum(np.abs(xw)):
        raise ExtractionError("no significant spectral peak")
    return _parabolic_peak(mag, k) * (freqs[1] - freqs[0])


def extract_swap_time(trace, values=None):
    """Half the dominant oscillation period of a P_S(tau_ex) trace (ns).

    Takes a 1-D :class:`SweepResult` or ``(times, values)``.
    """
    if isinstance(trace, SweepResult):
        if trace.data.ndim != 1:
            raise ValueError("extract_swap_time needs a 1-D trace")
        times, vals = trace.axes[0].values, trace.data
    else:
        times, vals = trace, values
    return 1.0 / (2.0 * dominant_frequency(times, vals))


def window_contrast(times, values, period, start=0.0):
    """Oscillation amplitude fitted in consecutive windows one period long.

    Each window is fitted with ``c0 + c1 cos + c2 sin`` at frequency
    ``1/period``; the peak-to-peak contrast ``2 sqrt(c1^2 + c2^2)`` is
    returned per complete window, with the window centers.
    """
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    w = 2 * np.pi / period
    centers, contrast = [], []
    lo = start
    while lo + period <= times[-1] + 1e-9 * period:
        sel = (times >= lo - 1e-12) & (times < lo + period - 1e-12)
        t = times[sel]
        if t.size >= 4:
            A = np.column_stack([np.ones_like(t), np.cos(w * t), np.sin(w * t)])
            coef, *_ = np.linalg.lstsq(A, values[sel], rcond=None)
            centers.append(lo + period / 2)
            contrast.append(2 * math.hypot(coef[1], coef[2]))
        lo += period
    return np.array(centers), np.array(contrast)


# --------------------------------------------------------------------------
# concurrence


def concurrence_map(taus, J0_values, Delta=0.74):
    """Closed-form concurrence over (J0, tau_ex); rows follow ``J0_values``."""
    taus = np.asarray(taus, dtype=float).reshape(-1)
    J0 = np.asarray(J0_values, dtype=float).reshape(-1)
    if np.any(J0 <= 0):
        raise ValueError("J0 values must be > 0")
    if np.any(taus < 0):
        raise ValueError("exchange times must be >= 0")
    alpha = J0[:, None] * taus[None, :] / (2 * core.HBAR)
    data = concurrence_analytic(Delta, alpha)
    meta = {"Delta": float(Delta)}
    return SweepResult(
        "C",
        [Axis("J0", "ueV", J0), Axis("tau_ex", "ns", taus)],
        np.atleast_2d(data),
        extra={"tau_SWAP_ns": H_PLANCK / (2 * J0[:, None] * math.sqrt(1 + Delta**2))},
        metadata=meta,
    )


def swap_time_vs_tunnel(t_values, eps=27.70, params=DeviceParams()):
    """Model ``tau_SWAP`` (ns) at fixed detuning for a list of tunnel couplings (ueV).

    Only the two couplings 0.98 and 1.13 ueV are quoted for the device, so
    the list is supplied by the caller.
    """
    t_values = np.asarray(t_values, dtype=float).reshape(-1)
    if t_values.size == 0 or np.any(t_values <= 0):
        raise ValueError("tunnel couplings must be > 0 ueV")
    out = np.empty(t_values.size)
    for i, t in enumerate(t_values):
        p = params.replace(t_ueV=float(t))
        out[i] = swap_time(exchange_energy(eps, t), float(delta_ez(eps, p)))
    return SweepResult(
        "tau_SWAP",
        [Axis("t", "ueV", t_values)],
        out,
        metadata=_meta(params, 0, 1, eps_ueV=float(eps)),
    )
