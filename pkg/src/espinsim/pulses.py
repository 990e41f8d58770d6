"""Stage schedules for the Rabi cycle and the two-qubit gate cycle.

A cycle is a list of stages between two stage-A boundaries.  Stage A does no
unitary work: it is where the blockade initializes the triplet and where the
state is projected at readout.  Stage B hosts the single-spin rotations
(detuning far from the charge transition, exchange small).  Stage C sits
near the transition and holds the exchange for ``tau_ex``.

Two execution modes exist.  ``IDEAL`` applies stage-B rotations as
instantaneous unitaries; ``PULSED`` integrates the driven stage-B Hamiltonian
for the pulse duration ``theta / (2 pi f_Rabi)``.
"""

import dataclasses
import enum
import math
from typing import Optional

import numpy as np

from . import core
from .core import TwoSpinState, make_special_state
from .device import H_PLANCK, build_stage_hamiltonian
from .noise import NO_NOISE


class Mode(str, enum.Enum):
    IDEAL = "IDEAL"
    PULSED = "PULSED"


class InitPolicy(str, enum.Enum):
    T_PLUS = "T_PLUS"
    T_MINUS = "T_MINUS"
    MIX_50_50 = "MIX_50_50"


@dataclasses.dataclass(frozen=True)
class Rotation:
    spin: str  # "L" or "R"
    theta: float

    def __post_init__(self):
        if self.spin not in ("L", "R"):
            raise ValueError(f"rotation spin must be 'L' or 'R', got {self.spin!r}")


@dataclasses.dataclass(frozen=True)
class Stage:
    kind: str
    eps: float  # ueV
    duration: float = 0.0  # ns
    drive_on: bool = False
    target_rotation: Optional[Rotation] = None
    drive_phase: float = 0.0
    exchange: bool = True
    # take the drive phase from the per-shot noise sample instead
    random_phase: bool = False

    def __post_init__(self):
        if self.kind not in ("A", "B", "C"):
            raise ValueError(f"unknown stage kind {self.kind!r}")
        if self.duration < 0:
            raise ValueError("stage duration must be >= 0")
        if self.kind == "A" and self.drive_on:
            raise ValueError("stage A cannot carry a drive")
        if self.target_rotation is not None and self.kind != "B":
            raise ValueError("rotations are only allowed in stage B")


@dataclasses.dataclass(frozen=True)
class PulseSequence:
    stages: tuple
    params: object
    mode: Mode = Mode.IDEAL
    initial_state_policy: InitPolicy = InitPolicy.T_PLUS

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        object.__setattr__(self, "initial_state_policy", InitPolicy(self.initial_state_policy))
        object.__setattr__(self, "stages", tuple(self.stages))
        if self.stages and (self.stages[0].kind != "A" or self.stages[-1].kind != "A"):
            raise ValueError("a sequence must begin and end on a stage-A boundary")

    @property
    def total_duration(self):
        return sum(st.duration for st in self.stages)


@dataclasses.dataclass
class Trajectory:
    samples: list  # [(time_ns, TwoSpinState)]
    final_state: TwoSpinState

    @property
    def times(self):
        return np.array([t for t, _ in self.samples])


def _pulse_duration(theta, params):
    if params.f_rabi_MHz <= 0:
        raise ValueError("PULSED mode needs f_rabi_MHz > 0")
    return theta / (2 * math.pi * params.f_rabi_MHz * 1e-3)


def _rotation_stage(params, theta, mode, phase=0.0, random_phase=False):
    dur = _pulse_duration(theta, params) if mode == Mode.PULSED else 0.0
    return Stage(
        "B",
        params.eps_B_ueV,
        duration=dur,
        drive_on=True,
        target_rotation=Rotation("L", theta),
        drive_phase=phase,
        random_phase=random_phase,
    )


def two_qubit_sequence(
    params,
    tau_ex,
    eps_C,
    mode=Mode.IDEAL,
    policy=InitPolicy.T_PLUS,
    second_phase=0.0,
    random_phase=False,
):
    """init -> L(3pi/2) -> exchange for ``tau_ex`` at ``eps_C`` -> L(pi/2) -> readout.

    ``second_phase`` sets the drive phase of the closing pulse (radians);
    ``random_phase`` draws it per shot instead.
    """
    if tau_ex < 0:
        raise ValueError("tau_ex must be >= 0")
    if not eps_C > 0:
        raise ValueError(f"stage-C detuning must be > 0 ueV, got {eps_C}")
    mode = Mode(mode)
    stages = [
        Stage("A", 0.0),
        _rotation_stage(params, 3 * math.pi / 2, mode),
        Stage("C", eps_C, duration=tau_ex),
        _rotation_stage(params, math.pi / 2, mode, second_phase, random_phase),
        Stage("A", 0.0),
    ]
    return PulseSequence(stages, params, mode, policy)


def rabi_sequence(params, tau_EDSR, mode=Mode.PULSED, policy=InitPolicy.T_PLUS, exchange=False):
    """init -> drive the left spin for ``tau_EDSR`` ns at stage B -> readout.

    Exchange during the drive is left out by default: it is negligible at
    the stage-B detuning of the Rabi cycle.
    """
    if tau_EDSR < 0:
        raise ValueError("tau_EDSR must be >= 0")
    theta = 2 * math.pi * params.f_rabi_MHz * 1e-3 * tau_EDSR
    drive = Stage(
        "B",
        params.eps_B_ueV,
        duration=tau_EDSR,
        drive_on=True,
        target_rotation=Rotation("L", theta),
        exchange=exchange,
    )
    return PulseSequence([Stage("A", 0.0), drive, Stage("A", 0.0)], params, mode, policy)


def initial_states(policy):
    """Weighted initial triplets for a policy."""
    policy = InitPolicy(policy)
    tp, tm = make_special_state("T_PLUS"), make_special_state("T_MINUS")
    if policy == InitPolicy.T_PLUS:
        return [(tp, 1.0)]
    if policy == InitPolicy.T_MINUS:
        return [(tm, 1.0)]
    return [(tp, 0.5), (tm, 0.5)]


def _stage_phase(stage, noise_sample):
    return noise_sample.phase if stage.random_phase else stage.drive_phase


def _ideal_rotation(stage, noise_sample):
    rot = stage.target_rotation
    op = core.rxy(rot.theta, _stage_phase(stage, noise_sample))
    return core.left_operator(op) if rot.spin == "L" else core.right_operator(op)


def execute(seq, initial, noise_sample=NO_NOISE):
    """Run every stage of ``seq`` on ``initial`` and record the boundaries."""
    params = seq.params
    state = initial
    t = 0.0
    samples = [(t, state)]
    for stage in seq.stages:
        if stage.kind == "A":
            pass
        elif stage.kind == "B" and seq.mode == Mode.IDEAL:
            if stage.target_rotation is not None:
                vec = _ideal_rotation(stage, noise_sample) @ state.amplitudes
                state = TwoSpinState(vec / np.linalg.norm(vec))
        else:
            h = build_stage_hamiltonian(
                stage.kind,
                stage.eps,
                params,
                noise_sample=noise_sample,
                drive_on=stage.drive_on,
                drive_phase=_stage_phase(stage, noise_sample),
                exchange=stage.exchange,
            )
            state = core.evolve(state, h, stage.duration)
        if seq.mode == Mode.PULSED or stage.kind == "C":
            t += stage.duration
        samples.append((t, state))
    return Trajectory(samples, state)


# Batched kernels used by the sweeps.  They reproduce ``execute`` for a whole
# (shots x times) block at once; tests cross-check them against ``execute``.


def _batch_hamiltonians(kind, eps, params, dfL, dfR, drive_on=False, phase=None, exchange=True):
    """Stack of stage Hamiltonians, one per shot, shape (S, 4, 4)."""
    h0 = build_stage_hamiltonian(kind, eps, params, drive_on=False, exchange=exchange)
    dfL = np.asarray(dfL, dtype=float)
    dfR = np.asarray(dfR, dtype=float)
    h = (
        h0[None]
        + H_PLANCK * 1e-3 * dfL[:, None, None] * core.SZ_L[None]
        + H_PLANCK * 1e-3 * dfR[:, None, None] * core.SZ_R[None]
    )
    if drive_on:
        phase = np.zeros_like(dfL) if phase is None else np.broadcast_to(phase, dfL.shape)
        c, s = np.cos(phase)[:, None, None], np.sin(phase)[:, None, None]
        amp = H_PLANCK * params.f_rabi_MHz * 1e-3
        h = h + amp * (c * core.SX_L + s * core.SY_L)
        if params.drive_right:
            f_R = params.f_rabi_MHz if params.f_rabi_R_MHz is None else params.f_rabi_R_MHz
            h = h + H_PLANCK * f_R * 1e-3 * (c * core.SX_R + s * core.SY_R)
    return h


def evolve_batch(h, psi, times):
    """States ``exp(-i H_s t / hbar) psi_s`` for all shots s and times t.

    ``h``: (S, 4, 4); ``psi``: (S, 4); returns (S, T, 4).
    """
    core.check_hamiltonian(h)
    h = (h + np.conj(np.swapaxes(h, -1, -2))) / 2
    w, v = np.linalg.eigh(h)
    coeff = np.einsum("sji,sj->si", np.conj(v), psi)
    times = np.atleast_1d(np.asarray(times, dtype=float))
    ph = np.exp(-1j * w[:, None, :] * times[None, :, None] / core.HBAR)
    return np.einsum("sij,stj->sti", v, ph * coeff[:, None, :])


def _unitary_batch(h, duration):
    w, v = np.linalg.eigh((h + np.conj(np.swapaxes(h, -1, -2))) / 2)
    ph = np.exp(-1j * w * duration / core.HBAR)
    return np.einsum("sij,sj,skj->sik", v, ph, np.conj(v))


def gate_final_states(params, taus, eps_C, psi0, noise, mode=Mode.IDEAL, second_phase=0.0, random_phase=False):
    """Output states of the two-qubit cycle, shape (S, T, 4).

    ``noise`` is the ``(df_L, df_R, phase)`` triple from ``sample_batch``.
    """
    mode = Mode(mode)
    dfL, dfR, phases = (np.atleast_1d(np.asarray(x, dtype=float)) for x in noise)
    S = dfL.size
    psi0 = np.asarray(psi0.amplitudes if isinstance(psi0, TwoSpinState) else psi0, dtype=complex)
    ph2 = phases if random_phase else np.full(S, float(second_phase))
    if mode == Mode.IDEAL:
        u1 = core.left_operator(core.rx(3 * math.pi / 2))
        psi_a = np.broadcast_to(u1 @ psi0, (S, 4))
        hC = _batch_hamiltonians("C", eps_C, params, dfL, dfR)
        psi_c = evolve_batch(hC, psi_a, taus)
        u2 = np.stack([core.left_operator(core.rxy(math.pi / 2, p)) for p in ph2])
    else:
        hB1 = _batch_hamiltonians("B", params.eps_B_ueV, params, dfL, dfR, drive_on=True)
        u1 = _unitary_batch(hB1, _pulse_duration(3 * math.pi / 2, params))
        psi_a = np.einsum("sij,j->si", u1, psi0)
        hC = _batch_hamiltonians("C", eps_C, params, dfL, dfR)
        psi_c = evolve_batch(hC, psi_a, taus)
        hB2 = _batch_hamiltonians("B", params.eps_B_ueV, params, dfL, dfR, drive_on=True, phase=ph2)
        u2 = _unitary_batch(hB2, _pulse_duration(math.pi / 2, params))
    return np.einsum("sij,stj->sti", u2, psi_c)


def rabi_final_states(params, taus, psi0, noise, exchange=False):
    """Output states of the Rabi cycle for every drive time, shape (S, T, 4)."""
    dfL, dfR, _ = (np.atleast_1d(np.asarray(x, dtype=float)) for x in noise)
    psi0 = np.asarray(psi0.amplitudes if isinstance(psi0, TwoSpinState) else psi0, dtype=complex)
    h = _batch_hamiltonians("B", params.eps_B_ueV, params, dfL, dfR, drive_on=True, exchange=exchange)
    return evolve_batch(h, np.broadcast_to(psi0, (dfL.size, 4)), taus)

