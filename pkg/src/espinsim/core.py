"""Two-spin (4-dimensional) quantum mechanics.

Basis order is fixed to ``|uu>, |ud>, |du>, |dd>`` with the left spin written
first.  Spin operators follow the ``S = sigma / 2`` convention, so the
singlet/triplet gap of ``J * (S_L . S_R)`` is exactly ``J``.

Energies are in micro-eV and times in ns throughout the package.
"""

import math

import numpy as np

H_PLANCK = 4.1356675  # ueV ns
# exact 2*pi relation keeps tau_SWAP = h/(2 J0) and J0 tau/hbar = pi consistent
HBAR = H_PLANCK / (2 * math.pi)

BASIS_LABELS = ("UU", "UD", "DU", "DD")
SPECIAL_LABELS = ("T_PLUS", "T_MINUS", "T_ZERO", "SINGLET")

_NORM_TOL = 1e-12
_HERM_TOL = 1e-12
PHASE_EQ_TOL = 1e-10

_SX = np.array([[0, 1], [1, 0]], dtype=complex) / 2
_SY = np.array([[0, -1j], [1j, 0]], dtype=complex) / 2
_SZ = np.array([[1, 0], [0, -1]], dtype=complex) / 2
_I2 = np.eye(2, dtype=complex)

SX_L = np.kron(_SX, _I2)
SY_L = np.kron(_SY, _I2)
SZ_L = np.kron(_SZ, _I2)
SX_R = np.kron(_I2, _SX)
SY_R = np.kron(_I2, _SY)
SZ_R = np.kron(_I2, _SZ)
S_DOT_S = SX_L @ SX_R + SY_L @ SY_R + SZ_L @ SZ_R
SZ_TOTAL = SZ_L + SZ_R


class TwoSpinState:
    """Normalized pure state of two spin-1/2 particles.

    Equality is global-phase invariant: two states compare equal when their
    fidelity exceeds ``1 - 1e-10``.
    """

    __slots__ = ("amplitudes",)

    def __init__(self, amplitudes):
        amps = np.array(amplitudes, dtype=complex).reshape(-1)
        if amps.shape != (4,):
            raise ValueError(f"expected 4 amplitudes, got {amps.size}")
        if not np.all(np.isfinite(amps)):
            raise ValueError("amplitudes must be finite")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > _NORM_TOL:
            raise ValueError(f"state is not normalized (norm = {norm!r})")
        self.amplitudes = amps

    @classmethod
    def normalized(cls, amplitudes):
        """Build a state from unnormalized amplitudes."""
        amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
        norm = np.linalg.norm(amps)
        if norm == 0:
            raise ValueError("cannot normalize the zero vector")
        return cls(amps / norm)

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.amplitudes.copy()
        return self.amplitudes.astype(dtype)

    def __repr__(self):
        parts = ", ".join(f"{a:.6g}" for a in self.amplitudes)
        return f"TwoSpinState([{parts}])"

    def __eq__(self, other):
        if not isinstance(other, TwoSpinState):
            return NotImplemented
        return fidelity(self, other) >= 1.0 - PHASE_EQ_TOL

    __hash__ = None

    def overlap(self, other):
        """Inner product ``<self|other>``."""
        return complex(np.vdot(self.amplitudes, other.amplitudes))


def _renormalize(vec):
    # Unitary maps preserve the norm up to rounding; snap it back so the
    # 1e-12 invariant holds after arbitrarily long chains of operations.
    return TwoSpinState(vec / np.linalg.norm(vec))


def make_basis_state(label):
    """Computational basis state ``UU``, ``UD``, ``DU`` or ``DD``."""
    try:
        idx = BASIS_LABELS.index(label)
    except ValueError:
        raise ValueError(f"invalid basis label {label!r}; expected one of {BASIS_LABELS}") from None
    amps = np.zeros(4, dtype=complex)
    amps[idx] = 1.0
    return TwoSpinState(amps)


def make_special_state(label):
    """Triplet or singlet state of the (1,1) configuration.

    The singlet carries the overall sign ``(|du> - |ud>) / sqrt(2)``.  A
    global sign is unobservable on its own, but it fixes the relative sign
    of ``S`` when output states are written as ``a T+ + b T- + c S``; with it
    the SWAP output of T+ reads ``(T+ + T- - sqrt(2) i S) / 2``.
    """
    r = 1 / np.sqrt(2)
    table = {
        "T_PLUS": (1, 0, 0, 0),
        "T_MINUS": (0, 0, 0, 1),
        "T_ZERO": (0, r, r, 0),
        "SINGLET": (0, -r, r, 0),
    }
    if label not in table:
        raise ValueError(f"invalid state label {label!r}; expected one of {SPECIAL_LABELS}")
    return TwoSpinState(table[label])


def rx(theta):
    """Single-spin x rotation ``cos(theta/2) I - i sin(theta/2) sigma_x``."""
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)


def rxy(theta, phase=0.0):
    """Rotation by ``theta`` about the equatorial axis at azimuth ``phase``."""
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array(
        [[c, -1j * s * np.exp(-1j * phase)], [-1j * s * np.exp(1j * phase), c]],
        dtype=complex,
    )


def left_operator(op2):
    return np.kron(op2, _I2)


def right_operator(op2):
    return np.kron(_I2, op2)


def rotate_left(state, theta):
    """Apply ``Rx(theta)`` to the left spin only."""
    if not np.isfinite(theta):
        raise ValueError("theta must be finite")
    return _renormalize(left_operator(rx(theta)) @ state.amplitudes)


def rotate_right(state, theta):
    """Apply ``Rx(theta)`` to the right spin only."""
    if not np.isfinite(theta):
        raise ValueError("theta must be finite")
    return _renormalize(right_operator(rx(theta)) @ state.amplitudes)


def check_hamiltonian(h):
    """Validate a 4x4 Hermitian matrix and return it as a complex array."""
    h = np.asarray(h, dtype=complex)
    if h.shape[-2:] != (4, 4):
        raise ValueError(f"Hamiltonian must be 4x4, got shape {h.shape}")
    if not np.all(np.isfinite(h)):
        raise ValueError("Hamiltonian has non-finite entries")
    err = np.max(np.abs(h - np.conj(np.swapaxes(h, -1, -2))))
    scale = max(1.0, float(np.max(np.abs(h))))
    if err > _HERM_TOL * scale:
        raise ValueError(f"Hamiltonian is not Hermitian (max deviation {err:.3g})")
    return h


def propagators(h, times):
    """Stacked ``exp(-i H t / hbar)`` for every time in ``times``.

    ``h`` may carry leading batch dimensions ``(..., 4, 4)``; the result has
    shape ``(..., len(times), 4, 4)``.  Uses the Hermitian eigendecomposition,
    so there is no step-size error.
    """
    h = check_hamiltonian(h)
    times = np.atleast_1d(np.asarray(times, dtype=float))
    if np.any(times < 0):
        raise ValueError("durations must be non-negative")
    h = (h + np.conj(np.swapaxes(h, -1, -2))) / 2
    w, v = np.linalg.eigh(h)
    # phases: (..., T, 4)
    phases = np.exp(-1j * w[..., None, :] * times[:, None] / HBAR)
    v_ = v[..., None, :, :]
    return (v_ * phases[..., None, :]) @ np.conj(np.swapaxes(v_, -1, -2))


def evolve(state, h, duration):
    """Propagate ``state`` under the time-independent Hamiltonian ``h``."""
    if duration < 0:
        raise ValueError("duration must be non-negative")
    u = propagators(h, [duration])[0]
    return _renormalize(u @ state.amplitudes)


def fidelity(a, b):
    """Overlap probability ``|<a|b>|^2`` clipped to [0, 1]."""
    va = a.amplitudes if isinstance(a, TwoSpinState) else np.asarray(a, dtype=complex)
    vb = b.amplitudes if isinstance(b, TwoSpinState) else np.asarray(b, dtype=complex)
    return float(min(1.0, abs(np.vdot(va, vb)) ** 2))
