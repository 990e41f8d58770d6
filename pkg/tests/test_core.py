import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from espinsim import core
from espinsim.core import TwoSpinState


def random_state(rng):
    v = rng.normal(size=4) + 1j * rng.normal(size=4)
    return TwoSpinState(v / np.linalg.norm(v))


def random_hermitian(rng, scale=1.0):
    a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    return scale * (a + a.conj().T) / 2


def test_basis_states_are_orthonormal():
    vecs = np.array([core.make_basis_state(l).amplitudes for l in core.BASIS_LABELS])
    assert np.allclose(vecs @ vecs.conj().T, np.eye(4))


def test_special_states():
    s = core.make_special_state("SINGLET").amplitudes
    t0 = core.make_special_state("T_ZERO").amplitudes
    # (|ud> - |du>)/sqrt(2) up to a global sign
    assert core.make_special_state("SINGLET") == TwoSpinState(np.array([0, 1, -1, 0]) / math.sqrt(2))
    assert np.allclose(s, [0, -1 / math.sqrt(2), 1 / math.sqrt(2), 0])
    assert abs(np.vdot(s, t0)) < 1e-15
    # singlet is the S_L.S_R eigenvector with eigenvalue -3/4
    assert np.allclose(core.S_DOT_S @ s, -0.75 * s)
    assert np.allclose(core.S_DOT_S @ t0, 0.25 * t0)


def test_unknown_labels():
    with pytest.raises(ValueError):
        core.make_basis_state("ud")
    with pytest.raises(ValueError):
        core.make_special_state("BELL")


@pytest.mark.parametrize("bad", [np.zeros(3), np.array([1, 1, 0, 0]), np.array([np.nan, 0, 0, 0])])
def test_state_validation(bad):
    with pytest.raises(ValueError):
        TwoSpinState(bad)


def test_normalized_and_equality_up_to_phase():
    a = TwoSpinState.normalized([1, 1j, 0, 0])
    b = TwoSpinState(np.exp(0.7j) * a.amplitudes)
    assert a == b
    assert a != core.make_basis_state("UU")
    with pytest.raises(ValueError):
        TwoSpinState.normalized(np.zeros(4))


def test_rotations():
    assert np.allclose(core.rx(math.pi), -1j * np.array([[0, 1], [1, 0]]))
    assert np.allclose(core.rxy(1.1, 0.0), core.rx(1.1))
    # phase pi/2 is a y rotation
    ry = core.rxy(math.pi / 2, math.pi / 2)
    up = ry @ np.array([1, 0])
    assert np.allclose(np.abs(up) ** 2, [0.5, 0.5])
    assert np.allclose(up.imag, 0)
    flipped = core.rotate_left(core.make_basis_state("UU"), math.pi)
    assert flipped == core.make_basis_state("DU")
    flipped = core.rotate_right(core.make_basis_state("UU"), math.pi)
    assert flipped == core.make_basis_state("UD")


def test_check_hamiltonian():
    with pytest.raises(ValueError):
        core.check_hamiltonian(np.array([[0, 1], [0, 0]], dtype=complex))
    with pytest.raises(ValueError):
        core.check_hamiltonian(np.full((4, 4), np.nan))
    core.check_hamiltonian(core.S_DOT_S)


def test_propagators_match_matrix_exponential():
    scipy_linalg = pytest.importorskip("scipy.linalg")
    rng = np.random.default_rng(3)
    h = random_hermitian(rng)
    times = np.array([0.0, 0.3, 2.5])
    u = core.propagators(h, times)
    for k, t in enumerate(times):
        assert np.allclose(u[k], scipy_linalg.expm(-1j * h * t / core.HBAR), atol=1e-12)


def test_exchange_precession_period():
    # singlet-triplet splitting J0 -> S <-> T0 beat with period h / J0
    J0 = 0.3
    ud = core.make_basis_state("UD")
    back = core.evolve(ud, J0 * core.S_DOT_S, core.H_PLANCK / J0)
    assert core.fidelity(back, ud) > 1 - 1e-12
    half = core.evolve(ud, J0 * core.S_DOT_S, core.H_PLANCK / (2 * J0))
    assert core.fidelity(half, core.make_basis_state("DU")) > 1 - 1e-12


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), t=st.floats(0, 1e3))
def test_evolution_is_unitary(seed, t):
    rng = np.random.default_rng(seed)
    psi = random_state(rng)
    out = core.evolve(psi, random_hermitian(rng), t)
    assert abs(np.linalg.norm(out.amplitudes) - 1) < 1e-12


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), t1=st.floats(0, 50), t2=st.floats(0, 50))
def test_propagator_composition(seed, t1, t2):
    rng = np.random.default_rng(seed)
    h = random_hermitian(rng, 0.1)
    u = core.propagators(h, [t1, t2, t1 + t2])
    assert np.allclose(u[1] @ u[0], u[2], atol=1e-10)


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_fidelity_bounds_and_symmetry(seed):
    rng = np.random.default_rng(seed)
    a, b = random_state(rng), random_state(rng)
    f = core.fidelity(a, b)
    assert 0 <= f <= 1
    assert f == pytest.approx(core.fidelity(b, a), abs=1e-15)
    assert core.fidelity(a, a) == pytest.approx(1, abs=1e-14)
