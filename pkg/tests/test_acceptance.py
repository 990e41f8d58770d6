"""Acceptance criteria, one test per criterion.

Each test prints ``criterion N: PASS|FAIL <detail>``; the lines are also
collected and repeated in the pytest terminal summary.  Run directly with
``python tests/test_acceptance.py`` for the bare list.
"""

import math
import subprocess
import sys
import time
from pathlib import Path

import numpy as np

from espinsim import core
from espinsim.device import DeviceParams, exchange_energy, rabi_from_power, resonance_field, swap_time
from espinsim.device import H_PLANCK, MU_B
from espinsim.experiments import (
    concurrence_map,
    default_tau_grid,
    extract_swap_time,
    ps_map,
    rabi_scan,
    window_contrast,
)
from espinsim.fitting import fit_swap_rate, swap_rate_model
from espinsim.measure import antiparallel_probability, concurrence_analytic, concurrence_pure, singlet_probability
from espinsim.noise import NuclearBath, mean_and_stderr, sample_batch
from espinsim.pulses import Mode, execute, gate_final_states, rabi_final_states, two_qubit_sequence

try:
    from conftest import ACCEPTANCE_LINES
except ImportError:  # pragma: no cover - direct script run outside tests/
    ACCEPTANCE_LINES = []

GATE_EPS = (27.70, 55.40, 83.10, 138.50)
QUIET = NuclearBath()
TP = core.make_special_state("T_PLUS")
TM = core.make_special_state("T_MINUS")
SING = core.make_special_state("SINGLET")


def report(n, ok, detail):
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'} {detail}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, line


def _zero_gradient():
    p = DeviceParams(delta_override=0.0, sigma_L_MHz=0.0, sigma_R_MHz=0.0)
    return p, swap_time(exchange_energy(GATE_EPS[0], p.t_ueV))


def test_criterion_1_nop_identity():
    t0 = time.perf_counter()
    p, ts = _zero_gradient()
    worst = 1.0
    for tau in (0.0, 2 * ts, 4 * ts):
        out = execute(two_qubit_sequence(p, tau, GATE_EPS[0], Mode.IDEAL), TP).final_state
        worst = min(worst, core.fidelity(out, TP))
    dt = time.perf_counter() - t0
    report(1, worst >= 1 - 1e-9 and dt < 1.0, f"min fidelity to T+ = {worst:.15f}, {dt:.3f} s")


def test_criterion_2_swap_output_state():
    p, ts = _zero_gradient()
    out = execute(two_qubit_sequence(p, ts, GATE_EPS[0], Mode.IDEAL), TP).final_state
    target = core.TwoSpinState.normalized(0.5 * (TP.amplitudes + TM.amplitudes - math.sqrt(2) * 1j * SING.amplitudes))
    f = core.fidelity(out, target)
    ps = singlet_probability(out)
    report(2, f >= 1 - 1e-9 and abs(ps - 0.5) <= 1e-9, f"fidelity = {f:.15f}, P_S = {ps:.15f}")


def test_criterion_3_concurrence_oracle():
    t0 = time.perf_counter()
    eps = GATE_EPS[0]
    worst = 0.0
    for delta in np.linspace(0.0, 2.0, 21):
        p = DeviceParams(delta_override=float(delta), sigma_L_MHz=0.0, sigma_R_MHz=0.0)
        J = exchange_energy(eps, p.t_ueV)
        taus = np.linspace(0.0, 4 * swap_time(J, delta * J), 201)
        states = gate_final_states(p, taus, eps, TP, (np.zeros(1),) * 3, Mode.IDEAL)[0]
        c_num = concurrence_pure(states)
        c_ref = concurrence_analytic(delta, J * taus / (2 * core.HBAR))
        worst = max(worst, float(np.max(np.abs(c_num - c_ref))))
    dt = time.perf_counter() - t0
    report(3, worst <= 1e-9 and dt < 10.0, f"max |C_num - C_eq| = {worst:.2e} on 21x201, {dt:.2f} s")


def _independent_eq2_max(delta, n=2_000_001):
    # direct transcription of the closed form, scanned over one period in x = sqrt(1+D^2) alpha
    x = np.linspace(0.0, math.pi, n)
    w = 1.0 + delta * delta
    c = np.abs(np.sin(x)) / w * np.sqrt(w * np.cos(x) ** 2 + delta * delta * np.sin(x) ** 2)
    return float(c.max())


def test_criterion_4_concurrence_extrema():
    J0 = exchange_energy(np.array(GATE_EPS), 0.98)
    ts = swap_time(J0)
    errs_max, errs_zero = [], []
    for k in range(4):
        on = np.array([concurrence_map([ts[i] * (2 * k + 1) / 2], [J0[i]], 0.0).data[0, 0] for i in range(4)])
        off = np.array([concurrence_map([ts[i] * k], [J0[i]], 0.0).data[0, 0] for i in range(4)])
        errs_max.append(np.max(np.abs(on - 0.5)))
        errs_zero.append(np.max(off))
    J = float(J0[0])
    taus = np.linspace(0.0, 2 * swap_time(J, 0.74 * J), 200_001)
    c_map = float(concurrence_map(taus, [J], 0.74).data.max())
    c_ref = _independent_eq2_max(0.74)
    ok = max(errs_max) <= 1e-9 and max(errs_zero) <= 1e-9 and abs(c_map - c_ref) <= 1e-6
    report(
        4,
        ok,
        f"|C-0.5| <= {max(errs_max):.1e} at odd half-swaps, C <= {max(errs_zero):.1e} at k tau_SWAP, "
        f"Delta=0.74 max {c_map:.9f} vs scan {c_ref:.9f}",
    )


def test_criterion_5_ps_periodicity():
    t0 = time.perf_counter()
    p = DeviceParams(delta_override=0.74)
    ratios = []
    for eps in GATE_EPS:
        J = exchange_energy(eps, p.t_ueV)
        dEz = 0.74 * J
        taus = default_tau_grid(J, dEz, n=400)
        row = ps_map(taus, [eps], p, bath=QUIET).data[0]
        ratios.append(extract_swap_time(taus, row) / (H_PLANCK / (2 * math.hypot(J, dEz))))
    dt = time.perf_counter() - t0
    worst = max(abs(r - 1) for r in ratios)
    ok = worst <= 0.01 and dt < 30.0
    report(5, ok, f"extracted/predicted tau_SWAP = {', '.join(f'{r:.4f}' for r in ratios)}, {dt:.2f} s")


def test_criterion_6_rabi_oracle():
    kappa = 0.6
    powers = np.array([0.25, 1.0, 4.0, 9.0])
    f = rabi_from_power(powers, kappa)
    worst = 0.0
    for fr in f:
        p = DeviceParams(f_rabi_MHz=float(fr), sigma_L_MHz=0.0, sigma_R_MHz=0.0)
        taus = np.linspace(0, 3e3 / fr, 601)
        trace = rabi_scan(taus, p, bath=QUIET).data
        worst = max(worst, float(np.max(np.abs(trace - np.sin(math.pi * fr * 1e-3 * taus) ** 2))))
    A = np.column_stack([np.sqrt(powers), np.ones_like(powers)])
    (slope, intercept), *_ = np.linalg.lstsq(A, f, rcond=None)
    resid = float(np.max(np.abs(A @ [slope, intercept] - f)))
    ok = worst <= 1e-9 and abs(intercept) <= 1e-12 and resid <= 1e-12
    report(6, ok, f"max trace error {worst:.1e}; sqrt(P) fit intercept {intercept:.1e}, residual {resid:.1e}")


def test_criterion_7_resonance_field():
    B = resonance_field(11.1, -0.394)
    report(7, 1.95 <= B <= 2.05, f"B_res = {B:.5f} T")


def _contrast_monotone(times, trace, period, n_periods):
    _, c = window_contrast(times, trace, period)
    return c, c.size >= n_periods and bool(np.all(np.diff(c) < 0))


def test_criterion_8_noise_behavior():
    p = DeviceParams(sigma_L_MHz=0.275, sigma_R_MHz=0.275)
    seed, shots = 0, 2000

    period_r = 1e3 / p.f_rabi_MHz
    taus = np.linspace(0, 5 * period_r, 501)
    rabi = rabi_scan(taus, p, shots=shots, seed=seed)
    c_r, ok_r = _contrast_monotone(taus, rabi.data, period_r, 3)

    pz = p.replace(delta_override=0.0)
    eps = GATE_EPS[-1]
    J = exchange_energy(eps, pz.t_ueV)
    period_s = 2 * swap_time(J)
    taus_s = np.linspace(0, 5 * period_s, 501)
    ps = ps_map(taus_s, [eps], pz, shots=shots, seed=seed).data[0]
    c_s, ok_s = _contrast_monotone(taus_s, ps, period_s, 3)

    # detuned Rabi: static offset d0 plus Gaussian left-spin noise
    d0 = 0.5  # MHz
    B0 = resonance_field(p.f_ac_GHz, p.g) + d0 * 1e-3 * H_PLANCK / (abs(p.g) * MU_B)
    pd = p.replace(B0_T=B0)
    tau = 400.0
    noise = sample_batch(NuclearBath.from_params(pd), shots, seed)
    pa = antiparallel_probability(rabi_final_states(pd, [tau], TP, noise)[:, 0])
    mc, se = mean_and_stderr(pa)
    z, w = np.polynomial.hermite_e.hermegauss(80)
    d = d0 + p.sigma_L_MHz * z
    fr = p.f_rabi_MHz
    pdet = fr**2 / (fr**2 + d**2) * np.sin(math.pi * np.sqrt(fr**2 + d**2) * 1e-3 * tau) ** 2
    oracle = float(w @ pdet / w.sum())
    ok_q = abs(mc - oracle) <= 3 * se
    report(
        8,
        ok_r and ok_s and ok_q,
        f"Rabi contrast {np.round(c_r, 3).tolist()}, P_S contrast {np.round(c_s, 3).tolist()}, "
        f"detuned MC {mc:.4f} vs quadrature {oracle:.4f} (3 SE = {3 * se:.4f})",
    )


def test_criterion_9_fit_roundtrip():
    t0 = time.perf_counter()
    truth = (-7.1e-3, -24.4, 0.98)
    eps = np.linspace(20.0, 150.0, 12)
    rng = np.random.default_rng(20)
    y_clean = swap_rate_model(eps, *truth)
    y = y_clean * (1 + 0.01 * rng.standard_normal(eps.size))
    noisy = fit_swap_rate(np.column_stack([eps, y]))
    clean = fit_swap_rate(np.column_stack([eps, y_clean]))
    dt = time.perf_counter() - t0
    rel = [abs(g / w - 1) for g, w in zip((noisy.a, noisy.b, noisy.t), truth)]
    ok = max(rel) <= 0.10 and clean.residual_norm < 1e-10 and dt < 5.0
    report(
        9,
        ok,
        f"relative errors a {rel[0]:.3f}, b {rel[1]:.3f}, t {rel[2]:.3f}; "
        f"noiseless residual {clean.residual_norm:.1e}; {dt:.2f} s",
    )


def test_criterion_10_local_unitary_invariance():
    rng = np.random.default_rng(10)
    worst = 0.0
    for _ in range(1000):
        v = rng.normal(size=4) + 1j * rng.normal(size=4)
        psi = core.TwoSpinState(v / np.linalg.norm(v))
        th_l, th_r = rng.uniform(0, 4 * math.pi, 2)
        out = core.rotate_right(core.rotate_left(psi, th_l), th_r)
        worst = max(worst, abs(concurrence_pure(out) - concurrence_pure(psi)))
    report(10, worst <= 1e-12, f"max concurrence change {worst:.1e} over 1000 triples")


def test_criterion_11_determinism(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("g = -0.394\nt_ueV = 0.98\nf_rabi_MHz = 1.2\nsigma_MHz = 0.275\ndelta = 0.74\n")
    outs = []
    for name in ("a", "b"):
        out = tmp_path / name
        cmd = [sys.executable, "-m", "espinsim", "psmap", "--config", str(cfg), "--seed", "3",
               "--shots", "200", "--n-tau", "60", "--out", str(out)]
        subprocess.run(cmd, check=True, capture_output=True)
        outs.append((out / "psmap.csv").read_bytes())
    report(11, outs[0] == outs[1], f"{len(outs[0])} bytes, identical = {outs[0] == outs[1]}")


if __name__ == "__main__":
    import tempfile

    failed = 0
    tests = [(n, f) for n, f in globals().items() if n.startswith("test_criterion_")]
    for name, fn in sorted(tests, key=lambda nf: int(nf[0].split("_")[2])):
        try:
            if "tmp_path" in fn.__code__.co_varnames[: fn.__code__.co_argcount]:
                with tempfile.TemporaryDirectory() as d:
                    fn(Path(d))
            else:
                fn()
        except AssertionError:
            failed += 1
    sys.exit(1 if failed else 0)
