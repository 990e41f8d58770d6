"""``espinsim`` command line.

Every subcommand writes ``<name>.csv`` (data, long form), ``<name>.json``
(metadata and headline numbers) and, with ``--svg``, ``<name>.svg`` into the
output directory.  Failures print one line to stderr::

    espinsim: error: <ErrorType>: <message>

and exit nonzero.
"""

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import io
from .config import ConfigError, RunConfig, parse_config
from .core import make_special_state
from .device import (
    delta_ez,
    exchange_energy,
    rabi_from_power,
    resonance_field,
    swap_time,
)
from .experiments import (
    concurrence_map,
    default_tau_grid,
    edsr_spectrum,
    gate_state,
    ps_map,
    rabi_scan,
)
from .fitting import fit_swap_rate, swap_rate_model
from .measure import concurrence_pure, singlet_probability
from .noise import NuclearBath
from .pulses import InitPolicy, Mode

GATE_EPS = (27.70, 55.40, 83.10, 138.50)


class CliError(RuntimeError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(f"usage: {message}")


def _floats(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _common(p):
    p.add_argument("--config", help="path to config file (key = value, units in key suffixes); default: built-in operating point")
    p.add_argument("--seed", type=int, help="RNG seed for nuclear noise, dimensionless integer >= 0")
    p.add_argument("--shots", type=int, help="Monte Carlo shots per grid cell, count >= 1")
    p.add_argument("--out", help="output directory path (default from config, else ./out)")
    p.add_argument("--mode", choices=("ideal", "pulsed"), help="gate execution mode, no unit: ideal = instantaneous rotations, pulsed = finite-duration drive")
    p.add_argument("--svg", action="store_true", help="also write an SVG plot (switch, no unit)")


def build_parser():
    parser = _Parser(prog="espinsim", description="Two-spin double-dot gate simulator.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("edsr", help="c.w. EDSR spectrum vs external field")
    _common(p)
    p.add_argument("--b-min-T", type=float, help="lowest external field, T")
    p.add_argument("--b-max-T", type=float, help="highest external field, T")
    p.add_argument("--n-b", type=int, default=601, help="number of field points, count")
    p.add_argument("--delta-b-mT", type=float, help="fixed field offset between the dots, mT (overrides a + b*eps)")

    p = sub.add_parser("rabi", help="Rabi oscillation of the left spin vs drive time")
    _common(p)
    p.add_argument("--tau-max-ns", type=float, help="longest drive time, ns (default 3 Rabi periods)")
    p.add_argument("--n-tau", type=int, default=200, help="number of drive times, count")
    p.add_argument("--power-mW", type=float, help="microwave power, mW (with --kappa sets f_Rabi)")
    p.add_argument("--kappa", type=float, help="Rabi coefficient, MHz per sqrt(mW)")
    p.add_argument("--no-noise", action="store_true", help="switch off nuclear noise (switch, no unit)")

    p = sub.add_parser("gate", help="single two-qubit gate cycle")
    _common(p)
    p.add_argument("--tau-ex", type=float, required=True, help="exchange time, ns")
    p.add_argument("--eps", type=float, default=GATE_EPS[0], help="stage-C detuning, ueV")
    p.add_argument("--delta", type=float, help="ratio dEz/J0, dimensionless (overrides the gradient model)")
    p.add_argument("--noise", action="store_true", help="average over nuclear noise (switch, no unit; default noise off)")

    p = sub.add_parser("psmap", help="singlet probability map over detuning and exchange time")
    _common(p)
    p.add_argument("--eps", type=_floats, default=list(GATE_EPS), help="stage-C detunings, ueV, comma separated")
    p.add_argument("--tau-max-ns", type=float, help="longest exchange time, ns (default 4 tau_NOP of the slowest row)")
    p.add_argument("--n-tau", type=int, default=200, help="number of exchange times, count")
    p.add_argument("--delta", type=float, help="ratio dEz/J0, dimensionless (overrides the gradient model)")
    p.add_argument("--no-noise", action="store_true", help="switch off nuclear noise (switch, no unit)")
    p.add_argument("--random-phase", action="store_true", help="random drive phase for the closing pi/2 pulse (switch, no unit)")

    p = sub.add_parser("swapfit", help="fit a, b, t to 1/tau_SWAP vs detuning")
    _common(p)
    p.add_argument("--data", help="path to CSV with columns eps_ueV (ueV), inv_tau_per_ns (1/ns)")
    p.add_argument("--synthetic", action="store_true", help="fit synthetic data from the configured a, b, t (switch, no unit)")
    p.add_argument("--rel-noise", type=float, default=0.01, help="multiplicative noise of synthetic data, dimensionless fraction")
    p.add_argument("--g-fit", type=float, default=-0.4, help="g-factor of the fit model, dimensionless")

    p = sub.add_parser("cmap", help="concurrence map over exchange energy and time")
    _common(p)
    p.add_argument("--delta", type=float, default=0.74, help="ratio dEz/J0, dimensionless")
    p.add_argument("--j0-min-ueV", type=float, help="smallest exchange energy, ueV")
    p.add_argument("--j0-max-ueV", type=float, help="largest exchange energy, ueV")
    p.add_argument("--n-j0", type=int, default=60, help="number of exchange energies, count")
    p.add_argument("--tau-max-ns", type=float, default=200.0, help="longest exchange time, ns")
    p.add_argument("--n-tau", type=int, default=201, help="number of exchange times, count")
    return parser


def _resolve(args):
    cfg = parse_config(args.config) if args.config else RunConfig()
    seed = cfg.seed if args.seed is None else args.seed
    shots = cfg.shots if args.shots is None else args.shots
    if shots < 1:
        raise CliError("--shots must be >= 1")
    if seed < 0:
        raise CliError("--seed must be >= 0")
    mode = cfg.mode if args.mode is None else Mode(args.mode.upper())
    out = Path(args.out or cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return cfg, seed, shots, mode, out


def _header(cmd, cfg, seed, shots):
    return [f"espinsim {cmd}", f"seed={seed} shots={shots}", f"params={cfg.device.as_dict()}"]


def _emit(out, name, columns, meta, comment):
    io.write_csv(out / f"{name}.csv", columns, comment)
    io.write_json(out / f"{name}.json", meta)


def _meta(cmd, cfg, seed, shots, mode, **more):
    meta = {
        "command": cmd,
        "version": io.version_string(),
        "seed": seed,
        "shots": shots,
        "mode": mode.value,
        "params": cfg.device.as_dict(),
        "config": cfg.snapshot(),
    }
    meta.update(more)
    return meta


def cmd_edsr(args, cfg, seed, shots, mode, out):
    p = cfg.device
    dB = None if args.delta_b_mT is None else args.delta_b_mT * 1e-3
    B_res = resonance_field(p.f_ac_GHz, p.g)
    lo = B_res - 0.03 if args.b_min_T is None else args.b_min_T
    hi = B_res + 0.03 if args.b_max_T is None else args.b_max_T
    if not hi > lo or args.n_b < 2:
        raise CliError("need b-max-T > b-min-T and n-b >= 2")
    res = edsr_spectrum(np.linspace(lo, hi, args.n_b), p, delta_B_T=dB)
    meta = _meta("edsr", cfg, seed, 1, mode, **{k: v for k, v in res.metadata.items() if k not in ("params", "seed", "shots")})
    _emit(out, "edsr", res.columns(), meta, _header("edsr", cfg, seed, 1))
    if args.svg:
        io.line_svg(out / "edsr.svg", res.axes[0].values, {"P_antiparallel": res.data}, "B0 (T)", "P antiparallel", "c.w. EDSR")


def cmd_rabi(args, cfg, seed, shots, mode, out):
    p = cfg.device
    if args.power_mW is not None or args.kappa is not None:
        if args.power_mW is None or args.kappa is None:
            raise CliError("--power-mW and --kappa go together")
        p = p.replace(f_rabi_MHz=rabi_from_power(args.power_mW, args.kappa))
    if p.f_rabi_MHz <= 0 and args.tau_max_ns is None:
        raise CliError("f_Rabi is zero; pass --tau-max-ns")
    tmax = args.tau_max_ns if args.tau_max_ns is not None else 3.0 / (p.f_rabi_MHz * 1e-3)
    bath = NuclearBath() if args.no_noise else NuclearBath.from_params(p)
    res = rabi_scan(np.linspace(0.0, tmax, args.n_tau), p, bath=bath, shots=shots, seed=seed)
    used = res.metadata["shots"]
    meta = _meta("rabi", cfg, seed, used, mode, f_rabi_MHz=p.f_rabi_MHz, period_ns=1e3 / p.f_rabi_MHz if p.f_rabi_MHz else None)
    _emit(out, "rabi", res.columns(), meta, _header("rabi", cfg, seed, used))
    if args.svg:
        io.line_svg(out / "rabi.svg", res.axes[0].values, {"P_antiparallel": res.data}, "tau_EDSR (ns)", "P antiparallel", "Rabi")


def _device_with_delta(cfg, delta):
    d = cfg.delta if delta is None else delta
    return cfg.device if d is None else cfg.device.replace(delta_override=d)


def cmd_gate(args, cfg, seed, shots, mode, out):
    p = _device_with_delta(cfg, args.delta)
    if args.tau_ex < 0 or args.eps <= 0:
        raise CliError("need tau-ex >= 0 and eps > 0")
    J0 = exchange_energy(args.eps, p.t_ueV)
    bath = NuclearBath.from_params(p) if args.noise else NuclearBath()
    res = ps_map([args.tau_ex], [args.eps], p, bath=bath, shots=shots, seed=seed, mode=mode, policy=cfg.init)
    states = {}
    for label in ("T_PLUS", "T_MINUS"):
        psi = gate_state(p, args.tau_ex, args.eps, mode, label)
        states[label] = {
            "amplitudes": [complex(a) for a in psi],
            "P_S": singlet_probability(psi),
            "C": concurrence_pure(psi),
        }
    used = res.metadata["shots"]
    dez = float(delta_ez(args.eps, p))
    meta = _meta(
        "gate", cfg, seed, used, mode,
        tau_ex_ns=args.tau_ex,
        eps_ueV=args.eps,
        J0_ueV=J0,
        deltaEz_ueV=dez,
        tau_SWAP_ns=swap_time(J0, dez),
        init=cfg.init.value,
        P_S=float(res.data[0, 0]),
        P_S_stderr=float(res.stderr[0, 0]),
        states=states,
    )
    cols = res.columns()
    cols["C_T_PLUS"] = np.array([states["T_PLUS"]["C"]])
    _emit(out, "gate", cols, meta, _header("gate", cfg, seed, used))


def cmd_psmap(args, cfg, seed, shots, mode, out):
    p = _device_with_delta(cfg, args.delta)
    eps = np.asarray(args.eps, dtype=float)
    if eps.size == 0 or np.any(eps <= 0):
        raise CliError("--eps needs positive detunings")
    if args.tau_max_ns is None:
        slow = float(np.max(eps))
        J = exchange_energy(slow, p.t_ueV)
        taus = default_tau_grid(J, float(delta_ez(slow, p)), n=args.n_tau)
    else:
        taus = np.linspace(0.0, args.tau_max_ns, args.n_tau)
    bath = NuclearBath() if args.no_noise else NuclearBath.from_params(p)
    res = ps_map(taus, eps, p, bath=bath, shots=shots, seed=seed, mode=mode, policy=cfg.init, random_phase=args.random_phase)
    used = res.metadata["shots"]
    meta = _meta("psmap", cfg, seed, used, mode, eps_ueV=eps, J0_ueV=res.extra["J0_ueV"][:, 0], init=cfg.init.value)
    _emit(out, "psmap", res.columns(), meta, _header("psmap", cfg, seed, used))
    if args.svg:
        series = {f"eps={e:g} ueV": res.data[i] + 0.5 * i for i, e in enumerate(eps)}
        io.line_svg(out / "psmap.svg", taus, series, "tau_ex (ns)", "P_S (offset per row)", "singlet return")


def cmd_swapfit(args, cfg, seed, shots, mode, out):
    p = cfg.device
    if args.data and args.synthetic:
        raise CliError("use either --data or --synthetic")
    if args.data:
        cols = io.read_csv(args.data)
        try:
            eps, y = cols["eps_ueV"], cols["inv_tau_per_ns"]
        except KeyError as exc:
            raise CliError(f"data file lacks column {exc.args[0]}") from None
    elif args.synthetic:
        eps = np.linspace(20.0, 150.0, 12)
        rng = np.random.default_rng(seed)
        y = swap_rate_model(eps, p.a_T, p.b_T_per_eV, p.t_ueV, args.g_fit)
        y = y * (1.0 + args.rel_noise * rng.standard_normal(eps.size))
    else:
        raise CliError("swapfit needs --data or --synthetic")
    res = fit_swap_rate(np.column_stack([eps, y]), initial_guess=(p.a_T, p.b_T_per_eV, p.t_ueV), g=args.g_fit)
    cols = {"eps_ueV": eps, "inv_tau_per_ns": y, "fit_inv_tau_per_ns": res.predict(eps)}
    meta = _meta("swapfit", cfg, seed, 1, mode, fit=res.as_dict())
    _emit(out, "swapfit", cols, meta, _header("swapfit", cfg, seed, 1))
    if args.svg:
        order = np.argsort(eps)
        io.line_svg(
            out / "swapfit.svg", eps[order],
            {"data": y[order], "fit": res.predict(eps[order])},
            "eps (ueV)", "1/tau_SWAP (1/ns)", "swap rate",
        )


def cmd_cmap(args, cfg, seed, shots, mode, out):
    p = cfg.device
    jmin = args.j0_min_ueV if args.j0_min_ueV is not None else exchange_energy(GATE_EPS[-1], p.t_ueV)
    jmax = args.j0_max_ueV if args.j0_max_ueV is not None else exchange_energy(GATE_EPS[0], p.t_ueV)
    if not (0 < jmin < jmax) or args.n_j0 < 2 or args.n_tau < 2:
        raise CliError("need 0 < j0-min < j0-max and at least 2 grid points per axis")
    J0 = np.linspace(jmin, jmax, args.n_j0)
    taus = np.linspace(0.0, args.tau_max_ns, args.n_tau)
    res = concurrence_map(taus, J0, args.delta)
    meta = _meta("cmap", cfg, seed, 1, mode, Delta=args.delta, C_max=float(res.data.max()))
    _emit(out, "cmap", res.columns(), meta, _header("cmap", cfg, seed, 1))
    if args.svg:
        io.heatmap_svg(out / "cmap.svg", taus, J0, res.data, "tau_ex (ns)", "J0 (ueV)", f"concurrence, Delta={args.delta:g}")


COMMANDS = {
    "edsr": cmd_edsr,
    "rabi": cmd_rabi,
    "gate": cmd_gate,
    "psmap": cmd_psmap,
    "swapfit": cmd_swapfit,
    "cmap": cmd_cmap,
}


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        cfg, seed, shots, mode, out = _resolve(args)
        COMMANDS[args.command](args, cfg, seed, shots, mode, out)
    except SystemExit as exc:
        # --help exits through argparse
        return exc.code if isinstance(exc.code, int) else 0
    except Exception as exc:  # noqa: BLE001 - single-line report for every failure
        msg = " ".join(str(exc).split())
        print(f"espinsim: error: {type(exc).__name__}: {msg}", file=sys.stderr)
        return 2 if isinstance(exc, (ConfigError, CliError)) else 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
