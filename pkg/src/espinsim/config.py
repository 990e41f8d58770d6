"""Run configuration files.

Flat ``key = value`` lines, ``#`` comments, optional ``[section]`` headers
(sections only group keys; the namespace is flat).  Units are part of the
key names, so ``t = 0.98`` is rejected and ``t_ueV = 0.98`` accepted.

Example::

    [device]
    g = -0.394
    t_ueV = 0.98
    f_rabi_MHz = 1.2
    sigma_MHz = 0.275

    [run]
    seed = 7
    shots = 2000
"""

import dataclasses
from pathlib import Path
from typing import Optional

from .device import DeviceParams
from .pulses import InitPolicy, Mode


class ConfigError(ValueError):
    pass


def _float(v):
    return float(v)


def _bool(v):
    s = v.strip().lower()
    if s in ("1", "true", "yes", "on"):
        return True
    if s in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {v!r}")


def _int(v):
    f = float(v)
    if f != int(f):
        raise ValueError(f"not an integer: {v!r}")
    return int(f)


# key -> (parser, range check or None, description)
_KEYS = {
    "g": (_float, lambda x: x != 0, "must be nonzero"),
    "t_ueV": (_float, lambda x: x > 0, "must be > 0"),
    "a_T": (_float, lambda x: abs(x) <= 0.1, "must satisfy |a_T| <= 0.1"),
    "b_T_per_eV": (_float, lambda x: abs(x) <= 1000, "must satisfy |b_T_per_eV| <= 1000"),
    "f_ac_GHz": (_float, lambda x: x > 0, "must be > 0"),
    "f_rabi_MHz": (_float, lambda x: x >= 0, "must be >= 0"),
    "f_rabi_R_MHz": (_float, lambda x: x >= 0, "must be >= 0"),
    "sigma_MHz": (_float, lambda x: x >= 0, "must be >= 0"),
    "sigma_L_MHz": (_float, lambda x: x >= 0, "must be >= 0"),
    "sigma_R_MHz": (_float, lambda x: x >= 0, "must be >= 0"),
    "B0_T": (_float, None, ""),
    "eps_B_ueV": (_float, lambda x: x > 0, "must be > 0"),
    "drive_right": (_bool, None, ""),
    "delta": (_float, None, ""),
    "seed": (_int, lambda x: 0 <= x < 2**64, "must be in [0, 2^64)"),
    "shots": (_int, lambda x: x >= 1, "must be >= 1"),
    "mode": (lambda v: Mode(v.strip().upper()), None, ""),
    "init": (lambda v: InitPolicy(v.strip().upper()), None, ""),
    "out_dir": (lambda v: v.strip(), None, ""),
}

REQUIRED = ("g", "t_ueV", "f_rabi_MHz", "sigma_MHz")

_DEVICE_KEYS = {
    "g", "t_ueV", "a_T", "b_T_per_eV", "f_ac_GHz", "f_rabi_MHz", "f_rabi_R_MHz",
    "B0_T", "eps_B_ueV", "drive_right",
}


@dataclasses.dataclass(frozen=True)
class RunConfig:
    device: DeviceParams = DeviceParams()
    seed: int = 0
    shots: int = 2000
    mode: Mode = Mode.IDEAL
    init: InitPolicy = InitPolicy.MIX_50_50
    delta: Optional[float] = None
    out_dir: str = "out"
    source: Optional[str] = None

    def snapshot(self):
        d = dataclasses.asdict(self)
        d["mode"] = self.mode.value
        d["init"] = self.init.value
        return d


def parse_text(text, source="<string>"):
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: malformed line, expected 'key = value': {raw.strip()!r}")
        key, _, val = (part.strip() for part in line.partition("="))
        if not key or not val:
            raise ConfigError(f"{source}:{lineno}: malformed line, expected 'key = value': {raw.strip()!r}")
        if key not in _KEYS:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        parser, check, why = _KEYS[key]
        try:
            parsed = parser(val)
        except ValueError:
            raise ConfigError(f"{source}:{lineno}: bad value for {key}: {val!r}") from None
        if check is not None and not check(parsed):
            raise ConfigError(f"{source}:{lineno}: {key} = {val} out of range ({why})")
        values[key] = parsed

    missing = [k for k in REQUIRED if k not in values]
    if "sigma_MHz" in missing and "sigma_L_MHz" in values and "sigma_R_MHz" in values:
        missing.remove("sigma_MHz")
    if missing:
        raise ConfigError(f"{source}: missing required keys: {', '.join(missing)}")

    dev = {k: values[k] for k in _DEVICE_KEYS if k in values}
    sigma = values.get("sigma_MHz")
    dev["sigma_L_MHz"] = values.get("sigma_L_MHz", sigma)
    dev["sigma_R_MHz"] = values.get("sigma_R_MHz", sigma)
    try:
        device = DeviceParams(**dev)
    except ValueError as exc:
        raise ConfigError(f"{source}: {exc}") from None

    run = {k: values[k] for k in ("seed", "shots", "mode", "init", "delta", "out_dir") if k in values}
    return RunConfig(device=device, source=str(source), **run)


def parse_config(path):
    """Read and validate a config file into a :class:`RunConfig`."""
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {p}") from None
    except OSError as exc:
        raise ConfigError(f"cannot read config file {p}: {exc.strerror}") from None
    return parse_text(text, source=str(p))
