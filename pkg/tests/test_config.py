import pytest

from espinsim.config import ConfigError, RunConfig, parse_config, parse_text
from espinsim.device import DeviceParams
from espinsim.pulses import InitPolicy, Mode

BASE = "g = -0.394\nt_ueV = 0.98\nf_rabi_MHz = 1.2\nsigma_MHz = 0.275\n"


def test_operating_point(tmp_path):
    path = tmp_path / "op.cfg"
    path.write_text("[device]\n" + BASE + "# comment\n\n[run]\nseed = 7  # trailing\nmode = pulsed\n")
    cfg = parse_config(path)
    assert cfg.device == DeviceParams()
    assert cfg.seed == 7 and cfg.mode == Mode.PULSED
    assert cfg.init == InitPolicy.MIX_50_50
    assert cfg.source == str(path)


def test_empty_lists_all_required_keys():
    with pytest.raises(ConfigError) as info:
        parse_text("")
    for key in ("g", "t_ueV", "f_rabi_MHz", "sigma_MHz"):
        assert key in str(info.value)


@pytest.mark.parametrize(
    "line, fragment",
    [
        ("sigma_MHz = -1", "out of range"),
        ("t = 0.98", "unknown key 't'"),
        ("t_ueV 0.98", "malformed"),
        ("shots = 2.5", "bad value"),
        ("mode = fast", "bad value"),
        ("g = -0.394", "duplicate"),
    ],
)
def test_errors_name_the_problem(line, fragment):
    text = BASE.replace("sigma_MHz = 0.275\n", "") if line.startswith("sigma") else BASE
    with pytest.raises(ConfigError) as info:
        parse_text(text + line + "\n")
    assert fragment in str(info.value)


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError, match="not found"):
        parse_config(tmp_path / "none.cfg")


def test_separate_spreads_and_delta():
    text = BASE.replace("sigma_MHz = 0.275\n", "sigma_L_MHz = 0.3\nsigma_R_MHz = 0.2\n") + "delta = 0.74\ninit = T_PLUS\n"
    cfg = parse_text(text)
    assert (cfg.device.sigma_L_MHz, cfg.device.sigma_R_MHz) == (0.3, 0.2)
    assert cfg.delta == 0.74 and cfg.init == InitPolicy.T_PLUS


def test_snapshot_is_plain():
    snap = RunConfig().snapshot()
    assert snap["mode"] == "IDEAL" and snap["device"]["t_ueV"] == 0.98
