import math
from pathlib import Path

import pytest

from ris_tlm.config import RunConfig
from ris_tlm.constants import Boresight, Polarization
from ris_tlm.errors import ConfigError
from ris_tlm.parser import load_config, parse_config


def test_empty_file_gives_reference_defaults():
    config = parse_config("", "empty.toml")
    assert config.source == "empty.toml"
    assert config.scenario == RunConfig().scenario
    scenario = config.link_scenario()
    assert scenario.shape == (30, 30)
    assert scenario.f == 8e9
    assert scenario.cell.eps_r == complex(4.4, -0.088)
    assert scenario.varactor.l_var == pytest.approx(0.7e-9)


def test_load_config_without_path():
    assert load_config(None).sweep.f_count == 201


def test_load_config_missing_file(tmp_path):
    with pytest.raises(ConfigError, match="cannot read configuration"):
        load_config(tmp_path / "absent.toml")


def test_load_config_from_file(tmp_path):
    path = tmp_path / "run.toml"
    path.write_text("[scenario]\nrows = 4\ncolumns = 5\n", encoding="utf-8")
    config = load_config(path)
    assert config.link_scenario().shape == (4, 5)
    assert config.source == str(path)


def test_degree_keys_are_converted():
    text = """
[sweep]
theta_deg = [0.0, 30.0, 45.0]
lookup_theta_stop_deg = 60.0

[validation]
plate_angle_deg = 20.0
pattern_step_deg = 0.5
"""
    config = parse_config(text)
    assert config.sweep.theta == pytest.approx([0.0, math.pi / 6, math.pi / 4])
    assert config.sweep.lookup_theta_stop == pytest.approx(math.pi / 3)
    assert config.validation.plate_angle == pytest.approx(math.radians(20))
    assert config.validation.pattern_step == pytest.approx(math.radians(0.5))


def test_complex_permittivity_and_choices():
    text = """
[scenario]
pol = "TM"
tx_pos_m = [0.0, -0.3, 0.4]

[cell]
eps_r = [3.0, -0.01]

[model]
boresight = "center"
ground_correction = false
"""
    config = parse_config(text)
    assert config.cell.eps_r == complex(3.0, -0.01)
    assert config.scenario.pol == Polarization.TM
    assert config.scenario.tx_pos == (0.0, -0.3, 0.4)
    assert config.model.boresight == Boresight.CENTER
    assert config.unit_cell().uses_ground_correction is False


def test_real_permittivity():
    assert parse_config("[cell]\neps_r = 2.2\n").cell.eps_r == complex(2.2, 0)


def test_ground_correction_auto():
    config = parse_config('[model]\nground_correction = "auto"\n')
    assert config.model.ground_correction is None
    assert config.unit_cell().uses_ground_correction is True


def test_unknown_key_reports_line():
    text = "[scenario]\nrows = 30\nrow_count = 4\n"
    with pytest.raises(ConfigError, match=r"^run\.toml:3: unknown key 'row_count'"):
        parse_config(text, "run.toml")


def test_unknown_section_reports_line():
    text = "[scenario]\nrows = 30\n\n[antenna]\ngain = 2.0\n"
    with pytest.raises(ConfigError, match=r"^run\.toml:4: unknown section \[antenna\]"):
        parse_config(text, "run.toml")


def test_wrong_type_reports_line():
    with pytest.raises(ConfigError, match=r"^run\.toml:2: \[scenario\] rows: expected an integer"):
        parse_config("[scenario]\nrows = 30.0\n", "run.toml")
    with pytest.raises(ConfigError, match="expected one of TE, TM"):
        parse_config('[scenario]\npol = "XY"\n', "run.toml")
    with pytest.raises(ConfigError, match="expected a list of 3 values"):
        parse_config("[scenario]\ntx_pos_m = [0.0, 0.1]\n", "run.toml")


def test_syntax_error_reports_location():
    with pytest.raises(ConfigError, match=r"^run\.toml:\d+: "):
        parse_config("[scenario]\nrows = 30\nrows = 4\n", "run.toml")


def test_empty_ranges_are_rejected():
    with pytest.raises(ConfigError, match="theta_deg must not be empty"):
        parse_config("[sweep]\ntheta_deg = []\n")
    with pytest.raises(ConfigError, match="f_count"):
        parse_config("[sweep]\nf_count = 0\n")
    with pytest.raises(ConfigError, match="f_start_hz"):
        parse_config("[sweep]\nf_start_hz = 9e9\nf_stop_hz = 8e9\n")
    with pytest.raises(ConfigError, match="lookup angle range is empty"):
        parse_config("[sweep]\nlookup_theta_start_deg = 10.0\nlookup_theta_stop_deg = 10.0\n")
    with pytest.raises(ConfigError, match="capacitance range is empty"):
        parse_config("[varactor]\nc_min_f = 0.3e-12\nc_max_f = 0.3e-12\n")


def test_single_point_ranges_are_allowed():
    text = """
[sweep]
f_start_hz = 8e9
f_stop_hz = 8e9
f_count = 1
lookup_theta_start_deg = 10.0
lookup_theta_stop_deg = 10.0
lookup_theta_count = 1
"""
    config = parse_config(text)
    assert config.sweep.f_count == 1
    assert config.sweep.lookup_theta_count == 1


def test_out_of_range_angles_are_rejected():
    with pytest.raises(ConfigError, match=r"\[0, 90\)"):
        parse_config("[sweep]\ntheta_deg = [0.0, 90.0]\n", "run.toml")


def test_model_range_errors_become_config_errors():
    with pytest.raises(ConfigError, match="gap_x"):
        parse_config("[cell]\ngap_x_m = 6e-3\n", "run.toml")
    with pytest.raises(ConfigError, match="z > 0"):
        parse_config("[scenario]\nrx_pos_m = [0.0, 0.0, -1.0]\n", "run.toml")
    with pytest.raises(ConfigError, match="te_factor_exponent"):
        parse_config("[model]\nte_factor_exponent = 3\n", "run.toml")


def test_reference_scenario_file_matches_defaults():
    path = Path(__file__).resolve().parent.parent / "configs" / "reference_scenario.toml"
    config = load_config(path)
    defaults = RunConfig()
    assert config.link_scenario().digest() == defaults.link_scenario().digest()
    assert config.validation == defaults.validation
    assert config.output == defaults.output
    assert len(config.sweep.c_var_f) == 5


def test_capacitances_outside_tuning_range_are_rejected():
    text = "[sweep]\nf_count = 5\nc_var_f = [0.2e-12, 1e-12]\n"
    with pytest.raises(ConfigError, match=r"^run\.toml:3: c_var_f values must lie in \[c_min_f, c_max_f\]"):
        parse_config(text, "run.toml")
    text = "[varactor]\nc_max_f = 2e-12\n\n[sweep]\nc_var_f = [0.1e-12, 1e-12]\n"
    assert parse_config(text).sweep.c_var_f == [0.1e-12, 1e-12]


def test_field_plane_below_surface_is_rejected():
    text = "[output]\nsamples = [11, 11]\nplane_z_m = [-0.1, 0.5]\n"
    with pytest.raises(ConfigError, match=r"^run\.toml:3: plane_z_m must lie in z > 0"):
        parse_config(text, "run.toml")
    with pytest.raises(ConfigError, match="plane_z_m"):
        parse_config("[output]\nplane_z_m = [0.0, 0.5]\n", "run.toml")
