import json
import logging
from unittest.mock import patch

import numpy as np
import pytest

from ris_tlm import const, driver, main
from ris_tlm.constants import GammaSource, SynthesisMode
from ris_tlm.driver import ValidationCheck, ValidationReport
from ris_tlm.errors import SingularityError
from ris_tlm.parser import parse_config
from ris_tlm.writers import read_matrix

SMALL = """
[scenario]
rows = 4
columns = 4

[sweep]
f_start_hz = 6e9
f_stop_hz = 10e9
f_count = 21
theta_deg = [0.0, 30.0]
c_var_f = [0.1e-12, 0.5e-12]
lookup_theta_count = 5
lookup_c_count = 4
polarizations = ["TE"]

[output]
samples = [5, 3]
"""


@pytest.fixture
def config():
    return parse_config(SMALL, "small.toml")


def _lines(path):
    return path.read_text(encoding="utf-8").splitlines()


def test_cell_response_files(config, tmp_path):
    files = driver.cmd_cell_response(config, tmp_path)
    assert [f.name for f in files] == ["cell_response.csv", "surface_impedance.csv", "resonances.csv"]

    response = _lines(tmp_path / "cell_response.csv")
    assert response[0] == const.HEADER_CELL_RESPONSE
    # 2 angles x 1 polarization x 2 capacitances x 21 frequencies
    assert len(response) == 1 + 84
    assert response[1].startswith("6.00000000e+09,0.00000000e+00,TE,1.00000000e-13,")

    impedance = _lines(tmp_path / "surface_impedance.csv")
    assert impedance[0] == const.HEADER_SURFACE_IMPEDANCE
    assert len(impedance) == len(response)

    resonances = _lines(tmp_path / "resonances.csv")
    assert resonances[0] == const.HEADER_RESONANCE
    assert any(",TE,1.00000000e-13," in line for line in resonances[1:])


def test_cell_response_is_deterministic(config, tmp_path):
    first = driver.cmd_cell_response(config, tmp_path / "a")
    second = driver.cmd_cell_response(config, tmp_path / "b")
    for a, b in zip(first, second):
        assert a.read_bytes() == b.read_bytes()


def test_cell_response_unloaded(tmp_path):
    config = parse_config("[sweep]\nf_count = 11\ntheta_deg = [0.0]\npolarizations = [\"TM\"]\n")
    driver.cmd_cell_response(config, tmp_path)
    rows = _lines(tmp_path / "cell_response.csv")[1:]
    assert len(rows) == 11
    assert all(row.split(",")[3] == "none" for row in rows)


def test_lookup_files(config, tmp_path):
    tables = driver.cmd_lookup(config, tmp_path)
    assert list(tables) == ["TE"]
    table = tables["TE"]
    assert table.gamma.shape == (5, 4)

    flat = _lines(tmp_path / "lookup_te.csv")
    assert flat[0] == const.HEADER_LOOKUP
    assert len(flat) == 1 + 20
    amplitude = _lines(tmp_path / "lookup_te_amplitude_db.csv")
    assert len(amplitude) == 1 + 5
    assert len(amplitude[0].split(",")) == 5
    assert (tmp_path / "lookup_te_phase_deg.csv").exists()


def test_synthesize_both_modes(config, tmp_path):
    maps = driver.cmd_synthesize(config, tmp_path)
    assert set(maps) == set(SynthesisMode)

    normal = maps[SynthesisMode.NORMAL]
    written = read_matrix(tmp_path / "capacitance_normal.csv")
    assert written == pytest.approx(normal.capacitance, rel=1e-8)

    meta = json.loads((tmp_path / "capacitance_oblique.json").read_text(encoding="utf-8"))
    assert meta["scenario_digest"] == config.link_scenario().digest()
    assert meta["mode"] == "oblique"
    assert meta["rows"] == 4
    assert meta["columns"] == 4
    assert meta["f_hz"] == 8e9

    error = read_matrix(tmp_path / "capacitance_error_percent.csv")
    assert error.shape == (4, 4)
    assert np.all(error >= 0)


def test_synthesize_single_mode(config, tmp_path):
    maps = driver.cmd_synthesize(config, tmp_path, SynthesisMode.NORMAL)
    assert list(maps) == [SynthesisMode.NORMAL]
    assert not (tmp_path / "capacitance_error_percent.csv").exists()
    assert not (tmp_path / "capacitance_oblique.csv").exists()


def test_link_sources(config, tmp_path):
    powers = driver.cmd_link(config, tmp_path)
    assert set(powers) == set(GammaSource)
    assert powers[GammaSource.IDEAL] >= powers[GammaSource.NORMAL]
    assert powers[GammaSource.IDEAL] >= powers[GammaSource.OBLIQUE]

    summary = _lines(tmp_path / "link_summary.csv")
    assert summary[0] == const.HEADER_LINK_SUMMARY
    assert [line.split(",")[0] for line in summary[1:]] == ["ideal", "normal", "oblique"]
    field_rows = _lines(tmp_path / "field_map_ideal.csv")
    assert field_rows[0] == "# x_m,z_m,pr_watt,pr_db"
    assert len(field_rows) == 1 + 15


def test_link_with_absorbing_surface(config, tmp_path):
    powers = driver.cmd_link(config, tmp_path, GammaSource.IDEAL, gamma_override=np.zeros((4, 4)))
    assert powers == {GammaSource.IDEAL: 0.0}
    summary = _lines(tmp_path / "link_summary.csv")
    assert summary[1] == "ideal,0.00000000e+00,-inf"


def test_validate_pec_passes(tmp_path, caplog):
    config = parse_config("")
    with caplog.at_level(logging.INFO):
        report = driver.cmd_validate_pec(config, tmp_path)
    assert report.passed, [c for c in report.checks if not c.passed]
    assert "PEC validation PASS" in caplog.text
    lines = _lines(tmp_path / "validation_report.csv")
    assert lines[0] == "# check,value,limit,status"
    assert all(line.endswith(",PASS") for line in lines[1:])


def test_validate_pec_catches_flipped_rcs_sign(tmp_path):
    report = driver.cmd_validate_pec(parse_config(""), tmp_path, rcs_sign=-1.0)
    assert not report.passed
    failed = {check.name for check in report.checks if not check.passed}
    assert "pattern_max_deviation_db" in failed


def test_validation_report():
    report = ValidationReport()
    report.add("a", 0.1, 0.5)
    assert report.passed
    report.add("b", 1.0, 0.5)
    assert not report.passed
    report.add("c", 5.0, 0.0, passed=True)
    assert [c.passed for c in report.checks] == [True, False, True]


def _write(tmp_path, text):
    path = tmp_path / "run.toml"
    path.write_text(text, encoding="utf-8")
    return str(path)


def test_main_success(tmp_path):
    path = _write(tmp_path, SMALL)
    assert main(["cell-response", "--config", path, "--out", str(tmp_path / "out")]) == const.EXIT_OK
    assert (tmp_path / "out" / "cell_response.csv").exists()


def test_main_config_error(tmp_path):
    path = _write(tmp_path, "[scenario]\nrow_count = 3\n")
    assert main(["lookup", "--config", path, "--out", str(tmp_path)]) == const.EXIT_CONFIG_ERROR


def test_main_out_of_range_values_are_config_errors(tmp_path, caplog):
    path = _write(tmp_path, "[sweep]\nf_count = 5\nc_var_f = [1e-12]\n")
    assert main(["cell-response", "--config", path, "--out", str(tmp_path)]) == const.EXIT_CONFIG_ERROR
    assert f"{path}:3:" in caplog.text
    path = _write(tmp_path, "[output]\nplane_z_m = [-0.1, 0.5]\n")
    assert main(["link", "--config", path, "--out", str(tmp_path)]) == const.EXIT_CONFIG_ERROR
    assert f"{path}:2: plane_z_m" in caplog.text


def test_main_numeric_error(tmp_path):
    error = SingularityError("degenerate parallel combination", {"f": 8e9})
    with patch("ris_tlm.driver.cmd_cell_response", side_effect=error):
        code = main(["cell-response", "--out", str(tmp_path)])
    assert code == const.EXIT_NUMERIC_ERROR


def test_main_validation_failure(tmp_path):
    failing = ValidationReport([ValidationCheck("pattern_max_deviation_db", 2.0, 0.5, False)])
    with patch("ris_tlm.driver.cmd_validate_pec", return_value=failing) as cmd:
        code = main(["validate-pec", "--out", str(tmp_path)])
    assert code == const.EXIT_VALIDATION_FAIL
    cmd.assert_called_once()


def test_main_rejects_unknown_mode():
    with pytest.raises(SystemExit):
        main(["synthesize", "--mode", "diagonal"])
