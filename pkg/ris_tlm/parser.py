"""
TOML configuration parsing.

Every section and key is optional. Unknown keys, wrong types and empty
ranges are reported as ConfigError with the file path and line number.

:copyright: (c) 2025 by the ris-tlm contributors.
:license: MPL-2.0, see LICENSE for more details.
"""

import logging
import math
import re
from pathlib import Path
from typing import Any, Callable

import toml

from .config import (
    CellConfig,
    ModelConfig,
    OutputConfig,
    RunConfig,
    ScenarioConfig,
    SweepConfig,
    ValidationConfig,
    VaractorConfig,
)
from .constants import Boresight, Polarization, RcsObliquity
from .errors import ConfigError, RisModelError

_LOG = logging.getLogger(__name__)


def _number(value: Any) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValueError(f"expected a number, got {value!r}")
    return float(value)


def _integer(value: Any) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValueError(f"expected an integer, got {value!r}")
    return value


def _boolean(value: Any) -> bool:
    if not isinstance(value, bool):
        raise ValueError(f"expected true or false, got {value!r}")
    return value


def _string(value: Any) -> str:
    if not isinstance(value, str):
        raise ValueError(f"expected a string, got {value!r}")
    return value


def _degrees(value: Any) -> float:
    return math.radians(_number(value))


def _vector(size: int, item: Callable = _number) -> Callable[[Any], tuple]:
    def convert(value: Any) -> tuple:
        if not isinstance(value, list) or len(value) != size:
            raise ValueError(f"expected a list of {size} values, got {value!r}")
        return tuple(item(v) for v in value)

    return convert


def _list_of(item: Callable) -> Callable[[Any], list]:
    def convert(value: Any) -> list:
        if not isinstance(value, list):
            raise ValueError(f"expected a list, got {value!r}")
        return [item(v) for v in value]

    return convert


def _complex(value: Any) -> complex:
    """A real number or a [re, im] pair."""
    if isinstance(value, list):
        re_part, im_part = _vector(2)(value)
        return complex(re_part, im_part)
    return complex(_number(value))


def _choice(enum_type) -> Callable[[Any], Any]:
    def convert(value: Any):
        try:
            return enum_type(_string(value))
        except ValueError:
            allowed = ", ".join(e.value for e in enum_type)
            raise ValueError(f"expected one of {allowed}, got {value!r}") from None

    return convert


def _ground_correction(value: Any) -> bool | None:
    if value == "auto":
        return None
    if isinstance(value, bool):
        return value
    raise ValueError(f"expected \"auto\", true or false, got {value!r}")


# section -> config attribute, dataclass, {toml key: (field name, converter)}
_SCHEMA: dict[str, tuple[str, type, dict[str, tuple[str, Callable]]]] = {
    "scenario": (
        "scenario",
        ScenarioConfig,
        {
            "tx_pos_m": ("tx_pos", _vector(3)),
            "rx_pos_m": ("rx_pos", _vector(3)),
            "rows": ("rows", _integer),
            "columns": ("columns", _integer),
            "f_hz": ("f_hz", _number),
            "pol": ("pol", _choice(Polarization)),
            "tx_power_w": ("tx_power_w", _number),
        },
    ),
    "cell": (
        "cell",
        CellConfig,
        {
            "period_x_m": ("period_x_m", _number),
            "period_y_m": ("period_y_m", _number),
            "gap_x_m": ("gap_x_m", _number),
            "gap_y_m": ("gap_y_m", _number),
            "thickness_m": ("thickness_m", _number),
            "eps_r": ("eps_r", _complex),
            "sigma_c": ("sigma_c", _number),
        },
    ),
    "varactor": (
        "varactor",
        VaractorConfig,
        {
            "r_var_ohm": ("r_var_ohm", _number),
            "c_min_f": ("c_min_f", _number),
            "c_max_f": ("c_max_f", _number),
        },
    ),
    "model": (
        "model",
        ModelConfig,
        {
            "strict_skin_depth": ("strict_skin_depth", _boolean),
            "strict_gain_integral": ("strict_gain_integral", _boolean),
            "te_factor_exponent": ("te_factor_exponent", _integer),
            "ground_correction": ("ground_correction", _ground_correction),
            "l_var_h": ("l_var_h", _number),
            "q_t": ("q_t", _number),
            "q_r": ("q_r", _number),
            "boresight": ("boresight", _choice(Boresight)),
            "rcs_obliquity": ("rcs_obliquity", _choice(RcsObliquity)),
        },
    ),
    "sweep": (
        "sweep",
        SweepConfig,
        {
            "f_start_hz": ("f_start_hz", _number),
            "f_stop_hz": ("f_stop_hz", _number),
            "f_count": ("f_count", _integer),
            "theta_deg": ("theta", _list_of(_degrees)),
            "polarizations": ("polarizations", _list_of(_choice(Polarization))),
            "c_var_f": ("c_var_f", _list_of(_number)),
            "lookup_theta_start_deg": ("lookup_theta_start", _degrees),
            "lookup_theta_stop_deg": ("lookup_theta_stop", _degrees),
            "lookup_theta_count": ("lookup_theta_count", _integer),
            "lookup_c_count": ("lookup_c_count", _integer),
        },
    ),
    "output": (
        "output",
        OutputConfig,
        {
            "directory": ("directory", _string),
            "plane_x_m": ("plane_x_m", _vector(2)),
            "plane_z_m": ("plane_z_m", _vector(2)),
            "plane_y_m": ("plane_y_m", _number),
            "samples": ("samples", _vector(2, _integer)),
        },
    ),
    "validation": (
        "validation",
        ValidationConfig,
        {
            "plate_angle_deg": ("plate_angle", _degrees),
            "pattern_distance_m": ("pattern_distance_m", _number),
            "far_field_factor": ("far_field_factor", _number),
            "lobe_floor_db": ("lobe_floor_db", _number),
            "pattern_tolerance_db": ("pattern_tolerance_db", _number),
            "power_tolerance": ("power_tolerance", _number),
            "pattern_step_deg": ("pattern_step", _degrees),
        },
    ),
}


def _line_of(text: str, section: str, key: str | None = None) -> int:
    """1-based line of a section header or of a key inside it; 0 if not found."""
    lines = text.splitlines()
    header = re.compile(rf"^\s*\[\s*{re.escape(section)}\s*\]")
    start = next((i for i, line in enumerate(lines) if header.match(line)), None)
    if start is None:
        return 0
    if key is None:
        return start + 1
    key_re = re.compile(rf"^\s*\"?{re.escape(key)}\"?\s*=")
    for i in range(start + 1, len(lines)):
        if re.match(r"^\s*\[", lines[i]):
            break
        if key_re.match(lines[i]):
            return i + 1
    return start + 1


def parse_config(text: str, source: str = "<string>") -> RunConfig:
    """Parse configuration text into a validated RunConfig."""

    def fail(message: str, section: str | None = None, key: str | None = None):
        line = _line_of(text, section, key) if section else 0
        location = f"{source}:{line}" if line else source
        raise ConfigError(f"{location}: {message}")

    try:
        data = toml.loads(text)
    except toml.TomlDecodeError as err:
        raise ConfigError(f"{source}:{err.lineno}: {err.msg}") from err

    config = RunConfig(source=source)
    for section, values in data.items():
        if section not in _SCHEMA:
            fail(f"unknown section [{section}]", section)
        if not isinstance(values, dict):
            fail(f"[{section}] must be a table", section)
        attr, _, keys = _SCHEMA[section]
        target = getattr(config, attr)
        for key, value in values.items():
            if key not in keys:
                fail(f"unknown key '{key}' in [{section}]", section, key)
            name, convert = keys[key]
            try:
                setattr(target, name, convert(value))
            except ValueError as err:
                fail(f"[{section}] {key}: {err}", section, key)

    _check_ranges(config, fail)

    try:
        config.link_scenario()
        config.field_plane()
    except RisModelError as err:
        fail(str(err))
    _LOG.debug("Loaded configuration from %s", source)
    return config


def _check_ranges(config: RunConfig, fail: Callable) -> None:
    sweep = config.sweep
    varactor = config.varactor
    if sweep.f_count < 1:
        fail("f_count must be >= 1", "sweep", "f_count")
    if not 0 < sweep.f_start_hz <= sweep.f_stop_hz:
        fail("frequency sweep must satisfy 0 < f_start_hz <= f_stop_hz", "sweep", "f_start_hz")
    if not sweep.theta:
        fail("theta_deg must not be empty", "sweep", "theta_deg")
    if any(not 0 <= t < math.pi / 2 for t in sweep.theta):
        fail("theta_deg values must lie in [0, 90)", "sweep", "theta_deg")
    if not sweep.polarizations:
        fail("polarizations must not be empty", "sweep", "polarizations")
    if sweep.lookup_theta_count < 1 or sweep.lookup_c_count < 1:
        fail("lookup grid counts must be >= 1", "sweep", "lookup_theta_count")
    if not 0 <= sweep.lookup_theta_start <= sweep.lookup_theta_stop < math.pi / 2:
        fail("lookup angles must satisfy 0 <= start <= stop < 90", "sweep", "lookup_theta_start_deg")
    if sweep.lookup_theta_count > 1 and sweep.lookup_theta_start == sweep.lookup_theta_stop:
        fail("lookup angle range is empty for more than one sample", "sweep", "lookup_theta_count")
    if sweep.lookup_c_count > 1 and varactor.c_min_f == varactor.c_max_f:
        fail("capacitance range is empty for more than one sample", "sweep", "lookup_c_count")
    if any(not varactor.c_min_f <= c <= varactor.c_max_f for c in sweep.c_var_f):
        fail(
            f"c_var_f values must lie in [c_min_f, c_max_f] = [{varactor.c_min_f:g}, {varactor.c_max_f:g}] F",
            "sweep",
            "c_var_f",
        )
    if config.output.samples[0] < 1 or config.output.samples[1] < 1:
        fail("samples must be >= 1", "output", "samples")
    if min(config.output.plane_z_m) <= 0:
        fail("plane_z_m must lie in z > 0", "output", "plane_z_m")
    val = config.validation
    if val.pattern_step <= 0:
        fail("pattern_step_deg must be > 0", "validation", "pattern_step_deg")
    if val.pattern_distance_m <= 0 or val.far_field_factor <= 0:
        fail("validation distances must be > 0", "validation", "pattern_distance_m")


def load_config(path: str | Path | None) -> RunConfig:
    """Load a configuration file; None yields the reference defaults."""
    if path is None:
        return RunConfig()
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as err:
        raise ConfigError(f"{path}: cannot read configuration ({err.strerror})") from err
    return parse_config(text, str(path))
