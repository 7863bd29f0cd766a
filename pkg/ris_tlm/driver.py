"""
Subcommand implementations.

Each cmd_* function takes a RunConfig and an output directory, writes its
artifacts and returns the computed results for programmatic use.

:copyright: (c) 2025 by the ris-tlm contributors.
:license: MPL-2.0, see LICENSE for more details.
"""

import logging
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import const
from .config import RunConfig
from .constants import GammaSource, SynthesisMode
from .errors import RisModelError
from .link import (
    array_pattern_db,
    field_map,
    pec_closed_form_power,
    plate_pattern_db,
    received_power,
)
from .models import CapacitanceMap, IncidentWave, LookupTable
from .synthesis import (
    build_lookup_table,
    capacitance_error_map,
    ideal_phase_profile,
    synthesize_surface,
)
from .tlm import loaded_surface_impedance, locate_resonance, reflection_coefficient
from .writers import write_matrix, write_result, write_rows

_LOG = logging.getLogger(__name__)


@dataclass
class ValidationCheck:
    name: str
    value: float
    limit: float
    passed: bool


@dataclass
class ValidationReport:
    """Outcome of the PEC oracle comparisons."""

    checks: list[ValidationCheck] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def add(self, name: str, value: float, limit: float, passed: bool | None = None) -> None:
        ok = bool(value <= limit) if passed is None else passed
        self.checks.append(ValidationCheck(name, float(value), float(limit), ok))
        _LOG.info("%-28s %.4g (limit %.4g) %s", name, value, limit, "PASS" if ok else "FAIL")


def _out_dir(config: RunConfig, out: str | Path | None) -> Path:
    path = Path(out) if out is not None else Path(config.output.directory)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _db(power: float, reference: float) -> float:
    with np.errstate(divide="ignore"):
        return float(10 * np.log10(power / reference))


def cmd_cell_response(config: RunConfig, out: str | Path | None = None) -> list[Path]:
    """Frequency sweeps of the unit-cell reflection for every (theta, pol, C_var)."""
    out_dir = _out_dir(config, out)
    sweep = config.sweep
    cell = config.unit_cell()
    options = config.model_options()
    # an empty capacitance list evaluates the unloaded surface
    varactor = config.varactor_model() if sweep.c_var_f else None
    c_values = sweep.c_var_f or [None]
    f_grid = np.linspace(sweep.f_start_hz, sweep.f_stop_hz, sweep.f_count)

    response_rows, impedance_rows, resonance_rows = [], [], []
    for theta in sweep.theta:
        theta_deg = math.degrees(theta)
        for pol in sweep.polarizations:
            wave = IncidentWave(f=f_grid, theta=theta, pol=pol)
            for c_var in c_values:
                c_label = "none" if c_var is None else c_var
                sample = reflection_coefficient(cell, varactor, c_var, wave, options)
                z_surf = np.broadcast_to(loaded_surface_impedance(cell, varactor, c_var, wave, options), f_grid.shape)
                for f, g_db, ph, z in zip(f_grid, sample.amplitude_db, sample.phase_deg, z_surf):
                    response_rows.append((f, theta_deg, str(pol), c_label, g_db, ph))
                    impedance_rows.append((f, theta_deg, str(pol), c_label, z.real, z.imag))
                try:
                    res = locate_resonance(cell, varactor, c_var, f_grid, theta, pol, options)
                except RisModelError as err:
                    _LOG.warning("%s", err)
                    continue
                resonance_rows.append(
                    (theta_deg, str(pol), c_label, res.f_phase_zero, res.f_min_amplitude,
                     20 * math.log10(res.min_amplitude))
                )

    return [
        write_rows(out_dir / "cell_response.csv", const.HEADER_CELL_RESPONSE, response_rows),
        write_rows(out_dir / "surface_impedance.csv", const.HEADER_SURFACE_IMPEDANCE, impedance_rows),
        write_rows(out_dir / "resonances.csv", const.HEADER_RESONANCE, resonance_rows),
    ]


def cmd_lookup(config: RunConfig, out: str | Path | None = None) -> dict[str, LookupTable]:
    """Lookup tables at the scenario frequency, one per configured polarization."""
    out_dir = _out_dir(config, out)
    sweep = config.sweep
    varactor = config.varactor_model()
    theta_grid = np.linspace(sweep.lookup_theta_start, sweep.lookup_theta_stop, sweep.lookup_theta_count)
    c_grid = np.geomspace(varactor.c_min, varactor.c_max, sweep.lookup_c_count)

    tables = {}
    for pol in sweep.polarizations:
        table = build_lookup_table(
            config.unit_cell(), varactor, config.scenario.f_hz, pol, theta_grid, c_grid, config.model_options()
        )
        write_result(table, out_dir, f"lookup_{pol.value.lower()}")
        tables[str(pol)] = table
    return tables


def cmd_synthesize(
    config: RunConfig,
    out: str | Path | None = None,
    mode: SynthesisMode | None = None,
) -> dict[SynthesisMode, CapacitanceMap]:
    """Capacitance maps for one mode, or for both plus their percentage-error map."""
    out_dir = _out_dir(config, out)
    scenario = config.link_scenario()
    modes = [SynthesisMode(mode)] if mode is not None else list(SynthesisMode)

    maps = {}
    for m in modes:
        cap_map = synthesize_surface(scenario, m)
        write_result(cap_map, out_dir, f"capacitance_{m.value}")
        maps[m] = cap_map

    if len(maps) == 2:
        error = capacitance_error_map(maps[SynthesisMode.OBLIQUE], maps[SynthesisMode.NORMAL])
        write_matrix(out_dir / "capacitance_error_percent.csv", error)
        _LOG.info("Capacitance error: max %.3g %%, mean %.3g %%", error.max(), error.mean())
    return maps


def _gamma_for(config: RunConfig, source: GammaSource) -> np.ndarray:
    scenario = config.link_scenario()
    if source == GammaSource.IDEAL:
        return np.exp(1j * ideal_phase_profile(scenario).phases)
    return synthesize_surface(scenario, SynthesisMode(source.value)).gamma


def cmd_link(
    config: RunConfig,
    out: str | Path | None = None,
    gamma_source: GammaSource | None = None,
    gamma_override: np.ndarray | None = None,
) -> dict[GammaSource, float]:
    """Received power and xz-plane field map for each reflection-coefficient source.

    `gamma_override` replaces the synthesized coefficients of every source.
    """
    out_dir = _out_dir(config, out)
    scenario = config.link_scenario()
    sources = [GammaSource(gamma_source)] if gamma_source is not None else list(GammaSource)
    plane = config.field_plane()

    powers = {}
    for source in sources:
        gamma = _gamma_for(config, source) if gamma_override is None else gamma_override
        power = received_power(scenario, gamma)
        powers[source] = power
        _LOG.info("P_r (%s) = %.6g W (%.3f dB rel. P_t)", source, power, _db(power, scenario.tx_power))
        write_result(field_map(scenario, plane, gamma), out_dir, f"field_map_{source.value}")

    write_rows(
        out_dir / "link_summary.csv",
        const.HEADER_LINK_SUMMARY,
        ((source.value, p, _db(p, scenario.tx_power)) for source, p in powers.items()),
    )
    if GammaSource.OBLIQUE in powers and GammaSource.NORMAL in powers:
        _LOG.info(
            "Oblique-incidence synthesis gain over normal-incidence: %.3f dB",
            _db(powers[GammaSource.OBLIQUE], powers[GammaSource.NORMAL]),
        )
    return powers


def cmd_validate_pec(
    config: RunConfig,
    out: str | Path | None = None,
    rcs_sign: float = 1.0,
) -> ValidationReport:
    """Compare the all-PEC coherent sum against the flat-plate pattern and the closed forms.

    `rcs_sign` flips the in-plane sign convention of the cell RCS, which must
    make the comparison fail.
    """
    out_dir = _out_dir(config, out)
    val = config.validation
    scenario = config.link_scenario()
    theta_i = val.plate_angle
    report = ValidationReport()

    # scattering pattern of the whole surface against a plate of the same size
    count = int(round(math.radians(178) / val.pattern_step)) + 1
    theta_s = np.linspace(-math.radians(89), math.radians(89), count)
    array_db = array_pattern_db(scenario, theta_i, theta_s, val.pattern_distance_m, rcs_sign=rcs_sign)
    plate_db = plate_pattern_db(scenario.size_x, scenario.size_y, theta_i, theta_s, scenario.wavelength)
    lobes = plate_db >= val.lobe_floor_db
    deviation = float(np.max(np.abs(array_db[lobes] - plate_db[lobes])))
    report.add("pattern_max_deviation_db", deviation, val.pattern_tolerance_db)
    peak_offset = abs(float(theta_s[np.argmax(array_db)]) - theta_i)
    report.add("peak_offset_deg", math.degrees(peak_offset), math.degrees(val.pattern_step) * (1 + 1e-9))

    # far-field received power at the specular geometry
    r = val.far_field_factor * scenario.diagonal
    tx = (0.0, -r * math.sin(theta_i), r * math.cos(theta_i))
    rx = (0.0, r * math.sin(theta_i), r * math.cos(theta_i))
    specular = replace(scenario, tx_pos=tx, rx_pos=rx)
    summed = received_power(specular, -np.ones(scenario.shape), rcs_sign=rcs_sign)
    general = pec_closed_form_power(specular, "general")
    bistatic = pec_closed_form_power(specular, "bistatic")
    report.add("power_relative_deviation", abs(summed - general.power) / general.power, val.power_tolerance)
    report.add("far_field_regime", 0.0 if general.far_field else 1.0, 0.0)
    report.add(
        "closed_form_consistency",
        abs(general.power - bistatic.power) / bistatic.power,
        1e-9,
    )

    # the bistatic closed form carries no frequency dependence
    levels = [
        pec_closed_form_power(replace(specular, f=scenario.f * k), "bistatic").power for k in (0.5, 1.0, 2.0)
    ]
    report.add("bistatic_frequency_spread", (max(levels) - min(levels)) / max(levels), 1e-12)

    write_rows(
        out_dir / "validation_report.csv",
        "# check,value,limit,status",
        ((c.name, c.value, c.limit, "PASS" if c.passed else "FAIL") for c in report.checks),
    )
    _LOG.info("PEC validation %s", "PASS" if report.passed else "FAIL")
    return report
