"""
Run configuration shared by every subcommand.

Values are stored in SI units with angles already converted to radians;
`parser.load_config` handles the file format and the degree conversion.

:copyright: (c) 2025 by the ris-tlm contributors.
:license: MPL-2.0, see LICENSE for more details.
"""

import math
from dataclasses import dataclass, field

from . import const
from .constants import Boresight, Polarization, RcsObliquity
from .models import (
    LinkScenario,
    ModelOptions,
    PlaneSpec,
    UnitCellDesign,
    VaractorModel,
)


@dataclass
class ScenarioConfig:
    tx_pos: tuple[float, float, float] = const.DEFAULT_TX_POS
    rx_pos: tuple[float, float, float] = const.DEFAULT_RX_POS
    rows: int = const.DEFAULT_ROWS
    columns: int = const.DEFAULT_COLUMNS
    f_hz: float = const.DEFAULT_FREQUENCY
    pol: Polarization = Polarization.TE
    tx_power_w: float = const.DEFAULT_TX_POWER


@dataclass
class CellConfig:
    period_x_m: float = const.DEFAULT_PERIOD
    period_y_m: float = const.DEFAULT_PERIOD
    gap_x_m: float = const.DEFAULT_GAP
    gap_y_m: float = const.DEFAULT_GAP
    thickness_m: float = const.DEFAULT_THICKNESS
    eps_r: complex = const.DEFAULT_EPS_R
    sigma_c: float = const.DEFAULT_SIGMA_C


@dataclass
class VaractorConfig:
    r_var_ohm: float = const.DEFAULT_R_VAR
    c_min_f: float = const.DEFAULT_C_MIN
    c_max_f: float = const.DEFAULT_C_MAX


@dataclass
class ModelConfig:
    strict_skin_depth: bool = False
    strict_gain_integral: bool = False
    te_factor_exponent: int = 1
    # None: apply the ground-plane correction when thickness < period
    ground_correction: bool | None = None
    l_var_h: float = const.DEFAULT_L_VAR
    q_t: float = const.DEFAULT_Q
    q_r: float = const.DEFAULT_Q
    boresight: Boresight = Boresight.NORMAL
    rcs_obliquity: RcsObliquity = RcsObliquity.INCIDENT


@dataclass
class SweepConfig:
    f_start_hz: float = 4e9
    f_stop_hz: float = 14e9
    f_count: int = 201
    theta: list[float] = field(default_factory=lambda: [0.0, math.radians(60)])
    polarizations: list[Polarization] = field(
        default_factory=lambda: [Polarization.TE, Polarization.TM]
    )
    # empty: unloaded surface, no varactor branch
    c_var_f: list[float] = field(default_factory=list)
    lookup_theta_start: float = 0.0
    lookup_theta_stop: float = math.radians(80)
    lookup_theta_count: int = 81
    lookup_c_count: int = 81


@dataclass
class OutputConfig:
    directory: str = "output"
    plane_x_m: tuple[float, float] = const.DEFAULT_PLANE_X
    plane_z_m: tuple[float, float] = const.DEFAULT_PLANE_Z
    plane_y_m: float = 0.0
    samples: tuple[int, int] = const.DEFAULT_MAP_SAMPLES


@dataclass
class ValidationConfig:
    plate_angle: float = math.radians(38.6)
    pattern_distance_m: float = 1000.0
    far_field_factor: float = 100.0
    lobe_floor_db: float = -30.0
    pattern_tolerance_db: float = 0.5
    power_tolerance: float = 0.01
    pattern_step: float = math.radians(0.1)


@dataclass
class RunConfig:
    """Complete configuration of one ris-tlm invocation."""

    scenario: ScenarioConfig = field(default_factory=ScenarioConfig)
    cell: CellConfig = field(default_factory=CellConfig)
    varactor: VaractorConfig = field(default_factory=VaractorConfig)
    model: ModelConfig = field(default_factory=ModelConfig)
    sweep: SweepConfig = field(default_factory=SweepConfig)
    output: OutputConfig = field(default_factory=OutputConfig)
    validation: ValidationConfig = field(default_factory=ValidationConfig)
    source: str = "<defaults>"

    def unit_cell(self) -> UnitCellDesign:
        c = self.cell
        return UnitCellDesign(
            period_x=c.period_x_m,
            period_y=c.period_y_m,
            gap_x=c.gap_x_m,
            gap_y=c.gap_y_m,
            thickness=c.thickness_m,
            eps_r=c.eps_r,
            sigma_c=c.sigma_c,
            ground_correction=self.model.ground_correction,
        )

    def varactor_model(self) -> VaractorModel:
        return VaractorModel(
            r_var=self.varactor.r_var_ohm,
            l_var=self.model.l_var_h,
            c_min=self.varactor.c_min_f,
            c_max=self.varactor.c_max_f,
        )

    def model_options(self) -> ModelOptions:
        return ModelOptions(
            strict_skin_depth=self.model.strict_skin_depth,
            te_factor_exponent=self.model.te_factor_exponent,
        )

    def link_scenario(self) -> LinkScenario:
        s = self.scenario
        return LinkScenario(
            tx_pos=s.tx_pos,
            rx_pos=s.rx_pos,
            rows=s.rows,
            columns=s.columns,
            cell=self.unit_cell(),
            varactor=self.varactor_model(),
            f=s.f_hz,
            pol=s.pol,
            tx_power=s.tx_power_w,
            q_t=self.model.q_t,
            q_r=self.model.q_r,
            model=self.model_options(),
            strict_gain=self.model.strict_gain_integral,
            boresight=self.model.boresight,
            rcs_obliquity=self.model.rcs_obliquity,
        )

    def field_plane(self) -> PlaneSpec:
        """xz-plane at y = plane_y_m swept by the field maps."""
        out = self.output
        return PlaneSpec("x", "z", out.plane_x_m, out.plane_z_m, out.samples, offset=out.plane_y_m)
