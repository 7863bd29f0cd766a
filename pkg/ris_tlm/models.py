"""
Domain types for the RIS unit-cell model, phase synthesis and link simulation.

Lengths are in meters, frequencies in hertz, angles in radians, capacitances
in farads. Fields that describe a sweep accept NumPy arrays and broadcast.

:copyright: (c) 2025 by the ris-tlm contributors.
:license: MPL-2.0, see LICENSE for more details.
"""

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field
from functools import cached_property
from typing import Any

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.interpolate import RegularGridInterpolator

from . import const
from .constants import Boresight, Polarization, RcsObliquity, SynthesisMode
from .errors import DimensionError, ParameterRangeError


@dataclass(frozen=True)
class ModelOptions:
    """Switches selecting between as-printed and corrected model variants."""

    strict_skin_depth: bool = False
    te_factor_exponent: int = 1

    def __post_init__(self):
        if self.te_factor_exponent not in (1, 2):
            raise ParameterRangeError(
                f"te_factor_exponent must be 1 or 2, got {self.te_factor_exponent}"
            )


@dataclass(frozen=True)
class UnitCellDesign:
    """Geometry, substrate and conductor of one periodic patch cell."""

    period_x: float = const.DEFAULT_PERIOD
    period_y: float = const.DEFAULT_PERIOD
    gap_x: float = const.DEFAULT_GAP
    gap_y: float = const.DEFAULT_GAP
    thickness: float = const.DEFAULT_THICKNESS
    eps_r: complex = const.DEFAULT_EPS_R
    sigma_c: float = const.DEFAULT_SIGMA_C
    # None selects the correction automatically (thickness below one period)
    ground_correction: bool | None = None

    def __post_init__(self):
        object.__setattr__(self, "eps_r", complex(self.eps_r))
        if not 0 < self.gap_x < self.period_x:
            raise ParameterRangeError(
                f"gap_x must lie in (0, {self.period_x}), got {self.gap_x}"
            )
        if not 0 < self.gap_y < self.period_y:
            raise ParameterRangeError(
                f"gap_y must lie in (0, {self.period_y}), got {self.gap_y}"
            )
        if not self.thickness > 0:
            raise ParameterRangeError(f"thickness must be > 0, got {self.thickness}")
        if self.eps_r.real < 1 or self.eps_r.imag > 0:
            raise ParameterRangeError(
                f"eps_r must satisfy Re >= 1 and Im <= 0, got {self.eps_r}"
            )
        if not self.sigma_c > 0:
            raise ParameterRangeError(f"sigma_c must be > 0, got {self.sigma_c}")

    @property
    def is_square(self) -> bool:
        return self.period_x == self.period_y and self.gap_x == self.gap_y

    @property
    def period(self) -> float:
        return max(self.period_x, self.period_y)

    @property
    def uses_ground_correction(self) -> bool:
        if self.ground_correction is None:
            return self.thickness / self.period < 1
        return self.ground_correction


@dataclass(frozen=True)
class VaractorModel:
    """Series R-L-C varactor with a tuning range [c_min, c_max]."""

    r_var: float = const.DEFAULT_R_VAR
    l_var: float = const.DEFAULT_L_VAR
    c_min: float = const.DEFAULT_C_MIN
    c_max: float = const.DEFAULT_C_MAX

    def __post_init__(self):
        if self.r_var < 0:
            raise ParameterRangeError(f"r_var must be >= 0, got {self.r_var}")
        if self.l_var < 0:
            raise ParameterRangeError(f"l_var must be >= 0, got {self.l_var}")
        if not 0 < self.c_min <= self.c_max:
            raise ParameterRangeError(
                f"capacitance range must satisfy 0 < c_min <= c_max, got [{self.c_min}, {self.c_max}]"
            )

    def check_capacitance(self, c_var: ArrayLike) -> None:
        c = np.asarray(c_var, dtype=float)
        # relative slack absorbs round-off from log-spaced grids
        slack = 1e-12 * self.c_max
        if np.any(c < self.c_min - slack) or np.any(c > self.c_max + slack):
            raise ParameterRangeError(
                f"C_var outside admissible interval [{self.c_min:.6g}, {self.c_max:.6g}] F"
            )


@dataclass(frozen=True)
class IncidentWave:
    """Plane wave impinging on the surface; f and theta may be arrays."""

    f: Any
    theta: Any = 0.0
    pol: Polarization = Polarization.TE

    def __post_init__(self):
        object.__setattr__(self, "pol", Polarization(self.pol))
        if np.any(np.asarray(self.f) <= 0):
            raise ParameterRangeError("frequency must be > 0")
        theta = np.asarray(self.theta)
        if np.any(theta < 0) or np.any(theta >= math.pi / 2):
            raise ParameterRangeError("theta must lie in [0, pi/2)")

    @property
    def omega(self):
        return 2 * math.pi * np.asarray(self.f, dtype=float)

    @property
    def k0(self):
        return self.omega / const.C0


@dataclass
class ReflectionSample:
    """Complex reflection coefficient together with the coordinates that produced it."""

    gamma: Any
    f: Any
    theta: Any
    pol: Polarization
    c_var: Any

    @property
    def amplitude(self):
        return np.abs(self.gamma)

    @property
    def phase(self):
        return np.angle(self.gamma)

    @property
    def amplitude_db(self):
        return 20 * np.log10(np.abs(self.gamma))

    @property
    def phase_deg(self):
        return np.degrees(np.angle(self.gamma))


@dataclass
class Resonance:
    """Phase zero-crossing and amplitude minimum of one frequency sweep."""

    f_phase_zero: float
    f_min_amplitude: float
    min_amplitude: float

    @property
    def relative_offset(self) -> float:
        return abs(self.f_phase_zero - self.f_min_amplitude) / self.f_phase_zero


@dataclass
class LookupTable:
    """Reflection coefficients over an ascending (theta, C_var) grid."""

    cell: UnitCellDesign
    varactor: VaractorModel
    f: float
    pol: Polarization
    theta_grid: NDArray[np.float64]
    c_grid: NDArray[np.float64]
    gamma: NDArray[np.complex128]

    def __post_init__(self):
        self.theta_grid = np.asarray(self.theta_grid, dtype=float)
        self.c_grid = np.asarray(self.c_grid, dtype=float)
        self.gamma = np.asarray(self.gamma, dtype=complex)
        for name, grid in (("theta_grid", self.theta_grid), ("c_grid", self.c_grid)):
            if grid.ndim != 1 or grid.size == 0:
                raise ParameterRangeError(f"{name} must be a nonempty 1-D grid")
            if np.any(np.diff(grid) <= 0):
                raise ParameterRangeError(f"{name} must be strictly increasing")
        if self.gamma.shape != (self.theta_grid.size, self.c_grid.size):
            raise DimensionError(
                f"gamma shape {self.gamma.shape} does not match grids "
                f"({self.theta_grid.size}, {self.c_grid.size})"
            )

    @property
    def amplitude_db(self) -> NDArray[np.float64]:
        return 20 * np.log10(np.abs(self.gamma))

    @property
    def phase_deg(self) -> NDArray[np.float64]:
        return np.degrees(np.angle(self.gamma))

    @cached_property
    def _interpolators(self) -> tuple[RegularGridInterpolator, RegularGridInterpolator]:
        points = (self.theta_grid, self.c_grid)
        return (
            RegularGridInterpolator(points, self.gamma.real, method="linear"),
            RegularGridInterpolator(points, self.gamma.imag, method="linear"),
        )

    def interpolate(self, theta: ArrayLike, c_var: ArrayLike):
        """Bilinear interpolation of Re and Im of gamma at (theta, c_var)."""
        theta, c_var = np.broadcast_arrays(np.asarray(theta, float), np.asarray(c_var, float))
        pts = np.stack([theta.ravel(), c_var.ravel()], axis=-1)
        re, im = (interp(pts) for interp in self._interpolators)
        out = (re + 1j * im).reshape(theta.shape)
        return out[()] if out.ndim == 0 else out


def wrap_phase(phase: ArrayLike):
    """Wrap phases into (-pi, pi]."""
    wrapped = math.pi - np.mod(math.pi - np.asarray(phase, dtype=float), 2 * math.pi)
    # np.mod may round up to 2*pi for inputs just above pi
    wrapped = np.where(wrapped <= -math.pi, math.pi, wrapped)
    return wrapped[()] if np.ndim(wrapped) == 0 else wrapped


@dataclass
class PhaseProfile:
    """Target reflection phases of an M x N surface, wrapped to (-pi, pi]."""

    phases: NDArray[np.float64]

    def __post_init__(self):
        self.phases = np.asarray(self.phases, dtype=float)
        if np.any(self.phases <= -math.pi) or np.any(self.phases > math.pi):
            raise ParameterRangeError("phase profile entries must lie in (-pi, pi]")

    @property
    def shape(self) -> tuple[int, ...]:
        return self.phases.shape


@dataclass
class InversionResult:
    """Varactor state selected for one target phase."""

    c_var: float
    gamma: complex
    clamped: bool
    phase_error: float


@dataclass
class CapacitanceMap:
    """Per-cell varactor capacitances with the reflection they achieve."""

    capacitance: NDArray[np.float64]
    gamma: NDArray[np.complex128]
    mode: SynthesisMode
    clamped: NDArray[np.bool_] | None = None
    f: float | None = None
    pol: Polarization | None = None
    scenario_digest: str = ""

    def __post_init__(self):
        self.capacitance = np.asarray(self.capacitance, dtype=float)
        self.gamma = np.asarray(self.gamma, dtype=complex)
        self.mode = SynthesisMode(self.mode)
        if self.clamped is None:
            self.clamped = np.zeros(self.capacitance.shape, dtype=bool)
        if self.gamma.shape != self.capacitance.shape:
            raise DimensionError("gamma and capacitance matrices must have the same shape")

    @property
    def shape(self) -> tuple[int, ...]:
        return self.capacitance.shape


@dataclass
class LinkScenario:
    """TX/RX placement around an M x N surface centred at the origin in the xy-plane."""

    tx_pos: tuple[float, float, float] = const.DEFAULT_TX_POS
    rx_pos: tuple[float, float, float] = const.DEFAULT_RX_POS
    rows: int = const.DEFAULT_ROWS
    columns: int = const.DEFAULT_COLUMNS
    cell: UnitCellDesign = field(default_factory=UnitCellDesign)
    varactor: VaractorModel = field(default_factory=VaractorModel)
    f: float = const.DEFAULT_FREQUENCY
    pol: Polarization = Polarization.TE
    tx_power: float = const.DEFAULT_TX_POWER
    q_t: float = const.DEFAULT_Q
    q_r: float = const.DEFAULT_Q
    model: ModelOptions = field(default_factory=ModelOptions)
    strict_gain: bool = False
    boresight: Boresight = Boresight.NORMAL
    rcs_obliquity: RcsObliquity = RcsObliquity.INCIDENT

    def __post_init__(self):
        self.tx_pos = tuple(float(v) for v in self.tx_pos)
        self.rx_pos = tuple(float(v) for v in self.rx_pos)
        self.pol = Polarization(self.pol)
        self.boresight = Boresight(self.boresight)
        self.rcs_obliquity = RcsObliquity(self.rcs_obliquity)
        if len(self.tx_pos) != 3 or len(self.rx_pos) != 3:
            raise ParameterRangeError("tx_pos and rx_pos must be 3-vectors")
        if self.tx_pos[2] <= 0 or self.rx_pos[2] <= 0:
            raise ParameterRangeError("TX and RX must lie in the z > 0 half-space")
        if self.rows < 1 or self.columns < 1:
            raise ParameterRangeError("rows and columns must be >= 1")
        if not self.f > 0:
            raise ParameterRangeError(f"frequency must be > 0, got {self.f}")
        if not self.tx_power > 0:
            raise ParameterRangeError(f"tx_power must be > 0, got {self.tx_power}")
        if self.q_t < 0 or self.q_r < 0:
            raise ParameterRangeError("antenna exponents must be >= 0")

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.columns)

    @property
    def wavelength(self) -> float:
        return const.C0 / self.f

    @property
    def k0(self) -> float:
        return 2 * math.pi / self.wavelength

    @property
    def size_x(self) -> float:
        return self.columns * self.cell.period_x

    @property
    def size_y(self) -> float:
        return self.rows * self.cell.period_y

    @property
    def diagonal(self) -> float:
        return math.hypot(self.size_x, self.size_y)

    def digest(self) -> str:
        """Stable hash of every scenario field."""
        payload = asdict(self)
        payload["cell"]["eps_r"] = [self.cell.eps_r.real, self.cell.eps_r.imag]
        text = json.dumps(payload, sort_keys=True, default=str)
        return hashlib.sha256(text.encode("utf-8")).hexdigest()


@dataclass
class CellGeometry:
    """Position of one cell and the TX/RX directions seen from it."""

    position: tuple[float, float, float]
    r_t: float
    r_r: float
    theta_t: float
    theta_r: float
    phi_t: float
    phi_r: float
    # polar angles carrying the sign of the y-projection, for the in-plane RCS
    theta_t_signed: float
    theta_r_signed: float


@dataclass
class SurfaceGeometry:
    """CellGeometry for every cell at once, as (M, N) arrays."""

    positions: NDArray[np.float64]
    r_t: NDArray[np.float64]
    r_r: NDArray[np.float64]
    theta_t: NDArray[np.float64]
    theta_r: NDArray[np.float64]
    phi_t: NDArray[np.float64]
    phi_r: NDArray[np.float64]
    theta_t_signed: NDArray[np.float64]
    theta_r_signed: NDArray[np.float64]

    def cell(self, m: int, n: int) -> CellGeometry:
        i, j = m - 1, n - 1
        return CellGeometry(
            position=tuple(float(v) for v in self.positions[i, j]),
            r_t=float(self.r_t[i, j]),
            r_r=float(self.r_r[i, j]),
            theta_t=float(self.theta_t[i, j]),
            theta_r=float(self.theta_r[i, j]),
            phi_t=float(self.phi_t[i, j]),
            phi_r=float(self.phi_r[i, j]),
            theta_t_signed=float(self.theta_t_signed[i, j]),
            theta_r_signed=float(self.theta_r_signed[i, j]),
        )


_AXES = ("x", "y", "z")


@dataclass
class PlaneSpec:
    """Axis-aligned sampling rectangle; the remaining axis is held at `offset`."""

    u_axis: str = "x"
    v_axis: str = "z"
    u_range: tuple[float, float] = const.DEFAULT_PLANE_X
    v_range: tuple[float, float] = const.DEFAULT_PLANE_Z
    samples: tuple[int, int] = const.DEFAULT_MAP_SAMPLES
    offset: float = 0.0

    def __post_init__(self):
        if self.u_axis not in _AXES or self.v_axis not in _AXES or self.u_axis == self.v_axis:
            raise ParameterRangeError(f"invalid plane axes {self.u_axis}{self.v_axis}")
        if self.samples[0] < 1 or self.samples[1] < 1:
            raise ParameterRangeError("plane sample counts must be >= 1")

    @property
    def fixed_axis(self) -> str:
        return next(a for a in _AXES if a not in (self.u_axis, self.v_axis))

    @property
    def u(self) -> NDArray[np.float64]:
        return np.linspace(self.u_range[0], self.u_range[1], self.samples[0])

    @property
    def v(self) -> NDArray[np.float64]:
        return np.linspace(self.v_range[0], self.v_range[1], self.samples[1])

    def points(self) -> NDArray[np.float64]:
        """Sample positions, shape (n_u, n_v, 3), u-major."""
        uu, vv = np.meshgrid(self.u, self.v, indexing="ij")
        pts = np.empty(uu.shape + (3,))
        pts[..., _AXES.index(self.u_axis)] = uu
        pts[..., _AXES.index(self.v_axis)] = vv
        pts[..., _AXES.index(self.fixed_axis)] = self.offset
        return pts


@dataclass
class FieldMap:
    """Received power sampled over a plane, indexed [u][v]."""

    plane: PlaneSpec
    power: NDArray[np.float64]
    tx_power: float

    def __post_init__(self):
        self.power = np.asarray(self.power, dtype=float)
        if self.power.shape != tuple(self.plane.samples):
            raise DimensionError(
                f"power shape {self.power.shape} does not match samples {self.plane.samples}"
            )

    @property
    def power_db(self) -> NDArray[np.float64]:
        with np.errstate(divide="ignore"):
            return 10 * np.log10(self.power / self.tx_power)

    def argmax(self) -> tuple[float, float]:
        """(u, v) coordinates of the strongest sample."""
        i, j = np.unravel_index(np.argmax(self.power), self.power.shape)
        return float(self.plane.u[i]), float(self.plane.v[j])


@dataclass
class ClosedFormPower:
    """Closed-form PEC received power with its far-field validity flag."""

    power: float
    form: str
    far_field: bool
