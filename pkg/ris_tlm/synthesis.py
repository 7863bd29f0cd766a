"""
Phase-gradient synthesis: lookup tables, ideal phase profiles and
per-cell inversion of the reflection phase for the varactor capacitance.

:copyright: (c) 2025 by the ris-tlm contributors.
:license: MPL-2.0, see LICENSE for more details.
"""

import logging
import math

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.optimize import minimize_scalar

from . import const
from .constants import Polarization, SynthesisMode
from .errors import DimensionError, ParameterRangeError
from .link import surface_geometry
from .models import (
    CapacitanceMap,
    IncidentWave,
    InversionResult,
    LinkScenario,
    LookupTable,
    ModelOptions,
    PhaseProfile,
    UnitCellDesign,
    VaractorModel,
    wrap_phase,
)
from .tlm import DEFAULT_OPTIONS, reflection_coefficient

_LOG = logging.getLogger(__name__)

# at most this many local minima of the scan are refined
_MAX_REFINED = 4


def build_lookup_table(
    cell: UnitCellDesign,
    varactor: VaractorModel,
    f: float,
    pol: Polarization,
    theta_grid: ArrayLike,
    c_grid: ArrayLike,
    options: ModelOptions = DEFAULT_OPTIONS,
) -> LookupTable:
    """Gamma over the (theta, C_var) grid at a single frequency."""
    theta_grid = np.asarray(theta_grid, dtype=float)
    c_grid = np.asarray(c_grid, dtype=float)
    if theta_grid.size == 0 or c_grid.size == 0:
        raise ParameterRangeError("lookup grids must be nonempty")
    if np.any(theta_grid < 0) or np.any(theta_grid >= math.pi / 2):
        raise ParameterRangeError("lookup angles must lie in [0, pi/2)")
    varactor.check_capacitance(c_grid)

    wave = IncidentWave(f=f, theta=theta_grid[:, None], pol=pol)
    gamma = reflection_coefficient(cell, varactor, c_grid[None, :], wave, options).gamma
    _LOG.debug("Built %dx%d lookup table at %.6g Hz (%s)", theta_grid.size, c_grid.size, f, pol)
    return LookupTable(
        cell=cell,
        varactor=varactor,
        f=f,
        pol=Polarization(pol),
        theta_grid=theta_grid,
        c_grid=c_grid,
        gamma=np.broadcast_to(gamma, (theta_grid.size, c_grid.size)),
    )


def ideal_phase_profile(scenario: LinkScenario) -> PhaseProfile:
    """Per-cell phase that makes every TX-cell-RX path arrive in phase."""
    geom = surface_geometry(scenario)
    return PhaseProfile(phases=wrap_phase(scenario.k0 * (geom.r_t + geom.r_r)))


class PhaseInverter:
    """Finds the capacitance whose reflection phase is closest to a target.

    The phase response at one frequency and incidence angle is scanned once on
    a log-spaced grid; each inversion refines the best scan neighbourhoods with
    a bounded scalar minimization of the wrapped phase distance.
    """

    def __init__(
        self,
        cell: UnitCellDesign,
        varactor: VaractorModel,
        f: float,
        pol: Polarization,
        theta: float = 0.0,
        options: ModelOptions = DEFAULT_OPTIONS,
        scan_points: int = const.INVERSION_SCAN_POINTS,
    ):
        self._cell = cell
        self._varactor = varactor
        self._options = options
        self._wave = IncidentWave(f=f, theta=theta, pol=pol)
        self._c_scan = np.geomspace(varactor.c_min, varactor.c_max, scan_points)
        self._gamma_scan = reflection_coefficient(cell, varactor, self._c_scan, self._wave, options).gamma
        self._phase_scan = np.angle(self._gamma_scan)
        self._xtol = const.INVERSION_XTOL * varactor.c_max

    @property
    def theta(self) -> float:
        return float(self._wave.theta)

    def gamma(self, c_var: float) -> complex:
        return complex(reflection_coefficient(self._cell, self._varactor, c_var, self._wave, self._options).gamma)

    def _distance(self, c_var: float, target: float) -> float:
        return abs(float(wrap_phase(np.angle(self.gamma(c_var)) - target)))

    def _candidates(self, dist: NDArray) -> list[int]:
        n = dist.size
        if n < 3:
            return list(range(n))
        minima = list(np.flatnonzero((dist[1:-1] <= dist[:-2]) & (dist[1:-1] <= dist[2:])) + 1)
        if dist[0] <= dist[1]:
            minima.insert(0, 0)
        if dist[-1] <= dist[-2]:
            minima.append(n - 1)
        minima.sort(key=lambda i: dist[i])
        return sorted(minima[:_MAX_REFINED])

    def invert(self, target_phase: float) -> InversionResult:
        target = float(target_phase)
        dist = np.abs(wrap_phase(self._phase_scan - target))
        # argmin keeps the first, i.e. smallest, capacitance on ties
        i_best = int(np.argmin(dist))
        best_c, best_d = float(self._c_scan[i_best]), float(dist[i_best])

        last = self._c_scan.size - 1
        for i in self._candidates(dist):
            lo = float(self._c_scan[max(i - 1, 0)])
            hi = float(self._c_scan[min(i + 1, last)])
            if hi <= lo:
                continue
            # searched as an offset from lo: the minimizer's relative tolerance scales with |x|
            res = minimize_scalar(
                lambda x: self._distance(lo + x, target),
                bounds=(0.0, hi - lo),
                method="bounded",
                options={"xatol": self._xtol},
            )
            c = min(max(lo + float(res.x), self._varactor.c_min), self._varactor.c_max)
            d = self._distance(c, target)
            if d < best_d or (d == best_d and c < best_c):
                best_c, best_d = c, d

        clamped = best_d > const.CLAMP_PHASE_TOL
        if clamped:
            _LOG.debug(
                "Target phase %.4f rad unreachable at theta=%.4f rad; closest C_var=%.6g F (error %.4f rad)",
                target,
                self.theta,
                best_c,
                best_d,
            )
        return InversionResult(c_var=best_c, gamma=self.gamma(best_c), clamped=clamped, phase_error=best_d)


def capacitance_for_phase(
    cell: UnitCellDesign,
    varactor: VaractorModel,
    f: float,
    pol: Polarization,
    theta: float,
    target_phase: float,
    options: ModelOptions = DEFAULT_OPTIONS,
) -> InversionResult:
    return PhaseInverter(cell, varactor, f, pol, theta, options).invert(target_phase)


def synthesize_capacitances(
    cell: UnitCellDesign,
    varactor: VaractorModel,
    f: float,
    pol: Polarization,
    targets: ArrayLike,
    incidence: ArrayLike,
    mode: SynthesisMode,
    options: ModelOptions = DEFAULT_OPTIONS,
) -> CapacitanceMap:
    """Invert every target phase, then evaluate the achieved reflection at the true incidence.

    Normal mode inverts against the theta = 0 response for all cells; oblique
    mode inverts against each cell's own incidence angle.
    """
    mode = SynthesisMode(mode)
    targets = np.asarray(targets, dtype=float)
    incidence = np.asarray(incidence, dtype=float)
    if targets.shape != incidence.shape:
        raise DimensionError(
            f"target phases {targets.shape} and incidence angles {incidence.shape} differ in shape"
        )

    inverters: dict[float, PhaseInverter] = {}
    capacitance = np.empty(targets.shape)
    clamped = np.zeros(targets.shape, dtype=bool)
    for idx in np.ndindex(targets.shape):
        theta = 0.0 if mode == SynthesisMode.NORMAL else float(incidence[idx])
        inverter = inverters.get(theta)
        if inverter is None:
            inverter = inverters[theta] = PhaseInverter(cell, varactor, f, pol, theta, options)
        result = inverter.invert(targets[idx])
        capacitance[idx] = result.c_var
        clamped[idx] = result.clamped

    wave = IncidentWave(f=f, theta=incidence, pol=pol)
    gamma = reflection_coefficient(cell, varactor, capacitance, wave, options).gamma
    if np.any(clamped):
        _LOG.info("%d of %d cells clamped to the nearest reachable phase", int(clamped.sum()), clamped.size)
    return CapacitanceMap(
        capacitance=capacitance,
        gamma=np.asarray(gamma, dtype=complex).reshape(targets.shape),
        mode=mode,
        clamped=clamped,
        f=f,
        pol=Polarization(pol),
    )


def synthesize_surface(scenario: LinkScenario, mode: SynthesisMode) -> CapacitanceMap:
    geom = surface_geometry(scenario)
    profile = ideal_phase_profile(scenario)
    _LOG.info("Synthesizing %dx%d surface in %s mode", scenario.rows, scenario.columns, mode)
    result = synthesize_capacitances(
        scenario.cell,
        scenario.varactor,
        scenario.f,
        scenario.pol,
        profile.phases,
        geom.theta_t,
        mode,
        scenario.model,
    )
    result.scenario_digest = scenario.digest()
    return result


def capacitance_error_map(map_a: CapacitanceMap, map_b: CapacitanceMap) -> NDArray[np.float64]:
    """Relative difference |(C_a - C_b) / C_a| in percent."""
    if map_a.shape != map_b.shape:
        raise DimensionError(
            f"capacitance maps differ in shape: {map_a.shape} vs {map_b.shape}"
        )
    return np.abs((map_a.capacitance - map_b.capacitance) / map_a.capacitance) * 100
