"""
Transmission-line model of a varactor-loaded patch-array reflecting surface.

The patch array is homogenized into a sheet impedance Z_patch, loaded in
parallel by the varactor branch Z_var, and placed in parallel with the
grounded-slab impedance Z_d. The resulting input impedance Z_v is matched
against the oblique free-space impedance of the selected polarization.

All functions broadcast over NumPy arrays of frequency, angle and capacitance.

:copyright: (c) 2025 by the ris-tlm contributors.
:license: MPL-2.0, see LICENSE for more details.
"""

import logging
import math
import warnings
from dataclasses import dataclass
from typing import Any

import numpy as np
from numpy.typing import ArrayLike

from . import const
from .constants import Polarization
from .errors import (
    ModelValidityWarning,
    NumericalWarning,
    ParameterRangeError,
    RisModelError,
    SingularityError,
)
from .models import (
    IncidentWave,
    ModelOptions,
    ReflectionSample,
    Resonance,
    UnitCellDesign,
    VaractorModel,
)

_LOG = logging.getLogger(__name__)

DEFAULT_OPTIONS = ModelOptions()


@dataclass
class SheetResponse:
    """Reflection and transmission of a freestanding impedance sheet."""

    gamma: Any
    tau: Any
    # same reflection obtained from the parallel-line equivalent circuit
    gamma_tl: Any


def _scalar(value):
    arr = np.asarray(value)
    return arr[()] if arr.ndim == 0 else arr


def _first(value, mask):
    arr = np.broadcast_to(np.asarray(value), mask.shape)
    return arr[mask].flat[0]


def parallel_impedance(z_a: ArrayLike, z_b: ArrayLike, coordinates: dict | None = None):
    """Parallel combination Z_a Z_b / (Z_a + Z_b), rejecting degenerate sums."""
    z_a = np.asarray(z_a, dtype=complex)
    z_b = np.asarray(z_b, dtype=complex)
    denom = z_a + z_b
    scale = np.maximum(np.abs(z_a), np.abs(z_b))
    singular = np.abs(denom) < const.SINGULAR_REL_TOL * scale
    if np.any(singular):
        coords = {}
        for key, val in (coordinates or {}).items():
            try:
                coords[key] = _first(val, singular)
            except ValueError:
                coords[key] = val
        raise SingularityError("degenerate parallel combination Za + Zb = 0", coords)
    both_zero = (z_a == 0) & (z_b == 0)
    with np.errstate(invalid="ignore", divide="ignore"):
        result = np.where(both_zero, 0, z_a * z_b / np.where(both_zero, 1, denom))
    return _scalar(result)


def _coordinates(wave: IncidentWave, c_var=None) -> dict:
    return {"f": wave.f, "theta": wave.theta, "pol": str(wave.pol), "C_var": c_var}


def grating_lobe_limit(cell: UnitCellDesign, theta: ArrayLike):
    """Highest frequency at which only the fundamental Floquet harmonic propagates."""
    n = math.sqrt(cell.eps_r.real)
    return _scalar(const.C0 / (cell.period * (n + np.sin(np.asarray(theta, dtype=float)))))


def _check_validity(cell: UnitCellDesign, wave: IncidentWave) -> None:
    limit = grating_lobe_limit(cell, wave.theta)
    if np.any(np.asarray(wave.f) >= limit):
        warnings.warn(
            f"frequency at or above the grating-lobe limit ({np.min(limit):.4g} Hz); "
            "higher-order Floquet harmonics propagate and the homogenized model is not valid",
            ModelValidityWarning,
            stacklevel=3,
        )


def effective_permittivity(cell: UnitCellDesign) -> complex:
    """Permittivity of the medium hosting the patch layer: (1 + eps_r) / 2."""
    return (1 + cell.eps_r) / 2


def skin_depth(sigma_c: float, f: ArrayLike, strict: bool = False):
    omega = 2 * math.pi * np.asarray(f, dtype=float)
    if strict:
        return _scalar(2 / np.sqrt(sigma_c * omega * const.MU0))
    return _scalar(np.sqrt(2 / (sigma_c * omega * const.MU0)))


def surface_resistance(sigma_c: float, f: ArrayLike, strict: bool = False):
    """R_s = 1 / (sigma_c * delta); zero for a perfect conductor."""
    omega = 2 * math.pi * np.asarray(f, dtype=float)
    # written without delta so that sigma_c = inf gives exactly 0
    if strict:
        return _scalar(0.5 * np.sqrt(omega * const.MU0 / sigma_c))
    return _scalar(np.sqrt(omega * const.MU0 / (2 * sigma_c)))


def ground_plane_capacitance(cell: UnitCellDesign) -> complex:
    """Patch-to-ground correction term (negative; vanishes for thick substrates)."""
    d = cell.period
    return (2 * d * const.EPS0 * cell.eps_r / math.pi) * math.log(
        1 - math.exp(-4 * math.pi * cell.thickness / d)
    )


def patch_capacitance(
    cell: UnitCellDesign, wave: IncidentWave, options: ModelOptions = DEFAULT_OPTIONS
):
    """Averaged grid capacitance of the patch array for TE or TM incidence."""
    eps_eff = effective_permittivity(cell)
    if wave.pol == Polarization.TM:
        period, gap = cell.period_x, cell.gap_x
        factor = 1.0
    else:
        period, gap = cell.period_y, cell.gap_y
        k_ratio = 1 / math.sqrt(eps_eff.real)  # k0 / k_eff
        factor = 1 - k_ratio**options.te_factor_exponent * np.sin(wave.theta) ** 2 / 2

    capacitance = (
        2 * period * const.EPS0 * eps_eff / math.pi
        * math.log(1 / math.sin(math.pi * gap / (2 * period)))
        * factor
    )

    if cell.ground_correction and cell.period_x != cell.period_y:
        raise ParameterRangeError(
            "ground-plane correction requires a square lattice (period_x == period_y)"
        )
    if cell.uses_ground_correction and cell.period_x == cell.period_y:
        capacitance = capacitance - ground_plane_capacitance(cell)
    return _scalar(np.asarray(capacitance, dtype=complex))


def patch_resistance(
    cell: UnitCellDesign, f: ArrayLike, options: ModelOptions = DEFAULT_OPTIONS
):
    """Ohmic resistance of the patch array, (D / (D - w))^2 R_s."""
    if not cell.is_square:
        raise ParameterRangeError("patch resistance is defined for square cells only")
    d, w = cell.period_x, cell.gap_x
    r_s = surface_resistance(cell.sigma_c, f, strict=options.strict_skin_depth)
    return _scalar((d / (d - w)) ** 2 * r_s)


def patch_surface_impedance(
    cell: UnitCellDesign, wave: IncidentWave, options: ModelOptions = DEFAULT_OPTIONS
):
    _check_validity(cell, wave)
    capacitance = patch_capacitance(cell, wave, options)
    resistance = patch_resistance(cell, wave.f, options)
    return _scalar(resistance + 1 / (1j * wave.omega * capacitance))


def varactor_impedance(varactor: VaractorModel, c_var: ArrayLike, f: ArrayLike):
    """Series R-L-C impedance of the varactor at capacitance c_var."""
    varactor.check_capacitance(c_var)
    omega = 2 * math.pi * np.asarray(f, dtype=float)
    c_var = np.asarray(c_var, dtype=float)
    return _scalar(varactor.r_var + 1j * omega * varactor.l_var + 1 / (1j * omega * c_var))


def loaded_surface_impedance(
    cell: UnitCellDesign,
    varactor: VaractorModel | None,
    c_var: ArrayLike | None,
    wave: IncidentWave,
    options: ModelOptions = DEFAULT_OPTIONS,
):
    """Patch impedance in parallel with the varactor; no varactor leaves the branch open."""
    z_patch = patch_surface_impedance(cell, wave, options)
    if varactor is None or c_var is None:
        return z_patch
    z_var = varactor_impedance(varactor, c_var, wave.f)
    return parallel_impedance(z_patch, z_var, _coordinates(wave, c_var))


def slab_characteristic_impedance(cell: UnitCellDesign, wave: IncidentWave):
    """Substrate line impedance along z and the normal wavenumber k_z."""
    sin2 = np.sin(wave.theta) ** 2
    # principal branch: Im(k_z) <= 0 whenever Im(eps_r) <= 0
    kz = wave.k0 * np.sqrt(cell.eps_r - sin2 + 0j)
    if wave.pol == Polarization.TE:
        z = wave.omega * const.MU0 / kz
    else:
        z = kz / (wave.omega * const.EPS0 * cell.eps_r)
    return _scalar(z), _scalar(kz)


def grounded_slab_impedance(cell: UnitCellDesign, wave: IncidentWave):
    """Input impedance of the shorted substrate line, j Z tan(k_z d)."""
    z, kz = slab_characteristic_impedance(cell, wave)
    tan = np.tan(kz * cell.thickness)
    if np.any(np.abs(tan) > const.TAN_FLAG_LIMIT):
        warnings.warn(
            "grounded slab near a quarter-wave resonance; |tan(k_z d)| exceeds "
            f"{const.TAN_FLAG_LIMIT:g}",
            NumericalWarning,
            stacklevel=2,
        )
    return _scalar(1j * z * tan)


def ris_input_impedance(
    cell: UnitCellDesign,
    varactor: VaractorModel | None,
    c_var: ArrayLike | None,
    wave: IncidentWave,
    options: ModelOptions = DEFAULT_OPTIONS,
):
    z_surf = loaded_surface_impedance(cell, varactor, c_var, wave, options)
    z_d = grounded_slab_impedance(cell, wave)
    return parallel_impedance(z_surf, z_d, _coordinates(wave, c_var))


def free_space_impedance(wave: IncidentWave):
    """Oblique wave impedance: zeta_0 cos(theta) for TM, zeta_0 / cos(theta) for TE."""
    cos = np.cos(wave.theta)
    if wave.pol == Polarization.TM:
        return _scalar(const.ZETA0 * cos)
    return _scalar(const.ZETA0 / cos)


def gamma_from_impedance(z_v: ArrayLike, wave: IncidentWave):
    zeta = free_space_impedance(wave)
    z_v = np.asarray(z_v, dtype=complex)
    return _scalar((z_v - zeta) / (z_v + zeta))


def reflection_coefficient(
    cell: UnitCellDesign,
    varactor: VaractorModel | None,
    c_var: ArrayLike | None,
    wave: IncidentWave,
    options: ModelOptions = DEFAULT_OPTIONS,
) -> ReflectionSample:
    z_v = ris_input_impedance(cell, varactor, c_var, wave, options)
    return ReflectionSample(
        gamma=gamma_from_impedance(z_v, wave),
        f=wave.f,
        theta=wave.theta,
        pol=wave.pol,
        c_var=c_var,
    )


def freestanding_sheet_response(z_surf: ArrayLike, wave: IncidentWave) -> SheetResponse:
    """Closed-form reflection/transmission of an impedance sheet in free space."""
    zeta = free_space_impedance(wave)
    z_surf = np.asarray(z_surf, dtype=complex)
    denom = 2 * z_surf + zeta
    if np.any(np.abs(denom) < const.SINGULAR_REL_TOL * np.maximum(np.abs(2 * z_surf), zeta)):
        raise SingularityError("2 Z_surf + zeta_0 = 0", _coordinates(wave))
    gamma = -zeta / denom
    tau = 2 * z_surf / denom
    z_v = parallel_impedance(z_surf, zeta, _coordinates(wave))
    gamma_tl = (z_v - zeta) / (z_v + zeta)
    return SheetResponse(gamma=_scalar(gamma), tau=_scalar(tau), gamma_tl=_scalar(gamma_tl))


def locate_resonance(
    cell: UnitCellDesign,
    varactor: VaractorModel | None,
    c_var: float | None,
    f_grid: ArrayLike,
    theta: float = 0.0,
    pol: Polarization = Polarization.TE,
    options: ModelOptions = DEFAULT_OPTIONS,
) -> Resonance:
    """Phase zero-crossing and amplitude minimum over a frequency sweep."""
    f_grid = np.asarray(f_grid, dtype=float)
    wave = IncidentWave(f=f_grid, theta=theta, pol=pol)
    gamma = reflection_coefficient(cell, varactor, c_var, wave, options).gamma
    phase = np.angle(gamma)
    amplitude = np.abs(gamma)

    # resonance: phase falls through zero; crossings through +-pi are wraps
    near_zero = (np.abs(phase[:-1]) < math.pi / 2) & (np.abs(phase[1:]) < math.pi / 2)
    crossings = np.flatnonzero(near_zero & (phase[:-1] > 0) & (phase[1:] <= 0))
    if crossings.size == 0:
        raise RisModelError(
            f"no phase zero-crossing in [{f_grid[0]:.4g}, {f_grid[-1]:.4g}] Hz for C_var={c_var}"
        )
    i = crossings[0]
    f0 = f_grid[i] + (f_grid[i + 1] - f_grid[i]) * phase[i] / (phase[i] - phase[i + 1])

    k = int(np.argmin(amplitude))
    _LOG.debug("Resonance for C_var=%s: phase zero %.6g Hz, |G| min %.6g Hz", c_var, f0, f_grid[k])
    return Resonance(
        f_phase_zero=float(f0),
        f_min_amplitude=float(f_grid[k]),
        min_amplitude=float(amplitude[k]),
    )


def phase_span(
    cell: UnitCellDesign,
    varactor: VaractorModel,
    f: float,
    pol: Polarization = Polarization.TE,
    theta: float = 0.0,
    c_count: int = const.INVERSION_SCAN_POINTS,
    options: ModelOptions = DEFAULT_OPTIONS,
) -> tuple[float, float]:
    """Extreme reflection phases (radians) reachable over [C_min, C_max]."""
    c_grid = np.geomspace(varactor.c_min, varactor.c_max, c_count)
    wave = IncidentWave(f=f, theta=theta, pol=pol)
    phase = np.unwrap(np.angle(reflection_coefficient(cell, varactor, c_grid, wave, options).gamma))
    return float(np.min(phase)), float(np.max(phase))
