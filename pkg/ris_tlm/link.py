"""
RIS-assisted link budget.

The surface lies in the xy-plane centred at the origin. Each cell scatters
like a small metallic plate weighted by its reflection coefficient, and the
received field is the coherent sum of all cell contributions:

    P_r = P_t lambda^2 / (4 pi)^3 |sum sqrt(G_t G_r sigma) Gamma e^{-j k (r_t + r_r)} / (r_t r_r)|^2

Time dependence is e^{+j omega t}; propagation contributes e^{-j k r}.

:copyright: (c) 2025 by the ris-tlm contributors.
:license: MPL-2.0, see LICENSE for more details.
"""

import logging
import math
import warnings
from dataclasses import replace

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.special import beta

from . import const
from .constants import Boresight, RcsObliquity
from .errors import DimensionError, FarFieldWarning, GeometryError, ParameterRangeError
from .models import (
    CellGeometry,
    ClosedFormPower,
    FieldMap,
    LinkScenario,
    PlaneSpec,
    SurfaceGeometry,
)

_LOG = logging.getLogger(__name__)

# receiver positions evaluated per vectorized block
_RX_CHUNK = 256


def cell_centers(scenario: LinkScenario) -> NDArray[np.float64]:
    """Cell centre coordinates, shape (M, N, 3); row m runs along y, column n along x."""
    m = np.arange(1, scenario.rows + 1)
    n = np.arange(1, scenario.columns + 1)
    x = (n - (scenario.columns + 1) / 2) * scenario.cell.period_x
    y = (m - (scenario.rows + 1) / 2) * scenario.cell.period_y
    centers = np.zeros((scenario.rows, scenario.columns, 3))
    centers[..., 0] = x[None, :]
    centers[..., 1] = y[:, None]
    return centers


def _directions(points: NDArray, source: NDArray):
    """Distance, polar angle, azimuth and signed polar angle of `source` seen from `points`."""
    v = np.asarray(source) - points
    r = np.linalg.norm(v, axis=-1)
    if np.any(r < const.GEOMETRY_MIN_DISTANCE):
        raise GeometryError("antenna position coincides with a cell centre")
    theta = np.arccos(np.clip(v[..., 2] / r, -1.0, 1.0))
    phi = np.arctan2(v[..., 1], v[..., 0])
    theta_signed = np.where(v[..., 1] < 0, -theta, theta)
    return r, theta, phi, theta_signed


def surface_geometry(scenario: LinkScenario) -> SurfaceGeometry:
    centers = cell_centers(scenario)
    r_t, theta_t, phi_t, theta_t_signed = _directions(centers, np.asarray(scenario.tx_pos))
    r_r, theta_r, phi_r, theta_r_signed = _directions(centers, np.asarray(scenario.rx_pos))
    return SurfaceGeometry(
        positions=centers,
        r_t=r_t,
        r_r=r_r,
        theta_t=theta_t,
        theta_r=theta_r,
        phi_t=phi_t,
        phi_r=phi_r,
        theta_t_signed=theta_t_signed,
        theta_r_signed=theta_r_signed,
    )


def cell_geometry(scenario: LinkScenario, m: int, n: int) -> CellGeometry:
    """Geometry of cell (m, n), 1-based."""
    if not (1 <= m <= scenario.rows and 1 <= n <= scenario.columns):
        raise GeometryError(
            f"cell ({m}, {n}) outside the {scenario.rows}x{scenario.columns} surface"
        )
    return surface_geometry(scenario).cell(m, n)


def antenna_gain(q: float, theta: ArrayLike, strict: bool = False):
    """cos^q gain normalized over the forward hemisphere; zero behind the antenna.

    The strict variant normalizes with the integral of cos^q over theta alone,
    omitting the sin(theta) solid-angle weight.
    """
    theta = np.asarray(theta, dtype=float)
    cos_q = np.clip(np.cos(theta), 0.0, None) ** q
    if strict:
        # int_0^{pi/2} cos^q = B((q+1)/2, 1/2) / 2
        gain = 4 * cos_q / beta((q + 1) / 2, 0.5)
    else:
        gain = 2 * (q + 1) * cos_q
    gain = np.where(theta < math.pi / 2, gain, 0.0)
    return gain[()] if gain.ndim == 0 else gain


def unit_cell_rcs(
    geom,
    wavelength: float,
    period_x: float,
    period_y: float,
    obliquity: RcsObliquity = RcsObliquity.INCIDENT,
    sign: float = 1.0,
):
    """Bistatic RCS of one cell treated as a small metallic plate.

    `geom` is a CellGeometry or SurfaceGeometry. The pattern argument uses the
    signed in-plane angles, so it vanishes in the specular direction.
    """
    k = 2 * math.pi / wavelength
    arg = k * period_y / 2 * (np.sin(geom.theta_r_signed) + sign * np.sin(geom.theta_t_signed))
    if obliquity == RcsObliquity.RECIPROCAL:
        obl = np.cos(geom.theta_t) * np.cos(geom.theta_r)
    else:
        obl = np.cos(geom.theta_t) ** 2
    # np.sinc(x) = sin(pi x) / (pi x), with the removable singularity at 0
    sigma = 4 * math.pi * (period_x * period_y / wavelength) ** 2 * obl * np.sinc(arg / math.pi) ** 2
    return sigma[()] if np.ndim(sigma) == 0 else sigma


def _gain_angles(source: NDArray, r: NDArray, theta: NDArray, points: NDArray, boresight: Boresight):
    if boresight == Boresight.NORMAL:
        return theta
    # antenna aimed at the surface centre
    axis = -source / np.linalg.norm(source, axis=-1, keepdims=True)
    to_cell = (points - source) / r[..., None]
    return np.arccos(np.clip(np.sum(axis * to_cell, axis=-1), -1.0, 1.0))


def _check_gamma(scenario: LinkScenario, gamma: ArrayLike) -> NDArray[np.complex128]:
    gamma = np.asarray(gamma, dtype=complex)
    if gamma.shape != scenario.shape:
        raise DimensionError(
            f"gamma matrix shape {gamma.shape} does not match surface {scenario.shape}"
        )
    if np.any(np.abs(gamma) > 1 + const.PASSIVE_TOL):
        raise ParameterRangeError("reflection coefficients must satisfy |Gamma| <= 1")
    return gamma


def received_power_at(
    scenario: LinkScenario,
    gamma: ArrayLike,
    rx_points: ArrayLike,
    rcs_sign: float = 1.0,
) -> NDArray[np.float64]:
    """Received power (W) for each receiver position in `rx_points`, shape (K, 3)."""
    gamma = _check_gamma(scenario, gamma)
    rx_points = np.atleast_2d(np.asarray(rx_points, dtype=float))
    if np.any(rx_points[:, 2] <= 0):
        raise GeometryError("receiver positions must lie in the z > 0 half-space")

    centers = cell_centers(scenario)
    tx = np.asarray(scenario.tx_pos)
    r_t, theta_t, _, theta_t_signed = _directions(centers, tx)
    gain_t = antenna_gain(
        scenario.q_t,
        _gain_angles(tx, r_t, theta_t, centers, scenario.boresight),
        strict=scenario.strict_gain,
    )
    lam = scenario.wavelength
    k = scenario.k0
    prefactor = scenario.tx_power * lam**2 / (4 * math.pi) ** 3

    power = np.empty(rx_points.shape[0])
    for start in range(0, rx_points.shape[0], _RX_CHUNK):
        rx = rx_points[start:start + _RX_CHUNK, None, None, :]
        r_r, theta_r, _, theta_r_signed = _directions(centers[None], rx)
        gain_r = antenna_gain(
            scenario.q_r,
            _gain_angles(rx, r_r, theta_r, centers[None], scenario.boresight),
            strict=scenario.strict_gain,
        )
        geom = SurfaceGeometry(
            positions=centers,
            r_t=r_t,
            r_r=r_r,
            theta_t=theta_t,
            theta_r=theta_r,
            phi_t=None,
            phi_r=None,
            theta_t_signed=theta_t_signed,
            theta_r_signed=theta_r_signed,
        )
        sigma = unit_cell_rcs(
            geom,
            lam,
            scenario.cell.period_x,
            scenario.cell.period_y,
            obliquity=scenario.rcs_obliquity,
            sign=rcs_sign,
        )
        terms = (
            np.sqrt(gain_t * gain_r * sigma)
            * gamma
            * np.exp(-1j * k * (r_t + r_r))
            / (r_t * r_r)
        )
        power[start:start + _RX_CHUNK] = prefactor * np.abs(terms.sum(axis=(1, 2))) ** 2
    return power


def received_power(scenario: LinkScenario, gamma: ArrayLike, rcs_sign: float = 1.0) -> float:
    """Coherent received power (W) at the scenario's receiver."""
    return float(received_power_at(scenario, gamma, [scenario.rx_pos], rcs_sign=rcs_sign)[0])


def field_map(scenario: LinkScenario, plane: PlaneSpec, gamma: ArrayLike) -> FieldMap:
    """Received power with the receiver swept over `plane`; gamma stays fixed."""
    points = plane.points()
    if np.any(points[..., 2] <= 0):
        raise GeometryError("field-map plane must lie entirely in z > 0")
    _LOG.debug(
        "Evaluating %dx%d field map on the %s%s-plane",
        plane.samples[0],
        plane.samples[1],
        plane.u_axis,
        plane.v_axis,
    )
    power = received_power_at(scenario, gamma, points.reshape(-1, 3))
    return FieldMap(plane=plane, power=power.reshape(points.shape[:2]), tx_power=scenario.tx_power)


def plate_rcs(
    a: float,
    b: float,
    theta_i: ArrayLike,
    theta_s: ArrayLike,
    phi_s: ArrayLike | None,
    wavelength: float,
):
    """Physical-optics RCS of an a x b conducting plate under yz-plane incidence.

    With phi_s=None the in-plane (yz-plane) pattern is returned.
    """
    k = 2 * math.pi / wavelength
    theta_i = np.asarray(theta_i, dtype=float)
    theta_s = np.asarray(theta_s, dtype=float)
    peak = 4 * math.pi * (a * b / wavelength) ** 2
    if phi_s is None:
        y = k * b / 2 * (np.sin(theta_s) - np.sin(theta_i))
        sigma = peak * np.cos(theta_i) ** 2 * np.sinc(y / math.pi) ** 2
    else:
        phi_s = np.asarray(phi_s, dtype=float)
        x = k * a / 2 * np.sin(theta_s) * np.cos(phi_s)
        y = k * b / 2 * (np.sin(theta_s) * np.sin(phi_s) - np.sin(theta_i))
        sigma = (
            peak
            * (np.cos(theta_s) ** 2 * np.sin(phi_s) ** 2 + np.cos(phi_s) ** 2)
            * np.sinc(x / math.pi) ** 2
            * np.sinc(y / math.pi) ** 2
        )
    return sigma[()] if np.ndim(sigma) == 0 else sigma


def _db(values: NDArray) -> NDArray:
    with np.errstate(divide="ignore"):
        return 10 * np.log10(values / np.max(values))


def plate_pattern_db(
    a: float, b: float, theta_i: float, theta_s: ArrayLike, wavelength: float
) -> NDArray[np.float64]:
    """In-plane plate RCS normalized to its maximum, dB."""
    return _db(np.asarray(plate_rcs(a, b, theta_i, theta_s, None, wavelength)))


def array_pattern_db(
    scenario: LinkScenario,
    theta_i: float,
    theta_s: ArrayLike,
    distance: float,
    rcs_sign: float = 1.0,
) -> NDArray[np.float64]:
    """Normalized yz-plane scattering pattern of an all-PEC surface from the coherent sum.

    The transmitter sits at `distance` on the y < 0 side at angle theta_i; the
    receiver sweeps signed angles theta_s on the same arc. Isotropic hemispheric
    antennas isolate the surface pattern.
    """
    theta_s = np.asarray(theta_s, dtype=float)
    tx = (0.0, -distance * math.sin(theta_i), distance * math.cos(theta_i))
    isotropic = replace(scenario, tx_pos=tx, rx_pos=tx, q_t=0.0, q_r=0.0, boresight=Boresight.NORMAL)
    rx = np.stack(
        [np.zeros_like(theta_s), distance * np.sin(theta_s), distance * np.cos(theta_s)], axis=-1
    )
    gamma = -np.ones(scenario.shape, dtype=complex)
    return _db(received_power_at(isotropic, gamma, rx, rcs_sign=rcs_sign))


def _is_far_field(scenario: LinkScenario, r_t: float, r_r: float) -> bool:
    diag = scenario.diagonal
    limit = max(const.FAR_FIELD_DIAGONALS * diag, 2 * diag**2 / scenario.wavelength)
    return min(r_t, r_r) >= limit


def pec_closed_form_power(scenario: LinkScenario, form: str = "general") -> ClosedFormPower:
    """Received power of an all-PEC surface from the single-angle far-field closed forms.

    `general` multiplies the centre-cell radar equation by (MN)^2; `bistatic`
    is the specular form, independent of frequency.
    """
    centre = np.zeros((1, 1, 3))
    tx = np.asarray(scenario.tx_pos)
    rx = np.asarray(scenario.rx_pos)
    r_t, theta_t, phi_t, theta_t_signed = _directions(centre, tx)
    r_r, theta_r, phi_r, theta_r_signed = _directions(centre, rx)
    gain_t = antenna_gain(
        scenario.q_t, _gain_angles(tx, r_t, theta_t, centre, scenario.boresight), scenario.strict_gain
    )
    gain_r = antenna_gain(
        scenario.q_r, _gain_angles(rx, r_r, theta_r, centre, scenario.boresight), scenario.strict_gain
    )
    rt, rr = float(r_t[0, 0]), float(r_r[0, 0])
    g = float(gain_t[0, 0] * gain_r[0, 0])
    far = _is_far_field(scenario, rt, rr)
    if not far:
        warnings.warn(
            "closed-form PEC power outside its far-field regime "
            f"(r_t={rt:.3g} m, r_r={rr:.3g} m, diagonal={scenario.diagonal:.3g} m)",
            FarFieldWarning,
            stacklevel=2,
        )

    if form == "general":
        geom = SurfaceGeometry(
            positions=centre,
            r_t=r_t,
            r_r=r_r,
            theta_t=theta_t,
            theta_r=theta_r,
            phi_t=phi_t,
            phi_r=phi_r,
            theta_t_signed=theta_t_signed,
            theta_r_signed=theta_r_signed,
        )
        sigma = float(
            unit_cell_rcs(
                geom,
                scenario.wavelength,
                scenario.cell.period_x,
                scenario.cell.period_y,
                obliquity=scenario.rcs_obliquity,
            )[0, 0]
        )
        mn = scenario.rows * scenario.columns
        power = (
            scenario.tx_power * scenario.wavelength**2 * mn**2 * g * sigma
            / ((4 * math.pi) ** 3 * rt**2 * rr**2)
        )
    elif form == "bistatic":
        area = scenario.size_x * scenario.size_y
        power = (
            scenario.tx_power * area**2 * g * math.cos(float(theta_t[0, 0])) ** 2
            / ((4 * math.pi) ** 2 * rt**2 * rr**2)
        )
    else:
        raise ParameterRangeError(f"unknown closed form '{form}', expected general or bistatic")
    return ClosedFormPower(power=float(power), form=form, far_field=far)
