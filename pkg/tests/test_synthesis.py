import math
from unittest.mock import patch

import numpy as np
import pytest

from ris_tlm import const, synthesis
from ris_tlm.constants import Polarization, SynthesisMode
from ris_tlm.errors import DimensionError, ParameterRangeError
from ris_tlm.link import cell_centers, received_power, surface_geometry
from ris_tlm.models import (
    CapacitanceMap,
    IncidentWave,
    LinkScenario,
    PhaseProfile,
    UnitCellDesign,
    VaractorModel,
    wrap_phase,
)
from ris_tlm.synthesis import (
    PhaseInverter,
    build_lookup_table,
    capacitance_error_map,
    capacitance_for_phase,
    ideal_phase_profile,
    synthesize_capacitances,
    synthesize_surface,
)
from ris_tlm.tlm import reflection_coefficient

F8 = 8e9


@pytest.fixture
def cell():
    return UnitCellDesign()


@pytest.fixture
def varactor():
    return VaractorModel()


@pytest.fixture
def small_scenario():
    return LinkScenario(rows=8, columns=8)


def test_wrap_phase():
    assert wrap_phase(math.pi) == pytest.approx(math.pi)
    assert wrap_phase(-math.pi) == pytest.approx(math.pi)
    assert wrap_phase(1.5 * math.pi) == pytest.approx(-0.5 * math.pi)
    assert wrap_phase(0.25) == pytest.approx(0.25)
    wrapped = wrap_phase(np.linspace(-20, 20, 101))
    assert np.all(wrapped > -math.pi)
    assert np.all(wrapped <= math.pi)


def test_wrap_phase_just_above_pi():
    above = np.nextafter(math.pi, math.inf)
    assert wrap_phase(above) == math.pi
    wrapped = wrap_phase(np.array([above, -math.pi, 3 * math.pi]))
    assert np.all(wrapped > -math.pi)
    PhaseProfile(phases=wrapped.reshape(1, 3))


def test_phase_profile_range():
    with pytest.raises(ParameterRangeError):
        PhaseProfile(phases=np.array([[-math.pi]]))


def test_ideal_phase_profile_reference_scenario():
    scenario = LinkScenario()
    profile = ideal_phase_profile(scenario)
    assert profile.shape == (30, 30)

    corner = cell_centers(scenario)[0, 0]
    assert corner == pytest.approx([-0.0725, -0.0725, 0.0])
    r_t = np.linalg.norm(np.array(scenario.tx_pos) - corner)
    r_r = np.linalg.norm(np.array(scenario.rx_pos) - corner)
    expected = wrap_phase(scenario.k0 * (r_t + r_r))
    assert profile.phases[0, 0] == pytest.approx(expected, abs=1e-9)


def test_lookup_table_grid_and_views(cell, varactor):
    theta = np.radians(np.linspace(0, 60, 7))
    c_grid = np.geomspace(varactor.c_min, varactor.c_max, 9)
    table = build_lookup_table(cell, varactor, F8, Polarization.TE, theta, c_grid)
    assert table.gamma.shape == (7, 9)
    assert table.amplitude_db.shape == (7, 9)
    assert np.all(table.amplitude_db <= 1e-8)
    assert np.all(np.abs(table.phase_deg) <= 180)


def test_lookup_table_matches_direct_evaluation(cell, varactor):
    theta = np.radians(np.linspace(0, 60, 7))
    c_grid = np.geomspace(varactor.c_min, varactor.c_max, 9)
    table = build_lookup_table(cell, varactor, F8, Polarization.TM, theta, c_grid)

    tt, cc = np.meshgrid(theta, c_grid, indexing="ij")
    assert np.array_equal(table.interpolate(tt, cc), table.gamma)
    for i, j in [(0, 0), (3, 4), (6, 8)]:
        direct = reflection_coefficient(cell, varactor, c_grid[j], IncidentWave(F8, theta[i], Polarization.TM)).gamma
        assert table.gamma[i, j] == pytest.approx(direct, rel=1e-12)


def test_lookup_table_interpolates_bilinearly(cell, varactor):
    theta = np.array([0.1, 0.3])
    c_grid = np.array([0.2e-12, 0.3e-12])
    table = build_lookup_table(cell, varactor, F8, Polarization.TE, theta, c_grid)
    mid = table.interpolate(0.2, 0.25e-12)
    assert mid == pytest.approx(table.gamma.mean(), rel=1e-12)


def test_lookup_table_rejects_bad_grids(cell, varactor):
    with pytest.raises(ParameterRangeError):
        build_lookup_table(cell, varactor, F8, Polarization.TE, [0.0], [0.2e-12, 0.6e-12])
    with pytest.raises(ParameterRangeError):
        build_lookup_table(cell, varactor, F8, Polarization.TE, [0.0, math.pi / 2], [0.2e-12])
    with pytest.raises(ParameterRangeError):
        build_lookup_table(cell, varactor, F8, Polarization.TE, [0.3, 0.1], [0.2e-12])
    with pytest.raises(ParameterRangeError):
        build_lookup_table(cell, varactor, F8, Polarization.TE, [], [0.2e-12])


@pytest.mark.parametrize("pol", [Polarization.TE, Polarization.TM])
def test_inversion_recovers_reachable_phases(cell, varactor, pol):
    rng = np.random.default_rng(11)
    thetas = rng.uniform(0, math.radians(89), 120)
    c_true = np.exp(rng.uniform(math.log(varactor.c_min), math.log(varactor.c_max), 120))
    for theta, c in zip(thetas, c_true):
        wave = IncidentWave(F8, theta, pol)
        target = float(np.angle(reflection_coefficient(cell, varactor, c, wave).gamma))
        result = capacitance_for_phase(cell, varactor, F8, pol, theta, target)
        assert varactor.c_min <= result.c_var <= varactor.c_max
        assert abs(wrap_phase(np.angle(result.gamma) - target)) < math.radians(1)
        assert not result.clamped


def test_inversion_clamps_unreachable_phase(cell, varactor):
    target = math.radians(90)
    result = capacitance_for_phase(cell, varactor, F8, Polarization.TE, 0.0, target)
    assert result.clamped

    scan = np.geomspace(varactor.c_min, varactor.c_max, 10_000)
    gamma = reflection_coefficient(cell, varactor, scan, IncidentWave(F8)).gamma
    best = np.min(np.abs(wrap_phase(np.angle(gamma) - target)))
    assert best > 0.1
    assert result.phase_error <= best + 1e-9


def test_inversion_is_no_worse_than_dense_scan(cell, varactor):
    rng = np.random.default_rng(5)
    scan = np.geomspace(varactor.c_min, varactor.c_max, 10_000)
    for _ in range(40):
        theta = rng.uniform(0, math.radians(89))
        pol = (Polarization.TE, Polarization.TM)[rng.integers(2)]
        target = rng.uniform(-math.pi, math.pi)
        result = capacitance_for_phase(cell, varactor, F8, pol, theta, target)
        gamma = reflection_coefficient(cell, varactor, scan, IncidentWave(F8, theta, pol)).gamma
        best = np.min(np.abs(wrap_phase(np.angle(gamma) - target)))
        assert result.phase_error <= best + 1e-9
        assert result.clamped == (result.phase_error > const.CLAMP_PHASE_TOL)


def test_normal_mode_shares_one_inverter(cell, varactor):
    targets = np.linspace(-2.5, -1.0, 12).reshape(3, 4)
    angles = np.radians(np.linspace(5, 50, 12)).reshape(3, 4)
    with patch.object(synthesis, "PhaseInverter", wraps=PhaseInverter) as spy:
        synthesize_capacitances(cell, varactor, F8, Polarization.TE, targets, angles, SynthesisMode.NORMAL)
    assert spy.call_count == 1
    with patch.object(synthesis, "PhaseInverter", wraps=PhaseInverter) as spy:
        synthesize_capacitances(cell, varactor, F8, Polarization.TE, targets, angles, SynthesisMode.OBLIQUE)
    assert spy.call_count == 12


def test_achieved_reflection_uses_true_incidence(cell, varactor):
    targets = np.full((2, 3), -2.0)
    angles = np.radians([[0, 20, 40], [10, 30, 50]])
    normal = synthesize_capacitances(cell, varactor, F8, Polarization.TE, targets, angles, SynthesisMode.NORMAL)
    oblique = synthesize_capacitances(cell, varactor, F8, Polarization.TE, targets, angles, "oblique")

    # normal mode picks one capacitance for every cell of equal target
    assert np.all(normal.capacitance == normal.capacitance[0, 0])
    expected = reflection_coefficient(cell, varactor, normal.capacitance, IncidentWave(F8, angles)).gamma
    assert normal.gamma == pytest.approx(expected, rel=1e-12)

    assert not oblique.clamped.any()
    assert np.max(np.abs(wrap_phase(np.angle(oblique.gamma) - targets))) < 1e-5
    assert np.max(np.abs(wrap_phase(np.angle(normal.gamma) - targets))) > 1e-3


def test_synthesis_shape_mismatch(cell, varactor):
    with pytest.raises(DimensionError):
        synthesize_capacitances(
            cell, varactor, F8, Polarization.TE, np.zeros((2, 2)), np.zeros((2, 3)), SynthesisMode.NORMAL
        )


def test_synthesize_surface(small_scenario):
    normal = synthesize_surface(small_scenario, SynthesisMode.NORMAL)
    oblique = synthesize_surface(small_scenario, SynthesisMode.OBLIQUE)
    for cap_map in (normal, oblique):
        assert cap_map.shape == (8, 8)
        assert np.all(cap_map.capacitance >= small_scenario.varactor.c_min)
        assert np.all(cap_map.capacitance <= small_scenario.varactor.c_max)
        assert cap_map.scenario_digest == small_scenario.digest()
        assert cap_map.f == small_scenario.f

    error = capacitance_error_map(oblique, normal)
    assert error.shape == (8, 8)
    assert np.all(error >= 0)
    assert np.any(error > 0)


def test_ideal_reflection_bounds_synthesized_power(small_scenario):
    ideal = received_power(small_scenario, np.exp(1j * ideal_phase_profile(small_scenario).phases))
    for mode in SynthesisMode:
        synthesized = received_power(small_scenario, synthesize_surface(small_scenario, mode).gamma)
        assert ideal >= synthesized


def test_oblique_cells_match_their_incidence_angle(small_scenario):
    geom = surface_geometry(small_scenario)
    # mirrored rows see the same incidence angle and get the same capacitance
    oblique = synthesize_surface(small_scenario, SynthesisMode.OBLIQUE)
    assert np.array_equal(geom.theta_t, geom.theta_t[::-1])
    assert oblique.capacitance == pytest.approx(oblique.capacitance[::-1], rel=1e-6)


def test_capacitance_error_map():
    a = CapacitanceMap(capacitance=[[2e-13, 4e-13]], gamma=[[1, 1]], mode="oblique")
    b = CapacitanceMap(capacitance=[[1e-13, 4e-13]], gamma=[[1, 1]], mode="normal")
    assert capacitance_error_map(a, b) == pytest.approx(np.array([[50.0, 0.0]]))
    c = CapacitanceMap(capacitance=[[1e-13]], gamma=[[1]], mode="normal")
    with pytest.raises(DimensionError):
        capacitance_error_map(a, c)


def test_scenario_digest_is_stable(small_scenario):
    assert small_scenario.digest() == LinkScenario(rows=8, columns=8).digest()
    assert small_scenario.digest() != LinkScenario(rows=8, columns=8, f=7e9).digest()


@pytest.fixture(scope="module")
def reference_maps():
    scenario = LinkScenario()
    return scenario, {mode: synthesize_surface(scenario, mode) for mode in SynthesisMode}


def test_reference_scenario_power_ordering(reference_maps):
    scenario, maps = reference_maps
    ideal = received_power(scenario, np.exp(1j * ideal_phase_profile(scenario).phases))
    normal = received_power(scenario, maps[SynthesisMode.NORMAL].gamma)
    oblique = received_power(scenario, maps[SynthesisMode.OBLIQUE].gamma)
    assert ideal >= oblique >= normal
    assert 10 * math.log10(oblique / normal) == pytest.approx(3.9, abs=1.5)


def test_reference_scenario_capacitance_error(reference_maps):
    _, maps = reference_maps
    normal, oblique = maps[SynthesisMode.NORMAL], maps[SynthesisMode.OBLIQUE]
    error = capacitance_error_map(oblique, normal)
    assert error.shape == (30, 30)
    assert np.all(np.isfinite(error))
    assert error.max() > 50
    # the steep incidence across this surface leaves most targets out of reach at normal incidence
    assert normal.clamped.sum() > oblique.clamped.sum()
