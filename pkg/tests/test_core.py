import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from wqed import (
    CoordinatePair,
    PoleError,
    SystemParams,
    TwoPhotonInput,
    gamma_from_coupling,
    incoming_wavefunction,
    single_photon_amplitudes,
)

from strategies import couplings, coordinates, detunings, losses, pairs, positions


def test_lossless_resonance_reflects_fully():
    t, r = single_photon_amplitudes(0.0, SystemParams(gamma=1.0, kappa=0.0))
    assert t == 0
    assert r == pytest.approx(-1.0, abs=1e-15)


@pytest.mark.parametrize("detuning,kappa", [(0.0, 1.0), (2.5, 0.3), (-1.0, 4.0)])
def test_decoupled_cavity_is_transparent(detuning, kappa):
    t, r = single_photon_amplitudes(detuning, SystemParams(gamma=0.0, kappa=kappa))
    assert t == pytest.approx(1.0, abs=1e-15)
    assert r == 0


def test_matched_loss_halves_amplitudes():
    # (i/2)/(i) and (-i/2)/(i) by hand.
    t, r = single_photon_amplitudes(0.0, SystemParams(gamma=1.0, kappa=1.0))
    assert t == pytest.approx(0.5, abs=1e-15)
    assert r == pytest.approx(-0.5, abs=1e-15)


def test_fully_degenerate_denominator_raises():
    with pytest.raises(PoleError, match="detuning"):
        single_photon_amplitudes(0.0, SystemParams(gamma=0.0, kappa=0.0))


@given(detunings, losses, couplings)
def test_lossy_cavity_loses_probability(detuning, kappa, gamma):
    t, r = single_photon_amplitudes(detuning, SystemParams(gamma=gamma, kappa=kappa))
    assert abs(t) ** 2 + abs(r) ** 2 < 1.0


@given(detunings, couplings)
def test_lossless_cavity_conserves_probability(detuning, gamma):
    t, r = single_photon_amplitudes(detuning, SystemParams(gamma=gamma, kappa=0.0))
    assert abs(t) ** 2 + abs(r) ** 2 == pytest.approx(1.0, abs=1e-12)


@given(detunings, st.floats(0.0, 10.0), couplings)
def test_transmission_is_one_plus_reflection(detuning, kappa, gamma):
    t, r = single_photon_amplitudes(detuning, SystemParams(gamma=gamma, kappa=kappa))
    assert abs(t - (1.0 + r)) < 1e-14


def test_amplitudes_broadcast_over_arrays():
    grid = np.linspace(-2, 2, 9)
    t, r = single_photon_amplitudes(grid, SystemParams())
    assert t.shape == grid.shape
    for value, expected in zip(t, [single_photon_amplitudes(d, SystemParams())[0] for d in grid]):
        assert value == expected


@pytest.mark.parametrize("coupling,v_c,expected", [(0.0, 1.0, 0.0), (1.0, 1.0, 2.0), (1 / np.sqrt(2), 1.0, 1.0)])
def test_gamma_from_coupling(coupling, v_c, expected):
    assert gamma_from_coupling(coupling, v_c) == pytest.approx(expected, rel=1e-15)


def test_coupling_construction_matches_even_mode_rate():
    params = SystemParams.from_coupling(0.8, v_c=2.0, kappa=1.0)
    assert params.gamma == pytest.approx(2 * 0.8**2 / 2.0)
    assert params.even_coupling**2 / params.v_c == pytest.approx(params.gamma, rel=1e-15)


@pytest.mark.parametrize("kwargs", [{"gamma": -1.0}, {"kappa": -0.1}, {"v_c": 0.0}])
def test_invalid_parameters_rejected(kwargs):
    with pytest.raises(ValueError):
        SystemParams(**kwargs)


def test_second_detuning_is_derived():
    pair = TwoPhotonInput(delta1=0.7, delta_a=0.1, omega=3.0)
    assert pair.delta2 == -0.7
    k1, k2 = pair.wavenumbers()
    assert k1 + k2 == pytest.approx(3.0)


def test_coordinates_center_and_relative():
    c = CoordinatePair(1.5, -2.5)
    assert c.center == -0.5
    assert c.relative == -4.0


@pytest.mark.parametrize("delta1", [0.0, 0.3, -2.0])
def test_coincident_origin_gives_normalization(delta1):
    value = incoming_wavefunction(TwoPhotonInput(delta1=delta1, omega=1.3), CoordinatePair(0.0, 0.0))
    assert value == pytest.approx(0.225079079, abs=1e-9)


@given(positions, positions)
def test_degenerate_photons_at_zero_energy_are_constant(x1, x2):
    value = incoming_wavefunction(TwoPhotonInput(delta1=0.0), CoordinatePair(x1, x2))
    assert value == pytest.approx(1.0 / (np.sqrt(2) * np.pi), abs=1e-15)


def test_cosine_node():
    delta1 = 0.25
    x = np.pi / 2 / delta1
    value = incoming_wavefunction(TwoPhotonInput(delta1=delta1), CoordinatePair(0.0, x))
    assert abs(value) < 1e-15


@given(pairs(), coordinates())
def test_incoming_wavefunction_symmetric_and_factored(pair, coords):
    value = incoming_wavefunction(pair, coords)
    assert value == incoming_wavefunction(pair, coords.swapped())
    factored = np.exp(1j * pair.omega * coords.center) * np.cos(pair.delta1 * coords.relative) / (np.sqrt(2) * np.pi)
    assert abs(value - factored) < 1e-13
    assert abs(value) <= 1.0 / (np.sqrt(2) * np.pi) + 1e-15
