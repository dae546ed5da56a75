import numpy as np
import pytest
from scipy.linalg import expm

from wqed import SignalTooSmall, SystemParams, single_photon_amplitudes
from wqed.oracle import OracleResult, run_oracle
from wqed.timebin import TimeBinModel, estimate, local_generators, single_photon_lineshape


@pytest.fixture(scope="module")
def blockade():
    return run_oracle(gamma=1.0, kappa=1.0, u=10.0)


def test_local_step_transfers_half_the_rate_each_way():
    dt = 1e-4
    single, _ = local_generators(2.0, 0.0, 0.0, 0.0, dt)
    out = expm(-1j * dt * single) @ np.array([1.0, 0.0, 0.0])
    assert abs(out[1]) ** 2 == pytest.approx(2.0 / 2 * dt, rel=1e-3)


def test_pair_generator_interaction_on_double_occupation():
    _, base = local_generators(1.0, 0.5, 0.0, 0.2, 0.01)
    _, kerr = local_generators(1.0, 0.5, 3.0, 0.2, 0.01)
    diff = kerr - base
    assert diff[0, 0] == pytest.approx(6.0)
    assert np.count_nonzero(diff) == 1


@pytest.mark.parametrize("kwargs", [{"bin_width": 0.0}, {"settle": 1.0}, {"gamma": -1.0}, {"duration": 0.01}])
def test_invalid_models(kwargs):
    with pytest.raises(ValueError):
        TimeBinModel(**kwargs)


def test_linear_cavity_is_uncorrelated():
    result = estimate(TimeBinModel(gamma=2.0, kappa=0.5, u=0.0, delta1=0.3))
    assert result.eta_t == pytest.approx(1.0, abs=1e-12)
    assert result.eta_r == pytest.approx(1.0, abs=1e-12)


def test_decoupled_cavity():
    result = estimate(TimeBinModel(gamma=0.0, kappa=1.0, u=4.0))
    assert result.eta_t == pytest.approx(1.0, abs=1e-12)
    assert np.isnan(result.eta_r)


def test_blocked_transmission_is_too_small():
    with pytest.raises(SignalTooSmall):
        estimate(TimeBinModel(gamma=1.0, kappa=0.0, u=1.0), min_signal=1e-3)


def test_lineshape_against_continuum():
    detunings = np.linspace(-2.0, 2.0, 9)
    model = TimeBinModel(gamma=1.0, kappa=1.0, bin_width=0.005, duration=20.0)
    numeric = single_photon_lineshape(model, detunings)
    exact, _ = single_photon_amplitudes(detunings, SystemParams(gamma=1.0, kappa=1.0))
    assert np.max(np.abs(numeric - exact)) < 5e-3


def test_blockade_ratio(blockade):
    assert abs(blockade.eta_t_estimate * 101 - 1) < 0.10


def test_resolution_change_small_and_reported(blockade):
    coarse = estimate(TimeBinModel(u=10.0, bin_width=0.01, duration=20.0))
    assert blockade.eta_t_error == pytest.approx(abs(blockade.eta_t_estimate - coarse.eta_t), rel=1e-12)
    assert blockade.eta_t_error / blockade.eta_t_estimate < 0.02


def test_oracle_transmission(blockade):
    assert abs(blockade.t_bar_estimate - 0.5) < 1e-3


def test_tunneling_regime():
    result = run_oracle(gamma=2.0, kappa=1.0, u=10.0, bin_width=0.02)
    assert result.eta_t_estimate == pytest.approx(8.824, rel=0.05)


def test_result_serializes(blockade):
    record = blockade.to_dict()
    assert isinstance(blockade, OracleResult)
    assert set(record) >= {"eta_t_estimate", "eta_t_error", "t_bar_estimate_re", "t_bar_estimate_im"}
    assert all(isinstance(v, float) for v in record.values())
