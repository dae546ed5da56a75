import warnings

import numpy as np
import pytest
import scipy.sparse as sp
from scipy.linalg import expm

from wqed import ConvergenceError, DimensionError, LatticeModel, SignalTooSmall
from wqed.lattice import (
    KrylovPropagator,
    build_two_excitation_hamiltonian,
    centroid,
    extract_observables,
    factorization_overlap,
    gaussian_packet,
    loss_structure_defect,
    pair_dimension,
    propagate_wavepacket,
    single_excitation_matrix,
)
from wqed.oracle import chain_lineshape


def small(**kwargs):
    """A chain too short for the narrowband limit; fine for exact invariants."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        return LatticeModel(**{"n_sites": 160, "packet_width": 10.0, **kwargs})


def test_decay_rate_mapping():
    model = LatticeModel.for_decay_rate(1.5, hopping=4.0, n_sites=400)
    assert model.velocity == pytest.approx(8.0)
    assert model.gamma_eff == pytest.approx(1.5, rel=1e-14)
    assert model.coupling == pytest.approx(np.sqrt(1.5 * 8.0 / 2.0))


def test_narrowband_warning():
    with pytest.warns(RuntimeWarning, match="bandwidth"):
        LatticeModel.for_decay_rate(1.0, packet_width=10.0)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        LatticeModel.for_decay_rate(1.0)


def test_free_two_boson_spectrum_in_doubled_band():
    model = small(n_sites=24, coupling=0.0, kappa=0.0, u=0.0, cavity_detuning=0.0)
    op = build_two_excitation_hamiltonian(model)
    assert op.dimension == pair_dimension(25)
    energies = np.linalg.eigvals(op.matrix.toarray())
    assert np.max(np.abs(energies.imag)) < 1e-12
    # Pairs with the decoupled cavity sit at the carrier energy (0) plus one band energy.
    assert np.all(np.abs(energies.real) <= 4.0 * model.hopping + 1e-12)


def test_interaction_on_doubly_occupied_cavity():
    base = build_two_excitation_hamiltonian(small(n_sites=20, u=0.0))
    kerr = build_two_excitation_hamiltonian(small(n_sites=20, u=1.7))
    diff = (kerr.matrix - base.matrix).tocoo()
    assert list(zip(diff.row, diff.col)) == [(kerr.cavity_pair_index, kerr.cavity_pair_index)]
    assert diff.data[0] == pytest.approx(2 * 1.7)


def test_loss_is_the_only_non_hermitian_part():
    model = small(n_sites=30, kappa=0.8, u=2.0, cavity_detuning=0.3)
    op = build_two_excitation_hamiltonian(model)
    assert loss_structure_defect(op, model) < 1e-14
    anti = ((op.matrix - op.matrix.conj().T) / 2).diagonal()
    assert anti[op.cavity_pair_index] == pytest.approx(-0.8j)
    single = single_excitation_matrix(model)
    assert abs(single - single.conj().T).max() == pytest.approx(0.8)


def test_dimension_budget():
    with pytest.raises(DimensionError):
        build_two_excitation_hamiltonian(small(n_sites=100, max_dimension=1000))


def test_krylov_matches_dense_exponential():
    model = small(n_sites=40, kappa=0.5, u=1.0)
    matrix = build_two_excitation_hamiltonian(model).matrix
    rng = np.random.default_rng(1)
    psi = rng.normal(size=matrix.shape[0]) + 1j * rng.normal(size=matrix.shape[0])
    exact = expm(-1j * 0.7 * matrix.toarray()) @ psi
    approx = KrylovPropagator(matrix).propagate(psi, 0.7)
    assert np.linalg.norm(approx - exact) < 1e-9 * np.linalg.norm(psi)


def test_krylov_reports_failure():
    matrix = sp.diags(np.linspace(-100, 100, 400)).tocsr().astype(complex)
    propagator = KrylovPropagator(matrix, krylov_dim=2, tolerance=1e-15, min_fraction=0.25)
    with pytest.raises(ConvergenceError):
        propagator.propagate(np.ones(400, dtype=complex), 10.0)


def test_packet_must_start_three_widths_away():
    model = small()
    with pytest.raises(ValueError, match="three widths"):
        propagate_wavepacket(model, gaussian_packet(model, -20.0), excitations=1)


def test_free_propagation_conserves_norm():
    model = small(coupling=0.0, kappa=0.0)
    single = propagate_wavepacket(model, excitations=1)
    pair = propagate_wavepacket(model)
    assert np.max(np.abs(single.norms - 1)) < 1e-9
    assert np.max(np.abs(pair.norms - 1)) < 1e-9
    assert pair.max_step_error < 1e-9


def test_lossy_propagation_never_gains_norm():
    model = small(coupling=1.5, kappa=1.0, u=3.0)
    run = propagate_wavepacket(model)
    assert np.all(np.diff(run.norms) <= 1e-12)
    assert run.norms[-1] < 1.0


def test_group_velocity_from_centroid():
    model = small(n_sites=400, packet_width=20.0, coupling=0.0, kappa=0.0)
    start = -60.0
    run = propagate_wavepacket(model, gaussian_packet(model, start), excitations=1, duration=12.0)
    velocity = (centroid(model, run.state) - start) / 12.0
    assert velocity == pytest.approx(model.velocity, rel=0.01)


def test_linear_pair_factorizes():
    model = small(coupling=np.sqrt(4.0), kappa=1.0, u=0.0)
    pair = propagate_wavepacket(model)
    single = propagate_wavepacket(model, excitations=1)
    assert factorization_overlap(pair, single) > 0.999


def test_decoupled_cavity_leaves_pairs_uncorrelated():
    model = small(coupling=0.0, kappa=0.0, u=5.0)
    linear = propagate_wavepacket(small(coupling=0.0, kappa=0.0, u=0.0))
    result = extract_observables(propagate_wavepacket(model), linear)
    assert result.eta_t == pytest.approx(1.0, abs=1e-9)


def test_signal_too_small_before_arrival():
    model = small(coupling=0.0, kappa=0.0)
    early = propagate_wavepacket(model, duration=0.5)
    with pytest.raises(SignalTooSmall):
        extract_observables(early, early)


def test_single_photon_transmission_amplitude():
    model = small(coupling=0.0, kappa=0.0)
    single = propagate_wavepacket(model, excitations=1)
    pair = propagate_wavepacket(model)
    result = extract_observables(pair, pair, single, single)
    assert result.t_bar == pytest.approx(1.0, abs=1e-12)


def test_chain_lineshape_matches_continuum():
    result = chain_lineshape(gamma_eff=1.0, kappa=1.0)
    assert result.max_relative_error < 0.05


def test_lossless_resonance_reflects():
    result = chain_lineshape(gamma_eff=1.0, kappa=0.0, detunings=[0.0])
    assert result.chain[0] < 0.02
