"""Tight-binding waveguide with a side-coupled lossy Kerr cavity.

The waveguide is a chain with hopping ``J`` (band ``-2J cos k``), the cavity
couples with strength ``g`` to the middle site.  Near the band center the
group velocity is ``2J`` and the cavity decays into the chain at
``gamma_eff = 2 g^2 / v``.

States with one or two excitations are propagated in time with a Krylov
(Arnoldi) propagator.  The two-excitation basis consists of symmetrized
pairs over the ``n_sites + 1`` modes (chain sites plus the cavity).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.sparse as sp
from scipy.linalg import expm

from .errors import ConvergenceError, DimensionError, SignalTooSmall

NARROWBAND_LIMIT = 0.1


@dataclass(frozen=True)
class LatticeModel:
    """Chain, cavity and wavepacket configuration.

    Attributes:
        n_sites: Number of chain sites; the cavity couples to site ``n_sites // 2``.
        hopping: Nearest-neighbour hopping ``J``.
        coupling: Site-cavity coupling ``g``.
        cavity_detuning: Cavity frequency relative to the carrier energy.
        kappa: Intrinsic cavity loss (non-Hermitian ``-i kappa/2`` term).
        u: Kerr interaction on the cavity.
        packet_center_k: Carrier wavevector of the packets.
        packet_width: Half-width (1/e of the amplitude) of a packet, in sites.
        dt: Propagator step.
        t_max: Total evolution time; ``None`` lets the packet pass the cavity.
        max_dimension: Largest two-excitation sector that may be built.
    """

    n_sites: int = 600
    hopping: float = 4.0
    coupling: float = 2.0
    cavity_detuning: float = 0.0
    kappa: float = 1.0
    u: float = 0.0
    packet_center_k: float = np.pi / 2
    packet_width: float = 40.0
    dt: float = 0.5
    t_max: float | None = None
    max_dimension: int = 2_000_000

    def __post_init__(self):
        if self.n_sites < 3:
            raise ValueError("n_sites must be at least 3")
        if self.hopping <= 0 or self.packet_width <= 0 or self.dt <= 0:
            raise ValueError("hopping, packet_width and dt must be positive")
        if self.kappa < 0:
            raise ValueError("kappa must be non-negative")
        if not 0 < self.packet_center_k < np.pi:
            raise ValueError("packet_center_k must lie in (0, pi)")
        ratio = self.narrowband_ratio
        if ratio > NARROWBAND_LIMIT:
            warnings.warn(
                f"packet bandwidth is {ratio:.3g} of the cavity linewidth (limit {NARROWBAND_LIMIT})",
                RuntimeWarning,
                stacklevel=3,
            )

    @classmethod
    def for_decay_rate(cls, gamma_eff: float, hopping: float = 4.0, **kwargs) -> "LatticeModel":
        """Model whose cavity decays into the chain at ``gamma_eff``."""
        k0 = kwargs.get("packet_center_k", np.pi / 2)
        velocity = 2.0 * hopping * np.sin(k0)
        return cls(hopping=hopping, coupling=float(np.sqrt(gamma_eff * velocity / 2.0)), **kwargs)

    @property
    def velocity(self) -> float:
        return 2.0 * self.hopping * np.sin(self.packet_center_k)

    @property
    def gamma_eff(self) -> float:
        return 2.0 * self.coupling**2 / self.velocity

    @property
    def carrier_energy(self) -> float:
        return -2.0 * self.hopping * np.cos(self.packet_center_k)

    @property
    def narrowband_ratio(self) -> float:
        """Packet bandwidth ``2J / packet_width`` over the cavity linewidth."""
        width = self.kappa + self.gamma_eff
        return np.inf if width == 0 else 2.0 * self.hopping / self.packet_width / width

    @property
    def scatterer_site(self) -> int:
        return self.n_sites // 2

    @property
    def cavity_index(self) -> int:
        return self.n_sites

    @property
    def n_modes(self) -> int:
        return self.n_sites + 1

    @property
    def positions(self) -> np.ndarray:
        """Chain-site positions relative to the scatterer."""
        return np.arange(self.n_sites) - self.scatterer_site


def single_excitation_matrix(model: LatticeModel) -> sp.csr_matrix:
    """One-excitation generator over chain sites and the cavity (last index)."""
    n = model.n_sites
    hop = -model.hopping * np.ones(n - 1)
    rows = [np.arange(n - 1), np.arange(1, n), [model.scatterer_site, model.cavity_index], [model.cavity_index]]
    cols = [np.arange(1, n), np.arange(n - 1), [model.cavity_index, model.scatterer_site], [model.cavity_index]]
    cavity = model.carrier_energy + model.cavity_detuning - 0.5j * model.kappa
    vals = [hop, hop, [model.coupling, model.coupling], [cavity]]
    return sp.csr_matrix(
        (np.concatenate(vals).astype(complex), (np.concatenate(rows), np.concatenate(cols))),
        shape=(model.n_modes, model.n_modes),
    )


@dataclass(frozen=True)
class PairOperator:
    """Two-excitation generator and its basis.

    ``isometry`` maps sector vectors to symmetric ``M x M`` pair amplitudes
    (flattened); its transpose maps back.
    """

    matrix: sp.csr_matrix
    isometry: sp.csr_matrix
    n_modes: int
    cavity_pair_index: int

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    def to_pairs(self, vector) -> np.ndarray:
        return (self.isometry @ vector).reshape(self.n_modes, self.n_modes)

    def from_pairs(self, amplitudes) -> np.ndarray:
        return self.isometry.T @ np.asarray(amplitudes).reshape(-1)


def pair_dimension(n_modes: int) -> int:
    return n_modes * (n_modes + 1) // 2


def _pair_isometry(n_modes: int) -> sp.csr_matrix:
    iu, ju = np.triu_indices(n_modes)
    dim = len(iu)
    rows = np.concatenate([iu * n_modes + ju, ju * n_modes + iu])
    cols = np.concatenate([np.arange(dim), np.arange(dim)])
    # Diagonal pairs appear twice in the rows above, each with half weight.
    vals = np.where(iu == ju, 0.5, 1.0 / np.sqrt(2.0))
    return sp.csr_matrix((np.concatenate([vals, vals]), (rows, cols)), shape=(n_modes * n_modes, dim))


def build_two_excitation_hamiltonian(model: LatticeModel) -> PairOperator:
    """Assemble the generator of the two-excitation sector.

    The only non-Hermitian part is ``-i kappa/2`` times the cavity occupation;
    this is verified on the assembled matrix.

    Raises:
        DimensionError: If the sector is larger than ``model.max_dimension``.
    """
    m = model.n_modes
    dim = pair_dimension(m)
    if dim > model.max_dimension:
        raise DimensionError(f"two-excitation sector has {dim} states, budget {model.max_dimension}")
    single = single_excitation_matrix(model)
    iso = _pair_isometry(m)
    eye = sp.identity(m, format="csr", dtype=complex)
    matrix = (iso.T @ (sp.kron(single, eye) + sp.kron(eye, single)) @ iso).tocsr()
    cavity_pair = dim - 1  # last upper-triangular index is (cavity, cavity)
    matrix = matrix + sp.csr_matrix(([2.0 * model.u], ([cavity_pair], [cavity_pair])), shape=(dim, dim))
    matrix = matrix.tocsr()
    matrix.eliminate_zeros()
    op = PairOperator(matrix=matrix, isometry=iso, n_modes=m, cavity_pair_index=cavity_pair)
    defect = loss_structure_defect(op, model)
    if defect > 1e-12:
        raise RuntimeError(f"pair generator has an unexpected non-Hermitian part ({defect:.3g})")
    return op


def cavity_occupation(op: PairOperator) -> np.ndarray:
    """Number of cavity photons in each pair basis state."""
    iu, ju = np.triu_indices(op.n_modes)
    cav = op.n_modes - 1
    return (iu == cav).astype(float) + (ju == cav).astype(float)


def loss_structure_defect(op: PairOperator, model: LatticeModel) -> float:
    """Largest deviation of the anti-Hermitian part from ``-i kappa/2 n_cavity``."""
    h = op.matrix
    anti = (h - h.conj().T) / 2.0
    expected = sp.diags(-0.5j * model.kappa * cavity_occupation(op))
    diff = (anti - expected).tocoo()
    return float(np.max(np.abs(diff.data), initial=0.0))


# ---------------------------------------------------------------------------
# Krylov propagator
# ---------------------------------------------------------------------------


@dataclass
class KrylovPropagator:
    """Arnoldi approximation of ``exp(-i H t) psi`` with adaptive sub-steps.

    Each sub-step builds a Krylov space of dimension ``krylov_dim`` and accepts
    the result when the a-posteriori error estimate (the residual coupling of
    the last Krylov vector) is below ``tolerance`` times the state norm;
    otherwise the sub-step is halved.
    """

    matrix: sp.spmatrix
    krylov_dim: int = 30
    tolerance: float = 1e-10
    min_fraction: float = 2.0**-20
    steps_taken: int = field(default=0, init=False)
    max_error: float = field(default=0.0, init=False)

    def _substep(self, psi, tau):
        beta = np.linalg.norm(psi)
        if beta == 0:
            return psi, 0.0
        m = self.krylov_dim
        basis = np.empty((m + 1, psi.size), dtype=complex)
        hess = np.zeros((m + 1, m), dtype=complex)
        basis[0] = psi / beta
        size = m
        for j in range(m):
            w = self.matrix @ basis[j]
            # Classical Gram-Schmidt applied twice keeps the basis orthogonal.
            for _ in range(2):
                c = basis[: j + 1].conj() @ w
                w -= c @ basis[: j + 1]
                hess[: j + 1, j] += c
            hess[j + 1, j] = np.linalg.norm(w)
            if hess[j + 1, j].real < 1e-13 * beta:
                size = j + 1
                break
            basis[j + 1] = w / hess[j + 1, j]
        small = expm(-1j * tau * hess[:size, :size])
        coeffs = beta * small[:, 0]
        if size < m:
            error = 0.0
        else:
            error = beta * abs(hess[m, m - 1]) * abs(small[m - 1, 0]) * tau
        return coeffs @ basis[:size], error

    def propagate(self, psi: np.ndarray, duration: float) -> np.ndarray:
        """Advance ``psi`` by ``duration``.

        Raises:
            ConvergenceError: If a sub-step shorter than ``min_fraction`` of
                ``duration`` still misses the tolerance.
        """
        psi = np.asarray(psi, dtype=complex)
        elapsed, tau = 0.0, duration
        while elapsed < duration * (1 - 1e-14):
            tau = min(tau, duration - elapsed)
            new, error = self._substep(psi, tau)
            scale = max(np.linalg.norm(psi), 1e-300)
            if error > self.tolerance * scale:
                tau /= 2.0
                if tau < self.min_fraction * duration:
                    raise ConvergenceError(f"Krylov error {error:.3g} above tolerance at step {tau:.3g}")
                continue
            psi = new
            elapsed += tau
            self.steps_taken += 1
            self.max_error = max(self.max_error, error / scale)
            tau *= 1.5
        return psi


# ---------------------------------------------------------------------------
# Wavepackets
# ---------------------------------------------------------------------------


def gaussian_packet(model: LatticeModel, center: float, width: float | None = None, k0: float | None = None) -> np.ndarray:
    """Normalized single-photon Gaussian on the chain (cavity amplitude 0)."""
    width = model.packet_width if width is None else width
    k0 = model.packet_center_k if k0 is None else k0
    x = model.positions.astype(float)
    f = np.zeros(model.n_modes, dtype=complex)
    f[: model.n_sites] = np.exp(-((x - center) ** 2) / width**2 + 1j * k0 * x)
    return f / np.linalg.norm(f)


def default_start(model: LatticeModel) -> float:
    """Initial packet center: three widths before the scatterer."""
    return -3.0 * model.packet_width


def default_duration(model: LatticeModel, start: float | None = None) -> float:
    """Time for a packet to travel from ``start`` to as far past the cavity."""
    start = default_start(model) if start is None else start
    return 2.0 * abs(start) / model.velocity


@dataclass(frozen=True)
class WavepacketRun:
    """Final state of a propagation plus its norm history."""

    model: LatticeModel
    excitations: int
    state: np.ndarray
    times: np.ndarray
    norms: np.ndarray
    operator: PairOperator | None = None
    max_step_error: float = 0.0

    def pair_amplitudes(self) -> np.ndarray:
        if self.operator is None:
            raise ValueError("pair amplitudes need a two-excitation run")
        return self.operator.to_pairs(self.state)


def propagate_wavepacket(
    model: LatticeModel,
    initial: np.ndarray | None = None,
    excitations: int = 2,
    duration: float | None = None,
    operator: PairOperator | None = None,
    tolerance: float = 1e-10,
) -> WavepacketRun:
    """Evolve a one- or two-photon packet through the scatterer.

    The default initial state is a product of two identical Gaussian packets
    (or a single one), centred three widths before the scatterer.  Stability
    needs no condition on ``dt``: each step is split until its Krylov error
    estimate meets ``tolerance``.

    Args:
        initial: Single-photon packet over the ``n_sites + 1`` modes; a pair
            run uses its symmetrized square.
        duration: Total time; defaults to ``model.t_max`` or the passage time.

    Raises:
        ConvergenceError: If a step cannot reach the tolerance.
        DimensionError: If the pair sector exceeds the budget.
    """
    if initial is None:
        initial = gaussian_packet(model, default_start(model))
    packet_center = np.sum(model.positions * np.abs(initial[: model.n_sites]) ** 2) / np.sum(np.abs(initial) ** 2)
    if packet_center > -3.0 * model.packet_width * (1.0 - 1e-9):
        raise ValueError("the initial packet must start at least three widths before the scatterer")
    if duration is None:
        duration = model.t_max if model.t_max is not None else default_duration(model, packet_center)

    if excitations == 1:
        matrix, psi, operator = single_excitation_matrix(model), np.asarray(initial, dtype=complex), None
    elif excitations == 2:
        operator = operator or build_two_excitation_hamiltonian(model)
        matrix = operator.matrix
        psi = operator.from_pairs(np.outer(initial, initial))
        psi = psi / np.linalg.norm(psi)
    else:
        raise ValueError("excitations must be 1 or 2")

    propagator = KrylovPropagator(matrix, tolerance=tolerance)
    n_steps = max(1, int(np.ceil(duration / model.dt)))
    step = duration / n_steps
    times = [0.0]
    norms = [np.linalg.norm(psi)]
    for i in range(n_steps):
        psi = propagator.propagate(psi, step)
        times.append((i + 1) * step)
        norms.append(np.linalg.norm(psi))
    return WavepacketRun(
        model=model, excitations=excitations, state=psi,
        times=np.array(times), norms=np.array(norms), operator=operator,
        max_step_error=propagator.max_error,
    )


def centroid(model: LatticeModel, amplitudes: np.ndarray) -> float:
    """Mean chain position of a single-photon state."""
    density = np.abs(amplitudes[: model.n_sites]) ** 2
    return float(np.sum(model.positions * density) / np.sum(density))


# ---------------------------------------------------------------------------
# Observables
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ChainObservables:
    eta_t: float
    t_bar: complex | None
    transmitted_probability: float


def transmitted_overlap(run: WavepacketRun, reference: WavepacketRun, margin: float = 0.0) -> complex:
    """Transmission amplitude of a one-photon run against a free reference run."""
    sites = run.model.positions > margin
    ref = reference.state[: run.model.n_sites][sites]
    norm = np.vdot(ref, ref).real
    if norm < 1e-8:
        raise SignalTooSmall("reference packet has not reached the transmitted side")
    return complex(np.vdot(ref, run.state[: run.model.n_sites][sites]) / norm)


def extract_observables(
    run_u: WavepacketRun,
    run_linear: WavepacketRun,
    single: WavepacketRun | None = None,
    single_free: WavepacketRun | None = None,
    min_signal: float = 1e-8,
) -> ChainObservables:
    """Coincidence ratio of two pair runs and, optionally, a one-photon transmission.

    The ratio averages both coincidence densities over a window of one packet
    width around the transmitted packet center.

    Raises:
        SignalTooSmall: If the transmitted coincidence probability of the
            reference run is below ``min_signal``.
    """
    model = run_linear.model
    diag_u = np.abs(np.diag(run_u.pair_amplitudes())[: model.n_sites]) ** 2
    diag_0 = np.abs(np.diag(run_linear.pair_amplitudes())[: model.n_sites]) ** 2
    x = model.positions
    transmitted = x > 0
    total = float(np.sum(diag_0[transmitted]))
    if total < min_signal:
        raise SignalTooSmall(f"transmitted coincidence probability {total:.3g} below {min_signal:g}")
    center = np.sum(x[transmitted] * diag_0[transmitted]) / total
    window = transmitted & (np.abs(x - center) <= model.packet_width)
    eta_t = float(np.sum(diag_u[window]) / np.sum(diag_0[window]))
    t_bar = None
    if single is not None and single_free is not None:
        t_bar = transmitted_overlap(single, single_free)
    return ChainObservables(eta_t=eta_t, t_bar=t_bar, transmitted_probability=total)


def factorization_overlap(pair_run: WavepacketRun, single_run: WavepacketRun) -> float:
    """Normalized overlap of a pair state with the square of a one-photon state.

    Without interaction the pair evolves as a product of independent photons,
    so the overlap is 1 up to propagation error.
    """
    if pair_run.operator is None or single_run.excitations != 1:
        raise ValueError("need a two-excitation run and a one-excitation run")
    product = pair_run.operator.from_pairs(np.outer(single_run.state, single_run.state))
    overlap = np.vdot(product, pair_run.state)
    return float(abs(overlap) / (np.linalg.norm(product) * np.linalg.norm(pair_run.state)))


def transmission_spectrum(model: LatticeModel, detunings, probe_width: float = 3.0, ring_down: float = 30.0) -> np.ndarray:
    """Single-photon transmission of the chain versus photon-cavity detuning.

    A short packet covering all requested frequencies is sent through the
    scatterer and through a chain without cavity.  On the transmitted side
    the ratio of their Fourier components is the transmission at each
    wavevector.  The chain is resized so that the cavity ring-down (``ring_down``
    decay times) stays on the chain and clear of the edges.
    """
    detunings = np.atleast_1d(np.asarray(detunings, dtype=float))
    energies = model.carrier_energy + model.cavity_detuning + detunings
    if np.any(np.abs(energies) >= 2.0 * model.hopping):
        raise ValueError("detunings must stay inside the band")
    k = np.arccos(-energies / (2.0 * model.hopping))
    linewidth = model.kappa + model.gamma_eff
    lag = ring_down / max(linewidth, 1e-12) * model.velocity
    start = 3.0 * probe_width + 10.0
    half = int(np.ceil(2 * start + lag + 20.0 * probe_width))
    with warnings.catch_warnings():
        # The probe is deliberately broadband.
        warnings.simplefilter("ignore", RuntimeWarning)
        chain = replace(model, n_sites=2 * half + 1, packet_width=probe_width, t_max=None)
        free = replace(chain, coupling=0.0)
        packet = gaussian_packet(chain, -start, width=probe_width)
        duration = (2 * start + lag) / model.velocity
        scattered = propagate_wavepacket(chain, packet, excitations=1, duration=duration)
        reference = propagate_wavepacket(free, packet, excitations=1, duration=duration)
    x = chain.positions
    side = x > 0
    phases = np.exp(-1j * np.outer(k, x[side]))
    return (phases @ scattered.state[: chain.n_sites][side]) / (phases @ reference.state[: chain.n_sites][side])
