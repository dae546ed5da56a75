"""Full two-photon scattering state in the even/odd waveguide basis.

The waveguide is unfolded into an even mode, which couples to the cavity, and
an odd mode, which does not.  Coordinates below are *unfolded*: ``x < 0`` is the
incoming region and ``x > 0`` the outgoing one.  Step functions take the value
1/2 at the origin, so amplitudes evaluated exactly on a discontinuity are the
average of both sides.

Every amplitude is a finite sum of exponentials on each smooth segment, so the
residual checks below use exact derivatives (rate times value) instead of
finite differences.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import SINGLE_PHOTON_NORM, CoordinatePair, SystemParams, TwoPhotonInput
from .errors import RegionError
from .two_photon import bound_decay_rate, bound_state_coefficient, pair_denominators

_ABOVE = np.nextafter(0.0, 1.0)
_BELOW = -_ABOVE
# Amplitudes are of order 0.1; anything this small is zero for the residuals.
_NEGLIGIBLE = 1e-150


def _step(x):
    return np.heaviside(x, 0.5)


@dataclass(frozen=True)
class ScatteringState:
    """Coefficients of the stationary two-photon scattering state.

    ``t1, t2`` are even-mode single-photon transmissions (``2 t_bar - 1``),
    ``mu`` the cavity-plus-incoming-photon amplitudes, ``eta = mu t`` their
    outgoing counterparts and ``rho = mu / sqrt(2)`` the odd-mode ones.
    ``xi`` and ``b`` carry the bound state, which decays as
    ``exp(lambda_minus x)`` away from the cavity.
    """

    k1: float
    k2: float
    t1: complex
    t2: complex
    mu1: complex
    mu2: complex
    eta1: complex
    eta2: complex
    rho1: complex
    rho2: complex
    xi: complex
    b: complex
    lambda_minus: complex
    phi_aa: complex
    pair_rate: complex
    omega: float
    delta_a: float
    coupling: float
    kappa: float
    gamma: float
    u: float
    v_c: float

    # ---- decompositions into exponentials: lists of (value, rate1, rate2) ----

    def _even_photon(self, k, t, x):
        return SINGLE_PHOTON_NORM * (_step(-x) + t * _step(x)) * np.exp(1j * k * x)

    def _odd_photon(self, k, x):
        return SINGLE_PHOTON_NORM * np.exp(1j * k * x)

    def _ee_terms(self, x1, x2):
        k1, k2, t1, t2 = self.k1, self.k2, self.t1, self.t2
        s = 1.0 / np.sqrt(2.0)
        plane_a = s * self._even_photon(k1, t1, x1) * self._even_photon(k2, t2, x2)
        plane_b = s * self._even_photon(k1, t1, x2) * self._even_photon(k2, t2, x1)
        v = self.v_c
        com = 1j * self.omega / (2.0 * v)
        rel = self.pair_rate / (2.0 * v)
        phase = self.b * np.exp(com * (x1 + x2))
        # First photon at the cavity side of the pair (0 < x1 < x2), then the swap.
        # The exponents use |x2 - x1|, equal on each support and finite off it.
        decay = np.exp(rel * np.abs(x2 - x1))
        bound_a = phase * _step(x2 - x1) * _step(x1) * decay
        bound_b = phase * _step(x1 - x2) * _step(x2) * decay
        return [
            (plane_a, 1j * k1, 1j * k2),
            (plane_b, 1j * k2, 1j * k1),
            (bound_a, com - rel, com + rel),
            (bound_b, com + rel, com - rel),
        ]

    def _oe_terms(self, x1, x2):
        """Odd photon at ``x1``, even photon at ``x2``."""
        k1, k2 = self.k1, self.k2
        s = 1.0 / np.sqrt(2.0)
        a = s * self._odd_photon(k1, x1) * self._even_photon(k2, self.t2, x2)
        b = s * self._even_photon(k1, self.t1, x2) * self._odd_photon(k2, x1)
        return [(a, 1j * k1, 1j * k2), (b, 1j * k2, 1j * k1)]

    def _oo_terms(self, x1, x2):
        k1, k2 = self.k1, self.k2
        s = 1.0 / np.sqrt(2.0)
        a = s * self._odd_photon(k1, x1) * self._odd_photon(k2, x2)
        b = s * self._odd_photon(k1, x2) * self._odd_photon(k2, x1)
        return [(a, 1j * k1, 1j * k2), (b, 1j * k2, 1j * k1)]

    def _ae_terms(self, x):
        k1, k2 = self.k1, self.k2
        before, after = _step(-x), _step(x)
        return [
            ((before * self.mu1 + after * self.eta1) * np.exp(1j * k1 * x), 1j * k1),
            ((before * self.mu2 + after * self.eta2) * np.exp(1j * k2 * x), 1j * k2),
            (after * self.xi * np.exp(self.lambda_minus * np.abs(x)), self.lambda_minus),
        ]

    def _oa_terms(self, x):
        return [
            (self.rho1 * np.exp(1j * self.k1 * x), 1j * self.k1),
            (self.rho2 * np.exp(1j * self.k2 * x), 1j * self.k2),
        ]

    # ---- evaluators ----

    def phi_ee(self, x1, x2):
        return sum(term[0] for term in self._ee_terms(x1, x2))

    def phi_oe(self, x1, x2):
        return sum(term[0] for term in self._oe_terms(x1, x2))

    def phi_eo(self, x1, x2):
        return self.phi_oe(x2, x1)

    def phi_oo(self, x1, x2):
        return sum(term[0] for term in self._oo_terms(x1, x2))

    def phi_ae(self, x):
        return sum(term[0] for term in self._ae_terms(x))

    def phi_oa(self, x):
        return sum(term[0] for term in self._oa_terms(x))

    def phi_ao(self, x):
        return self.phi_oa(x)


def build_scattering_state(pair: TwoPhotonInput, params: SystemParams) -> ScatteringState:
    """Assemble all coefficients of the scattering state.

    Raises:
        PoleError: If a resonance denominator vanishes.
    """
    if np.any(np.asarray(params.kappa + params.gamma) <= 0):
        raise ValueError("the scattering state needs kappa + gamma > 0")
    d1, d2, e = pair_denominators(pair, params)
    half_loss_gap = 0.5j * (params.kappa - params.gamma)
    t1 = (pair.delta1 - pair.delta_a + half_loss_gap) / d1
    t2 = (pair.delta2 - pair.delta_a + half_loss_gap) / d2
    coeff = bound_state_coefficient(pair, params)
    coupling = params.even_coupling
    v_c = params.v_c
    k1, k2 = pair.wavenumbers(v_c)
    # Decay exponent of the photon emitted after the first one has left.
    lambda_minus = (1j * (pair.omega / 2.0 - pair.delta_a) - 0.5 * (params.kappa + params.gamma)) / v_c
    phi_aa = -(coupling / np.sqrt(2.0)) * (coeff.mu1 + coeff.mu2) / e
    return ScatteringState(
        k1=k1, k2=k2, t1=t1, t2=t2,
        mu1=coeff.mu1, mu2=coeff.mu2,
        eta1=coeff.mu1 * t1, eta2=coeff.mu2 * t2,
        rho1=coeff.mu1 / np.sqrt(2.0), rho2=coeff.mu2 / np.sqrt(2.0),
        xi=coeff.xi, b=coeff.b,
        lambda_minus=lambda_minus, phi_aa=phi_aa,
        pair_rate=bound_decay_rate(pair, params),
        omega=pair.omega, delta_a=pair.delta_a, coupling=coupling,
        kappa=params.kappa, gamma=params.gamma, u=params.u, v_c=v_c,
    )


# ---------------------------------------------------------------------------
# Residuals
# ---------------------------------------------------------------------------


def _normalized(*terms):
    """``|sum(terms)| / max|term|`` elementwise.

    Terms below ``_NEGLIGIBLE`` are numerically zero (products of such terms
    underflow unevenly), so the scale never drops below it.
    """
    terms = np.broadcast_arrays(*[np.asarray(t, dtype=complex) for t in terms])
    scale = np.max([np.abs(t) for t in terms], axis=0)
    return np.abs(sum(terms)) / np.maximum(scale, _NEGLIGIBLE)


def _jump(upper, lower, expected):
    return _normalized(upper, -lower, -expected)


def _free_pair_terms(terms, v_c, omega):
    d1 = sum(-1j * v_c * a1 * value for value, a1, _ in terms)
    d2 = sum(-1j * v_c * a2 * value for value, _, a2 in terms)
    energy = -omega * sum(value for value, _, _ in terms)
    return d1, d2, energy


def residual_report(state: ScatteringState, pair: TwoPhotonInput, params: SystemParams, sample_points) -> dict:
    """Normalized residual of every equation the scattering state must satisfy.

    Six equations of motion (photon pair in the even/even, odd/even and
    odd/odd sectors, one photon in the cavity with an even or odd photon, two
    photons in the cavity) and six jump conditions at the cavity position.
    The equations are built from ``pair`` and ``params``; the state only
    supplies the amplitudes.

    Args:
        sample_points: Iterable of ``(x1, x2)`` pairs or :class:`CoordinatePair`.
            Points on ``x1 = 0``, ``x2 = 0`` or ``x1 = x2`` are skipped where the
            derivative is not defined; single-coordinate checks use both entries.

    Returns:
        Mapping from a check name to its maximum normalized residual.
    """
    pts = np.array([(p.x1, p.x2) if isinstance(p, CoordinatePair) else p for p in sample_points], dtype=float)
    x1, x2 = pts[:, 0], pts[:, 1]
    xs = np.concatenate([x1, x2])
    xs = xs[xs != 0]
    smooth = (x1 != 0) & (x2 != 0) & (x1 != x2)
    a, b = x1[smooth], x2[smooth]
    v, g, omega = params.v_c, params.even_coupling, pair.omega
    photon_cavity = pair.delta_a - omega / 2.0 - 0.5j * params.kappa
    report = {}

    report["pair_even_even"] = _normalized(*_free_pair_terms(state._ee_terms(a, b), v, omega))
    report["pair_odd_even"] = _normalized(*_free_pair_terms(state._oe_terms(a, b), v, omega))
    report["pair_odd_odd"] = _normalized(*_free_pair_terms(state._oo_terms(a, b), v, omega))

    ae = state._ae_terms(xs)
    report["cavity_even"] = _normalized(
        sum(-1j * v * rate * value for value, rate in ae),
        photon_cavity * sum(value for value, _ in ae),
        g / np.sqrt(2.0) * (state.phi_ee(0.0, xs) + state.phi_ee(xs, 0.0)),
    )
    oa = state._oa_terms(xs)
    report["cavity_odd"] = _normalized(
        sum(-1j * v * rate * value for value, rate in oa),
        photon_cavity * sum(value for value, _ in oa),
        g * state.phi_oe(xs, 0.0),
    )
    report["cavity_double"] = _normalized(
        (2.0 * pair.delta_a + 2.0 * params.u - 1j * params.kappa) * state.phi_aa,
        np.sqrt(2.0) * g * state.phi_ae(0.0),
    )

    pair_jump = g / (1j * v * np.sqrt(2.0)) * state.phi_ae(xs)
    report["jump_even_first"] = _jump(state.phi_ee(_ABOVE, xs), state.phi_ee(_BELOW, xs), pair_jump)
    report["jump_even_second"] = _jump(state.phi_ee(xs, _ABOVE), state.phi_ee(xs, _BELOW), pair_jump)
    report["jump_cavity_even"] = _jump(
        state.phi_ae(_ABOVE), state.phi_ae(_BELOW), np.sqrt(2.0) * g / (1j * v) * state.phi_aa
    )
    report["jump_odd_even"] = _jump(
        state.phi_oe(xs, _ABOVE), state.phi_oe(xs, _BELOW), g / (1j * v) * state.phi_oa(xs)
    )
    report["jump_odd_free"] = _jump(state.phi_oe(_ABOVE, xs), state.phi_oe(_BELOW, xs), 0.0)
    report["jump_cavity_odd"] = _jump(state.phi_oa(_ABOVE), state.phi_oa(_BELOW), 0.0)
    return {name: float(np.max(value, initial=0.0)) for name, value in report.items()}


def residual_check(state: ScatteringState, pair: TwoPhotonInput, params: SystemParams, sample_points) -> float:
    """Largest normalized residual over all twelve checks of :func:`residual_report`.

    A wrong state yields a large number, never an exception.
    """
    return max(residual_report(state, pair, params, sample_points).values())


def bound_exponent_residual(state: ScatteringState) -> float:
    """Check that ``exp(lambda_minus x)`` solves the outgoing cavity equation.

    Once one photon has left, the remaining photon decays into the waveguide
    at rate gamma in addition to kappa; the exponent must cancel both.
    """
    free = -1j * state.v_c * state.lambda_minus
    detuning = state.delta_a - state.omega / 2.0
    return float(_normalized(free, detuning, -0.5j * state.kappa, -0.5j * state.gamma))


def random_sample_points(rng: np.random.Generator, count: int, scale: float):
    """Random coordinate pairs off the singular lines, spread over ``[-scale, scale]``."""
    pts = rng.uniform(-scale, scale, size=(count, 2))
    pts[pts == 0] = scale / 7.0
    return [tuple(p) for p in pts]


# ---------------------------------------------------------------------------
# Recombination into right/left movers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OutgoingAmplitudes:
    """Outgoing channel amplitudes at one coordinate pair.

    Only the channel that is outgoing in the requested region is set; the
    others are ``None``.
    """

    tt: complex | None = None
    rr: complex | None = None
    rt: complex | None = None


def asymptotic_margin(params: SystemParams) -> float:
    """Distance from the cavity beyond which coordinates count as asymptotic."""
    return 10.0 * params.v_c / (params.kappa + params.gamma)


def reconstruct_outgoing(state: ScatteringState, coords: CoordinatePair, margin: float | None = None) -> OutgoingAmplitudes:
    """Recombine even/odd amplitudes into right- and left-moving photons.

    Coordinates are physical positions.  Both positive gives the transmitted
    pair, both negative the reflected pair, and ``x1 > 0 > x2`` the pair with the
    transmitted photon at ``x1`` and the reflected one at ``x2``.

    Args:
        margin: Minimum distance of each coordinate from the cavity; defaults
            to ``10 v_c / (kappa + gamma)``.

    Raises:
        RegionError: If a coordinate is inside the margin, or ``x1 < 0 < x2``.
    """
    x1, x2 = float(coords.x1), float(coords.x2)
    if margin is None:
        margin = 10.0 * state.v_c / (state.kappa + state.gamma)
    if min(abs(x1), abs(x2)) < margin or x1 == 0 or x2 == 0:
        raise RegionError(f"coordinates ({x1}, {x2}) are within {margin:g} of the cavity")
    if x1 > 0 and x2 > 0:
        tt = 0.25 * (state.phi_ee(x1, x2) + state.phi_oe(x1, x2) + state.phi_oe(x2, x1) + state.phi_oo(x1, x2))
        return OutgoingAmplitudes(tt=complex(tt))
    if x1 < 0 and x2 < 0:
        a, b = -x1, -x2
        rr = 0.25 * (state.phi_ee(a, b) - state.phi_oe(a, b) - state.phi_oe(b, a) + state.phi_oo(a, b))
        return OutgoingAmplitudes(rr=complex(rr))
    if x1 > 0 > x2:
        a, b = x1, -x2
        rt = (state.phi_ee(a, b) + state.phi_oe(a, b) - state.phi_oe(b, a) - state.phi_oo(a, b)) / (2.0 * np.sqrt(2.0))
        return OutgoingAmplitudes(rt=complex(rt))
    raise RegionError("the transmitted photon must be at x1 > 0 and the reflected one at x2 < 0")
