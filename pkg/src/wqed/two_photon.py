"""Outgoing two-photon amplitudes and the correlation ratios eta_t, eta_r.

Each outgoing channel (both transmitted, both reflected, one of each) splits
into a plane-wave part, where the photons scatter independently, and a bound
part created by the Kerr interaction that decays away from coincidence.

Channel ``rt`` uses the transmitted photon at ``x1`` (right of the cavity) and
the reflected photon at ``x2`` (left of the cavity).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    SINGLE_PHOTON_NORM,
    CoordinatePair,
    SystemParams,
    TwoPhotonInput,
    _check_nonzero,
    incoming_wavefunction,
    single_photon_amplitudes,
)
from .errors import UndefinedCorrelation

# A plane-wave density below this fraction of its largest possible value is
# treated as zero, which makes eta undefined.
VANISHING_PLANE = 1e-12


@dataclass(frozen=True)
class BoundStateCoefficient:
    """Coefficients of the interaction-induced bound state.

    ``mu1`` is the cavity-plus-photon amplitude paired with ``e^{i k1 x}``
    (it carries the pole of the *second* photon), ``mu2`` the converse.
    """

    b: complex
    xi: complex
    mu1: complex
    mu2: complex


@dataclass(frozen=True)
class ChannelTriple:
    plane: complex
    bound: complex

    @property
    def total(self):
        return self.plane + self.bound

    def to_dict(self) -> dict:
        return {"plane": self.plane, "bound": self.bound, "total": self.total}


@dataclass(frozen=True)
class ChannelAmplitudes:
    """Plane, bound and total amplitudes of the three outgoing channels."""

    tt: ChannelTriple
    rr: ChannelTriple
    rt: ChannelTriple

    def to_dict(self) -> dict:
        return {"tt": self.tt.to_dict(), "rr": self.rr.to_dict(), "rt": self.rt.to_dict()}


@dataclass(frozen=True)
class EtaPair:
    """Correlation ratios; NaN marks a channel whose plane part vanishes."""

    eta_t: float
    eta_r: float


def pair_denominators(pair: TwoPhotonInput, params: SystemParams):
    """Resonance denominators shared by the bound-state formulas.

    Returns ``(d1, d2, e)`` with ``d_i = Delta_i - Delta_a + i(kappa+gamma)/2``
    and ``e = Delta_a + U - i(kappa+gamma)/2``.
    """
    half_width = 0.5j * (params.kappa + params.gamma)
    d1 = pair.delta1 - pair.delta_a + half_width
    d2 = pair.delta2 - pair.delta_a + half_width
    e = pair.delta_a + params.u - half_width
    _check_nonzero(d1, "Delta_1 - Delta_a + i(kappa+gamma)/2")
    _check_nonzero(d2, "Delta_2 - Delta_a + i(kappa+gamma)/2")
    _check_nonzero(e, "Delta_a + U - i(kappa+gamma)/2")
    return d1, d2, e


def bound_state_coefficient(pair: TwoPhotonInput, params: SystemParams) -> BoundStateCoefficient:
    """Amplitude ``B`` of the bound state together with ``xi`` and ``mu``.

    Raises:
        PoleError: If a resonance denominator vanishes (needs kappa + gamma = 0).
    """
    d1, d2, e = pair_denominators(pair, params)
    coupling = params.even_coupling
    v_c = params.v_c
    mu1 = coupling / (2.0 * np.pi * d2)
    mu2 = coupling / (2.0 * np.pi * d1)
    xi = 4j * np.pi * coupling * params.u * mu1 * mu2 / (v_c * e)
    b = coupling * xi / (1j * v_c * np.sqrt(2.0))
    return BoundStateCoefficient(b=b, xi=xi, mu1=mu1, mu2=mu2)


def _photon_amplitudes(pair: TwoPhotonInput, params: SystemParams):
    t1, r1 = single_photon_amplitudes(pair.delta1 - pair.delta_a, params)
    t2, r2 = single_photon_amplitudes(pair.delta2 - pair.delta_a, params)
    return t1, r1, t2, r2


def plane_wave_parts(pair: TwoPhotonInput, coords: CoordinatePair, params: SystemParams):
    """Independent-scattering parts ``(t_p, r_p, rt_p)`` of the three channels."""
    t1, r1, t2, r2 = _photon_amplitudes(pair, params)
    v_c = params.v_c
    t_p = incoming_wavefunction(pair, coords, v_c) * t1 * t2
    r_p = incoming_wavefunction(pair, coords.mirrored(), v_c) * r1 * r2
    beat = np.exp(2j * pair.delta1 * coords.center / v_c)
    carrier = np.exp(-1j * pair.omega * coords.relative / (2.0 * v_c))
    rt_p = SINGLE_PHOTON_NORM**2 * carrier * (r2 * t1 * beat + t2 * r1 / beat)
    return t_p, r_p, rt_p


def bound_decay_rate(pair: TwoPhotonInput, params: SystemParams):
    """Complex exponent ``-2i Delta_a - (kappa + gamma)`` of the bound parts."""
    return -2j * pair.delta_a - (params.kappa + params.gamma)


def bound_state_parts(pair: TwoPhotonInput, coords: CoordinatePair, params: SystemParams):
    """Bound-state parts ``(t_b, r_b, rt_b)`` of the three channels."""
    b = bound_state_coefficient(pair, params).b
    v_c = params.v_c
    rate = bound_decay_rate(pair, params)
    center, relative = coords.center, coords.relative
    pair_profile = np.exp(rate * np.abs(relative) / (2.0 * v_c))
    t_b = 0.25 * b * np.exp(1j * pair.omega * center / v_c) * pair_profile
    r_b = 0.25 * b * np.exp(-1j * pair.omega * center / v_c) * pair_profile
    rt_b = (
        b / (2.0 * np.sqrt(2.0))
        * np.exp(-1j * pair.omega * relative / (2.0 * v_c))
        * np.exp(rate * np.abs(center) / v_c)
    )
    return t_b, r_b, rt_b


def channel_amplitudes(pair: TwoPhotonInput, coords: CoordinatePair, params: SystemParams) -> ChannelAmplitudes:
    t_p, r_p, rt_p = plane_wave_parts(pair, coords, params)
    t_b, r_b, rt_b = bound_state_parts(pair, coords, params)
    return ChannelAmplitudes(
        tt=ChannelTriple(t_p, t_b), rr=ChannelTriple(r_p, r_b), rt=ChannelTriple(rt_p, rt_b)
    )


def _ratio(triple: ChannelTriple):
    plane = np.asarray(triple.plane)
    defined = np.abs(plane) > VANISHING_PLANE * SINGLE_PHOTON_NORM**2
    safe = np.where(defined, plane, 1.0)
    eta = np.where(defined, np.abs(triple.total / safe) ** 2, np.nan)
    return float(eta) if eta.ndim == 0 else eta


def correlation_eta(
    pair: TwoPhotonInput, coords: CoordinatePair, params: SystemParams, strict: bool = False
) -> EtaPair:
    """Ratios of full to independent two-photon densities in both channels.

    eta below 1 means the photons avoid each other (blockade), above 1 that
    they bunch (induced tunneling).

    Args:
        strict: Raise instead of returning NaN for an undefined channel.

    Raises:
        UndefinedCorrelation: In strict mode, if a plane part vanishes.
    """
    amps = channel_amplitudes(pair, coords, params)
    eta_t, eta_r = _ratio(amps.tt), _ratio(amps.rr)
    if strict:
        for name, value in (("eta_t", eta_t), ("eta_r", eta_r)):
            if np.any(np.isnan(value)):
                raise UndefinedCorrelation(f"{name}: plane-wave part vanishes")
    return EtaPair(eta_t, eta_r)
