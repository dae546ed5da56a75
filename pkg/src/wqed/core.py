"""System parameters, coordinates and single-photon amplitudes.

Conventions: frequencies share one unit (by default the cavity loss rate, so
``kappa = 1``), lengths are measured so that the group velocity ``v_c = 1``.
Every function accepts explicit values, so dimensionful inputs also work.

Fields of the dataclasses may be numpy arrays; all formulas broadcast, which is
how the scan machinery evaluates whole grids at once.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import PoleError

# Normalization of a single-photon plane wave, e^{ikx}/sqrt(2 pi).  Every
# amplitude in the package is built on this one constant.
SINGLE_PHOTON_NORM = 1.0 / np.sqrt(2.0 * np.pi)


def _check_nonzero(denominator, name: str) -> None:
    if np.any(np.asarray(denominator) == 0):
        raise PoleError(f"denominator {name} vanishes")


@dataclass(frozen=True)
class SystemParams:
    """Physical constants of the waveguide and the side-coupled cavity.

    Attributes:
        gamma: Cavity decay rate into the waveguide.
        kappa: Intrinsic cavity loss rate.
        u: Kerr interaction strength.
        omega_a: Cavity resonance frequency.
        v_c: Group velocity of the waveguide photons.
    """

    gamma: float = 1.0
    kappa: float = 1.0
    u: float = 0.0
    omega_a: float = 0.0
    v_c: float = 1.0

    def __post_init__(self):
        if np.any(np.asarray(self.gamma) < 0):
            raise ValueError("gamma must be non-negative")
        if np.any(np.asarray(self.kappa) < 0):
            raise ValueError("kappa must be non-negative")
        if np.any(np.asarray(self.v_c) <= 0):
            raise ValueError("v_c must be positive")

    @classmethod
    def from_coupling(cls, coupling, v_c=1.0, **kwargs) -> "SystemParams":
        """Build parameters from the waveguide-cavity coupling ``V``."""
        return cls(gamma=gamma_from_coupling(coupling, v_c), v_c=v_c, **kwargs)

    @property
    def even_coupling(self):
        """Coupling of the cavity to the even waveguide mode, sqrt(2) V."""
        return np.sqrt(self.gamma * self.v_c)

    @property
    def total_width(self):
        """Total cavity linewidth kappa + gamma."""
        return self.kappa + self.gamma


@dataclass(frozen=True)
class TwoPhotonInput:
    """Incoming photon pair at total energy ``omega``.

    The second photon detuning is always ``-delta1``; it is derived, never
    stored.  ``omega`` only sets an overall phase of the amplitudes.
    """

    delta1: float = 0.0
    delta_a: float = 0.0
    omega: float = 0.0

    @classmethod
    def from_cavity(cls, params: "SystemParams", delta1=0.0, omega=0.0) -> "TwoPhotonInput":
        """Input whose cavity detuning follows from ``params.omega_a``."""
        return cls(delta1=delta1, delta_a=params.omega_a - omega / 2.0, omega=omega)

    @property
    def delta2(self):
        return -self.delta1

    def wavenumbers(self, v_c=1.0):
        """Wavenumbers (k1, k2) of the two incoming photons."""
        half = self.omega / 2.0
        return (self.delta1 + half) / v_c, (self.delta2 + half) / v_c

    def cavity_frequency(self):
        """Cavity frequency implied by the detuning and the total energy."""
        return self.delta_a + self.omega / 2.0


@dataclass(frozen=True)
class CoordinatePair:
    """Positions of the two detectors."""

    x1: float = 0.0
    x2: float = 0.0

    @property
    def center(self):
        return (self.x1 + self.x2) / 2.0

    @property
    def relative(self):
        return self.x2 - self.x1

    def swapped(self) -> "CoordinatePair":
        return CoordinatePair(self.x2, self.x1)

    def mirrored(self) -> "CoordinatePair":
        return CoordinatePair(-self.x1, -self.x2)


def gamma_from_coupling(coupling, v_c=1.0):
    """Decay rate into the waveguide for a coupling ``V`` to each direction.

    The even mode couples with sqrt(2) V, so the rate is 2 V^2 / v_c.
    """
    if np.any(np.asarray(v_c) <= 0):
        raise ValueError("v_c must be positive")
    even = np.sqrt(2.0) * np.asarray(coupling, dtype=float)
    result = even**2 / v_c
    return float(result) if np.ndim(result) == 0 else result


def single_photon_amplitudes(detuning, params: SystemParams):
    """Single-photon transmission and reflection amplitudes.

    Args:
        detuning: Photon frequency minus the cavity frequency.
        params: System parameters (uses ``gamma`` and ``kappa``).

    Returns:
        Tuple ``(t_bar, r_bar)``; they satisfy ``t_bar = 1 + r_bar``.

    Raises:
        PoleError: If ``kappa = gamma = detuning = 0``.
    """
    denom = detuning + 0.5j * (params.kappa + params.gamma)
    _check_nonzero(denom, "detuning + i(kappa+gamma)/2")
    t_bar = (detuning + 0.5j * params.kappa) / denom
    r_bar = -0.5j * params.gamma / denom
    return t_bar, r_bar


def incoming_wavefunction(pair: TwoPhotonInput, coords: CoordinatePair, v_c=1.0):
    """Symmetrized two-photon plane wave of the incoming pair.

    Returns ``(e^{i k1 x1 + i k2 x2} + e^{i k1 x2 + i k2 x1}) / (2 sqrt(2) pi)``.
    """
    k1, k2 = pair.wavenumbers(v_c)
    x1, x2 = coords.x1, coords.x2
    direct = np.exp(1j * (k1 * x1 + k2 * x2))
    exchanged = np.exp(1j * (k1 * x2 + k2 * x1))
    return SINGLE_PHOTON_NORM**2 * (direct + exchanged) / np.sqrt(2.0)
