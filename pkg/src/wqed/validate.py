"""Validation suites: equation residuals, the numerical oracles, the Fano analysis.

Each suite returns a list of :class:`Check` records holding the measured
value next to its threshold, so reports show by how much a check passed or
failed.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, replace

import numpy as np

from .appendix import (
    bound_exponent_residual,
    build_scattering_state,
    random_sample_points,
    residual_check,
    residual_report,
)
from .core import CoordinatePair, SystemParams, TwoPhotonInput, single_photon_amplitudes
from .fano import chi, fano_relative_error, optimal_conditions
from .oracle import chain_lineshape, run_oracle
from .two_photon import correlation_eta


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    threshold: float
    below: bool = True

    @property
    def passed(self) -> bool:
        if not np.isfinite(self.value):
            return False
        return self.value < self.threshold if self.below else self.value > self.threshold

    def to_dict(self) -> dict:
        out = asdict(self)
        out["passed"] = self.passed
        return out


def report(mode: str, checks: list[Check]) -> dict:
    return {"mode": mode, "passed": all(c.passed for c in checks), "checks": [c.to_dict() for c in checks]}


def random_system(rng: np.random.Generator):
    """Random parameters over the ranges used by the residual suite."""
    params = SystemParams(
        gamma=rng.uniform(0.1, 200.0), kappa=rng.uniform(0.1, 10.0), u=rng.uniform(0.0, 20.0)
    )
    pair = TwoPhotonInput(delta1=rng.uniform(-5.0, 5.0), delta_a=rng.uniform(-5.0, 5.0), omega=rng.uniform(-5.0, 5.0))
    return params, pair


def residual_checks(seed: int = 0, sets: int = 100, points: int = 20, tolerance: float = 1e-10) -> list[Check]:
    """Residuals of the scattering state over random parameter sets."""
    rng = np.random.default_rng(seed)
    worst = worst_exponent = 0.0
    for _ in range(sets):
        params, pair = random_system(rng)
        state = build_scattering_state(pair, params)
        scale = 5.0 * params.v_c / (params.kappa + params.gamma) + 1.0
        samples = random_sample_points(rng, points, scale)
        worst = max(worst, residual_check(state, pair, params, samples))
        worst_exponent = max(worst_exponent, bound_exponent_residual(state))

    # Sensitivity: a 1% error in B must show up where the bound part is sizeable.
    params, pair = SystemParams(gamma=1.0, kappa=1.0, u=10.0), TwoPhotonInput()
    state = build_scattering_state(pair, params)
    samples = random_sample_points(rng, points, 3.0)
    perturbed = residual_check(replace(state, b=1.01 * state.b), pair, params, samples)

    params, pair = random_system(rng)
    linear = replace(params, u=0.0)
    linear_report = residual_report(build_scattering_state(pair, linear), pair, linear, random_sample_points(rng, points, 3.0))
    linear_residual = max(value for name, value in linear_report.items() if name.startswith("jump"))
    return [
        Check("max_normalized_residual", worst, tolerance),
        Check("bound_exponent_residual", worst_exponent, tolerance),
        Check("linear_cavity_jump_residual", linear_residual, 1e-12),
        Check("perturbed_b_residual", perturbed, 1e-4, below=False),
    ]


def oracle_checks(
    gamma: float = 1.0,
    kappa: float = 1.0,
    u: float = 10.0,
    delta_a: float = 0.0,
    tolerance: float = 0.10,
) -> list[Check]:
    """Oracle estimates against the closed forms, and their convergence."""
    params = SystemParams(gamma=gamma, kappa=kappa, u=u)
    pair = TwoPhotonInput(delta_a=delta_a)
    exact_eta = correlation_eta(pair, CoordinatePair(), params).eta_t
    exact_t, _ = single_photon_amplitudes(-delta_a, params)

    # The time-bin model measures cavity detuning against half the pair energy.
    result = run_oracle(gamma=gamma, kappa=kappa, u=u, cavity_detuning=delta_a)
    lineshape = chain_lineshape(gamma_eff=gamma, kappa=kappa)
    resonant = chain_lineshape(gamma_eff=gamma, kappa=0.0, detunings=[0.0])
    return [
        Check("eta_t_relative_error", abs(result.eta_t_estimate - exact_eta) / exact_eta, tolerance),
        Check("eta_t_resolution_change", result.eta_t_error / abs(result.eta_t_estimate), 0.02),
        Check("t_bar_error", abs(result.t_bar_estimate - exact_t), 0.01),
        Check("lineshape_max_relative_error", lineshape.max_relative_error, 0.05),
        Check("lossless_resonant_transmission", float(resonant.chain[0]), 0.02),
    ]


def fano_checks(
    gamma: float = 100.0,
    kappa: float = 1.0,
    seed: int = 0,
    sets: int = 1000,
    tolerance: float = 0.10,
) -> list[Check]:
    """Exact interference factor versus eta_t, and the Fano approximation quality."""
    rng = np.random.default_rng(seed)
    worst_consistency = 0.0
    for _ in range(sets):
        params = SystemParams(
            gamma=rng.uniform(0.01, 200.0), kappa=rng.uniform(0.01, 10.0), u=rng.uniform(0.0, 20.0)
        )
        delta_a = rng.uniform(-5.0, 5.0)
        eta = correlation_eta(TwoPhotonInput(delta_a=delta_a), CoordinatePair(), params).eta_t
        exact = abs(chi(delta_a, params)) ** 2
        worst_consistency = max(worst_consistency, abs(exact - eta) / max(exact, 1e-300))

    # Approximation quality over the weak-nonlinearity regime.
    detunings = np.linspace(0.1 * kappa, 2.0 * kappa, 191)
    pole = np.sqrt(kappa * gamma / 2.0)
    detunings = detunings[np.abs(detunings - pole) > 1e-3 * kappa]
    worst_fano = 0.0
    for u in kappa * np.array([0.001, 0.005, 0.01, 0.015, 0.02]):
        params = SystemParams(gamma=gamma, kappa=kappa, u=u)
        worst_fano = max(worst_fano, float(np.max(fano_relative_error(detunings, params))))

    # Exact value at the closed-form optimum against (U/kappa)^2.
    worst_factor = 1.0
    for coupling in (50.0, 100.0, 200.0):
        params = SystemParams(gamma=coupling * kappa, kappa=kappa)
        delta_star, u_star = optimal_conditions(params)
        value = abs(chi(delta_star, replace(params, u=u_star))) ** 2
        estimate = (u_star / kappa) ** 2
        worst_factor = max(worst_factor, value / estimate, estimate / value)

    return [
        Check("chi_versus_eta_t_relative", worst_consistency, 1e-12),
        Check("fano_max_relative_error", worst_fano, tolerance),
        Check("optimum_factor_from_estimate", worst_factor, 3.0),
    ]


SUITES = {"residuals": residual_checks, "oracle": oracle_checks, "fano": fano_checks}
