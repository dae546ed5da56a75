"""Weak-nonlinearity analysis: interference factor, Fano lineshape, optimum.

At coincident detectors and equal photon frequencies the transmitted pair
amplitude is the independent-scattering amplitude times a complex factor
``chi``.  For a strongly coupled, weakly nonlinear cavity ``|chi|^2`` takes an
approximate Fano form with asymmetry ``q`` and reduced detuning ``epsilon``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .core import SystemParams, _check_nonzero
from .errors import FanoPoleError, NoMinimumInRange


@dataclass(frozen=True)
class FanoShape:
    q: float
    epsilon: float
    chi: complex


@dataclass(frozen=True)
class Optimum:
    delta_a: float
    u: float
    eta: float


def chi(delta_a, params: SystemParams):
    """Exact interference factor at ``x1 = x2`` and zero photon detuning.

    Raises:
        PoleError: If ``delta_a - i kappa/2`` or ``delta_a + U - i(kappa+gamma)/2``
            vanishes.
    """
    lossy = delta_a - 0.5j * params.kappa
    pair = delta_a + params.u - 0.5j * (params.kappa + params.gamma)
    _check_nonzero(lossy, "Delta_a - i kappa/2")
    _check_nonzero(pair, "Delta_a + U - i(kappa+gamma)/2")
    return 1.0 + (params.gamma / 2.0) ** 2 * params.u / (pair * lossy**2)


def fano_parameters(delta_a, params: SystemParams) -> FanoShape:
    """Asymmetry ``q``, reduced detuning ``epsilon`` and the exact ``chi``.

    Raises:
        FanoPoleError: At ``delta_a = 0`` or ``2 delta_a^2 = kappa gamma``.
    """
    kappa, gamma = params.kappa, params.gamma
    denom = 2.0 * delta_a * (2.0 * delta_a**2 - kappa * gamma)
    if np.any(np.asarray(denom) == 0):
        raise FanoPoleError("q and epsilon diverge at Delta_a = 0 or 2 Delta_a^2 = kappa gamma")
    q = params.u * gamma**2 / denom
    epsilon = gamma * (4.0 * delta_a**2 - kappa**2) / (2.0 * denom)
    return FanoShape(q=q, epsilon=epsilon, chi=chi(delta_a, params))


def fano_eta_approx(shape: FanoShape):
    """Fano lineshape ``(epsilon^2 + (1+q)^2) / (1 + epsilon^2)``; zero at q=-1, epsilon=0."""
    eps2 = shape.epsilon**2
    return (eps2 + (1.0 + shape.q) ** 2) / (1.0 + eps2)


def fano_relative_error(delta_a, params: SystemParams, floor: float = 1e-6):
    """Relative deviation of the Fano lineshape from the exact ``|chi|^2``."""
    shape = fano_parameters(delta_a, params)
    exact = np.abs(shape.chi) ** 2
    return np.abs(fano_eta_approx(shape) - exact) / np.maximum(exact, floor)


def optimal_conditions(params: SystemParams):
    """Detuning and interaction that zero the Fano lineshape: ``(kappa/2, kappa^2/gamma)``."""
    if params.gamma <= 0 or params.kappa <= 0:
        raise ValueError("optimal conditions need gamma > 0 and kappa > 0")
    return params.kappa / 2.0, params.kappa**2 / params.gamma


def eta_min_estimate(params: SystemParams):
    """Leading-order value ``(U/kappa)^2`` of eta_t at the optimum."""
    return (params.u / params.kappa) ** 2


def _axis(bounds, n: int):
    """Coarse grid for one search axis; scalars give a fixed axis."""
    if np.ndim(bounds) == 0:
        return np.array([float(bounds)]), False
    lo, hi = map(float, bounds)
    if not lo < hi:
        raise ValueError(f"search range must have min < max, got {bounds}")
    log = lo > 0 and hi / lo > 10.0
    grid = np.geomspace(lo, hi, n) if log else np.linspace(lo, hi, n)
    return grid, log


def numeric_optimum_search(
    params: SystemParams,
    search_ranges: dict,
    tolerance: float = 1e-6,
    grid_points: int = 81,
    max_sweeps: int = 50,
) -> Optimum:
    """Minimize exact ``|chi|^2`` over the cavity detuning and the interaction.

    A coarse grid locates the basin; golden-section searches along each axis
    then refine it, alternating until the point moves less than ``tolerance``
    (relative to the axis scale).

    Args:
        params: Fixed parameters; its ``u`` is ignored.
        search_ranges: ``{"delta_a": (lo, hi) or value, "u": (lo, hi) or value}``.
            Interaction ranges spanning more than a decade are searched in log
            space.
        tolerance: Convergence tolerance of the refinement.

    Raises:
        NoMinimumInRange: If the grid minimum is on the range boundary, or the
            objective is flat.
    """
    if tolerance <= 0:
        raise ValueError("tolerance must be positive")
    da_grid, _ = _axis(search_ranges.get("delta_a", params.kappa / 2.0), grid_points)
    u_grid, u_log = _axis(search_ranges.get("u", params.u), grid_points)

    def objective(delta_a, u):
        trial = SystemParams(params.gamma, params.kappa, u, params.omega_a, params.v_c)
        return np.abs(chi(delta_a, trial)) ** 2

    values = objective(da_grid[:, None], u_grid[None, :])
    if np.ptp(values) <= 1e-15 * max(1.0, np.max(values)):
        raise NoMinimumInRange("objective is flat over the search range")
    i, j = np.unravel_index(np.argmin(values), values.shape)
    for index, grid in ((i, da_grid), (j, u_grid)):
        if len(grid) > 1 and index in (0, len(grid) - 1):
            raise NoMinimumInRange(f"grid minimum at boundary value {grid[index]:.6g}")

    point = [da_grid[i], u_grid[j]]
    # Search coordinates: the interaction axis is refined in log space if it was gridded so.
    to_search = [lambda v: v, np.log if u_log else (lambda v: v)]
    from_search = [lambda s: s, np.exp if u_log else (lambda s: s)]
    grids = [da_grid, u_grid]
    indices = [i, j]

    def refine(axis: int) -> float:
        grid, k = grids[axis], indices[axis]
        lo, hi = to_search[axis](grid[max(k - 1, 0)]), to_search[axis](grid[min(k + 1, len(grid) - 1)])
        mid = to_search[axis](point[axis])

        def along(s):
            trial = list(point)
            trial[axis] = from_search[axis](s)
            return objective(*trial)

        if not (along(mid) <= along(lo) and along(mid) <= along(hi)):
            # The other coordinate moved; fall back to a bounded search of the cell.
            res = minimize_scalar(along, bounds=(lo, hi), method="bounded",
                                  options={"xatol": tolerance * 1e-2})
        else:
            res = minimize_scalar(along, bracket=(lo, mid, hi), method="golden",
                                  tol=tolerance * 1e-2)
        return from_search[axis](res.x)

    active = [axis for axis in (0, 1) if len(grids[axis]) > 1]
    for _ in range(max_sweeps):
        moved = 0.0
        for axis in active:
            new = refine(axis)
            scale = max(abs(point[axis]), 1e-300)
            moved = max(moved, abs(new - point[axis]) / scale)
            point[axis] = new
        if moved < tolerance:
            break
    return Optimum(delta_a=float(point[0]), u=float(point[1]), eta=float(objective(*point)))
