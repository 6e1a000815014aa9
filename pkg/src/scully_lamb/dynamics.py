"""Time evolution: sector-0 photon-number dynamics, hysteresis ramps and
full density-matrix integration at oracle scale.

The k = 0 sector evolves as a classical birth-death chain dp/dt = T(A(t)) p
with the tridiagonal generator applied matrix-free; the gain may be ramped
in time.  Integration uses an explicit adaptive embedded 4(5) pair
(scipy RK45), rtol 1e-8 / atol 1e-12, so that the hysteresis loop area is
not an integrator artifact; the trace is monitored and a drift beyond
1e-9 is an error, never silently renormalized.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .model import ModelParams
from .liouvillian import (
    build_hamiltonian,
    build_jump_operators,
    build_sector_block,
)
from .steady_state import DiagonalState, solve_steady

__all__ = [
    "RampProtocol",
    "HysteresisResult",
    "evolve_sector0",
    "evolve_full",
    "hysteresis",
    "ramp_up",
    "ramp_down",
    "fit_decay_rate",
    "TRACE_TOL",
]

RTOL = 1e-8
ATOL = 1e-12
TRACE_TOL = 1e-9


class TraceDriftError(RuntimeError):
    pass


@dataclass(frozen=True)
class RampProtocol:
    """Affine gain ramp A(t) = A0 + slope * t on [0, t_f]."""

    A0: float
    slope: float
    t_f: float

    def __post_init__(self):
        if self.t_f <= 0.0:
            raise ValueError("ramp duration t_f must be > 0")
        if self.A0 <= 0.0 or self.A0 + self.slope * self.t_f <= 0.0:
            raise ValueError("A(t) must stay positive over the ramp")

    def __call__(self, t: float) -> float:
        return self.A0 + self.slope * t


def ramp_up(params: ModelParams, t_f: float) -> RampProtocol:
    """A(t) = Gamma/2 + Gamma t/t_f (ascending branch)."""
    g = params.gamma
    return RampProtocol(A0=0.5 * g, slope=g / t_f, t_f=t_f)


def ramp_down(params: ModelParams, t_f: float) -> RampProtocol:
    """A(t) = 3 Gamma/2 - Gamma t/t_f (descending branch)."""
    g = params.gamma
    return RampProtocol(A0=1.5 * g, slope=-g / t_f, t_f=t_f)


def _sector0_rhs(params: ModelParams, A_of_t: Callable[[float], float]):
    n_max = params.n_max
    m = np.arange(n_max + 1.0)
    down = params.gamma * m

    def rhs(t, p):
        A = A_of_t(t)
        sqrt_a = math.sqrt(A)
        f = np.sqrt(m + 1.0) * (sqrt_a - params.B * (m + 1.0) / (2.0 * sqrt_a))
        f[-1] = 0.0
        up = f * f
        dp = -(up + down) * p
        dp[1:] += up[:-1] * p[:-1]
        dp[:-1] += down[1:] * p[1:]
        return dp

    return rhs


def evolve_sector0(
    p0: DiagonalState,
    params: ModelParams,
    t_grid: Sequence[float],
    A_of_t: Callable[[float], float] | float | None = None,
) -> list[tuple[float, DiagonalState, float]]:
    """Integrate the diagonal sector, returning (t, state, <n>) samples.

    ``A_of_t`` may be a constant, a callable or None (use params.A).  The
    generator is rebuilt from the instantaneous gain inside the right-hand
    side; with a constant gain that rebuild is the same O(n_max) cost.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or len(t_grid) < 2 or t_grid[0] != 0.0 or np.any(np.diff(t_grid) <= 0):
        raise ValueError("t_grid must ascend from 0")
    if A_of_t is None:
        A_fun = lambda t: params.A
    elif callable(A_of_t):
        A_fun = A_of_t
    else:
        A_const = float(A_of_t)
        A_fun = lambda t: A_const
    p_init = np.asarray(p0.p, dtype=float)
    if len(p_init) != params.n_max + 1:
        raise ValueError("initial state length does not match n_max + 1")
    sol = solve_ivp(
        _sector0_rhs(params, A_fun),
        (t_grid[0], t_grid[-1]),
        p_init,
        method="RK45",
        rtol=RTOL,
        atol=ATOL,
        t_eval=t_grid,
    )
    if not sol.success:
        raise RuntimeError(f"sector-0 integration failed: {sol.message}")
    drift = np.abs(sol.y.sum(axis=0) - p_init.sum()).max()
    if drift > TRACE_TOL:
        raise TraceDriftError(f"trace drift {drift:.3e} beyond {TRACE_TOL:.0e}")
    m = np.arange(params.n_max + 1.0)
    out = []
    for i, t in enumerate(sol.t):
        p = sol.y[:, i]
        out.append((float(t), DiagonalState(p=p.copy()), float(m @ p)))
    return out


def _full_rhs(params: ModelParams):
    H = build_hamiltonian(params)
    Ls = build_jump_operators(params)
    LdL = [L.T @ L for L in Ls]  # jump operators are real
    d = params.n_max + 1

    def rhs(t, y):
        rho = y.reshape((d, d))
        drho = -1j * (H @ rho - rho @ H)
        for L, K in zip(Ls, LdL):
            drho += L @ rho @ L.T - 0.5 * (K @ rho + rho @ K)
        return drho.reshape(-1)

    return rhs


FULL_EVOLVE_DEFAULT_LIMIT = 40


def evolve_full(
    rho0: np.ndarray,
    params: ModelParams,
    t_grid: Sequence[float],
    oracle_limit: int = FULL_EVOLVE_DEFAULT_LIMIT,
) -> list[tuple[float, np.ndarray]]:
    """Integrate the full master equation (oracle scale, n_max <= 40)."""
    if params.n_max > oracle_limit:
        raise ValueError(
            f"n_max={params.n_max} beyond full-evolution oracle limit {oracle_limit}"
        )
    t_grid = np.asarray(t_grid, dtype=float)
    rho0 = np.asarray(rho0, dtype=complex)
    d = params.n_max + 1
    if rho0.shape != (d, d):
        raise ValueError(f"rho0 must be {d}x{d}")
    sol = solve_ivp(
        _full_rhs(params),
        (t_grid[0], t_grid[-1]),
        rho0.reshape(-1),
        method="RK45",
        rtol=RTOL,
        atol=ATOL,
        t_eval=t_grid,
    )
    if not sol.success:
        raise RuntimeError(f"full master-equation integration failed: {sol.message}")
    out = []
    for i, t in enumerate(sol.t):
        rho = sol.y[:, i].reshape((d, d))
        tr = np.trace(rho)
        if abs(tr - np.trace(rho0)) > TRACE_TOL:
            raise TraceDriftError(f"trace drift {abs(tr - 1):.3e} at t={t}")
        out.append((float(t), rho))
    return out


@dataclass
class HysteresisResult:
    A: np.ndarray             # common ascending gain grid (units of input A)
    n_up: np.ndarray          # <n>/N along the ascending ramp
    n_down: np.ndarray        # <n>/N along the descending ramp, same grid
    loop_area: float
    n_max: int


def hysteresis(
    params: ModelParams,
    t_f: float,
    samples: int = 201,
) -> HysteresisResult:
    """Up/down gain ramps across the critical point and their loop area.

    Both branches start from the steady state of their initial gain and are
    sampled on a common gain grid; loop_area integrates |n_up - n_down|/N
    over A by the trapezoid rule.  The k = 0 sector carries no dephasing
    term, so the result is independent of eta (bit-identical) and omega.
    """
    if t_f <= 0.0:
        raise ValueError("t_f must be > 0")
    up = ramp_up(params, t_f)
    down = ramp_down(params, t_f)
    t_grid = np.linspace(0.0, t_f, samples)
    curves = {}
    for ramp in (up, down):
        start = replace(params, A=ramp(0.0))
        p0 = solve_steady(build_sector_block(start, 0))
        traj = evolve_sector0(p0, params, t_grid, A_of_t=ramp)
        A_vals = np.array([ramp(t) for t in t_grid])
        n_vals = np.array([n for _, _, n in traj]) / params.N
        curves[ramp] = (A_vals, n_vals)
    A_up, n_up = curves[up]
    A_dn, n_dn = curves[down]
    if not np.allclose(A_dn[::-1], A_up, rtol=0.0, atol=1e-12):
        raise RuntimeError("ramp grids do not align")
    n_dn_on_up = n_dn[::-1]
    area = float(np.trapezoid(np.abs(n_up - n_dn_on_up), A_up))
    return HysteresisResult(
        A=A_up, n_up=n_up, n_down=n_dn_on_up, loop_area=area, n_max=params.n_max
    )


def fit_decay_rate(
    t: np.ndarray,
    delta: np.ndarray,
    window: tuple[float, float] = (1e-5, 1e-2),
) -> float:
    """Late-time exponential rate of a decaying positive signal.

    Fits log(delta) linearly over the samples where delta has fallen into
    ``window`` (fractions of its initial value): past the multi-mode
    transient, above the integrator noise floor.
    """
    t = np.asarray(t, dtype=float)
    delta = np.asarray(delta, dtype=float)
    d0 = delta[0]
    if d0 <= 0.0:
        raise ValueError("signal must start positive")
    mask = (delta > window[0] * d0) & (delta < window[1] * d0)
    if mask.sum() < 4:
        raise ValueError(
            f"only {int(mask.sum())} samples inside the fit window; "
            "extend the time grid"
        )
    slope = np.polyfit(t[mask], np.log(delta[mask]), 1)[0]
    return float(-slope)
