"""Steady state of the diagonal (k = 0) sector and photon statistics.

The k = 0 block is a classical birth-death generator: up-rates f(m)^2 from
the saturable gain, down-rates Gamma m from photon loss.  Its stationary
vector is computed by Grassmann-Taksar-Heyman-style elimination on the
matrix entries (a rank-revealing factorization for singular generator
matrices), which is componentwise accurate even where the populations are
exponentially small.  The closed-form detailed-balance product

    p_m  proportional to  prod_{j<m} f(j)^2 / (Gamma (j+1))

is kept alongside as the independent analytic oracle, evaluated in log
space from the gain amplitudes rather than from the matrix.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import ModelParams
from .liouvillian import SectorBlock, gain_amplitudes
from . import spectra as _spectra

__all__ = [
    "DiagonalState",
    "SteadyStateError",
    "solve_steady",
    "birth_death_product",
    "moments",
    "g2_zero",
    "fano",
]

NEGATIVITY_TOL = 1e-12
TAIL_FRACTION = 0.9
TAIL_MASS_TOL = 1e-6


class SteadyStateError(RuntimeError):
    pass


@dataclass
class DiagonalState:
    """Populations p_m over Fock levels, normalized to sum 1."""

    p: np.ndarray

    @property
    def n_max(self) -> int:
        return len(self.p) - 1

    def tail_mass(self, fraction: float = TAIL_FRACTION) -> float:
        cut = int(fraction * self.n_max)
        return float(self.p[cut + 1 :].sum())


def _normalize(p: np.ndarray) -> np.ndarray:
    neg = p < 0.0
    if neg.any():
        worst = p[neg].min()
        if worst < -NEGATIVITY_TOL:
            raise SteadyStateError(
                f"steady-state solve produced negativity {worst:.3e} beyond "
                f"tolerance {NEGATIVITY_TOL:.0e}; wrong null vector?"
            )
        p = np.where(neg, 0.0, p)
    return p / p.sum()


def _validate_unique_null(block0: SectorBlock) -> None:
    spec = _spectra.eigendecompose(block0)
    lam = spec.physical()
    small = np.abs(lam) < _spectra.ZERO_EIGENVALUE_TOL
    if small.sum() != 1:
        head = ", ".join(f"{abs(x):.3e}" for x in lam[:2]) if len(lam) else "none"
        raise SteadyStateError(
            "k=0 null space dimension != 1 among non-spurious candidates "
            f"(smallest |lambda|: {head}; {int(spec.spurious.sum())} of "
            f"{len(spec.eigenvalues)} pairs flagged spurious - cutoff too small?)"
        )


def solve_steady(block0: SectorBlock, validate: bool = True) -> DiagonalState:
    """Null vector of the k = 0 block, normalized to a probability vector.

    Elimination proceeds from the top level downward; for the tridiagonal
    generator every elimination pivot is the down-rate (the sub/super
    diagonals are read off the matrix, so this cross-checks the block
    builder, not the gain formula).  Uniqueness of the null space is
    verified spectrally unless ``validate`` is disabled.
    """
    if block0.k != 0:
        raise ValueError(f"solve_steady requires a k=0 block (got k={block0.k})")
    M = block0.matrix
    if np.abs(M.imag).max(initial=0.0) != 0.0:
        raise ValueError("k=0 block must be real")
    colsums = np.abs(M.real.sum(axis=0)).max()
    if colsums > 1e-9 * max(np.abs(M.real).max(), 1.0):
        raise SteadyStateError(f"k=0 block is not trace preserving (column sum {colsums:.3e})")
    up = np.diag(M.real, -1)     # rate m -> m+1
    down = np.diag(M.real, 1)    # rate m+1 -> m
    d = M.shape[0]
    if validate:
        _validate_unique_null(block0)
    # GTH back-substitution: eliminating states d-1, d-2, ... leaves the
    # tridiagonal off-diagonals untouched and every pivot equals the
    # down-rate, so pi_m = pi_{m-1} * up_{m-1} / down_{m-1}.
    p = np.zeros(d)
    p[0] = 1.0
    for m in range(1, d):
        if down[m - 1] <= 0.0:
            raise SteadyStateError(f"non-positive down-rate at level {m}")
        p[m] = p[m - 1] * (up[m - 1] / down[m - 1])
        if p[m] > 1e280:  # only relative sizes matter
            p[: m + 1] /= p[m]
    return DiagonalState(p=_normalize(p))


def birth_death_product(params: ModelParams) -> DiagonalState:
    """Closed-form detailed-balance steady state (independent oracle).

    Evaluated in log space to survive the exponentially large dynamic range
    at large n_ss.  An exact zero of f terminates the ladder: all levels
    above it carry zero weight.
    """
    f = gain_amplitudes(params)
    m = np.arange(params.n_max)
    with np.errstate(divide="ignore"):
        log_ratio = 2.0 * np.log(np.abs(f[:-1])) - np.log(params.gamma * (m + 1.0))
    logp = np.concatenate([[0.0], np.cumsum(log_ratio)])
    logp -= logp.max()
    with np.errstate(over="ignore"):
        p = np.exp(logp)
    return DiagonalState(p=_normalize(p))


def moments(state: DiagonalState, order: int) -> float:
    """Normal-ordered moment <a^dag^m a^m> = sum_m p_m m(m-1)...(m-order+1)."""
    if order < 0:
        raise ValueError("moment order must be >= 0")
    if order == 0:
        return float(state.p.sum())
    m = np.arange(len(state.p), dtype=float)
    fall = np.ones_like(m)
    for i in range(order):
        fall *= m - i
    return float(state.p @ fall)


def g2_zero(state: DiagonalState) -> float:
    """Second-order correlation g2(0) = <a^dag^2 a^2> / <a^dag a>^2."""
    n1 = moments(state, 1)
    if n1 <= 0.0:
        raise SteadyStateError("g2(0) undefined at zero photon number")
    return moments(state, 2) / n1**2


def fano(state: DiagonalState) -> float:
    """Fano factor Var(n)/<n>, cross-checked against 1 + <n>(g2 - 1)."""
    n1 = moments(state, 1)
    if n1 <= 0.0:
        raise SteadyStateError("Fano factor undefined at zero photon number")
    m = np.arange(len(state.p), dtype=float)
    var = float(state.p @ m**2) - n1**2
    via_variance = var / n1
    via_g2 = n1 * (g2_zero(state) - 1.0) + 1.0
    if abs(via_variance - via_g2) > 1e-10 * max(1.0, abs(via_variance)):
        raise SteadyStateError(
            f"Fano routes disagree: {via_variance!r} vs {via_g2!r}"
        )
    return via_variance
