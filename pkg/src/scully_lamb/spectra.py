"""Sector eigendecomposition, spurious filtering, gap extraction, sweeps.

Blocks are diagonalized densely (they are at most a few thousand square once
the U(1) decomposition is exploited).  A k >= 0 block is a real tridiagonal
matrix plus the scalar shift -i omega k; whenever all products of paired
off-diagonal entries are nonnegative the block is similar to a real
symmetric tridiagonal matrix and LAPACK's symmetric solver applies, which
is both exact (no Jordan ambiguity) and an order of magnitude faster than
the general nonsymmetric path.  Cutoffs extending past the gain-saturation
level 2A/B break that positivity and fall back to the general solver; that
regime is precisely where spurious cutoff eigenvalues appear and are
flagged by weight above the saturation level.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from concurrent.futures import Executor

import numpy as np
import scipy.linalg

from .model import ModelParams, apply_scaling, semiclassical_nss
from .liouvillian import SectorBlock, build_sector_block

__all__ = [
    "SectorSpectrum",
    "GapReport",
    "SweepRow",
    "eigendecompose",
    "filter_spurious",
    "liouvillian_gap",
    "sector_sweep",
    "collapse_sweep",
    "auto_n_max",
    "SPURIOUS_WEIGHT_THRESHOLD",
    "ZERO_EIGENVALUE_TOL",
]

ZERO_EIGENVALUE_TOL = 1e-10
SPURIOUS_WEIGHT_THRESHOLD = 0.5


class EigensolverError(RuntimeError):
    pass


@dataclass
class SectorSpectrum:
    """Eigenpairs of one sector block, sorted by |Re| ascending.

    Ties are broken by ascending Im for cross-platform determinism.
    Eigenvectors are unit 2-norm columns; ``spurious[j]`` marks cutoff
    artifacts (weight above the saturation level), excluded from gap logic.
    """

    k: int
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    spurious: np.ndarray
    params: ModelParams = field(repr=False)

    def physical(self) -> np.ndarray:
        """Eigenvalues with spurious pairs removed (ordering preserved)."""
        return self.eigenvalues[~self.spurious]


@dataclass
class GapReport:
    """Liouvillian gap and the per-sector slowest rates feeding it."""

    gap: complex
    sector_of_gap: int
    per_sector: dict[int, np.ndarray]


def _sort_order(w: np.ndarray) -> np.ndarray:
    return np.lexsort((w.imag, np.abs(w.real)))


def _tridiagonal_parts(M: np.ndarray):
    """(sub, diag, sup, im_shift) if M is real-tridiagonal + i*shift, else None."""
    d = M.shape[0]
    if d == 1:
        return np.empty(0), M.diagonal().real.copy(), np.empty(0), float(M[0, 0].imag)
    band = np.diag(M.diagonal()) + np.diag(np.diag(M, -1), -1) + np.diag(np.diag(M, 1), 1)
    if np.count_nonzero(M - band):
        return None
    diag = M.diagonal()
    shift = diag.imag
    if not np.all(shift == shift[0]):
        return None
    sub, sup = np.diag(M, -1), np.diag(M, 1)
    if np.any(sub.imag) or np.any(sup.imag):
        return None
    return sub.real.copy(), diag.real.copy(), sup.real.copy(), float(shift[0])


def eigendecompose(block: SectorBlock) -> SectorSpectrum:
    """Full dense eigendecomposition of one sector block.

    Uses the symmetrizing similarity S^-1 T S (S diagonal, ratios
    sqrt(sub/sup)) when every sub*sup >= 0; eigenvectors are mapped back in
    log space so that the exponentially small tail components keep their
    relative accuracy.
    """
    M = block.matrix
    parts = _tridiagonal_parts(M)
    if parts is not None:
        sub, diag, sup, im_shift = parts
        prod = sub * sup
        # strict positivity: an exact zero decouples the chain and the
        # diagonal similarity becomes singular (block-triangular case),
        # which only the general solver treats correctly
        if np.all(prod > 0.0) or len(prod) == 0:
            w, v = _eig_symmetrizable(sub, diag, sup, prod)
            w = w.astype(complex)
            if im_shift:
                w = w + 1j * im_shift
            order = _sort_order(w)
            w, v = w[order], v[:, order].astype(complex)
            spur = _spurious_flags(v, block.k, block.params)
            return SectorSpectrum(block.k, w, v, spur, block.params)
    try:
        w, v = scipy.linalg.eig(M)
    except Exception as exc:  # pragma: no cover - LAPACK failures are rare
        raise EigensolverError(
            f"eigensolver failed on sector k={block.k}, dim={block.dim}: {exc}"
        ) from exc
    order = _sort_order(w)
    w, v = w[order], v[:, order]
    v = v / np.linalg.norm(v, axis=0)
    spur = _spurious_flags(v, block.k, block.params)
    return SectorSpectrum(block.k, w, v, spur, block.params)


def _eig_symmetrizable(sub, diag, sup, prod):
    """Eigenpairs of a tridiagonal T whose symmetrization is exact.

    T = S T_sym S^-1 with (S_{i+1}/S_i)^2 = sub_{i+1..}/sup; eigenvectors of
    T are S v and are renormalized per column.  log-space scaling avoids
    overflow of the similarity along long chains.
    """
    d = len(diag)
    if d == 1:
        return diag.copy(), np.ones((1, 1))
    w, v = scipy.linalg.eigh_tridiagonal(diag, np.sqrt(prod))
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = 0.5 * (np.log(np.abs(sub)) - np.log(np.abs(sup)))
    ratios = np.where(np.isfinite(ratios), ratios, -np.inf)  # sub==0 decouples the chain
    log_s = np.concatenate([[0.0], np.cumsum(ratios)])
    with np.errstate(divide="ignore"):
        log_v = np.log(np.abs(v)) + log_s[:, None]
    log_v -= log_v.max(axis=0, keepdims=True)
    out = np.sign(v) * np.exp(log_v)
    out /= np.linalg.norm(out, axis=0)
    return w, out


def _saturation_level(params: ModelParams) -> float:
    """m* above which eigenvector weight marks a cutoff artifact.

    min(2A/B - 1, 0.9 n_max); with B = 0 there is no saturation scale and
    nothing is ever flagged.
    """
    if params.B == 0.0:
        return math.inf
    return min(2.0 * params.A / params.B - 1.0, 0.9 * params.n_max)


def _spurious_flags(
    vectors: np.ndarray,
    k: int,
    params: ModelParams,
    weight_threshold: float = SPURIOUS_WEIGHT_THRESHOLD,
) -> np.ndarray:
    m_levels = np.arange(abs(k), params.n_max + 1)
    m_star = _saturation_level(params)
    tail = m_levels > m_star
    if not tail.any():
        return np.zeros(vectors.shape[1], dtype=bool)
    weights = (np.abs(vectors[tail, :]) ** 2).sum(axis=0)
    return weights > weight_threshold


def filter_spurious(
    spectrum: SectorSpectrum,
    params: ModelParams | None = None,
    weight_threshold: float = SPURIOUS_WEIGHT_THRESHOLD,
) -> SectorSpectrum:
    """Re-flag eigenpairs whose weight above the saturation level exceeds
    ``weight_threshold``; flagged pairs are discarded a posteriori from gap
    computations."""
    params = params or spectrum.params
    flags = _spurious_flags(spectrum.eigenvectors, spectrum.k, params, weight_threshold)
    return SectorSpectrum(
        spectrum.k, spectrum.eigenvalues, spectrum.eigenvectors, flags, params
    )


def _per_sector_leading(spec: SectorSpectrum, levels: int) -> np.ndarray:
    """lambda_0^(k), lambda_1^(k), ... skipping the k=0 steady state."""
    lam = spec.physical()
    if spec.k == 0:
        if len(lam) == 0 or np.abs(lam[0]) > ZERO_EIGENVALUE_TOL:
            raise EigensolverError(
                f"sector 0 lacks a steady-state eigenvalue below {ZERO_EIGENVALUE_TOL}"
            )
        if len(lam) > 1 and np.abs(lam[1]) < ZERO_EIGENVALUE_TOL:
            raise EigensolverError(
                "sector 0 steady state is degenerate: two eigenvalues below "
                f"{ZERO_EIGENVALUE_TOL} ({lam[0]}, {lam[1]})"
            )
        lam = lam[1:]
    return lam[:levels]


def liouvillian_gap(spectra: list[SectorSpectrum], levels: int = 1) -> GapReport:
    """Slowest nonzero relaxation rate over the provided sectors.

    The unique k=0 zero eigenvalue (the steady state) is excluded; among the
    remaining non-spurious eigenvalues the one with smallest |Re| wins.
    """
    per_sector: dict[int, np.ndarray] = {}
    best = None
    best_k = None
    for spec in spectra:
        lead = _per_sector_leading(spec, levels)
        per_sector[spec.k] = lead
        if len(lead) and (best is None or abs(lead[0].real) < abs(best.real)):
            best, best_k = lead[0], spec.k
    if best is None:
        raise EigensolverError("no non-spurious eigenvalues available for the gap")
    return GapReport(gap=best, sector_of_gap=best_k, per_sector=per_sector)


def auto_n_max(params: ModelParams, A_max: float | None = None) -> int:
    """Cutoff rule n_max = max(30, ceil(4 n_ss)) at the largest gain of a sweep.

    The support scale is the eta-free semiclassical intensity (A - Gamma)/B:
    the quantum steady state is unaffected by eta, so the cutoff must be too
    (identical populations across eta require identical cutoffs).
    """
    p = replace(params, eta=0.0) if A_max is None else replace(params, A=A_max, eta=0.0)
    nss = semiclassical_nss(p)
    if math.isinf(nss):
        raise ValueError("auto_n_max undefined for B = 0 above threshold")
    return max(30, int(math.ceil(4.0 * nss)))


@dataclass
class SweepRow:
    N: float
    A: float
    k: int
    j: int
    eigenvalue: complex
    spurious: bool
    failed: bool = False


def _sweep_point(base, A, N, sectors, levels, n_max):
    scaled = apply_scaling(base, N, mu=0.0).with_n_max(n_max)
    # the sweep variable is the gain in units of the (mu=0 invariant) gamma
    point = replace(scaled, A=A * scaled.gamma)
    rows = []
    for k in sectors:
        try:
            spec = eigendecompose(build_sector_block(point, k))
            lam = spec.physical()
            for j in levels:
                if j < len(lam):
                    rows.append(SweepRow(N, A, k, j, lam[j], False))
                else:
                    rows.append(SweepRow(N, A, k, j, complex(np.nan), False, failed=True))
        except EigensolverError:
            rows.extend(SweepRow(N, A, k, j, complex(np.nan), False, failed=True) for j in levels)
    return rows


def sector_sweep(
    base: ModelParams,
    A_grid,
    N_list,
    sectors,
    levels,
    executor: Executor | None = None,
    n_max_override: int | None = None,
) -> list[SweepRow]:
    """Eigenvalue table over a (N, A) grid at mu = 0 scaling.

    For each N one shared cutoff is selected from the largest gain in the
    grid (steady-state support plus tail headroom), so tracked eigenvalue
    curves are free of cutoff-induced jumps.  Rows are keyed (N, A, k, j)
    and merged order-independently; failed points are marked, not fatal.
    """
    A_grid = list(A_grid)
    N_list = list(N_list)
    sectors = list(sectors)
    levels = list(levels)
    if not A_grid or not N_list:
        raise ValueError("sector_sweep requires non-empty A and N grids")
    jobs = []
    for N in N_list:
        scaled = apply_scaling(base, N, mu=0.0)
        n_max = n_max_override or auto_n_max(scaled, A_max=max(A_grid) * scaled.gamma)
        jobs.extend((base, A, N, sectors, levels, n_max) for A in A_grid)
    if executor is None:
        results = [_sweep_point(*j) for j in jobs]
    else:
        results = list(executor.map(lambda j: _sweep_point(*j), jobs))
    rows = [r for chunk in results for r in chunk]
    rows.sort(key=lambda r: (r.N, r.A, r.k, r.j))
    return rows


@dataclass
class CollapseMinimum:
    N: float
    k: int
    j: int
    min_abs_re: float
    argmin_A: float


def collapse_sweep(
    base: ModelParams,
    A_grid,
    N_list,
    sectors,
    levels,
    executor: Executor | None = None,
) -> tuple[list[SweepRow], list[CollapseMinimum]]:
    """Spectral-collapse table plus per-(N, k, j) minima of |Re lambda| over A."""
    rows = sector_sweep(base, A_grid, N_list, sectors, levels, executor=executor)
    minima = []
    for N in sorted({r.N for r in rows}):
        for k in sorted({r.k for r in rows}):
            for j in sorted({r.j for r in rows}):
                vals = [
                    (abs(r.eigenvalue.real), r.A)
                    for r in rows
                    if r.N == N and r.k == k and r.j == j and not r.failed
                ]
                if vals:
                    v, a = min(vals)
                    minima.append(CollapseMinimum(N, k, j, v, a))
    return rows, minima
