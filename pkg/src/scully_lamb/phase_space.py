"""Phase-space representations: analytic P-function steady state, phase
diffusion coefficient, and Wigner transforms of Fock-space matrices.

The radial steady-state quasiprobability solves the weak-gain-saturation
Fokker-Planck equation; its exponent is

    E(r) = (r^2 / A) (A - Gamma - B r^2 / 2),

whose stationary point sits at r^2 = (A - Gamma)/B, the semiclassical
intensity.  It is eta- and omega-independent by construction and serves as
an independent oracle for the sector-0 null solve (agreement is WGS-level,
not exact: the leading relative deviation of <n> is (A - Gamma)/(4A)).

Wigner values are displaced-parity traces W(alpha) = (1/pi)
Tr[D_a exp(i pi n) D_a^dag M].  Using D_a P D_a^dag = D(2 alpha) P, each
grid point needs one set of displacement matrix elements in the closed
associated-Laguerre form; the scaled three-term recurrence runs vectorized
over the whole grid, O(n^2) work per point with entries bounded by 1, so
no matrix exponentials and no overflow at cutoffs of hundreds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.special import gammaln

from .model import ModelParams

__all__ = [
    "PhaseSpaceGrid",
    "p_ss_radial",
    "p_radial_moment",
    "diffusion_coefficient",
    "wigner_of_matrix",
    "displacement_matrix",
    "grid_axes",
    "QUAD_RTOL",
]

QUAD_RTOL = 1e-10
CUTOFF_RELIABLE_FRACTION = 0.8


@dataclass
class PhaseSpaceGrid:
    """Real field W(alpha) or P(alpha) on a rectangular grid.

    ``reliable`` masks points with |alpha|^2 <= 0.8 n_max, inside which
    truncated-basis values can be trusted.
    """

    alpha_re: np.ndarray
    alpha_im: np.ndarray
    values: np.ndarray
    reliable: np.ndarray


def _exponent(u: float, params: ModelParams) -> float:
    return (u / params.A) * (params.A - params.gamma - 0.5 * params.B * u)


def _peak_u(params: ModelParams) -> float:
    if params.B == 0.0:
        if params.A >= params.gamma:
            raise ValueError("P-function normalization diverges for B = 0 at A >= Gamma")
        return 0.0
    return max((params.A - params.gamma) / params.B, 0.0)


def _log_norm(params: ModelParams) -> float:
    """log N with N = integral_0^inf r exp(E(r)) dr, via u = r^2."""
    e_max = _exponent(_peak_u(params), params)
    val, _ = quad(
        lambda u: math.exp(_exponent(u, params) - e_max),
        0.0, np.inf, epsabs=0.0, epsrel=QUAD_RTOL, limit=500,
    )
    if not np.isfinite(val) or val <= 0.0:
        raise RuntimeError("P-function normalization quadrature failed")
    return e_max + math.log(0.5 * val)


def p_ss_radial(r, params: ModelParams):
    """Steady-state P density at radius r (per unit area d^2 alpha).

    Normalized so that integral_0^inf P(r) 2 pi r dr = 1; independent of
    eta and omega.
    """
    r_arr = np.asarray(r, dtype=float)
    if np.any(r_arr < 0.0):
        raise ValueError("radius must be >= 0")
    log_n = _log_norm(params)
    u = r_arr**2
    vals = np.exp(
        (u / params.A) * (params.A - params.gamma - 0.5 * params.B * u)
        - log_n - math.log(2.0 * math.pi)
    )
    return vals if vals.shape else float(vals)


def p_radial_moment(params: ModelParams, order: int = 1) -> float:
    """<|alpha|^(2 order)> under the radial steady state, by quadrature.

    order 1 is the P-representation photon number <a^dag a>.
    """
    e_max = _exponent(_peak_u(params), params)
    top, _ = quad(
        lambda u: u**order * math.exp(_exponent(u, params) - e_max),
        0.0, np.inf, epsabs=0.0, epsrel=QUAD_RTOL, limit=500,
    )
    bot, _ = quad(
        lambda u: math.exp(_exponent(u, params) - e_max),
        0.0, np.inf, epsabs=0.0, epsrel=QUAD_RTOL, limit=500,
    )
    return top / bot


def diffusion_coefficient(params: ModelParams, n_ss: float) -> float:
    """Phase diffusion coefficient D = A/(2 n_ss) + beta/2.

    Sets the laser linewidth: D -> 0 for the bare model as n_ss grows, but
    stays pinned near eta/2 with extra dephasing.
    """
    if n_ss <= 0.0:
        raise ValueError("n_ss must be > 0")
    return params.A / (2.0 * n_ss) + 0.5 * params.beta


def grid_axes(extent: float, points: int) -> np.ndarray:
    return np.linspace(-extent, extent, points)


def _scaled_laguerre_band(l: int, x: np.ndarray, count: int, log_abs_gamma: np.ndarray, lg: np.ndarray):
    """Yield s_n = sqrt(n!/(n+l)!) |gamma|^l e^{-x/2} L_n^l(x), n = 0..count-1.

    s_n are magnitudes of displacement matrix elements, bounded by 1, so the
    recurrence runs on well-scaled values; x may be an array (grid points).
    """
    lterm = l * log_abs_gamma if l else 0.0  # avoid 0 * (-inf) at gamma = 0
    log_base = 0.5 * (lg[0] - lg[l]) + lterm - 0.5 * x
    s_prev = np.exp(log_base)
    yield s_prev
    if count > 1:
        log_base1 = 0.5 * (lg[1] - lg[1 + l]) + lterm - 0.5 * x
        s_cur = np.exp(log_base1) * (1.0 + l - x)
        yield s_cur
        for n in range(1, count - 1):
            r1 = math.sqrt((n + 1.0) / (n + 1.0 + l))
            r2 = math.sqrt((n + 1.0) * n / ((n + 1.0 + l) * (n + l)))
            s_next = ((2.0 * n + 1.0 + l - x) * s_cur * r1 - (n + l) * s_prev * r2) / (n + 1.0)
            s_prev, s_cur = s_cur, s_next
            yield s_cur


def displacement_matrix(gamma_amp: complex, dim: int) -> np.ndarray:
    """Fock matrix <m|D(gamma)|n> in the associated-Laguerre closed form.

    <n+l|D|n> = (gamma/|gamma|)^l s_n, <n|D|n+l> = (-gamma*/|gamma|)^l s_n.
    """
    if gamma_amp == 0.0:
        return np.eye(dim, dtype=complex)
    lg = gammaln(np.arange(dim + 1) + 1.0)
    x = np.array([abs(gamma_amp) ** 2])
    log_abs = np.array([math.log(abs(gamma_amp))])
    u = gamma_amp / abs(gamma_amp)
    D = np.zeros((dim, dim), dtype=complex)
    for l in range(dim):
        s = np.fromiter(
            (v[0] for v in _scaled_laguerre_band(l, x, dim - l, log_abs, lg)),
            dtype=float, count=dim - l,
        )
        n = np.arange(dim - l)
        if l == 0:
            D[n, n] = s
        else:
            D[n + l, n] = u**l * s
            D[n, n + l] = (-np.conj(u)) ** l * s
    return D


def wigner_of_matrix(
    M: np.ndarray,
    alpha_re: np.ndarray,
    alpha_im: np.ndarray,
    n_max: int | None = None,
) -> PhaseSpaceGrid:
    """Displaced-parity Wigner transform of a Fock-space matrix M.

    Hermitian inputs give real fields (checked); sector eigenmatrices should
    be symmetrized (rho + rho^dag) before calling.  The discrete integral of
    the field over the plane approximates Tr M.
    """
    M = np.asarray(M, dtype=complex)
    d = M.shape[0]
    if M.ndim != 2 or M.shape != (d, d):
        raise ValueError("M must be square")
    if n_max is not None and d != n_max + 1:
        raise ValueError(f"M dimension {d} does not match n_max+1={n_max + 1}")
    alpha_re = np.asarray(alpha_re, dtype=float)
    alpha_im = np.asarray(alpha_im, dtype=float)
    RE, IM = np.meshgrid(alpha_re, alpha_im)
    alphas = (RE + 1j * IM).ravel()
    gam = 2.0 * alphas  # D_a P D_a^dag = D(2 alpha) P
    x = np.abs(gam) ** 2
    with np.errstate(divide="ignore"):
        log_abs = np.where(x > 0.0, 0.5 * np.log(np.where(x > 0.0, x, 1.0)), -np.inf)
    u = np.where(x > 0.0, gam / np.where(x > 0.0, np.abs(gam), 1.0), 1.0)
    lg = gammaln(np.arange(d + 1) + 1.0)
    parity = (-1.0) ** np.arange(d)
    scale = max(np.abs(M).max(), 1e-300)
    hermitian = np.allclose(M, M.conj().T, atol=1e-12 * scale)
    # Hermitian inputs: band pairs combine to 2 Re(u^l M[n, n+l]), so the
    # field is real by construction (not merely up to roundoff)
    acc = np.zeros(gam.shape, dtype=float if hermitian else complex)
    ul = np.ones_like(gam)
    for l in range(d):
        if l > 0:
            ul = ul * u
        upper = np.diag(M, l) * parity[: d - l]   # (-1)^n M[n, n+l]
        lower = np.diag(M, -l) * parity[: d - l]  # (-1)^n M[n+l, n]
        if l > 0 and not upper.any() and not lower.any():
            continue
        band = np.zeros_like(acc)
        for n, s_n in enumerate(_scaled_laguerre_band(l, x, d - l, log_abs, lg)):
            if l == 0:
                c = upper[n].real if hermitian else upper[n]
                if c != 0.0:
                    band += c * s_n
            elif hermitian:
                band += 2.0 * (ul * upper[n]).real * s_n
            else:
                band += (ul * upper[n] + np.conj(ul) * lower[n]) * s_n
        acc += band
    vals = (acc / math.pi).reshape(RE.shape)
    reliable = ((np.abs(RE + 1j * IM) ** 2) <= CUTOFF_RELIABLE_FRACTION * (d - 1))
    return PhaseSpaceGrid(alpha_re=alpha_re, alpha_im=alpha_im, values=vals, reliable=reliable)
