"""Jump operators, Liouvillian superoperator and its U(1) sector blocks.

The Scully-Lamb Lindblad generator on a Fock space truncated at n_max,

    L rho = -i[omega a^dag a, rho] + sum_j D[L_j] rho,

with the three channels

    L1 = a^dag (sqrt(A) - B/(2 sqrt(A)) a a^dag)   (saturable gain)
    L2 = sqrt(beta) a a^dag,  beta = (3B + 4 eta)/4 (dephasing)
    L3 = sqrt(Gamma) a                              (photon loss)

Hard truncation is applied to a and a^dag *before* forming dissipators
(a^dag|n_max> = 0), which keeps the generator of genuine Lindblad form on
the truncated space; L2 is the projection of the full diagonal operator,
sqrt(beta) (m+1) |m><m| for every m including the cutoff level, so the
dephasing acts on the k-th density-matrix diagonal as the exact scalar
-beta k^2/2.

The U(1) symmetry decouples the density-matrix diagonals: the coefficients
c_m of |m><m-k| evolve under a (n_max+1-|k|)-dimensional block.  Blocks
for k < 0 are entrywise complex conjugates of the k > 0 blocks and are
never rebuilt.

Vectorization convention (shared by every consumer): column stacking,
vec(rho)[n*d + m] = rho[m, n], hence A rho B <-> kron(B.T, A).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .model import ModelParams

__all__ = [
    "SectorBlock",
    "annihilation",
    "creation",
    "gain_amplitudes",
    "build_jump_operators",
    "build_hamiltonian",
    "dissipator_superoperator",
    "hamiltonian_superoperator",
    "build_full_superoperator",
    "build_sector_block",
    "sector_tridiagonal",
    "build_nonlindblad_generator",
    "vectorize",
    "unvectorize",
    "embed_sector_vector",
    "trace_functional",
    "steady_from_superoperator",
    "FULL_SUPEROP_DEFAULT_LIMIT",
]

# Full (n_max+1)^2-dimensional superoperators are O(n_max^6) to
# eigendecompose; they exist only as cross-validation oracles.
FULL_SUPEROP_DEFAULT_LIMIT = 12


def annihilation(n_max: int) -> np.ndarray:
    """Truncated annihilation operator, a|n> = sqrt(n)|n-1>."""
    return np.diag(np.sqrt(np.arange(1.0, n_max + 1.0)), 1)


def creation(n_max: int) -> np.ndarray:
    """Truncated creation operator; a^dag|n_max> = 0 (hard truncation)."""
    return annihilation(n_max).T.copy()


def gain_amplitudes(params: ModelParams) -> np.ndarray:
    """Ladder amplitudes f(m) of the gain channel, L1|m> = f(m)|m+1>.

    f(m) = sqrt(m+1) (sqrt(A) - B (m+1) / (2 sqrt(A))) for m < n_max and
    f(n_max) = 0 by truncation.  f changes sign at the saturation level
    m + 1 = 2A/B; cutoffs beyond it produce the spurious eigenvalues
    handled by spectra.filter_spurious.
    """
    m = np.arange(params.n_max + 1.0)
    sqrt_a = np.sqrt(params.A)
    f = np.sqrt(m + 1.0) * (sqrt_a - params.B * (m + 1.0) / (2.0 * sqrt_a))
    f[-1] = 0.0
    return f


def build_jump_operators(params: ModelParams) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Dense (n_max+1)^2 matrices (L1, L2, L3) of the three channels."""
    n_max = params.n_max
    f = gain_amplitudes(params)
    L1 = np.diag(f[:-1], -1)  # L1|m> = f(m)|m+1>
    L2 = np.sqrt(params.beta) * np.diag(np.arange(1.0, n_max + 2.0))
    L3 = np.sqrt(params.gamma) * annihilation(n_max)
    return L1, L2, L3


def build_hamiltonian(params: ModelParams) -> np.ndarray:
    """Free Hamiltonian omega a^dag a."""
    return params.omega * np.diag(np.arange(params.n_max + 1.0))


def vectorize(rho: np.ndarray) -> np.ndarray:
    """Column-stacked vec(rho)."""
    return np.asarray(rho).reshape(-1, order="F")


def unvectorize(v: np.ndarray) -> np.ndarray:
    d = int(round(np.sqrt(v.size)))
    return np.asarray(v).reshape((d, d), order="F")


def dissipator_superoperator(L: np.ndarray) -> np.ndarray:
    """Matrix of D[L] = L . L^dag - {L^dag L, .}/2 in the vec convention."""
    d = L.shape[0]
    eye = np.eye(d)
    LdL = L.conj().T @ L
    return (
        np.kron(L.conj(), L)
        - 0.5 * np.kron(eye, LdL)
        - 0.5 * np.kron(LdL.T, eye)
    )


def hamiltonian_superoperator(H: np.ndarray) -> np.ndarray:
    """Matrix of -i[H, .] in the vec convention."""
    d = H.shape[0]
    eye = np.eye(d)
    return -1j * (np.kron(eye, H) - np.kron(H.T, eye))


def build_full_superoperator(
    params: ModelParams, oracle_limit: int = FULL_SUPEROP_DEFAULT_LIMIT
) -> np.ndarray:
    """Dense (n_max+1)^2 x (n_max+1)^2 Liouvillian matrix (oracle path)."""
    if params.n_max > oracle_limit:
        raise ValueError(
            f"n_max={params.n_max} exceeds the full-superoperator oracle limit "
            f"{oracle_limit}; use sector blocks instead"
        )
    S = hamiltonian_superoperator(build_hamiltonian(params)).astype(complex)
    for L in build_jump_operators(params):
        S += dissipator_superoperator(L)
    return S


@dataclass
class SectorBlock:
    """Liouvillian restricted to the k-th density-matrix diagonal.

    For k >= 0 the coefficient with index i (i = 0..dim-1) multiplies
    |m><m-k| with m = k + i; for k < 0 the block is the entrywise complex
    conjugate of block(|k|) and index i labels |m-|k|><m| instead.
    """

    k: int
    matrix: np.ndarray
    params: ModelParams = field(repr=False)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def fock_levels(self) -> np.ndarray:
        """Upper Fock index m of the basis element carried by each entry."""
        return np.arange(abs(self.k), self.params.n_max + 1)


def sector_tridiagonal(
    params: ModelParams, k: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray, float]:
    """Real tridiagonal data (sub, diag, sup) and imaginary shift of block k >= 0.

    Acting on c_m of |m><m-k| with n = m - k:
      gain:      f(m-1) f(n-1) c_{m-1} - (f(m)^2 + f(n)^2)/2 c_m
      loss:      Gamma sqrt((m+1)(n+1)) c_{m+1} - Gamma (m+n)/2 c_m
      dephasing: -(beta k^2 / 2) c_m
      Hamiltonian: -i omega k c_m   (returned separately as the shift)
    """
    if k < 0:
        raise ValueError("sector_tridiagonal expects k >= 0")
    n_max = params.n_max
    f = gain_amplitudes(params)
    m = np.arange(k, n_max + 1)
    n = m - k
    diag = -0.5 * (f[m] ** 2 + f[n] ** 2) - 0.5 * params.gamma * (m + n)
    if k != 0:
        # k**2 factor written explicitly so that k = 0 blocks are built by
        # the identical code path with no beta contribution at all: sector-0
        # physics is bit-identical for any eta.
        diag = diag - 0.5 * params.beta * k * k
    sub = f[m[1:] - 1] * f[n[1:] - 1]
    sup = params.gamma * np.sqrt((m[:-1] + 1.0) * (n[:-1] + 1.0))
    return sub, diag, sup, -params.omega * k


def build_sector_block(params: ModelParams, k: int) -> SectorBlock:
    """Sector block for any |k| <= n_max; k < 0 obtained by conjugation."""
    if abs(k) > params.n_max:
        raise ValueError(f"|k|={abs(k)} exceeds n_max={params.n_max}")
    if k < 0:
        return SectorBlock(k=k, matrix=build_sector_block(params, -k).matrix.conj(), params=params)
    sub, diag, sup, im_shift = sector_tridiagonal(params, k)
    M = np.diag(diag.astype(complex))
    if len(sub):
        M += np.diag(sub.astype(complex), -1)
        M += np.diag(sup.astype(complex), 1)
    if im_shift != 0.0:
        M += 1j * im_shift * np.eye(len(diag))
    return SectorBlock(k=k, matrix=M, params=params)


def embed_sector_vector(c: np.ndarray, k: int, n_max: int) -> np.ndarray:
    """Coefficient vector of sector k as a full (n_max+1)^2 Fock-space matrix."""
    c = np.asarray(c)
    d = n_max + 1
    if c.size != d - abs(k):
        raise ValueError(f"sector-{k} vector must have length {d - abs(k)}")
    M = np.zeros((d, d), dtype=complex)
    if k >= 0:
        M[np.arange(k, d), np.arange(0, d - k)] = c
    else:
        M[np.arange(0, d + k), np.arange(-k, d)] = c
    return M


def trace_functional(d: int) -> np.ndarray:
    """Row vector t with t @ vec(rho) = Tr rho."""
    t = np.zeros(d * d)
    t[:: d + 1] = 1.0
    return t


def steady_from_superoperator(S: np.ndarray) -> np.ndarray:
    """Steady-state density matrix from a dense superoperator (oracle scale).

    Eigenvector of the eigenvalue closest to zero, normalized to unit trace
    with the Hermitian part taken.
    """
    w, v = np.linalg.eig(S)
    rho = unvectorize(v[:, np.argmin(np.abs(w))])
    rho = 0.5 * (rho + rho.conj().T)
    return rho / np.trace(rho).real


def _anticommutator_superoperator(X: np.ndarray) -> np.ndarray:
    d = X.shape[0]
    eye = np.eye(d)
    return np.kron(eye, X) + np.kron(X.T, eye)


def build_nonlindblad_generator(
    A: float,
    B1: float,
    B2: float,
    gamma: float,
    omega: float,
    n_max: int,
    oracle_limit: int = FULL_SUPEROP_DEFAULT_LIMIT,
) -> np.ndarray:
    """Cavity-only Scully-Lamb generator before the weak-saturation expansion.

    -i[omega a^dag a, .] + Gamma D[a] + A D[a^dag] + B1 D[a a^dag] - B2 K[a]
    with the non-Lindblad saturation term
    K[a] rho = a^dag {a a^dag, rho} a - {(a a^dag)^2, rho}.

    Trace preserving but not completely positive; for B1 = B2 = 0 it equals
    the Lindblad generator at B = 0.  Returned as a dense superoperator for
    spectral/steady-state comparison with the Lindblad form.
    """
    if n_max > oracle_limit:
        raise ValueError(
            f"n_max={n_max} exceeds the non-Lindblad oracle limit {oracle_limit}"
        )
    a = annihilation(n_max)
    ad = creation(n_max)
    aad = a @ ad
    eye = np.eye(n_max + 1)
    S = hamiltonian_superoperator(omega * ad @ a).astype(complex)
    S += gamma * dissipator_superoperator(a)
    S += A * dissipator_superoperator(ad)
    S += B1 * dissipator_superoperator(aad)
    if B2 != 0.0:
        # K[a] rho = (a^dag a a^dag) rho a + a^dag rho (a a^dag a) - {aad^2, rho}
        K = (
            np.kron(a.T, ad @ aad)
            + np.kron((aad @ a).T, ad)
            - np.kron(eye, aad @ aad)
            - np.kron((aad @ aad).T, eye)
        )
        S -= B2 * K
    return S
