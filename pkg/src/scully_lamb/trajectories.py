"""Stochastic unravelings of the master equation.

Counting (photodetection) trajectories follow the first-order jump scheme:
between jumps the state evolves under the non-Hermitian
H_eff = omega a^dag a - (i/2) sum_j L_j^dag L_j (Euler step, renormalized);
at each step channel j fires with probability p_j = dt <L_j^dag L_j> and
replaces the state by L_j|psi> normalized.  One uniform draw per step
decides both whether and which jump occurs, so records are bit-identical
for a given seed.

Homodyne-like trajectories mix a real reference amplitude beta_j into each
channel: jumps use L_j + beta_j while the coherent part gains the Hermitian
compensation -(i/2) sum_j beta_j (L_j - L_j^dag), the unique choice that
leaves the ensemble-averaged master equation invariant under the shift.
beta_j = 0 reproduces the counting record exactly; large beta_j approaches
the diffusive homodyne limit.

RNG contract: every trajectory owns an independent stream derived from the
master seed by numpy's SeedSequence spawning (stream i = SeedSequence(seed)
.spawn(n)[i]); ensembles merge through sufficient statistics only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.special import gammaln

from .model import ModelParams

__all__ = [
    "TrajectoryRecord",
    "EnsembleResult",
    "counting_trajectory",
    "homodyne_trajectory",
    "counting_ensemble",
    "homodyne_ensemble",
    "trajectory_histogram",
    "coherent_state",
    "fock_state",
    "default_beta_ref",
    "JUMP_PROBABILITY_BOUND",
]

JUMP_PROBABILITY_BOUND = 0.1


def default_beta_ref(params: ModelParams) -> tuple[float, float, float]:
    """Reference amplitudes 10 sqrt(Gamma) per channel (homodyne default)."""
    b = 10.0 * math.sqrt(params.gamma)
    return (b, b, b)


class JumpProbabilityError(RuntimeError):
    pass


@dataclass
class TrajectoryRecord:
    """Observables and jump log of a single unraveling."""

    seed: int | None
    t: np.ndarray
    n_mean: np.ndarray
    x_mean: np.ndarray
    norm: np.ndarray
    jumps: list[tuple[float, int]] = field(default_factory=list)


@dataclass
class EnsembleResult:
    """Order-independent merge of trajectory sufficient statistics."""

    t: np.ndarray
    n_mean: np.ndarray
    n_stderr: np.ndarray
    x_mean: np.ndarray
    x_stderr: np.ndarray
    n_traj: int


def fock_state(n: int, n_max: int) -> np.ndarray:
    psi = np.zeros(n_max + 1, dtype=complex)
    psi[n] = 1.0
    return psi


def coherent_state(alpha: complex, n_max: int) -> np.ndarray:
    """Truncated coherent state, renormalized on the cutoff space."""
    m = np.arange(n_max + 1)
    log_mag = m * np.log(np.abs(alpha) + 1e-300) - 0.5 * gammaln(m + 1.0)
    log_mag -= log_mag.max()
    psi = np.exp(log_mag) * np.exp(1j * m * np.angle(alpha))
    return psi / np.linalg.norm(psi)


class _Channels:
    """Per-step application of the three (possibly shifted) jump operators.

    Holds the gain amplitudes f, the dephasing diagonal and the loss
    amplitudes for the current gain value, plus the tridiagonal complex
    H_eff = omega n - (i/2) sum beta_j (L_j - L_j^dag)
              - (i/2) sum (L_j + beta_j)^dag (L_j + beta_j).
    """

    def __init__(self, params: ModelParams, beta_ref: tuple[float, float, float]):
        self.params = params
        self.beta_ref = np.asarray(beta_ref, dtype=float)
        if np.any(self.beta_ref < 0.0):
            raise ValueError("reference amplitudes beta_j must be >= 0")
        self._assemble(params.A)
        self._gain_cached = params.A

    def _assemble(self, A: float):
        p = self.params
        n_max = p.n_max
        m = np.arange(n_max + 1.0)
        sqrt_a = math.sqrt(A)
        f = np.sqrt(m + 1.0) * (sqrt_a - p.B * (m + 1.0) / (2.0 * sqrt_a))
        f[-1] = 0.0
        self.f = f                                  # L1|m> = f(m)|m+1>
        self.deph = math.sqrt(p.beta) * (m + 1.0)    # L2|m> = deph(m)|m>
        self.loss = math.sqrt(p.gamma) * np.sqrt(m)  # L3|m> = loss(m)|m-1>
        b1, b2, b3 = self.beta_ref
        # sum_j (L_j + b_j)^dag (L_j + b_j), tridiagonal in the Fock basis
        diag = f**2 + self.deph**2 + self.loss**2 + float(self.beta_ref @ self.beta_ref)
        diag = diag + 2.0 * b2 * self.deph
        sub = b1 * f[:-1] + b3 * self.loss[1:]       # coeff of |m+1><m|
        # Hermitian compensation -(i/2) sum b_j (L_j - L_j^dag)
        comp_sub = -0.5j * (b1 * f[:-1] - b3 * self.loss[1:])
        # H_eff = omega n + comp - (i/2) * (sum (L+b)^dag (L+b))
        self.h_diag = p.omega * m - 0.5j * diag
        self.h_sub = comp_sub - 0.5j * sub
        self.h_sup = np.conj(comp_sub) - 0.5j * sub

    def refresh(self, A: float):
        if A != self._gain_cached:
            self._assemble(A)
            self._gain_cached = A

    def apply_heff(self, psi: np.ndarray) -> np.ndarray:
        out = psi * self.h_diag
        out[..., 1:] += psi[..., :-1] * self.h_sub
        out[..., :-1] += psi[..., 1:] * self.h_sup
        return out

    def apply_jump(self, j: int, psi: np.ndarray) -> np.ndarray:
        b = self.beta_ref[j]
        out = b * psi.copy() if b else np.zeros_like(psi)
        if j == 0:
            out[..., 1:] += self.f[:-1] * psi[..., :-1]
        elif j == 1:
            out += self.deph * psi
        else:
            out[..., :-1] += self.loss[1:] * psi[..., 1:]
        return out


def _observables(psi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    m = np.arange(psi.shape[-1])
    n = (np.abs(psi) ** 2 * m).sum(axis=-1)
    a = (np.conj(psi[..., :-1]) * np.sqrt(m[1:]) * psi[..., 1:]).sum(axis=-1)
    return n.real, a.real  # <x> with x = (a + a^dag)/2 is Re <a>


def _run_batch(
    params: ModelParams,
    psi0: np.ndarray,
    beta_ref: tuple[float, float, float],
    t_f: float,
    dt: float,
    seeds: list,
    A_of_t: Callable[[float], float] | None,
    record_every: int,
    keep_jumps: bool,
):
    """Vectorized stepping of a batch of trajectories with private streams."""
    n_steps = int(round(t_f / dt))
    if abs(n_steps * dt - t_f) > 1e-9 * max(t_f, 1.0):
        n_steps = int(math.ceil(t_f / dt))
    batch = len(seeds)
    d = params.n_max + 1
    psi = np.tile(np.asarray(psi0, complex) / np.linalg.norm(psi0), (batch, 1))
    draws = np.empty((batch, n_steps))
    for i, s in enumerate(seeds):
        draws[i] = np.random.default_rng(s).random(n_steps)
    ch = _Channels(params, beta_ref)
    rec_t = [0.0]
    n0, x0 = _observables(psi)
    rec_n, rec_x = [n0], [x0]
    rec_norm = [np.linalg.norm(psi, axis=-1)]
    jumps: list[list[tuple[float, int]]] = [[] for _ in range(batch)]
    for step in range(n_steps):
        t = step * dt
        if A_of_t is not None:
            ch.refresh(A_of_t(t))
        jp = np.empty((batch, 3))
        amps = []
        for j in range(3):
            lj = ch.apply_jump(j, psi)
            amps.append(lj)
            jp[:, j] = dt * (np.abs(lj) ** 2).sum(axis=-1)
        total = jp.sum(axis=-1)
        worst = total.max()
        if worst >= JUMP_PROBABILITY_BOUND:
            raise JumpProbabilityError(
                f"sum of jump probabilities {worst:.3f} >= {JUMP_PROBABILITY_BOUND} "
                f"at t={t:.4g}; reduce dt"
            )
        u = draws[:, step]
        cum = np.cumsum(jp, axis=-1)
        which = np.full(batch, -1)
        for j in range(2, -1, -1):
            which[u < cum[:, j]] = j
        no_jump = which < 0
        if no_jump.any():
            evolved = psi[no_jump] - 1j * dt * ch.apply_heff(psi[no_jump])
            evolved /= np.linalg.norm(evolved, axis=-1, keepdims=True)
            psi[no_jump] = evolved
        for j in range(3):
            hit = which == j
            if hit.any():
                jumped = amps[j][hit]
                norms = np.linalg.norm(jumped, axis=-1, keepdims=True)
                if np.any(norms == 0.0):
                    raise RuntimeError(f"norm collapse after jump {j + 1} at t={t:.4g}")
                psi[hit] = jumped / norms
                if keep_jumps:
                    for i in np.nonzero(hit)[0]:
                        jumps[i].append((t + dt, j + 1))
        if (step + 1) % record_every == 0:
            rec_t.append((step + 1) * dt)
            n, x = _observables(psi)
            rec_n.append(n)
            rec_x.append(x)
            rec_norm.append(np.linalg.norm(psi, axis=-1))
    t_arr = np.array(rec_t)
    n_arr = np.stack(rec_n, axis=1)   # (batch, n_rec)
    x_arr = np.stack(rec_x, axis=1)
    norm_arr = np.stack(rec_norm, axis=1)
    return t_arr, n_arr, x_arr, norm_arr, jumps


def _seed_entropy(seed) -> int | None:
    if isinstance(seed, np.random.SeedSequence):
        ent = seed.entropy
        return int(ent) if np.isscalar(ent) else None
    return int(seed)


def counting_trajectory(
    params: ModelParams,
    psi0: np.ndarray,
    t_f: float,
    dt: float,
    seed,
    A_of_t: Callable[[float], float] | None = None,
    record_every: int = 1,
) -> TrajectoryRecord:
    """Single photodetection-unraveling record (see module docstring)."""
    return homodyne_trajectory(
        params, psi0, (0.0, 0.0, 0.0), t_f, dt, seed,
        A_of_t=A_of_t, record_every=record_every,
    )


def homodyne_trajectory(
    params: ModelParams,
    psi0: np.ndarray,
    beta_ref: tuple[float, float, float],
    t_f: float,
    dt: float,
    seed,
    A_of_t: Callable[[float], float] | None = None,
    record_every: int = 1,
) -> TrajectoryRecord:
    """Single record with reference field beta_ref mixed into each channel."""
    t, n, x, norm, jumps = _run_batch(
        params, psi0, tuple(beta_ref), t_f, dt, [seed],
        A_of_t, record_every, keep_jumps=True,
    )
    return TrajectoryRecord(
        seed=_seed_entropy(seed),
        t=t,
        n_mean=n[0],
        x_mean=x[0],
        norm=norm[0],
        jumps=jumps[0],
    )


def _ensemble(params, psi0, beta_ref, t_f, dt, n_traj, seed, A_of_t, record_every):
    seeds = np.random.SeedSequence(seed).spawn(n_traj)
    t, n, x, _, _ = _run_batch(
        params, psi0, beta_ref, t_f, dt, seeds, A_of_t, record_every, keep_jumps=False
    )
    def _stats(arr):
        mean = arr.mean(axis=0)
        if n_traj > 1:
            err = arr.std(axis=0, ddof=1) / math.sqrt(n_traj)
        else:
            err = np.zeros_like(mean)
        return mean, err
    n_mean, n_err = _stats(n)
    x_mean, x_err = _stats(x)
    return EnsembleResult(t, n_mean, n_err, x_mean, x_err, n_traj)


def counting_ensemble(
    params: ModelParams,
    psi0: np.ndarray,
    t_f: float,
    dt: float,
    n_traj: int,
    seed: int,
    A_of_t: Callable[[float], float] | None = None,
    record_every: int = 1,
) -> EnsembleResult:
    return _ensemble(
        params, psi0, (0.0, 0.0, 0.0), t_f, dt, n_traj, seed, A_of_t, record_every
    )


def homodyne_ensemble(
    params: ModelParams,
    psi0: np.ndarray,
    beta_ref: tuple[float, float, float],
    t_f: float,
    dt: float,
    n_traj: int,
    seed: int,
    A_of_t: Callable[[float], float] | None = None,
    record_every: int = 1,
) -> EnsembleResult:
    return _ensemble(
        params, psi0, tuple(beta_ref), t_f, dt, n_traj, seed, A_of_t, record_every
    )


def trajectory_histogram(
    records: TrajectoryRecord | Sequence[TrajectoryRecord],
    burn_in: float = 0.0,
    bins: int | np.ndarray = 50,
) -> tuple[np.ndarray, np.ndarray]:
    """Empirical distribution of <n> samples past the burn-in window.

    Returns (bin_edges, mass) with the masses summing to one.
    """
    if isinstance(records, TrajectoryRecord):
        records = [records]
    samples = np.concatenate([r.n_mean[r.t >= burn_in] for r in records])
    if samples.size < 2:
        raise ValueError("not enough samples past burn-in for a histogram")
    counts, edges = np.histogram(samples, bins=bins)
    return edges, counts / counts.sum()
