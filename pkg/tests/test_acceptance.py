"""Acceptance suite: one test per criterion, run at the stated tolerances.

Each test prints one line per clause and fails if any clause fails, so
`pytest -v tests/test_acceptance.py` reads as a pass/fail line per
criterion.  Tolerances are pinned here, not calibrated.

Shared heavy computations (the collapse sweep) run once per session.
"""

import time
from dataclasses import replace

import numpy as np
import pytest
from scipy.optimize import linear_sum_assignment

from scully_lamb.model import ModelParams, apply_scaling
from scully_lamb.liouvillian import build_full_superoperator, build_sector_block
from scully_lamb.spectra import (
    auto_n_max,
    collapse_sweep,
    eigendecompose,
    liouvillian_gap,
)
from scully_lamb.steady_state import (
    birth_death_product,
    fano,
    g2_zero,
    moments,
    solve_steady,
)
from scully_lamb.dynamics import evolve_full, evolve_sector0, fit_decay_rate, hysteresis
from scully_lamb.trajectories import (
    coherent_state,
    counting_ensemble,
    counting_trajectory,
    fock_state,
    homodyne_ensemble,
)
from scully_lamb.phase_space import p_radial_moment

GAMMA = 1.0
B_BASE = 0.1  # figure convention: B/Gamma = 1e-1 / N after mu = 0 scaling


def fig_params(A, N, eta=0.0, omega=0.0, n_max=None):
    base = apply_scaling(ModelParams(A=1.0, B=B_BASE, gamma=GAMMA, eta=eta, omega=omega), N, mu=0.0)
    p = replace(base, A=A * GAMMA)
    return p.with_n_max(n_max if n_max is not None else auto_n_max(p))


def check(criterion, clauses, t0=None):
    stamp = f" [{time.time() - t0:.1f}s]" if t0 is not None else ""
    print(f"\nACCEPTANCE {criterion}{stamp}")
    for desc, ok in clauses:
        print(f"  [{'ok' if ok else 'FAIL'}] {desc}")
    bad = [d for d, ok in clauses if not ok]
    assert not bad, f"criterion {criterion}: " + "; ".join(bad)


# --------------------------------------------------------------- fixtures

COLLAPSE_A = np.round(np.arange(0.85, 1.3501, 0.025), 10)
COLLAPSE_N = [25.0, 50.0, 100.0]


@pytest.fixture(scope="session")
def collapse_result():
    base = ModelParams(A=1.0, B=B_BASE, gamma=GAMMA, eta=0.0, omega=0.0)
    t0 = time.time()
    rows, minima = collapse_sweep(base, list(COLLAPSE_A), COLLAPSE_N, [0, 1, 2], [0, 1, 2])
    return rows, minima, time.time() - t0


# --------------------------------------------------------------- criteria

def test_criterion_01_sector_union_oracle():
    t0 = time.time()
    p = fig_params(1.25, 100.0, omega=1.0, n_max=8)
    w_full = np.linalg.eigvals(build_full_superoperator(p))
    w_sec = np.concatenate(
        [np.linalg.eigvals(build_sector_block(p, k).matrix) for k in range(-8, 9)]
    )
    cost = np.abs(w_full[:, None] - w_sec[None, :])
    r, c = linear_sum_assignment(cost)
    dev = float(cost[r, c].max())
    elapsed = time.time() - t0
    check(1, [
        (f"multiset match |dlam| = {dev:.3e} < 1e-8 over 81 eigenvalues", dev < 1e-8),
        (f"runtime {elapsed:.2f}s < 10s", elapsed < 10.0),
    ], t0)


def test_criterion_02_shift_identities():
    t0 = time.time()
    rng = np.random.default_rng(2024)
    worst_beta = worst_omega = 0.0
    for _ in range(5):
        A = float(rng.uniform(0.5, 2.0))
        B = float(rng.uniform(0.001, 0.08))
        eta = float(rng.uniform(0.02, 0.5))
        omega = float(rng.uniform(0.1, 2.5))
        for k in (0, 1, 2, 3):
            size = 25 - k
            d_eta = (
                build_sector_block(ModelParams(A=A, B=B, eta=eta, n_max=24), k).matrix
                - build_sector_block(ModelParams(A=A, B=B, eta=0.0, n_max=24), k).matrix
            )
            worst_beta = max(worst_beta, float(np.abs(d_eta + 0.5 * eta * k * k * np.eye(size)).max()))
            d_om = (
                build_sector_block(ModelParams(A=A, B=B, omega=omega, n_max=24), k).matrix
                - build_sector_block(ModelParams(A=A, B=B, omega=0.0, n_max=24), k).matrix
            )
            worst_omega = max(worst_omega, float(np.abs(d_om + 1j * omega * k * np.eye(size)).max()))
    elapsed = time.time() - t0
    check(2, [
        (f"dephasing shift -(beta k^2/2) I to {worst_beta:.1e} < 1e-12", worst_beta < 1e-12),
        (f"frequency shift -(i omega k) I to {worst_omega:.1e} < 1e-12", worst_omega < 1e-12),
        (f"runtime {elapsed:.2f}s < 1s", elapsed < 1.0),
    ], t0)


def test_criterion_03_detailed_balance_oracle():
    t0 = time.time()
    clauses = []
    for N in (1.0, 100.0):
        for A in (0.5, 1.0, 1.5):
            p = fig_params(A, N)
            got = solve_steady(build_sector_block(p, 0))
            oracle = birth_death_product(p)
            mask = oracle.p > 1e-12  # doubles cannot hold 1e-8 ratios below this
            rel = float(np.max(np.abs(got.p[mask] - oracle.p[mask]) / oracle.p[mask]))
            clauses.append((f"A={A}, N={N}: entrywise rel {rel:.2e} < 1e-8", rel < 1e-8))
    elapsed = time.time() - t0
    clauses.append((f"runtime {elapsed:.2f}s < 10s", elapsed < 10.0))
    check(3, clauses, t0)


def test_criterion_04_semiclassical_convergence():
    t0 = time.time()
    devs = {}
    for N in (25.0, 50.0, 100.0):
        p = fig_params(1.25, N)
        n_over_N = moments(solve_steady(build_sector_block(p, 0)), 1) / N
        devs[N] = abs(n_over_N - 2.5)
        if N == 100.0:
            window = 2.25 <= n_over_N <= 2.75
            val = n_over_N
    check(4, [
        (f"N=100: <n>/N = {val:.4f} in [2.25, 2.75]", window),
        (
            f"|<n>/N - 2.5| decreases 25 -> 100: {devs[25.0]:.4f} -> {devs[100.0]:.4f}"
            " (WGS bias (A-Gamma)/4A is N-independent, so the deviation grows)",
            devs[100.0] < devs[25.0],
        ),
    ], t0)


def test_criterion_05_eta_independence_steady_state():
    t0 = time.time()
    a = solve_steady(build_sector_block(fig_params(1.25, 100.0, eta=0.0), 0))
    b = solve_steady(build_sector_block(fig_params(1.25, 100.0, eta=GAMMA / 5.0), 0))
    dev = float(np.abs(a.p - b.p).max())
    check(5, [(f"populations eta=0 vs Gamma/5 differ by {dev:.1e} < 1e-12", dev < 1e-12)], t0)


def test_criterion_06_ssb_gap_closure():
    t0 = time.time()
    omega = 1.0
    n_max = auto_n_max(fig_params(1.25, 100.0))
    clauses = []
    for k in (1, 2, 3):
        vals = {}
        for A in (0.75, 1.25):
            p = fig_params(A, 100.0, omega=omega, n_max=n_max)
            spec = eigendecompose(build_sector_block(p, k))
            lam0 = spec.physical()[0]
            vals[A] = lam0
        ratio = abs(vals[1.25].real) / abs(vals[0.75].real)
        im_dev = abs(abs(vals[1.25].imag) - k * omega)
        clauses.append((f"k={k}: |Re l0|(1.25)/|Re l0|(0.75) = {ratio:.4f} < 0.05", ratio < 0.05))
        clauses.append((f"k={k}: ||Im l0| - k omega| = {im_dev:.1e} < 1e-10", im_dev < 1e-10))
    check(6, clauses, t0)


def test_criterion_07_spectral_collapse(collapse_result):
    rows, minima, sweep_time = collapse_result
    t0 = time.time()
    tracked = [(1, 0), (2, 0), (1, 1), (1, 2)]
    table = {(m.N, m.k, m.j): m for m in minima}
    clauses = []
    slopes = {}
    for j, k in tracked:
        mins = [table[(N, k, j)].min_abs_re for N in COLLAPSE_N]
        args = [table[(N, k, j)].argmin_A for N in COLLAPSE_N]
        decreasing = mins[0] > mins[1] > mins[2]
        drift = abs(args[-1] - 1.0) <= abs(args[0] - 1.0)
        slopes[(j, k)] = np.polyfit(np.log(COLLAPSE_N), np.log(mins), 1)[0]
        clauses.append((
            f"(j={j},k={k}): min|Re| {mins[0]:.3e} > {mins[1]:.3e} > {mins[2]:.3e}",
            decreasing,
        ))
        clauses.append((
            f"(j={j},k={k}): argmin {args[0]} -> {args[-1]} drifts toward Gamma",
            drift,
        ))
    s = np.array(list(slopes.values()))
    spread = float(max(abs(a - b) for a in s for b in s) / abs(s.mean()))
    clauses.append((
        f"log-log slopes {np.round(s, 3).tolist()} pairwise within 20% (spread {spread:.1%})",
        spread < 0.2,
    ))
    clauses.append((f"sweep runtime {sweep_time:.0f}s < 600s", sweep_time < 600.0))
    check(7, clauses, t0)


def test_criterion_08_dephasing_bounded_gap():
    t0 = time.time()
    p = fig_params(1.5, 100.0, eta=GAMMA / 5.0)
    spectra = [eigendecompose(build_sector_block(p, k)) for k in (0, 1, 2, 3)]
    rep = liouvillian_gap(spectra)
    target = 0.5 * GAMMA / 5.0
    rel = abs(abs(rep.gap.real) - target) / target
    check(8, [(
        f"|Re gap| = {abs(rep.gap.real):.5f} (sector {rep.sector_of_gap}) within 10% of eta/2 = {target}",
        rel < 0.10,
    )], t0)


def test_criterion_09_photon_statistics():
    t0 = time.time()
    lo = solve_steady(build_sector_block(fig_params(0.75, 100.0), 0))
    hi = solve_steady(build_sector_block(fig_params(1.25, 100.0), 0))
    crit = solve_steady(build_sector_block(fig_params(1.0, 100.0), 0))
    g_lo, g_hi = g2_zero(lo), g2_zero(hi)
    f_crit = fano(crit)
    chaotic = 1.0 + moments(crit, 1)
    rel = abs(f_crit - chaotic) / chaotic
    check(9, [
        (f"g2(0.75) = {g_lo:.4f} in [1.9, 2.05]", 1.9 <= g_lo <= 2.05),
        (f"g2(1.25) = {g_hi:.4f} in [1.0, 1.1]", 1.0 <= g_hi <= 1.1),
        (
            f"Fano(A=Gamma) = {f_crit:.2f} within 15% of 1+<n> = {chaotic:.2f} "
            f"(actual deviation {rel:.0%}: mid-transition light is not thermal, "
            f"F/(1+<n>) -> (pi/2-1)/(2/pi) ~ 0.57 for any N)",
            rel < 0.15,
        ),
    ], t0)


def test_criterion_10_hysteresis():
    t0 = time.time()
    t_f, samples = 200.0, 101
    res100 = hysteresis(fig_params(1.5, 100.0, n_max=2000), t_f=t_f, samples=samples)
    res100_eta = hysteresis(
        fig_params(1.5, 100.0, eta=GAMMA / 5.0, n_max=2000), t_f=t_f, samples=samples
    )
    res1 = hysteresis(fig_params(1.5, 1.0, n_max=30), t_f=t_f, samples=samples)
    ratio = res100.loop_area / res1.loop_area
    eta_dev = abs(res100.loop_area - res100_eta.loop_area)
    # relaxation fit at A = 1.05 Gamma against lambda_1^(0)
    p = fig_params(1.05, 100.0)
    lam1 = abs(eigendecompose(build_sector_block(p, 0)).physical()[1].real)
    n_ss = moments(solve_steady(build_sector_block(p, 0)), 1)
    p_lo = solve_steady(build_sector_block(replace(p, A=0.5), 0))
    t_grid = np.linspace(0.0, 14.0 / lam1, 320)
    out = evolve_sector0(p_lo, p, t_grid)
    delta = np.array([n_ss - n for _, _, n in out])
    rate = fit_decay_rate(t_grid, delta)
    fit_rel = abs(rate - lam1) / lam1
    check(10, [
        (
            f"area(N=100) = {res100.loop_area:.4f} vs 10 x area(N=1) = {10 * res1.loop_area:.4f} "
            f"(ratio {ratio:.2f}: the reversible adiabatic lag ~ Adot/lambda_1 floors the "
            f"N=1 area, so the measured ratio stays ~4 at t_f = 200/Gamma)",
            ratio > 10.0,
        ),
        (f"loop area eta=0 vs Gamma/5 differs by {eta_dev:.1e} < 1e-10", eta_dev < 1e-10),
        (f"relaxation fit {rate:.5f} vs lambda_1 {lam1:.5f} ({fit_rel:.2%}) within 5%", fit_rel < 0.05),
        (f"runtime {time.time() - t0:.0f}s < 300s", time.time() - t0 < 300.0),
    ], t0)


def test_criterion_11_trajectory_consistency():
    t0 = time.time()
    params = ModelParams(A=1.25, B=0.1, gamma=GAMMA, eta=0.05, omega=1.0, n_max=24)
    n_op = np.arange(params.n_max + 1.0)
    clauses = []
    # counting ensemble vs master equation
    psi0 = fock_state(0, params.n_max)
    ens = counting_ensemble(params, psi0, 6.0, 2e-3, 300, seed=2024, record_every=100)
    full = evolve_full(np.outer(psi0, psi0.conj()), params, ens.t)
    exact = np.array([np.diag(rho).real @ n_op for _, rho in full])
    pull = np.abs(ens.n_mean[1:] - exact[1:]) / np.maximum(ens.n_stderr[1:], 1e-12)
    clauses.append((f"counting: max |mean - master|/stderr = {pull.max():.2f} <= 3", pull.max() <= 3.0))
    # homodyne ensemble vs master equation
    psi0h = coherent_state(1.2, params.n_max)
    ensh = homodyne_ensemble(params, psi0h, (2.0, 2.0, 2.0), 4.0, 5e-4, 300, seed=99, record_every=200)
    fullh = evolve_full(np.outer(psi0h, psi0h.conj()), params, ensh.t)
    exacth = np.array([np.diag(rho).real @ n_op for _, rho in fullh])
    pullh = np.abs(ensh.n_mean[1:] - exacth[1:]) / np.maximum(ensh.n_stderr[1:], 1e-12)
    clauses.append((f"homodyne: max |mean - master|/stderr = {pullh.max():.2f} <= 3", pullh.max() <= 3.0))
    # bit-identical reruns
    r1 = counting_trajectory(params, psi0, 2.0, 2e-3, seed=7)
    r2 = counting_trajectory(params, psi0, 2.0, 2e-3, seed=7)
    same = (
        np.array_equal(r1.n_mean, r2.n_mean)
        and np.array_equal(r1.x_mean, r2.x_mean)
        and r1.jumps == r2.jumps
    )
    clauses.append(("identical seeds give bit-identical records", same))
    clauses.append((f"runtime {time.time() - t0:.0f}s < 300s", time.time() - t0 < 300.0))
    check(11, clauses, t0)


def test_criterion_12_p_function_oracle():
    t0 = time.time()
    clauses = []
    for A in (0.75, 1.25):
        p = fig_params(A, 100.0)
        n_quad = p_radial_moment(p, order=1)
        n_solve = moments(solve_steady(build_sector_block(p, 0)), 1)
        rel = abs(n_quad - n_solve) / n_solve
        note = ""
        if A == 1.25:
            note = (
                " (WGS quadrature sits exactly (A-Gamma)/4A + h.o.t. = 5.01% away;"
                " the stated 5% equals the leading-order error)"
            )
        clauses.append((f"A={A}: quadrature {n_quad:.3f} vs solve {n_solve:.3f}, rel {rel:.4%} < 5%{note}", rel < 0.05))
    check(12, clauses, t0)


def test_criterion_13_lindblad_contractivity(collapse_result):
    rows, _, _ = collapse_result
    t0 = time.time()
    worst = max(r.eigenvalue.real for r in rows if not r.failed and not r.spurious)
    check(13, [(
        f"max Re lambda over {len(rows)} sweep rows = {worst:.2e} <= 1e-10",
        worst <= 1e-10,
    )], t0)


def test_criterion_14_cutoff_convergence():
    t0 = time.time()
    n_max = auto_n_max(fig_params(1.25, 100.0))
    vals = {}
    for factor in (1, 2):
        p = fig_params(1.25, 100.0, omega=1.0, n_max=factor * n_max)
        st = solve_steady(build_sector_block(p, 0))
        spec1 = eigendecompose(build_sector_block(p, 1))
        vals[factor] = (
            moments(st, 1),
            g2_zero(st),
            abs(spec1.physical()[0].real),
        )
    dn = abs(vals[2][0] - vals[1][0]) / vals[1][0]
    dg = abs(vals[2][1] - vals[1][1]) / vals[1][1]
    dgap = abs(vals[2][2] - vals[1][2]) / vals[1][2]
    check(14, [
        (f"<n> changes {dn:.2e} < 1e-3 on doubling n_max={n_max}", dn < 1e-3),
        (f"g2 changes {dg:.2e} < 5e-3", dg < 5e-3),
        (f"gap changes {dgap:.2e} < 1e-2", dgap < 1e-2),
    ], t0)
