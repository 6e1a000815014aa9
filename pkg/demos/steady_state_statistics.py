"""Threshold photon statistics from the diagonal-sector steady state.

<n>/N sharpens toward the semiclassical kink as N grows while staying
independent of the extra dephasing eta; g2(0) crosses from 2 (chaotic) to
1 (coherent) and the Fano factor peaks at the transition.

Run:  python demos/steady_state_statistics.py
"""

import pathlib
from dataclasses import replace

import numpy as np

from scully_lamb import (
    ModelParams,
    apply_scaling,
    auto_n_max,
    birth_death_product,
    build_sector_block,
    fano,
    g2_zero,
    moments,
    semiclassical_nss,
    solve_steady,
)

A_grid = np.round(np.arange(0.6, 1.41, 0.05), 10)
curves = {}
for N in (5.0, 25.0):
    scaled = apply_scaling(ModelParams(A=1.0, B=0.1, gamma=1.0), N, mu=0.0)
    n_max = auto_n_max(scaled, A_max=A_grid.max())
    vals = []
    for A in A_grid:
        p = replace(scaled, A=A, n_max=n_max)
        st = solve_steady(build_sector_block(p, 0))
        vals.append((moments(st, 1) / N, g2_zero(st), fano(st)))
    curves[N] = np.array(vals)
    # spot-check against the closed-form birth-death product at one gain
    p = replace(scaled, A=1.2, n_max=n_max)
    dev = np.abs(solve_steady(build_sector_block(p, 0)).p - birth_death_product(p).p).max()
    print(f"N={N:g}: solver vs detailed-balance product, max |dp| = {dev:.2e}")

print("\n  A/Gamma   " + "".join(f"n/N(N={N:g})  g2(N={N:g})  " for N in curves))
for i, A in enumerate(A_grid):
    row = f"  {A:7.2f} "
    for N in curves:
        row += f"  {curves[N][i, 0]:9.4f}  {curves[N][i, 1]:8.4f}"
    print(row)

sc = [max(0.0, (A - 1.0)) / 0.1 for A in A_grid]
print("\nsemiclassical kink (A - Gamma)/B0:", np.round(sc[-3:], 2), "at", A_grid[-3:])
print("sanity:", semiclassical_nss(ModelParams(A=1.25, B=0.001)), "= 250 photons at N=100")

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, axes = plt.subplots(3, 1, figsize=(5.5, 8), sharex=True)
    for N, vals in curves.items():
        axes[0].plot(A_grid, vals[:, 0], marker="o", ms=3, label=f"N={N:g}")
        axes[1].plot(A_grid, vals[:, 1], marker="o", ms=3)
        axes[2].plot(A_grid, vals[:, 2], marker="o", ms=3)
    axes[0].plot(A_grid, sc, "k--", label="semiclassical")
    axes[0].set_ylabel(r"$\langle n \rangle / N$")
    axes[0].legend()
    axes[1].axhline(2.0, color="gray", lw=0.8, ls="--")
    axes[1].set_ylabel(r"$g^{(2)}(0)$")
    axes[2].set_ylabel("Fano")
    axes[2].set_xlabel(r"$A/\Gamma$")
    out = pathlib.Path("demo_out")
    out.mkdir(exist_ok=True)
    fig.savefig(out / "steady_state_statistics.png", dpi=140, bbox_inches="tight")
    print(f"wrote {out / 'steady_state_statistics.png'}")
except ImportError:
    print("matplotlib not available; skipped the figure")
