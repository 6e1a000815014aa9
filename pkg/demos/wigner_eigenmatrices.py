"""Wigner portraits of the Liouvillian eigenmatrices.

The slowest eigenmatrix of each symmetry sector k is embedded on the k-th
Fock diagonal, symmetrized, and mapped through the displaced-parity
transform.  Sector 0 is rotation invariant, sector k shows k lobes and
flips sign under a pi/k rotation; all of them except the steady state are
traceless, hence the negative regions.

Run:  python demos/wigner_eigenmatrices.py
"""

import pathlib

import numpy as np

from scully_lamb import (
    ModelParams,
    build_sector_block,
    eigendecompose,
    embed_sector_vector,
    solve_steady,
    wigner_of_matrix,
)
from scully_lamb.phase_space import grid_axes

p = ModelParams(A=1.25, B=0.02, gamma=1.0, omega=0.0, n_max=60)
ax = grid_axes(4.5, 81)
fields = {}

steady = solve_steady(build_sector_block(p, 0))
fields["steady state"] = wigner_of_matrix(np.diag(steady.p.astype(complex)), ax, ax)

for k, label in ((0, r"$\rho_1^{(0)}$"), (1, r"$\rho_0^{(1)}$"),
                 (2, r"$\rho_0^{(2)}$"), (3, r"$\rho_0^{(3)}$")):
    spec = eigendecompose(build_sector_block(p, k))
    j = 1 if k == 0 else 0  # skip the steady state in sector 0
    v = spec.eigenvectors[:, np.flatnonzero(~spec.spurious)[j]]
    M = embed_sector_vector(v, k, p.n_max)
    M = M + M.conj().T if k else 0.5 * (M + M.conj().T)
    fields[label] = wigner_of_matrix(M, ax, ax)
    print(f"k={k}: lambda = {spec.physical()[j]:.4f}, "
          f"max |W| = {np.abs(fields[label].values).max():.4f}")

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, axes = plt.subplots(1, len(fields), figsize=(3.1 * len(fields), 3.0))
    for axp, (label, grid) in zip(axes, fields.items()):
        lim = np.abs(grid.values).max()
        axp.pcolormesh(grid.alpha_re, grid.alpha_im, grid.values,
                       cmap="RdBu_r", vmin=-lim, vmax=lim, shading="nearest")
        axp.set_aspect("equal")
        axp.set_title(label, fontsize=10)
        axp.set_xlabel(r"$\mathrm{Re}\,\alpha$")
    axes[0].set_ylabel(r"$\mathrm{Im}\,\alpha$")
    out = pathlib.Path("demo_out")
    out.mkdir(exist_ok=True)
    fig.savefig(out / "wigner_eigenmatrices.png", dpi=140, bbox_inches="tight")
    print(f"wrote {out / 'wigner_eigenmatrices.png'}")
except ImportError:
    print("matplotlib not available; skipped the figure")
