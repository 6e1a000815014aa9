"""The eight figure classes rendered from scully-lamb run artifacts.

Every physics number comes from the CSVs; the only computed curves are the
overlays, which are recomputed from the manifest's resolved config (never
hardcoded) so they always track the run that produced the data:

  - semiclassical intensity  n/N = max(0, (A - Gamma - eta)) / B_base
    (mu = 0 scaling makes it N-independent in rescaled units);
  - the eta/2 gap guideline of the generalized model.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .io import FigplotsError, load_manifest, load_table

__all__ = ["FIGURE_CLASSES", "render"]

SPECTRUM_COLS = ["N", "A_over_gamma", "k", "j", "re_lambda", "im_lambda", "spurious"]
STEADY_COLS = ["A_over_gamma", "N", "eta", "n_mean", "n_mean_over_N", "g2", "fano"]


def semiclassical_overlay(manifest: dict, A: np.ndarray) -> np.ndarray:
    """Rescaled semiclassical intensity from the run's own parameters."""
    cfg = manifest["config"]
    B, gamma, eta = cfg["B"], cfg["gamma"], cfg["eta"]
    return np.maximum(0.0, A * gamma - gamma - eta) / B


def _gap_per_A(spec, N):
    """Smallest |Re lambda| over sectors at each gain (k=0 skips the zero)."""
    rows = spec.rows(N=N)
    A_vals = np.unique(rows["A_over_gamma"])
    gaps = []
    for A in A_vals:
        sel = np.isclose(rows["A_over_gamma"], A) & (rows["spurious"] == 0.0)
        res = np.abs(rows["re_lambda"][sel])
        ks = rows["k"][sel]
        js = rows["j"][sel]
        keep = ~((ks == 0) & (js == 0))  # the steady state itself
        if not keep.any():
            raise FigplotsError("spectrum.csv has only the steady-state row")
        gaps.append(res[keep].min())
    return A_vals, np.array(gaps)


def render_threshold(data_dir: Path):
    steady = load_table(data_dir, "steady.csv", STEADY_COLS)
    spec = load_table(data_dir, "spectrum.csv", SPECTRUM_COLS)
    manifest = load_manifest(data_dir, "steady.csv")
    fig, axes = plt.subplots(3, 1, figsize=(6.0, 9.0), sharex=True)
    N_values = np.unique(steady["N"])
    for N in N_values:
        rows = steady.rows(N=N)
        order = np.argsort(rows["A_over_gamma"])
        axes[0].plot(rows["A_over_gamma"][order], rows["n_mean_over_N"][order],
                     marker="o", ms=3, label=f"N={N:g}")
    A_line = np.linspace(steady["A_over_gamma"].min(), steady["A_over_gamma"].max(), 200)
    axes[0].plot(A_line, semiclassical_overlay(manifest, A_line), "k--",
                 label="semiclassical", zorder=0)
    axes[0].set_ylabel(r"$\langle n \rangle / N$")
    axes[0].legend(fontsize=8)
    for N in np.unique(spec["N"]):
        A_vals, gaps = _gap_per_A(spec, N)
        axes[1].semilogy(A_vals, gaps, marker="o", ms=3, label=f"N={N:g}")
    axes[1].set_ylabel(r"$|\mathrm{Re}\,\lambda|$")
    axes[1].legend(fontsize=8)
    N_big = spec["N"].max()
    for k in sorted({int(k) for k in spec["k"] if k > 0}):
        rows = spec.rows(N=N_big, k=float(k), j=0.0)
        order = np.argsort(rows["A_over_gamma"])
        axes[2].semilogy(rows["A_over_gamma"][order], np.abs(rows["re_lambda"][order]),
                         marker="o", ms=3, label=f"k={k}")
    axes[2].set_ylabel(r"$|\mathrm{Re}\,\lambda_0^{(k)}|$")
    axes[2].set_xlabel(r"$A/\Gamma$")
    axes[2].legend(fontsize=8)
    fig.suptitle("Threshold: intensity and symmetry-sector gaps")
    return fig


def render_collapse(data_dir: Path):
    spec = load_table(data_dir, "collapse.csv", SPECTRUM_COLS)
    ks = sorted({int(k) for k in np.unique(spec["k"])})
    js = sorted({int(j) for j in np.unique(spec["j"]) if j > 0})
    if not js:
        raise FigplotsError("collapse.csv holds no j > 0 levels")
    fig, axes = plt.subplots(len(js), len(ks), figsize=(3.2 * len(ks), 2.6 * len(js)),
                             sharex=True, squeeze=False)
    for row, j in enumerate(js):
        for col, k in enumerate(ks):
            ax = axes[row][col]
            for N in np.unique(spec["N"]):
                rows = spec.rows(N=N, k=float(k), j=float(j))
                order = np.argsort(rows["A_over_gamma"])
                ax.semilogy(rows["A_over_gamma"][order],
                            np.abs(rows["re_lambda"][order]), label=f"N={N:g}")
            ax.set_title(f"$\\lambda_{j}^{{({k})}}$", fontsize=9)
            if row == len(js) - 1:
                ax.set_xlabel(r"$A/\Gamma$")
            if col == 0:
                ax.set_ylabel(r"$|\mathrm{Re}\,\lambda|$")
    axes[0][0].legend(fontsize=7)
    fig.suptitle("Spectral collapse: eigenvalue dips per sector")
    fig.tight_layout()
    return fig


def render_scaling(data_dir: Path):
    minima = load_table(data_dir, "collapse_minima.csv", ["N", "k", "j", "min_abs_re", "argmin_A"])
    fig, ax = plt.subplots(figsize=(5.0, 4.0))
    pairs = sorted({(int(k), int(j)) for k, j in zip(minima["k"], minima["j"]) if j > 0})
    if not pairs:
        raise FigplotsError("collapse_minima.csv holds no j > 0 rows")
    for k, j in pairs:
        rows = minima.rows(k=float(k), j=float(j))
        order = np.argsort(rows["N"])
        ax.loglog(rows["N"][order], rows["min_abs_re"][order], marker="o",
                  label=f"$\\lambda_{j}^{{({k})}}$")
    ax.set_xlabel("N")
    ax.set_ylabel(r"$\min_A |\mathrm{Re}\,\lambda_j^{(k)}|$")
    ax.legend(fontsize=8)
    ax.set_title("Collapse minima vs system size")
    return fig


def render_dephasing_gap(data_dir: Path):
    steady = load_table(data_dir, "steady.csv", STEADY_COLS)
    spec = load_table(data_dir, "spectrum.csv", SPECTRUM_COLS)
    manifest = load_manifest(data_dir, "spectrum.csv")
    eta = manifest["config"]["eta"]
    fig, axes = plt.subplots(2, 1, figsize=(6.0, 6.5), sharex=True)
    for N in np.unique(steady["N"]):
        rows = steady.rows(N=N)
        order = np.argsort(rows["A_over_gamma"])
        axes[0].plot(rows["A_over_gamma"][order], rows["n_mean_over_N"][order],
                     marker="o", ms=3, label=f"N={N:g}")
    A_line = np.linspace(steady["A_over_gamma"].min(), steady["A_over_gamma"].max(), 200)
    axes[0].plot(A_line, semiclassical_overlay(load_manifest(data_dir, "steady.csv"), A_line),
                 "k--", label="semiclassical", zorder=0)
    axes[0].set_ylabel(r"$\langle n \rangle / N$")
    axes[0].legend(fontsize=8)
    for N in np.unique(spec["N"]):
        A_vals, gaps = _gap_per_A(spec, N)
        axes[1].semilogy(A_vals, gaps, marker="o", ms=3, label=f"N={N:g}")
    axes[1].axhline(eta / 2.0, color="gray", ls="--", label=r"$\eta/2$")
    axes[1].set_ylabel(r"$|\mathrm{Re}\,\lambda|$")
    axes[1].set_xlabel(r"$A/\Gamma$")
    axes[1].legend(fontsize=8)
    fig.suptitle("Generalized model: gap pinned by dephasing")
    return fig


def render_hysteresis(data_dir: Path):
    hyst = load_table(
        data_dir, "hysteresis.csv",
        ["t", "A_over_gamma", "direction", "n_mean", "n_mean_over_N"],
        text_columns=("direction",),
    )
    summary = load_table(data_dir, "hysteresis_summary.csv", ["N", "loop_area", "n_max"])
    area_of = {float(N): float(a) for N, a in zip(summary["N"], summary["loop_area"])}
    count = len(area_of)
    fig, axes = plt.subplots(1, count, figsize=(4.0 * count, 3.4), squeeze=False)
    # branch rows carry n_mean and n/N; recover the run's N from their ratio
    with np.errstate(divide="ignore", invalid="ignore"):
        run_N = hyst["n_mean"] / hyst["n_mean_over_N"]
    known = np.sort(summary["N"])
    try:
        steady = load_table(data_dir, "steady.csv", STEADY_COLS)
    except FigplotsError:
        steady = None
    for i, N in enumerate(known):
        ax = axes[0][i]
        mask_N = np.isclose(run_N, N, rtol=1e-6)
        if len(known) == 1:
            mask_N = np.ones(len(run_N), dtype=bool)
        for direction, color in (("up", "tab:red"), ("down", "tab:blue")):
            sel = (hyst["direction"] == direction) & mask_N
            order = np.argsort(hyst["A_over_gamma"][sel])
            ax.plot(hyst["A_over_gamma"][sel][order], hyst["n_mean_over_N"][sel][order],
                    color=color, label=direction)
        if steady is not None:
            rows = steady.rows(N=N)
            if len(rows["A_over_gamma"]):
                order = np.argsort(rows["A_over_gamma"])
                ax.plot(rows["A_over_gamma"][order], rows["n_mean_over_N"][order],
                        "k:", label="steady")
        ax.set_title(f"N={N:g}, area={area_of[float(N)]:.3g}", fontsize=9)
        ax.set_xlabel(r"$A/\Gamma$")
        if i == 0:
            ax.set_ylabel(r"$\langle n \rangle / N$")
        ax.legend(fontsize=7)
    fig.suptitle("Dynamical hysteresis")
    fig.tight_layout()
    return fig


def render_correlations(data_dir: Path):
    steady = load_table(data_dir, "steady.csv", STEADY_COLS)
    fig, axes = plt.subplots(2, 1, figsize=(6.0, 6.5), sharex=True)
    for N in np.unique(steady["N"]):
        rows = steady.rows(N=N)
        order = np.argsort(rows["A_over_gamma"])
        A = rows["A_over_gamma"][order]
        axes[0].plot(A, rows["g2"][order], marker="o", ms=3, label=f"N={N:g}")
        axes[1].plot(A, rows["fano"][order], marker="o", ms=3, label=f"N={N:g}")
        # chaotic-light reference 1 + <n> at the grid point nearest A = Gamma
        i_crit = int(np.argmin(np.abs(A - 1.0)))
        axes[1].axhline(1.0 + rows["n_mean"][order][i_crit], ls="-.", lw=0.8,
                        color="gray")
    axes[0].axhline(2.0, color="gray", ls="--", lw=0.8)
    axes[0].set_ylabel(r"$g^{(2)}(0)$")
    axes[0].legend(fontsize=8)
    axes[1].set_ylabel("Fano factor")
    axes[1].set_xlabel(r"$A/\Gamma$")
    fig.suptitle("Photon statistics across threshold")
    return fig


def render_trajectories(data_dir: Path):
    ens = load_table(data_dir, "ensemble.csv", ["t", "n_mean", "n_stderr", "x_mean", "x_stderr"])
    hist = load_table(data_dir, "histogram.csv", ["bin_left", "bin_right", "mass"])
    fig, axes = plt.subplots(1, 3, figsize=(11.0, 3.4))
    shown = 0
    for i in range(16):
        try:
            single = load_table(data_dir, f"trajectory_{i:03d}.csv", ["t", "n_mean", "x_mean"])
        except FigplotsError:
            break
        axes[0].plot(single["t"], single["n_mean"], lw=0.7, alpha=0.8)
        axes[1].plot(single["t"], single["x_mean"], lw=0.7, alpha=0.8)
        shown += 1
    if shown == 0:
        raise FigplotsError(f"no trajectory_###.csv files under {data_dir}")
    axes[0].plot(ens["t"], ens["n_mean"], "k-", lw=1.6, label="ensemble")
    axes[0].fill_between(ens["t"], ens["n_mean"] - ens["n_stderr"],
                         ens["n_mean"] + ens["n_stderr"], color="k", alpha=0.2)
    axes[0].set_xlabel(r"$t\,\Gamma$")
    axes[0].set_ylabel(r"$\langle n \rangle$")
    axes[0].legend(fontsize=8)
    axes[1].set_xlabel(r"$t\,\Gamma$")
    axes[1].set_ylabel(r"$\langle x \rangle$")
    centers = 0.5 * (hist["bin_left"] + hist["bin_right"])
    widths = hist["bin_right"] - hist["bin_left"]
    axes[2].bar(centers, hist["mass"], width=widths, align="center", alpha=0.7)
    axes[2].set_xlabel(r"$\langle n \rangle$")
    axes[2].set_ylabel("probability mass")
    fig.suptitle("Quantum trajectories")
    fig.tight_layout()
    return fig


def render_wigner(data_dir: Path):
    w = load_table(data_dir, "wigner.csv", ["re_alpha", "im_alpha", "w_value"])
    re_axis = np.unique(w["re_alpha"])
    im_axis = np.unique(w["im_alpha"])
    if len(re_axis) * len(im_axis) != len(w["w_value"]):
        raise FigplotsError("wigner.csv does not form a complete rectangular grid")
    order = np.lexsort((w["re_alpha"], w["im_alpha"]))
    field = w["w_value"][order].reshape(len(im_axis), len(re_axis))
    fig, ax = plt.subplots(figsize=(5.2, 4.4))
    lim = np.abs(field).max()
    mesh = ax.pcolormesh(re_axis, im_axis, field, cmap="RdBu_r", vmin=-lim, vmax=lim,
                         shading="nearest")
    fig.colorbar(mesh, ax=ax, label=r"$W(\alpha)$")
    ax.set_xlabel(r"$\mathrm{Re}\,\alpha$")
    ax.set_ylabel(r"$\mathrm{Im}\,\alpha$")
    ax.set_aspect("equal")
    ax.set_title("Wigner representation")
    return fig


FIGURE_CLASSES = {
    "threshold": render_threshold,
    "collapse": render_collapse,
    "scaling": render_scaling,
    "dephasing-gap": render_dephasing_gap,
    "hysteresis": render_hysteresis,
    "correlations": render_correlations,
    "trajectories": render_trajectories,
    "wigner": render_wigner,
}


def render(figure_id: str, data_dir: Path):
    """Build the named figure class from a data directory; returns a Figure."""
    if figure_id not in FIGURE_CLASSES:
        raise FigplotsError(
            f"unknown figure id {figure_id!r}; choose from {sorted(FIGURE_CLASSES)}"
        )
    return FIGURE_CLASSES[figure_id](Path(data_dir))
