"""Single quantum trajectories: counting vs homodyne unravelings.

A coherent state at the lasing intensity is monitored through the three
decay channels.  With extra dephasing (eta = Gamma/5) the counting record
loses its quadrature oscillation, while a homodyne-like record (reference
field mixed into every channel) keeps a phase that random-walks instead.
The photon-number statistics are the same either way.

Run:  python demos/quantum_trajectories.py
"""

import pathlib

import numpy as np

from scully_lamb import ModelParams, coherent_state, counting_trajectory, homodyne_trajectory
from scully_lamb.trajectories import trajectory_histogram

n_max = 24
alpha0 = np.sqrt(2.5)
t_f, dt = 20.0, 1e-3

records = {}
for eta in (0.0, 0.2):
    p = ModelParams(A=1.25, B=0.1, gamma=1.0, eta=eta, omega=1.0, n_max=n_max)
    psi0 = coherent_state(alpha0, n_max)
    records[("counting", eta)] = counting_trajectory(p, psi0, t_f, dt, seed=17)
    records[("homodyne", eta)] = homodyne_trajectory(
        p, psi0, (3.0, 3.0, 3.0), t_f, dt / 4.0, seed=17
    )

for (kind, eta), rec in records.items():
    late = rec.t > 0.7 * t_f
    print(f"{kind:9s} eta={eta}: jumps={len(rec.jumps):5d}  "
          f"late-time <x> rms = {np.sqrt(np.mean(rec.x_mean[late]**2)):.3f}")

edges, mass = trajectory_histogram(records[("counting", 0.0)], burn_in=2.0, bins=20)
print("photon-number histogram mass check:", mass.sum())

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, axes = plt.subplots(2, 2, figsize=(9, 5.5), sharex="col")
    for col, kind in enumerate(("counting", "homodyne")):
        for eta, color in ((0.0, "tab:red"), (0.2, "tab:blue")):
            rec = records[(kind, eta)]
            axes[0][col].plot(rec.t, rec.x_mean, color=color, lw=0.7,
                              label=f"$\\eta$={eta}")
            axes[1][col].plot(rec.t, rec.n_mean, color=color, lw=0.7)
        axes[0][col].set_title(kind)
        axes[1][col].set_xlabel(r"$t\,\Gamma$")
    axes[0][0].set_ylabel(r"$\langle x \rangle$")
    axes[1][0].set_ylabel(r"$\langle n \rangle$")
    axes[0][0].legend(fontsize=8)
    out = pathlib.Path("demo_out")
    out.mkdir(exist_ok=True)
    fig.savefig(out / "trajectories.png", dpi=140, bbox_inches="tight")
    print(f"wrote {out / 'trajectories.png'}")
except ImportError:
    print("matplotlib not available; skipped the figure")
