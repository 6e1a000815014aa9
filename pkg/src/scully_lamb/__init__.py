"""Liouvillian spectral toolkit for the Scully-Lamb laser model.

Builds the three-channel Lindblad generator of a single-mode laser on a
truncated Fock space, decomposes it into U(1) symmetry-sector blocks, and
provides the spectral, steady-state, dynamical, stochastic-trajectory and
phase-space machinery needed to study its threshold criticality.
"""

__version__ = "0.1.0"

from .model import ModelParams, apply_scaling, semiclassical_nss, wgs_check
from .liouvillian import (
    SectorBlock,
    build_jump_operators,
    build_full_superoperator,
    build_sector_block,
    build_nonlindblad_generator,
    embed_sector_vector,
    steady_from_superoperator,
)
from .spectra import (
    SectorSpectrum,
    GapReport,
    eigendecompose,
    filter_spurious,
    liouvillian_gap,
    sector_sweep,
    collapse_sweep,
    auto_n_max,
)
from .steady_state import (
    DiagonalState,
    solve_steady,
    birth_death_product,
    moments,
    g2_zero,
    fano,
)
from .dynamics import evolve_sector0, evolve_full, hysteresis, fit_decay_rate
from .trajectories import (
    TrajectoryRecord,
    counting_trajectory,
    homodyne_trajectory,
    counting_ensemble,
    homodyne_ensemble,
    trajectory_histogram,
    coherent_state,
    fock_state,
)
from .phase_space import (
    PhaseSpaceGrid,
    p_ss_radial,
    p_radial_moment,
    diffusion_coefficient,
    wigner_of_matrix,
    displacement_matrix,
)
