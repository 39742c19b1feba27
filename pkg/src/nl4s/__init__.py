"""Pseudospectral laboratory for the defocusing mass-critical fourth-order NLS
``i u_t + Delta^2 u = -|u|^(8/d) u`` on a periodic box."""
from .budget import (
    BudgetInput, BudgetReport, check_global_condition, choose_lambda, gamma_threshold,
    growth_exponent, solve_min_N_and_alpha, subinterval_count,
)
from .config import ConfigError, ExperimentConfig, parse_config
from .dynamics import (
    BlowUpError, NonlinearitySpec, SolverConfig, Trajectory, energy, evolve, iterate, mass,
    strang_step,
)
from .harness import ResultRecord, convergence_study, emit, make_initial_data, run_experiment
from .imethod import (
    IMethodConfig, almost_conservation_experiment, commutator_diagnostic, modified_energy,
    rescale, tri_decompose, z_norm,
)
from .morawetz import MorawetzReport, h_half_split_bound, morawetz_check, morawetz_lhs
from .norms import (
    AdmissiblePair, bernstein_ratio, classify_pair, gamma_pq, pair_catalog, sobolev_norm,
    spacetime_norm, spatial_lq, strichartz_quotient,
)
from .spectral import (
    Field, Grid, RadialSymbol, apply_symbol, bump, lp_partition, lp_project, make_grid,
    make_i_symbol,
)

__version__ = "0.1.0"
