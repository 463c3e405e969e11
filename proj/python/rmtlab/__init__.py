"""Numerical laboratory for deformed Wigner random matrices.

The heavy lifting lives in the compiled extension ``rmtlab._core``: the
deformed semicircle (free-convolution) law and its fixed-point solver,
matrix-ensemble sampling, Dyson Brownian motion, the reference log-gas with
its time-dependent potential, and the unfolded local-statistics estimators.
"""

from ._core import (  # noqa: F401
    ConfigInvalid,
    FreeConvolutionLaw,
    NonConvergence,
    PotentialModel,
    PreconditionViolated,
    SpectralMeasure,
    __version__,
    acceptance_criteria,
    burger_residual,
    check_support_condition,
    dbm_integrate,
    deterministic_quantile_potential,
    eom_propagate,
    ks_distance,
    law_at_time,
    matched_entry_law_moments,
    mcmc_sample,
    run_acceptance_criterion,
    run_experiment,
    run_suite,
    sample_iid_potential,
    sample_spectrum,
    sample_wigner,
    sine_kernel_pair_correlation,
    solve_mfc,
    stieltjes_of_measure,
    unfolded_gaps,
)

__all__ = [
    "ConfigInvalid",
    "FreeConvolutionLaw",
    "NonConvergence",
    "PotentialModel",
    "PreconditionViolated",
    "SpectralMeasure",
    "__version__",
    "acceptance_criteria",
    "burger_residual",
    "check_support_condition",
    "dbm_integrate",
    "deterministic_quantile_potential",
    "eom_propagate",
    "ks_distance",
    "law_at_time",
    "matched_entry_law_moments",
    "mcmc_sample",
    "run_acceptance_criterion",
    "run_experiment",
    "run_suite",
    "sample_iid_potential",
    "sample_spectrum",
    "sample_wigner",
    "sine_kernel_pair_correlation",
    "solve_mfc",
    "stieltjes_of_measure",
    "unfolded_gaps",
]
