"""Spline-backfitted kernel smoothing for additive (auto)regression.

Two-stage estimation: an undersmoothed constant-spline least-squares pilot
removes all but one additive component, then a Nadaraya-Watson smoother of
the resulting pseudo-responses estimates each component with pointwise
confidence bands.  A seeded Monte Carlo driver benchmarks the estimator
against the infeasible oracle smoother.
"""

from .backfit import (
    AdditiveFit,
    AdditiveTruth,
    AsymptoticConstants,
    BiasInputs,
    SpbkFit,
    asymptotic_constants,
    confidence_band,
    default_grid,
    full_fit,
    oracle_component,
    pseudo_responses,
    spbk_component,
)
from .basis import (
    BasisSpec,
    bin_index,
    bin_indices,
    centered_basis_row,
    centered_design,
    empirical_basis_stats,
    empirical_inner_product,
    indicator_design,
    indicator_row,
)
from .errors import (
    ConfigError,
    CsvParseError,
    DegenerateAxisError,
    DegenerateDesignError,
    DegenerateEfficiencyError,
    DomainError,
    EmptyWindowError,
    ParameterError,
    SizingError,
    SpbkError,
    StudyError,
)
from .kernels import (
    DEFAULT_CH,
    DEFAULT_H_SCALE,
    QUARTIC,
    Bandwidth,
    KernelSpec,
    kde,
    kde_at_points,
    nw_at_points,
    nw_estimate,
    plugin_bandwidth,
    quartic,
    rot_bandwidth,
)
from .lsq import LsqSolution, solve_least_squares
from .pilot import PilotFit, choose_knot_count, fit_pilot, pilot_component_at
from .sample import (
    DomainMap,
    LagSpec,
    RegressionSample,
    denormalize,
    fit_domain_map,
    lag_embed,
    normalize,
)
from .simulate import (
    McConfig,
    McStudyResult,
    StudyTruth,
    ase,
    efficiency,
    efficiency_density,
    example_bounds,
    gen_example1,
    gen_example2,
    run_mc,
    true_components_ex1,
    true_components_ex2,
)

__version__ = "0.1.0"
