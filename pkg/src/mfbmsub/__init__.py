"""Simulation and numerical-verification toolkit for mixed fractional
Brownian motion time-changed by tempered stable and gamma subordinators."""

from .params import (
    FormulaVariant,
    GammaParams,
    MfbmParams,
    ModelSpec,
    TssParams,
    as_time_points,
)
from .errors import (
    EstimationError,
    FactorizationError,
    FitError,
    QuadratureError,
    SamplingError,
)
from .gaussian import (
    fbm_cov,
    mfbm_cov,
    mfbm_cov_matrix,
    mfbm_given_normals,
    sample_fgn_grid,
    sample_mfbm_at_times,
)
from .subordinators import (
    SubordinatorPath,
    TssSampleInfo,
    gamma_moment_exact,
    sample_gamma_increments,
    sample_gamma_path,
    sample_stable_increments,
    sample_tss_increments,
    sample_tss_path,
    stable_density,
    tss_density,
    tss_fractional_moment,
    tss_laplace_transform,
    tss_moment_asymptotic,
)
from .analytics import (
    adjudicate_variants,
    corr_gamma_asymptotic,
    corr_tail_pure_fbm,
    corr_tss_asymptotic,
    cov_gamma_asymptotic,
    cov_gamma_exact,
    cov_tss_asymptotic,
    cov_tss_quadrature,
    gamma_ratio_expansion_check,
    msd_gamma_asymptotic,
    msd_tss_asymptotic,
    y_variance,
)
from .estimation import (
    CurveSeries,
    EnsembleConfig,
    LrdVerdict,
    PathEnsemble,
    PowerLawFit,
    estimate_corr_curve,
    estimate_cov_curve,
    fit_power_law,
    lrd_verdict,
    simulate_ensemble,
)

__version__ = "0.1.0"
