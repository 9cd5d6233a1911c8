"""Estimation engine: panels, precision solvers, GRM algebra and baseline models."""

from grmkit.engine.covariance import CovarianceEstimate, Divisor, sample_covariance
from grmkit.engine.factors import (
    BetaVector,
    FactorKind,
    FactorModel,
    ImpliedFactorMatrix,
    Normalization,
    fit_exogenous,
    fit_pca,
    implied_beta,
    implied_factors,
    predict_factor,
)
from grmkit.engine.grm import (
    GrmModel,
    PartialCovariance,
    VarianceDecomposition,
    build_grm,
    conditional_grm,
    decompose_variance,
    partial_pair,
    predict,
    residual_covariance,
)
from grmkit.engine.interaction import (
    InteractionWeights,
    MixedModel,
    fit_mixed,
    grm_weights,
    predict_mixed,
    spatial_weights,
)
from grmkit.engine.panel import (
    DistanceMatrix,
    FactorPanel,
    ReturnsPanel,
    SectorMap,
    center,
    load_returns,
    split,
)
from grmkit.engine.precision import (
    CrossValidation,
    Method,
    PrecisionEstimate,
    concord,
    cross_validate,
    glasso,
    lambda_path,
)
from grmkit.engine.synth import (
    Structure,
    SyntheticSpec,
    brute_force_A,
    capm_residual_check,
    generate,
)

__all__ = [
    "BetaVector",
    "CovarianceEstimate",
    "CrossValidation",
    "DistanceMatrix",
    "Divisor",
    "FactorKind",
    "FactorModel",
    "FactorPanel",
    "GrmModel",
    "ImpliedFactorMatrix",
    "InteractionWeights",
    "Method",
    "MixedModel",
    "Normalization",
    "PartialCovariance",
    "PrecisionEstimate",
    "ReturnsPanel",
    "SectorMap",
    "Structure",
    "SyntheticSpec",
    "VarianceDecomposition",
    "brute_force_A",
    "build_grm",
    "capm_residual_check",
    "center",
    "concord",
    "conditional_grm",
    "cross_validate",
    "decompose_variance",
    "fit_exogenous",
    "fit_mixed",
    "fit_pca",
    "generate",
    "glasso",
    "grm_weights",
    "implied_beta",
    "implied_factors",
    "lambda_path",
    "load_returns",
    "partial_pair",
    "predict",
    "predict_factor",
    "predict_mixed",
    "residual_covariance",
    "sample_covariance",
    "spatial_weights",
    "split",
]
