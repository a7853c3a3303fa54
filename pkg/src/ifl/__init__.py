"""Feature-learning model analysis and interaction-tensor tooling.

Closed-form accuracy/agreement for the two-population feature model,
Monte-Carlo and exhaustive oracles, parameter sweeps, and the
activation-to-interaction-tensor pipeline with its observation metrics.
"""

from .closedform import (QComponents, binom, coverage_bound,
                         expected_accuracy, expected_agreement,
                         expected_agreement_case_sum, q_components, zeta_eval)
from .errors import (EnumerationSizeError, FormatError, IflError,
                     ValidationError)
from .exhaustive import enum_accuracy, enum_agreement
from .montecarlo import (EstimateResult, mc_accuracy, mc_agreement,
                         mc_coverage_accuracy)
from .params import (DEFAULT_PARAMS, AgreementFn, CoverageParams,
                     FrameworkParams, derived_capacities, parse_zeta)
from .pipeline import (ActivationMatrix, ClusterAssignment, CorrelationTensor,
                       InteractionTensor, ProjectedActivations,
                       ProjectionBasis, assign_data_features, build_lambda,
                       cluster_features, correlation_matrix, fit_pca,
                       percentile_threshold, project)
from .sampling import (DataPoint, FeatureId, Hypothesis,
                       datapoint_correct_prob, pair_case, sample_datapoint,
                       sample_hypothesis)

__version__ = "0.1.0"

__all__ = [
    "AgreementFn", "ActivationMatrix", "ClusterAssignment",
    "CorrelationTensor", "CoverageParams", "DataPoint", "DEFAULT_PARAMS",
    "EnumerationSizeError", "EstimateResult", "FeatureId", "FormatError",
    "FrameworkParams", "Hypothesis", "IflError", "InteractionTensor",
    "ProjectedActivations", "ProjectionBasis", "QComponents",
    "ValidationError", "assign_data_features", "binom", "build_lambda",
    "cluster_features", "correlation_matrix", "coverage_bound",
    "datapoint_correct_prob", "derived_capacities", "enum_accuracy",
    "enum_agreement", "expected_accuracy", "expected_agreement",
    "expected_agreement_case_sum", "fit_pca", "mc_accuracy", "mc_agreement",
    "mc_coverage_accuracy", "pair_case", "parse_zeta",
    "percentile_threshold", "project", "q_components", "sample_datapoint",
    "sample_hypothesis", "zeta_eval",
]
