"""Budget-constrained IV-fluid recommendation via inverse classification."""

from .dataset import (
    Dataset,
    FeatureCategory,
    FeatureMeta,
    FeaturePartition,
    FeatureSummary,
    PatientRecord,
    Scaler,
    SyntheticSpec,
    apply_scaler,
    default_cohort_spec,
    fit_scaler,
    generate_synthetic,
    impute_mean,
    load_csv,
    stratified_split,
    subset_features,
)
from .featsel import CseConfig, CseTrace, classifier_subset_eval
from .ife import (
    IfeConfig,
    IfeModel,
    RegressionMetrics,
    evaluate_ife,
    ife_jacobian,
    predict_indirect,
    train_ife,
)
from .invclass import (
    OptimizeConfig,
    RecommendationRequest,
    RecommendationResult,
    composed_gradient,
    composed_objective,
    optimize_recommendation,
    project_feasible,
)
from .models import (
    ClassifierConfig,
    ClassifierModel,
    Metrics,
    evaluate,
    gradient_wrt_input,
    grid_search,
    predict_proba,
    train_classifier,
)

__version__ = "0.1.0"
