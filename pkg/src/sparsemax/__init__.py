"""Sparse probability transforms and the losses and experiments built on them."""

from .simplex import (
    BRUTE_FORCE_MAX_DIM,
    SupportSet,
    brute_force_projection,
    softmax,
    sparsemax,
    threshold_and_support,
)
from .jacobians import (
    OpCounter,
    softmax_jacobian,
    softmax_jvp,
    sparsemax_jacobian,
    sparsemax_jvp,
)
from .losses import (
    LossValue,
    delta_distribution,
    huber_binary_reference,
    logistic_loss,
    logistic_loss_multi,
    sparsemax_loss,
    sparsemax_loss_multi,
)
from .metrics import MetricReport, js_divergence, micro_macro_f1, mse
from .datasets import (
    MIXTURE_DIRICHLET,
    MIXTURE_UNIFORM,
    LabeledDataset,
    SyntheticConfig,
    generate_synthetic,
    read_libsvm_multilabel,
    standardize_features,
    write_libsvm_multilabel,
)
from .linear_model import (
    LOSS_BINARY_LOGISTIC,
    LOSS_KINDS,
    LOSS_LOGISTIC,
    LOSS_SPARSEMAX,
    RULE_LOGISTIC_THRESHOLD,
    RULE_SOFTMAX_THRESHOLD,
    RULE_SPARSEMAX_SCALE,
    DecisionRule,
    LinearModel,
    TrainConfig,
    cross_validate,
    fit,
    load_model,
    model_from_dict,
    model_to_dict,
    predict_labels,
    predict_scores,
    save_model,
)

__version__ = "0.1.0"

__all__ = [
    "BRUTE_FORCE_MAX_DIM",
    "SupportSet",
    "brute_force_projection",
    "softmax",
    "sparsemax",
    "threshold_and_support",
    "OpCounter",
    "softmax_jacobian",
    "softmax_jvp",
    "sparsemax_jacobian",
    "sparsemax_jvp",
    "LossValue",
    "delta_distribution",
    "huber_binary_reference",
    "logistic_loss",
    "logistic_loss_multi",
    "sparsemax_loss",
    "sparsemax_loss_multi",
    "MetricReport",
    "js_divergence",
    "micro_macro_f1",
    "mse",
    "MIXTURE_DIRICHLET",
    "MIXTURE_UNIFORM",
    "LabeledDataset",
    "SyntheticConfig",
    "generate_synthetic",
    "read_libsvm_multilabel",
    "standardize_features",
    "write_libsvm_multilabel",
    "LOSS_BINARY_LOGISTIC",
    "LOSS_KINDS",
    "LOSS_LOGISTIC",
    "LOSS_SPARSEMAX",
    "RULE_LOGISTIC_THRESHOLD",
    "RULE_SOFTMAX_THRESHOLD",
    "RULE_SPARSEMAX_SCALE",
    "DecisionRule",
    "LinearModel",
    "TrainConfig",
    "cross_validate",
    "fit",
    "load_model",
    "model_from_dict",
    "model_to_dict",
    "predict_labels",
    "predict_scores",
    "save_model",
    "__version__",
]
