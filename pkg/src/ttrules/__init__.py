"""Sparse truth-table rule models.

A library for learning compact, exactly extractable Boolean rule models on
tabular data: a differentiable relaxation of top-k feature selection, layers
of threshold nodes over selected input bits trained with straight-through
gradients, iterative magnitude pruning, and Quine-McCluskey based conversion
of every trained node (and, for small binary problems, the entire model)
into minimal DNF/CNF formulas with XOR extensions and data-driven don't-care
rows.
"""

__version__ = "0.1.0"

from .encode import BitDataset, ColumnSpec, EncodingSchema, fit_schema, literal, transform
from .errors import (
    DegenerateStateError,
    InvalidConfigError,
    InvalidInputError,
    InvalidStateError,
    SchemaMismatchError,
    TrainingFailureError,
    UndefinedMetricError,
)
from .layer import LayerParams, hard_mask, init_layer, layer_backward, layer_forward
from .logic import (
    RuleSet,
    Term,
    TruthTable,
    complexity,
    decision_formula,
    enumerate_truth_table,
    export_pla,
    extract_rules,
    get_prime_implicants,
    minimize,
    observed_patterns,
    render,
    rule_eval,
    rule_eval_bits,
)
from .metrics import macro_ovr_auc, r2, roc_auc
from .model import (
    RuleModel,
    TrainConfig,
    holdout_split,
    load_model,
    model_forward,
    new_model,
    predict,
    prune_finetune,
    save_model,
    train,
)
from .softtopk import SoftTopKSolution, forward, grad_k, solve_threshold, vjp_x

__all__ = [
    "BitDataset", "ColumnSpec", "EncodingSchema", "fit_schema", "literal",
    "transform", "LayerParams", "hard_mask", "init_layer", "layer_backward",
    "layer_forward", "RuleSet", "Term", "TruthTable", "complexity",
    "decision_formula", "enumerate_truth_table", "export_pla", "extract_rules",
    "get_prime_implicants", "minimize", "observed_patterns", "render",
    "rule_eval", "rule_eval_bits", "macro_ovr_auc", "r2", "roc_auc",
    "RuleModel", "TrainConfig", "holdout_split", "load_model", "model_forward",
    "new_model", "predict", "prune_finetune", "save_model", "train",
    "SoftTopKSolution", "forward", "grad_k", "solve_threshold", "vjp_x",
    "DegenerateStateError", "InvalidConfigError", "InvalidInputError",
    "InvalidStateError", "SchemaMismatchError", "TrainingFailureError",
    "UndefinedMetricError", "__version__",
]
