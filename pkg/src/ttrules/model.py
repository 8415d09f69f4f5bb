"""Full predictor: truth-table layer, skip-concatenated linear head, losses,
two-phase training (gradient descent, then iterative magnitude pruning with
fine-tuning), and JSON persistence.

The classifier sees the raw input bits concatenated with the node outputs,
h = [x || z], so single literals and higher-order node rules compete for
weight in one linear layer. Classifier weights carry an L1 penalty applied
as a proximal shrink after each adaptive-moment step, scaled by the same
per-coordinate preconditioner as the step itself; weights whose data
gradient cannot beat the penalty land on exactly zero and drop out of the
rule set.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
import pandas as pd
from scipy.special import expit

from . import layer as layer_mod
from . import metrics
from .encode import BitDataset, EncodingSchema, destandardize, transform
from .errors import (
    InvalidConfigError,
    InvalidInputError,
    SchemaMismatchError,
    TrainingFailureError,
)

FORMAT_VERSION = 1


@dataclass
class TrainConfig:
    epochs: int = 300
    finetune_epochs: int = 50
    prune_rounds: int = 5
    prune_fraction: float = 0.2
    lr: float = 0.01
    batch_size: int = 64
    seed: int = 0
    tau: float = 0.01
    k: int = 4
    n_nodes: int = 20
    bits: int = 5
    val_fraction: float = 0.2
    l1: float = 1e-4
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    grad_mask: str = "hard"  # mask used in logic/bias/input gradients
    skip: bool = True
    complexity_weight: float = 1e-3
    # Epochs of head-only fitting before joint training. With the layer held
    # fixed the head problem is convex; locking it first keeps the
    # straight-through phase from dragging freshly initialized nodes around.
    head_warmup_epochs: int = 0

    def validate(self) -> None:
        if min(self.epochs, self.finetune_epochs, self.prune_rounds,
               self.head_warmup_epochs) < 0:
            raise InvalidConfigError("epoch and round counts must be non-negative")
        if not (0.0 < self.prune_fraction < 1.0):
            raise InvalidConfigError("prune_fraction must be in (0, 1)")
        if self.lr <= 0 or self.batch_size < 1 or self.tau <= 0:
            raise InvalidConfigError("lr, batch_size and tau must be positive")
        if not (0.0 <= self.val_fraction < 1.0):
            raise InvalidConfigError("val_fraction must be in [0, 1)")
        if self.l1 < 0:
            raise InvalidConfigError("l1 must be non-negative")
        if self.grad_mask not in ("hard", "soft"):
            raise InvalidConfigError("grad_mask must be 'hard' or 'soft'")


@dataclass
class RuleModel:
    layer: layer_mod.LayerParams
    cls_w: np.ndarray  # (C, width)
    cls_b: np.ndarray  # (C,)
    task: str
    schema: EncodingSchema
    pruned: np.ndarray  # (n, M) bool, True = connection removed
    skip: bool = True
    train_summary: dict = field(default_factory=dict)

    @property
    def n_bits(self) -> int:
        return self.layer.n_inputs

    @property
    def n_nodes(self) -> int:
        return self.layer.n_nodes

    @property
    def n_outputs(self) -> int:
        return int(self.cls_w.shape[0])

    @property
    def width(self) -> int:
        return (self.n_bits if self.skip else 0) + self.n_nodes


def new_model(schema: EncodingSchema, task: str, config: TrainConfig,
              rng: np.random.Generator) -> RuleModel:
    """Initialize an untrained model for a fitted schema."""
    config.validate()
    n = schema.n_bits
    m = config.n_nodes
    params = layer_mod.init_layer(n, m, config.k, config.tau, rng)
    n_out = len(schema.target.classes) if task == "multiclass" else 1
    width = (n if config.skip else 0) + m
    # Small random head weights; an all-zero head together with symmetric
    # targets (e.g. XOR) is a saddle that mini-batch gradients cannot leave.
    return RuleModel(
        layer=params,
        cls_w=rng.uniform(-0.1, 0.1, size=(n_out, width)),
        cls_b=np.zeros(n_out),
        task=task,
        schema=schema,
        pruned=np.zeros((n, m), dtype=bool),
        skip=config.skip,
    )


@dataclass
class ModelCache:
    layer_cache: layer_mod.LayerCache
    h: np.ndarray  # (B, width)
    logits: np.ndarray  # (B, C)
    soft: bool


def _activate(task: str, logits: np.ndarray) -> np.ndarray:
    if task == "binary":
        return expit(logits[:, 0])
    if task == "multiclass":
        shifted = logits - logits.max(axis=1, keepdims=True)
        e = np.exp(shifted)
        return e / e.sum(axis=1, keepdims=True)
    return logits[:, 0]


def model_forward(model: RuleModel, x, soft: bool = False):
    """Predictions for encoded rows.

    Returns (prediction, cache): a probability for binary tasks, a row of
    class probabilities for multiclass, and a de-standardized real for
    regression. Soft mode runs the fully relaxed surrogate (relaxed masks,
    no binarization) used by gradient checks.
    """
    x = np.asarray(x, dtype=np.float64)
    squeeze = x.ndim == 1
    x2 = np.atleast_2d(x)
    if x2.shape[1] != model.n_bits:
        raise InvalidInputError(
            f"row width {x2.shape[1]} does not match model width {model.n_bits}"
        )
    z, lc = layer_mod.layer_forward(x2, model.layer, soft=soft)
    h = np.concatenate([x2, z], axis=1) if model.skip else z
    logits = h @ model.cls_w.T + model.cls_b
    pred = _activate(model.task, logits)
    if model.task == "regression":
        pred = destandardize(model.schema, pred)
    cache = ModelCache(layer_cache=lc, h=h, logits=logits, soft=soft)
    return (pred[0] if squeeze else pred), cache


def loss_and_grad(model: RuleModel, cache: ModelCache, targets):
    """Mean task loss over the batch and d(loss)/d(logits).

    Binary and multiclass use cross-entropy through the logistic / normalized
    exponential link; regression uses mean squared error on standardized
    targets. The L1 penalty on classifier weights is handled by the proximal
    update, not here.
    """
    logits = cache.logits
    b = logits.shape[0]
    if model.task == "binary":
        y = np.asarray(targets, dtype=np.float64)
        if np.any((y != 0) & (y != 1)):
            raise InvalidInputError("binary targets must be 0/1")
        t = logits[:, 0]
        loss = float(np.mean(np.logaddexp(0.0, t) - y * t))
        delta = ((expit(t) - y) / b)[:, None]
    elif model.task == "multiclass":
        y = np.asarray(targets, dtype=np.int64)
        if y.min() < 0 or y.max() >= logits.shape[1]:
            raise InvalidInputError("class label out of range")
        shifted = logits - logits.max(axis=1, keepdims=True)
        lse = np.log(np.exp(shifted).sum(axis=1)) + logits.max(axis=1)
        loss = float(np.mean(lse - logits[np.arange(b), y]))
        probs = _activate("multiclass", logits)
        delta = probs.copy()
        delta[np.arange(b), y] -= 1.0
        delta /= b
    else:
        y = np.asarray(targets, dtype=np.float64)
        o = logits[:, 0]
        loss = float(np.mean((o - y) ** 2))
        delta = (2.0 * (o - y) / b)[:, None]
    return loss, delta


def backward(model: RuleModel, cache: ModelCache, delta_logits: np.ndarray,
             grad_mask: str = "hard") -> dict:
    """All parameter gradients given d(loss)/d(logits)."""
    grads = {
        "cls_w": delta_logits.T @ cache.h,
        "cls_b": delta_logits.sum(axis=0),
    }
    delta_h = delta_logits @ model.cls_w
    upstream = delta_h[:, model.n_bits:] if model.skip else delta_h
    lg = layer_mod.layer_backward(upstream, cache.layer_cache, model.layer,
                                  grad_mask=grad_mask)
    grads.update({"conn": lg.conn, "logic": lg.logic, "bias": lg.bias})
    return grads


class Adam:
    """Adaptive-moment optimizer over a named set of arrays."""

    def __init__(self, shapes: dict, lr: float, beta1: float = 0.9,
                 beta2: float = 0.999, eps: float = 1e-8):
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.m = {k: np.zeros(s) for k, s in shapes.items()}
        self.v = {k: np.zeros(s) for k, s in shapes.items()}

    def step(self, params: dict, grads: dict) -> None:
        self.t += 1
        bc1 = 1.0 - self.beta1 ** self.t
        bc2 = 1.0 - self.beta2 ** self.t
        for name, g in grads.items():
            if name not in self.m:
                continue
            self.m[name] = self.beta1 * self.m[name] + (1 - self.beta1) * g
            self.v[name] = self.beta2 * self.v[name] + (1 - self.beta2) * g * g
            step = self.lr * (self.m[name] / bc1) / (np.sqrt(self.v[name] / bc2) + self.eps)
            params[name] -= step

    def prox_l1(self, params: dict, name: str, l1: float) -> None:
        """Soft-threshold one array with the Adam-preconditioned penalty."""
        if l1 <= 0 or self.t == 0:
            return
        bc2 = 1.0 - self.beta2 ** self.t
        thresh = self.lr * l1 / (np.sqrt(self.v[name] / bc2) + self.eps)
        w = params[name]
        params[name] = np.sign(w) * np.maximum(np.abs(w) - thresh, 0.0)


def _param_dict(model: RuleModel) -> dict:
    return {
        "conn": model.layer.conn,
        "logic": model.layer.logic,
        "bias": model.layer.bias,
        "cls_w": model.cls_w,
        "cls_b": model.cls_b,
    }


def _write_back(model: RuleModel, params: dict) -> None:
    model.layer.conn = params["conn"]
    model.layer.logic = params["logic"]
    model.layer.bias = params["bias"]
    model.cls_w = params["cls_w"]
    model.cls_b = params["cls_b"]


def score(model: RuleModel, X: np.ndarray, y: np.ndarray) -> float:
    """Task metric: AUC (binary), macro OvR AUC (multiclass), R2 (regression).

    Regression targets arrive standardized (as stored in a BitDataset) while
    the forward pass reports training-scale values, so both are compared on
    the training scale.
    """
    pred, _ = model_forward(model, X)
    if model.task == "binary":
        return metrics.roc_auc(pred, y)
    if model.task == "multiclass":
        return metrics.macro_ovr_auc(pred, y)
    return metrics.r2(pred, destandardize(model.schema, y))


def holdout_split(n_rows: int, seed: int, test_fraction: float = 0.2):
    """Deterministic development/test row split used by the run protocol."""
    perm = np.random.default_rng(seed).permutation(n_rows)
    n_test = int(round(test_fraction * n_rows))
    return np.sort(perm[: n_rows - n_test]), np.sort(perm[n_rows - n_test:])


def train(model: RuleModel, dataset: BitDataset, config: TrainConfig,
          rng: np.random.Generator | None = None) -> dict:
    """Mini-batch gradient training of all parameters.

    Connection masks are recomputed from the scores at every step while
    unfrozen. The last val_fraction of the shuffled rows is held out for
    validation; with val_fraction == 0 the training rows double as the
    validation set (degenerate toy-problem mode). Returns the training log;
    the model is updated in place. Deterministic given (data, config, rng).
    """
    config.validate()
    if dataset.n_rows == 0:
        raise InvalidInputError("dataset is empty")
    if dataset.n_bits != model.n_bits:
        raise SchemaMismatchError("dataset and model were encoded with different schemas")
    if rng is None:
        rng = np.random.default_rng(config.seed)

    perm = rng.permutation(dataset.n_rows)
    n_val = int(round(config.val_fraction * dataset.n_rows))
    train_idx = perm[: dataset.n_rows - n_val]
    val_idx = perm[dataset.n_rows - n_val:] if n_val > 0 else train_idx
    if len(train_idx) == 0:
        raise InvalidInputError("validation split leaves no training rows")

    if model.layer.frozen_masks is None and not model.train_summary:
        _init_biases_from_data(model, dataset.X[train_idx])

    if config.head_warmup_epochs > 0:
        _fit_loop(model, dataset, config, rng, train_idx, val_idx,
                  epochs=config.head_warmup_epochs, trainable=("cls_w", "cls_b"))

    trainable = ("logic", "bias", "cls_w", "cls_b")
    if model.layer.frozen_masks is None:
        trainable = ("conn",) + trainable
    log = _fit_loop(model, dataset, config, rng, train_idx, val_idx,
                    epochs=config.epochs, trainable=trainable)
    log["train_rows"] = int(len(train_idx))
    log["val_rows"] = int(n_val)
    model.train_summary["train"] = {
        "epochs": config.epochs,
        "final_loss": log["loss"][-1] if log["loss"] else None,
        "final_val_metric": log["val_metric"][-1] if log["val_metric"] else None,
    }
    model._split_cache = (train_idx, val_idx)  # reused by prune_finetune
    return log


def _init_biases_from_data(model: RuleModel, X: np.ndarray) -> None:
    """Center node biases on a low quantile of the initial pre-activations.

    A node whose threshold falls outside the data's pre-activation range is
    constant and receives no useful gradient; one that splits on a single
    input is affine and adds nothing over the skip path. Thresholding near
    the lower quartile starts every node as a live, non-trivial split.
    """
    _, mask = layer_mod._masks_matrix(model.layer)
    z = X.astype(np.float64) @ (mask * model.layer.logic)
    model.layer.bias = -np.quantile(z, 0.25, axis=0)


def _fit_loop(model: RuleModel, dataset: BitDataset, config: TrainConfig,
              rng: np.random.Generator, train_idx, val_idx, epochs: int,
              trainable: tuple[str, ...],
              pinned_cls: np.ndarray | None = None) -> dict:
    params = _param_dict(model)
    opt = Adam({k: v.shape for k, v in params.items()}, lr=config.lr,
               beta1=config.beta1, beta2=config.beta2, eps=config.eps)
    Xtr, ytr = dataset.X[train_idx], dataset.y[train_idx]
    Xva, yva = dataset.X[val_idx], dataset.y[val_idx]
    losses, val_hist = [], []
    for epoch in range(epochs):
        order = rng.permutation(len(train_idx))
        epoch_loss = 0.0
        for start in range(0, len(order), config.batch_size):
            batch = order[start: start + config.batch_size]
            _, cache = model_forward(model, Xtr[batch])
            loss, delta = loss_and_grad(model, cache, ytr[batch])
            if not np.isfinite(loss):
                raise TrainingFailureError(f"non-finite loss at epoch {epoch}")
            grads = backward(model, cache, delta, grad_mask=config.grad_mask)
            grads = {k: g for k, g in grads.items() if k in trainable}
            if "logic" in grads:
                grads["logic"] = np.where(model.pruned, 0.0, grads["logic"])
            opt.step(params, grads)
            if "cls_w" in grads:
                opt.prox_l1(params, "cls_w", config.l1)
            params["logic"][model.pruned] = 0.0
            if pinned_cls is not None:
                params["cls_w"][pinned_cls] = 0.0
            _write_back(model, params)
            epoch_loss += loss * len(batch)
        losses.append(epoch_loss / len(train_idx))
        try:
            val_hist.append(score(model, Xva, yva))
        except Exception:
            val_hist.append(float("nan"))
    return {"loss": losses, "val_metric": val_hist}


def _snapshot(model: RuleModel) -> dict:
    return {
        "conn": model.layer.conn.copy(),
        "logic": model.layer.logic.copy(),
        "bias": model.layer.bias.copy(),
        "cls_w": model.cls_w.copy(),
        "cls_b": model.cls_b.copy(),
        "pruned": model.pruned.copy(),
    }


def _restore(model: RuleModel, snap: dict) -> None:
    model.layer.conn = snap["conn"].copy()
    model.layer.logic = snap["logic"].copy()
    model.layer.bias = snap["bias"].copy()
    model.cls_w = snap["cls_w"].copy()
    model.cls_b = snap["cls_b"].copy()
    model.pruned = snap["pruned"].copy()


def prune_finetune(model: RuleModel, dataset: BitDataset, config: TrainConfig,
                   rng: np.random.Generator | None = None) -> dict:
    """Iterative magnitude pruning of selected connections with fine-tuning.

    Per round, the prune_fraction of currently active connections with the
    smallest |logic weight| is zeroed globally across nodes, then the
    surviving logic weights, biases and classifier are fine-tuned with the
    connection scores frozen. The deliverable state is the round maximizing
    validation metric minus complexity_weight * rule complexity; the model is
    left at that round and a per-round log is returned.
    """
    from .logic import complexity, extract_rules  # circular at module level

    config.validate()
    if rng is None:
        rng = np.random.default_rng(config.seed + 1)
    layer_mod.freeze_masks(model.layer)

    if hasattr(model, "_split_cache"):
        train_idx, val_idx = model._split_cache
    else:
        perm = rng.permutation(dataset.n_rows)
        n_val = int(round(config.val_fraction * dataset.n_rows))
        train_idx = perm[: dataset.n_rows - n_val]
        val_idx = perm[dataset.n_rows - n_val:] if n_val > 0 else train_idx

    in_mask = np.zeros_like(model.pruned)
    in_mask[model.layer.frozen_masks, np.arange(model.n_nodes)[None, :]] = True

    def evaluate_round():
        try:
            val = score(model, dataset.X[val_idx], dataset.y[val_idx])
        except Exception:  # degenerate split leaves the metric undefined
            val = float("-inf")
        comp = complexity(extract_rules(model, dataset))
        return val, comp

    val0, comp0 = evaluate_round()
    rounds = [{"round": 0, "pruned_total": int(model.pruned.sum()),
               "val_metric": val0, "complexity": comp0}]
    snaps = [_snapshot(model)]

    # Head weights that training already drove to exactly zero stay pinned:
    # fine-tuning refines the surviving structure, it does not resurrect
    # predictors that were already dropped from the rule set.
    pinned_cls = model.cls_w == 0.0

    for r in range(1, config.prune_rounds + 1):
        active = in_mask & ~model.pruned
        n_active = int(active.sum())
        count = max(1, int(np.floor(config.prune_fraction * n_active)))
        if count >= n_active:
            if r == 1:
                raise InvalidConfigError(
                    f"prune round {r} would remove all {n_active} remaining connections"
                )
            break  # schedule exhausted; keep the rounds pruned so far
        mags = np.abs(model.layer.logic)
        rows, cols = np.nonzero(active)
        order = np.lexsort((cols, rows, mags[rows, cols]))
        chosen = order[:count]
        model.pruned[rows[chosen], cols[chosen]] = True
        model.layer.logic[model.pruned] = 0.0

        pre_ft = _snapshot(model)
        val_prune, comp_prune = evaluate_round()
        _fit_loop(model, dataset, config, rng, train_idx, val_idx,
                  epochs=config.finetune_epochs,
                  trainable=("logic", "bias", "cls_w", "cls_b"),
                  pinned_cls=pinned_cls)
        val, comp = evaluate_round()
        if comp > comp_prune:
            # Fine-tuning reshaped some node past its pruned form; pruning
            # exists to simplify, so keep the pruned weights for this round.
            _restore(model, pre_ft)
            val, comp = val_prune, comp_prune
        pinned_cls = model.cls_w == 0.0

        rounds.append({"round": r, "pruned_total": int(model.pruned.sum()),
                       "val_metric": val, "complexity": comp})
        snaps.append(_snapshot(model))

    scores = [rd["val_metric"] - config.complexity_weight * rd["complexity"]
              for rd in rounds]
    best = max(range(len(scores)), key=lambda i: (scores[i], i))
    _restore(model, snaps[best])
    model.train_summary["prune"] = {
        "rounds": rounds,
        "selected_round": best,
    }
    return {"rounds": rounds, "selected_round": best}


def predict(model: RuleModel, rows: pd.DataFrame):
    """Encode raw rows with the model's schema and run the forward pass."""
    data = transform(model.schema, rows, with_targets=False)
    pred, _ = model_forward(model, data.X)
    return pred


def model_to_dict(model: RuleModel) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "task": model.task,
        "skip": model.skip,
        "k": model.layer.k,
        "tau": model.layer.tau,
        "schema": model.schema.to_dict(),
        "conn": model.layer.conn.tolist(),
        "logic": model.layer.logic.tolist(),
        "bias": model.layer.bias.tolist(),
        "cls_w": model.cls_w.tolist(),
        "cls_b": model.cls_b.tolist(),
        "frozen_masks": None if model.layer.frozen_masks is None
        else model.layer.frozen_masks.tolist(),
        "pruned": model.pruned.astype(int).tolist(),
        "train_summary": model.train_summary,
    }


def serialize(model: RuleModel) -> str:
    """Canonical JSON text; serialize(load(serialize(m))) is byte-identical."""
    return json.dumps(model_to_dict(model), sort_keys=True, indent=1)


def model_from_dict(d: dict) -> RuleModel:
    schema = EncodingSchema.from_dict(d["schema"])
    params = layer_mod.LayerParams(
        conn=np.array(d["conn"], dtype=np.float64),
        logic=np.array(d["logic"], dtype=np.float64),
        bias=np.array(d["bias"], dtype=np.float64),
        k=int(d["k"]),
        tau=float(d["tau"]),
        frozen_masks=None if d["frozen_masks"] is None
        else np.array(d["frozen_masks"], dtype=np.int64),
    )
    return RuleModel(
        layer=params,
        cls_w=np.array(d["cls_w"], dtype=np.float64),
        cls_b=np.array(d["cls_b"], dtype=np.float64),
        task=d["task"],
        schema=schema,
        pruned=np.array(d["pruned"], dtype=bool),
        skip=bool(d["skip"]),
        train_summary=d.get("train_summary", {}),
    )


def save_model(model: RuleModel, path) -> None:
    with open(path, "w") as fh:
        fh.write(serialize(model))


def load_model(path) -> RuleModel:
    with open(path) as fh:
        return model_from_dict(json.load(fh))
