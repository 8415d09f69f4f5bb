"""Layer of truth-table nodes with learned sparse connections.

Each of the M nodes thresholds a linear combination of k selected input bits:
z_j = sum_i mask_ij * logic[i, j] * x_i + bias_j, output_j = 1 when z_j > 0.
Which k inputs a node sees is decided by the top-k entries of its column of
the connection-score matrix. The forward pass uses the hard selection; the
backward pass pushes gradient through the relaxed top-k operator so the
connection scores keep learning, and the 0/1 thresholding passes gradient
straight through.

Once masks are frozen (second training phase) the connection scores stop
receiving gradient and the selected index sets become part of the model.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import softtopk
from .errors import InvalidInputError, InvalidStateError

# Truth tables are enumerated with 2^k rows downstream, so cap fan-in.
MAX_FAN_IN = 16


@dataclass
class LayerParams:
    """Learnable state of one truth-table layer.

    conn holds the connection scores (n x M), logic the linear weights
    (n x M), bias the per-node offsets (M,). frozen_masks, when set, is a
    (k x M) integer array of selected input indices per node and overrides
    the score-based selection.
    """

    conn: np.ndarray
    logic: np.ndarray
    bias: np.ndarray
    k: int
    tau: float
    frozen_masks: np.ndarray | None = None

    @property
    def n_inputs(self) -> int:
        return int(self.conn.shape[0])

    @property
    def n_nodes(self) -> int:
        return int(self.conn.shape[1])

    def validate(self) -> None:
        n, m = self.conn.shape
        if self.logic.shape != (n, m) or self.bias.shape != (m,):
            raise InvalidInputError("conn, logic and bias shapes disagree")
        # k == n is the degenerate full selection: every input is active and
        # the relaxed operator returns constant ones with zero gradient.
        if not (1 <= self.k <= min(n, MAX_FAN_IN)):
            raise InvalidInputError(
                f"k={self.k} out of range [1, min(n, {MAX_FAN_IN})] for n={n}"
            )
        if self.frozen_masks is not None:
            fm = self.frozen_masks
            if fm.shape != (self.k, m):
                raise InvalidInputError(f"frozen_masks shape {fm.shape} != ({self.k}, {m})")
            for j in range(m):
                col = fm[:, j]
                if len(set(col.tolist())) != self.k or col.min() < 0 or col.max() >= n:
                    raise InvalidInputError(f"frozen mask for node {j} is not k distinct indices")


def init_layer(n: int, m: int, k: int, tau: float, rng: np.random.Generator) -> LayerParams:
    """Fresh layer parameters.

    Connection scores start small and uniform so the relaxed top-k stays far
    from saturation early on (gradient still flows to every candidate);
    logic weights start at unit scale over k inputs so pre-activations sit
    near the threshold.
    """
    conn = rng.uniform(-0.1, 0.1, size=(n, m))
    logic = rng.uniform(-1.0, 1.0, size=(n, m)) / np.sqrt(k)
    bias = np.zeros(m)
    params = LayerParams(conn=conn, logic=logic, bias=bias, k=k, tau=tau)
    params.validate()
    return params


def hard_mask(scores: np.ndarray, k: int) -> np.ndarray:
    """Indices of the k largest scores, ties broken toward the lower index.

    Returned sorted ascending; deterministic.
    """
    scores = np.asarray(scores, dtype=np.float64)
    if not np.all(np.isfinite(scores)):
        raise InvalidInputError("scores contain non-finite entries")
    if not (1 <= k <= scores.shape[0]):
        raise InvalidInputError(f"k={k} out of range for {scores.shape[0]} scores")
    order = np.argsort(-scores, kind="stable")
    return np.sort(order[:k])


def _masks_matrix(params: LayerParams) -> tuple[np.ndarray, np.ndarray]:
    """Per-node selected indices (k x M) and the 0/1 mask matrix (n x M)."""
    n, m = params.conn.shape
    if params.frozen_masks is not None:
        idx = params.frozen_masks
    else:
        idx = np.empty((params.k, m), dtype=np.int64)
        for j in range(m):
            idx[:, j] = hard_mask(params.conn[:, j], params.k)
    mask = np.zeros((n, m), dtype=np.float64)
    mask[idx, np.arange(m)[None, :]] = 1.0
    return idx, mask


@dataclass
class LayerCache:
    """Everything the backward pass needs, captured during forward."""

    x: np.ndarray  # (B, n) inputs as float64
    mask_idx: np.ndarray  # (k, M) selected indices
    mask: np.ndarray  # (n, M) 0/1
    z: np.ndarray  # (B, M) pre-activations
    outputs: np.ndarray  # (B, M) bits, or z itself in soft mode
    soft_y: np.ndarray | None  # (n, M) relaxed selection per node column
    soft: bool  # True when the relaxed mask was used in the forward pass


def _soft_masks(params: LayerParams) -> np.ndarray:
    """Relaxed selection weights for every node column, shape (n, M).

    Solved far below the operator's default tolerance so that downstream
    gradients are limited by float precision, not by the root finder.
    """
    sol = softtopk.forward(params.conn.T, params.k, params.tau, tol=1e-12)
    return sol.y.T


def layer_forward(x, params: LayerParams, soft: bool = False) -> tuple[np.ndarray, LayerCache]:
    """Compute node outputs for a row or batch of input bits.

    Hard mode (default): z_j sums the k selected inputs, output is the strict
    threshold 1(z_j > 0). Soft mode replaces the discrete selection with the
    relaxed weights and skips binarization; it exists as the differentiable
    surrogate that gradient checks difference against.
    """
    params.validate()
    x = np.asarray(x, dtype=np.float64)
    squeeze = x.ndim == 1
    x2 = np.atleast_2d(x)
    if x2.shape[1] != params.n_inputs:
        raise InvalidInputError(
            f"input width {x2.shape[1]} does not match layer width {params.n_inputs}"
        )

    mask_idx, mask = _masks_matrix(params)
    need_soft = soft or params.frozen_masks is None
    soft_y = _soft_masks(params) if need_soft else None

    eff = (soft_y if soft else mask) * params.logic
    z = x2 @ eff + params.bias
    outputs = z if soft else (z > 0).astype(np.float64)
    cache = LayerCache(x=x2, mask_idx=mask_idx, mask=mask, z=z, outputs=outputs,
                       soft_y=soft_y, soft=soft)
    return (outputs[0] if squeeze else outputs), cache


@dataclass
class LayerGrads:
    conn: np.ndarray
    logic: np.ndarray
    bias: np.ndarray
    x: np.ndarray


def layer_backward(upstream, cache: LayerCache, params: LayerParams,
                   grad_mask: str = "hard") -> LayerGrads:
    """Gradients of a scalar loss given d(loss)/d(outputs).

    Binarization is straight-through (d output / d z = 1). Logic-weight,
    bias and input gradients use the mask realized in the forward pass
    (grad_mask="hard"), or the relaxed weights (grad_mask="soft", which the
    finite-difference checks of the fully relaxed surrogate require).
    Connection scores always receive the relaxed top-k Jacobian product; with
    frozen masks they receive exactly zero.
    """
    if cache is None:
        raise InvalidStateError("layer_backward requires the cache from layer_forward")
    if grad_mask not in ("hard", "soft"):
        raise InvalidInputError(f"grad_mask must be 'hard' or 'soft', got '{grad_mask}'")
    upstream = np.asarray(upstream, dtype=np.float64)
    squeeze = upstream.ndim == 1
    u = np.atleast_2d(upstream)
    if u.shape != cache.z.shape:
        raise InvalidInputError(f"upstream shape {u.shape} does not match z shape {cache.z.shape}")

    use_soft_mask = cache.soft or grad_mask == "soft"
    m_eff = cache.soft_y if use_soft_mask else cache.mask

    grad_logic = (cache.x.T @ u) * m_eff
    grad_bias = u.sum(axis=0)
    grad_x = u @ (m_eff * params.logic).T

    if params.frozen_masks is not None:
        grad_conn = np.zeros_like(params.conn)
    else:
        # d z_j / d(soft mask) = x * logic[:, j]; fold the batch first, then
        # push through the relaxed top-k Jacobian column by column.
        g = (cache.x.T @ u) * params.logic  # (n, M)
        sol = softtopk.SoftTopKSolution(y=cache.soft_y.T, c=0.0, k=params.k,
                                        tau=params.tau, iterations=0)
        grad_conn = softtopk.vjp_x(sol, params.tau, g.T).T

    return LayerGrads(conn=grad_conn, logic=grad_logic, bias=grad_bias,
                      x=grad_x[0] if squeeze else grad_x)


def freeze_masks(params: LayerParams) -> None:
    """Pin every node to its currently selected input indices."""
    if params.frozen_masks is None:
        idx, _ = _masks_matrix(params)
        params.frozen_masks = idx
