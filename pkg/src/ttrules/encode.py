"""Binarization of raw tabular data into Boolean literals.

Continuous features become cumulative threshold indicators (bit j is 1 when
value >= t_j, thresholds at the j/(B+1) quantiles of the fitting table), so
each bit reads back as a single "feature >= t" / "feature < t" condition.
Categorical features are one-hot encoded in first-observation order. The
schema remembers enough to render any bit as a human-readable condition and
to round-trip through JSON.

Missing values are rejected rather than imputed; a caller that wants
imputation must do it before encoding.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from .errors import InvalidInputError

KINDS = ("continuous", "categorical")
ROLES = ("feature", "target")
TASKS = ("binary", "multiclass", "regression")


@dataclass(frozen=True)
class ColumnSpec:
    name: str
    kind: str  # continuous | categorical
    role: str = "feature"  # feature | target


@dataclass
class FeatureEncoding:
    """Encoding of one raw feature column as a contiguous block of bits."""

    name: str
    kind: str
    thresholds: list[float] = field(default_factory=list)  # continuous only
    categories: list[str] = field(default_factory=list)  # categorical only
    offset: int = 0  # index of the block's first bit

    @property
    def n_bits(self) -> int:
        if self.kind == "continuous":
            return len(self.thresholds)
        return len(self.categories)


@dataclass
class TargetSpec:
    name: str
    task: str  # binary | multiclass | regression
    classes: list[str] = field(default_factory=list)
    mean: float = 0.0
    std: float = 1.0


@dataclass
class EncodingSchema:
    features: list[FeatureEncoding]
    target: TargetSpec
    warnings: list[str] = field(default_factory=list)

    @property
    def n_bits(self) -> int:
        return sum(f.n_bits for f in self.features)

    def bit_origin(self, bit: int) -> tuple[FeatureEncoding, int]:
        """Map a global bit index to (feature, position inside its block)."""
        if not 0 <= bit < self.n_bits:
            raise InvalidInputError(f"bit index {bit} out of range [0, {self.n_bits})")
        for feat in self.features:
            if feat.offset <= bit < feat.offset + feat.n_bits:
                return feat, bit - feat.offset
        raise InvalidInputError(f"bit index {bit} maps to no feature block")

    def to_dict(self) -> dict:
        return {
            "features": [
                {
                    "name": f.name,
                    "kind": f.kind,
                    "thresholds": [float(t) for t in f.thresholds],
                    "categories": list(f.categories),
                    "offset": f.offset,
                }
                for f in self.features
            ],
            "target": {
                "name": self.target.name,
                "task": self.target.task,
                "classes": list(self.target.classes),
                "mean": float(self.target.mean),
                "std": float(self.target.std),
            },
            "warnings": list(self.warnings),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "EncodingSchema":
        feats = [
            FeatureEncoding(
                name=f["name"],
                kind=f["kind"],
                thresholds=list(f["thresholds"]),
                categories=list(f["categories"]),
                offset=int(f["offset"]),
            )
            for f in d["features"]
        ]
        t = d["target"]
        target = TargetSpec(name=t["name"], task=t["task"], classes=list(t["classes"]),
                            mean=float(t["mean"]), std=float(t["std"]))
        return cls(features=feats, target=target, warnings=list(d.get("warnings", [])))


@dataclass
class BitDataset:
    """Encoded rows: a {0,1} feature matrix plus per-task targets.

    Targets are class indices for classification and standardized floats for
    regression. raw_targets keeps the original target values for metric
    reporting on the training scale.
    """

    X: np.ndarray  # (rows, n_bits) uint8
    y: np.ndarray  # (rows,) int64 class index or float64 standardized target
    schema: EncodingSchema
    raw_targets: np.ndarray | None = None

    @property
    def n_rows(self) -> int:
        return int(self.X.shape[0])

    @property
    def n_bits(self) -> int:
        return int(self.X.shape[1])

    def subset(self, idx) -> "BitDataset":
        raw = None if self.raw_targets is None else self.raw_targets[idx]
        return BitDataset(X=self.X[idx], y=self.y[idx], schema=self.schema,
                          raw_targets=raw)


def _column_values(table: pd.DataFrame, name: str) -> pd.Series:
    if name not in table.columns:
        raise InvalidInputError(f"column '{name}' not present in table")
    return table[name]


def fit_schema(table: pd.DataFrame, specs: list[ColumnSpec], bits: int,
               task: str | None = None) -> EncodingSchema:
    """Fit per-feature binarization rules on a table.

    Continuous thresholds are the j/(B+1) quantiles (j = 1..B, linear
    interpolation) with exact duplicates collapsed, so a constant column
    contributes zero bits and leaves a warning record. Categorical levels are
    kept in first-observation order. Deterministic given the table.
    """
    if len(table) == 0:
        raise InvalidInputError("cannot fit a schema on an empty table")
    if bits < 1:
        raise InvalidInputError(f"bits must be >= 1, got {bits}")
    names = [s.name for s in specs]
    if len(set(names)) != len(names):
        raise InvalidInputError("column spec names must be unique")
    targets = [s for s in specs if s.role == "target"]
    if len(targets) != 1:
        raise InvalidInputError(f"exactly one target column required, got {len(targets)}")
    for s in specs:
        if s.kind not in KINDS:
            raise InvalidInputError(f"unknown column kind '{s.kind}' for '{s.name}'")
        if s.role not in ROLES:
            raise InvalidInputError(f"unknown column role '{s.role}' for '{s.name}'")

    warnings: list[str] = []
    features: list[FeatureEncoding] = []
    offset = 0
    for s in specs:
        if s.role != "feature":
            continue
        col = _column_values(table, s.name)
        if col.isna().any():
            raise InvalidInputError(f"column '{s.name}' contains missing values")
        if s.kind == "continuous":
            values = pd.to_numeric(col, errors="coerce")
            if values.isna().any():
                raise InvalidInputError(f"continuous column '{s.name}' has non-numeric entries")
            arr = values.to_numpy(np.float64)
            if arr.min() == arr.max():
                # constant column: no threshold splits anything
                warnings.append(f"column '{s.name}' is constant; 0 bits emitted")
                thresholds = np.empty(0)
            else:
                qs = np.arange(1, bits + 1) / (bits + 1)
                thresholds = np.unique(np.quantile(arr, qs))
                if len(thresholds) < bits:
                    warnings.append(
                        f"column '{s.name}': duplicate quantiles collapsed, "
                        f"{len(thresholds)} of {bits} bits kept"
                    )
            feat = FeatureEncoding(name=s.name, kind="continuous",
                                   thresholds=[float(t) for t in thresholds],
                                   offset=offset)
        else:
            cats = list(dict.fromkeys(str(v) for v in col))
            feat = FeatureEncoding(name=s.name, kind="categorical",
                                   categories=cats, offset=offset)
        features.append(feat)
        offset += feat.n_bits

    tgt_spec = targets[0]
    tgt_col = _column_values(table, tgt_spec.name)
    if tgt_col.isna().any():
        raise InvalidInputError(f"target column '{tgt_spec.name}' contains missing values")
    if task is None:
        task = "regression" if tgt_spec.kind == "continuous" else "multiclass"
    if task not in TASKS:
        raise InvalidInputError(f"unknown task '{task}'")
    if task == "regression":
        vals = pd.to_numeric(tgt_col, errors="coerce").to_numpy(np.float64)
        if np.isnan(vals).any():
            raise InvalidInputError("regression target has non-numeric entries")
        std = float(vals.std())
        target = TargetSpec(name=tgt_spec.name, task=task,
                            mean=float(vals.mean()), std=std if std > 0 else 1.0)
    else:
        classes = list(dict.fromkeys(str(v) for v in tgt_col))
        if task == "binary" and len(classes) != 2:
            raise InvalidInputError(
                f"binary task requires exactly 2 target classes, found {len(classes)}"
            )
        if len(classes) < 2:
            raise InvalidInputError("classification target has fewer than 2 classes")
        target = TargetSpec(name=tgt_spec.name, task=task, classes=classes)

    return EncodingSchema(features=features, target=target, warnings=warnings)


def transform(schema: EncodingSchema, table: pd.DataFrame,
              with_targets: bool = True) -> BitDataset:
    """Encode raw rows against a fitted schema.

    Thermometer blocks set bit j to 1 when value >= t_j; one-hot blocks mark
    the matching category, and an unseen category leaves its block all zero.
    """
    n = len(table)
    X = np.zeros((n, schema.n_bits), dtype=np.uint8)
    for feat in schema.features:
        col = _column_values(table, feat.name)
        if col.isna().any():
            raise InvalidInputError(f"column '{feat.name}' contains missing values")
        if feat.kind == "continuous":
            values = pd.to_numeric(col, errors="coerce").to_numpy(np.float64)
            if np.isnan(values).any():
                raise InvalidInputError(f"continuous column '{feat.name}' has non-numeric entries")
            for j, t in enumerate(feat.thresholds):
                X[:, feat.offset + j] = values >= t
        else:
            values = col.astype(str).to_numpy()
            for j, cat in enumerate(feat.categories):
                X[:, feat.offset + j] = values == cat

    y = None
    raw = None
    if with_targets and schema.target.name in table.columns:
        tgt = _column_values(table, schema.target.name)
        if tgt.isna().any():
            raise InvalidInputError("target column contains missing values")
        if schema.target.task == "regression":
            raw = pd.to_numeric(tgt, errors="coerce").to_numpy(np.float64)
            if np.isnan(raw).any():
                raise InvalidInputError("regression target has non-numeric entries")
            y = (raw - schema.target.mean) / schema.target.std
        else:
            lookup = {c: i for i, c in enumerate(schema.target.classes)}
            labels = tgt.astype(str).to_numpy()
            unknown = [v for v in labels if v not in lookup]
            if unknown:
                raise InvalidInputError(f"target contains unseen class '{unknown[0]}'")
            y = np.array([lookup[v] for v in labels], dtype=np.int64)
            raw = y.copy()
    if y is None:
        y = np.zeros(n, dtype=np.float64)
    return BitDataset(X=X, y=y, schema=schema, raw_targets=raw)


def transform_row(schema: EncodingSchema, row: dict | pd.Series) -> np.ndarray:
    """Encode a single raw row (mapping of column name to value) to bits."""
    frame = pd.DataFrame([dict(row)])
    return transform(schema, frame, with_targets=False).X[0]


def _fmt_threshold(t: float) -> str:
    # 6 significant digits in rendered text only; full precision elsewhere.
    return f"{t:.6g}"


def literal(schema: EncodingSchema, bit: int, polarity: str = "positive") -> str:
    """Render one bit as a readable condition.

    Positive thermometer bits read "feature >= t", negative ones "feature < t";
    categorical bits read "feature = 'v'" / "feature != 'v'" (with the unicode
    comparison glyphs used throughout rule rendering).
    """
    if polarity not in ("positive", "negative"):
        raise InvalidInputError(f"polarity must be positive or negative, got '{polarity}'")
    feat, pos = schema.bit_origin(bit)
    if feat.kind == "continuous":
        t = _fmt_threshold(feat.thresholds[pos])
        op = "≥" if polarity == "positive" else "<"
        return f"{feat.name} {op} {t}"
    cat = feat.categories[pos]
    op = "=" if polarity == "positive" else "≠"
    return f"{feat.name} {op} '{cat}'"


def destandardize(schema: EncodingSchema, values: np.ndarray) -> np.ndarray:
    """Map standardized regression outputs back to training-scale units."""
    return values * schema.target.std + schema.target.mean
