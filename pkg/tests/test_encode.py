"""Binarization schema: quantile thresholds, thermometer bits, literals."""

import numpy as np
import pandas as pd
import pytest

from ttrules import encode
from ttrules.encode import ColumnSpec, EncodingSchema, FeatureEncoding, TargetSpec
from ttrules.errors import InvalidInputError


def simple_specs(target_kind="categorical"):
    return [ColumnSpec("a", "continuous"), ColumnSpec("y", target_kind, "target")]


def test_quantile_thresholds():
    df = pd.DataFrame({"a": np.arange(1, 101, dtype=float), "y": ["p", "q"] * 50})
    schema = encode.fit_schema(df, simple_specs(), bits=4)
    expected = np.quantile(df["a"], [0.2, 0.4, 0.6, 0.8])
    np.testing.assert_allclose(schema.features[0].thresholds, expected)
    assert schema.n_bits == 4


def test_constant_column_contributes_no_bits():
    df = pd.DataFrame({"a": [5.0] * 8, "y": ["p", "q"] * 4})
    schema = encode.fit_schema(df, simple_specs(), bits=4)
    assert schema.features[0].n_bits == 0
    assert schema.n_bits == 0
    assert schema.warnings  # a record of the degenerate column is kept


def test_duplicate_quantiles_collapse():
    df = pd.DataFrame({"a": [0.0] * 9 + [5.0], "y": ["p", "q"] * 5})
    schema = encode.fit_schema(df, simple_specs(), bits=4)
    assert 1 <= schema.features[0].n_bits < 4
    assert schema.warnings


def test_categorical_levels_keep_observation_order():
    df = pd.DataFrame({"c": ["A", "B", "A", "C"], "y": ["p", "q", "p", "q"]})
    specs = [ColumnSpec("c", "categorical"), ColumnSpec("y", "categorical", "target")]
    schema = encode.fit_schema(df, specs, bits=4)
    assert schema.features[0].categories == ["A", "B", "C"]
    assert schema.features[0].n_bits == 3


def manual_schema():
    return EncodingSchema(
        features=[FeatureEncoding("a", "continuous", thresholds=[20, 40, 60, 80], offset=0)],
        target=TargetSpec("y", "binary", classes=["0", "1"]),
    )


def test_thermometer_transform():
    schema = manual_schema()
    assert encode.transform_row(schema, {"a": 50}).tolist() == [1, 1, 0, 0]
    assert encode.transform_row(schema, {"a": 5}).tolist() == [0, 0, 0, 0]
    assert encode.transform_row(schema, {"a": 40}).tolist() == [1, 1, 0, 0]  # >= is inclusive


def test_one_hot_transform_and_unseen_category():
    schema = EncodingSchema(
        features=[FeatureEncoding("c", "categorical", categories=["A", "B", "C"], offset=0)],
        target=TargetSpec("y", "binary", classes=["0", "1"]),
    )
    assert encode.transform_row(schema, {"c": "B"}).tolist() == [0, 1, 0]
    assert encode.transform_row(schema, {"c": "Z"}).tolist() == [0, 0, 0]


def test_missing_values_rejected():
    schema = manual_schema()
    with pytest.raises(InvalidInputError):
        encode.transform(schema, pd.DataFrame({"a": [np.nan]}), with_targets=False)


def test_literal_rendering():
    schema = EncodingSchema(
        features=[
            FeatureEncoding("Cholesterol", "continuous", thresholds=[167.63], offset=0),
            FeatureEncoding("ChestPainType", "categorical",
                            categories=["TA", "ATA"], offset=1),
            FeatureEncoding("x", "continuous", thresholds=[3.0], offset=3),
        ],
        target=TargetSpec("y", "binary", classes=["0", "1"]),
    )
    assert encode.literal(schema, 0, "negative") == "Cholesterol < 167.63"
    assert encode.literal(schema, 1, "negative") == "ChestPainType ≠ 'TA'"
    assert encode.literal(schema, 3, "positive") == "x ≥ 3"
    with pytest.raises(InvalidInputError):
        encode.literal(schema, 4, "positive")
    with pytest.raises(InvalidInputError):
        encode.literal(schema, 0, "sideways")


def test_rendered_literal_agrees_with_bit():
    rng = np.random.default_rng(0)
    df = pd.DataFrame({"a": rng.normal(10, 4, 60), "y": rng.choice(["p", "q"], 60)})
    schema = encode.fit_schema(df, simple_specs(), bits=5)
    data = encode.transform(schema, df)
    for bit in range(schema.n_bits):
        feat, pos = schema.bit_origin(bit)
        t = feat.thresholds[pos]
        np.testing.assert_array_equal(data.X[:, bit], (df["a"] >= t).astype(np.uint8))


def test_thermometer_block_is_monotone():
    rng = np.random.default_rng(1)
    df = pd.DataFrame({"a": rng.normal(0, 1, 80), "y": rng.choice(["p", "q"], 80)})
    schema = encode.fit_schema(df, simple_specs(), bits=6)
    data = encode.transform(schema, df)
    # within one feature block, bits are non-increasing (1s then 0s)
    assert np.all(np.diff(data.X.astype(int), axis=1) <= 0)


def test_fit_schema_is_deterministic():
    rng = np.random.default_rng(2)
    df = pd.DataFrame({"a": rng.normal(0, 1, 50), "y": rng.choice(["p", "q"], 50)})
    s1 = encode.fit_schema(df, simple_specs(), bits=4)
    s2 = encode.fit_schema(df, simple_specs(), bits=4)
    assert s1.to_dict() == s2.to_dict()


def test_schema_json_round_trip():
    df = pd.DataFrame({"a": [1.0, 2, 3, 4], "c": list("ABAB"), "y": list("pqpq")})
    specs = [ColumnSpec("a", "continuous"), ColumnSpec("c", "categorical"),
             ColumnSpec("y", "categorical", "target")]
    schema = encode.fit_schema(df, specs, bits=2)
    again = EncodingSchema.from_dict(schema.to_dict())
    assert again.to_dict() == schema.to_dict()


def test_regression_target_standardization_round_trip():
    df = pd.DataFrame({"a": [1.0, 2, 3, 4, 5, 6], "y": [10.0, 12, 14, 16, 18, 20]})
    specs = [ColumnSpec("a", "continuous"), ColumnSpec("y", "continuous", "target")]
    schema = encode.fit_schema(df, specs, bits=2, task="regression")
    data = encode.transform(schema, df)
    assert abs(data.y.mean()) < 1e-12
    np.testing.assert_allclose(encode.destandardize(schema, data.y), df["y"])


@pytest.mark.parametrize("specs,msg", [
    ([ColumnSpec("a", "continuous")], "target"),
    ([ColumnSpec("a", "continuous"), ColumnSpec("a", "categorical", "target")], "unique"),
    ([ColumnSpec("a", "fuzzy"), ColumnSpec("y", "categorical", "target")], "kind"),
])
def test_fit_schema_validation(specs, msg):
    df = pd.DataFrame({"a": [1.0, 2], "y": ["p", "q"]})
    with pytest.raises(InvalidInputError, match=msg):
        encode.fit_schema(df, specs, bits=2)


def test_fit_schema_rejects_empty_and_bad_bits():
    df = pd.DataFrame({"a": [1.0, 2], "y": ["p", "q"]})
    with pytest.raises(InvalidInputError):
        encode.fit_schema(df.iloc[:0], simple_specs(), bits=2)
    with pytest.raises(InvalidInputError):
        encode.fit_schema(df, simple_specs(), bits=0)


def test_binary_task_requires_two_classes():
    df = pd.DataFrame({"a": [1.0, 2, 3], "y": ["p", "q", "r"]})
    with pytest.raises(InvalidInputError):
        encode.fit_schema(df, simple_specs(), bits=2, task="binary")
