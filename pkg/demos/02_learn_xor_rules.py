#!/usr/bin/env python3
"""Learning XOR with one truth-table node and reading the answer back.

XOR is the classic function no linear model can represent. A single
threshold node cannot be XOR either (it is not linearly separable), but one
node plus the skip connections is enough: the head combines the raw bits
with whatever nonlinear function the node settles on (NAND, OR, ...) into an
exact XOR. Rule extraction then recovers the symbolic form; with parity
merges enabled, the whole model minimizes to a single XOR implicant.
"""

import numpy as np
import pandas as pd

from ttrules import encode, logic
from ttrules import model as M

df = pd.DataFrame({"x0": [0, 1, 0, 1], "x1": [0, 0, 1, 1], "y": [0, 1, 1, 0]})
print("training table:")
print(df.to_string(index=False))

specs = [encode.ColumnSpec("x0", "continuous"), encode.ColumnSpec("x1", "continuous"),
         encode.ColumnSpec("y", "categorical", "target")]
schema = encode.fit_schema(df, specs, bits=1, task="binary")
data = encode.transform(schema, df)

config = M.TrainConfig(epochs=300, head_warmup_epochs=1000, n_nodes=1, k=2,
                       bits=1, tau=0.01, val_fraction=0.0, batch_size=4,
                       lr=0.05, seed=0)
rng = np.random.default_rng(config.seed)
model = M.new_model(schema, "binary", config, rng)
M.train(model, data, config, rng)

pred, cache = M.model_forward(model, data.X)
print("\npredictions:", np.round(pred, 3), " accuracy:",
      float(np.mean((pred > 0.5) == data.y)))
print("node truth values over the four rows:",
      cache.layer_cache.outputs.ravel().astype(int))

from ttrules.layer import freeze_masks
freeze_masks(model.layer)
rules = logic.extract_rules(model, data)
print("\nextracted weighted rules (reproduce the network exactly):")
print(logic.render(rules))

for use_xor, label in ((True, "with parity merges"), (False, "plain cubes only")):
    formula = logic.decision_formula(model, data, use_xor=use_xor)
    text = logic.formula_text(schema, [0, 1], formula)
    print(f"whole-model decision, {label}: {text}")
