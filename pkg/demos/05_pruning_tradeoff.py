#!/usr/bin/env python3
"""How iterative magnitude pruning trades metric for complexity.

Runs the penguins and diabetes configs and prints the per-round frontier:
each round zeroes the smallest surviving logic weights, fine-tunes what is
left, and logs the validation metric next to the extracted rule complexity.
The shipped pipeline then keeps the round maximizing metric minus a small
complexity penalty.
"""

import pathlib

from ttrules.cli import load_config, run_training

repo = pathlib.Path(__file__).resolve().parent.parent

for name in ("penguins", "diabetes"):
    config = load_config(str(repo / f"configs/{name}.json"), {})
    config["dataset"] = str(repo / config["dataset"])
    model, logs, frames = run_training(config)
    sel = logs["prune"]["selected_round"]
    print(f"\n{name}: validation metric vs rule complexity per prune round")
    print("  round  pruned  val metric  complexity")
    for r in logs["prune"]["rounds"]:
        mark = "  <- kept" if r["round"] == sel else ""
        print(f"  {r['round']:>5}  {r['pruned_total']:>6}  "
              f"{r['val_metric']:>10.4f}  {r['complexity']:>10}{mark}")
