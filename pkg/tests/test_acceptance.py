"""Acceptance suite: one test per shipped guarantee, desk-scale.

Each test prints a PASS line with the measured numbers (run pytest with -s to
see them stream). The heavyweight training sweeps run once in module-scoped
fixtures and are shared across criteria.
"""

import json
import pathlib
import time

import numpy as np
import pytest
from scipy.special import expit

from ttrules import encode, layer, logic, metrics, softtopk
from ttrules import model as M
from ttrules.cli import load_config, run_training
from ttrules.encode import transform

REPO = pathlib.Path(__file__).resolve().parent.parent

CLS_TARGETS = {
    # dataset: (min mean test AUC, max mean complexity = 3x published)
    "iris": (0.97, 78),
    "penguins": (0.98, 18),
    "wine": (0.97, 21),
    "heart": (0.88, 33),
    "diabetes": (0.76, 42),
    "blood": (0.68, 45),
}
REG_TARGETS = {"wine_reg": 0.25, "abalone": 0.48}
SEEDS = range(5)


def _run(name, **overrides):
    config = load_config(str(REPO / f"configs/{name}.json"), {})
    config["dataset"] = str(REPO / config["dataset"])
    config.update(overrides)
    start = time.time()
    model, logs, frames = run_training(config)
    elapsed = time.time() - start
    data_test = transform(model.schema, frames["test"]) if len(frames["test"]) else None
    test_metric = M.score(model, data_test.X, data_test.y) if data_test is not None else None
    full = transform(model.schema, frames["full"])
    ruleset = logic.extract_rules(model, full, use_xor=config.get("use_xor", True))
    return {
        "model": model, "logs": logs, "frames": frames, "full": full,
        "test_metric": test_metric, "ruleset": ruleset,
        "complexity": logic.complexity(ruleset), "elapsed": elapsed,
        "rounds": logs["prune"]["rounds"],
    }


@pytest.fixture(scope="module")
def desk():
    runs = {}
    for name in CLS_TARGETS:
        runs[name] = [_run(name, seed=s) for s in SEEDS]
    for name in REG_TARGETS:
        runs[name] = [_run(name, seed=s) for s in SEEDS]
    return runs


@pytest.fixture(scope="module")
def xor_runs():
    return {
        "main": _run("xor", seed=0),
        "no_xor": _run("xor", seed=0, use_xor=False),
    }


def test_criterion_1_soft_topk_constraint_and_convergence():
    rng = np.random.default_rng(0)
    start = time.time()
    worst_resid, worst_iters = 0.0, 0
    for _ in range(1000):
        n = int(rng.integers(2, 129))
        k = int(rng.integers(1, n))
        tau = float(10 ** rng.uniform(-3, 0))
        x = rng.normal(0, rng.uniform(0.5, 3.0), n)
        sol = softtopk.forward(x, k, tau)
        worst_resid = max(worst_resid, abs(sol.y.sum() - k))
        worst_iters = max(worst_iters, int(sol.iterations))
    elapsed = time.time() - start
    assert worst_resid <= 1e-5
    assert worst_iters <= 60
    assert elapsed < 5.0

    # semi-log residual decay is linear (bracket halving)
    x = rng.standard_normal((16, 100))
    _, _, hist = softtopk.residual_history(x, 10, 0.05, tol=1e-15, max_iter=60)
    slopes = []
    for j in range(16):
        r = hist[:40, j]
        mask = r > 1e-14
        t = np.arange(1, 41)[mask]
        logr = np.log2(r[mask])
        slope = np.polyfit(t, logr, 1)[0]
        slopes.append(slope)
    assert all(-1.5 < s < -0.6 for s in slopes)
    print(f"\nPASS criterion 1: soft top-k constraint |sum(y)-k| <= {worst_resid:.2e} "
          f"on 1000 instances, max {worst_iters} iterations, {elapsed:.2f}s, "
          f"mean semi-log slope {np.mean(slopes):.2f}")


def test_criterion_2_gradient_oracles():
    rng = np.random.default_rng(1)
    start = time.time()
    checked = 0

    def rel_ok(analytic, fd):
        # The forward solve carries ~1e-12 root-finder noise, so a central
        # difference at eps=1e-6 has ~1e-6-scale absolute noise; certify
        # relative 1e-4 with that absolute floor (standard gradcheck form).
        return abs(analytic - fd) <= 1e-5 + 1e-4 * abs(fd)

    # vjp against directional finite differences of the forward solve
    for _ in range(110):
        n = int(rng.integers(3, 24))
        k = int(rng.integers(1, n))
        tau = float(10 ** rng.uniform(-1.6, 0))
        x = rng.standard_normal(n)
        u = rng.standard_normal(n)
        d = rng.standard_normal(n)
        sol = softtopk.forward(x, k, tau, tol=1e-13)
        analytic = d @ softtopk.vjp_x(sol, tau, u)  # u^T J d via symmetry
        eps = 1e-6
        hi = softtopk.forward(x + eps * d, k, tau, tol=1e-13).y
        lo = softtopk.forward(x - eps * d, k, tau, tol=1e-13).y
        assert rel_ok(analytic, u @ (hi - lo) / (2 * eps))
        checked += 1

    # gradient w.r.t. the relaxed cardinality
    from scipy.optimize import brentq
    for _ in range(40):
        n = int(rng.integers(3, 16))
        k = int(rng.integers(1, n))
        tau = float(10 ** rng.uniform(-1.3, 0))
        x = rng.standard_normal(n)

        def y_of(k_real):
            xt = x / tau
            c = brentq(lambda c: expit(xt + c).sum() - k_real,
                       -xt.max() - 60, -xt.min() + 60, xtol=1e-14)
            return expit(xt + c)

        num = (y_of(k + 1e-4) - y_of(k - 1e-4)) / 2e-4
        analytic = softtopk.grad_k(softtopk.forward(x, k, tau, tol=1e-13))
        assert np.abs(analytic - num).max() <= 1e-3
        checked += 1

    # every model parameter through the fully relaxed surrogate
    for trial in range(60):
        n = int(rng.integers(4, 17))
        m = int(rng.integers(1, 5))
        kk = int(rng.integers(2, min(n, 5)))
        task = ("binary", "multiclass", "regression")[trial % 3]
        classes = ["a", "b", "c"][: 3 if task == "multiclass" else 2]
        schema = encode.EncodingSchema(
            features=[encode.FeatureEncoding("f", "continuous",
                                             thresholds=list(range(n)), offset=0)],
            target=encode.TargetSpec("y", task, classes=classes),
        )
        cfg = M.TrainConfig(n_nodes=m, k=kk, bits=n, tau=0.05)
        model = M.new_model(schema, task, cfg, rng)
        model.cls_w = rng.standard_normal(model.cls_w.shape) * 0.4
        X = (rng.random((4, n)) < 0.5).astype(float)
        if task == "regression":
            y = rng.standard_normal(4)
        else:
            y = rng.integers(0, len(classes), 4)

        def soft_loss():
            _, cache = M.model_forward(model, X, soft=True)
            return M.loss_and_grad(model, cache, y)[0]

        _, cache = M.model_forward(model, X, soft=True)
        _, delta = M.loss_and_grad(model, cache, y)
        grads = M.backward(model, cache, delta, grad_mask="soft")
        arrays = {"conn": model.layer.conn, "logic": model.layer.logic,
                  "bias": model.layer.bias, "cls_w": model.cls_w,
                  "cls_b": model.cls_b}
        eps = 1e-6
        for pname, arr in arrays.items():
            d = rng.standard_normal(arr.shape)
            analytic = float((grads[pname] * d).sum())
            arr += eps * d
            hi = soft_loss()
            arr -= 2 * eps * d
            lo = soft_loss()
            arr += eps * d
            assert rel_ok(analytic, (hi - lo) / (2 * eps)), (task, pname)
        checked += 1

    elapsed = time.time() - start
    assert checked >= 200
    assert elapsed < 30.0
    print(f"\nPASS criterion 2: {checked} gradient-oracle instances within "
          f"relative 1e-4 in {elapsed:.1f}s")


def test_criterion_3_hard_limit_and_tie_breaking():
    rng = np.random.default_rng(2)
    worst = 0.0
    for _ in range(200):
        n = int(rng.integers(3, 40))
        k = int(rng.integers(1, n))
        sorted_vals = np.cumsum(0.1 + rng.random(n) * 0.4)
        x = rng.permutation(sorted_vals)
        sol = softtopk.forward(x, k, 1e-3)
        hard = np.zeros(n)
        hard[np.argsort(-x)[:k]] = 1.0
        worst = max(worst, np.abs(sol.y - hard).max())
    assert worst <= 1e-3

    tied = np.array([0.7, 0.7, 0.7, 0.1])
    picks = {tuple(layer.hard_mask(tied, 2)) for _ in range(10)}
    assert picks == {(0, 1)}
    print(f"\nPASS criterion 3: max deviation from hard selection {worst:.2e} "
          f"at tau=1e-3; ties resolve to lower indices deterministically")


def test_criterion_4_qmc_exactness_and_optimality():
    rng = np.random.default_rng(3)
    start = time.time()

    def brute_cover(t):
        out = set()
        for v in range(1 << t.k):
            bits = [(v >> i) & 1 for i in range(t.k)]
            ok, parity, want = True, 0, None
            for i, s in enumerate(t.symbols):
                if s in "01":
                    ok &= bits[i] == int(s)
                elif s in "^~":
                    parity ^= bits[i]
                    want = 1 if s == "^" else 0
            if ok and (want is None or parity == want):
                out.add(v)
        return out

    from test_logic import optimal_cover_cost

    cases = equiv_checked = opt_checked = 0
    while cases < 500:
        k = int(rng.integers(2, 7))
        use_xor = bool(rng.integers(0, 2))
        universe = 1 << k
        minterms = {v for v in range(universe) if rng.random() < rng.uniform(0.15, 0.75)}
        dcs = set()
        if rng.random() < 0.5:
            dcs = {v for v in range(universe) if v not in minterms and rng.random() < 0.3}
        if not minterms:
            continue
        cases += 1
        terms = logic.minimize(minterms, dcs, k, use_xor=use_xor)
        covered = set().union(*(brute_cover(t) for t in terms)) if terms else set()
        allowed = minterms | dcs
        assert minterms <= covered
        for t in terms:
            assert brute_cover(t) <= allowed
        for v in range(universe):
            if v not in dcs:
                assert (v in covered) == (v in minterms)
        equiv_checked += 1
        if k <= 4 and opt_checked < 200:
            got = sum(t.cost() for t in terms)
            assert got == optimal_cover_cost(minterms, dcs, k, use_xor)
            opt_checked += 1

    elapsed = time.time() - start
    assert elapsed < 60.0
    print(f"\nPASS criterion 4: {equiv_checked} random tables exactly equivalent; "
          f"{opt_checked} small tables at the exhaustive-optimal cost ({elapsed:.1f}s)")


def test_criterion_5_reference_node_conversion():
    w = np.array([-0.5, 1.7, -1.2, -2.2])
    minterms = {v for v in range(16)
                if sum(((v >> i) & 1) * w[i] for i in range(4)) - 0.4 > 0}
    assert minterms == {0b0010, 0b0011, 0b0110}  # patterns 0100, 1100, 0110
    terms = logic.minimize(minterms, set(), 4)
    assert sorted(str(t) for t in terms) == ["-100", "01-0"]
    print("\nPASS criterion 5: reference node yields minterms {0100,1100,0110} "
          "and DNF (x2 AND NOT x3 AND NOT x4) OR (NOT x1 AND x2 AND NOT x4)")


def test_criterion_6_rule_fidelity(desk, xor_runs):
    gaps = {}
    for name, runs in list(desk.items()) + [("xor", [xor_runs["main"]])]:
        for run in runs:
            model, full, rs = run["model"], run["full"], run["ruleset"]
            net, _ = M.model_forward(model, full.X)
            sym = logic.rule_eval_bits(rs, full.X)
            assert np.abs(sym - net).max() <= 1e-10
            if model.task == "binary":
                assert np.array_equal(sym > 0.5, net > 0.5)
            elif model.task == "multiclass":
                assert np.array_equal(sym.argmax(1), net.argmax(1))
            # test-split metric agreement between network and rules
            frame = run["frames"]["test"]
            if len(frame) == 0:
                continue
            data = transform(model.schema, frame)
            y = data.raw_targets if model.task == "regression" else data.y
            if model.task == "binary":
                a = metrics.roc_auc(M.model_forward(model, data.X)[0], y)
                b = metrics.roc_auc(logic.rule_eval_bits(rs, data.X), y)
            elif model.task == "multiclass":
                a = metrics.macro_ovr_auc(M.model_forward(model, data.X)[0], y)
                b = metrics.macro_ovr_auc(logic.rule_eval_bits(rs, data.X), y)
            else:
                a = metrics.r2(M.model_forward(model, data.X)[0], y)
                b = metrics.r2(logic.rule_eval_bits(rs, data.X), y)
            gaps[name] = max(gaps.get(name, 0.0), abs(a - b))
            assert abs(a - b) <= 1e-10, name
    print(f"\nPASS criterion 6: rules reproduce the network on 100% of rows for "
          f"every shipped dataset; worst metric gap {max(gaps.values()):.2e}")


def test_criterion_7_classification_reproduction(desk):
    lines = []
    for name, (min_auc, max_comp) in CLS_TARGETS.items():
        runs = desk[name]
        mean_auc = float(np.mean([r["test_metric"] for r in runs]))
        mean_comp = float(np.mean([r["complexity"] for r in runs]))
        max_time = max(r["elapsed"] for r in runs)
        assert mean_auc >= min_auc, f"{name}: {mean_auc:.4f} < {min_auc}"
        assert mean_comp <= max_comp, f"{name}: complexity {mean_comp:.1f} > {max_comp}"
        assert max_time < 300.0
        lines.append(f"{name} AUC={mean_auc:.4f} (>= {min_auc}) "
                     f"complexity={mean_comp:.1f} (<= {max_comp})")
    print("\nPASS criterion 7: " + "; ".join(lines))


def test_criterion_8_regression_reproduction(desk):
    lines = []
    for name, min_r2 in REG_TARGETS.items():
        runs = desk[name]
        mean_r2 = float(np.mean([r["test_metric"] for r in runs]))
        assert mean_r2 >= min_r2, f"{name}: {mean_r2:.4f} < {min_r2}"
        assert max(r["elapsed"] for r in runs) < 300.0
        lines.append(f"{name} R2={mean_r2:.4f} (>= {min_r2})")
    readme = (REPO / "README.md").read_text()
    for absent in ("covertype", "bank", "road_safety", "bike"):
        assert absent in readme, f"README must document that {absent} is not reproduced"
    print("\nPASS criterion 8: " + "; ".join(lines) +
          "; large-dataset rows documented as not reproduced")


def test_criterion_9_xor_capability(xor_runs):
    run = xor_runs["main"]
    model, full = run["model"], run["full"]
    pred, _ = M.model_forward(model, full.X)
    acc = float(np.mean((pred > 0.5) == full.y))
    assert acc == 1.0

    with_xor = logic.decision_formula(model, full, use_xor=True)
    assert [str(t) for t in with_xor] == ["^^"]
    plain = logic.decision_formula(xor_runs["no_xor"]["model"],
                                   xor_runs["no_xor"]["full"], use_xor=False)
    assert sorted(str(t) for t in plain) == ["01", "10"]
    print("\nPASS criterion 9: 1-node k=2 model solves XOR at accuracy 1.0; "
          "decision formula is a single XOR implicant (two-term DNF without merges)")


def test_criterion_10_pruning_behavior(desk):
    for name in list(CLS_TARGETS) + list(REG_TARGETS):
        for run in desk[name]:
            comps = [r["complexity"] for r in run["rounds"]]
            assert all(a >= b for a, b in zip(comps, comps[1:])), (name, comps)

    # redundant third input on the XOR toy is pruned while accuracy holds
    import pandas as pd
    rows = [(a, b, c, a ^ b) for a in (0, 1) for b in (0, 1) for c in (0, 1)]
    df = pd.DataFrame(rows, columns=["x0", "x1", "x2", "y"])
    specs = [encode.ColumnSpec(c, "continuous") for c in ("x0", "x1", "x2")] + \
            [encode.ColumnSpec("y", "categorical", "target")]
    schema = encode.fit_schema(df, specs, bits=1, task="binary")
    data = encode.transform(schema, df)
    cfg = M.TrainConfig(epochs=300, head_warmup_epochs=1500, n_nodes=1, k=3,
                        bits=1, val_fraction=0.0, batch_size=8, lr=0.05,
                        l1=1e-4, seed=1, prune_rounds=1, prune_fraction=0.34,
                        finetune_epochs=100)
    rng = np.random.default_rng(cfg.seed)
    model = M.new_model(schema, "binary", cfg, rng)
    M.train(model, data, cfg, rng)
    M.prune_finetune(model, data, cfg, rng)
    pred, _ = M.model_forward(model, data.X)
    assert model.pruned[2, 0]
    assert float(np.mean((pred > 0.5) == data.y)) == 1.0
    print("\nPASS criterion 10: complexity non-increasing across prune rounds on "
          "all acceptance datasets; redundant XOR input pruned at accuracy 1.0")


@pytest.fixture(scope="module")
def ablations(desk):
    out = {"noskip": {}, "bits": {}}
    for name in ("heart", "diabetes"):
        out["noskip"][name] = [_run(name, seed=s, skip=False) for s in range(3)]
    for bits in (6, 7):
        out["bits"][bits] = [_run("diabetes", seed=s, bits=bits) for s in range(3)]
    return out


def test_criterion_11_ablation_directions(desk, ablations):
    lines = []
    for name in ("heart", "diabetes"):
        def sel_val(run):
            sel = run["logs"]["prune"]["selected_round"]
            return run["rounds"][sel]["val_metric"]
        with_skip = np.mean([sel_val(r) for r in desk[name][:3]])
        without = np.mean([sel_val(r) for r in ablations["noskip"][name]])
        assert with_skip >= without, (name, with_skip, without)
        lines.append(f"{name} skip {with_skip:.4f} >= no-skip {without:.4f}")

    by_bits = {5: np.mean([r["test_metric"] for r in desk["diabetes"][:3]])}
    for bits in (6, 7):
        by_bits[bits] = np.mean([r["test_metric"] for r in ablations["bits"][bits]])
    spread = max(by_bits.values()) - min(by_bits.values())
    assert spread <= 0.03, by_bits
    lines.append(f"diabetes bits 5/6/7 AUC spread {spread:.4f} <= 0.03")
    print("\nPASS criterion 11: " + "; ".join(lines))
