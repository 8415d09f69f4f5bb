"""Exact symbolic rule extraction from a trained model.

Every node is a threshold function over its k frozen inputs, so its full
truth table is recovered by enumerating all 2^k assignments. Input patterns
that never occur in the supplied data become don't-care rows, which the
minimizer may assign either way. Tables are then reduced to two-level
formulas by Quine-McCluskey, extended with parity merges: a pair of product
terms whose covers differ as complements on a set of positions collapses
into a single XOR/XNOR term.

Assignment integers use bit i for the i-th entry of the node's ascending
sorted input map. An implicant stores one symbol per position: '0'/'1' for
fixed literals, '-' for free positions, '^'/'~' for members of the single
parity group (XOR of the marked positions equals 1 for '^', 0 for '~').
"""

from __future__ import annotations

import functools
import json
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from .encode import BitDataset, EncodingSchema, destandardize, literal, transform
from .errors import InvalidInputError, InvalidStateError
from .model import RuleModel, _activate

SYM_FIXED = ("0", "1")
SYM_DASH = "-"
SYM_XOR = "^"
SYM_XNOR = "~"
# Canonical ordering: implicants fixing lower positions sort first.
_SYM_RANK = {"0": 0, "1": 1, SYM_XOR: 2, SYM_XNOR: 3, SYM_DASH: 4}

XOR_GLYPH = "⊕"
XNOR_GLYPH = "⊙"


@dataclass(frozen=True)
class Term:
    """One implicant: a conjunction of literals plus an optional parity group."""

    symbols: tuple[str, ...]

    def __post_init__(self):
        par = [s for s in self.symbols if s in (SYM_XOR, SYM_XNOR)]
        if par and (len(par) < 2 or len(set(par)) > 1):
            raise InvalidInputError(
                f"parity symbols must appear jointly (>=2, one type): {self.symbols}"
            )

    @property
    def k(self) -> int:
        return len(self.symbols)

    @property
    def fixed_positions(self) -> tuple[int, ...]:
        return tuple(i for i, s in enumerate(self.symbols) if s in SYM_FIXED)

    @property
    def parity_positions(self) -> tuple[int, ...]:
        return tuple(i for i, s in enumerate(self.symbols) if s in (SYM_XOR, SYM_XNOR))

    @property
    def parity_value(self) -> int | None:
        for s in self.symbols:
            if s == SYM_XOR:
                return 1
            if s == SYM_XNOR:
                return 0
        return None

    def cover(self) -> frozenset[int]:
        return _cover(self.symbols)

    def cost(self) -> int:
        """Reading cost: 1 per fixed literal, 2 per parity position."""
        return len(self.fixed_positions) + 2 * len(self.parity_positions)

    def key(self) -> tuple:
        return tuple(_SYM_RANK[s] for s in self.symbols)

    def __str__(self) -> str:
        return "".join(self.symbols)


@functools.lru_cache(maxsize=200_000)
def _cover(symbols: tuple[str, ...]) -> frozenset[int]:
    k = len(symbols)
    bits = _bits_table(k)
    ok = np.ones(1 << k, dtype=bool)
    parity = np.zeros(1 << k, dtype=np.uint8)
    want_parity = None
    for i, s in enumerate(symbols):
        if s in SYM_FIXED:
            ok &= bits[:, i] == int(s)
        elif s in (SYM_XOR, SYM_XNOR):
            parity ^= bits[:, i]
            want_parity = 1 if s == SYM_XOR else 0
    if want_parity is not None:
        ok &= parity == want_parity
    return frozenset(np.nonzero(ok)[0].tolist())


@functools.lru_cache(maxsize=24)
def _bits_table(k: int) -> np.ndarray:
    v = np.arange(1 << k, dtype=np.int64)
    return ((v[:, None] >> np.arange(k)) & 1).astype(np.uint8)


def _int_to_term(v: int, k: int) -> Term:
    return Term(tuple(str((v >> i) & 1) for i in range(k)))


def _merge_standard(a: Term, b: Term) -> Term | None:
    """Replace one differing 0/1 position with '-' when all else matches."""
    diff = [i for i, (x, y) in enumerate(zip(a.symbols, b.symbols)) if x != y]
    if len(diff) != 1:
        return None
    i = diff[0]
    if a.symbols[i] in SYM_FIXED and b.symbols[i] in SYM_FIXED:
        syms = list(a.symbols)
        syms[i] = SYM_DASH
        return Term(tuple(syms))
    return None


def _merge_parity_new(a: Term, b: Term) -> Term | None:
    """Two plain cubes differing in exactly two 0/1 positions form a parity pair."""
    if a.parity_positions or b.parity_positions:
        return None
    diff = [i for i, (x, y) in enumerate(zip(a.symbols, b.symbols)) if x != y]
    if len(diff) != 2:
        return None
    if not all(a.symbols[i] in SYM_FIXED and b.symbols[i] in SYM_FIXED for i in diff):
        return None
    value = int(a.symbols[diff[0]]) ^ int(a.symbols[diff[1]])
    sym = SYM_XOR if value == 1 else SYM_XNOR
    syms = list(a.symbols)
    for i in diff:
        syms[i] = sym
    return Term(tuple(syms))


def _merge_parity_grow(a: Term, b: Term) -> Term | None:
    """Absorb one more fixed position into an existing parity group.

    Needs identical dashes and fixed symbols except one position p (0 vs 1),
    and the same parity positions carrying opposite types; the union is a
    parity constraint over group + {p}.
    """
    pa, pb = a.parity_positions, b.parity_positions
    if not pa or pa != pb:
        return None
    va, vb = a.parity_value, b.parity_value
    if va == vb:
        return None
    diff = [i for i, (x, y) in enumerate(zip(a.symbols, b.symbols))
            if x != y and i not in pa]
    if len(diff) != 1:
        return None
    p = diff[0]
    if not (a.symbols[p] in SYM_FIXED and b.symbols[p] in SYM_FIXED):
        return None
    value = va ^ int(a.symbols[p])
    sym = SYM_XOR if value == 1 else SYM_XNOR
    syms = [sym if (i in pa or i == p) else s for i, s in enumerate(a.symbols)]
    return Term(tuple(syms))


def get_prime_implicants(terms: set[int], k: int, use_xor: bool = True) -> list[Term]:
    """All maximal implicants over the given on-set (minterms plus don't-cares).

    Classic merge of Hamming-distance-1 pairs, plus (when use_xor) the parity
    merges above. Only a standard merge subsumes its parents: widening a cube
    never raises the reading cost, so the parent is dominated. A parity merge
    covers more but costs more, so its parents stay live as candidates;
    without this the minimum-cost cover can be missed. Merges only combine
    same-size covers, so the level loop terminates.
    """
    current = {_int_to_term(v, k) for v in terms}
    primes: set[Term] = set()
    while current:
        ordered = sorted(current, key=Term.key)
        ones = [sum(1 for s in t.symbols if s == "1") for t in ordered]
        merged_away: set[Term] = set()
        nxt: set[Term] = set()
        for i, a in enumerate(ordered):
            for j in range(i + 1, len(ordered)):
                if abs(ones[j] - ones[i]) > 2:
                    continue
                b = ordered[j]
                m = _merge_standard(a, b)
                if m is not None:
                    nxt.add(m)
                    merged_away.add(a)
                    merged_away.add(b)
                elif use_xor:
                    m = _merge_parity_new(a, b) or _merge_parity_grow(a, b)
                    if m is not None:
                        nxt.add(m)
        primes |= current - merged_away
        current = nxt - primes
    return sorted(primes, key=Term.key)


def minimize(minterms: set[int], dont_cares: set[int], k: int,
             use_xor: bool = True) -> list[Term]:
    """Minimal-cost implicant list covering the minterms.

    The result covers every minterm, covers nothing outside minterms plus
    don't-cares, and contains no term whose removal keeps the cover intact.
    Don't-cares never make an implicant essential. After essential
    extraction, remaining rows are covered by an exact minimum-cost search
    on small charts (greedy on large ones: most uncovered minterms, then
    lowest cost, then canonical order); pairs subsumed by a single prime at
    no extra cost are combined, and redundant terms are dropped costliest
    first.
    """
    minterms = {int(v) for v in minterms}
    dont_cares = {int(v) for v in dont_cares}
    if minterms & dont_cares:
        raise InvalidInputError("minterms and don't-cares overlap")
    bound = 1 << k
    if any(not 0 <= v < bound for v in minterms | dont_cares):
        raise InvalidInputError(f"term outside [0, 2^{k})")
    if not minterms:
        return []

    primes = get_prime_implicants(minterms | dont_cares, k, use_xor)
    primes = [p for p in primes if p.cover() & minterms]

    def real_cover(t: Term) -> frozenset[int]:
        return t.cover() & minterms

    # Essential implicants: sole coverers of some real minterm.
    selected: list[Term] = []
    for v in sorted(minterms):
        coverers = [p for p in primes if v in p.cover()]
        if len(coverers) == 1 and coverers[0] not in selected:
            selected.append(coverers[0])

    covered = set().union(*(real_cover(t) for t in selected)) if selected else set()
    uncovered = minterms - covered
    if uncovered:
        cands = sorted((p for p in primes
                        if p not in selected and p.cover() & uncovered),
                       key=lambda p: (p.cost(), p.key()))
        if len(cands) <= EXACT_COVER_LIMIT and len(uncovered) <= EXACT_COVER_ROWS:
            selected += _min_cost_cover(cands, frozenset(uncovered))
        else:
            # charts too large for exact search fall back to greedy selection
            while uncovered:
                best = max(cands, key=lambda p: (len(p.cover() & uncovered),
                                                 -p.cost(),
                                                 tuple(-r for r in p.key())))
                if not best.cover() & uncovered:
                    raise InvalidStateError("prime implicants fail to cover a minterm")
                selected.append(best)
                uncovered -= best.cover()

    # Orthogonal combination: replace a pair by one prime covering the union
    # of their real covers at no extra cost.
    changed = True
    while changed:
        changed = False
        for i in range(len(selected)):
            for j in range(i + 1, len(selected)):
                union = real_cover(selected[i]) | real_cover(selected[j])
                budget = selected[i].cost() + selected[j].cost()
                cands = [p for p in primes
                         if p not in selected and real_cover(p) >= union
                         and p.cost() <= budget]
                if cands:
                    m = min(cands, key=lambda p: (p.cost(), p.key()))
                    kept = [t for idx, t in enumerate(selected) if idx not in (i, j)]
                    selected = kept + [m]
                    changed = True
                    break
            if changed:
                break

    # Redundancy elimination, costliest removable term first.
    while True:
        redundant = []
        for t in selected:
            others = set().union(*(real_cover(o) for o in selected if o is not t)) \
                if len(selected) > 1 else set()
            if real_cover(t) <= others:
                redundant.append(t)
        if not redundant:
            break
        worst = max(redundant, key=lambda t: (t.cost(), tuple(-r for r in t.key())))
        selected.remove(worst)

    return sorted(selected, key=Term.key)


# Bounds past which the exact set-cover search hands over to greedy. 16 rows
# keeps every k <= 4 chart (and most sparse larger ones) exact while bounding
# the memoized state space.
EXACT_COVER_LIMIT = 200
EXACT_COVER_ROWS = 16


def _min_cost_cover(cands: list[Term], uncovered: frozenset[int]) -> list[Term]:
    """Minimum total-cost subset of cands covering every row.

    Memoized recursion on the set of still-uncovered rows, always branching
    on the lowest one. Deterministic: candidates arrive sorted by
    (cost, canonical order) and ties prefer fewer terms, then earlier
    candidates.
    """
    rows = sorted(uncovered)
    row_pos = {v: i for i, v in enumerate(rows)}
    masks = []
    reachable = 0
    for t in cands:
        m = 0
        for v in t.cover():
            if v in row_pos:
                m |= 1 << row_pos[v]
        masks.append(m)
        reachable |= m
    if reachable != (1 << len(rows)) - 1:
        raise InvalidStateError("prime implicants fail to cover a minterm")

    memo: dict[int, tuple] = {0: (0, 0, ())}

    def solve(unc: int) -> tuple:
        hit = memo.get(unc)
        if hit is not None:
            return hit
        pivot = unc & -unc
        best = (np.inf, np.inf, ())
        for i, mask in enumerate(masks):
            if mask & pivot:
                sub = solve(unc & ~mask)
                total = (cands[i].cost() + sub[0], 1 + sub[1], (i,) + sub[2])
                if (total[0], total[1]) < (best[0], best[1]):
                    best = total
        memo[unc] = best
        return best

    _, _, chosen = solve((1 << len(rows)) - 1)
    return [cands[i] for i in chosen]


@dataclass
class TruthTable:
    """Full enumeration of one node plus the data-derived don't-care rows."""

    k: int
    minterms: set[int]
    dont_cares: set[int]
    input_map: list[int]
    node: int = -1

    def __post_init__(self):
        if self.minterms & self.dont_cares:
            raise InvalidInputError("minterms and don't-cares overlap")


def enumerate_truth_table(model: RuleModel, node: int) -> TruthTable:
    """Brute-force the node's threshold function over its frozen inputs."""
    if model.layer.frozen_masks is None:
        raise InvalidStateError("masks must be frozen before truth-table enumeration")
    input_map = sorted(int(i) for i in model.layer.frozen_masks[:, node])
    k = len(input_map)
    if k > 16:
        raise InvalidInputError(f"fan-in {k} exceeds the 16-input enumeration cap")
    w = model.layer.logic[input_map, node]
    b = model.layer.bias[node]
    z = _bits_table(k).astype(np.float64) @ w + b
    minterms = set(np.nonzero(z > 0)[0].tolist())
    return TruthTable(k=k, minterms=minterms, dont_cares=set(),
                      input_map=input_map, node=node)


def observed_patterns(dataset: BitDataset | np.ndarray, input_map: list[int]) -> set[int]:
    """Projected k-bit patterns that occur in at least one data row."""
    X = dataset.X if isinstance(dataset, BitDataset) else np.asarray(dataset)
    proj = X[:, input_map].astype(np.int64)
    packed = proj @ (1 << np.arange(len(input_map), dtype=np.int64))
    return set(np.unique(packed).tolist())


def export_pla(tt: TruthTable) -> str:
    """One line per assignment: k bits (position 0 first), space, output 0/1/-."""
    lines = []
    for v in range(1 << tt.k):
        bits = "".join(str((v >> i) & 1) for i in range(tt.k))
        out = "-" if v in tt.dont_cares else ("1" if v in tt.minterms else "0")
        lines.append(f"{bits} {out}")
    return "\n".join(lines) + "\n"


@dataclass
class Predictor:
    """One weighted entry of the extracted rule set."""

    kind: str  # "literal" | "rule"
    weights: np.ndarray  # (C,)
    bit: int | None = None
    node: int | None = None
    input_map: list[int] = field(default_factory=list)
    terms: list[Term] = field(default_factory=list)
    form: str = "dnf"

    def truth_vector(self) -> np.ndarray:
        """Boolean output for every assignment of the input map."""
        k = len(self.input_map)
        acc = np.zeros(1 << k, dtype=bool)
        for t in self.terms:
            acc[list(t.cover())] = True
        return ~acc if self.form == "cnf" else acc


@dataclass
class RuleSet:
    task: str
    schema: EncodingSchema
    predictors: list[Predictor]
    intercepts: np.ndarray  # (C,)
    form: str = "dnf"
    use_xor: bool = True

    @property
    def n_outputs(self) -> int:
        return int(self.intercepts.shape[0])


def _node_formula(tt: TruthTable, form: str, use_xor: bool) -> list[Term]:
    if form == "dnf":
        return minimize(tt.minterms, tt.dont_cares, tt.k, use_xor)
    if form == "cnf":
        universe = set(range(1 << tt.k))
        off = universe - tt.minterms - tt.dont_cares
        return minimize(off, tt.dont_cares, tt.k, use_xor)
    raise InvalidInputError(f"unknown formula form '{form}'")


def extract_rules(model: RuleModel, dataset: BitDataset, form: str = "dnf",
                  use_xor: bool = True) -> RuleSet:
    """Convert the trained network into an exactly equivalent weighted rule set.

    Skip bits with any nonzero class weight become one-literal predictors.
    Each surviving node is enumerated, don't-cares are mined from the given
    data, and the table is minimized (CNF minimizes the observed complement
    and negates). Nodes whose formula is constant fold into the intercepts.
    The rule set reproduces the network's output on every row whose projected
    patterns occur in the extraction data.
    """
    if model.layer.frozen_masks is None:
        raise InvalidStateError("masks must be frozen before rule extraction")
    if dataset.n_bits != model.n_bits:
        raise InvalidInputError("extraction dataset width does not match the model")

    predictors: list[Predictor] = []
    intercepts = model.cls_b.astype(np.float64).copy()

    if model.skip:
        for bit in range(model.n_bits):
            w = model.cls_w[:, bit]
            if np.any(w != 0):
                predictors.append(Predictor(kind="literal", weights=w.copy(), bit=bit))

    node_offset = model.n_bits if model.skip else 0
    for j in range(model.n_nodes):
        w = model.cls_w[:, node_offset + j]
        if not np.any(w != 0):
            continue
        tt = enumerate_truth_table(model, j)
        observed = observed_patterns(dataset, tt.input_map)
        tt.dont_cares = set(range(1 << tt.k)) - observed
        tt.minterms &= observed  # unobserved rows may take either value
        terms = _node_formula(tt, form, use_xor)
        pred = Predictor(kind="rule", weights=w.copy(), node=j,
                         input_map=tt.input_map, terms=terms, form=form)
        tv = pred.truth_vector()
        if tv.all():
            intercepts += w
            continue
        if not tv.any():
            continue
        predictors.append(pred)

    return RuleSet(task=model.task, schema=model.schema, predictors=predictors,
                   intercepts=intercepts, form=form, use_xor=use_xor)


def _predictor_activations(ruleset: RuleSet, X: np.ndarray) -> np.ndarray:
    """(rows, predictors) 0/1 activation matrix on encoded bits."""
    acts = np.empty((X.shape[0], len(ruleset.predictors)))
    for idx, pred in enumerate(ruleset.predictors):
        if pred.kind == "literal":
            acts[:, idx] = X[:, pred.bit]
        else:
            packed = X[:, pred.input_map].astype(np.int64) @ \
                (1 << np.arange(len(pred.input_map), dtype=np.int64))
            acts[:, idx] = pred.truth_vector()[packed]
    return acts


def rule_eval_bits(ruleset: RuleSet, X: np.ndarray):
    """Evaluate the rule set on encoded rows; same output type as the network."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    logits = np.tile(ruleset.intercepts, (X.shape[0], 1))
    if ruleset.predictors:
        acts = _predictor_activations(ruleset, X)
        weights = np.stack([p.weights for p in ruleset.predictors])  # (P, C)
        logits = logits + acts @ weights
    pred = _activate(ruleset.task, logits)
    if ruleset.task == "regression":
        pred = destandardize(ruleset.schema, pred)
    return pred


def rule_eval(ruleset: RuleSet, rows: pd.DataFrame):
    """Encode raw rows with the rule set's schema and evaluate."""
    data = transform(ruleset.schema, rows, with_targets=False)
    return rule_eval_bits(ruleset, data.X)


def formula_operators(terms: list[Term]) -> int:
    """Binary operator count of a two-level formula; negations are free."""
    total = max(len(terms) - 1, 0)
    for t in terms:
        n_par = len(t.parity_positions)
        conjuncts = len(t.fixed_positions) + (1 if n_par else 0)
        total += max(conjuncts - 1, 0) + max(n_par - 1, 0)
    return total


def complexity(ruleset: RuleSet) -> int:
    """Number of weighted predictors plus Boolean operators across formulas.

    A predictor weighted nonzero for any class counts exactly once.
    """
    total = len(ruleset.predictors)
    for pred in ruleset.predictors:
        if pred.kind == "rule":
            total += formula_operators(pred.terms)
    return total


def _term_text(schema: EncodingSchema, input_map: list[int], t: Term,
               negate: bool = False) -> str:
    """Render one term; negate=True renders the De Morgan complement clause."""
    parts = []
    for pos in t.fixed_positions:
        positive = (t.symbols[pos] == "1") != negate
        parts.append(literal(schema, input_map[pos],
                             "positive" if positive else "negative"))
    if t.parity_positions:
        value = t.parity_value if not negate else 1 - t.parity_value
        glyph = XOR_GLYPH if value == 1 else XNOR_GLYPH
        lits = [literal(schema, input_map[pos], "positive")
                for pos in t.parity_positions]
        parts.append("(" + f" {glyph} ".join(lits) + ")")
    joiner = " ∨ " if negate else " ∧ "
    body = joiner.join(parts)
    return f"({body})" if len(parts) > 1 else body


def formula_text(schema: EncodingSchema, input_map: list[int],
                 terms: list[Term], form: str = "dnf") -> str:
    if not terms:
        return "false" if form == "dnf" else "true"
    if form == "dnf":
        return " ∨ ".join(_term_text(schema, input_map, t) for t in terms)
    return " ∧ ".join(_term_text(schema, input_map, t, negate=True)
                           for t in terms)


def predictor_text(ruleset: RuleSet, pred: Predictor) -> str:
    if pred.kind == "literal":
        return literal(ruleset.schema, pred.bit, "positive")
    return formula_text(ruleset.schema, pred.input_map, pred.terms, pred.form)


def _weight_text(ruleset: RuleSet, weights: np.ndarray) -> str:
    if ruleset.task == "multiclass":
        parts = [f"Class {c}: {w:.4f}" for c, w in enumerate(weights) if w != 0]
        return ", ".join(parts) if parts else "0"
    return f"{weights[0]:.4f}"


def render(ruleset: RuleSet) -> str:
    """Human-readable listing, strongest predictors first."""
    order = sorted(range(len(ruleset.predictors)),
                   key=lambda i: (-np.max(np.abs(ruleset.predictors[i].weights)), i))
    lines = [f"task: {ruleset.task}",
             f"form: {ruleset.form}",
             f"complexity: {complexity(ruleset)}",
             ""]
    for i in order:
        pred = ruleset.predictors[i]
        lines.append(f"{_weight_text(ruleset, pred.weights)} -- {predictor_text(ruleset, pred)}")
    if ruleset.task == "multiclass":
        bias = ", ".join(f"Class {c}: {b:.4f}" for c, b in enumerate(ruleset.intercepts))
    else:
        bias = f"{ruleset.intercepts[0]:.4f}"
    lines.append(f"(Bias: {bias})")
    return "\n".join(lines) + "\n"


def ruleset_to_dict(ruleset: RuleSet) -> dict:
    return {
        "task": ruleset.task,
        "form": ruleset.form,
        "use_xor": ruleset.use_xor,
        "complexity": complexity(ruleset),
        "intercepts": ruleset.intercepts.tolist(),
        "schema": ruleset.schema.to_dict(),
        "predictors": [
            {
                "kind": p.kind,
                "bit": p.bit,
                "node": p.node,
                "input_map": list(p.input_map),
                "terms": [str(t) for t in p.terms],
                "weights": p.weights.tolist(),
                "text": predictor_text(ruleset, p),
            }
            for p in ruleset.predictors
        ],
    }


def serialize_rules(ruleset: RuleSet) -> str:
    return json.dumps(ruleset_to_dict(ruleset), sort_keys=True, indent=1)


def ruleset_from_dict(d: dict) -> RuleSet:
    schema = EncodingSchema.from_dict(d["schema"])
    preds = [
        Predictor(
            kind=p["kind"],
            weights=np.array(p["weights"], dtype=np.float64),
            bit=p["bit"],
            node=p["node"],
            input_map=list(p["input_map"]),
            terms=[Term(tuple(s)) for s in p["terms"]],
            form=d["form"],
        )
        for p in d["predictors"]
    ]
    return RuleSet(task=d["task"], schema=schema, predictors=preds,
                   intercepts=np.array(d["intercepts"], dtype=np.float64),
                   form=d["form"], use_xor=d["use_xor"])


def load_rules(path) -> RuleSet:
    with open(path) as fh:
        return ruleset_from_dict(json.load(fh))


def decision_formula(model: RuleModel, dataset: BitDataset,
                     use_xor: bool = True, max_bits: int = 16) -> list[Term] | None:
    """Whole-model Boolean synthesis for binary tasks over few input bits.

    Enumerates every input assignment, takes the rows the network maps to
    probability > 0.5 as minterms, treats unobserved assignments as
    don't-cares, and minimizes. None when the task or width does not allow it.
    """
    if model.task != "binary" or model.n_bits > max_bits:
        return None
    from .model import model_forward  # local: avoids cycle at import time
    n = model.n_bits
    assignments = _bits_table(n).astype(np.float64)
    probs, _ = model_forward(model, assignments)
    minterms = set(np.nonzero(probs > 0.5)[0].tolist())
    observed = observed_patterns(dataset, list(range(n)))
    dont_cares = set(range(1 << n)) - observed
    return minimize(minterms - dont_cares, dont_cares, n, use_xor)
