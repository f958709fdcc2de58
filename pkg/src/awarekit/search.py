"""Bounded validity decisions by exhaustive countermodel search, plus
randomized soundness fuzzing.

``decide_bounded`` scans every model the bounds allow, in the same order
``enumerate_models`` yields them, and returns either the first falsifying
(model, point) or an explicit valid-up-to-bounds verdict.  Validity up to a
bound is all it ever claims; no finite sweep can promise more.

Internally the sweep groups models by skeleton (counts, presence,
partitions) and evaluates all valuations of a skeleton at once: each
subformula's truth at a pair becomes one big integer whose bit v says
"true under valuation v", so the per-valuation work collapses into wide
bitwise operations.  Every returned witness is re-verified against the
reference checker before it leaves this module.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence

from .checker import ModelEvaluator, satisfies
from .model import (
    Bounds,
    EpistemicModel,
    Point,
    _iter_skeletons,
    _iter_skeletons_wa,
    _materialize,
    _Skeleton,
    random_model,
)
from .proof import AXIOM_SCHEMAS, NON_TAUT_AXIOMS
from .syntax import (
    And,
    Atom,
    DeDicto,
    DeRe,
    Falsum,
    Formula,
    Implies,
    Know,
    MetaVar,
    Not,
    Or,
    atoms,
    instantiate,
    metavariables,
)

__all__ = [
    "ValidUpToBounds",
    "Countermodel",
    "Verdict",
    "FuzzViolation",
    "FuzzReport",
    "AtomNotInBoundsError",
    "decide_bounded",
    "find_countermodel",
    "fuzz_soundness",
    "random_formula",
]


@dataclass(frozen=True)
class ValidUpToBounds:
    """No countermodel exists within the bounds; models_checked were scanned."""

    bounds: Bounds
    models_checked: int


@dataclass(frozen=True)
class Countermodel:
    """A model and a present point at which the queried formula is false."""

    model: EpistemicModel
    point: Point


Verdict = ValidUpToBounds | Countermodel


class AtomNotInBoundsError(ValueError):
    def __init__(self, missing: set[str]):
        self.missing = missing
        super().__init__(
            f"formula atoms {sorted(missing)} are not covered by the bounds propositions"
        )


# ---------- the valuation-column engine ----------

_CHUNK_BITS = 16  # at most 2**16 valuations evaluated per pass


@lru_cache(maxsize=None)
def _pattern_column(bit: int, total_bits: int) -> int:
    """Counting pattern: bit v of the result is (v >> bit) & 1, v < 2**total_bits."""
    ones = 1 << bit
    period = ones << 1
    reps = 1 << (total_bits - bit - 1)
    unit = (1 << ones) - 1
    return (unit * (((1 << (period * reps)) - 1) // ((1 << period) - 1))) << ones


class _SkeletonSweep:
    """Evaluates formulas over every valuation of one skeleton at once."""

    def __init__(self, sk: _Skeleton, nprops: int):
        self.sk = sk
        W = sk.world_count
        self.pair_bits = sk.pair_bits()  # ascending = agent-major pair order
        self.m = len(self.pair_bits)
        self.nprops = nprops
        self.total_bits = nprops * self.m
        self.slot_of = {t: i for i, t in enumerate(self.pair_bits)}
        rows = [0] * sk.agent_count
        for t in self.pair_bits:
            a, w = divmod(t, W)
            rows[a] |= 1 << w
        agents_at: list[list[int]] = [[] for _ in range(W)]
        for t in self.pair_bits:
            a, w = divmod(t, W)
            agents_at[w].append(a)
        self.agents_at = agents_at
        # per agent: blocks as (member slot list, world mask)
        self.blocks: list[list[tuple[list[int], int]]] = []
        block_mask_at: dict[tuple[int, int], int] = {}
        for a, blocks in enumerate(sk.partitions):
            entries = []
            for blk in blocks:
                slots = [self.slot_of[a * W + u] for u in blk]
                wm = 0
                for u in blk:
                    wm |= 1 << u
                for u in blk:
                    block_mask_at[(a, u)] = wm
                entries.append((slots, wm))
            self.blocks.append(entries)
        # R witnesses per present (a, w): agents b at w covering a's block
        self.witness_slots: list[tuple[int, list[int]]] = []
        for t in self.pair_bits:
            a, w = divmod(t, W)
            blk = block_mask_at[(a, w)]
            cands = [
                self.slot_of[b * W + w]
                for b in agents_at[w]
                if blk & ~rows[b] == 0
            ]
            self.witness_slots.append((self.slot_of[t], cands))
        self.world_slots = [
            [self.slot_of[b * W + u] for b in agents_at[u]] for u in range(W)
        ]

    def chunks(self) -> Iterator[tuple[int, int, list[list[int]]]]:
        """Yield (start, width, leaf columns per prop per slot) for each chunk
        of the valuation space, ascending."""
        total = self.total_bits
        width = min(total, _CHUNK_BITS)
        n_chunks = 1 << (total - width) if total else 1
        full = (1 << (1 << width)) - 1
        for hi in range(n_chunks):
            cols: list[list[int]] = []
            for j in range(self.nprops):
                prop_cols = []
                for i in range(self.m):
                    t = (self.nprops - 1 - j) * self.m + i
                    if t < width:
                        prop_cols.append(_pattern_column(t, width))
                    else:
                        prop_cols.append(full if hi >> (t - width) & 1 else 0)
                cols.append(prop_cols)
            yield hi << width, width, cols

    def eval_chunk(
        self, f: Formula, prop_index: dict[str, int], cols: list[list[int]], width: int
    ) -> list[int]:
        """Column per pair slot: bit v set iff f holds at that pair under
        valuation (chunk start + v)."""
        full = (1 << (1 << width)) - 1
        zero = [0] * self.m
        memo: dict[int, list[int]] = {}

        def ev(node: Formula) -> list[int]:
            got = memo.get(id(node))
            if got is not None:
                return got
            if isinstance(node, Atom):
                out = cols[prop_index[node.name]]
            elif isinstance(node, Falsum):
                out = zero
            elif isinstance(node, Not):
                out = [full ^ c for c in ev(node.child)]
            elif isinstance(node, Implies):
                left, right = ev(node.left), ev(node.right)
                out = [(full ^ l) | r for l, r in zip(left, right)]
            elif isinstance(node, And):
                left, right = ev(node.left), ev(node.right)
                out = [l & r for l, r in zip(left, right)]
            elif isinstance(node, Or):
                left, right = ev(node.left), ev(node.right)
                out = [l | r for l, r in zip(left, right)]
            elif isinstance(node, Know):
                child = ev(node.child)
                out = [0] * self.m
                for entries in self.blocks:
                    for slots, _ in entries:
                        acc = full
                        for s in slots:
                            acc &= child[s]
                        for s in slots:
                            out[s] = acc
            elif isinstance(node, DeRe):
                child = ev(node.child)
                out = [0] * self.m
                for slot, cands in self.witness_slots:
                    acc = 0
                    for s in cands:
                        acc |= child[s]
                    out[slot] = acc
            elif isinstance(node, DeDicto):
                child = ev(node.child)
                inhabited = []
                for slots in self.world_slots:
                    acc = 0
                    for s in slots:
                        acc |= child[s]
                    inhabited.append(acc)
                out = [0] * self.m
                for entries in self.blocks:
                    for slots, wm in entries:
                        acc = full
                        u = 0
                        rest = wm
                        while rest:
                            if rest & 1:
                                acc &= inhabited[u]
                            rest >>= 1
                            u += 1
                        for s in slots:
                            out[s] = acc
            elif isinstance(node, MetaVar):
                raise ValueError(f"cannot search a schema; metavariable {node.name} is unbound")
            else:
                raise TypeError(f"not a formula node: {node!r}")
            memo[id(node)] = out
            return out

        return ev(f)

    def first_failure(self, f: Formula, props: Sequence[str]) -> int | None:
        """Lowest valuation index at which f fails somewhere, else None."""
        prop_index = {p: j for j, p in enumerate(props)}
        for start, width, cols in self.chunks():
            full = (1 << (1 << width)) - 1
            result = self.eval_chunk(f, prop_index, cols, width)
            ok = full
            for c in result:
                ok &= c
            failing = full ^ ok
            if failing:
                return start + ((failing & -failing).bit_length() - 1)
        return None

    def model_at(self, valuation_index: int, props: Sequence[str]) -> EpistemicModel:
        masks = []
        for j in range(self.nprops):
            compact = (valuation_index >> ((self.nprops - 1 - j) * self.m)) & (
                (1 << self.m) - 1
            )
            mask = 0
            for i, t in enumerate(self.pair_bits):
                if compact >> i & 1:
                    mask |= 1 << t
            masks.append(mask)
        return _materialize(self.sk, tuple(masks), tuple(props))

    @property
    def valuation_count(self) -> int:
        return 1 << self.total_bits


# ---------- bounded decisions ----------


def _scan(
    f: Formula, bounds: Bounds, prune: bool
) -> tuple[int, tuple[EpistemicModel, Point] | None]:
    checked = 0
    for sk in _iter_skeletons(bounds, prune):
        sweep = _SkeletonSweep(sk, len(bounds.props))
        hit = sweep.first_failure(f, bounds.props)
        if hit is None:
            checked += sweep.valuation_count
            continue
        checked += hit
        model = sweep.model_at(hit, bounds.props)
        point = ModelEvaluator(model).first_failure(f)
        if point is None or satisfies(model, point, f):
            raise AssertionError(
                "search engine and reference checker disagree; please report"
            )
        return checked, (model, point)
    return checked, None


def decide_bounded(
    f: Formula, bounds: Bounds, prune: bool = False, threads: int = 1
) -> Verdict:
    """Scan every model within the bounds for a falsifying point.

    Returns the first countermodel in enumeration order, re-verified by the
    reference checker, or ValidUpToBounds carrying the number of models
    scanned.  With prune=True, relabeling-equivalent skeletons are skipped;
    the verdict kind never changes but the witness and the count may.
    threads > 1 shards the scan by (world count, agent count) while keeping
    the merged outcome identical to the sequential one.
    """
    missing = atoms(f) - set(bounds.props)
    if missing:
        raise AtomNotInBoundsError(missing)
    if threads > 1:
        return _decide_sharded(f, bounds, prune, threads)
    checked, hit = _scan(f, bounds, prune)
    if hit is None:
        return ValidUpToBounds(bounds, checked)
    return Countermodel(*hit)


def _decide_sharded(f: Formula, bounds: Bounds, prune: bool, threads: int) -> Verdict:
    from concurrent.futures import ThreadPoolExecutor

    shards = [
        Bounds(w, a, bounds.props)
        for w in range(1, bounds.max_worlds + 1)
        for a in range(1, bounds.max_agents + 1)
    ]

    def run(shard: Bounds):
        checked = 0
        for sk in _iter_skeletons_wa(shard.max_worlds, shard.max_agents, prune):
            sweep = _SkeletonSweep(sk, len(shard.props))
            hit = sweep.first_failure(f, shard.props)
            if hit is None:
                checked += sweep.valuation_count
                continue
            checked += hit
            model = sweep.model_at(hit, shard.props)
            point = ModelEvaluator(model).first_failure(f)
            return checked, (model, point)
        return checked, None

    with ThreadPoolExecutor(max_workers=threads) as pool:
        results = list(pool.map(run, shards))
    total = 0
    for (w, a), (checked, hit) in zip(
        ((s.max_worlds, s.max_agents) for s in shards), results
    ):
        total += checked
        if hit is not None:
            model, point = hit
            if point is None or satisfies(model, point, f):
                raise AssertionError(
                    "search engine and reference checker disagree; please report"
                )
            return Countermodel(model, point)
    return ValidUpToBounds(bounds, total)


def find_countermodel(
    f: Formula, bounds: Bounds, prune: bool = False, threads: int = 1
) -> tuple[EpistemicModel, Point] | None:
    """The Countermodel payload of decide_bounded, or None when valid."""
    verdict = decide_bounded(f, bounds, prune, threads)
    if isinstance(verdict, Countermodel):
        return verdict.model, verdict.point
    return None


# ---------- soundness fuzzing ----------


@dataclass(frozen=True)
class FuzzViolation:
    model: EpistemicModel
    point: Point
    schema_id: str
    substitution: dict[str, Formula]


@dataclass(frozen=True)
class FuzzReport:
    trials: int
    schema_instances_checked: int
    violations: tuple[FuzzViolation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


_NODE_KINDS = ("atom", "false", "not", "implies", "and", "or", "K", "R", "D")
_LEAF_KINDS = ("atom", "false")


def random_formula(rng: random.Random, props: Sequence[str], max_depth: int) -> Formula:
    """Random formula over props, uniform over node kinds, depth-bounded."""
    kind = rng.choice(_LEAF_KINDS if max_depth <= 0 else _NODE_KINDS)
    if kind == "atom":
        return Atom(rng.choice(list(props)))
    if kind == "false":
        return Falsum()
    if kind == "not":
        return Not(random_formula(rng, props, max_depth - 1))
    if kind == "K":
        return Know(random_formula(rng, props, max_depth - 1))
    if kind == "R":
        return DeRe(random_formula(rng, props, max_depth - 1))
    if kind == "D":
        return DeDicto(random_formula(rng, props, max_depth - 1))
    left = random_formula(rng, props, max_depth - 1)
    right = random_formula(rng, props, max_depth - 1)
    if kind == "implies":
        return Implies(left, right)
    if kind == "and":
        return And(left, right)
    return Or(left, right)


def default_fuzz_schemas() -> list[tuple[str, Formula]]:
    """The ten non-tautology axiom schemas, keyed by their keyword."""
    return [(ax.value, AXIOM_SCHEMAS[ax]) for ax in NON_TAUT_AXIOMS]


def fuzz_soundness(
    trials: int,
    seed: int,
    bounds: Bounds,
    pool_depth: int,
    instances_per_schema: int = 10,
    schemas: list[tuple[str, Formula]] | None = None,
) -> FuzzReport:
    """Check axiom-schema instances on random models, at every present point.

    Each trial draws one random model; each schema gets instances_per_schema
    random substitutions from a formula pool of the given depth over the
    bounds propositions.  Deterministic in (trials, seed, bounds,
    pool_depth).  A violation records the model, the first failing point,
    the schema, and the substitution; on a sound axiom set the report is
    expected to stay empty.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if schemas is None:
        schemas = default_fuzz_schemas()
    rng = random.Random(seed)
    checked = 0
    violations: list[FuzzViolation] = []
    for _ in range(trials):
        model = random_model(rng.getrandbits(64), bounds)
        evaluator = ModelEvaluator(model)
        for schema_id, schema in schemas:
            mvs = sorted(metavariables(schema))
            for _ in range(instances_per_schema):
                subst = {mv: random_formula(rng, bounds.props, pool_depth) for mv in mvs}
                instance = instantiate(schema, subst)
                checked += 1
                point = evaluator.first_failure(instance)
                if point is not None:
                    violations.append(FuzzViolation(model, point, schema_id, subst))
    return FuzzReport(trials, checked, tuple(violations))
