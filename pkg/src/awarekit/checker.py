"""Satisfaction of formulas at (world, agent) points of an epistemic model.

Two engines live here.  ``satisfies`` is the reference recursion, memoized
per query on (world, agent, subformula identity); ``satisfies_naive`` is
the same recursion without the cache, kept for oracle testing.
``ModelEvaluator`` computes the whole extension of a formula bottom-up with
pair bitmasks and backs ``valid_in_model``/``extension`` so sweeps over
many points or many formulas stay cheap.
"""

from __future__ import annotations

from .model import AgentNotPresentError, EpistemicModel, Point
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
    render,
)

__all__ = [
    "satisfies",
    "satisfies_naive",
    "valid_in_model",
    "extension",
    "explain",
    "ModelEvaluator",
]


def _check_point(m: EpistemicModel, pt: Point):
    if not 0 <= pt.agent < m.agent_count:
        raise IndexError(f"agent index {pt.agent} out of range")
    if not 0 <= pt.world < m.world_count:
        raise IndexError(f"world index {pt.world} out of range")
    if (pt.agent, pt.world) not in m.presence:
        raise AgentNotPresentError(pt.agent, pt.world)


def _eval(m: EpistemicModel, w: int, a: int, f: Formula, memo: dict | None) -> bool:
    if memo is not None:
        key = (w, a, id(f))
        cached = memo.get(key)
        if cached is not None:
            return cached
    if isinstance(f, Atom):
        value = (a, w) in m.valuation.get(f.name, frozenset())
    elif isinstance(f, Falsum):
        value = False
    elif isinstance(f, Not):
        value = not _eval(m, w, a, f.child, memo)
    elif isinstance(f, Implies):
        value = (not _eval(m, w, a, f.left, memo)) or _eval(m, w, a, f.right, memo)
    elif isinstance(f, And):
        value = _eval(m, w, a, f.left, memo) and _eval(m, w, a, f.right, memo)
    elif isinstance(f, Or):
        value = _eval(m, w, a, f.left, memo) or _eval(m, w, a, f.right, memo)
    elif isinstance(f, Know):
        value = all(_eval(m, u, a, f.child, memo) for u in m.block(a, w))
    elif isinstance(f, DeRe):
        blk = m.block(a, w)
        row = m._rows
        value = any(
            all(u in row[b] for u in blk) and _eval(m, w, b, f.child, memo)
            for b in m._agents_at[w]
        )
    elif isinstance(f, DeDicto):
        value = all(
            any(_eval(m, u, b, f.child, memo) for b in m._agents_at[u])
            for u in m.block(a, w)
        )
    elif isinstance(f, MetaVar):
        raise ValueError(f"cannot evaluate a schema; metavariable {f.name} is unbound")
    else:
        raise TypeError(f"not a formula node: {f!r}")
    if memo is not None:
        memo[key] = value
    return value


def satisfies(m: EpistemicModel, pt: Point, f: Formula) -> bool:
    """Does f hold at the point?  The point's agent must be present there."""
    _check_point(m, pt)
    return _eval(m, pt.world, pt.agent, f, {})


def satisfies_naive(m: EpistemicModel, pt: Point, f: Formula) -> bool:
    """Unmemoized twin of satisfies; exists so the cache can be cross-checked."""
    _check_point(m, pt)
    return _eval(m, pt.world, pt.agent, f, None)


class ModelEvaluator:
    """Batch evaluation over one model: extensions as pair bitmasks.

    Pair (agent a, world w) is bit a * world_count + w.  Constructing the
    evaluator precomputes presence rows, partition blocks, and the agents
    able to witness an R step at each point, so evaluating many formulas
    against the same model does no repeated structural work.
    """

    def __init__(self, m: EpistemicModel):
        self.model = m
        W = m.world_count
        self._W = W
        self.present_mask = 0
        for a, w in m.presence:
            self.present_mask |= 1 << (a * W + w)
        self._rows = [0] * m.agent_count
        for a, w in m.presence:
            self._rows[a] |= 1 << w
        self._agents_at = m._agents_at
        # per agent: list of (block worlds, pair mask of the block)
        self._blocks: list[list[tuple[tuple[int, ...], int]]] = []
        for a in range(m.agent_count):
            entries = []
            for blk in m.indist[a] if a < len(m.indist) else ():
                pm = 0
                wm = 0
                for u in blk:
                    pm |= 1 << (a * W + u)
                    wm |= 1 << u
                entries.append((blk, pm, wm))
            self._blocks.append(entries)
        # R witnesses: for present (a, w), the agents b at w whose presence
        # covers a's block at w (a static fact about the skeleton)
        self._witnesses: dict[tuple[int, int], tuple[int, ...]] = {}
        for a, w in m.presence:
            blk_mask = 0
            for u in m._block_lookup.get((a, w), ()):
                blk_mask |= 1 << u
            self._witnesses[(a, w)] = tuple(
                b for b in self._agents_at[w] if blk_mask & ~self._rows[b] == 0
            )

    def extension_mask(self, f: Formula, _memo: dict | None = None) -> int:
        memo = {} if _memo is None else _memo
        key = id(f)
        cached = memo.get(key)
        if cached is not None:
            return cached
        m, W = self.model, self._W
        if isinstance(f, Atom):
            out = 0
            for a, w in m.valuation.get(f.name, frozenset()):
                out |= 1 << (a * W + w)
            out &= self.present_mask
        elif isinstance(f, Falsum):
            out = 0
        elif isinstance(f, Not):
            out = self.present_mask & ~self.extension_mask(f.child, memo)
        elif isinstance(f, Implies):
            out = self.present_mask & (
                ~self.extension_mask(f.left, memo) | self.extension_mask(f.right, memo)
            )
        elif isinstance(f, And):
            out = self.extension_mask(f.left, memo) & self.extension_mask(f.right, memo)
        elif isinstance(f, Or):
            out = self.extension_mask(f.left, memo) | self.extension_mask(f.right, memo)
        elif isinstance(f, Know):
            child = self.extension_mask(f.child, memo)
            out = 0
            for a in range(m.agent_count):
                for _, pm, _ in self._blocks[a]:
                    if child & pm == pm:
                        out |= pm
        elif isinstance(f, DeRe):
            child = self.extension_mask(f.child, memo)
            out = 0
            for (a, w), cands in self._witnesses.items():
                if any(child >> (b * W + w) & 1 for b in cands):
                    out |= 1 << (a * W + w)
        elif isinstance(f, DeDicto):
            child = self.extension_mask(f.child, memo)
            inhabited = 0
            for u in range(m.world_count):
                if any(child >> (b * W + u) & 1 for b in self._agents_at[u]):
                    inhabited |= 1 << u
            out = 0
            for a in range(m.agent_count):
                for _, pm, wm in self._blocks[a]:
                    if wm & ~inhabited == 0:
                        out |= pm
        elif isinstance(f, MetaVar):
            raise ValueError(f"cannot evaluate a schema; metavariable {f.name} is unbound")
        else:
            raise TypeError(f"not a formula node: {f!r}")
        memo[key] = out
        return out

    def holds_everywhere(self, f: Formula) -> bool:
        return self.extension_mask(f) & self.present_mask == self.present_mask

    def extension(self, f: Formula) -> set[Point]:
        mask = self.extension_mask(f)
        W = self._W
        return {
            Point(t % W, t // W)
            for t in range(self.model.agent_count * W)
            if mask >> t & 1
        }

    def first_failure(self, f: Formula) -> Point | None:
        """Lowest present pair (agent-major order) where f fails, if any."""
        failing = self.present_mask & ~self.extension_mask(f)
        if failing == 0:
            return None
        t = (failing & -failing).bit_length() - 1
        return Point(t % self._W, t // self._W)


def valid_in_model(m: EpistemicModel, f: Formula) -> bool:
    """True when f holds at every present point; vacuously true with empty presence."""
    return ModelEvaluator(m).holds_everywhere(f)


def extension(m: EpistemicModel, f: Formula) -> set[Point]:
    """All points of the model where f holds."""
    return ModelEvaluator(m).extension(f)


# ---------- human-readable evaluation traces ----------


def explain(
    m: EpistemicModel,
    pt: Point,
    f: Formula,
    world_names: list[str] | None = None,
    agent_names: list[str] | None = None,
) -> str:
    """A deterministic indented trace of why f holds or fails at the point."""
    _check_point(m, pt)
    wn = world_names or [f"w{i}" for i in range(m.world_count)]
    an = agent_names or [f"a{i}" for i in range(m.agent_count)]
    out: list[str] = []

    def ev(w: int, a: int, g: Formula) -> bool:
        return _eval(m, w, a, g, {})

    def rec(w: int, a: int, g: Formula, depth: int):
        value = ev(w, a, g)
        pad = "  " * depth
        head = f"{pad}{render(g)} at ({wn[w]}, {an[a]}): {'true' if value else 'false'}"
        out.append(head)
        if isinstance(g, (Atom, Falsum)):
            return
        if isinstance(g, Not):
            rec(w, a, g.child, depth + 1)
        elif isinstance(g, (And, Or, Implies)):
            rec(w, a, g.left, depth + 1)
            rec(w, a, g.right, depth + 1)
        elif isinstance(g, Know):
            blk = m.block(a, w)
            if value:
                worlds = ", ".join(wn[u] for u in blk)
                out.append(f"{pad}  holds about {an[a]} at every indistinguishable world: {worlds}")
            else:
                u = next(u for u in blk if not ev(u, a, g.child))
                out.append(f"{pad}  fails at indistinguishable world {wn[u]}:")
                rec(u, a, g.child, depth + 2)
        elif isinstance(g, DeRe):
            blk = m.block(a, w)
            rows = m._rows
            for b in m._agents_at[w]:
                covers = all(u in rows[b] for u in blk)
                if covers and ev(w, b, g.child):
                    out.append(f"{pad}  witness agent {an[b]} (present in every world {an[a]} considers possible):")
                    rec(w, b, g.child, depth + 2)
                    return
            for b in m._agents_at[w]:
                missing = [u for u in blk if u not in rows[b]]
                if missing:
                    out.append(
                        f"{pad}  candidate {an[b]}: absent from {', '.join(wn[u] for u in missing)}"
                    )
                else:
                    out.append(f"{pad}  candidate {an[b]}: fails {render(g.child)} at {wn[w]}")
        elif isinstance(g, DeDicto):
            blk = m.block(a, w)
            if value:
                for u in blk:
                    b = next(b for b in m._agents_at[u] if ev(u, b, g.child))
                    out.append(f"{pad}  world {wn[u]}: witness agent {an[b]}")
            else:
                u = next(
                    u for u in blk if not any(ev(u, b, g.child) for b in m._agents_at[u])
                )
                out.append(f"{pad}  no agent at world {wn[u]} satisfies {render(g.child)}")

    rec(pt.world, pt.agent, f, 0)
    return "\n".join(out)
