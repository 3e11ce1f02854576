"""Bisimulation, simulation, minimization and depth-indexed equivalence."""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass
from functools import cached_property

from src.engine.ghml import mc_kripke, to_ghml
from src.engine.gst_model import step_system
from src.engine.lazy import DepthClasses, LazyKripke
from src.engine.surrogate import build_surrogate
from src.models.exec_words import ExecWord, word
from src.models.formula import Diamond, Formula, Not, Prop, conj_all
from src.models.gst import SymbolicGst
from src.models.kripke import KripkeStructure, disjoint_union, tag_state
from src.utils.errors import (
    BisimilarPairError,
    GstLogicError,
    HintExhaustedError,
    UnsupportedModelError,
)
from src.utils.logger import logger

LEFT, RIGHT = "L:", "R:"


@dataclass(frozen=True)
class Partition:
    blocks: tuple[frozenset[str], ...]

    @cached_property
    def _block_of(self) -> dict[str, int]:
        return {s: i for i, block in enumerate(self.blocks) for s in block}

    def block_of(self, state: str) -> int:
        return self._block_of[state]

    def same_block(self, s: str, t: str) -> bool:
        return self._block_of[s] == self._block_of[t]

    def __len__(self) -> int:
        return len(self.blocks)


def _ordered_partition(ks: KripkeStructure, groups: Iterable[Iterable[str]]) -> Partition:
    """Number blocks by the first state (in declaration order) they contain."""
    order = {s: i for i, s in enumerate(ks.states)}
    blocks = [frozenset(group) for group in groups if group]
    blocks.sort(key=lambda block: min(order[s] for s in block))
    return Partition(tuple(blocks))


class PartitionRefinement:
    """Blocks as mutable sets, split against predecessor sets of splitters."""

    def __init__(self, blocks: Iterable[set[str]]):
        self.blocks: dict[int, set[str]] = {}
        self.owner: dict[str, int] = {}
        self._next = 0
        for block in blocks:
            self._add(block)

    def _add(self, block: set[str]) -> int:
        key = self._next
        self._next += 1
        self.blocks[key] = block
        for x in block:
            self.owner[x] = key
        return key

    def refine(self, hit: set[str]) -> list[tuple[int, int]]:
        """Split every block ``A`` into ``A & hit`` (new) and ``A - hit`` (kept)."""
        touched: dict[int, set[str]] = {}
        for x in hit:
            touched.setdefault(self.owner[x], set()).add(x)
        changed: list[tuple[int, int]] = []
        for key, inside in touched.items():
            block = self.blocks[key]
            if inside != block:
                block -= inside
                changed.append((self._add(inside), key))
        return changed


def _valuation_groups(ks: KripkeStructure) -> list[set[str]]:
    groups: dict[frozenset[str], set[str]] = {}
    for s in ks.states:
        groups.setdefault(ks.labels_at(s), set()).add(s)
    return list(groups.values())


def coarsest_partition(ks: KripkeStructure) -> Partition:
    refinement = PartitionRefinement(_valuation_groups(ks))
    predecessors: dict[ExecWord, dict[str, set[str]]] = {}
    for s, w, t in ks.transitions:
        predecessors.setdefault(w, {}).setdefault(t, set()).add(s)

    pending = list(refinement.blocks)
    while pending:
        splitter = frozenset(refinement.blocks[pending.pop()])
        for w, by_target in predecessors.items():
            hit: set[str] = set()
            for t in splitter:
                hit |= by_target.get(t, set())
            for new, old in refinement.refine(hit):
                pending.extend((new, old))
    return _ordered_partition(ks, refinement.blocks.values())


def quotient(ks: KripkeStructure, partition: Partition) -> KripkeStructure:
    names = [f"B{i}" for i in range(len(partition))]
    transitions = dict.fromkeys(
        (names[partition.block_of(s)], w, names[partition.block_of(t)]) for s, w, t in ks.transitions
    )
    valuation = {
        p: frozenset(names[partition.block_of(s)] for s in holding) for p, holding in ks.valuation.items()
    }
    initial = names[partition.block_of(ks.initial)] if ks.initial is not None else None
    return KripkeStructure(
        tuple(names),
        tuple(transitions),
        valuation,
        initial,
        ks.alphabet,
        name=f"min({ks.name})",
    )


def minimize(ks: KripkeStructure) -> tuple[Partition, KripkeStructure]:
    partition = coarsest_partition(ks)
    logger.debug("bisim.minimized", states=len(ks.states), blocks=len(partition))
    return partition, quotient(ks, partition)


def naive_bisimulation(ks: KripkeStructure) -> Partition:
    """Greatest bisimulation by removing violating pairs until nothing changes."""
    relation = {(s, t) for s in ks.states for t in ks.states if ks.labels_at(s) == ks.labels_at(t)}

    def answered(s: str, t: str) -> bool:
        return all(
            any(w2 == w and (s2, t2) in relation for w2, t2 in ks.successors(t))
            for w, s2 in ks.successors(s)
        )

    changed = True
    while changed:
        changed = False
        for s, t in sorted(relation):
            if not (answered(s, t) and answered(t, s)):
                relation.discard((s, t))
                changed = True

    groups: list[set[str]] = []
    placed: set[str] = set()
    for s in ks.states:
        if s not in placed:
            group = {t for t in ks.states if (s, t) in relation}
            placed |= group
            groups.append(group)
    return _ordered_partition(ks, groups)


Levels = list[dict[str, int]]


def refinement_levels(ks: KripkeStructure, depth: int) -> Levels:
    """Class ids of every state for depths ``0..depth``.

    Stops early once a level no longer splits anything; callers read deeper
    levels through ``level_at``.
    """
    signatures = {s: ks.labels_at(s) for s in ks.states}
    levels = [_number(ks, signatures)]
    for _ in range(depth):
        previous = levels[-1]
        signatures = {
            s: (previous[s], frozenset((w, previous[t]) for w, t in ks.successors(s)))
            for s in ks.states
        }
        current = _number(ks, signatures)
        levels.append(current)
        if len(set(current.values())) == len(set(previous.values())):
            break
    return levels


def _number(ks: KripkeStructure, signatures: dict[str, object]) -> dict[str, int]:
    ids: dict[object, int] = {}
    return {s: ids.setdefault(signatures[s], len(ids)) for s in ks.states}


def level_at(levels: Levels, depth: int) -> dict[str, int]:
    return levels[min(depth, len(levels) - 1)]


@dataclass(frozen=True)
class StratifiedResult:
    depth: int
    limit: int
    unknown_beyond: int | None = None

    @property
    def agrees(self) -> bool:
        return self.depth == self.limit


def stratified(subject: KripkeStructure | LazyKripke, s: str, t: str, depth: int) -> StratifiedResult:
    """Largest ``j <= depth`` with ``s`` and ``t`` equivalent up to modal depth ``j``.

    ``-1`` when the valuations already differ.
    """
    if depth < 0:
        raise ValueError("depth must be non-negative")
    if isinstance(subject, LazyKripke):
        return _stratified_lazy(subject, s, t, depth)
    subject.require(s)
    subject.require(t)
    levels = refinement_levels(subject, depth)
    agreed = -1
    for j in range(depth + 1):
        level = level_at(levels, j)
        if level[s] != level[t]:
            break
        agreed = j
    return StratifiedResult(agreed, depth)


def _stratified_lazy(lz: LazyKripke, s: str, t: str, depth: int) -> StratifiedResult:
    classes = DepthClasses(lz)
    agreed = -1
    for j in range(depth + 1):
        try:
            same = classes.class_of(s, j) == classes.class_of(t, j)
        except HintExhaustedError as exc:
            logger.warning("bisim.hint_exhausted", family=exc.family, depth=exc.depth)
            return StratifiedResult(agreed, depth, unknown_beyond=agreed)
        if not same:
            break
        agreed = j
    return StratifiedResult(agreed, depth)


@dataclass(frozen=True)
class BisimVerdict:
    equivalent: bool
    relation: frozenset[tuple[str, str]] | None = None
    formula: Formula | None = None


def bisim(ks1: KripkeStructure, s: str, ks2: KripkeStructure, t: str) -> BisimVerdict:
    ks1.require(s)
    ks2.require(t)
    union = disjoint_union(ks1, ks2, (LEFT, RIGHT))
    partition = coarsest_partition(union)
    if not partition.same_block(tag_state(LEFT, s), tag_state(RIGHT, t)):
        return BisimVerdict(False, formula=_distinguish_in(union, tag_state(LEFT, s), tag_state(RIGHT, t)))
    relation = frozenset(
        (a, b)
        for a in ks1.states
        for b in ks2.states
        if partition.same_block(tag_state(LEFT, a), tag_state(RIGHT, b))
    )
    return BisimVerdict(True, relation=relation)


def simulate(ks1: KripkeStructure, s: str, ks2: KripkeStructure, t: str) -> bool:
    """Whether ``t`` simulates ``s``: every move of ``s`` is matched with the same word."""
    ks1.require(s)
    ks2.require(t)
    relation = {
        (a, b)
        for a in ks1.states
        for b in ks2.states
        if ks1.labels_at(a) <= ks2.labels_at(b)
    }
    changed = True
    while changed:
        changed = False
        for a, b in sorted(relation):
            matched = all(
                any(w2 == w and (a2, b2) in relation for w2, b2 in ks2.successors(b))
                for w, a2 in ks1.successors(a)
            )
            if not matched:
                relation.discard((a, b))
                changed = True
    return (s, t) in relation


def distinguishing_formula(ks1: KripkeStructure, s: str, ks2: KripkeStructure, t: str) -> Formula:
    ks1.require(s)
    ks2.require(t)
    union = disjoint_union(ks1, ks2, (LEFT, RIGHT))
    return _distinguish_in(union, tag_state(LEFT, s), tag_state(RIGHT, t))


def _distinguish_in(ks: KripkeStructure, s: str, t: str) -> Formula:
    levels = refinement_levels(ks, len(ks.states))
    depth = next((j for j, level in enumerate(levels) if level[s] != level[t]), None)
    if depth is None:
        raise BisimilarPairError(f"{s} and {t} are bisimilar")
    formula = _Distinguisher(ks, levels).build(s, t, depth)
    if not (mc_kripke(ks, s, formula) and not mc_kripke(ks, t, formula)):
        raise GstLogicError(f"distinguishing formula failed validation for {s}, {t}")
    return formula


class _Distinguisher:
    def __init__(self, ks: KripkeStructure, levels: Levels):
        self.ks = ks
        self.levels = levels

    def build(self, s: str, t: str, depth: int) -> Formula:
        first = next(j for j in range(depth + 1) if self.levels[j][s] != self.levels[j][t])
        if first == 0:
            here, there = self.ks.labels_at(s), self.ks.labels_at(t)
            if here - there:
                return Prop(min(here - there))
            return Not(Prop(min(there - here)))

        below = self.levels[first - 1]
        missing = self._signature(s, below) - self._signature(t, below)
        if not missing:
            return Not(self.build(t, s, first))
        w, block = min(missing, key=lambda entry: (entry[0].sort_key, entry[1]))
        target = next(x for v, x in self.ks.successors(s) if v == w and below[x] == block)
        parts = [
            self.build(target, other, first - 1)
            for v, other in self.ks.successors(t)
            if v == w
        ]
        return Diamond(w, conj_all(parts))

    def _signature(self, state: str, level: dict[str, int]) -> set[tuple[ExecWord, int]]:
        return {(w, level[x]) for w, x in self.ks.successors(state)}


def formula_basis(ks: KripkeStructure, depth: int | None = None) -> list[Formula]:
    """One formula per pair of depth-``depth`` classes, true in one and false in the other.

    Two states satisfy the same basis formulas iff they agree up to ``depth``,
    which defaults to the stabilization bound, where agreement is bisimilarity.
    """
    depth = len(ks.states) if depth is None else depth
    if depth < 0:
        raise ValueError("depth must be non-negative")
    levels = refinement_levels(ks, depth)
    level = level_at(levels, depth)
    representatives: dict[int, str] = {}
    for s in ks.states:
        representatives.setdefault(level[s], s)
    ordered = list(representatives.values())
    builder = _Distinguisher(ks, levels)
    basis = [
        builder.build(a, b, len(levels) - 1)
        for i, a in enumerate(ordered)
        for b in ordered[i + 1 :]
    ]
    return list(dict.fromkeys(basis))


def gst_formula_basis(g1: SymbolicGst, g2: SymbolicGst, depth: int | None = None) -> list[Formula]:
    """GHML basis over the words of both surrogates."""
    union = disjoint_union(build_surrogate(g1), build_surrogate(g2), (LEFT, RIGHT))
    return [to_ghml(f) for f in formula_basis(union, depth)]


def weak_bisim_gst(g1: SymbolicGst, g2: SymbolicGst) -> BisimVerdict:
    k1, k2 = build_surrogate(g1), build_surrogate(g2)
    assert k1.initial is not None and k2.initial is not None
    verdict = bisim(k1, k1.initial, k2, k2.initial)
    if verdict.formula is not None:
        return BisimVerdict(False, formula=to_ghml(verdict.formula))
    return verdict


def step_structure(g: SymbolicGst, name: str) -> KripkeStructure:
    return KripkeStructure(
        g.vertices,
        tuple(dict.fromkeys((s, word(seg), t) for s, seg, t in step_system(g))),
        {p: frozenset(g.vertices) for p in g.props},
        initial=g.root,
        name=name,
    )


def strong_bisim_discrete(g1: SymbolicGst, g2: SymbolicGst) -> bool:
    if not (g1.is_discrete and g2.is_discrete):
        raise UnsupportedModelError("strong bisimulation supported only for discrete GSTs")
    k1, k2 = step_structure(g1, "steps1"), step_structure(g2, "steps2")
    return bisim(k1, g1.root, k2, g2.root).equivalent
