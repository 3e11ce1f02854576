"""Hennessy-Milner class diagnostics and the infinite example generators."""

from __future__ import annotations

from collections.abc import Callable, Sequence
from dataclasses import dataclass, field

import networkx as nx

from src.config import settings
from src.engine.bisim import Partition, coarsest_partition, level_at, minimize, refinement_levels
from src.engine.lazy import (
    DepthClasses,
    Family,
    LazyKripke,
    SuccessorSpec,
    Successors,
    expand,
    reachable_families,
    validate_hints,
)
from src.engine.surrogate import build_surrogate
from src.models.exec_words import ExecWord, concat, dense, point, splits, word
from src.models.gst import SymbolicGst
from src.models.kripke import KripkeStructure, union_all
from src.utils.errors import RankUndefinedError, UnknownStateError
from src.utils.logger import logger


@dataclass(frozen=True)
class ImageFiniteReport:
    image_finite: bool
    witness: KripkeStructure | None = None
    partition: Partition | None = None


def image_finite(g: SymbolicGst) -> ImageFiniteReport:
    """Every symbolic GST is image-finite; the minimized surrogate is the witness."""
    partition, witness = minimize(build_surrogate(g))
    return ImageFiniteReport(True, witness, partition)


@dataclass(frozen=True)
class BoundedImageReport:
    consistent: bool
    depth: int
    witness: ExecWord | None = None
    class_counts: tuple[int, ...] = ()


def image_finite_bounded(subject: LazyKripke | KripkeStructure, state: str, depth: int) -> BoundedImageReport:
    """Look for a word whose successor family meets strictly more depth-``j``
    classes at every ``j < depth``; finite structures are always consistent."""
    if isinstance(subject, KripkeStructure):
        subject.require(state)
        return BoundedImageReport(True, depth)
    lz = subject
    validate_hints(
        lz,
        reachable_families(lz, [state], settings.hint_samples, settings.rank_bound),
        depth=min(depth, settings.hint_depth),
    )
    if not lz.families(state):
        return BoundedImageReport(True, depth)

    classes = DepthClasses(lz)
    words = list(dict.fromkeys(w for w, spec in lz.successors(state) if isinstance(spec, Family)))
    for w in words:
        specs = [spec for v, spec in lz.successors(state) if v == w]
        counts = tuple(
            len({classes.class_of(t, j) for spec in specs for t in expand(spec, j)})
            for j in range(depth)
        )
        if all(a < b for a, b in zip(counts, counts[1:])):
            logger.info("hm.not_image_finite", structure=lz.name, state=state, word=str(w))
            return BoundedImageReport(False, depth, w, counts)
    return BoundedImageReport(True, depth)


@dataclass(frozen=True)
class SchemaResult:
    holds: bool
    counterexample: tuple[object, ...] | None = None


@dataclass(frozen=True)
class SchemataReport:
    transitivity: SchemaResult
    weak_density: SchemaResult

    @property
    def passed(self) -> bool:
        return self.transitivity.holds and self.weak_density.holds


def schemata_check(ks: KripkeStructure) -> SchemataReport:
    """Composite transitions and intermediate states demanded by the two schemata.

    With a declared alphabet only words inside it are demanded.
    """

    def allowed(w: ExecWord) -> bool:
        return ks.alphabet is None or w in ks.alphabet

    transitivity = SchemaResult(True)
    for s, w1, t in ks.transitions:
        for w2, u in ks.successors(t):
            composite = concat(w1, w2)
            if allowed(composite) and not ks.has_transition(s, composite, u):
                transitivity = SchemaResult(False, ((s, w1, t), (t, w2, u), composite))
                break
        if not transitivity.holds:
            break

    weak_density = SchemaResult(True)
    for s, w, u in ks.transitions:
        for w1, w2 in sorted(splits(w), key=lambda pair: (pair[0].sort_key, pair[1].sort_key)):
            if not (allowed(w1) and allowed(w2)):
                continue
            if not any(v == w1 and ks.has_transition(t, w2, u) for v, t in ks.successors(s)):
                weak_density = SchemaResult(False, ((s, w, u), (w1, w2)))
                break
        if not weak_density.holds:
            break
    return SchemataReport(transitivity, weak_density)


@dataclass(frozen=True)
class VhhmReport:
    depth: int
    violations: tuple[tuple[str, str], ...] = ()
    inconclusive: tuple[tuple[str, str], ...] = ()

    @property
    def passed(self) -> bool:
        return not self.violations


def _reaching(ks: KripkeStructure, targets: frozenset[str]) -> set[str]:
    graph = nx.DiGraph()
    graph.add_nodes_from(ks.states)
    graph.add_edges_from((s, t) for s, _, t in ks.transitions)
    found = set(targets)
    for target in targets:
        found |= nx.ancestors(graph, target)
    return found


def vhhm_check(structures: Sequence[KripkeStructure], depth: int) -> VhhmReport:
    """Compare bisimilarity with depth-``depth`` and stabilized agreement for every
    state pair of the union.

    A bisimilar pair must agree at every depth, and the stabilized level must
    reproduce the bisimulation verdict. A non-bisimilar pair that agrees at
    ``depth`` is settled by the stabilized level, unless one of its states can
    reach a truncated state of a snapshot; such pairs are listed as inconclusive.
    """
    if depth < 0:
        raise ValueError("depth must be non-negative")
    union = union_all(structures)
    partition = coarsest_partition(union)
    bound = len(union.states)
    levels = refinement_levels(union, max(depth, bound))
    at_depth = level_at(levels, depth)
    stable = level_at(levels, bound)
    unsettled = _reaching(union, union.truncated)
    violations: list[tuple[str, str]] = []
    inconclusive: list[tuple[str, str]] = []
    for i, s in enumerate(union.states):
        for t in union.states[i + 1 :]:
            bisimilar = partition.same_block(s, t)
            agree = at_depth[s] == at_depth[t]
            if bisimilar != (stable[s] == stable[t]) or (bisimilar and not agree):
                violations.append((s, t))
            elif agree and not bisimilar and (s in unsettled or t in unsettled):
                inconclusive.append((s, t))
    if inconclusive:
        logger.info("hm.vhhm_inconclusive", structure=union.name, depth=depth, pairs=len(inconclusive))
    return VhhmReport(depth, tuple(violations), tuple(inconclusive))


@dataclass(frozen=True)
class Component:
    """Entry points of a region of a lazy structure."""

    name: str
    entries: tuple[SuccessorSpec, ...]


def _component_states(lz: LazyKripke, component: Component, samples: int, bound: int) -> list[str]:
    frontier: list[str] = []
    for entry in component.entries:
        frontier.extend(_members(entry, samples))
    seen: list[str] = []
    while frontier and len(seen) < bound:
        state = frontier.pop(0)
        if state in seen:
            continue
        seen.append(state)
        for _, spec in lz.successors(state):
            frontier.extend(_members(spec, samples))
    return seen


def _members(spec: SuccessorSpec, samples: int) -> list[str]:
    if isinstance(spec, Family):
        return [spec.member(i) for i in range(samples)]
    return [spec]


def rank_certificate_check(
    lz: LazyKripke,
    component: Component,
    word: ExecWord,
    rank: Callable[[str], int | None] | None = None,
    *,
    bound: int | None = None,
    samples: int | None = None,
) -> bool:
    """True iff every ``word`` step inside the explored component strictly lowers the rank."""
    rank = rank or lz.rank
    if rank is None:
        raise RankUndefinedError(component.name)
    bound = settings.rank_bound if bound is None else bound
    samples = settings.hint_samples if samples is None else samples

    def rank_of(state: str) -> int:
        value = rank(state)
        if value is None:
            raise RankUndefinedError(state)
        return value

    for state in _component_states(lz, component, samples, bound):
        for w, spec in lz.successors(state):
            if w != word:
                continue
            for target in _members(spec, samples):
                if rank_of(target) >= rank_of(state):
                    logger.info("hm.rank_not_decreasing", source=state, target=target)
                    return False
    return True


def infinite_chain_witness(
    lz: LazyKripke,
    start: SuccessorSpec,
    word: ExecWord,
    steps: int | None = None,
    *,
    samples: int | None = None,
) -> list[str] | None:
    """A path of ``steps`` consecutive ``word`` transitions, single successors tried first."""
    steps = settings.chain_steps if steps is None else steps
    samples = settings.hint_samples if samples is None else samples

    def extend(path: list[str]) -> list[str] | None:
        if len(path) > steps:
            return path
        moves = [spec for w, spec in lz.successors(path[-1]) if w == word]
        ordered = [m for m in moves if not isinstance(m, Family)] + [m for m in moves if isinstance(m, Family)]
        for spec in ordered:
            for target in _members(spec, samples):
                found = extend([*path, target])
                if found is not None:
                    return found
        return None

    for first in _members(start, samples):
        found = extend([first])
        if found is not None:
            return found
    return None


ALPHA = word(point("alpha"))
BETA = word(point("beta"))
ALPHA_BETA = word(point("alpha"), point("beta"))


def _chain(n: int, i: int) -> str:
    return f"c{n}_{i}"


def _parse_chain(state: str) -> tuple[int, int] | None:
    if not state.startswith("c") or "_" not in state:
        return None
    head, _, tail = state[1:].partition("_")
    if not (head.isdigit() and tail.isdigit()):
        return None
    n, i = int(head), int(tail)
    return (n, i) if 1 <= i <= n else None


def _range_hint(depth: int) -> range:
    return range(depth + 1)


@dataclass(frozen=True)
class Fig3Example:
    structure: LazyKripke
    u: str
    v: str
    u_component: Component
    v_component: Component
    alpha: ExecWord = field(default=ALPHA)


def gen_fig3() -> Fig3Example:
    """Two states with the same finite-depth theory that are not bisimilar.

    ``u`` offers, for every ``n >= 1``, an alpha-chain of length ``n`` ending in
    a beta step; ``v`` offers the same chains plus one alpha-looping state
    ``omega`` where beta is always available.
    """
    chains = Family("chains", lambda n: _chain(n + 1, 1), _range_hint)

    def successors(state: str) -> Successors:
        if state == "u":
            return [(ALPHA, chains), (ALPHA_BETA, "z")]
        if state == "v":
            return [(ALPHA, chains), (ALPHA, "omega"), (ALPHA_BETA, "z")]
        if state == "omega":
            return [(ALPHA, "omega"), (BETA, "z"), (ALPHA_BETA, "z")]
        if state == "z":
            return []
        parsed = _parse_chain(state)
        if parsed is None:
            raise UnknownStateError(state, "fig3")
        n, i = parsed
        moves: list[tuple[ExecWord, SuccessorSpec]] = [(BETA, "z")]
        if i < n:
            moves = [(ALPHA, _chain(n, i + 1)), (BETA, "z"), (ALPHA_BETA, "z")]
        return moves

    def rank(state: str) -> int | None:
        if state in ("z", "omega"):
            return 0
        parsed = _parse_chain(state)
        return parsed[0] - parsed[1] if parsed else None

    lz = LazyKripke(
        "fig3",
        ("u", "v"),
        successors,
        alphabet=frozenset({ALPHA, BETA, ALPHA_BETA}),
        rank=rank,
    )
    return Fig3Example(
        lz,
        "u",
        "v",
        Component("u", (chains,)),
        Component("v", (chains, "omega")),
    )


DA = word(dense("a"))
PB = word(point("b"))
DA_PB = word(dense("a"), point("b"))


def _indexed(state: str, prefix: str) -> int | None:
    if state.startswith(prefix) and state[len(prefix) :].isdigit():
        return int(state[len(prefix) :])
    return None


def gen_gx() -> LazyKripke:
    """Cut-class quotient of the tree whose dense trunk carries point-b branches
    at a sequence of points accumulating from above; ``A{k}`` are branch
    points, ``I{k}`` the trunk pieces between them, larger ``k`` lying lower."""
    inner = Family("I", lambda k: f"I{k}", _range_hint)
    branches = Family("A", lambda k: f"A{k}", _range_hint)

    def successors(state: str) -> Successors:
        if state == "R":
            return [(DA, "R"), (DA, inner), (DA, branches), (DA_PB, "F")]
        if state == "F":
            return []
        k = _indexed(state, "I")
        if k is not None:
            return [
                (DA, f"I{k}"),
                *((DA, f"I{j}") for j in range(k)),
                *((DA, f"A{j}") for j in range(k + 1)),
                (DA_PB, "F"),
            ]
        k = _indexed(state, "A")
        if k is not None:
            moves: list[tuple[ExecWord, SuccessorSpec]] = [(PB, "F")]
            moves.extend((DA, f"I{j}") for j in range(k))
            moves.extend((DA, f"A{j}") for j in range(k))
            if k > 0:
                moves.append((DA_PB, "F"))
            return moves
        raise UnknownStateError(state, "gx")

    return LazyKripke("gx", ("R",), successors, alphabet=frozenset({DA, PB, DA_PB}))
