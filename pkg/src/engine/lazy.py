"""Lazily generated, possibly infinite Kripke structures.

Successor lists are finite but may contain indexed families ``{t_n : n in N}``.
A family carries a collapse hint: for each depth ``d`` a finite list of member
indices such that every member is depth-``d`` equivalent to one of them. Depth
classes and truncations only ever touch those representatives.
"""

from __future__ import annotations

from collections.abc import Callable, Iterable, Iterator, Sequence
from dataclasses import dataclass, field
from threading import Lock

from src.config import settings
from src.models.exec_words import ExecWord
from src.models.kripke import KripkeStructure, Transition
from src.utils.errors import HintExhaustedError, InvalidHintError, UnknownStateError
from src.utils.logger import logger


@dataclass(frozen=True)
class Family:
    name: str
    member: Callable[[int], str]
    hint: Callable[[int], Sequence[int] | None]

    def representatives(self, depth: int) -> list[str]:
        indices = self.hint(depth)
        if indices is None:
            raise HintExhaustedError(self.name, depth)
        return [self.member(i) for i in indices]


SuccessorSpec = str | Family
Successors = Sequence[tuple[ExecWord, SuccessorSpec]]


def _no_props(state: str) -> frozenset[str]:
    return frozenset()


@dataclass
class LazyKripke:
    name: str
    initial: tuple[str, ...]
    successors_fn: Callable[[str], Successors]
    valuation_fn: Callable[[str], frozenset[str]] = _no_props
    props: tuple[str, ...] = ()
    alphabet: frozenset[ExecWord] | None = None
    rank: Callable[[str], int | None] | None = None
    _cache: dict[str, tuple[tuple[ExecWord, SuccessorSpec], ...]] = field(
        default_factory=dict, repr=False, compare=False,
    )
    _lock: Lock = field(default_factory=Lock, repr=False, compare=False)

    def successors(self, state: str) -> tuple[tuple[ExecWord, SuccessorSpec], ...]:
        with self._lock:
            if state not in self._cache:
                self._cache[state] = tuple(self.successors_fn(state))
            return self._cache[state]

    def valuation(self, state: str) -> frozenset[str]:
        return self.valuation_fn(state)

    def families(self, state: str) -> list[Family]:
        return [spec for _, spec in self.successors(state) if isinstance(spec, Family)]

    @classmethod
    def from_structure(cls, ks: KripkeStructure) -> LazyKripke:
        def successors(state: str) -> Successors:
            if state not in ks.states:
                raise UnknownStateError(state, ks.name)
            return ks.successors(state)

        initial = (ks.initial,) if ks.initial is not None else ks.states[:1]
        return cls(
            ks.name,
            initial,
            successors,
            ks.labels_at,
            ks.props,
            ks.alphabet,
        )


class DepthClasses:
    """Memoized depth-``d`` class ids of lazy states.

    Class ``d + 1`` of a state is its class ``d`` together with the set of
    ``(word, class d of successor)``; families contribute the representatives
    their hint names for depth ``d``.
    """

    def __init__(self, lz: LazyKripke):
        self.lz = lz
        self._ids: dict[int, dict[object, int]] = {}
        self._memo: dict[tuple[str, int], int] = {}
        self._lock = Lock()

    def class_of(self, state: str, depth: int) -> int:
        with self._lock:
            return self._class_of(state, depth)

    def _class_of(self, state: str, depth: int) -> int:
        key = (state, depth)
        if key in self._memo:
            return self._memo[key]
        signature: object
        if depth == 0:
            signature = self.lz.valuation(state)
        else:
            moves = frozenset(
                (w, self._class_of(target, depth - 1))
                for w, spec in self.lz.successors(state)
                for target in expand(spec, depth - 1)
            )
            signature = (self._class_of(state, depth - 1), moves)
        ids = self._ids.setdefault(depth, {})
        value = ids.setdefault(signature, len(ids))
        self._memo[key] = value
        return value


def expand(spec: SuccessorSpec, depth: int) -> list[str]:
    if isinstance(spec, Family):
        return spec.representatives(depth)
    return [spec]


def family_members(family: Family, depth: int, width: int) -> list[str]:
    """Up to ``width`` members: hint representatives first, then ascending indices."""
    chosen: list[str] = []
    indices = family.hint(depth) or ()
    for i in [*indices, *range(width)]:
        member = family.member(i)
        if member not in chosen:
            chosen.append(member)
        if len(chosen) >= width:
            break
    return chosen


def truncate(lz: LazyKripke, depth: int, width: int | None = None) -> KripkeStructure:
    """Breadth-first finite snapshot.

    States first seen in layers below ``depth`` are expanded; frontier states
    keep only their transitions into states already discovered. States that
    lost successors (family members past ``width``, or undiscovered targets)
    are recorded in ``truncated``.
    """
    width = settings.truncate_width if width is None else width
    if depth < 0 or width < 1:
        raise ValueError("depth must be non-negative and width positive")
    layer: dict[str, int] = {s: 0 for s in lz.initial}
    order = list(lz.initial)
    transitions: dict[Transition, None] = {}

    def targets(state: str, remaining: int) -> Iterator[tuple[ExecWord, str]]:
        for w, spec in lz.successors(state):
            if isinstance(spec, Family):
                for member in family_members(spec, max(remaining - 1, 0), width):
                    yield w, member
            else:
                yield w, spec

    if depth > 0:
        index = 0
        while index < len(order):
            state = order[index]
            index += 1
            if layer[state] >= depth:
                continue
            for w, target in targets(state, depth - layer[state]):
                if target not in layer:
                    layer[target] = layer[state] + 1
                    order.append(target)
                transitions[(state, w, target)] = None
        for state in order:
            if layer[state] == depth:
                for w, target in targets(state, 0):
                    if target in layer:
                        transitions[(state, w, target)] = None

    props = set(lz.props)
    for state in order:
        props |= lz.valuation(state)
    valuation = {p: frozenset(s for s in order if p in lz.valuation(s)) for p in sorted(props)}
    cut = frozenset(
        s
        for s in order
        if any(isinstance(spec, Family) or (s, w, spec) not in transitions for w, spec in lz.successors(s))
    )
    ks = KripkeStructure(
        tuple(order),
        tuple(transitions),
        valuation,
        initial=lz.initial[0] if lz.initial else None,
        alphabet=lz.alphabet,
        name=f"{lz.name}[{depth},{width}]",
        truncated=cut,
    )
    logger.debug("lazy.truncated", structure=lz.name, depth=depth, width=width, states=len(order))
    return ks


def reachable_families(lz: LazyKripke, start: Iterable[str], samples: int, bound: int) -> list[Family]:
    """Families met while exploring from ``start`` (families via their first members)."""
    seen: set[str] = set()
    frontier = list(start)
    found: dict[str, Family] = {}
    while frontier and len(seen) < bound:
        state = frontier.pop(0)
        if state in seen:
            continue
        seen.add(state)
        for _, spec in lz.successors(state):
            if isinstance(spec, Family):
                found.setdefault(spec.name, spec)
                frontier.extend(spec.member(i) for i in range(samples))
            else:
                frontier.append(spec)
    return list(found.values())


def validate_hints(
    lz: LazyKripke,
    families: Iterable[Family],
    depth: int | None = None,
    samples: int | None = None,
) -> None:
    """Check sampled members against each family's representatives at every depth."""
    depth = settings.hint_depth if depth is None else depth
    samples = settings.hint_samples if samples is None else samples
    classes = DepthClasses(lz)
    checked = 0
    for family in families:
        for d in range(depth + 1):
            allowed = {classes.class_of(r, d) for r in family.representatives(d)}
            for i in range(samples):
                member = family.member(i)
                if classes.class_of(member, d) not in allowed:
                    raise InvalidHintError(
                        f"invalid collapse hint: {family.name} member {member!r} at depth {d}"
                    )
        checked += 1
    logger.debug("hm.hints_validated", structure=lz.name, families=checked, depth=depth)
