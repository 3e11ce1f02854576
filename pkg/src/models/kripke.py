"""Finite Kripke structures over execution-word labels."""

from __future__ import annotations

from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from functools import cached_property
from types import MappingProxyType

from src.models.exec_words import ExecWord
from src.utils.errors import GstLogicError, UnknownStateError

Transition = tuple[str, ExecWord, str]


@dataclass(frozen=True)
class KripkeStructure:
    states: tuple[str, ...]
    transitions: tuple[Transition, ...]
    valuation: Mapping[str, frozenset[str]] = field(default_factory=lambda: MappingProxyType({}))
    initial: str | None = None
    alphabet: frozenset[ExecWord] | None = None
    name: str = "ks"
    # states whose successors were cut short when taking a finite snapshot
    truncated: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        object.__setattr__(
            self,
            "valuation",
            MappingProxyType({p: frozenset(states) for p, states in self.valuation.items()}),
        )
        known = set(self.states)
        if len(known) != len(self.states):
            raise GstLogicError(f"duplicate state in {self.name}")
        if self.initial is not None and self.initial not in known:
            raise UnknownStateError(self.initial, self.name)
        seen: set[Transition] = set()
        for s, w, t in self.transitions:
            for end in (s, t):
                if end not in known:
                    raise UnknownStateError(end, self.name)
            if (s, w, t) in seen:
                raise GstLogicError(f"duplicate transition {s} -[{w}]-> {t} in {self.name}")
            seen.add((s, w, t))
        for p, holding in self.valuation.items():
            for s in holding:
                if s not in known:
                    raise UnknownStateError(s, f"valuation of {p}")
        for s in self.truncated:
            if s not in known:
                raise UnknownStateError(s, f"truncated states of {self.name}")

    def __hash__(self) -> int:
        return hash((self.name, self.states, self.transitions, self.initial))

    @cached_property
    def _index(self) -> dict[str, tuple[tuple[ExecWord, str], ...]]:
        out: dict[str, list[tuple[ExecWord, str]]] = {s: [] for s in self.states}
        for s, w, t in self.transitions:
            out[s].append((w, t))
        return {s: tuple(moves) for s, moves in out.items()}

    @cached_property
    def _labels(self) -> dict[str, frozenset[str]]:
        found: dict[str, set[str]] = {s: set() for s in self.states}
        for p, holding in self.valuation.items():
            for s in holding:
                found[s].add(p)
        return {s: frozenset(props) for s, props in found.items()}

    @property
    def props(self) -> tuple[str, ...]:
        return tuple(self.valuation)

    def require(self, state: str) -> str:
        if state not in self._index:
            raise UnknownStateError(state, self.name)
        return state

    def successors(self, state: str) -> tuple[tuple[ExecWord, str], ...]:
        return self._index[self.require(state)]

    def labels_at(self, state: str) -> frozenset[str]:
        return self._labels[self.require(state)]

    def words(self) -> list[ExecWord]:
        """Transition words in first-use order."""
        return list(dict.fromkeys(w for _, w, _ in self.transitions))

    def has_transition(self, s: str, w: ExecWord, t: str) -> bool:
        return (w, t) in self.successors(s)


def kripke(
    states: Iterable[str],
    transitions: Iterable[Transition],
    valuation: Mapping[str, Iterable[str]] | None = None,
    initial: str | None = None,
    *,
    alphabet: Iterable[ExecWord] | None = None,
    name: str = "ks",
) -> KripkeStructure:
    """Convenience constructor accepting any iterables."""
    return KripkeStructure(
        tuple(states),
        tuple(transitions),
        {p: frozenset(v) for p, v in (valuation or {}).items()},
        initial,
        frozenset(alphabet) if alphabet is not None else None,
        name,
    )


def tag_state(prefix: str, state: str) -> str:
    return f"{prefix}{state}"


def disjoint_union(
    left: KripkeStructure,
    right: KripkeStructure,
    prefixes: tuple[str, str] = ("L:", "R:"),
) -> KripkeStructure:
    """Tagged union; the initial state is the left one's."""
    return union_all([left, right], prefixes)


def union_all(parts: Iterable[KripkeStructure], prefixes: Iterable[str] | None = None) -> KripkeStructure:
    parts = list(parts)
    tags = list(prefixes) if prefixes is not None else [f"{i}:" for i in range(len(parts))]
    states: list[str] = []
    transitions: list[Transition] = []
    valuation: dict[str, set[str]] = {}
    truncated: set[str] = set()
    for tag, ks in zip(tags, parts):
        truncated.update(tag_state(tag, s) for s in ks.truncated)
        states.extend(tag_state(tag, s) for s in ks.states)
        transitions.extend((tag_state(tag, s), w, tag_state(tag, t)) for s, w, t in ks.transitions)
        for p, holding in ks.valuation.items():
            valuation.setdefault(p, set()).update(tag_state(tag, s) for s in holding)
    first = parts[0] if parts else None
    initial = tag_state(tags[0], first.initial) if first is not None and first.initial else None
    return KripkeStructure(
        tuple(states),
        tuple(transitions),
        {p: frozenset(v) for p, v in valuation.items()},
        initial,
        name="+".join(ks.name for ks in parts),
        truncated=frozenset(truncated),
    )
