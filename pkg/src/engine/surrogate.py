"""Surrogate Kripke structures of symbolic GSTs.

``build_surrogate`` works on the finite cut-class quotient. ``sampled_surrogate``
expands a finite set of concrete nodes instead (every attachment instance gets
its own copy of the child tree) and is used to cross-check the quotient.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from src.config import settings
from src.engine.gst_model import PathStep, WordTable, path_words, require_valid
from src.models.exec_words import ExecWord, dense
from src.models.gst import Scope, SymbolicGst
from src.models.kripke import KripkeStructure, Transition
from src.utils.logger import logger


def build_surrogate(g: SymbolicGst) -> KripkeStructure:
    require_valid(g)
    table = WordTable(g)
    states = [c.state_id for c in table.classes]
    transitions: list[Transition] = []
    for c1 in table.classes:
        for c2 in table.classes:
            for w in sorted(table.words(c1, c2), key=lambda w: w.sort_key):
                transitions.append((c1.state_id, w, c2.state_id))

    ks = KripkeStructure(
        tuple(states),
        tuple(transitions),
        {p: frozenset(states) for p in g.props},
        initial=g.root,
        name=f"surrogate({g.root})",
    )
    logger.debug("surrogate.built", states=len(states), transitions=len(transitions))
    return ks


@dataclass(frozen=True)
class ConcretePoint:
    id: str
    path: tuple[PathStep, ...]


@dataclass
class ConcreteSample:
    """A finite set of concrete tree nodes; the first point is the root."""

    k: int
    points: list[ConcretePoint] = field(default_factory=list)

    @property
    def root(self) -> ConcretePoint:
        return self.points[0]

    def words(self, p: ConcretePoint, q: ConcretePoint) -> set[ExecWord]:
        return path_words(p.path, q.path)


def sample_points(g: SymbolicGst, k: int | None = None) -> ConcreteSample:
    """Place ``k * (m + 1)`` evenly spaced slots on every dense edge with ``m``
    attachments; slots cycle through plain interior points and each attachment."""
    k = settings.sample_density if k is None else k
    if k < 1:
        raise ValueError("k must be positive")
    require_valid(g)
    sample = ConcreteSample(k)
    sample.points.append(ConcretePoint(g.root, ()))
    _expand(g, g.root, (), (), "", sample)
    return sample


def _expand(
    g: SymbolicGst,
    vertex: str,
    scope: Scope,
    prefix: tuple[PathStep, ...],
    tag: str,
    sample: ConcreteSample,
) -> None:
    for e in g.outgoing(vertex):
        if e.is_dense:
            attached = g.attachments_of(e.id)
            slots = sample.k * (len(attached) + 1)
            for slot in range(1, slots + 1):
                step = PathStep(("part", scope, e.id, slot), dense(e.segment.label))
                path = prefix + (step,)
                sample.points.append(ConcretePoint(f"{tag}{e.id}.s{slot}", path))
                kind = (slot - 1) % (len(attached) + 1)
                if kind:
                    child = attached[kind - 1].child
                    _expand(
                        child,
                        child.root,
                        scope + ((e.id, slot),),
                        path,
                        f"{tag}{e.id}.s{slot}/",
                        sample,
                    )
        full = prefix + (PathStep(("full", scope, e.id, 0), e.segment),)
        sample.points.append(ConcretePoint(f"{tag}{e.target}", full))
        _expand(g, e.target, scope, full, tag, sample)


def sampled_surrogate(g: SymbolicGst, k: int | None = None) -> KripkeStructure:
    sample = sample_points(g, k)
    transitions: list[Transition] = []
    for p in sample.points:
        for q in sample.points:
            for w in sorted(sample.words(p, q), key=lambda w: w.sort_key):
                transitions.append((p.id, w, q.id))
    states = tuple(p.id for p in sample.points)
    logger.debug("surrogate.sampled", k=sample.k, states=len(states), transitions=len(transitions))
    return KripkeStructure(
        states,
        tuple(transitions),
        {p: frozenset(states) for p in g.props},
        initial=sample.root.id,
        name=f"sampled({g.root},{sample.k})",
    )
