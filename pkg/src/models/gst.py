"""Symbolic presentations of generalized synchronization trees."""

from __future__ import annotations

import re
from collections.abc import Mapping
from dataclasses import dataclass, field
from enum import Enum
from types import MappingProxyType

from src.models.exec_words import Segment

ID_PATTERN = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")

# Root id of an attachment child: the attachment point itself.
ATTACH_ROOT = "@"

Scope = tuple[tuple[str, int], ...]


@dataclass(frozen=True)
class Edge:
    id: str
    source: str
    target: str
    segment: Segment

    @property
    def is_dense(self) -> bool:
        return self.segment.is_dense


@dataclass(frozen=True)
class Attachment:
    """A subtree pattern branching off a dense, co-dense set of points of its host edge."""

    host: str
    child: SymbolicGst


@dataclass(frozen=True)
class SymbolicGst:
    vertices: tuple[str, ...]
    root: str
    edges: tuple[Edge, ...]
    attachments: Mapping[str, tuple[Attachment, ...]] = field(
        default_factory=lambda: MappingProxyType({}),
    )
    props: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if not isinstance(self.attachments, MappingProxyType):
            object.__setattr__(self, "attachments", MappingProxyType(dict(self.attachments)))

    def __hash__(self) -> int:
        return hash((self.vertices, self.root, self.edges, self.props))

    def edge(self, edge_id: str) -> Edge:
        for e in self.edges:
            if e.id == edge_id:
                return e
        raise KeyError(edge_id)

    def attachments_of(self, edge_id: str) -> tuple[Attachment, ...]:
        return self.attachments.get(edge_id, ())

    def outgoing(self, vertex: str) -> list[Edge]:
        return [e for e in self.edges if e.source == vertex]

    def incoming(self, vertex: str) -> Edge | None:
        for e in self.edges:
            if e.target == vertex:
                return e
        return None

    @property
    def is_discrete(self) -> bool:
        return not any(e.is_dense for e in self.edges) and not self.attachments

    def labels(self) -> frozenset[str]:
        found = {e.segment.label for e in self.edges}
        for attached in self.attachments.values():
            for attachment in attached:
                found |= attachment.child.labels()
        return frozenset(found)


class CutKind(Enum):
    VERTEX = "vertex"
    INTERIOR = "interior"
    ATTACH_POINT = "attach"


@dataclass(frozen=True)
class CutClass:
    """A class of tree nodes that share their future up to order-preserving rescaling.

    ``scope`` locates the (possibly nested) attachment subtree the class lives
    in, as a path of ``(host edge, attachment index)`` pairs from the top tree.
    """

    kind: CutKind
    ref: str
    attachment: int | None = None
    scope: Scope = ()

    @property
    def state_id(self) -> str:
        prefix = "".join(f"{edge}.att{index}/" for edge, index in self.scope)
        if self.kind is CutKind.VERTEX:
            return prefix + self.ref
        if self.kind is CutKind.INTERIOR:
            return f"{prefix}{self.ref}.int"
        return f"{prefix}{self.ref}.att{self.attachment}"

    def __str__(self) -> str:
        return self.state_id


def vertex_cut(vertex: str, scope: Scope = ()) -> CutClass:
    return CutClass(CutKind.VERTEX, vertex, scope=scope)


def interior_cut(edge: str, scope: Scope = ()) -> CutClass:
    return CutClass(CutKind.INTERIOR, edge, scope=scope)


def attach_cut(edge: str, index: int, scope: Scope = ()) -> CutClass:
    return CutClass(CutKind.ATTACH_POINT, edge, index, scope)
