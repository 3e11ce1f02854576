"""Cut classes, inter-cut execution words and sub-GST extraction for symbolic GSTs."""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

import networkx as nx

from src.models.exec_words import ExecWord, Segment, dense, normalize, point
from src.models.gst import (
    ATTACH_ROOT,
    ID_PATTERN,
    Attachment,
    CutClass,
    CutKind,
    Edge,
    Scope,
    SymbolicGst,
    attach_cut,
    interior_cut,
    vertex_cut,
)
from src.utils.errors import InvalidModelError


@dataclass(frozen=True)
class Violation:
    code: str
    subject: str
    message: str

    def __str__(self) -> str:
        return f"{self.code} [{self.subject}]: {self.message}"


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def valid(self) -> bool:
        return not self.violations

    def codes(self) -> set[str]:
        return {v.code for v in self.violations}


def validate(g: SymbolicGst) -> ValidationReport:
    """Check the tree and attachment invariants; never raises."""
    return ValidationReport(tuple(_violations(g, prefix="")))


def _violations(g: SymbolicGst, prefix: str) -> list[Violation]:
    found: list[Violation] = []

    def report(code: str, subject: str, message: str) -> None:
        found.append(Violation(code, prefix + subject, message))

    vertex_set = set(g.vertices)
    if len(vertex_set) != len(g.vertices):
        report("duplicate-vertex", g.root, "vertex declared twice")
    if g.root not in vertex_set:
        report("unknown-root", g.root, "root is not a vertex")

    seen_edges: set[str] = set()
    graph = nx.DiGraph()
    graph.add_nodes_from(g.vertices)
    for e in g.edges:
        if e.id in seen_edges:
            report("duplicate-edge", e.id, "edge id declared twice")
        seen_edges.add(e.id)
        for end in (e.source, e.target):
            if end not in vertex_set:
                report("unknown-vertex", e.id, f"endpoint {end!r} is not a vertex")
        if e.target == g.root:
            report("root-incoming", e.id, "root has an incoming edge")
        graph.add_edge(e.source, e.target)

    for v in g.vertices:
        if v != ATTACH_ROOT and not ID_PATTERN.fullmatch(v):
            report("bad-id", v, "vertex id is not an identifier")
        if sum(1 for e in g.edges if e.target == v) > 1:
            report("not-a-tree", v, "vertex has more than one incoming edge")

    if g.root in vertex_set and not nx.is_arborescence(graph):
        try:
            cycle = nx.find_cycle(graph, source=g.root)
            report("not-a-tree", cycle[0][0], "cycle through " + " -> ".join(u for u, _ in cycle))
        except nx.NetworkXNoCycle:
            pass
        reachable = nx.descendants(graph, g.root) | {g.root}
        for v in g.vertices:
            if v not in reachable:
                report("not-a-tree", v, "vertex unreachable from root")
        if not found:
            report("not-a-tree", g.root, "edges do not form a rooted tree")

    for host, attached in g.attachments.items():
        if host not in seen_edges:
            report("unknown-edge", host, "attachment on undeclared edge")
            continue
        if not g.edge(host).is_dense:
            report("attach-on-point", host, "attachments are only allowed on dense edges")
        for index, attachment in enumerate(attached):
            found.extend(_violations(attachment.child, prefix=f"{prefix}{host}.att{index}/"))
    return found


def require_valid(g: SymbolicGst) -> None:
    report = validate(g)
    if not report.valid:
        raise InvalidModelError(report)


def scoped_gst(g: SymbolicGst, scope: Scope) -> SymbolicGst:
    current = g
    for host, index in scope:
        current = current.attachments_of(host)[index].child
    return current


def cut_classes(g: SymbolicGst) -> list[CutClass]:
    """Cut classes in depth-first order: vertex, then per outgoing edge its interior,
    attachment points and their subtrees, then the edge's target."""
    classes: list[CutClass] = []
    _collect(g, g.root, (), classes, include_root=True)
    return classes


def _collect(
    g: SymbolicGst,
    vertex: str,
    scope: Scope,
    out: list[CutClass],
    *,
    include_root: bool,
) -> None:
    if include_root:
        out.append(vertex_cut(vertex, scope))
    for e in g.outgoing(vertex):
        if e.is_dense:
            out.append(interior_cut(e.id, scope))
            for index, attachment in enumerate(g.attachments_of(e.id)):
                out.append(attach_cut(e.id, index, scope))
                child = attachment.child
                _collect(child, child.root, scope + ((e.id, index),), out, include_root=False)
        _collect(g, e.target, scope, out, include_root=True)


# A token is one step of the path from the top root to a node:
# ("full", scope, edge, 0) walks an entire edge, ("part", scope, edge, place)
# stops inside a dense edge. For cut classes place is the attachment index
# (-1 for plain interior points); sampled trees use the sample slot instead.
Token = tuple[str, Scope, str, int]


@dataclass(frozen=True)
class PathStep:
    token: Token
    segment: Segment


@dataclass
class _PathIndex:
    g: SymbolicGst
    cache: dict[CutClass, tuple[PathStep, ...]] = field(default_factory=dict)

    def path(self, c: CutClass) -> tuple[PathStep, ...]:
        if c not in self.cache:
            self.cache[c] = tuple(self._build(c))
        return self.cache[c]

    def _build(self, c: CutClass) -> list[PathStep]:
        steps: list[PathStep] = []
        current = self.g
        scope: Scope = ()
        for host, index in c.scope:
            steps.extend(_vertex_path(current, current.edge(host).source, scope))
            steps.append(_partial(current.edge(host), scope, index))
            current = current.attachments_of(host)[index].child
            scope = scope + ((host, index),)
        if c.kind is CutKind.VERTEX:
            steps.extend(_vertex_path(current, c.ref, scope))
        else:
            e = current.edge(c.ref)
            steps.extend(_vertex_path(current, e.source, scope))
            steps.append(_partial(e, scope, -1 if c.attachment is None else c.attachment))
        return steps


def _partial(e: Edge, scope: Scope, attachment: int) -> PathStep:
    return PathStep(("part", scope, e.id, attachment), dense(e.segment.label))


def _vertex_path(g: SymbolicGst, vertex: str, scope: Scope) -> list[PathStep]:
    steps: list[PathStep] = []
    current = vertex
    while current != g.root:
        e = g.incoming(current)
        if e is None:
            break
        steps.append(PathStep(("full", scope, e.id, 0), e.segment))
        current = e.source
    steps.reverse()
    return steps


def _same_edge(a: Token, b: Token) -> bool:
    return a[1] == b[1] and a[2] == b[2]


def path_words(p1: Sequence[PathStep], p2: Sequence[PathStep]) -> set[ExecWord]:
    """Words from a node at ``p1`` to a node at ``p2``.

    A node inside a dense edge also reaches, through an order-preserving
    rescaling of the rest of that edge, a copy of every node whose path runs
    through the same edge.
    """
    m = len(p1)
    if m == 0 or p1[-1].token[0] == "full":
        if len(p2) > m and all(a.token == b.token for a, b in zip(p1, p2)):
            return {normalize(s.segment for s in p2[m:])}
        return set()

    # p1 stops inside a dense edge: p2 must share the prefix and pass through the same edge
    if len(p2) < m or any(a.token != b.token for a, b in zip(p1[:-1], p2[: m - 1])):
        return set()
    last, there = p1[-1], p2[m - 1]
    if not _same_edge(last.token, there.token):
        return set()
    rest = [s.segment for s in p2[m:]]
    found = {normalize([last.segment, *rest])}
    if there.token == last.token and rest:
        # through the very attachment point p1 sits on
        found.add(normalize(rest))
    return found


def exec_between_all(g: SymbolicGst, c1: CutClass, c2: CutClass) -> frozenset[ExecWord]:
    """Every canonical word of a trajectory ``(p1, p2]`` with ``p1`` in ``c1``, ``p2`` in ``c2``."""
    index = _PathIndex(g)
    return frozenset(path_words(index.path(c1), index.path(c2)))


def exec_between(g: SymbolicGst, c1: CutClass, c2: CutClass) -> ExecWord | None:
    """The word of the nearest representative pair, or None when no representative of
    ``c2`` lies strictly above one of ``c1``."""
    found = exec_between_all(g, c1, c2)
    if not found:
        return None
    return min(found, key=lambda w: (len(w), w.sort_key))


class WordTable:
    """All inter-class words of one GST, computed once over shared paths."""

    def __init__(self, g: SymbolicGst):
        self.g = g
        self.classes = cut_classes(g)
        self._index = _PathIndex(g)

    def words(self, c1: CutClass, c2: CutClass) -> set[ExecWord]:
        return path_words(self._index.path(c1), self._index.path(c2))


def _fresh(base: str, taken: set[str]) -> str:
    candidate = base
    counter = 1
    while candidate in taken:
        candidate = f"{base}{counter}"
        counter += 1
    taken.add(candidate)
    return candidate


def _subtree(g: SymbolicGst, vertex: str) -> tuple[list[str], list[Edge], dict[str, tuple[Attachment, ...]]]:
    vertices = [vertex]
    edges: list[Edge] = []
    frontier = [vertex]
    while frontier:
        current = frontier.pop(0)
        for e in g.outgoing(current):
            edges.append(e)
            vertices.append(e.target)
            frontier.append(e.target)
    attachments = {e.id: g.attachments_of(e.id) for e in edges if g.attachments_of(e.id)}
    return vertices, edges, attachments


def _rename(g: SymbolicGst, mapping: dict[str, str], edge_prefix: str, taken_edges: set[str]) -> tuple[list[Edge], dict[str, tuple[Attachment, ...]]]:
    edges: list[Edge] = []
    attachments: dict[str, tuple[Attachment, ...]] = {}
    for e in g.edges:
        new_id = _fresh(edge_prefix + e.id if e.id in taken_edges else e.id, taken_edges)
        edges.append(Edge(new_id, mapping[e.source], mapping[e.target], e.segment))
        if g.attachments_of(e.id):
            attachments[new_id] = tuple(Attachment(new_id, a.child) for a in g.attachments_of(e.id))
    return edges, attachments


def sub_gst(g: SymbolicGst, c: CutClass) -> SymbolicGst:
    """Symbolic presentation of the subtree rooted at a representative of ``c``."""
    local = scoped_gst(g, c.scope)
    if c.kind is CutKind.VERTEX:
        vertices, edges, attachments = _subtree(local, c.ref)
        return SymbolicGst(tuple(vertices), c.ref, tuple(edges), attachments, g.props)

    host = local.edge(c.ref)
    vertices, edges, attachments = _subtree(local, host.target)
    taken = set(vertices)
    root = _fresh(f"{host.id}_cut", taken)
    edges = [Edge(host.id, root, host.target, host.segment), *edges]
    if local.attachments_of(host.id):
        attachments[host.id] = local.attachments_of(host.id)
    all_vertices = [root, *vertices]

    if c.kind is CutKind.ATTACH_POINT:
        assert c.attachment is not None
        child = local.attachments_of(host.id)[c.attachment].child
        mapping: dict[str, str] = {}
        for v in child.vertices:
            mapping[v] = root if v == child.root else _fresh(v, taken)
        child_edges, child_attachments = _rename(
            child, mapping, f"{host.id}_att{c.attachment}_", {e.id for e in edges},
        )
        edges.extend(child_edges)
        attachments.update(child_attachments)
        all_vertices.extend(mapping[v] for v in child.vertices if v != child.root)

    return SymbolicGst(tuple(all_vertices), root, tuple(edges), attachments, g.props)


def from_discrete_st(root: str, steps: Iterable[tuple[str, str, str]]) -> SymbolicGst:
    """Embed an edge-labelled tree: each ``(parent, label, child)`` becomes a point edge,
    i.e. the label moves onto the child node."""
    vertices = [root]
    edges: list[Edge] = []
    for index, (parent, label, child) in enumerate(steps):
        for v in (parent, child):
            if v not in vertices:
                vertices.append(v)
        edges.append(Edge(f"e{index}", parent, child, point(label)))
    return SymbolicGst(tuple(vertices), root, tuple(edges))


def step_system(g: SymbolicGst) -> list[tuple[str, Segment, str]]:
    """One transition per edge of a discrete GST, labelled by its point segment."""
    return [(e.source, e.segment, e.target) for e in g.edges]
