"""Seeded random words, GSTs, Kripke structures and formulas for property runs."""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np

from src.models.exec_words import ExecWord, Segment, SegmentShape, dense, normalize, point, word
from src.models.formula import TRUE, And, Diamond, Formula, Not, Prop
from src.models.gst import ATTACH_ROOT, Attachment, Edge, SymbolicGst
from src.models.kripke import KripkeStructure, Transition

LABELS = ("a", "b", "c")

FORMULA_WORDS = (
    word(dense("a")),
    word(point("a")),
    word(dense("b")),
    word(point("b")),
    word(dense("a"), point("b")),
    word(point("a"), point("b")),
)


def rng_for(seed: int) -> np.random.Generator:
    return np.random.default_rng(seed)


def random_segment(rng: np.random.Generator, labels: Sequence[str] = LABELS) -> Segment:
    shape = SegmentShape.DENSE if rng.random() < 0.5 else SegmentShape.POINT
    return Segment(shape, str(rng.choice(labels)))


def random_raw(rng: np.random.Generator, max_len: int = 8, labels: Sequence[str] = LABELS) -> list[Segment]:
    length = int(rng.integers(1, max_len + 1))
    return [random_segment(rng, labels) for _ in range(length)]


def random_word(rng: np.random.Generator, max_len: int = 8, labels: Sequence[str] = LABELS) -> ExecWord:
    return normalize(random_raw(rng, max_len, labels))


def _random_tree(
    rng: np.random.Generator,
    root: str,
    prefix: str,
    edges: int,
    labels: Sequence[str],
    dense_ratio: float,
) -> tuple[list[str], list[Edge]]:
    vertices = [root]
    built: list[Edge] = []
    for i in range(edges):
        parent = vertices[int(rng.integers(0, len(vertices)))]
        child = f"{prefix}v{i}"
        label = str(rng.choice(labels))
        seg = dense(label) if rng.random() < dense_ratio else point(label)
        built.append(Edge(f"{prefix}e{i}", parent, child, seg))
        vertices.append(child)
    return vertices, built


def random_gst(
    rng: np.random.Generator,
    max_edges: int = 6,
    max_attachments: int = 1,
    labels: Sequence[str] = ("a", "b"),
    dense_ratio: float = 0.5,
) -> SymbolicGst:
    edge_count = int(rng.integers(0, max_edges + 1))
    vertices, edges = _random_tree(rng, "r", "", edge_count, labels, dense_ratio)
    attachments: dict[str, tuple[Attachment, ...]] = {}
    dense_edges = [e for e in edges if e.is_dense]
    for n in range(max_attachments):
        if not dense_edges or rng.random() < 0.4:
            break
        host = dense_edges[int(rng.integers(0, len(dense_edges)))]
        child_vertices, child_edges = _random_tree(
            rng, ATTACH_ROOT, f"k{n}", int(rng.integers(1, 3)), labels, dense_ratio,
        )
        child = SymbolicGst(tuple(child_vertices), ATTACH_ROOT, tuple(child_edges))
        attachments[host.id] = (*attachments.get(host.id, ()), Attachment(host.id, child))
    return SymbolicGst(tuple(vertices), "r", tuple(edges), attachments)


def random_discrete_gst(rng: np.random.Generator, max_edges: int = 5, labels: Sequence[str] = ("a", "b")) -> SymbolicGst:
    return random_gst(rng, max_edges, 0, labels, dense_ratio=0.0)


def random_kripke(
    rng: np.random.Generator,
    max_states: int = 5,
    words: Sequence[ExecWord] = FORMULA_WORDS[:3],
    edge_probability: float = 0.3,
    props: Sequence[str] = ("p",),
    name: str = "random",
) -> KripkeStructure:
    n = int(rng.integers(1, max_states + 1))
    states = [f"s{i}" for i in range(n)]
    transitions: list[Transition] = []
    for s in states:
        for w in words:
            for t in states:
                if rng.random() < edge_probability:
                    transitions.append((s, w, t))
    valuation = {p: frozenset(s for s in states if rng.random() < 0.5) for p in props}
    return KripkeStructure(tuple(states), tuple(transitions), valuation, states[0], name=name)


def random_formula(
    rng: np.random.Generator,
    depth: int = 4,
    words: Sequence[ExecWord] = FORMULA_WORDS,
    props: Sequence[str] = (),
) -> Formula:
    choice = float(rng.random())
    if depth == 0 or choice < 0.15:
        if props and rng.random() < 0.5:
            return Prop(str(rng.choice(props)))
        return TRUE
    if choice < 0.35:
        return Not(random_formula(rng, depth, words, props))
    if choice < 0.55:
        return And(random_formula(rng, depth - 1, words, props), random_formula(rng, depth - 1, words, props))
    w = words[int(rng.integers(0, len(words)))]
    return Diamond(w, random_formula(rng, depth - 1, words, props))
