"""Graphviz DOT rendering of Kripke structures."""

from __future__ import annotations

from graphviz import Digraph

from src.engine.bisim import Partition
from src.models.exec_words import format_word
from src.models.kripke import KripkeStructure


def to_dot(ks: KripkeStructure, partition: Partition | None = None) -> str:
    """Transition words become edge labels; with a partition every node is
    annotated with its block id."""
    dot = Digraph(name=ks.name, graph_attr={"rankdir": "LR"}, node_attr={"shape": "ellipse"})
    if ks.initial is not None:
        dot.node("__init", "", shape="point")
    for s in ks.states:
        label = s if partition is None else f"{s}\nB{partition.block_of(s)}"
        props = sorted(ks.labels_at(s))
        if props:
            label += "\n{" + ", ".join(props) + "}"
        dot.node(s, label)
    if ks.initial is not None:
        dot.edge("__init", ks.initial)
    for s, w, t in ks.transitions:
        dot.edge(s, t, format_word(w))
    return dot.source
