"""GHML / HML abstract syntax.

Both logics share one tree: diamond modalities are indexed by canonical
execution words, which is exactly what the surrogate Kripke structures use
as transition labels. Derived operators are built from the core nodes.
"""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass

from src.models.exec_words import ExecWord


@dataclass(frozen=True)
class Top:
    pass


@dataclass(frozen=True)
class Prop:
    name: str


@dataclass(frozen=True)
class Not:
    body: Formula


@dataclass(frozen=True)
class And:
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Diamond:
    word: ExecWord
    body: Formula


Formula = Top | Prop | Not | And | Diamond

TRUE = Top()


def bottom() -> Formula:
    return Not(TRUE)


def disj(left: Formula, right: Formula) -> Formula:
    return Not(And(Not(left), Not(right)))


def implies(left: Formula, right: Formula) -> Formula:
    return Not(And(left, Not(right)))


def box(w: ExecWord, body: Formula) -> Formula:
    return Not(Diamond(w, Not(body)))


def conj_all(parts: Iterable[Formula]) -> Formula:
    """Left-nested conjunction of distinct parts in order; ``true`` when empty."""
    unique = list(dict.fromkeys(parts))
    if not unique:
        return TRUE
    result = unique[0]
    for part in unique[1:]:
        result = And(result, part)
    return result


def modal_depth(f: Formula) -> int:
    match f:
        case Top() | Prop():
            return 0
        case Not(body):
            return modal_depth(body)
        case And(left, right):
            return max(modal_depth(left), modal_depth(right))
        case Diamond(_, body):
            return 1 + modal_depth(body)
    raise TypeError(f"not a formula: {f!r}")


def subformulas(f: Formula) -> list[Formula]:
    """Post-order, so every entry follows its children."""
    out: list[Formula] = []
    match f:
        case Not(body) | Diamond(_, body):
            out.extend(subformulas(body))
        case And(left, right):
            out.extend(subformulas(left))
            out.extend(subformulas(right))
    out.append(f)
    return out


def variables(f: Formula) -> frozenset[str]:
    return frozenset(g.name for g in subformulas(f) if isinstance(g, Prop))
