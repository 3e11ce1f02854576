"""Execution words: canonical labels for order-equivalence classes of modal executions.

A word is a finite sequence of segments. A ``Point`` segment stands for a
one-element piece of a modal execution, a ``Dense`` segment for a half-open
real interval ``(x, y]`` carrying one label. The only order-equivalence that
can hide inside such a sequence is ``Dense l . Dense l == Dense l``, so a word
is canonical once those pairs are merged and two canonical words denote the
same class exactly when they are equal.
"""

from __future__ import annotations

import re
from collections.abc import Iterable
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from src.utils.errors import EmptyWordError, ParseError

LABEL_PATTERN = re.compile(r"[A-Za-z][A-Za-z0-9_.]*")


class SegmentShape(Enum):
    POINT = "P"
    DENSE = "D"


@dataclass(frozen=True)
class Segment:
    shape: SegmentShape
    label: str

    def __post_init__(self) -> None:
        if not LABEL_PATTERN.fullmatch(self.label):
            raise ValueError(f"invalid label: {self.label!r}")

    @property
    def is_dense(self) -> bool:
        return self.shape is SegmentShape.DENSE

    def __str__(self) -> str:
        return f"{self.shape.value} {self.label}"


def point(label: str) -> Segment:
    return Segment(SegmentShape.POINT, label)


def dense(label: str) -> Segment:
    return Segment(SegmentShape.DENSE, label)


def _mergeable(left: Segment, right: Segment) -> bool:
    return left.is_dense and right.is_dense and left.label == right.label


@dataclass(frozen=True)
class ExecWord:
    segments: tuple[Segment, ...]

    def __post_init__(self) -> None:
        if not self.segments:
            raise EmptyWordError()
        for left, right in zip(self.segments, self.segments[1:]):
            if _mergeable(left, right):
                raise ValueError(f"word is not canonical: {format_word(self)}")

    def __len__(self) -> int:
        return len(self.segments)

    def __str__(self) -> str:
        return format_word(self)

    @property
    def labels(self) -> frozenset[str]:
        return frozenset(seg.label for seg in self.segments)

    @property
    def sort_key(self) -> tuple[tuple[str, str], ...]:
        return tuple((seg.shape.value, seg.label) for seg in self.segments)


def normalize(raw: Iterable[Segment]) -> ExecWord:
    """Merge adjacent equal-label dense pairs to the unique canonical word."""
    merged: list[Segment] = []
    for seg in raw:
        if merged and _mergeable(merged[-1], seg):
            continue
        merged.append(seg)
    if not merged:
        raise EmptyWordError()
    return ExecWord(tuple(merged))


def word(*segments: Segment) -> ExecWord:
    return normalize(segments)


def concat(w1: ExecWord, w2: ExecWord) -> ExecWord:
    return normalize(w1.segments + w2.segments)


def equivalent(w1: ExecWord, w2: ExecWord) -> bool:
    return w1.segments == w2.segments


def splits(w: ExecWord) -> frozenset[tuple[ExecWord, ExecWord]]:
    """All pairs ``(w1, w2)`` of canonical words with ``concat(w1, w2) == w``.

    A cut either falls on a boundary between two segments or strictly inside
    a dense segment, in which case both halves keep that dense segment.
    """
    segs = w.segments
    result: set[tuple[ExecWord, ExecWord]] = set()
    for i in range(1, len(segs)):
        result.add((ExecWord(segs[:i]), ExecWord(segs[i:])))
    for i, seg in enumerate(segs):
        if seg.is_dense:
            result.add((ExecWord(segs[: i + 1]), ExecWord(segs[i:])))
    return frozenset(result)


def realize(w: ExecWord, k: int) -> list[tuple[Fraction, str]]:
    """Sample a concrete execution of ``w`` on the rationals.

    Segment ``i`` occupies ``(i, i + 1]``: a point segment contributes ``i + 1``,
    a dense one ``k`` evenly spaced interior positions plus its right endpoint.
    """
    if k < 1:
        raise ValueError("k must be positive")
    samples: list[tuple[Fraction, str]] = []
    for i, seg in enumerate(w.segments):
        if seg.is_dense:
            for j in range(1, k + 1):
                samples.append((i + Fraction(j, k + 1), seg.label))
        samples.append((Fraction(i + 1), seg.label))
    return samples


def format_word(w: ExecWord) -> str:
    return ", ".join(str(seg) for seg in w.segments)


_WORD_TOKEN = re.compile(r"\s*(?:(?P<comma>,)|(?P<ident>[A-Za-z][A-Za-z0-9_.]*)|(?P<bad>\S))")


def parse_word(text: str, *, offset: int = 0) -> ExecWord:
    """Parse ``seg ("," seg)*`` with ``seg := ("D"|"P") label``; the result is normalized.

    ``offset`` shifts reported positions when the word is embedded in a larger text.
    """
    tokens: list[tuple[str, str, int]] = []
    pos = 0
    while pos < len(text):
        match = _WORD_TOKEN.match(text, pos)
        if match is None:
            break
        kind = match.lastgroup or "bad"
        start = match.start(kind)
        if kind == "bad":
            raise ParseError(f"unexpected character {match.group(kind)!r}", position=offset + start)
        tokens.append((kind, match.group(kind), start))
        pos = match.end()

    segments: list[Segment] = []
    index = 0
    end = offset + len(text)
    while True:
        if index >= len(tokens):
            raise ParseError("expected segment shape 'D' or 'P'", position=end)
        kind, value, start = tokens[index]
        if kind != "ident" or value not in ("D", "P"):
            raise ParseError(f"expected segment shape 'D' or 'P', got {value!r}", position=offset + start)
        if index + 1 >= len(tokens) or tokens[index + 1][0] != "ident":
            where = offset + tokens[index + 1][2] if index + 1 < len(tokens) else end
            raise ParseError("missing label", position=where)
        segments.append(Segment(SegmentShape(value), tokens[index + 1][1]))
        index += 2
        if index == len(tokens):
            break
        kind, value, start = tokens[index]
        if kind != "comma":
            raise ParseError(f"expected ',' got {value!r}", position=offset + start)
        index += 1
    return normalize(segments)

