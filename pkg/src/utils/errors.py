from __future__ import annotations

from typing import TYPE_CHECKING, Any

if TYPE_CHECKING:
    from src.engine.gst_model import ValidationReport


class GstLogicError(Exception):
    """Base class for every error raised by this package."""


class ParseError(GstLogicError, ValueError):
    """Syntax error in a word, formula or model text, with its source location."""

    def __init__(
        self,
        message: str,
        *,
        position: int | None = None,
        line: int | None = None,
        column: int | None = None,
    ):
        self.message = message
        self.position = position
        self.line = line
        self.column = column
        super().__init__(self._render())

    def _render(self) -> str:
        if self.line is not None:
            return f"line {self.line}, column {self.column}: {self.message}"
        if self.position is not None:
            return f"position {self.position}: {self.message}"
        return self.message


class EmptyWordError(GstLogicError, ValueError):
    def __init__(self) -> None:
        super().__init__("empty word")


class InvalidModelError(GstLogicError):
    """A symbolic GST failed validation where a valid one is required."""

    def __init__(self, report: ValidationReport):
        self.report = report
        details = "; ".join(str(v) for v in report.violations)
        super().__init__(f"invalid model: {details}")


class UnknownStateError(GstLogicError, LookupError):
    def __init__(self, state: Any, where: str = "structure"):
        self.state = state
        super().__init__(f"unknown state {state!r} in {where}")

    def __str__(self) -> str:
        return str(self.args[0])


class UnsupportedModelError(GstLogicError):
    pass


class BisimilarPairError(GstLogicError):
    pass


class InvalidHintError(GstLogicError):
    """A sampled family member is not covered by the family's collapse hint."""


class HintExhaustedError(GstLogicError):
    """A family supplies no representatives at the requested depth."""

    def __init__(self, family: str, depth: int):
        self.family = family
        self.depth = depth
        super().__init__(f"family {family!r} has no collapse hint at depth {depth}")


class RankUndefinedError(GstLogicError):
    def __init__(self, state: str):
        self.state = state
        super().__init__(f"rank undefined on reached state {state!r}")
