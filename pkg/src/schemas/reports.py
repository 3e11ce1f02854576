from pydantic import BaseModel


class TransitionItem(BaseModel):
    source: str
    word: str
    target: str


class KripkeReport(BaseModel):
    name: str
    states: list[str]
    initial: str | None = None
    transitions: list[TransitionItem]
    blocks: list[list[str]] | None = None


class ViolationItem(BaseModel):
    code: str
    subject: str
    message: str


class ValidationResponse(BaseModel):
    valid: bool
    violations: list[ViolationItem]


class VerdictResponse(BaseModel):
    command: str
    holds: bool
    formula: str | None = None
    relation: list[tuple[str, str]] | None = None


class CheckResponse(BaseModel):
    formula: str
    state: str
    holds: bool


class SchemaItem(BaseModel):
    holds: bool
    counterexample: str | None = None


class SchemataResponse(BaseModel):
    transitivity: SchemaItem
    weak_density: SchemaItem


class StratifiedResponse(BaseModel):
    first: str
    second: str
    depth: int
    limit: int
    unknown_beyond: int | None = None


class ImageFiniteResponse(BaseModel):
    image_finite: bool
    witness: KripkeReport | None = None
    witness_word: str | None = None
    class_counts: list[int] | None = None


class ErrorResponse(BaseModel):
    error: str
    line: int | None = None
    column: int | None = None
    position: int | None = None
