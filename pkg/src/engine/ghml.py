"""GHML / HML formula text and model checking."""

from __future__ import annotations

import re
from collections.abc import Iterable
from dataclasses import dataclass

from src.config import settings
from src.engine.gst_model import require_valid
from src.engine.surrogate import ConcretePoint, build_surrogate, sample_points
from src.models.exec_words import format_word, parse_word
from src.models.formula import (
    TRUE,
    And,
    Diamond,
    Formula,
    Not,
    Prop,
    Top,
    bottom,
    box,
    disj,
    implies,
    subformulas,
)
from src.models.gst import SymbolicGst
from src.models.kripke import KripkeStructure
from src.utils.errors import ParseError
from src.utils.logger import logger

_TOKEN = re.compile(
    r"\s*(?:"
    r"(?P<arrow>->)"
    r"|(?P<word><[^<>]*>|\[[^\[\]]*\])"
    r"|(?P<var>@[A-Za-z_][A-Za-z0-9_.]*)"
    r"|(?P<name>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op>[~&|()])"
    r"|(?P<bad>\S)"
    r")"
)


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    position: int


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    pos = 0
    while pos < len(text):
        match = _TOKEN.match(text, pos)
        if match is None or match.lastgroup is None:
            break
        kind = match.lastgroup
        start = match.start(kind)
        if kind == "bad":
            raise ParseError(f"unexpected character {match.group(kind)!r}", position=start)
        tokens.append(_Token(kind, match.group(kind), start))
        pos = match.end()
    return tokens


class _FormulaParser:
    """Recursive descent; ``->`` binds weakest and associates to the right,
    then ``|``, then ``&``, then the prefix operators."""

    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.index = 0

    def parse(self) -> Formula:
        f = self._implication()
        if self.index < len(self.tokens):
            token = self.tokens[self.index]
            raise ParseError(f"unexpected {token.text!r}", position=token.position)
        return f

    def _peek(self) -> _Token | None:
        return self.tokens[self.index] if self.index < len(self.tokens) else None

    def _take(self) -> _Token:
        token = self._peek()
        if token is None:
            raise ParseError("unexpected end of formula", position=len(self.text))
        self.index += 1
        return token

    def _at(self, text: str) -> bool:
        token = self._peek()
        return token is not None and token.text == text

    def _implication(self) -> Formula:
        left = self._disjunction()
        if self._at("->"):
            self._take()
            return implies(left, self._implication())
        return left

    def _disjunction(self) -> Formula:
        left = self._conjunction()
        while self._at("|"):
            self._take()
            left = disj(left, self._conjunction())
        return left

    def _conjunction(self) -> Formula:
        left = self._unary()
        while self._at("&"):
            self._take()
            left = And(left, self._unary())
        return left

    def _unary(self) -> Formula:
        token = self._take()
        if token.text == "~":
            return Not(self._unary())
        if token.kind == "word":
            w = parse_word(token.text[1:-1], offset=token.position + 1)
            body = self._unary()
            return Diamond(w, body) if token.text[0] == "<" else box(w, body)
        if token.kind == "var":
            return Prop(token.text[1:])
        if token.text == "true":
            return TRUE
        if token.text == "false":
            return bottom()
        if token.text == "(":
            inner = self._implication()
            closing = self._take()
            if closing.text != ")":
                raise ParseError(f"expected ')' got {closing.text!r}", position=closing.position)
            return inner
        raise ParseError(f"unexpected {token.text!r}", position=token.position)


def parse_formula(text: str) -> Formula:
    return _FormulaParser(text).parse()


def format_formula(f: Formula) -> str:
    match f:
        case Top():
            return "true"
        case Prop(name):
            return f"@{name}"
        case Not(body):
            return f"~{format_formula(body)}"
        case And(left, right):
            return f"({format_formula(left)} & {format_formula(right)})"
        case Diamond(w, body):
            return f"<{format_word(w)}> {format_formula(body)}"
    raise TypeError(f"not a formula: {f!r}")


def satisfying_states(ks: KripkeStructure, f: Formula) -> frozenset[str]:
    """Bottom-up labelling: the set of states where each subformula holds."""
    sat: dict[Formula, frozenset[str]] = {}
    everywhere = frozenset(ks.states)
    for g in subformulas(f):
        if g in sat:
            continue
        match g:
            case Top():
                sat[g] = everywhere
            case Prop(name):
                if name not in ks.valuation:
                    logger.warning("ghml.unknown_variable", variable=name, structure=ks.name)
                sat[g] = ks.valuation.get(name, frozenset())
            case Not(body):
                sat[g] = everywhere - sat[body]
            case And(left, right):
                sat[g] = sat[left] & sat[right]
            case Diamond(w, body):
                sat[g] = frozenset(s for s, v, t in ks.transitions if v == w and t in sat[body])
    return sat[f]


def mc_kripke(ks: KripkeStructure, state: str, f: Formula) -> bool:
    ks.require(state)
    return state in satisfying_states(ks, f)


def to_hml(f: Formula) -> Formula:
    """Read a GHML formula over the surrogate: each class modality becomes the
    surrogate label carrying the same word."""
    match f:
        case Top() | Prop():
            return f
        case Not(body):
            return Not(to_hml(body))
        case And(left, right):
            return And(to_hml(left), to_hml(right))
        case Diamond(w, body):
            return Diamond(w, to_hml(body))
    raise TypeError(f"not a formula: {f!r}")


def to_ghml(f: Formula) -> Formula:
    """Converse of ``to_hml``: surrogate labels read back as class modalities."""
    match f:
        case Top() | Prop():
            return f
        case Not(body):
            return Not(to_ghml(body))
        case And(left, right):
            return And(to_ghml(left), to_ghml(right))
        case Diamond(w, body):
            return Diamond(w, to_ghml(body))
    raise TypeError(f"not a formula: {f!r}")


def mc_gst(g: SymbolicGst, f: Formula) -> bool:
    return mc_gst_batch(g, [f])[0]


def mc_gst_batch(g: SymbolicGst, formulas: Iterable[Formula]) -> list[bool]:
    """``mc_gst`` for several formulas over one surrogate."""
    ks = build_surrogate(g)
    assert ks.initial is not None
    return [mc_kripke(ks, ks.initial, to_hml(f)) for f in formulas]


def mc_gst_direct(g: SymbolicGst, f: Formula, k: int | None = None) -> bool:
    """Evaluate satisfaction over sampled concrete nodes, trajectory by trajectory."""
    k = settings.sample_density if k is None else k
    if k < 2:
        raise ValueError("direct checking needs at least two samples per dense region")
    require_valid(g)
    sample = sample_points(g, k)
    props = set(g.props)
    moves = [(p, w, q) for p in sample.points for q in sample.points for w in sample.words(p, q)]
    sat: dict[Formula, set[ConcretePoint]] = {}
    for h in subformulas(f):
        if h in sat:
            continue
        match h:
            case Top():
                sat[h] = set(sample.points)
            case Prop(name):
                sat[h] = set(sample.points) if name in props else set()
            case Not(body):
                sat[h] = set(sample.points) - sat[body]
            case And(left, right):
                sat[h] = sat[left] & sat[right]
            case Diamond(w, body):
                sat[h] = {p for p, v, q in moves if v == w and q in sat[body]}
    return sample.root in sat[f]
