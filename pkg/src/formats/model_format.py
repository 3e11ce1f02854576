"""Line-oriented text format for symbolic GSTs and Kripke structures.

::

    # comment
    gst unit {
      labels a, b;
      props p;
      root r;
      edge e1: r -> t [dense a];
      attach e1 { edge f1: @ -> u [point b]; }
    }

    kripke m {
      labels a;
      props p;
      state s0 init;
      state s1;
      prop p: s0, s1;
      trans s0 -> s1 [D a];
      alphabet [D a] [D a, P b];
    }
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from src.models.exec_words import ExecWord, Segment, SegmentShape, format_word, parse_word
from src.models.gst import ATTACH_ROOT, ID_PATTERN, Attachment, Edge, SymbolicGst
from src.models.kripke import KripkeStructure, Transition
from src.utils.errors import GstLogicError, ParseError

STATE_PATTERN = re.compile(r"[A-Za-z0-9_@][A-Za-z0-9_.@/]*")

_TOKEN = re.compile(
    r"(?P<space>[ \t\r]+)"
    r"|(?P<newline>\n)"
    r"|(?P<comment>#[^\n]*)"
    r"|(?P<arrow>->)"
    r"|(?P<bracket>\[[^\]\n]*\])"
    r"|(?P<ident>[A-Za-z0-9_@][A-Za-z0-9_.@/]*)"
    r"|(?P<punct>[{};:,])"
    r"|(?P<bad>.)"
)

_SHAPES = {"dense": SegmentShape.DENSE, "point": SegmentShape.POINT}


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    line, line_start = 1, 0
    for match in _TOKEN.finditer(text):
        kind = match.lastgroup or "bad"
        column = match.start() - line_start + 1
        if kind == "newline":
            line += 1
            line_start = match.end()
            continue
        if kind in ("space", "comment"):
            continue
        if kind == "bad":
            raise ParseError(f"unexpected character {match.group()!r}", line=line, column=column)
        tokens.append(Token(kind, match.group(), line, column))
    return tokens


@dataclass(frozen=True)
class ModelFile:
    kind: str
    name: str
    labels: tuple[str, ...] = ()
    props: tuple[str, ...] = ()
    gst: SymbolicGst | None = None
    kripke: KripkeStructure | None = None


@dataclass
class _GstDraft:
    root: str | None = None
    vertices: list[str] = field(default_factory=list)
    edges: list[Edge] = field(default_factory=list)
    attachments: dict[str, list[Attachment]] = field(default_factory=dict)

    def note(self, vertex: str) -> None:
        if vertex not in self.vertices:
            self.vertices.append(vertex)


class _Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.index = 0
        self.labels: list[str] = []
        self.props: list[str] = []

    # -- token helpers

    def _peek(self) -> Token | None:
        return self.tokens[self.index] if self.index < len(self.tokens) else None

    def _error(self, message: str, token: Token | None = None) -> ParseError:
        token = token or self._peek()
        if token is None:
            last = self.tokens[-1] if self.tokens else None
            line = last.line if last else 1
            column = last.column + len(last.text) if last else 1
            return ParseError(f"{message} (at end of input)", line=line, column=column)
        return ParseError(message, line=token.line, column=token.column)

    def _take(self, kind: str | None = None, text: str | None = None) -> Token:
        token = self._peek()
        expected = text or kind or "token"
        if token is None:
            raise self._error(f"expected {expected!r}")
        if (kind and token.kind != kind) or (text and token.text != text):
            raise self._error(f"expected {expected!r}, got {token.text!r}", token)
        self.index += 1
        return token

    def _at(self, text: str) -> bool:
        token = self._peek()
        return token is not None and token.text == text

    def _ident(self, pattern: re.Pattern[str] = STATE_PATTERN, what: str = "identifier") -> Token:
        token = self._take("ident")
        if not pattern.fullmatch(token.text):
            raise self._error(f"invalid {what} {token.text!r}", token)
        return token

    def _names(self) -> list[Token]:
        names = [self._take("ident")]
        while self._at(","):
            self._take(text=",")
            names.append(self._take("ident"))
        self._take(text=";")
        return names

    def _word(self, token: Token) -> ExecWord:
        try:
            w = parse_word(token.text[1:-1])
        except ParseError as exc:
            column = token.column + 1 + (exc.position or 0)
            raise ParseError(exc.message, line=token.line, column=column) from exc
        self._check_labels(w.labels, token)
        return w

    def _check_labels(self, labels: frozenset[str], token: Token) -> None:
        for label in sorted(labels):
            if label not in self.labels:
                raise self._error(f"undeclared label {label!r}", token)

    # -- grammar

    def parse(self) -> ModelFile:
        head = self._take("ident")
        if head.text not in ("gst", "kripke"):
            raise self._error(f"expected 'gst' or 'kripke', got {head.text!r}", head)
        name = self._take("ident").text
        self._take(text="{")
        model = self._gst(name) if head.text == "gst" else self._kripke(name)
        if self._peek() is not None:
            raise self._error("unexpected text after model")
        return model

    def _header(self, keyword: str) -> bool:
        if keyword == "labels" and self._at("labels"):
            self._take()
            for token in self._names():
                if not re.fullmatch(r"[A-Za-z][A-Za-z0-9_.]*", token.text):
                    raise self._error(f"invalid label {token.text!r}", token)
                self.labels.append(token.text)
            return True
        if keyword == "props" and self._at("props"):
            self._take()
            self.props.extend(t.text for t in self._names())
            return True
        return False

    def _gst(self, name: str) -> ModelFile:
        draft = _GstDraft()
        while not self._at("}"):
            if self._header("labels") or self._header("props"):
                continue
            if self._at("root"):
                self._take()
                root = self._ident(ID_PATTERN, "vertex id")
                draft.root = root.text
                draft.note(root.text)
                self._take(text=";")
                continue
            self._gst_statement(draft)
        self._take(text="}")
        if draft.root is None:
            raise self._error("gst has no root declaration")
        return ModelFile(
            "gst",
            name,
            tuple(self.labels),
            tuple(self.props),
            gst=self._freeze(draft, draft.root, tuple(self.props)),
        )

    def _gst_statement(self, draft: _GstDraft) -> None:
        token = self._peek()
        if token is not None and token.text == "edge":
            self._edge(draft)
        elif token is not None and token.text == "attach":
            self._attach(draft)
        else:
            raise self._error(f"unexpected {token.text if token else 'end of input'!r}")

    def _edge(self, draft: _GstDraft) -> None:
        self._take(text="edge")
        edge_id = self._ident(ID_PATTERN, "edge id")
        self._take(text=":")
        source = self._take("ident")
        self._take("arrow")
        target = self._ident(ID_PATTERN, "vertex id")
        spec = self._take("bracket")
        parts = spec.text[1:-1].split()
        if len(parts) != 2 or parts[0] not in _SHAPES:
            raise self._error("expected [dense LABEL] or [point LABEL]", spec)
        self._check_labels(frozenset({parts[1]}), spec)
        self._take(text=";")
        for endpoint in (source, target):
            if endpoint.text != ATTACH_ROOT and not ID_PATTERN.fullmatch(endpoint.text):
                raise self._error(f"invalid vertex id {endpoint.text!r}", endpoint)
        draft.note(source.text)
        draft.note(target.text)
        draft.edges.append(Edge(edge_id.text, source.text, target.text, Segment(_SHAPES[parts[0]], parts[1])))

    def _attach(self, draft: _GstDraft) -> None:
        self._take(text="attach")
        host = self._ident(ID_PATTERN, "edge id")
        self._take(text="{")
        child = _GstDraft(root=ATTACH_ROOT, vertices=[ATTACH_ROOT])
        while not self._at("}"):
            self._gst_statement(child)
        self._take(text="}")
        draft.attachments.setdefault(host.text, []).append(
            Attachment(host.text, self._freeze(child, ATTACH_ROOT, ())),
        )

    def _freeze(self, draft: _GstDraft, root: str, props: tuple[str, ...]) -> SymbolicGst:
        return SymbolicGst(
            tuple(draft.vertices),
            root,
            tuple(draft.edges),
            {host: tuple(items) for host, items in draft.attachments.items()},
            props,
        )

    def _kripke(self, name: str) -> ModelFile:
        states: list[str] = []
        initial: str | None = None
        valuation: dict[str, set[str]] = {}
        transitions: dict[Transition, None] = {}
        alphabet: list[ExecWord] | None = None
        pending: list[tuple[Token, list[Token]]] = []
        moves: list[tuple[Token, Token, ExecWord]] = []

        while not self._at("}"):
            if self._header("labels") or self._header("props"):
                continue
            keyword = self._take("ident")
            if keyword.text == "state":
                state = self._ident(what="state id")
                if state.text in states:
                    raise self._error(f"state {state.text!r} declared twice", state)
                states.append(state.text)
                if self._at("init"):
                    self._take()
                    if initial is not None:
                        raise self._error("second initial state", state)
                    initial = state.text
                self._take(text=";")
            elif keyword.text == "prop":
                prop = self._take("ident")
                self._take(text=":")
                holders: list[Token] = []
                if not self._at(";"):
                    holders.append(self._take("ident"))
                    while self._at(","):
                        self._take(text=",")
                        holders.append(self._take("ident"))
                self._take(text=";")
                pending.append((prop, holders))
            elif keyword.text == "trans":
                source = self._take("ident")
                self._take("arrow")
                target = self._take("ident")
                label = self._word(self._take("bracket"))
                self._take(text=";")
                moves.append((source, target, label))
            elif keyword.text == "alphabet":
                alphabet = alphabet or []
                while not self._at(";"):
                    alphabet.append(self._word(self._take("bracket")))
                self._take(text=";")
            else:
                raise self._error(f"unexpected {keyword.text!r}", keyword)
        self._take(text="}")

        for p in self.props:
            valuation.setdefault(p, set())
        for prop, holders in pending:
            if prop.text not in self.props:
                raise self._error(f"undeclared proposition {prop.text!r}", prop)
            for holder in holders:
                if holder.text not in states:
                    raise self._error(f"undeclared state {holder.text!r}", holder)
                valuation[prop.text].add(holder.text)
        for source, target, label in moves:
            for end in (source, target):
                if end.text not in states:
                    raise self._error(f"undeclared state {end.text!r}", end)
            triple = (source.text, label, target.text)
            if triple in transitions:
                raise self._error("duplicate transition", source)
            transitions[triple] = None

        try:
            ks = KripkeStructure(
                tuple(states),
                tuple(transitions),
                {p: frozenset(v) for p, v in valuation.items()},
                initial,
                frozenset(alphabet) if alphabet is not None else None,
                name,
            )
        except GstLogicError as exc:
            raise self._error(str(exc)) from exc
        return ModelFile("kripke", name, tuple(self.labels), tuple(self.props), kripke=ks)


def parse_model(text: str) -> ModelFile:
    return _Parser(text).parse()


def _used_labels(ks: KripkeStructure) -> list[str]:
    labels: set[str] = set()
    for _, w, _ in ks.transitions:
        labels |= w.labels
    for w in ks.alphabet or ():
        labels |= w.labels
    return sorted(labels)


def format_model(m: ModelFile) -> str:
    lines = [f"{m.kind} {m.name} {{"]
    if m.labels:
        lines.append(f"  labels {', '.join(m.labels)};")
    if m.props:
        lines.append(f"  props {', '.join(m.props)};")
    if m.gst is not None:
        lines.append(f"  root {m.gst.root};")
        lines.extend(_format_gst_body(m.gst, "  "))
    elif m.kripke is not None:
        ks = m.kripke
        for s in ks.states:
            lines.append(f"  state {s}{' init' if s == ks.initial else ''};")
        for p in m.props:
            holders = [s for s in ks.states if s in ks.valuation.get(p, frozenset())]
            if holders:
                lines.append(f"  prop {p}: {', '.join(holders)};")
        for s, w, t in ks.transitions:
            lines.append(f"  trans {s} -> {t} [{format_word(w)}];")
        if ks.alphabet is not None:
            words = sorted(ks.alphabet, key=lambda w: w.sort_key)
            lines.append(f"  alphabet {' '.join(f'[{format_word(w)}]' for w in words)};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _format_gst_body(g: SymbolicGst, indent: str) -> list[str]:
    lines: list[str] = []
    for e in g.edges:
        shape = "dense" if e.is_dense else "point"
        lines.append(f"{indent}edge {e.id}: {e.source} -> {e.target} [{shape} {e.segment.label}];")
    for e in g.edges:
        for attachment in g.attachments_of(e.id):
            lines.append(f"{indent}attach {e.id} {{")
            lines.extend(_format_gst_body(attachment.child, indent + "  "))
            lines.append(f"{indent}}}")
    return lines


def gst_model_file(g: SymbolicGst, name: str = "g") -> ModelFile:
    return ModelFile("gst", name, tuple(sorted(g.labels())), g.props, gst=g)


def kripke_model_file(ks: KripkeStructure, name: str | None = None) -> ModelFile:
    name = name or re.sub(r"[^A-Za-z0-9_]+", "_", ks.name).strip("_") or "ks"
    return ModelFile("kripke", name, tuple(_used_labels(ks)), ks.props, kripke=ks)
