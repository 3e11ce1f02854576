"""Command-line front end.

Exit codes: 0 when the checked property holds (or the command just produced
output), 1 when it fails (a witness is printed), 2 on usage, parse or
validation errors.
"""

from __future__ import annotations

import argparse
import sys
from collections.abc import Callable, Sequence
from pathlib import Path
from typing import TextIO

from pydantic import BaseModel

from src import corpus
from src.config import settings
from src.engine.bisim import (
    bisim,
    distinguishing_formula,
    minimize,
    stratified,
    strong_bisim_discrete,
    weak_bisim_gst,
)
from src.engine.ghml import format_formula, mc_gst, mc_kripke, parse_formula
from src.engine.gst_model import validate
from src.engine.hm_classes import gen_fig3, gen_gx, image_finite, image_finite_bounded, schemata_check
from src.engine.lazy import LazyKripke, truncate
from src.engine.surrogate import build_surrogate
from src.formats.dot import to_dot
from src.formats.model_format import ModelFile, format_model, kripke_model_file, parse_model
from src.models.exec_words import format_word
from src.models.gst import SymbolicGst
from src.models.kripke import KripkeStructure
from src.schemas.reports import (
    CheckResponse,
    ErrorResponse,
    ImageFiniteResponse,
    KripkeReport,
    SchemaItem,
    SchemataResponse,
    StratifiedResponse,
    TransitionItem,
    ValidationResponse,
    VerdictResponse,
    ViolationItem,
)
from src.utils.errors import BisimilarPairError, GstLogicError, ParseError
from src.utils.logger import logger

GENERATORS = ("fig3", "gx", "unit", "denseattach")


class UsageError(Exception):
    pass


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise UsageError(f"{self.format_usage().strip()}\n{self.prog}: error: {message}")


class Output:
    def __init__(self, stdout: TextIO, as_json: bool):
        self.stdout = stdout
        self.as_json = as_json

    def emit(self, text: str, report: BaseModel) -> None:
        if self.as_json:
            self.stdout.write(report.model_dump_json(indent=2) + "\n")
        else:
            self.stdout.write(text if text.endswith("\n") else text + "\n")


# -- model resolution


def _read(source: str) -> ModelFile:
    return parse_model(Path(source).read_text(encoding="utf-8"))


def _generator(source: str) -> str | None:
    if not source.startswith("gen:"):
        return None
    name = source[4:]
    if name not in GENERATORS:
        raise UsageError(f"unknown generator {source!r}; choose from {', '.join('gen:' + g for g in GENERATORS)}")
    return name


def load_gst(source: str) -> SymbolicGst:
    name = _generator(source)
    if name in ("fig3", "gx"):
        raise UsageError(f"{source} is an infinite Kripke structure, not a GST")
    if name is not None:
        return corpus.gst(name)
    model = _read(source)
    if model.gst is None:
        raise UsageError(f"{source} does not contain a gst model")
    return model.gst


def load_lazy(source: str) -> LazyKripke | KripkeStructure:
    name = _generator(source)
    if name == "fig3":
        return gen_fig3().structure
    if name == "gx":
        return gen_gx()
    return load_kripke(source)


def load_kripke(source: str, depth: int | None = None, width: int | None = None) -> KripkeStructure:
    name = _generator(source)
    if name in ("fig3", "gx"):
        lz = gen_fig3().structure if name == "fig3" else gen_gx()
        return truncate(lz, settings.truncate_depth if depth is None else depth, width)
    if name is not None:
        return build_surrogate(corpus.gst(name))
    model = _read(source)
    if model.kripke is not None:
        return model.kripke
    assert model.gst is not None
    return build_surrogate(model.gst)


def _initial(ks: KripkeStructure, state: str | None) -> str:
    if state is not None:
        return ks.require(state)
    if ks.initial is None:
        raise UsageError(f"{ks.name} has no initial state; pass the state explicitly")
    return ks.initial


def kripke_report(ks: KripkeStructure, blocks: list[list[str]] | None = None) -> KripkeReport:
    return KripkeReport(
        name=ks.name,
        states=list(ks.states),
        initial=ks.initial,
        transitions=[TransitionItem(source=s, word=format_word(w), target=t) for s, w, t in ks.transitions],
        blocks=blocks,
    )


# -- commands


def cmd_surrogate(args: argparse.Namespace, out: Output) -> int:
    ks = build_surrogate(load_gst(args.gst))
    text = format_model(kripke_model_file(ks, "surrogate"))
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    if args.dot:
        Path(args.dot).write_text(to_dot(ks), encoding="utf-8")
    out.emit(f"wrote {args.out}" if args.out else text, kripke_report(ks))
    return 0


def cmd_minimize(args: argparse.Namespace, out: Output) -> int:
    ks = load_kripke(args.model, args.depth, args.width)
    partition, quotient = minimize(ks)
    blocks = [[s for s in ks.states if s in block] for block in partition.blocks]
    lines = [f"B{i}: {', '.join(block)}" for i, block in enumerate(blocks)]
    lines.append(format_model(kripke_model_file(quotient, "quotient")))
    out.emit("\n".join(lines), kripke_report(quotient, blocks))
    return 0


def _verdict(out: Output, command: str, equivalent: bool, formula: str | None, relation: list[tuple[str, str]] | None) -> int:
    text = "bisimilar" if equivalent else f"not bisimilar\n{formula}"
    out.emit(text, VerdictResponse(command=command, holds=equivalent, formula=formula, relation=relation))
    return 0 if equivalent else 1


def cmd_bisim(args: argparse.Namespace, out: Output) -> int:
    k1, k2 = load_kripke(args.first), load_kripke(args.second)
    s, t = None, None
    if args.states:
        parts = args.states.split(",")
        if len(parts) != 2:
            raise UsageError("--states expects two comma-separated state ids")
        s, t = parts
    verdict = bisim(k1, _initial(k1, s), k2, _initial(k2, t))
    formula = format_formula(verdict.formula) if verdict.formula is not None else None
    relation = sorted(verdict.relation) if verdict.relation is not None else None
    return _verdict(out, "bisim", verdict.equivalent, formula, relation)


def cmd_weakbisim(args: argparse.Namespace, out: Output) -> int:
    verdict = weak_bisim_gst(load_gst(args.first), load_gst(args.second))
    formula = format_formula(verdict.formula) if verdict.formula is not None else None
    relation = sorted(verdict.relation) if verdict.relation is not None else None
    return _verdict(out, "weakbisim", verdict.equivalent, formula, relation)


def cmd_strongbisim(args: argparse.Namespace, out: Output) -> int:
    holds = strong_bisim_discrete(load_gst(args.first), load_gst(args.second))
    text = "strongly bisimilar" if holds else "not strongly bisimilar"
    out.emit(text, VerdictResponse(command="strongbisim", holds=holds))
    return 0 if holds else 1


def cmd_check(args: argparse.Namespace, out: Output) -> int:
    formula = parse_formula(args.formula)
    name = _generator(args.model)
    model = None if name is not None else _read(args.model)
    if model is not None and model.kripke is not None:
        ks = model.kripke
        state = _initial(ks, args.state)
        holds = mc_kripke(ks, state, formula)
    else:
        g = model.gst if model is not None and model.gst is not None else load_gst(args.model)
        state = g.root
        holds = mc_gst(g, formula)
    out.emit(str(holds).lower(), CheckResponse(formula=format_formula(formula), state=state, holds=holds))
    return 0 if holds else 1


def cmd_distinguish(args: argparse.Namespace, out: Output) -> int:
    k1, k2 = load_kripke(args.first), load_kripke(args.second)
    try:
        formula = distinguishing_formula(k1, args.s, k2, args.t)
    except BisimilarPairError:
        out.emit("bisimilar: no distinguishing formula", VerdictResponse(command="distinguish", holds=False))
        return 1
    text = format_formula(formula)
    out.emit(text, VerdictResponse(command="distinguish", holds=True, formula=text))
    return 0


def _schema_item(holds: bool, counterexample: object) -> SchemaItem:
    return SchemaItem(holds=holds, counterexample=None if counterexample is None else _describe(counterexample))


def _describe(value: object) -> str:
    if isinstance(value, tuple):
        return "(" + ", ".join(_describe(v) for v in value) + ")"
    return str(value)


def cmd_schemata(args: argparse.Namespace, out: Output) -> int:
    report = schemata_check(load_kripke(args.model, args.depth, args.width))
    response = SchemataResponse(
        transitivity=_schema_item(report.transitivity.holds, report.transitivity.counterexample),
        weak_density=_schema_item(report.weak_density.holds, report.weak_density.counterexample),
    )
    lines = []
    for name, item in (("transitivity", response.transitivity), ("weak density", response.weak_density)):
        lines.append(f"{name}: {'holds' if item.holds else 'fails ' + str(item.counterexample)}")
    out.emit("\n".join(lines), response)
    return 0 if report.passed else 1


def cmd_imagefinite(args: argparse.Namespace, out: Output) -> int:
    name = _generator(args.model)
    if name in ("fig3", "gx"):
        lz = load_lazy(args.model)
        state = args.state or ("u" if name == "fig3" else "R")
        bounded = image_finite_bounded(lz, state, args.depth)
        if bounded.consistent:
            text = f"consistent with image-finite up to depth {bounded.depth}"
        else:
            text = f"not image-finite up to depth {bounded.depth}\nwitness [{bounded.witness}]"
        out.emit(
            text,
            ImageFiniteResponse(
                image_finite=bounded.consistent,
                witness_word=str(bounded.witness) if bounded.witness is not None else None,
                class_counts=list(bounded.class_counts) or None,
            ),
        )
        return 0 if bounded.consistent else 1
    report = image_finite(load_gst(args.model))
    assert report.witness is not None
    text = f"image-finite\n{format_model(kripke_model_file(report.witness, 'witness'))}"
    out.emit(text, ImageFiniteResponse(image_finite=True, witness=kripke_report(report.witness)))
    return 0


def cmd_stratified(args: argparse.Namespace, out: Output) -> int:
    subject = load_lazy(args.model)
    if args.width is not None and isinstance(subject, LazyKripke):
        subject = truncate(subject, args.depth, args.width)
    result = stratified(subject, args.s, args.t, args.depth)
    if result.unknown_beyond is not None:
        text = f"agree up to depth {result.depth}; unknown beyond depth {result.unknown_beyond}"
    else:
        text = f"agree up to depth {result.depth} of {result.limit}"
    out.emit(
        text,
        StratifiedResponse(
            first=args.s,
            second=args.t,
            depth=result.depth,
            limit=result.limit,
            unknown_beyond=result.unknown_beyond,
        ),
    )
    return 0 if result.agrees else 1


def cmd_export_dot(args: argparse.Namespace, out: Output) -> int:
    ks = load_kripke(args.model, args.depth, args.width)
    partition, _ = minimize(ks)
    blocks = [[s for s in ks.states if s in block] for block in partition.blocks]
    out.emit(to_dot(ks, partition), kripke_report(ks, blocks))
    return 0


def cmd_validate(args: argparse.Namespace, out: Output) -> int:
    report = validate(load_gst(args.gst))
    lines = ["valid"] if report.valid else [str(v) for v in report.violations]
    response = ValidationResponse(
        valid=report.valid,
        violations=[ViolationItem(code=v.code, subject=v.subject, message=v.message) for v in report.violations],
    )
    out.emit("\n".join(lines), response)
    return 0 if report.valid else 1


Handler = Callable[[argparse.Namespace, Output], int]


def non_negative(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be non-negative, got {value}")
    return value


def positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be positive, got {value}")
    return value


def _truncation_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--depth", type=non_negative, default=None, help="truncation depth for gen:fig3 / gen:gx")
    p.add_argument("--width", type=positive, default=None, help="family width for gen:fig3 / gen:gx")


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(prog=settings.app_name, description="GST / GHML model checking toolkit")
    parser.add_argument("--json", action="store_true", help="print reports as JSON")
    parser.add_argument("--version", action="store_true", help="print the version and exit")
    commands = parser.add_subparsers(dest="command", parser_class=_ArgumentParser)

    p = commands.add_parser("surrogate", help="build the surrogate Kripke structure of a GST")
    p.add_argument("gst")
    p.add_argument("--out")
    p.add_argument("--dot")
    p.set_defaults(handler=cmd_surrogate)

    p = commands.add_parser("minimize", help="coarsest bisimulation quotient")
    p.add_argument("model")
    _truncation_options(p)
    p.set_defaults(handler=cmd_minimize)

    p = commands.add_parser("bisim", help="bisimilarity of two Kripke structures")
    p.add_argument("first")
    p.add_argument("second")
    p.add_argument("--states", help="s,t (defaults to the initial states)")
    p.set_defaults(handler=cmd_bisim)

    p = commands.add_parser("weakbisim", help="weak bisimilarity of two GSTs")
    p.add_argument("first")
    p.add_argument("second")
    p.set_defaults(handler=cmd_weakbisim)

    p = commands.add_parser("strongbisim", help="strong bisimilarity of two discrete GSTs")
    p.add_argument("first")
    p.add_argument("second")
    p.set_defaults(handler=cmd_strongbisim)

    p = commands.add_parser("check", help="model check a formula")
    p.add_argument("model")
    p.add_argument("formula")
    p.add_argument("--state")
    p.set_defaults(handler=cmd_check)

    p = commands.add_parser("distinguish", help="formula true at s and false at t")
    p.add_argument("first")
    p.add_argument("s")
    p.add_argument("second")
    p.add_argument("t")
    p.set_defaults(handler=cmd_distinguish)

    p = commands.add_parser("schemata", help="transitivity and weak density")
    p.add_argument("model")
    _truncation_options(p)
    p.set_defaults(handler=cmd_schemata)

    p = commands.add_parser("imagefinite", help="image-finiteness diagnostics")
    p.add_argument("model")
    p.add_argument("--state")
    p.add_argument("--depth", type=non_negative, default=settings.hint_depth)
    p.set_defaults(handler=cmd_imagefinite)

    p = commands.add_parser("stratified", help="depth-k modal equivalence")
    p.add_argument("model")
    p.add_argument("s")
    p.add_argument("t")
    p.add_argument("--depth", type=non_negative, default=settings.stratified_depth)
    p.add_argument("--width", type=positive, default=None)
    p.set_defaults(handler=cmd_stratified)

    p = commands.add_parser("export-dot", help="DOT rendering annotated with bisimulation blocks")
    p.add_argument("model")
    _truncation_options(p)
    p.set_defaults(handler=cmd_export_dot)

    p = commands.add_parser("validate", help="check the invariants of a GST file")
    p.add_argument("gst")
    p.set_defaults(handler=cmd_validate)
    return parser


def _fail(err: TextIO, as_json: bool, message: str, exc: ParseError | None = None) -> int:
    if as_json:
        report = ErrorResponse(
            error=message,
            line=exc.line if exc else None,
            column=exc.column if exc else None,
            position=exc.position if exc else None,
        )
        err.write(report.model_dump_json() + "\n")
    else:
        err.write(f"error: {message}\n")
    return 2


def run(argv: Sequence[str], stdout: TextIO | None = None, stderr: TextIO | None = None) -> int:
    out_stream = stdout or sys.stdout
    err_stream = stderr or sys.stderr
    as_json = "--json" in argv
    try:
        args = build_parser().parse_args(list(argv))
        if args.version:
            out_stream.write(f"{settings.app_name} {settings.app_version}\n")
            return 0
        if args.command is None:
            raise UsageError(build_parser().format_usage().strip())
        logger.debug("cli.command", command=args.command)
        handler: Handler = args.handler
        return handler(args, Output(out_stream, args.json))
    except UsageError as exc:
        err_stream.write(f"{exc}\n")
        return 2
    except ParseError as exc:
        return _fail(err_stream, as_json, str(exc), exc)
    except ValueError as exc:
        return _fail(err_stream, as_json, str(exc))
    except (GstLogicError, OSError) as exc:
        return _fail(err_stream, as_json, str(exc))


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
