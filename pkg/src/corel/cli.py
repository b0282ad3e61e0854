"""Command line: ``corel compose``, ``corel enumerate`` and ``corel verify``.

Exit codes: 0 success, 1 a suite failed, 2 parse or usage error, 3 type error
(mismatched boundaries, wrong diagram kind, legs outside ``A``).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Optional, Sequence

from .core import (
    Corelation,
    Cospan,
    Engine,
    Relation,
    Span,
    compose,
    dagger,
    embed_backward,
    embed_forward,
    gamma,
    pi,
    rho,
    tensor_diagram,
)
from .enumeration import OversizeError, enumerate_homs
from .errors import CorelError, KindError
from .harness import (
    DEFAULT_SAMPLES,
    DEFAULT_SEED,
    PARTS,
    SUITE_NAMES,
    Job,
    default_plan,
    normalise_suite,
    overall_ok,
    report_json,
    report_text,
    report_tsv,
    run_jobs,
)
from .jsonio import (
    ENGINE_FLAGS,
    FormatError,
    decode_morphism,
    dumps,
    encode_value,
    engine_from_flag,
    engine_from_header,
    engine_header,
)
from .lattice import BUILTIN_LATTICES

EXIT_OK, EXIT_SUITE, EXIT_PARSE, EXIT_TYPE = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_PARSE)


# ---------------------------------------------------------------------------
# diagram expressions
# ---------------------------------------------------------------------------

_NODES = ("cospan", "span", "fwd", "bwd", "id", "seq", "tensor", "dagger", "gamma", "pi", "rho")


def evaluate(engine: Engine, node: Any, want: Optional[str] = None):
    """Evaluate a diagram expression.

    ``want`` is the diagram kind the context asks for ("cospan" or "span");
    bare morphisms (``fwd``, ``bwd``, ``id``) take that kind, defaulting to
    cospans.
    """
    if not isinstance(node, dict) or len(node) != 1:
        raise FormatError(f"an expression is a single-key object with key in {', '.join(_NODES)}")
    (op, arg), = node.items()
    kind = want or "cospan"
    if op in ("cospan", "span"):
        if not isinstance(arg, dict) or "left" not in arg or "right" not in arg:
            raise FormatError(f'"{op}" needs "left" and "right"')
        left, right = decode_morphism(engine, arg["left"]), decode_morphism(engine, arg["right"])
        return Cospan(engine, left, right) if op == "cospan" else Span(engine, left, right)
    if op == "fwd":
        return embed_forward(engine, decode_morphism(engine, arg), kind)
    if op == "bwd":
        return embed_backward(engine, decode_morphism(engine, arg), kind)
    if op == "id":
        if isinstance(arg, bool) or not isinstance(arg, int) or arg < 0:
            raise FormatError('"id" takes a natural number')
        return Cospan.identity(engine, arg) if kind == "cospan" else Span.identity(engine, arg)
    if op in ("seq", "tensor"):
        if not isinstance(arg, list) or not arg:
            raise FormatError(f'"{op}" takes a non-empty list')
        parts = [evaluate(engine, a, want) for a in arg]
        kinds = {type(p) for p in parts}
        if len(kinds) != 1:
            raise KindError(f'"{op}" mixes {", ".join(sorted(k.__name__ for k in kinds))}')
        acc = parts[0]
        for p in parts[1:]:
            acc = compose(acc, p) if op == "seq" else tensor_diagram(acc, p)
        return acc
    if op == "dagger":
        return dagger(evaluate(engine, arg, want))
    if op == "gamma":
        x = evaluate(engine, arg, "cospan")
        return x if isinstance(x, Corelation) else gamma(_expect(x, Cospan, "gamma"))
    if op == "pi":
        return pi(_expect(evaluate(engine, arg, "span"), Span, "pi"))
    if op == "rho":
        x = evaluate(engine, arg, "span")
        return x if isinstance(x, Relation) else rho(_expect(x, Span, "rho"))
    raise FormatError(f"unknown expression node {op!r}")


def _expect(x, cls, op: str):
    if not isinstance(x, cls):
        raise KindError(f'"{op}" expects a {cls.__name__.lower()}, got a {type(x).__name__.lower()}')
    return x


def normal_form(x):
    """Cospans are shown as corelations and spans as relations."""
    if isinstance(x, Cospan):
        return gamma(x)
    if isinstance(x, Span):
        return rho(x)
    return x


def _load_json(path: str) -> Any:
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON: {exc}") from None


def cmd_compose(args: argparse.Namespace) -> int:
    doc = _load_json(args.file)
    if not isinstance(doc, dict) or "expr" not in doc:
        raise FormatError('a diagram file is an object with an "expr" key')
    engine = engine_from_flag(args.engine) if args.engine else engine_from_header(doc)
    if engine is None:
        raise FormatError("no engine: pass --engine or put one in the file")
    if args.subcat:
        engine = engine.with_subcategory("C" if args.subcat == "F" else args.subcat)
    result = normal_form(evaluate(engine, doc["expr"]))
    sys.stdout.write(dumps({**engine_header(engine), **encode_value(result)}))
    return EXIT_OK


def cmd_enumerate(args: argparse.Namespace) -> int:
    engine = engine_from_flag(args.engine)
    try:
        items = enumerate_homs(engine, args.n, args.m, args.kind, limit=args.limit)
    except OversizeError as exc:
        raise FormatError(str(exc)) from None
    encoded = sorted((encode_value(x) for x in items), key=lambda d: json.dumps(d, sort_keys=True))
    out: dict = {**engine_header(engine), "kind": args.kind, "dom": args.n, "cod": args.m, "count": len(encoded)}
    if not args.count_only:
        out["items"] = encoded
    sys.stdout.write(dumps(out))
    return EXIT_OK


def _lattice_jobs(choice: Optional[str]) -> list[Job]:
    if choice is None:
        return [Job("lattice", lattice=name) for name in BUILTIN_LATTICES]
    if choice in BUILTIN_LATTICES:
        return [Job("lattice", lattice=choice)]
    doc = _load_json(choice)
    return [Job("lattice", lattice=Path(choice).name, lattice_json=json.dumps(doc, sort_keys=True))]


def _jobs(args: argparse.Namespace) -> list[Job]:
    names = args.suites or ["all"]
    if "all" in names:
        if len(names) > 1:
            raise FormatError('"all" cannot be combined with other suite names')
        return default_plan(args.seed)
    jobs: list[Job] = []
    for raw in names:
        try:
            name = normalise_suite(raw)
        except KeyError as exc:
            raise FormatError(exc.args[0]) from None
        if name == "lattice":
            jobs += _lattice_jobs(args.lattice)
            continue
        engine = args.engine or ("linfp:2" if name == "abelian-iso" else "finset")
        engine_from_flag(engine)  # validate early
        part = args.part or "both"
        if part != "both" and part not in PARTS.get(name, ()):
            raise FormatError(f"--part {part} does not apply to {name}")
        jobs.append(
            Job(
                name,
                engine,
                args.subcat,
                bound=args.bound,
                seed=args.seed,
                samples=args.samples,
                dual=args.dual,
                part=part,
            )
        )
    return jobs


def cmd_verify(args: argparse.Namespace) -> int:
    jobs = _jobs(args)
    reports = run_jobs(jobs, workers=args.jobs)
    if args.json:
        sys.stdout.write(dumps(report_json(reports, args.seed, args.timings)))
    else:
        sys.stdout.write(report_text(reports, args.seed, args.timings))
    if args.out:
        from .plotting import plot_failures, plot_summary

        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.json").write_text(dumps(report_json(reports, args.seed, args.timings)))
        (out / "report.txt").write_text(report_text(reports, args.seed, args.timings))
        (out / "report.tsv").write_text(report_tsv(reports, args.timings))
        plot_summary(reports, out / "summary.png")
        plot_failures(reports, out / "failures.png")
    return EXIT_OK if overall_ok(reports) else EXIT_SUITE


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def _natural(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return v


def _seed(text: str) -> int:
    v = _natural(text)
    if v >= 2**64:
        raise argparse.ArgumentTypeError("seed must fit in 64 bits")
    return v


def build_parser() -> argparse.ArgumentParser:
    engines = "{" + ",".join(ENGINE_FLAGS) + "}"
    p = _Parser(prog="corel", description="Compose, enumerate and verify corelations and relations.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("compose", help="evaluate a diagram file and print its normal form")
    c.add_argument("file", help="JSON diagram file, or - for stdin")
    c.add_argument("--engine", help=f"engine {engines}; overrides the file header")
    c.add_argument("--subcat", choices=["M", "E", "C", "F", "iso"], help="subcategory A used by pi")
    c.set_defaults(func=cmd_compose)

    e = sub.add_parser("enumerate", help="list the canonical forms of a finite hom-set")
    e.add_argument("--engine", default="finset", help=f"engine {engines} (finite ones only)")
    e.add_argument("--n", type=_natural, required=True, help="domain")
    e.add_argument("--m", type=_natural, required=True, help="codomain")
    e.add_argument("--kind", choices=["corel", "rel"], default="corel")
    e.add_argument("--limit", type=_natural, default=250_000, help="oversize guard on candidates examined")
    e.add_argument("--count-only", action="store_true", help="print the count without the listing")
    e.set_defaults(func=cmd_enumerate)

    v = sub.add_parser("verify", help="run verification suites")
    v.add_argument("suites", nargs="*", help=f"suite names ({', '.join(SUITE_NAMES)}) or all")
    v.add_argument("--engine", help=f"engine {engines}")
    v.add_argument("--subcat", choices=["M", "E", "C", "F", "iso"], help="subcategory A (F is an alias for C)")
    v.add_argument("--dual", action="store_true", help="check the dual assumption (pullback of pushout)")
    v.add_argument("--part", choices=sorted({x for ps in PARTS.values() for x in ps}), help="half of a two-part suite")
    v.add_argument("--bound", type=_natural, default=2, help="largest boundary/apex size (default 2)")
    v.add_argument("--seed", type=_seed, default=DEFAULT_SEED, help=f"random seed (default {DEFAULT_SEED})")
    v.add_argument("--samples", type=_natural, default=DEFAULT_SAMPLES, help="instances for sampled engines")
    v.add_argument("--lattice", help=f"lattice JSON file or one of {', '.join(BUILTIN_LATTICES)}")
    v.add_argument("--json", action="store_true", help="print the JSON report instead of text")
    v.add_argument("--out", help="directory for report.json/.txt/.tsv and figures")
    v.add_argument("--timings", action="store_true", help="include wall-clock times (output no longer reproducible)")
    v.add_argument("--jobs", type=_natural, default=1, help="worker processes")
    v.set_defaults(func=cmd_verify)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_PARSE
    try:
        return args.func(args)
    except FormatError as exc:
        print(f"corel: error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except CorelError as exc:
        print(f"corel: type error: {exc}", file=sys.stderr)
        return EXIT_TYPE
    except ValueError as exc:
        print(f"corel: error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    raise SystemExit(main())
