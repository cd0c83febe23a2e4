"""
Command line front end: JSON documents in, JSON documents out

Every subcommand reads its input document from --input (stdin when omitted)
and writes to --output (stdout when omitted). Diagnostics go to stderr.
"""

import argparse
import json
import logging
import sys
from collections.abc import Callable, Sequence
from contextlib import redirect_stderr, redirect_stdout
from pathlib import Path
from typing import IO, Any

from pydantic import BaseModel, ValidationError

from .config import settings
from .errors import DocumentError, EngineError, ErrorResponse
from .models.documents import (
    CapacityReportDocument,
    CombinationDocument,
    ConstraintCensusDocument,
    DecompositionDocument,
    ElicitationDocument,
    GameDocument,
    GaiModelDocument,
    MobiusDocument,
    PreferenceDatasetDocument,
    TabulatedFunctionDocument,
    VertexCensusDocument,
    VertexDocument,
)
from .models.grid import MobiusMap
from .services.decompose_service import decompose_service
from .services.elicit_service import elicit_service
from .services.gai_service import gai_service
from .services.kary_service import kary_service
from .services.lp_service import lp_service
from .services.polytope_service import polytope_service
from .utils.rationals import parse_point

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

SCHEMAS = """
Documents (rationals are "p/q" strings, grid points are "2,0,1"):
  game          {"n": 2, "k": 1, "values": {"0,0": "0", "0,1": "1/2", "1,0": "1/2", "1,1": "1"}}
  mobius        {"n": 2, "k": 1, "mobius": {"0,1": "1/2", "1,0": "1/2"}}
  gai model     {"attributes": [{"name": "a", "levels": ["lo", "hi"]}, ...],
                 "terms": [{"scope": [0, 1], "values": {"0,0": "0", ...}}], "constant": "0"}
  tabulated     {"attributes": [...], "values": {"0,0": "0", ...}}
  decomposition {"n": .., "k": .., "levels": [..], "singletons": [{"i": 0, "values": {"0": "0", ...}}],
                 "pairs": [{"i": 0, "j": 1, "values": {"0,0": "0", ...}}]}
  dataset       {"attributes": [...], "strict": [{"better": [1, 0], "worse": [0, 0]}], "weak": [...],
                 "assignments": [{"alt": [1, 1], "category": 1}]}

Usage examples:
  # Möbius transform and back
  kary-gai mobius -i game.json | kary-gai zeta
  # Constraint census for 4 attributes with 5 levels each
  kary-gai census --n 4 --k 4
  # Vertex census and stream
  kary-gai vertices count --n 3 --k 2
  kary-gai vertices enum --n 2 --k 1
  # Monotone decomposition of a 2-additive capacity
  kary-gai decompose -i capacity.json --method lp
  # Fit a model to comparisons
  kary-gai elicit -i dataset.json --decimal 6
"""


class _Streams:
    def __init__(self, stdin: IO[str], stdout: IO[str], stderr: IO[str]):
        self.stdin = stdin
        self.stdout = stdout
        self.stderr = stderr


def _read_json(args: argparse.Namespace, streams: _Streams) -> Any:
    source = args.input or "<stdin>"
    try:
        text = Path(args.input).read_text(encoding="utf-8") if args.input else streams.stdin.read()
    except OSError as e:
        raise DocumentError(f"Cannot read {source}: {e.strerror}", {"path": source}) from e
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise DocumentError(
            f"Malformed JSON in {source}: {e.msg}", {"path": source, "line": e.lineno, "column": e.colno}
        ) from e


def _read(args: argparse.Namespace, streams: _Streams, model: type[BaseModel]) -> Any:
    return model.model_validate(_read_json(args, streams))


def _read_game_or_mobius(args: argparse.Namespace, streams: _Streams) -> Any:
    data = _read_json(args, streams)
    if isinstance(data, dict) and "mobius" in data:
        return MobiusDocument.model_validate(data).to_domain()
    return GameDocument.model_validate(data).to_domain()


def _write(args: argparse.Namespace, streams: _Streams, text: str) -> None:
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        streams.stdout.write(text)


def _dump(document: BaseModel | dict[str, Any]) -> str:
    payload = document.model_dump(mode="json", exclude_none=True) if isinstance(document, BaseModel) else document
    return json.dumps(payload, indent=2, ensure_ascii=False) + "\n"


def _digits(args: argparse.Namespace) -> int | None:
    return args.decimal if args.decimal is not None else settings.decimal_digits


# ---------------------------------------------------------------- handlers


def _cmd_mobius(args: argparse.Namespace, streams: _Streams) -> int:
    game = _read(args, streams, GameDocument).to_domain()
    _write(args, streams, _dump(MobiusDocument.from_domain(kary_service.mobius(game), _digits(args))))
    return 0


def _cmd_zeta(args: argparse.Namespace, streams: _Streams) -> int:
    m = _read(args, streams, MobiusDocument).to_domain()
    _write(args, streams, _dump(GameDocument.from_domain(kary_service.zeta(m), _digits(args))))
    return 0


def _cmd_check(args: argparse.Namespace, streams: _Streams) -> int:
    game = _read(args, streams, GameDocument).to_domain()
    _write(args, streams, _dump(CapacityReportDocument.from_domain(kary_service.check_capacity(game))))
    return 0


def _cmd_padd(args: argparse.Namespace, streams: _Streams) -> int:
    source = _read_game_or_mobius(args, streams)
    degree = kary_service.p_additivity_degree(source)
    support = sorted(kary_service.support(source))
    _write(args, streams, _dump({"degree": degree, "degenerate": degree == 0, "support": support}))
    return 0


def _cmd_embed(args: argparse.Namespace, streams: _Streams) -> int:
    data = _read_json(args, streams)
    if isinstance(data, dict) and "terms" in data:
        utility = GaiModelDocument.model_validate(data).to_domain()
    else:
        utility = TabulatedFunctionDocument.model_validate(data).to_domain()
    capacity = gai_service.embed(utility, args.fill)
    degree = kary_service.p_additivity_degree(capacity)
    logger.info(f"Embedded capacity has p-additivity degree {degree}")
    _write(args, streams, _dump(GameDocument.from_domain(capacity, _digits(args), degree)))
    return 0


def _cmd_canonical(args: argparse.Namespace, streams: _Streams) -> int:
    u = _read(args, streams, TabulatedFunctionDocument).to_domain()
    scopes = [parse_point(part) for part in args.order.split(";")]
    anchor = parse_point(args.anchor) if args.anchor else None
    model = gai_service.canonical_decomposition(u, scopes, anchor)
    _write(args, streams, _dump(GaiModelDocument.from_domain(model, _digits(args))))
    return 0


def _cmd_delta_decompose(args: argparse.Namespace, streams: _Streams) -> int:
    u = _read(args, streams, TabulatedFunctionDocument).to_domain()
    model = gai_service.delta_decomposition(u, args.p)
    _write(args, streams, _dump(GaiModelDocument.from_domain(model, _digits(args))))
    return 0


def _cmd_vertices(args: argparse.Namespace, streams: _Streams) -> int:
    if args.action == "count":
        _write(args, streams, _dump(VertexCensusDocument.from_domain(polytope_service.count_vertices(args.n, args.k))))
        return 0
    out = Path(args.output).open("w", encoding="utf-8") if args.output else streams.stdout
    try:
        for vertex in polytope_service.enumerate_vertices(args.n, args.k):
            out.write(json.dumps(VertexDocument.from_domain(vertex).model_dump(mode="json")) + "\n")
    finally:
        if args.output:
            out.close()
    return 0


def _cmd_antichains(args: argparse.Namespace, streams: _Streams) -> int:
    antichains = polytope_service.enumerate_antichains(args.k)
    payload = {
        "k": args.k,
        "count": len(antichains),
        "antichains": [[list(p) for p in a.points] for a in antichains],
    }
    _write(args, streams, _dump(payload))
    return 0


def _cmd_decompose(args: argparse.Namespace, streams: _Streams) -> int:
    source = _read_game_or_mobius(args, streams)
    if args.combination:
        combination = decompose_service.vertex_decompose(source)
        _write(args, streams, _dump(CombinationDocument.from_domain(combination, _digits(args))))
        return 0
    decomposition = decompose_service.monotone_decompose(
        source, method=args.method, objective=args.objective, warm_start=not args.cold_start
    )
    _write(args, streams, _dump(DecompositionDocument.from_domain(decomposition, _digits(args))))
    return 0


def _cmd_recompose(args: argparse.Namespace, streams: _Streams) -> int:
    data = _read_json(args, streams)
    if isinstance(data, dict) and "atoms" in data:
        decomposition = decompose_service.group_by_support(CombinationDocument.model_validate(data).to_domain())
    else:
        decomposition = DecompositionDocument.model_validate(data).to_domain()
    capacity = decompose_service.recompose(decomposition)
    _write(args, streams, _dump(GameDocument.from_domain(capacity, _digits(args))))
    return 0


def _cmd_census(args: argparse.Namespace, streams: _Streams) -> int:
    if args.m:
        census = decompose_service.constraint_census(list(parse_point(args.m)))
    else:
        census = decompose_service.constraint_census(n=args.n, k=args.k)
    _write(args, streams, _dump(ConstraintCensusDocument.from_domain(census)))
    return 0


def _cmd_elicit(args: argparse.Namespace, streams: _Streams) -> int:
    data = _read(args, streams, PreferenceDatasetDocument).to_domain()
    result = elicit_service.elicit(data, mode=args.mode)
    _write(args, streams, _dump(ElicitationDocument.from_domain(result, _digits(args))))
    return 0


def _cmd_extreme(args: argparse.Namespace, streams: _Streams) -> int:
    game = _read(args, streams, GameDocument).to_domain()
    capacity = kary_service.as_capacity(game)
    _write(args, streams, _dump({"extreme": polytope_service.is_extreme_bruteforce(capacity)}))
    return 0


def _cmd_lp_dump(args: argparse.Namespace, streams: _Streams) -> int:
    source = _read_game_or_mobius(args, streams)
    if not isinstance(source, MobiusMap):
        source = kary_service.as_capacity(source)
    lp = decompose_service.build_monotone_lp(source, objective=args.objective)
    _write(args, streams, lp_service.to_lp_format(lp))
    return 0


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-i", "--input", default=None, help="Input document (default: stdin)")
    common.add_argument("-o", "--output", default=None, help="Output path (default: stdout)")
    common.add_argument(
        "--decimal",
        type=int,
        default=None,
        metavar="N",
        help='Render rationals as N-digit decimals prefixed with "~" (not exact)',
    )
    common.add_argument(
        "--log-level",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        default=None,
        help=f"Logging level on stderr (default: {settings.log_level})",
    )

    parser = argparse.ArgumentParser(
        prog="kary-gai",
        description="Exact toolkit for 2-additive GAI models and k-ary capacities",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=SCHEMAS,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, handler: Callable[[argparse.Namespace, _Streams], int], help_text: str) -> argparse.ArgumentParser:
        command = sub.add_parser(name, parents=[common], help=help_text, description=help_text)
        command.set_defaults(handler=handler)
        return command

    add("mobius", _cmd_mobius, "Möbius transform of a game document")
    add("zeta", _cmd_zeta, "Zeta transform of a Möbius document")
    add("check", _cmd_check, "Check zero-groundedness, monotonicity and normalization")
    add("padd", _cmd_padd, "p-additivity degree and support of a game or Möbius document")
    embed = add("embed", _cmd_embed, "Embed a GAI model or tabulated utility into a k-ary capacity")
    embed.add_argument("--fill", choices=["clamp", "constant"], default=None, help="Off-grid fill mode")
    canonical = add("canonical", _cmd_canonical, "Anchor-based canonical decomposition of a tabulated utility")
    canonical.add_argument("--order", required=True, help='Scopes in order, e.g. "1;0,2;0,1"')
    canonical.add_argument("--anchor", default=None, help='Anchor alternative, e.g. "0,0,0" (default: all-worst)')
    delta = add("delta-decompose", _cmd_delta_decompose, "Decompose a p-additive tabulated utility")
    delta.add_argument("--p", type=int, required=True, help="Additivity order")
    vertices = add("vertices", _cmd_vertices, "Count or stream the vertices of the 2-additive polytope")
    vertices.add_argument("action", choices=["count", "enum"])
    vertices.add_argument("--n", type=int, required=True)
    vertices.add_argument("--k", type=int, required=True)
    antichains = add("antichains", _cmd_antichains, "List the antichains of {0..k}^2 except the origin")
    antichains.add_argument("--k", type=int, required=True)
    decompose = add("decompose", _cmd_decompose, "Monotone decomposition of a 2-additive capacity")
    decompose.add_argument("--method", choices=["lp", "direct", "vertex"], default="lp")
    decompose.add_argument("--objective", choices=["sparse"], default=None, help="Heuristic objective")
    decompose.add_argument(
        "--combination", action="store_true", help="Output the convex combination of vertices instead"
    )
    decompose.add_argument(
        "--cold-start", action="store_true", help="Run the simplex without the closed-form start point (--method lp)"
    )
    add("recompose", _cmd_recompose, "Recompose a decomposition or a convex combination")
    census = add("census", _cmd_census, "Unknown and monotonicity constraint counts")
    census.add_argument("--n", type=int, default=None)
    census.add_argument("--k", type=int, default=None)
    census.add_argument("--m", default=None, help='Per-attribute level bounds, e.g. "4,4,3"')
    elicit = add("elicit", _cmd_elicit, "Fit a monotone 2-additive model to preference data")
    elicit.add_argument("--mode", choices=["margin", "soft"], default="margin")
    add("extreme", _cmd_extreme, "Brute-force extremality check of a capacity (small grids)")
    dump = add("lp-dump", _cmd_lp_dump, "Print the monotone decomposition program in LP format")
    dump.add_argument("--objective", choices=["sparse"], default=None)
    return parser


def run(
    argv: Sequence[str] | None = None,
    stdin: IO[str] | None = None,
    stdout: IO[str] | None = None,
    stderr: IO[str] | None = None,
) -> int:
    streams = _Streams(stdin or sys.stdin, stdout or sys.stdout, stderr or sys.stderr)
    parser = build_parser()
    try:
        with redirect_stdout(streams.stdout), redirect_stderr(streams.stderr):
            args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 2

    logging.basicConfig(
        level=args.log_level or settings.log_level, format=LOG_FORMAT, stream=streams.stderr, force=True
    )

    error: ErrorResponse
    try:
        return args.handler(args, streams)
    except EngineError as e:
        logger.error(f"{args.command} failed: {e.message}")
        error = e.to_response()
    except ValidationError as e:
        logger.error(f"{args.command} received an invalid document")
        error = ErrorResponse(
            message="Invalid document", error_code="INVALID_DOCUMENT", details={"errors": json.loads(e.json(include_url=False))}
        )
    except ValueError as e:
        logger.error(f"{args.command} failed: {e}")
        error = ErrorResponse(message=str(e), error_code="INVALID_INPUT")
    except OSError as e:
        logger.error(f"{args.command} could not write its output: {e}")
        error = ErrorResponse(message=str(e), error_code="IO_ERROR")
    streams.stderr.write(error.model_dump_json() + "\n")
    return 1


def main() -> int:
    return run()


if __name__ == "__main__":
    sys.exit(main())
