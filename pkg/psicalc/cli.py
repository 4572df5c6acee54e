#!/usr/bin/env python3
"""
Command Line Interface for psicalc
Products, commutators, residues, hypothesis reports, operator application
and bi-singular principal symbols from the shell. Every command writes one
JSON document to stdout; --pretty adds a rich rendering on stderr.

Exit codes: 0 success, 2 parse error, 3 context/hypothesis error,
4 uncertified computation, 1 anything else.
"""

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

from rich.console import Console
from rich.panel import Panel
from rich.table import Table

from . import __version__
from .bisingular import BisingularData, apply_operator, parse_u, principal_symbol
from .config import get_config_manager
from .contextfile import ContextFileError, LoadedContext, load_context_file
from .core import (
    ContextMismatchError,
    HypothesisError,
    PsicalcError,
    UncertifiedError,
    verify_context,
)
from .dsl import Commutator, DSLSyntaxError, DSLTypeError, Mul, evaluate, evaluate_element, parse
from .instances import TORUS4_LABELS, FourierAlgebra, TrigPoly
from .logging_utils import configure_logging, get_logger, symbols
from .scalars import format_gaussian, format_scalar
from .symbols1d import Symbol1D, res, res_sigma, residue_table
from .symbols2d import Symbol2D, res2, residue_values

log = get_logger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_PARSE = 2
EXIT_CONTEXT = 3
EXIT_UNCERTIFIED = 4


class UsageError(PsicalcError):
    """Bad command-line options or arguments"""

    kind = "usage"


class JSONArgumentParser(argparse.ArgumentParser):
    """ArgumentParser that raises UsageError instead of exiting"""

    def error(self, message: str):
        raise UsageError(f"{self.prog}: {message}")


# Most specific first
_EXIT_CODES: Tuple[Tuple[type, int], ...] = (
    (DSLSyntaxError, EXIT_PARSE),
    (UsageError, EXIT_PARSE),
    (UncertifiedError, EXIT_UNCERTIFIED),
    (HypothesisError, EXIT_CONTEXT),
    (ContextMismatchError, EXIT_CONTEXT),
    (ContextFileError, EXIT_CONTEXT),
    (DSLTypeError, EXIT_CONTEXT),
)


def exit_code_for(error: BaseException) -> int:
    for error_type, code in _EXIT_CODES:
        if isinstance(error, error_type):
            return code
    return EXIT_FAILURE


def error_document(error: BaseException) -> Dict[str, Any]:
    """Machine-readable description of a failure"""
    document: Dict[str, Any] = {
        "error": getattr(error, "kind", type(error).__name__),
        "message": str(error),
    }
    if isinstance(error, DSLSyntaxError):
        document.update(error.to_dict())
    if isinstance(error, HypothesisError) and error.report is not None:
        document["report"] = error.report.to_dict()
    return document


def _poly_text(poly: TrigPoly) -> str:
    if all(not any(k) for k in poly.support):
        return format_gaussian(poly.constant_term())
    return str(poly)


def parse_floor_option(text: Optional[str]):
    """'-8', '-8,-6' or 'exact'; None when the option is absent"""
    if text is None:
        return None
    if text.strip().lower() == "exact":
        return "exact"
    try:
        parts = [int(p) for p in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"floor must be 'm', 'm,n' or 'exact', got {text!r}")
    if len(parts) == 1:
        return (parts[0], parts[0])
    if len(parts) == 2:
        return tuple(parts)
    raise argparse.ArgumentTypeError(f"floor takes at most two values, got {text!r}")


class CLIInterface:
    """Command Line Interface for psicalc"""

    def __init__(self, stdout=None, stderr=None):
        self.stdout = stdout or sys.stdout
        self.stderr = stderr or sys.stderr
        self.console = Console(file=self.stderr)
        self.parser = self._create_parser()
        self.config = None

    def _create_parser(self) -> argparse.ArgumentParser:
        """Create the argument parser"""
        parser = JSONArgumentParser(
            prog="psicalc",
            description="Exact formal pseudodifferential symbol calculus: products, residues, hypothesis checks",
            formatter_class=argparse.RawDescriptionHelpFormatter,
            epilog="""
Examples:
  %(prog)s mul --ctx torus4 "xi1^-1" "e[1,0]@(1,1)"
  %(prog)s commutator --ctx qtorus "U*xi1" "V*xi2^-1" --floor -6
  %(prog)s res --ctx torus4 --trace 11 "unit*xi1^-1*xi2^-1"
  %(prog)s res --ctx contexts/qtorus1d.json --sigma "U*xi^-1"
  %(prog)s check --ctx contexts/qtorus-default.json
  %(prog)s apply --ctx circle2 "e[0]@(1) - e[0]@(2)" --u '{"3": "1", "-2": "1/2"}'
  %(prog)s principal --b0 "1" --b12 "1"
  %(prog)s eval --ctx torus4 'Res([a*xi1^2*xi2^-1, b*xi1^-3], t="11")'
            """,
        )
        parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
        parser.add_argument("--config", type=str, help="Path to configuration file")
        parser.add_argument("--pretty", action="store_true", help="Render results on stderr with rich")
        parser.add_argument("--debug", action="store_true", help="Debug logging on stderr")
        parser.add_argument("--verbose", "-v", action="store_true", help="Info logging on stderr")
        parser.add_argument("--json-logs", action="store_true", default=None, help="Emit log lines as JSON")

        subparsers = parser.add_subparsers(dest="command", metavar="COMMAND")
        subparsers.required = True

        def with_context(sub: argparse.ArgumentParser, floor: bool = True) -> None:
            sub.add_argument(
                "--ctx",
                default="torus4",
                help="Context file, or a built-in kind (circle, torus, circle2, torus4, qtorus, qtorus1d)",
            )
            if floor:
                sub.add_argument(
                    "--floor",
                    type=parse_floor_option,
                    help="Truncation floor 'm' or 'm,n' (or 'exact'); default from context file or config",
                )

        mul_parser = subparsers.add_parser("mul", help="Product of two symbols")
        with_context(mul_parser)
        mul_parser.add_argument("left", help="Left factor")
        mul_parser.add_argument("right", help="Right factor")

        commutator_parser = subparsers.add_parser("commutator", help="Commutator [A, B]")
        with_context(commutator_parser)
        commutator_parser.add_argument("left")
        commutator_parser.add_argument("right")

        res_parser = subparsers.add_parser("res", help="Noncommutative residue of a symbol")
        with_context(res_parser)
        res_parser.add_argument("expr")
        res_parser.add_argument("--trace", help="Trace selector, e.g. 11, 2, W or tau_W1")
        res_parser.add_argument("--sigma", action="store_true", help="Twisted residue res_sigma (1D)")

        check_parser = subparsers.add_parser("check", help="Hypothesis report of a context")
        with_context(check_parser, floor=False)
        check_parser.add_argument(
            "--degree-bound", type=int, help="Re-check on a larger spanning sample"
        )

        apply_parser = subparsers.add_parser("apply", help="Apply an exact symbol to a Fourier polynomial")
        with_context(apply_parser)
        apply_parser.add_argument("expr")
        apply_parser.add_argument("--u", required=True, help='Fourier data as JSON, e.g. {"1,0": "1/2+i"}')

        principal_parser = subparsers.add_parser(
            "principal", help="Principal symbol of a bi-singular operator"
        )
        for name in ("b0", "b1", "b2", "b12"):
            principal_parser.add_argument(f"--{name}", default="0", help=f"{name} on the 2-torus, e.g. \"1 + e[1,0]\"")

        eval_parser = subparsers.add_parser("eval", help="Evaluate any expression (residue calls included)")
        with_context(eval_parser)
        eval_parser.add_argument("expr")

        init_parser = subparsers.add_parser("init-config", help="Write a starter config file")
        init_parser.add_argument("path", nargs="?", help="Target file (default: user config dir)")
        init_parser.add_argument("--force", action="store_true", help="Overwrite an existing file")

        return parser

    def run(self, args: Optional[List[str]] = None) -> int:
        """Run one command and return its exit code"""
        try:
            parsed_args = self.parser.parse_args(args)
        except UsageError as error:
            self._emit(error_document(error))
            self.stderr.write(self.parser.format_usage())
            self.stderr.write(f"{error}\n")
            return EXIT_PARSE
        configure_logging(debug=parsed_args.debug, verbose=parsed_args.verbose, json_logs=parsed_args.json_logs)
        self.config = get_config_manager(Path(parsed_args.config) if parsed_args.config else None).config
        pretty = parsed_args.pretty or self.config.output.pretty

        handler = getattr(self, f"_handle_{parsed_args.command.replace('-', '_')}")
        try:
            document = handler(parsed_args)
        except KeyboardInterrupt:
            self.console.print("\nInterrupted", style="yellow")
            return 130
        except (PsicalcError, ValueError, ZeroDivisionError, OSError) as error:
            code = exit_code_for(error)
            log.debug("command_failed", command=parsed_args.command, error=str(error), exit_code=code)
            return self._fail(error, code, pretty)
        except Exception as error:
            log.error("command_crashed", command=parsed_args.command, error=repr(error))
            return self._fail(error, EXIT_FAILURE, pretty)

        self._emit(document)
        if pretty:
            self._render(parsed_args.command, document)
        return EXIT_OK

    # -- plumbing ----------------------------------------------------------

    def _fail(self, error: BaseException, code: int, pretty: bool) -> int:
        self._emit(error_document(error))
        if pretty:
            self.console.print(
                Panel(str(error), title=f"{symbols.FAIL} {getattr(error, 'kind', 'error')}", style="bold red")
            )
        return code

    def _emit(self, document: Dict[str, Any]) -> None:
        output = self.config.output if self.config else None
        indent = output.json_indent if output else None
        text = json.dumps(
            document,
            indent=indent,
            separators=(",", ":") if indent is None else None,
            sort_keys=output.sort_keys if output else True,
            ensure_ascii=False,
        )
        self.stdout.write(text + "\n")

    def _load(self, parsed_args) -> LoadedContext:
        return load_context_file(parsed_args.ctx)

    def _floors(self, parsed_args, loaded: LoadedContext):
        """CLI flag > context file default_floors > config file > built-in"""
        requested = getattr(parsed_args, "floor", None)
        if requested == "exact":
            return None
        if requested is not None:
            return requested
        if loaded.default_floors is not None:
            return loaded.default_floors
        return self.config.engine.floors

    def _evaluate(self, text: str, loaded: LoadedContext, floors):
        return evaluate(parse(text), loaded.ctx, floors, loaded.bindings)

    @staticmethod
    def _symbol_document(symbol, extra: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
        document = symbol.to_table()
        if extra:
            document.update(extra)
        return document

    @staticmethod
    def _scalar_document(value) -> Dict[str, Any]:
        return {"value": format_scalar(value)}

    # -- commands ----------------------------------------------------------

    def _handle_mul(self, parsed_args) -> Dict[str, Any]:
        loaded = self._load(parsed_args)
        floors = self._floors(parsed_args, loaded)
        node = Mul(parse(parsed_args.left), parse(parsed_args.right))
        return self._symbol_document(evaluate(node, loaded.ctx, floors, loaded.bindings))

    def _handle_commutator(self, parsed_args) -> Dict[str, Any]:
        loaded = self._load(parsed_args)
        floors = self._floors(parsed_args, loaded)
        node = Commutator(parse(parsed_args.left), parse(parsed_args.right))
        return self._symbol_document(evaluate(node, loaded.ctx, floors, loaded.bindings))

    def _handle_res(self, parsed_args) -> Dict[str, Any]:
        loaded = self._load(parsed_args)
        floors = self._floors(parsed_args, loaded)
        symbol = self._evaluate(parsed_args.expr, loaded, floors)
        if not isinstance(symbol, (Symbol1D, Symbol2D)):
            raise DSLTypeError("res takes a symbol expression")
        trace = parsed_args.trace
        if isinstance(symbol, Symbol2D):
            if parsed_args.sigma:
                raise DSLTypeError("--sigma applies to one-derivation contexts")
            if trace is not None:
                return self._scalar_document(res2(symbol, trace))
            return {"values": {name: format_scalar(v) for name, v in residue_values(symbol).items()}}
        if parsed_args.sigma:
            return self._scalar_document(res_sigma(symbol, 0 if trace is None else trace))
        if trace is not None:
            return self._scalar_document(res(symbol, trace))
        return {"values": residue_table(symbol)}

    def _handle_check(self, parsed_args) -> Dict[str, Any]:
        loaded = self._load(parsed_args)
        ctx = loaded.ctx
        degree_bound = parsed_args.degree_bound
        if degree_bound is not None and degree_bound != ctx.parameters.get("degree_bound"):
            ctx = verify_context(ctx, degree_bound=degree_bound)
        return ctx.report.to_dict()

    def _handle_apply(self, parsed_args) -> Dict[str, Any]:
        loaded = self._load(parsed_args)
        # application needs an exact symbol, so no default floor here
        floors = None if parsed_args.floor is None else self._floors(parsed_args, loaded)
        algebra = loaded.ctx.algebra
        if not isinstance(algebra, FourierAlgebra):
            raise ContextMismatchError(f"apply needs a Fourier context, not {loaded.kind}")
        try:
            data = json.loads(parsed_args.u)
        except json.JSONDecodeError as e:
            raise ValueError(f"--u is not valid JSON: {e}") from e
        if not isinstance(data, dict):
            raise ValueError("--u must be a JSON object of mode -> coefficient")
        u = parse_u(data, algebra.dim)
        symbol = self._evaluate(parsed_args.expr, loaded, floors)
        result = apply_operator(symbol, u)
        return {"u": u.to_json(), "result": result.to_json(), "text": str(result)}

    def _handle_principal(self, parsed_args) -> Dict[str, Any]:
        torus = FourierAlgebra(2)
        data = BisingularData.of(
            **{name: evaluate_element(getattr(parsed_args, name), torus) for name in ("b0", "b1", "b2", "b12")}
        )
        element = principal_symbol(data)
        return {
            "components": {label: _poly_text(element.component(label)) for label in TORUS4_LABELS},
            "coefficients": element.to_json(),
        }

    def _handle_eval(self, parsed_args) -> Dict[str, Any]:
        loaded = self._load(parsed_args)
        floors = self._floors(parsed_args, loaded)
        value = self._evaluate(parsed_args.expr, loaded, floors)
        if isinstance(value, (Symbol1D, Symbol2D)):
            return self._symbol_document(value)
        return self._scalar_document(value)

    def _handle_init_config(self, parsed_args) -> Dict[str, Any]:
        manager = get_config_manager()
        target = Path(parsed_args.path) if parsed_args.path else None
        try:
            written = manager.write_starter(target, overwrite=parsed_args.force)
        except FileExistsError as e:
            raise ValueError(f"{e}; pass --force to overwrite") from e
        return {"written": str(written)}

    # -- rich rendering ----------------------------------------------------

    def _render(self, command: str, document: Dict[str, Any]) -> None:
        if "terms" in document:
            self._render_symbol(document)
        elif "results" in document:
            self._render_report(document)
        elif "value" in document:
            self.console.print(Panel(document["value"], title="residue", style="bold green"))
        else:
            table = Table(title=command)
            table.add_column("Key", style="cyan", no_wrap=True)
            table.add_column("Value")
            values = document.get("values") or document.get("components") or document
            for key, value in values.items():
                table.add_row(str(key), json.dumps(value, ensure_ascii=False) if not isinstance(value, str) else value)
            self.console.print(table)

    def _render_symbol(self, document: Dict[str, Any]) -> None:
        floors = document.get("floors", document.get("floor"))
        table = Table(title=f"{symbols.XI}-symbol over {document['context']} (floor {floors})")
        table.add_column("Order", style="cyan", no_wrap=True, justify="right")
        table.add_column("Coefficient")
        for term in document["terms"]:
            order = term["order"]
            label = ",".join(str(o) for o in order) if isinstance(order, list) else str(order)
            table.add_row(label, json.dumps(term["coefficient"], ensure_ascii=False))
        self.console.print(table)

    def _render_report(self, document: Dict[str, Any]) -> None:
        table = Table(title=f"Hypotheses on {document['context']} (degree bound {document['degree_bound']})")
        table.add_column("", no_wrap=True)
        table.add_column("Hypothesis", style="cyan")
        table.add_column("Law")
        table.add_column("Checked", justify="right", style="dim")
        table.add_column("Witness", style="magenta")
        for entry in document["results"]:
            status = symbols.status(entry["passed"], entry["required"])
            style = "green" if entry["passed"] else ("red" if entry["required"] else "yellow")
            table.add_row(
                f"[{style}]{status}[/{style}]",
                entry["hypothesis"],
                entry["law"],
                str(entry["checked"]),
                json.dumps(entry["witness"], ensure_ascii=False) if "witness" in entry else "",
            )
        self.console.print(table)
        verdict = "ALL HYPOTHESES HOLD" if document["success"] else "HYPOTHESES FAILED"
        self.console.print(Panel(verdict, style="bold green" if document["success"] else "bold red"))


def main():
    """Main entry point for CLI"""
    cli = CLIInterface()
    sys.exit(cli.run())
