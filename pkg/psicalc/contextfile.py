#!/usr/bin/env python3
"""
Context Files for psicalc
JSON documents naming a context kind, its parameters, named element
bindings and default floors:

    {
      "kind": "qtorus",
      "parameters": {"N": 2, "r": 1, "s": 1, "x1": "U^2", "x2": "V^2"},
      "elements": {"a": "U + q*V^-1", "b": "a*a"},
      "default_floors": [-8, -8]
    }

Elements are parsed in file order, so later bindings may use earlier ones.
"""

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, Mapping, Optional, Tuple, Union

from .core import AlgebraContext, HypothesisError, PsicalcError
from .dsl import RESERVED_NAMES, DSLSyntaxError, DSLTypeError, evaluate_element
from .instances import (
    make_circle2_context,
    make_circle_context,
    make_qtorus_1d_context,
    make_qtorus_context,
    make_torus4_context,
    make_torus_context,
)
from .logging_utils import get_logger

log = get_logger(__name__)

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


class ContextFileError(PsicalcError):
    """A context file is unreadable or malformed"""

    kind = "context_file"


# kind -> (factory, accepted parameters)
CONTEXT_KINDS: Dict[str, Tuple[Callable[..., AlgebraContext], Tuple[str, ...]]] = {
    "circle": (make_circle_context, ("degree_bound",)),
    "torus": (make_torus_context, ("degree_bound",)),
    "circle2": (make_circle2_context, ("degree_bound",)),
    "torus4": (make_torus4_context, ("degree_bound",)),
    "qtorus": (make_qtorus_context, ("N", "r", "s", "x1", "x2", "degree_bound")),
    "qtorus1d": (make_qtorus_1d_context, ("N", "r", "s", "x", "degree_bound")),
}


@dataclass
class LoadedContext:
    """A verified context plus what the file declared around it"""

    ctx: AlgebraContext
    bindings: Dict[str, Any] = field(default_factory=dict)
    default_floors: Optional[Tuple[int, ...]] = None
    source: Optional[str] = None

    @property
    def kind(self) -> str:
        return self.ctx.kind


def _parse_floors(value: Any) -> Optional[Tuple[int, ...]]:
    if value is None:
        return None
    if isinstance(value, bool):
        raise ContextFileError("default_floors must be an integer or a list of integers")
    if isinstance(value, int):
        return (value, value)
    if isinstance(value, list) and 1 <= len(value) <= 2 and all(
        isinstance(v, int) and not isinstance(v, bool) for v in value
    ):
        return tuple(value) if len(value) == 2 else (value[0], value[0])
    raise ContextFileError("default_floors must be an integer or a list of one or two integers")


def build_context(data: Mapping[str, Any], source: Optional[str] = None) -> LoadedContext:
    """
    Build and verify the context described by an already-decoded document.

    Raises:
        ContextFileError: unknown kind, bad parameters or bad bindings
        HypothesisError: the context fails the hypothesis checker
    """
    if not isinstance(data, Mapping):
        raise ContextFileError("a context file must hold a JSON object")
    kind = data.get("kind")
    if kind not in CONTEXT_KINDS:
        raise ContextFileError(f"unknown context kind {kind!r}; expected one of {', '.join(CONTEXT_KINDS)}")
    factory, accepted = CONTEXT_KINDS[kind]

    parameters = data.get("parameters") or {}
    if not isinstance(parameters, Mapping):
        raise ContextFileError("parameters must be a JSON object")
    unknown = sorted(set(parameters) - set(accepted))
    if unknown:
        raise ContextFileError(f"context kind {kind} does not take parameters {', '.join(unknown)}")

    try:
        ctx = factory(**parameters)
    except (DSLSyntaxError, DSLTypeError) as e:
        raise ContextFileError(f"bad element in parameters: {e}") from e
    except HypothesisError:
        raise
    except (TypeError, ValueError) as e:
        raise ContextFileError(f"bad parameters for {kind}: {e}") from e

    bindings: Dict[str, Any] = {}
    elements = data.get("elements") or {}
    if not isinstance(elements, Mapping):
        raise ContextFileError("elements must be a JSON object of name -> expression")
    for name, text in elements.items():
        if not _IDENT.match(name) or name in RESERVED_NAMES:
            raise ContextFileError(f"{name!r} cannot be used as an element name")
        if not isinstance(text, str):
            raise ContextFileError(f"element {name!r} must be given as expression text")
        try:
            bindings[name] = evaluate_element(text, ctx.algebra, bindings)
        except (DSLSyntaxError, DSLTypeError) as e:
            raise ContextFileError(f"element {name!r}: {e}") from e

    loaded = LoadedContext(ctx, bindings, _parse_floors(data.get("default_floors")), source)
    log.info("context_loaded", kind=kind, source=source, elements=len(bindings))
    return loaded


def load_context_file(path: Union[str, Path]) -> LoadedContext:
    """
    Load a context from a JSON file. A bare kind name ("torus4", "qtorus")
    that is not an existing file gives that kind with default parameters.
    """
    path = Path(path)
    if not path.exists():
        if str(path) in CONTEXT_KINDS:
            return build_context({"kind": str(path)}, source=str(path))
        raise ContextFileError(f"context file {path} does not exist")
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise ContextFileError(f"{path} is not valid JSON: {e}") from e
    except OSError as e:
        raise ContextFileError(f"cannot read {path}: {e}") from e
    return build_context(data, source=str(path))
