"""Document spanners over variable-set automata, with decision procedures for
split-correctness, splittability and splitter reasoning."""

from .config import RunConfig
from .core import (
    DomainError,
    ResourceError,
    SpannerError,
    UnsupportedError,
    ValidityError,
    clr,
    shift_span,
    shift_tuple,
    span_relations_equal,
    tuple_of_refword,
)
from .formula import compile_to_vsa, formula_vsa, parse_formula
from .vsa import VSetAutomaton, evaluate, normalize

__all__ = [
    "DomainError", "ResourceError", "RunConfig", "SpannerError", "UnsupportedError",
    "VSetAutomaton", "ValidityError", "clr", "compile_to_vsa", "evaluate", "formula_vsa",
    "normalize", "parse_formula", "shift_span", "shift_tuple", "span_relations_equal",
    "tuple_of_refword",
]
