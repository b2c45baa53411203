"""Documents, spans, span tuples, ref-words and the variable-operation order."""

from __future__ import annotations

import re
import sys
from itertools import permutations, product
from typing import Iterable, Iterator, Mapping, NamedTuple, Sequence

Span = tuple[int, int]
# A span tuple is a sorted tuple of (variable, span) pairs, hashable and ordered.
SpanTuple = tuple[tuple[str, Span], ...]

VAR_NAME = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")
METACHARS = frozenset("|+*?.(){}<>\\")


class SpannerError(Exception):
    """Base class for every error raised by the package."""


class DomainError(SpannerError):
    """Input violates a precondition of the requested operation."""


class ValidityError(DomainError):
    """A ref-word does not open and close some variable exactly once."""


class UnsupportedError(DomainError):
    """The question is outside what the procedures can decide."""


class ResourceError(SpannerError):
    """A configured size budget was exhausted."""


class VarOp(NamedTuple):
    """A variable operation: ``x⊢`` when ``close`` is False, ``⊣x`` otherwise.

    Tuple ordering of (var, close) is exactly the fixed total order on
    operations: by name, then open before close.
    """

    var: str
    close: bool

    def __str__(self) -> str:
        return f"⊣{self.var}" if self.close else f"{self.var}⊢"


def op_open(var: str) -> VarOp:
    return VarOp(var, False)


def op_close(var: str) -> VarOp:
    return VarOp(var, True)


def is_op(letter) -> bool:
    return isinstance(letter, VarOp)


def check_alphabet(sigma: str) -> str:
    if not sigma:
        raise DomainError("alphabet must be non-empty")
    if len(set(sigma)) != len(sigma):
        raise DomainError(f"alphabet {sigma!r} repeats a symbol")
    for ch in sigma:
        if ch in METACHARS or ch.isspace():
            raise DomainError(f"alphabet symbol {ch!r} is reserved")
    return sigma


def check_document(doc: str, sigma: str) -> str:
    for pos, ch in enumerate(doc):
        if ch not in sigma:
            raise DomainError(f"document symbol {ch!r} at position {pos + 1} not in alphabet")
    return doc


def check_var(name: str) -> str:
    if not VAR_NAME.match(name):
        raise DomainError(f"invalid variable identifier {name!r}")
    return name


def _checked(value: int) -> int:
    if value > sys.maxsize:
        raise OverflowError("span index exceeds platform integer range")
    return value


def shift_span(inner: Span, outer: Span) -> Span:
    """Shift ``inner`` right by ``outer``'s start minus one."""
    offset = outer[0] - 1
    return (_checked(inner[0] + offset), _checked(inner[1] + offset))


def shift_tuple(t: SpanTuple, outer: Span) -> SpanTuple:
    return tuple((var, shift_span(span, outer)) for var, span in t)


def make_tuple(mapping: Mapping[str, Span] | Iterable[tuple[str, Span]]) -> SpanTuple:
    items = mapping.items() if isinstance(mapping, Mapping) else mapping
    return tuple(sorted((var, (int(s[0]), int(s[1]))) for var, s in items))


def tuple_vars(t: SpanTuple) -> tuple[str, ...]:
    return tuple(var for var, _ in t)


def tuple_dict(t: SpanTuple) -> dict[str, list[int]]:
    return {var: [span[0], span[1]] for var, span in t}


def span_contains(outer: Span, inner: Span) -> bool:
    return outer[0] <= inner[0] <= inner[1] <= outer[1]


def spans_overlap(a: Span, b: Span) -> bool:
    return a[0] <= b[0] < a[1] or b[0] <= a[0] < b[1]


def covers(split: Span, t: SpanTuple) -> bool:
    return all(span_contains(split, span) for _, span in t)


def unshift_tuple(t: SpanTuple, split: Span) -> SpanTuple:
    """Inverse of ``shift_tuple``; caller guarantees ``split`` covers ``t``."""
    offset = split[0] - 1
    return tuple((var, (s[0] - offset, s[1] - offset)) for var, s in t)


def substring(doc: str, span: Span) -> str:
    return doc[span[0] - 1:span[1] - 1]


def all_spans(n: int) -> Iterator[Span]:
    for i in range(1, n + 2):
        for j in range(i, n + 2):
            yield (i, j)


def all_tuples(variables: Sequence[str], n: int) -> Iterator[SpanTuple]:
    spans = list(all_spans(n))
    names = sorted(variables)
    for choice in product(spans, repeat=len(names)):
        yield tuple(zip(names, choice))


def clr(refword: Iterable) -> str:
    return "".join(letter for letter in refword if not is_op(letter))


def refword_is_valid(refword: Sequence, variables: Iterable[str]) -> bool:
    try:
        tuple_of_refword(refword, variables)
    except ValidityError:
        return False
    return True


def tuple_of_refword(refword: Sequence, variables: Iterable[str]) -> SpanTuple:
    """Decode a valid ref-word into its span tuple."""
    names = set(variables)
    opened: dict[str, int] = {}
    closed: dict[str, int] = {}
    pos = 1
    for letter in refword:
        if not is_op(letter):
            pos += 1
            continue
        var = letter.var
        if var not in names:
            raise ValidityError(f"variable {var!r} is not declared")
        if not letter.close:
            if var in opened:
                raise ValidityError(f"variable {var!r} opened twice")
            opened[var] = pos
        else:
            if var not in opened or var in closed:
                raise ValidityError(f"variable {var!r} closed without a matching open")
            closed[var] = pos
    for var in sorted(names):
        if var not in closed:
            raise ValidityError(f"variable {var!r} is never closed")
    return tuple(sorted((var, (opened[var], closed[var])) for var in names))


def _position_ops(t: SpanTuple, n: int) -> list[list[VarOp]]:
    ops: list[list[VarOp]] = [[] for _ in range(n + 2)]
    for var, (i, j) in t:
        ops[i].append(op_open(var))
        ops[j].append(op_close(var))
    return ops


def encode_refword(doc: str, t: SpanTuple) -> tuple:
    """The unique ref-word for (doc, t) whose operation blocks are sorted."""
    ops = _position_ops(t, len(doc))
    word: list = []
    for pos in range(1, len(doc) + 2):
        word.extend(sorted(ops[pos]))
        if pos <= len(doc):
            word.append(doc[pos - 1])
    return tuple(word)


def _valid_orders(block: list[VarOp]) -> Iterator[tuple[VarOp, ...]]:
    for order in sorted(set(permutations(block))):
        seen: set[str] = set()
        ok = True
        for op in order:
            if op.close and op.var not in seen and op_open(op.var) in block:
                ok = False
                break
            if not op.close:
                seen.add(op.var)
        if ok:
            yield order


def all_encodings(doc: str, t: SpanTuple) -> Iterator[tuple]:
    """Every valid ref-word r with clr(r) = doc and t^r = t."""
    ops = _position_ops(t, len(doc))
    blocks = [list(_valid_orders(ops[pos])) for pos in range(1, len(doc) + 2)]
    for choice in product(*blocks):
        word: list = []
        for pos, block in enumerate(choice):
            word.extend(block)
            if pos < len(doc):
                word.append(doc[pos])
        yield tuple(word)


def format_refword(refword: Iterable) -> str:
    return " ".join(str(letter) for letter in refword)


def parse_refword(text: str) -> tuple:
    """Parse a space separated ref-word such as ``"a x⊢ b ⊣x b"``."""
    word: list = []
    for token in text.split():
        if token.endswith("⊢"):
            word.append(op_open(check_var(token[:-1])))
        elif token.startswith("⊣"):
            word.append(op_close(check_var(token[1:])))
        else:
            word.extend(token)
    return tuple(word)


def relation_vars(relation: Iterable[SpanTuple]) -> set[tuple[str, ...]]:
    return {tuple_vars(t) for t in relation}


def span_relations_equal(r1: Iterable[SpanTuple], r2: Iterable[SpanTuple]) -> bool:
    r1, r2 = frozenset(r1), frozenset(r2)
    domains = relation_vars(r1) | relation_vars(r2)
    if len(domains) > 1:
        raise DomainError(f"relations have mismatched variable domains {sorted(domains)}")
    return r1 == r2


def relation_json(relation: Iterable[SpanTuple]) -> list[dict[str, list[int]]]:
    return [tuple_dict(t) for t in sorted(relation)]
