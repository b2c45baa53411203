"""Regex formulas with capture variables: AST, parser, printer and compiler."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

from .core import METACHARS, DomainError, check_alphabet, is_op, op_close, op_open
from .vsa import EPS, Builder, VSetAutomaton, functionality_check


class FormulaSyntaxError(DomainError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class Formula:
    """Base class of formula nodes; nodes are frozen dataclasses."""


@dataclass(frozen=True)
class Empty(Formula):
    pass


@dataclass(frozen=True)
class Epsilon(Formula):
    pass


@dataclass(frozen=True)
class Symbol(Formula):
    char: str


@dataclass(frozen=True)
class Wildcard(Formula):
    pass


@dataclass(frozen=True)
class Union(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Concat(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Star(Formula):
    body: Formula


@dataclass(frozen=True)
class Plus(Formula):
    body: Formula


@dataclass(frozen=True)
class Optional(Formula):
    body: Formula


@dataclass(frozen=True)
class Capture(Formula):
    var: str
    body: Formula


def variables(f: Formula) -> frozenset[str]:
    if isinstance(f, Capture):
        return variables(f.body) | {f.var}
    if isinstance(f, (Union, Concat)):
        return variables(f.left) | variables(f.right)
    if isinstance(f, (Star, Plus, Optional)):
        return variables(f.body)
    return frozenset()


# --------------------------------------------------------------------------
# Parsing

_POSTFIX = {"*": Star, "?": Optional}


class _Parser:
    def __init__(self, text: str, sigma: str):
        self.text = text
        self.sigma = sigma
        self.pos = 0
        # "Σ" doubles as the wildcard unless it is a real symbol
        self.sigma_alias = "Σ" not in sigma

    def peek(self) -> str:
        self.skip_space()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def skip_space(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def error(self, message: str):
        raise FormulaSyntaxError(message, self.pos)

    def parse(self) -> Formula:
        if not self.text.strip():
            self.error("empty formula")
        node = self.union()
        if self.peek():
            self.error(f"unexpected {self.peek()!r}")
        return node

    def at_union(self) -> bool:
        ch = self.peek()
        if ch == "|":
            return True
        return ch == "+" and not self.text.startswith("++", self.pos)

    def union(self) -> Formula:
        parts = [self.concat()]
        while self.at_union():
            self.pos += 1
            parts.append(self.concat())
        node = parts[-1]
        for part in reversed(parts[:-1]):
            node = Union(part, node)
        return node

    def starts_atom(self) -> bool:
        ch = self.peek()
        return ch != "" and ch not in "|)}*?" and not (ch == "+")

    def concat(self) -> Formula:
        if not self.starts_atom():
            self.error("expected an expression")
        parts = []
        while self.starts_atom():
            parts.append(self.postfix())
        node = parts[-1]
        for part in reversed(parts[:-1]):
            node = Concat(part, node)
        return node

    def postfix(self) -> Formula:
        node = self.atom()
        while True:
            ch = self.text[self.pos] if self.pos < len(self.text) else ""
            if ch in _POSTFIX:
                node = _POSTFIX[ch](node)
                self.pos += 1
            elif self.text.startswith("++", self.pos):
                node = Plus(node)
                self.pos += 2
            else:
                return node

    def identifier(self) -> str | None:
        """A variable name if the upcoming identifier is directly followed by '{'."""
        end = self.pos
        if not self.text[end].isascii() or not self.text[end].isalpha():
            return None
        while end < len(self.text) and (self.text[end].isascii()
                                        and (self.text[end].isalnum() or self.text[end] == "_")):
            end += 1
        if end < len(self.text) and self.text[end] == "{":
            return self.text[self.pos:end]
        return None

    def atom(self) -> Formula:
        self.skip_space()
        ch = self.text[self.pos]
        if ch == "(":
            self.pos += 1
            node = self.union()
            if self.peek() != ")":
                self.error("expected ')'")
            self.pos += 1
            return node
        if self.text.startswith("<e>", self.pos):
            self.pos += 3
            return Epsilon()
        if self.text.startswith("<0>", self.pos):
            self.pos += 3
            return Empty()
        if ch == ".":
            self.pos += 1
            return Wildcard()
        if ch == "\\":
            if self.pos + 1 >= len(self.text):
                self.error("dangling escape")
            return self.symbol(self.text[self.pos + 1], 2)
        name = self.identifier()
        if name is not None:
            self.pos += len(name) + 1
            body = self.union() if self.peek() != "}" else Epsilon()
            if self.peek() != "}":
                self.error("expected '}'")
            self.pos += 1
            return Capture(name, body)
        if ch == "Σ" and self.sigma_alias:
            self.pos += 1
            return Wildcard()
        if ch in METACHARS:
            self.error(f"unexpected metacharacter {ch!r}")
        return self.symbol(ch, 1)

    def symbol(self, ch: str, width: int) -> Formula:
        if ch not in self.sigma:
            self.error(f"symbol {ch!r} not in alphabet")
        self.pos += width
        return Symbol(ch)


def parse_formula(text: str, sigma: str) -> Formula:
    check_alphabet(sigma)
    return _Parser(text, sigma).parse()


def read_formula_file(path: str | Path) -> tuple[Formula, str]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    return parse_formula_text("\n".join(lines))


def parse_formula_text(text: str) -> tuple[Formula, str]:
    """Parse the two-line file format: ``alphabet: <symbols>`` then the formula."""
    lines = [line for line in text.splitlines() if line.strip()]
    if len(lines) < 2 or not lines[0].startswith("alphabet:"):
        raise DomainError("formula file needs an 'alphabet:' line followed by the formula")
    sigma = "".join(lines[0][len("alphabet:"):].split())
    return parse_formula(" ".join(lines[1:]), sigma), sigma


# --------------------------------------------------------------------------
# Printing

def _escape(ch: str) -> str:
    return "\\" + ch if ch in METACHARS or ch == "Σ" else ch


def to_text(f: Formula) -> str:
    """Print a formula so that parsing it gives back the same tree."""
    if isinstance(f, Empty):
        return "<0>"
    if isinstance(f, Epsilon):
        return "<e>"
    if isinstance(f, Symbol):
        return _escape(f.char)
    if isinstance(f, Wildcard):
        return "."
    if isinstance(f, Capture):
        return f"{f.var}{{{to_text(f.body)}}}"
    if isinstance(f, Union):
        left = to_text(f.left)
        if isinstance(f.left, Union):
            left = f"({left})"
        return f"{left} | {to_text(f.right)}"
    if isinstance(f, Concat):
        left, right = to_text(f.left), to_text(f.right)
        if isinstance(f.left, (Union, Concat)):
            left = f"({left})"
        if isinstance(f.right, Union):
            right = f"({right})"
        return f"{left} {right}"
    body = to_text(f.body)
    if isinstance(f.body, (Union, Concat)):
        body = f"({body})"
    suffix = {Star: "*", Plus: "++", Optional: "?"}[type(f)]
    return body + suffix


# --------------------------------------------------------------------------
# Compilation (Thompson-style over Σ ∪ Γ_V)

def compile_to_vsa(f: Formula, sigma: str) -> VSetAutomaton:
    bld = Builder()
    counter = iter(range(1 << 62))

    def fresh():
        return next(counter)

    def build(node: Formula):
        start, end = fresh(), fresh()
        bld.state(start)
        bld.state(end)
        if isinstance(node, Empty):
            pass
        elif isinstance(node, Epsilon):
            bld.add(start, EPS, end)
        elif isinstance(node, Symbol):
            bld.add(start, node.char, end)
        elif isinstance(node, Wildcard):
            for a in sigma:
                bld.add(start, a, end)
        elif isinstance(node, Union):
            for part in (node.left, node.right):
                s, e = build(part)
                bld.add(start, EPS, s)
                bld.add(e, EPS, end)
        elif isinstance(node, Concat):
            s1, e1 = build(node.left)
            s2, e2 = build(node.right)
            bld.add(start, EPS, s1)
            bld.add(e1, EPS, s2)
            bld.add(e2, EPS, end)
        elif isinstance(node, (Star, Plus, Optional)):
            s, e = build(node.body)
            bld.add(start, EPS, s)
            bld.add(e, EPS, end)
            if not isinstance(node, Plus):
                bld.add(start, EPS, end)
            if not isinstance(node, Optional):
                bld.add(e, EPS, s)
        elif isinstance(node, Capture):
            s, e = build(node.body)
            bld.add(start, op_open(node.var), s)
            bld.add(e, op_close(node.var), end)
        else:
            raise TypeError(f"unknown formula node {node!r}")
        return start, end

    start, end = build(f)
    bld.final(end)
    return bld.finish(sigma, variables(f), start)


def check_functional_formula(f: Formula, sigma: str) -> bool:
    return functionality_check(compile_to_vsa(f, sigma))


def formula_vsa(text: str, sigma: str) -> VSetAutomaton:
    return compile_to_vsa(parse_formula(text, sigma), sigma)


# --------------------------------------------------------------------------
# Direct membership test, independent of the compiler (used by the oracle)

def matches_refword(f: Formula, word: tuple, sigma: str) -> bool:
    """Whether ``word`` belongs to the ref-language of ``f``."""

    @lru_cache(maxsize=None)
    def ends(node: Formula, i: int) -> frozenset[int]:
        if isinstance(node, Empty):
            return frozenset()
        if isinstance(node, Epsilon):
            return frozenset([i])
        if isinstance(node, (Symbol, Wildcard)):
            if i < len(word) and not is_op(word[i]):
                if isinstance(node, Wildcard) and word[i] in sigma or word[i] == getattr(node, "char", None):
                    return frozenset([i + 1])
            return frozenset()
        if isinstance(node, Union):
            return ends(node.left, i) | ends(node.right, i)
        if isinstance(node, Concat):
            out: set[int] = set()
            for j in ends(node.left, i):
                out |= ends(node.right, j)
            return frozenset(out)
        if isinstance(node, Capture):
            if i < len(word) and word[i] == op_open(node.var):
                out = set()
                for j in ends(node.body, i + 1):
                    if j < len(word) and word[j] == op_close(node.var):
                        out.add(j + 1)
                return frozenset(out)
            return frozenset()
        if isinstance(node, Optional):
            return ends(node.body, i) | {i}
        # Star and Plus: iterate the body to a fixpoint
        reach = set(ends(node.body, i))
        frontier = list(reach)
        while frontier:
            j = frontier.pop()
            for k in ends(node.body, j):
                if k not in reach:
                    reach.add(k)
                    frontier.append(k)
        if isinstance(node, Star):
            reach.add(i)
        return frozenset(reach)

    return len(word) in ends(f, 0)
