"""Plain NFAs over arbitrary hashable letters, used for the tagged-alphabet
automata of the cover check and for unambiguous-automaton containment."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Hashable, Iterable

from .core import DomainError

EPS = None


class AmbiguityError(DomainError):
    """An automaton expected to be unambiguous has two accepting paths for a word."""


@dataclass(frozen=True)
class Nfa:
    states: int
    initial: int
    finals: frozenset[int]
    delta: dict  # state -> letter -> tuple of states

    def out(self, q: int) -> dict:
        return self.delta.get(q, {})

    def edges(self) -> Iterable[tuple[int, Hashable, int]]:
        for q, row in self.delta.items():
            for letter, targets in row.items():
                for r in targets:
                    yield q, letter, r


class NfaBuilder:
    def __init__(self):
        self.index: dict[Hashable, int] = {}
        self.delta: dict[int, dict] = defaultdict(lambda: defaultdict(set))
        self.finals: set[int] = set()

    def state(self, key: Hashable) -> int:
        if key not in self.index:
            self.index[key] = len(self.index)
        return self.index[key]

    def add(self, src: Hashable, letter, dst: Hashable) -> None:
        self.delta[self.state(src)][letter].add(self.state(dst))

    def final(self, key: Hashable) -> None:
        self.finals.add(self.state(key))

    def finish(self, initial_key: Hashable) -> Nfa:
        init = self.state(initial_key)
        delta = {q: {l: tuple(sorted(t)) for l, t in row.items()} for q, row in self.delta.items()}
        return Nfa(len(self.index), init, frozenset(self.finals), delta)


def from_vsa(a) -> Nfa:
    b = NfaBuilder()
    for q in range(a.states):
        b.state(q)
    for s, l, d in a.transitions:
        b.add(s, l, d)
    for f in a.finals:
        b.final(f)
    return b.finish(a.initial)


def _closure(n: Nfa, q: int) -> set[int]:
    seen = {q}
    stack = [q]
    while stack:
        p = stack.pop()
        for r in n.out(p).get(EPS, ()):
            if r not in seen:
                seen.add(r)
                stack.append(r)
    return seen


def eliminate_epsilon(n: Nfa) -> Nfa:
    b = NfaBuilder()
    for q in range(n.states):
        b.state(q)
    for q in range(n.states):
        for p in _closure(n, q):
            if p in n.finals:
                b.final(q)
            for letter, targets in n.out(p).items():
                if letter is EPS:
                    continue
                for r in targets:
                    b.add(q, letter, r)
    return trim(b.finish(n.initial))


def trim(n: Nfa) -> Nfa:
    fwd = {n.initial}
    stack = [n.initial]
    back: dict[int, set[int]] = defaultdict(set)
    for q, _, r in n.edges():
        back[r].add(q)
    while stack:
        q = stack.pop()
        for targets in n.out(q).values():
            for r in targets:
                if r not in fwd:
                    fwd.add(r)
                    stack.append(r)
    bwd = set(n.finals)
    stack = list(bwd)
    while stack:
        q = stack.pop()
        for p in back[q]:
            if p not in bwd:
                bwd.add(p)
                stack.append(p)
    useful = fwd & bwd
    b = NfaBuilder()
    b.state(n.initial)
    for q, letter, r in n.edges():
        if q in useful and r in useful:
            b.add(q, letter, r)
    for f in n.finals & useful:
        b.final(f)
    return b.finish(n.initial)


def product(a: Nfa, c: Nfa) -> Nfa:
    """Synchronous product recognizing L(a) ∩ L(c); both must be ε-free."""
    b = NfaBuilder()
    start = (a.initial, c.initial)
    b.state(start)
    stack = [start]
    seen = {start}
    while stack:
        p, q = node = stack.pop()
        if p in a.finals and q in c.finals:
            b.final(node)
        row_c = c.out(q)
        for letter, targets in a.out(p).items():
            for r in targets:
                for s in row_c.get(letter, ()):
                    nxt = (r, s)
                    b.add(node, letter, nxt)
                    if nxt not in seen:
                        seen.add(nxt)
                        stack.append(nxt)
    return trim(b.finish(start))


def ambiguous_word(n: Nfa) -> tuple | None:
    """A word with two accepting paths in the ε-free ``n``, or ``None``.

    Searches the self-product for a pair of distinct states that is reachable
    from the initial pair and co-reachable to a pair of finals.
    """
    n = trim(n)
    start = (n.initial, n.initial)
    parent: dict[tuple, tuple | None] = {start: None}
    order = [start]
    k = 0
    while k < len(order):
        p, q = node = order[k]
        k += 1
        for letter, targets in n.out(p).items():
            for r in targets:
                for s in n.out(q).get(letter, ()):
                    nxt = (r, s)
                    if nxt not in parent:
                        parent[nxt] = (node, letter)
                        order.append(nxt)
    back: dict[tuple, set] = defaultdict(set)
    for node in order:
        p, q = node
        for letter, targets in n.out(p).items():
            for r in targets:
                for s in n.out(q).get(letter, ()):
                    back[(r, s)].add((node, letter))
    good = {node for node in order if node[0] in n.finals and node[1] in n.finals}
    succ_letter: dict[tuple, tuple] = {}
    stack = list(good)
    while stack:
        node = stack.pop()
        for prev, letter in back[node]:
            if prev not in good:
                good.add(prev)
                succ_letter[prev] = (letter, node)
                stack.append(prev)
    for node in order:
        if node[0] != node[1] and node in good:
            prefix = []
            cur = node
            while parent[cur] is not None:
                prev, letter = parent[cur]
                prefix.append(letter)
                cur = prev
            prefix.reverse()
            suffix = []
            cur = node
            while cur in succ_letter and not (cur[0] in n.finals and cur[1] in n.finals):
                letter, cur = succ_letter[cur]
                suffix.append(letter)
            return tuple(prefix + suffix)
    return None


def _forward_counts(n: Nfa, length: int) -> list[int]:
    vec = {n.initial: 1}
    counts = []
    for _ in range(length + 1):
        counts.append(sum(v for q, v in vec.items() if q in n.finals))
        nxt: dict[int, int] = defaultdict(int)
        for q, v in vec.items():
            for targets in n.out(q).values():
                for r in targets:
                    nxt[r] += v
        vec = nxt
    return counts


def _backward_tables(n: Nfa, length: int) -> list[dict[int, int]]:
    """tables[k][q] = number of accepting paths of length k starting in q."""
    tables = [{q: 1 for q in n.finals}]
    for _ in range(length):
        prev = tables[-1]
        cur: dict[int, int] = defaultdict(int)
        for q, row in n.delta.items():
            total = 0
            for targets in row.values():
                for r in targets:
                    total += prev.get(r, 0)
            if total:
                cur[q] = total
        tables.append(dict(cur))
    return tables


def ufa_containment(a: Nfa, b: Nfa) -> tuple[bool, tuple | None, int]:
    """Decide L(a) ⊆ L(b) for unambiguous ε-free automata by path counting.

    Returns (answer, witness word or None, product size). Raises
    ``AmbiguityError`` when ``a`` or the product ``a × b`` is ambiguous,
    since counting is only exact for unambiguous automata.
    """
    a, b = trim(eliminate_epsilon(a)), trim(eliminate_epsilon(b))
    ab = product(a, b)
    for name, n in (("left automaton", a), ("product automaton", ab)):
        word = ambiguous_word(n)
        if word is not None:
            raise AmbiguityError(f"{name} is ambiguous on a word of length {len(word)}")
    bound = a.states + a.states * max(b.states, 1)
    count_a = _forward_counts(a, bound)
    count_ab = _forward_counts(ab, bound)
    for length, (ca, cab) in enumerate(zip(count_a, count_ab)):
        if ca != cab:
            return False, _difference_word(a, ab, length), ab.states
    return True, None, ab.states


def _difference_word(a: Nfa, ab: Nfa, length: int) -> tuple:
    """A word of the given length in L(a) but not in L(ab)."""
    ta, tab = _backward_tables(a, length), _backward_tables(ab, length)
    va, vab = {a.initial: 1}, {ab.initial: 1}
    word = []
    for step in range(length):
        rem = length - step - 1
        letters = {l for q in va for l in a.out(q)}
        for letter in sorted(letters, key=repr):
            na, nab = _advance(a, va, letter), _advance(ab, vab, letter)
            in_a = sum(v * ta[rem].get(q, 0) for q, v in na.items())
            in_ab = sum(v * tab[rem].get(q, 0) for q, v in nab.items())
            if in_a > in_ab:
                word.append(letter)
                va, vab = na, nab
                break
        else:  # pragma: no cover - counts guarantee a choice exists
            raise AssertionError("no distinguishing letter found")
    return tuple(word)


def _advance(n: Nfa, vec: dict[int, int], letter) -> dict[int, int]:
    out: dict[int, int] = defaultdict(int)
    for q, v in vec.items():
        for r in n.out(q).get(letter, ()):
            out[r] += v
    return out


def dfa_containment(a: Nfa, b: Nfa) -> tuple[bool, tuple | None]:
    """Reference containment by subset construction of ``b``; for cross-checks."""
    a, b = eliminate_epsilon(a), eliminate_epsilon(b)
    start = (a.initial, frozenset([b.initial]))
    parent = {start: None}
    queue = [start]
    k = 0
    while k < len(queue):
        node = queue[k]
        k += 1
        p, subset = node
        if p in a.finals and not (subset & b.finals):
            word = []
            while parent[node] is not None:
                node, letter = parent[node]
                word.append(letter)
            return False, tuple(reversed(word))
        for letter, targets in a.out(p).items():
            nxt_set = frozenset(r for q in subset for r in b.out(q).get(letter, ()))
            for r in targets:
                nxt = (r, nxt_set)
                if nxt not in parent:
                    parent[nxt] = (node, letter)
                    queue.append(nxt)
    return True, None


def accepts(n: Nfa, word) -> bool:
    current = set()
    for q in _closure(n, n.initial):
        current.add(q)
    for letter in word:
        nxt = set()
        for q in current:
            for r in n.out(q).get(letter, ()):
                nxt |= _closure(n, r)
        current = nxt
    return bool(current & n.finals)
