"""Brute-force reference semantics, bounded checks and random test instances.

Everything here is deliberately naive: spanners are evaluated by listing
every valid ref-word over a document and simulating the automaton on it, and
the bounded checks enumerate every document up to a length bound. A bounded
check either reports a counterexample or "no counterexample up to bound";
it never answers "yes".
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Iterable, Iterator, Sequence

from .core import (
    ResourceError,
    Span,
    SpanTuple,
    all_encodings,
    all_tuples,
    check_alphabet,
    covers,
    op_close,
    op_open,
    shift_tuple,
    spans_overlap,
    substring,
    tuple_dict,
    unshift_tuple,
)
from .formula import Formula, matches_refword, variables as formula_variables
from .vsa import EPS, Builder, VSetAutomaton, accepts_refword, restrict_to_key

DEFAULT_BOUND = 5
NO_COUNTEREXAMPLE = "no counterexample up to bound"


# --------------------------------------------------------------------------
# Reference evaluation

def documents(sigma: str, max_len: int) -> Iterator[str]:
    """All documents over ``sigma`` of length at most ``max_len``, shortest first."""
    for n in range(max_len + 1):
        for letters in product(sigma, repeat=n):
            yield "".join(letters)


def brute_eval(spanner: VSetAutomaton | Formula, doc: str, *, sigma: str | None = None,
               bound: int = DEFAULT_BOUND) -> frozenset[SpanTuple]:
    """Tuples t such that some valid ref-word r with clr(r) = doc and t^r = t is accepted.

    ``spanner`` is an automaton or a formula; formulas need ``sigma``.
    """
    if len(doc) > bound:
        raise ResourceError(f"document of length {len(doc)} exceeds the oracle bound {bound}")
    if isinstance(spanner, Formula):
        if sigma is None:
            raise ValueError("a formula needs its alphabet")
        names = sorted(formula_variables(spanner))

        def accepted(word):
            return matches_refword(spanner, word, sigma)
    else:
        names = list(spanner.vars)

        def accepted(word):
            return accepts_refword(spanner, word)
    return frozenset(t for t in all_tuples(names, len(doc))
                     if any(accepted(w) for w in all_encodings(doc, t)))


def brute_annotated_eval(a: VSetAutomaton, doc: str,
                         bound: int = DEFAULT_BOUND) -> frozenset[tuple[str | None, SpanTuple]]:
    if not a.annotations:
        return frozenset((None, t) for t in brute_eval(a, doc, bound=bound))
    return frozenset((k, t) for k in a.keys
                     for t in brute_eval(restrict_to_key(a, k), doc, bound=bound))


class Evaluator:
    """Memoized ``brute_eval``; automata are keyed by identity."""

    def __init__(self, bound: int = DEFAULT_BOUND):
        self.bound = bound
        self._cache: dict = {}
        self._alive: dict = {}

    def __call__(self, a: VSetAutomaton, doc: str) -> frozenset[SpanTuple]:
        key = (id(a), doc)
        if key not in self._cache:
            self._alive[id(a)] = a
            self._cache[key] = brute_eval(a, doc, bound=max(self.bound, len(doc)))
        return self._cache[key]


def _split_span(t: SpanTuple) -> Span:
    return t[0][1]


def brute_compose(ps: VSetAutomaton, s: VSetAutomaton, doc: str,
                  evaluator: Callable | None = None) -> frozenset[SpanTuple]:
    """(ps ∘ s)(doc) computed split by split from the definition."""
    ev = evaluator or Evaluator(max(DEFAULT_BOUND, len(doc)))
    out = set()
    for split_tuple in ev(s, doc):
        split = _split_span(split_tuple)
        for t in ev(ps, substring(doc, split)):
            out.add(shift_tuple(t, split))
    return frozenset(out)


def brute_canonical(p: VSetAutomaton, s: VSetAutomaton, doc: str, bound: int,
                    evaluator: Callable | None = None) -> frozenset[SpanTuple]:
    """Tuples the canonical split-spanner selects on ``doc``, looking only at
    enclosing documents of length at most ``bound``."""
    ev = evaluator or Evaluator(bound)
    out = set()
    for big in documents(p.sigma, bound):
        for split_tuple in ev(s, big):
            split = _split_span(split_tuple)
            if substring(big, split) != doc:
                continue
            for t in ev(p, big):
                if covers(split, t):
                    out.add(unshift_tuple(t, split))
    return frozenset(out)


# --------------------------------------------------------------------------
# Bounded checks

@dataclass
class BoundedReport:
    check: str
    bound: int
    counterexample: dict | None = None
    documents_checked: int = 0
    seed: int | None = None

    @property
    def found(self) -> bool:
        return self.counterexample is not None

    def to_json(self) -> dict:
        return {
            "check": self.check,
            "bound": self.bound,
            "seed": self.seed,
            "documents_checked": self.documents_checked,
            "result": "counterexample" if self.found else NO_COUNTEREXAMPLE,
            "counterexample": self.counterexample,
        }


def bounded_check(check: str, predicate: Callable[[str], dict | None], sigma: str,
                  bound: int = DEFAULT_BOUND, seed: int | None = None) -> BoundedReport:
    """Run ``predicate`` on every document up to ``bound``; stop at the first
    document for which it returns a counterexample."""
    report = BoundedReport(check, bound, seed=seed)
    for doc in documents(sigma, bound):
        report.documents_checked += 1
        found = predicate(doc)
        if found is not None:
            report.counterexample = {"document": doc, **found}
            break
    return report


def _uncovered(p_rel, s_rel) -> SpanTuple | None:
    splits = [_split_span(x) for x in s_rel]
    for t in sorted(p_rel):
        if not any(covers(s, t) for s in splits):
            return t
    return None


def cover_violation(p: VSetAutomaton, s: VSetAutomaton, ev: Callable):
    def predicate(doc):
        t = _uncovered(ev(p, doc), ev(s, doc))
        return None if t is None else {"tuple": tuple_dict(t)}
    return predicate


def overlapping_splits(s_rel) -> tuple[Span, Span] | None:
    spans = sorted(_split_span(x) for x in s_rel)
    for i, a in enumerate(spans):
        for b in spans[i + 1:]:
            if spans_overlap(a, b):
                return a, b
    return None


def disjointness_violation(s: VSetAutomaton, ev: Callable):
    def predicate(doc):
        pair = overlapping_splits(ev(s, doc))
        return None if pair is None else {"spans": [list(pair[0]), list(pair[1])]}
    return predicate


def relation_difference(left, right) -> tuple[SpanTuple, str] | None:
    only_left = sorted(left - right)
    if only_left:
        return only_left[0], "lhs"
    only_right = sorted(right - left)
    if only_right:
        return only_right[0], "rhs"
    return None


def equivalence_violation(left: Callable[[str], frozenset], right: Callable[[str], frozenset]):
    def predicate(doc):
        diff = relation_difference(left(doc), right(doc))
        return None if diff is None else {"tuple": tuple_dict(diff[0]), "side": diff[1]}
    return predicate


def bounded_cover(p, s, bound=DEFAULT_BOUND, evaluator=None, seed=None) -> BoundedReport:
    ev = evaluator or Evaluator(bound)
    return bounded_check("cover", cover_violation(p, s, ev), p.sigma, bound, seed)


def bounded_disjoint(s, bound=DEFAULT_BOUND, evaluator=None, seed=None) -> BoundedReport:
    ev = evaluator or Evaluator(bound)
    return bounded_check("disjoint", disjointness_violation(s, ev), s.sigma, bound, seed)


def bounded_equivalence(p, q, bound=DEFAULT_BOUND, evaluator=None, seed=None) -> BoundedReport:
    ev = evaluator or Evaluator(bound)
    return bounded_check("equivalence", equivalence_violation(lambda d: ev(p, d), lambda d: ev(q, d)),
                         p.sigma, bound, seed)


def bounded_split_correct(p, ps, s, bound=DEFAULT_BOUND, evaluator=None, seed=None) -> BoundedReport:
    ev = evaluator or Evaluator(bound)
    pred = equivalence_violation(lambda d: ev(p, d), lambda d: brute_compose(ps, s, d, ev))
    return bounded_check("split-correct", pred, p.sigma, bound, seed)


def _content_index(s: VSetAutomaton, sigma: str, bound: int, ev) -> dict[str, list[tuple[str, Span]]]:
    """content -> every (document, split) with that content, up to the bound."""
    index: dict[str, list[tuple[str, Span]]] = {}
    for doc in documents(sigma, bound):
        for split_tuple in sorted(ev(s, doc)):
            split = _split_span(split_tuple)
            index.setdefault(substring(doc, split), []).append((doc, split))
    return index


def _has_nonempty_span(t: SpanTuple) -> bool:
    return any(i < j for _, (i, j) in t)


def bounded_split_condition(p, s, bound=DEFAULT_BOUND, evaluator=None, seed=None) -> BoundedReport:
    """Cover condition, then the transfer clause: whenever two splits carry the
    same content, a tuple selected through one is selected through the other.

    The transfer clause is only tested on tuples with at least one non-empty
    span. Only then is a covering split of a disjoint splitter unique, which
    is what makes a violation a proof of non-splittability.
    """
    ev = evaluator or Evaluator(bound)
    cover = bounded_cover(p, s, bound, ev, seed)
    if cover.found:
        cover.check = "split-condition"
        cover.counterexample["clause"] = "cover"
        return cover
    report = BoundedReport("split-condition", bound, seed=seed)
    index = _content_index(s, p.sigma, bound, ev)
    report.documents_checked = cover.documents_checked
    for content in sorted(index, key=lambda c: (len(c), c)):
        places = index[content]
        inner = set()
        for doc, split in places:
            inner |= {unshift_tuple(t, split) for t in ev(p, doc) if covers(split, t)}
        for t in sorted(inner):
            if not _has_nonempty_span(t):
                continue
            member = [(doc, split, shift_tuple(t, split) in ev(p, doc)) for doc, split in places]
            yes = [m for m in member if m[2]]
            no = [m for m in member if not m[2]]
            if yes and no:
                report.counterexample = {
                    "clause": "transfer",
                    "content": content,
                    "tuple": tuple_dict(t),
                    "selected": {"document": yes[0][0], "split": list(yes[0][1])},
                    "not_selected": {"document": no[0][0], "split": list(no[0][1])},
                }
                return report
    return report


def bounded_splittable_refutation(p, s, bound=DEFAULT_BOUND, evaluator=None, seed=None) -> BoundedReport:
    """Search for a proof that ``p`` is not splittable by ``s``.

    A counterexample is a tuple t ∈ p(d) such that every split s of d covering
    t is "poisoned": some document d'' of length at most the bound has a split
    s'' with the same content where the transported tuple is not selected by
    p. No split-spanner can then produce t, so the refutation holds for every
    splitter, disjoint or not.
    """
    ev = evaluator or Evaluator(bound)
    index = _content_index(s, p.sigma, bound, ev)
    report = BoundedReport("splittable-refutation", bound, seed=seed)
    for doc in documents(p.sigma, bound):
        report.documents_checked += 1
        splits = [_split_span(x) for x in ev(s, doc)]
        for t in sorted(ev(p, doc)):
            reasons = []
            for split in sorted(splits):
                if not covers(split, t):
                    continue
                inner = unshift_tuple(t, split)
                bad = next(((d2, s2) for d2, s2 in index.get(substring(doc, split), [])
                            if shift_tuple(inner, s2) not in ev(p, d2)), None)
                if bad is None:
                    break
                reasons.append({"split": list(split), "document": bad[0], "other_split": list(bad[1])})
            else:
                report.counterexample = {"document": doc, "tuple": tuple_dict(t), "poisoned": reasons}
                return report
    return report


# --------------------------------------------------------------------------
# Random instances

@dataclass(frozen=True)
class Corpus:
    sigma: str = "ab"
    max_len: int = DEFAULT_BOUND
    max_states: int = 6
    seed: int = 0

    def documents(self) -> list[str]:
        return list(documents(self.sigma, self.max_len))

    def rng(self) -> random.Random:
        return random.Random(self.seed)


def random_refword(rng: random.Random, sigma: str, variables: Sequence[str], max_len: int = 3) -> tuple:
    """A random valid ref-word over a random document of length ≤ ``max_len``."""
    doc = "".join(rng.choice(sigma) for _ in range(rng.randint(0, max_len)))
    spans = {}
    for v in variables:
        i = rng.randint(1, len(doc) + 1)
        spans[v] = (i, rng.randint(i, len(doc) + 1))
    t = tuple(sorted(spans.items()))
    return rng.choice(list(all_encodings(doc, t)))


def random_spanner(rng: random.Random, sigma: str, variables: Sequence[str] = ("y",),
                   max_states: int = 6, density: float = 0.3, op_density: float = 0.08,
                   eps_density: float = 0.03) -> VSetAutomaton:
    """A random automaton with at most ``max_states`` states.

    A random valid ref-word is threaded through the states so the spanner is
    never empty; random symbol, operation and ε edges are then added.
    """
    n = rng.randint(2, max_states)
    b = Builder()
    for q in range(n):
        b.state(q)
    word = random_refword(rng, sigma, variables)
    q = 0
    for letter in word:
        r = rng.randrange(n)
        b.add(q, letter, r)
        q = r
    b.final(q)
    ops = [op_open(v) for v in variables] + [op_close(v) for v in variables]
    for src in range(n):
        for ch in sigma:
            if rng.random() < density:
                b.add(src, ch, rng.randrange(n))
        for op in ops:
            if rng.random() < op_density:
                b.add(src, op, rng.randrange(n))
        if rng.random() < eps_density:
            b.add(src, EPS, rng.randrange(n))
        if rng.random() < 0.15:
            b.final(src)
    return b.finish(sigma, variables, 0)


def random_splitter(rng: random.Random, sigma: str, max_states: int = 6, var: str = "x") -> VSetAutomaton:
    return random_spanner(rng, sigma, (var,), max_states)


def separator_splitter(rng: random.Random, sigma: str, var: str = "x") -> VSetAutomaton:
    """A disjoint splitter cutting at a separator symbol, in one of a few shapes."""
    sep = rng.choice(sigma)
    rest = [c for c in sigma if c != sep] or [sep]
    b = Builder()
    shape = rng.randrange(3)
    # pre: skip whole segments; open: inside the chosen segment; post: skip the rest
    for ch in sigma:
        b.add("post", ch, "post")
    b.final("post")
    if shape == 0:          # every maximal separator-free segment
        for ch in rest:
            b.add("pre", ch, "skip")
            b.add("skip", ch, "skip")
            b.add("in", ch, "in")
        b.add("pre", sep, "pre")
        b.add("skip", sep, "pre")
        b.add("pre", op_open(var), "in")
        b.add("in", op_close(var), "end")
        b.add("end", sep, "post")
        b.final("end")
    elif shape == 1:        # every single symbol
        for ch in sigma:
            b.add("pre", ch, "pre")
            b.add("in", ch, "body")
        b.add("pre", op_open(var), "in")
        b.add("body", op_close(var), "post")
    else:                   # the whole document
        for ch in sigma:
            b.add("in", ch, "in")
        b.add("pre", op_open(var), "in")
        b.add("in", op_close(var), "done")
        b.final("done")
    return b.finish(sigma, (var,), "pre")


def mutate(rng: random.Random, a: VSetAutomaton) -> VSetAutomaton:
    """Redirect, drop or add one transition."""
    trans = list(a.transitions)
    choice = rng.randrange(3) if trans else 2
    if choice == 0:
        i = rng.randrange(len(trans))
        src, label, _ = trans[i]
        trans[i] = (src, label, rng.randrange(a.states))
    elif choice == 1:
        trans.pop(rng.randrange(len(trans)))
    else:
        labels = list(a.sigma) + [op for v in a.vars for op in (op_open(v), op_close(v))]
        trans.append((rng.randrange(a.states), rng.choice(labels), rng.randrange(a.states)))
    return VSetAutomaton.build(a.sigma, a.vars, a.states, a.initial, a.finals, trans)


def annotate_randomly(rng: random.Random, a: VSetAutomaton, keys: Sequence[str]) -> VSetAutomaton:
    annotations = {q: rng.choice(keys) for q in a.finals}
    return VSetAutomaton.build(a.sigma, a.vars, a.states, a.initial, a.finals,
                               a.transitions, annotations)


# --------------------------------------------------------------------------
# Union-universality gadgets

@dataclass(frozen=True)
class Dfa:
    """A possibly partial DFA; ``delta`` maps (state, symbol) to a state."""
    states: int
    initial: int
    finals: frozenset[int]
    delta: dict = field(hash=False)

    def accepts(self, word: str) -> bool:
        q = self.initial
        for ch in word:
            if (q, ch) not in self.delta:
                return False
            q = self.delta[q, ch]
        return q in self.finals


def random_dfa(rng: random.Random, sigma: str, max_states: int = 3) -> Dfa:
    n = rng.randint(1, max_states)
    delta = {(q, ch): rng.randrange(n) for q in range(n) for ch in sigma if rng.random() < 0.85}
    finals = frozenset(q for q in range(n) if rng.random() < 0.5)
    return Dfa(n, 0, finals, delta)


def union_missing_word(dfas: Sequence[Dfa], sigma: str) -> str | None:
    """Shortest word outside every ``L(A_i)``, or ``None`` when the union is Σ*.

    Breadth-first search over tuples of DFA states (``None`` = rejected for good).
    """
    start = tuple(d.initial for d in dfas)
    seen = {start: ""}
    frontier = [start]
    while frontier:
        nxt = []
        for node in frontier:
            word = seen[node]
            if not any(q is not None and q in d.finals for q, d in zip(node, dfas)):
                return word
            for ch in sigma:
                succ = tuple(None if q is None else d.delta.get((q, ch)) for q, d in zip(node, dfas))
                if succ not in seen:
                    seen[succ] = word + ch
                    nxt.append(succ)
        frontier = nxt
    return None


def _add_dfa(b: Builder, dfa: Dfa, tag, entry, exit_label, exit_target) -> None:
    """Wire ``dfa`` between ``entry`` and ``exit_target``; each accepting state
    leaves through ``exit_label``."""
    b.add(entry, EPS, (tag, dfa.initial))
    for (q, ch), r in dfa.delta.items():
        b.add((tag, q), ch, (tag, r))
    for q in dfa.finals:
        b.add((tag, q), exit_label, exit_target)


def _chain(b: Builder, start, labels, tag):
    """Add a path reading ``labels`` from ``start``; return its last state."""
    q = start
    for i, label in enumerate(labels):
        b.add(q, label, (tag, i))
        q = (tag, i)
    return q


@dataclass
class Gadget:
    sigma: str
    pad: str | None
    a: VSetAutomaton
    a_prime: VSetAutomaton
    p: VSetAutomaton
    s: VSetAutomaton
    ps: VSetAutomaton
    universal: bool
    missing_word: str | None


def gen_union_universality(n: int, dfas: Sequence[Dfa], sigma: str = "ab") -> Gadget:
    """Reduction gadgets whose verdicts equal union universality of ``dfas``.

    Containment pair: A selects the whole document in x1..xn (nested);
    A' = Σ_i x_i{ x_1{..x_{i-1}{x_{i+1}{..x_n{L(A_i)}..}}} }, so A ⊆ A' iff
    the union of the L(A_i) is Σ*.

    Split-correctness triple over Σ plus a padding symbol c:
    P = c^n y{Σ*}, S = Σ_i c^{i-1} x{c^{n-i+1} L(A_i)}, P_S = c* y{Σ*}.
    """
    if n != len(dfas) or not 1 <= n <= 4:
        raise ValueError("need between one and four DFAs")
    sigma = check_alphabet(sigma)
    names = [f"x{i}" for i in range(1, n + 1)]
    opens = [op_open(v) for v in names]
    closes = [op_close(v) for v in reversed(names)]

    b = Builder()
    q = _chain(b, "start", opens, "open")
    for ch in sigma:
        b.add(q, ch, q)
    b.final(_chain(b, q, closes, "close"))
    a = b.finish(sigma, names, "start")

    b = Builder()
    for i, dfa in enumerate(dfas):
        order = [names[i]] + [v for v in names if v != names[i]]
        entry = _chain(b, "start", [op_open(v) for v in order], ("open", i))
        inner_closes = [op_close(v) for v in reversed(order)]
        _add_dfa(b, dfa, ("dfa", i), entry, inner_closes[0], ("closing", i, 0))
        last = ("closing", i, 0)
        for k, label in enumerate(inner_closes[1:], start=1):
            b.add(last, label, ("closing", i, k))
            last = ("closing", i, k)
        b.final(last)
    a_prime = b.finish(sigma, names, "start")

    pad = next(c for c in "cdefghijklmnopqrstuvwxyz" if c not in sigma)
    wide = sigma + pad
    b = Builder()
    q = _chain(b, "start", [pad] * n + [op_open("y")], "pad")
    for ch in sigma:
        b.add(q, ch, q)
    b.add(q, op_close("y"), "end")
    b.final("end")
    p = b.finish(wide, ["y"], "start")

    b = Builder()
    for i, dfa in enumerate(dfas):
        q = _chain(b, "start", [pad] * i + [op_open("x")] + [pad] * (n - i), ("s", i))
        _add_dfa(b, dfa, ("sdfa", i), q, op_close("x"), "end")
    b.final("end")
    s = b.finish(wide, ["x"], "start")

    b = Builder()
    b.add("start", pad, "start")
    b.add("start", op_open("y"), "in")
    for ch in sigma:
        b.add("in", ch, "in")
    b.add("in", op_close("y"), "end")
    b.final("end")
    ps = b.finish(wide, ["y"], "start")

    missing = union_missing_word(dfas, sigma)
    return Gadget(sigma, pad, a, a_prime, p, s, ps, missing is None, missing)


# --------------------------------------------------------------------------
# Engine/oracle agreement on random instances

def random_instance(seed: int, max_states: int = 6):
    """A seeded (sigma, P, P_S, S) quadruple for the agreement check."""
    rng = random.Random(seed)
    sigma = rng.choice(["ab", "ab", "abc"])
    names = ["y"] if rng.random() < 0.6 else ["y", "z"]
    p = random_spanner(rng, sigma, names, max_states)
    roll = rng.random()
    if roll < 0.3:
        s = separator_splitter(rng, sigma)
    else:
        s = random_splitter(rng, sigma, max_states)
    ps = p if rng.random() < 0.3 else random_spanner(rng, sigma, names, max_states)
    if rng.random() < 0.3:
        # split-correct by construction, so the "yes" paths get exercised too
        from .decisions import compose_construct
        from .vsa import trim
        p = trim(compose_construct(ps, s))
    return sigma, p, ps, s


def agreement_bound(sigma: str, names: Iterable[str]) -> int:
    """Document bound used for an instance: the full default bound except
    where brute-force enumeration would be too slow."""
    return DEFAULT_BOUND


def check_agreement(seed: int, max_states: int = 6) -> dict:
    """Compare every decision procedure with its bounded oracle on one instance.

    Returns ``{"seed", "bound", "discrepancies": [...], "verdicts": {...}}``.
    """
    from . import decisions as dec
    from .vsa import evaluate

    sigma, p, ps, s = random_instance(seed, max_states)
    bound = agreement_bound(sigma, p.vars)
    ev = Evaluator(bound)
    docs = list(documents(sigma, bound))
    problems: list[dict] = []
    verdicts: dict = {}

    def discrepancy(what, **info):
        problems.append({"check": what, **info})

    for name, a in (("P", p), ("S", s), ("P_S", ps)):
        for d in docs:
            if evaluate(a, d) != ev(a, d):
                discrepancy("evaluate", automaton=name, document=d)
                break

    composed = dec.compose_construct(ps, s)
    for d in docs:
        if evaluate(composed, d) != brute_compose(ps, s, d, ev):
            discrepancy("compose", document=d)
            break

    cover = dec.cover_condition_general(p, s)
    verdicts["cover"] = cover.answer
    oracle = bounded_cover(p, s, bound, ev, seed)
    if oracle.found and cover.yes:
        discrepancy("cover", oracle=oracle.counterexample)
    if cover.no and cover.witness is not None:
        w = cover.witness
        if w.tuple not in ev(p, w.document) or _uncovered({w.tuple}, ev(s, w.document)) is None:
            discrepancy("cover-witness", witness=w.to_json())

    disjoint = dec.splitter_disjoint(s)
    verdicts["disjoint"] = disjoint.answer
    oracle = bounded_disjoint(s, bound, ev, seed)
    if oracle.found and disjoint.yes:
        discrepancy("disjoint", oracle=oracle.counterexample)
    if disjoint.no:
        w = disjoint.witness
        spans = [tuple(x) for x in w.detail["spans"]]
        present = {_split_span(x) for x in ev(s, w.document)}
        if not (spans[0] != spans[1] and set(spans) <= present and spans_overlap(*spans)):
            discrepancy("disjoint-witness", witness=w.to_json())

    for label, spanner in (("split-correct", ps), ("self-split", p)):
        verdict = dec.split_correct(p, spanner, s)
        verdicts[label] = verdict.answer
        oracle = bounded_split_correct(p, spanner, s, bound, ev, seed)
        if oracle.found and verdict.yes:
            discrepancy(label, oracle=oracle.counterexample)
        if verdict.no and verdict.witness is not None:
            w = verdict.witness
            lhs = w.tuple in ev(p, w.document)
            rhs = w.tuple in brute_compose(spanner, s, w.document, ev)
            if lhs == rhs or (w.side == "lhs") != lhs:
                discrepancy(f"{label}-witness", witness=w.to_json())

    if disjoint.yes:
        verdict = dec.splittable(p, s)
        verdicts["splittable"] = verdict.answer
        refutation = bounded_splittable_refutation(p, s, bound, ev, seed)
        if refutation.found and verdict.yes:
            discrepancy("splittable", oracle=refutation.counterexample)
        if verdict.yes:
            check = bounded_split_correct(p, verdict.artifact, s, bound, ev, seed)
            if check.found:
                discrepancy("splittable-artifact", oracle=check.counterexample)
            condition = bounded_split_condition(p, s, bound, ev, seed)
            if condition.found:
                discrepancy("splittable-condition", oracle=condition.counterexample)
        elif verdict.witness is not None:
            w = verdict.witness
            if w.tuple not in ev(p, w.document):
                discrepancy("splittable-witness", witness=w.to_json())
    return {"seed": seed, "bound": bound, "sigma": sigma, "verdicts": verdicts,
            "discrepancies": problems}


def run_agreement(trials: int, seed: int = 0, jobs: int = 1) -> dict:
    """``check_agreement`` on seeds ``seed .. seed+trials-1``."""
    seeds = list(range(seed, seed + trials))
    if jobs > 1:
        from multiprocessing import Pool
        with Pool(jobs) as pool:
            results = pool.map(check_agreement, seeds)
    else:
        results = [check_agreement(x) for x in seeds]
    bad = [r for r in results if r["discrepancies"]]
    tally: dict = {}
    for r in results:
        for k, v in r["verdicts"].items():
            tally.setdefault(k, {}).setdefault(v, 0)
            tally[k][v] += 1
    return {
        "seed": seed,
        "trials": trials,
        "bound": DEFAULT_BOUND,
        "result": "discrepancies" if bad else NO_COUNTEREXAMPLE,
        "verdicts": tally,
        "discrepancies": bad,
    }
