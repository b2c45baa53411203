"""Decision procedures: containment, disjointness, the cover condition,
split-correctness, canonical split-spanners and (self-)splittability.

Every procedure returns a ``Verdict``. A "no" carries a witness that can be
replayed by evaluating both sides on ``witness.document``.
"""

from __future__ import annotations

import functools
import time
from collections import deque
from dataclasses import dataclass, field
from typing import Any

from . import nfa
from .config import DEFAULT_CONFIG, RunConfig
from .core import (
    DomainError,
    ResourceError,
    Span,
    SpanTuple,
    UnsupportedError,
    covers,
    is_op,
    op_close,
    op_open,
    substring,
    tuple_dict,
    tuple_of_refword,
    unshift_tuple,
)
from .vsa import (
    CLOSED,
    EPS,
    OPEN,
    WAITING,
    Builder,
    VSetAutomaton,
    apply_op,
    complement,
    eliminate_epsilon,
    evaluate,
    fresh_var,
    functionality_check,
    is_deterministic,
    is_dfvsa,
    normalize,
    rename_vars,
    state_configs,
    strip_annotations,
    trim,
    universal_spanner,
)

DEAD = -1


@dataclass
class Witness:
    document: str
    tuple: SpanTuple | None = None
    split: Span | None = None
    side: str | None = None
    detail: dict | None = None

    def to_json(self) -> dict:
        out = {
            "document": self.document,
            "tuple": tuple_dict(self.tuple) if self.tuple is not None else None,
            "split": list(self.split) if self.split is not None else None,
            "side": self.side,
        }
        if self.detail:
            out["detail"] = self.detail
        return out


@dataclass
class Verdict:
    answer: str  # "yes", "no" or "unknown"
    witness: Witness | None = None
    stats: dict = field(default_factory=dict)
    artifact: Any = None  # e.g. the split-spanner that witnesses splittability

    @property
    def yes(self) -> bool:
        return self.answer == "yes"

    @property
    def no(self) -> bool:
        return self.answer == "no"

    def to_json(self, timing: bool = True) -> dict:
        stats = dict(self.stats)
        stats.setdefault("product_states", 0)
        if not timing:
            stats["elapsed_ms"] = None
        return {
            "answer": self.answer,
            "witness": self.witness.to_json() if self.witness else None,
            "stats": stats,
        }


def _timed(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        start = time.perf_counter()
        verdict = fn(*args, **kwargs)
        verdict.stats["elapsed_ms"] = round((time.perf_counter() - start) * 1000, 3)
        return verdict
    return wrapper


# --------------------------------------------------------------------------
# Shared helpers

def _compatible(p: VSetAutomaton, q: VSetAutomaton) -> None:
    if set(p.vars) != set(q.vars):
        raise DomainError(f"variable sets differ: {list(p.vars)} vs {list(q.vars)}")
    if set(p.sigma) != set(q.sigma):
        raise DomainError(f"alphabets differ: {p.sigma!r} vs {q.sigma!r}")


def check_unary(s: VSetAutomaton) -> str:
    if len(s.vars) != 1:
        raise DomainError(f"a splitter needs exactly one variable, got {list(s.vars)}")
    return s.vars[0]


def separate_split_var(variables, s: VSetAutomaton) -> VSetAutomaton:
    """Rename the splitter's variable if it clashes with ``variables``."""
    x = check_unary(s)
    if x in variables:
        s = rename_vars(s, {x: fresh_var("x", set(variables) | {x})})
    return s


def as_dfvsa(a: VSetAutomaton, config: RunConfig = DEFAULT_CONFIG) -> VSetAutomaton:
    if a.annotations is not None:
        a = strip_annotations(a)
    return a if is_dfvsa(a) else normalize(a, config.state_cap)


def _decode(word, variables, split_var=None):
    """Document, tuple over ``variables`` and (optionally) split span of a ref-word."""
    core = [l for l in word if not (is_op(l) and l.var == split_var)]
    doc = "".join(l for l in word if not is_op(l))
    t = tuple_of_refword(core, variables)
    split = None
    if split_var is not None:
        split = dict(tuple_of_refword([l for l in word if not is_op(l) or l.var == split_var],
                                      [split_var]))[split_var]
    return doc, t, split


def _bfs_word(parent, node):
    word = []
    while parent[node] is not None:
        node, letter = parent[node]
        word.append(letter)
    word.reverse()
    return word


# --------------------------------------------------------------------------
# Containment and equivalence

def _dfa_difference(a: VSetAutomaton, b: VSetAutomaton, cap: int):
    """Shortest word accepted by deterministic ``a`` and rejected by deterministic ``b``."""
    start = (a.initial, b.initial)
    parent = {start: None}
    queue = deque([start])
    while queue:
        node = queue.popleft()
        p, q = node
        if p in a.finals and (q == DEAD or q not in b.finals):
            return _bfs_word(parent, node), len(parent)
        for label, targets in a.out(p).items():
            r = b.out(q).get(label, (DEAD,))[0] if q != DEAD else DEAD
            nxt = (targets[0], r)
            if nxt not in parent:
                parent[nxt] = (node, label)
                queue.append(nxt)
                if len(parent) > cap:
                    raise ResourceError(f"containment product exceeded {cap} states")
    return None, len(parent)


@_timed
def containment(p: VSetAutomaton, q: VSetAutomaton, config: RunConfig = DEFAULT_CONFIG) -> Verdict:
    """Is every tuple ``p`` selects on every document also selected by ``q``?"""
    _compatible(p, q)
    dp, dq = as_dfvsa(p, config), as_dfvsa(q, config)
    word, states = _dfa_difference(dp, dq, config.state_cap)
    stats = {"product_states": states}
    if word is None:
        return Verdict("yes", stats=stats)
    if len(word) > config.witness_cap:
        stats["witness_truncated"] = True
        return Verdict("no", None, stats)
    doc, t, _ = _decode(word, p.vars)
    return Verdict("no", Witness(doc, t, side="lhs"), stats)


@_timed
def equivalence(p: VSetAutomaton, q: VSetAutomaton, config: RunConfig = DEFAULT_CONFIG) -> Verdict:
    """Same tuples on every document. Witness side "lhs": tuple only in ``p``; "rhs": only in ``q``."""
    first = containment(p, q, config)
    if first.no:
        return first
    second = containment(q, p, config)
    stats = {"product_states": first.stats["product_states"] + second.stats["product_states"]}
    if second.no:
        if second.witness:
            second.witness.side = "rhs"
        second.stats["product_states"] = stats["product_states"]
        return second
    return Verdict("yes", stats=stats)


# --------------------------------------------------------------------------
# Pair simulation of a unary splitter against itself

def _pair_search(s: VSetAutomaton, mode: str, config: RunConfig):
    """Search two runs of ``s`` over one shared document.

    ``mode`` selects the accepted pairs: "overlap" (distinct overlapping spans),
    "touch" (distinct spans whose closed intervals meet) or "clash" (the same
    span reached with different annotation keys). Returns the move list of a
    shortest accepted pair, or ``None``, and the number of explored states.
    """
    a = eliminate_epsilon(s)
    keys = a.annotations or {}
    if mode != "clash":
        a = strip_annotations(a)
    start = (a.initial, a.initial, WAITING, WAITING, WAITING, WAITING, False, False)
    parent = {start: None}
    queue = deque([start])
    index = {a.vars[0]: 0}

    def contains(prev, cur):
        return cur >= OPEN and prev <= OPEN

    def accepted(node):
        q1, q2, c1, c2, p1, p2, flag, diff = node
        if q1 not in a.finals or q2 not in a.finals or c1 != CLOSED or c2 != CLOSED:
            return False
        if mode == "overlap":
            return flag and diff
        if mode == "touch":
            return diff and (flag or (contains(p1, c1) and contains(p2, c2)))
        return not diff and keys.get(q1) != keys.get(q2)

    while queue:
        node = queue.popleft()
        if accepted(node):
            return _bfs_word(parent, node), len(parent)
        q1, q2, c1, c2, p1, p2, flag, diff = node
        succ = []
        out1, out2 = a.out(q1), a.out(q2)
        for label, targets in out1.items():
            if is_op(label):
                c = apply_op((c1,), index, label)
                if c is not None:
                    succ += [((1, label), (r, q2, c[0], c2, p1, p2, flag, diff)) for r in targets]
            elif label in out2:
                if mode == "overlap":
                    hit = (p2 == WAITING and c2 >= OPEN and c1 == OPEN) or \
                          (p1 == WAITING and c1 >= OPEN and c2 == OPEN)
                else:
                    hit = contains(p1, c1) and contains(p2, c2)
                f2 = flag or hit
                d2 = diff or c1 != c2
                succ += [((0, label), (r, r2, c1, c2, c1, c2, f2, d2))
                         for r in targets for r2 in out2[label]]
        for label, targets in out2.items():
            if is_op(label):
                c = apply_op((c2,), index, label)
                if c is not None:
                    succ += [((2, label), (q1, r, c1, c[0], p1, p2, flag, diff)) for r in targets]
        for move, nxt in succ:
            if nxt not in parent:
                parent[nxt] = (node, move)
                queue.append(nxt)
                if len(parent) > config.state_cap:
                    raise ResourceError(f"pair simulation exceeded {config.state_cap} states")
    return None, len(parent)


def _pair_witness(moves, var: str) -> tuple[str, Span, Span]:
    doc = []
    spans = [[0, 0], [0, 0]]
    for run, label in moves:
        if run == 0:
            doc.append(label)
        else:
            spans[run - 1][1 if label.close else 0] = len(doc) + 1
    return "".join(doc), tuple(spans[0]), tuple(spans[1])


@_timed
def splitter_disjoint(s: VSetAutomaton, config: RunConfig = DEFAULT_CONFIG) -> Verdict:
    """No document gets two distinct overlapping splits."""
    x = check_unary(s)
    moves, states = _pair_search(s, "overlap", config)
    if moves is None:
        return Verdict("yes", stats={"product_states": states})
    doc, s1, s2 = _pair_witness(moves, x)
    first, second = sorted([s1, s2])
    w = Witness(doc, detail={"spans": [list(first), list(second)]})
    return Verdict("no", w, {"product_states": states})


@_timed
def splitter_strictly_separated(s: VSetAutomaton, config: RunConfig = DEFAULT_CONFIG) -> Verdict:
    """No document gets two distinct splits that overlap or share an endpoint.

    Stronger than disjointness: two splits [i,j⟩ and [j,k⟩ are disjoint but
    not separated, and an empty split may not sit on another split's boundary.
    """
    x = check_unary(s)
    moves, states = _pair_search(s, "touch", config)
    if moves is None:
        return Verdict("yes", stats={"product_states": states})
    doc, s1, s2 = _pair_witness(moves, x)
    first, second = sorted([s1, s2])
    return Verdict("no", Witness(doc, detail={"spans": [list(first), list(second)]}),
                   {"product_states": states})


def key_clash(s: VSetAutomaton, config: RunConfig = DEFAULT_CONFIG) -> Verdict:
    """Does some (document, span) receive two different annotation keys?"""
    x = check_unary(s)
    if s.annotations is None:
        return Verdict("no", stats={"product_states": 0})
    moves, states = _pair_search(s, "clash", config)
    if moves is None:
        return Verdict("no", stats={"product_states": states})
    doc, s1, _ = _pair_witness(moves, x)
    return Verdict("yes", Witness(doc, ((x, s1),)), {"product_states": states})


# --------------------------------------------------------------------------
# Composition

def compose_construct(ps: VSetAutomaton, s: VSetAutomaton) -> VSetAutomaton:
    """An automaton for ``ps ∘ s``.

    Three phases: run ``s`` before its split, run ``s`` and ``ps`` together
    inside the split, run ``s`` after it. Split operations become ε.
    """
    s = separate_split_var(ps.vars, strip_annotations(s))
    x = s.vars[0]
    ps = eliminate_epsilon(strip_annotations(ps))
    se = eliminate_epsilon(s)
    if ps.sigma != se.sigma and set(ps.sigma) != set(se.sigma):
        raise DomainError("composition needs equal alphabets")
    open_x, close_x = op_open(x), op_close(x)
    bld = Builder()
    start = ("pre", se.initial)
    bld.state(start)
    stack = [start]
    seen = {start}
    while stack:
        node = stack.pop()
        succ = []
        if node[0] == "pre":
            q = node[1]
            for label, targets in se.out(q).items():
                if label == open_x:
                    succ += [(EPS, ("in", r, ps.initial)) for r in targets]
                elif not is_op(label):
                    succ += [(label, ("pre", r)) for r in targets]
        elif node[0] == "in":
            _, q, p = node
            row = se.out(q)
            for label, targets in ps.out(p).items():
                if is_op(label):
                    succ += [(label, ("in", q, r)) for r in targets]
                else:
                    succ += [(label, ("in", q2, r)) for r in targets for q2 in row.get(label, ())]
            if p in ps.finals:
                succ += [(EPS, ("post", r)) for r in row.get(close_x, ())]
        else:
            q = node[1]
            if q in se.finals:
                bld.final(node)
            for label, targets in se.out(q).items():
                if not is_op(label):
                    succ += [(label, ("post", r)) for r in targets]
        for label, nxt in succ:
            bld.add(node, label, nxt)
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return trim(bld.finish(ps.sigma, ps.vars, start))


def _explain_split(ps, s, doc, t, side) -> Span | None:
    """A split of ``doc`` related to the witness tuple, for reporting only."""
    x = check_unary(s)
    splits = sorted(dict(u)[x] for u in evaluate(strip_annotations(s), doc))
    for split in splits:
        if not covers(split, t):
            continue
        if side == "lhs":
            return split
        if unshift_tuple(t, split) in evaluate(ps, substring(doc, split)):
            return split
    return None


# --------------------------------------------------------------------------
# Cover condition

@_timed
def cover_condition_general(p: VSetAutomaton, s: VSetAutomaton,
                            config: RunConfig = DEFAULT_CONFIG) -> Verdict:
    """Every tuple of ``p`` lies inside some split of ``s`` on the same document."""
    s = separate_split_var(p.vars, s)
    composed = compose_construct(universal_spanner(p.sigma, p.vars), s)
    verdict = containment(p, composed, config)
    verdict.stats["route"] = "general"
    return verdict


def _cover_automaton_p(p: VSetAutomaton) -> nfa.Nfa:
    """Ref-words of ``p`` tagged with 1 from the first to the last variable operation."""
    configs = state_configs(p)
    pre = {q for q, c in configs.items() if all(v == WAITING for v in c)}
    post = {q for q, c in configs.items() if all(v == CLOSED for v in c)}
    b = nfa.NfaBuilder()
    b.state((1, p.initial))
    for q, label, r in p.transitions:
        if q not in configs or r not in configs:
            continue
        if not is_op(label):
            b.add((1, q), (label, 0), (1, r))
            b.add((3, q), (label, 0), (3, r))
        elif q in pre and not label.close:
            b.add((1, q), (label, 1), (2, r))
        if r not in post:
            b.add((2, q), (label, 1), (2, r))
        elif is_op(label) and label.close:
            b.add((2, q), (label, 1), (3, r))
    for f in p.finals:
        b.final((3, f))
    return b.finish((1, p.initial))


def _cover_automaton_s(s: VSetAutomaton, variables) -> nfa.Nfa:
    """Tagged words whose 1-window lies inside a split of ``s``."""
    x = s.vars[0]
    ops = [op_open(v) for v in variables] + [op_close(v) for v in variables]
    b = nfa.NfaBuilder()
    b.state((1, s.initial))
    for q in range(s.states):
        for v in ops:
            if not v.close:
                b.add((2, q), (v, 1), (3, q))
            b.add((3, q), (v, 1), (3, q))
            if v.close:
                b.add((3, q), (v, 1), (4, q))
    for q, label, r in s.transitions:
        if label == op_open(x):
            b.add((1, q), nfa.EPS, (2, r))
        elif label == op_close(x):
            b.add((4, q), nfa.EPS, (5, r))
        elif not is_op(label):
            for phase in (1, 2, 4, 5):
                b.add((phase, q), (label, 0), (phase, r))
            b.add((3, q), (label, 1), (3, r))
    for f in s.finals:
        b.final((5, f))
    return b.finish((1, s.initial))


def _require_dfvsa(a: VSetAutomaton, name: str) -> VSetAutomaton:
    if not is_deterministic(a) or not functionality_check(a):
        raise DomainError(f"{name} is not a deterministic functional automaton (dfVSA)")
    return trim(strip_annotations(a))


def _require_disjoint(s: VSetAutomaton, config: RunConfig) -> None:
    verdict = splitter_disjoint(s, config)
    if verdict.no:
        raise DomainError(f"splitter is not disjoint (document {verdict.witness.document!r})")


@_timed
def cover_condition_ptime(p: VSetAutomaton, s: VSetAutomaton,
                          config: RunConfig = DEFAULT_CONFIG) -> Verdict:
    """Cover condition for dfVSA ``p`` and disjoint dfVSA ``s`` via unambiguous containment.

    When the tagged product turns out to be ambiguous (two splits can cover
    the same window, possible with empty spans on a shared boundary) or ``p``
    has no variables, the general procedure answers instead and
    ``stats["route"]`` records the fallback.
    """
    p = _require_dfvsa(p, "spanner")
    s = _require_dfvsa(separate_split_var(p.vars, s), "splitter")
    _require_disjoint(s, config)
    if not p.vars:
        return _fallback(cover_condition_general(p, s, config), "no-variables")
    ap, as_ = _cover_automaton_p(p), _cover_automaton_s(s, p.vars)
    try:
        ok, word, states = nfa.ufa_containment(ap, as_)
    except nfa.AmbiguityError:
        return _fallback(cover_condition_general(p, s, config), "ambiguous")
    stats = {"product_states": states, "route": "ptime"}
    if ok:
        return Verdict("yes", stats=stats)
    doc, t, _ = _decode([letter for letter, _ in word], p.vars)
    return Verdict("no", Witness(doc, t, side="lhs"), stats)


def _fallback(verdict: Verdict, reason: str) -> Verdict:
    verdict.stats["route"] = "fallback"
    verdict.stats["fallback_reason"] = reason
    return verdict


@_timed
def ufa_containment(a, b) -> Verdict:
    """L(a) ⊆ L(b) for unambiguous automata (``Nfa`` or variable automata as plain NFAs)."""
    a = a if isinstance(a, nfa.Nfa) else nfa.from_vsa(a)
    b = b if isinstance(b, nfa.Nfa) else nfa.from_vsa(b)
    ok, word, states = nfa.ufa_containment(a, b)
    stats = {"product_states": states}
    if ok:
        return Verdict("yes", stats=stats)
    letters = [str(l) for l in word]
    doc = "".join(l for l in word if isinstance(l, str))
    return Verdict("no", Witness(doc, detail={"word": letters}), stats)


# --------------------------------------------------------------------------
# Split-correctness

def _check_split_triple(p, ps, s):
    if set(p.vars) != set(ps.vars):
        raise DomainError(f"spanner and split-spanner variables differ: {list(p.vars)} vs {list(ps.vars)}")
    return separate_split_var(p.vars, s)


@_timed
def split_correct(p: VSetAutomaton, ps: VSetAutomaton, s: VSetAutomaton,
                  config: RunConfig = DEFAULT_CONFIG) -> Verdict:
    """Does ``p`` equal ``ps ∘ s``?"""
    s = _check_split_triple(p, ps, s)
    verdict = equivalence(p, compose_construct(ps, s), config)
    verdict.stats["route"] = "general"
    w = verdict.witness
    if w is not None and w.tuple is not None:
        w.split = _explain_split(ps, s, w.document, w.tuple, w.side)
    return verdict


@_timed
def split_correct_ptime(p: VSetAutomaton, ps: VSetAutomaton, s: VSetAutomaton,
                        config: RunConfig = DEFAULT_CONFIG) -> Verdict:
    """Split-correctness for dfVSA inputs and a disjoint dfVSA splitter.

    Checks the cover condition, then searches for a guessed ref-word with a
    split on which exactly one of ``p`` and ``ps`` accepts.
    """
    s = _check_split_triple(p, ps, s)
    p = _require_dfvsa(p, "spanner")
    ps = _require_dfvsa(ps, "split-spanner")
    s = _require_dfvsa(s, "splitter")
    _require_disjoint(s, config)
    cover = cover_condition_ptime(p, s, config)
    if cover.stats.get("route") == "fallback":
        return _fallback(split_correct(p, ps, s, config), cover.stats["fallback_reason"])
    if cover.no:
        cover.stats["route"] = "ptime"
        return cover
    x = s.vars[0]
    open_x, close_x = op_open(x), op_close(x)
    ops = sorted([op_open(v) for v in p.vars] + [op_close(v) for v in p.vars])

    def step(a, q, letter):
        return DEAD if q == DEAD else a.out(q).get(letter, (DEAD,))[0]

    start = (p.initial, s.initial, ps.initial, 0)
    parent = {start: None}
    queue = deque([start])
    found = None
    while queue:
        node = queue.popleft()
        qp, qs, qps, phase = node
        if phase == 2 and qs in s.finals and ((qp in p.finals) != (qps in ps.finals)):
            found = node
            break
        succ = []
        for letter in p.sigma:
            rs = step(s, qs, letter)
            if rs == DEAD:
                continue
            rps = step(ps, qps, letter) if phase == 1 else qps
            succ.append((letter, (step(p, qp, letter), rs, rps, phase)))
        if phase == 1:
            for op in ops:
                succ.append((op, (step(p, qp, op), qs, step(ps, qps, op), 1)))
        if phase == 0 and open_x in s.out(qs):
            succ.append((open_x, (qp, s.out(qs)[open_x][0], qps, 1)))
        if phase == 1 and close_x in s.out(qs):
            succ.append((close_x, (qp, s.out(qs)[close_x][0], qps, 2)))
        for letter, nxt in succ:
            if nxt[0] == DEAD and nxt[2] == DEAD:
                continue
            if nxt not in parent:
                parent[nxt] = (node, letter)
                queue.append(nxt)
                if len(parent) > config.state_cap:
                    raise ResourceError(f"split-correctness search exceeded {config.state_cap} states")
    stats = {"product_states": len(parent) + cover.stats.get("product_states", 0), "route": "ptime"}
    if found is None:
        return Verdict("yes", stats=stats)
    word = _bfs_word(parent, found)
    if len(word) > config.witness_cap:
        stats["witness_truncated"] = True
        return Verdict("no", None, stats)
    doc, t, split = _decode(word, p.vars, x)
    side = "lhs" if found[0] in p.finals else "rhs"
    return Verdict("no", Witness(doc, t, split, side), stats)


# --------------------------------------------------------------------------
# Canonical split-spanner and splittability

def canonical_split_spanner(p: VSetAutomaton, s: VSetAutomaton, *, skip_disjoint_gate: bool = False,
                            config: RunConfig = DEFAULT_CONFIG) -> VSetAutomaton:
    """The spanner selecting t on d iff some super-document d' has a split s
    with d'_s = d on which ``p`` selects t shifted by s."""
    s = separate_split_var(p.vars, strip_annotations(s))
    if not skip_disjoint_gate:
        _require_disjoint(s, config)
    x = s.vars[0]
    pe = eliminate_epsilon(strip_annotations(p))
    se = eliminate_epsilon(s)
    open_x, close_x = op_open(x), op_close(x)

    def sigma_pairs(node):
        qs, qp = node
        row = pe.out(qp)
        for label, targets in se.out(qs).items():
            if not is_op(label):
                for rs in targets:
                    for rp in row.get(label, ()):
                        yield label, (rs, rp)

    # pairs reachable on d_pre, then the split opening
    outside = {(se.initial, pe.initial)}
    stack = list(outside)
    while stack:
        node = stack.pop()
        for _, nxt in sigma_pairs(node):
            if nxt not in outside:
                outside.add(nxt)
                stack.append(nxt)
    starts = {(rs, qp) for qs, qp in outside for rs in se.out(qs).get(open_x, ())}

    # pairs after the split closing from which d_post reaches both finals
    back: dict = {}
    universe = {(qs, qp) for qs in range(se.states) for qp in range(pe.states)}
    for node in universe:
        for _, nxt in sigma_pairs(node):
            back.setdefault(nxt, set()).add(node)
    good = {(qs, qp) for qs, qp in universe if qs in se.finals and qp in pe.finals}
    stack = list(good)
    while stack:
        node = stack.pop()
        for prev in back.get(node, ()):
            if prev not in good:
                good.add(prev)
                stack.append(prev)

    bld = Builder()
    bld.state("init")
    stack = []
    seen = set()
    for node in sorted(starts):
        bld.add("init", EPS, node)
        seen.add(node)
        stack.append(node)
    while stack:
        node = stack.pop()
        qs, qp = node
        if any((rs, qp) in good for rs in se.out(qs).get(close_x, ())):
            bld.final(node)
        succ = list(sigma_pairs(node))
        for label, targets in pe.out(qp).items():
            if is_op(label):
                succ += [(label, (qs, rp)) for rp in targets]
        for label, nxt in succ:
            bld.add(node, label, nxt)
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
                if len(seen) > config.state_cap:
                    raise ResourceError(f"canonical split-spanner exceeded {config.state_cap} states")
    return trim(bld.finish(p.sigma, p.vars, "init"))


def universal_split_spanner(p: VSetAutomaton, s: VSetAutomaton,
                            config: RunConfig = DEFAULT_CONFIG) -> VSetAutomaton:
    """The largest split-spanner: t on d iff for every super-document d' with a
    split s, d'_s = d, ``p`` selects t shifted by s."""
    bad = canonical_split_spanner(complement(p, config.state_cap), s,
                                  skip_disjoint_gate=True, config=config)
    return complement(bad, config.state_cap)


@_timed
def splittable(p: VSetAutomaton, s: VSetAutomaton, config: RunConfig = DEFAULT_CONFIG) -> Verdict:
    """Is there any split-spanner ``ps`` with ``p = ps ∘ s``? Needs a disjoint ``s``.

    The canonical split-spanner is tried first. When it fails, the largest
    split-spanner is tried, which settles the question in every case; the
    artifact of a "yes" is the witness that worked.
    """
    s = separate_split_var(p.vars, s)
    verdict = splitter_disjoint(s, config)
    if verdict.no:
        raise UnsupportedError("splittability is only decided for disjoint splitters; "
                               "for overlapping splitters it is an open problem")
    can = canonical_split_spanner(p, s, skip_disjoint_gate=True, config=config)
    first = split_correct(p, can, s, config)
    if first.yes:
        first.artifact = can
        first.stats["witness_spanner"] = "canonical"
        return first
    univ = universal_split_spanner(p, s, config)
    second = split_correct(p, univ, s, config)
    second.stats["product_states"] += first.stats["product_states"]
    if second.yes:
        second.artifact = univ
        second.stats["witness_spanner"] = "universal"
        return second
    # the largest split-spanner misses a tuple of p, so no split-spanner can produce it
    second.stats["witness_spanner"] = "universal"
    return second


@_timed
def self_splittable(p: VSetAutomaton, s: VSetAutomaton, config: RunConfig = DEFAULT_CONFIG,
                    ptime: bool = False) -> Verdict:
    """Does ``p`` equal ``p ∘ s``? ``ptime`` requests the certified polynomial route."""
    if ptime:
        return split_correct_ptime(p, p, s, config)
    return split_correct(p, p, s, config)
