"""Filtered splitters, black-box split constraints and annotated splitters."""

from __future__ import annotations

import re
from collections import deque
from typing import Iterable, Mapping

from .config import DEFAULT_CONFIG, RunConfig
from .core import DomainError, ResourceError, UnsupportedError, check_var, op_close, op_open
from .decisions import (
    DEAD,
    Verdict,
    Witness,
    _bfs_word,
    _decode,
    _fallback,
    _require_dfvsa,
    _timed,
    canonical_split_spanner,
    check_unary,
    compose_construct,
    cover_condition_ptime,
    equivalence,
    key_clash,
    self_splittable,
    separate_split_var,
    split_correct,
    splittable,
    splitter_disjoint,
    splitter_strictly_separated,
    universal_split_spanner,
)
from .vsa import (
    VSetAutomaton,
    annotated_evaluate as _annotated_evaluate,
    empty_automaton,
    functionality_check,
    join,
    normalize,
    projection,
    rename_vars,
    restrict_to_key,
    strip_annotations,
    union,
)


# --------------------------------------------------------------------------
# Regular filters

def lp_language(p: VSetAutomaton) -> VSetAutomaton:
    """Variable-free automaton for the documents on which ``p`` selects something."""
    return projection(strip_annotations(p), ())


def filter_splitter(s: VSetAutomaton, p: VSetAutomaton) -> VSetAutomaton:
    """``s`` restricted to the documents where ``p`` is non-empty."""
    check_unary(s)
    if not functionality_check(p):
        p = normalize(p)
    return join(strip_annotations(s), lp_language(p))


@_timed
def split_correct_with_filter(p: VSetAutomaton, ps: VSetAutomaton, s: VSetAutomaton,
                              config: RunConfig = DEFAULT_CONFIG) -> Verdict:
    """Is there a regular filter L with ``p = ps ∘ s[L]``? On "yes" the artifact is L_P."""
    s = separate_split_var(p.vars, s)
    verdict = split_correct(p, ps, filter_splitter(s, p), config)
    if verdict.yes:
        verdict.artifact = lp_language(p)
    return verdict


@_timed
def splittable_with_filter(p: VSetAutomaton, s: VSetAutomaton,
                           config: RunConfig = DEFAULT_CONFIG) -> Verdict:
    s = separate_split_var(p.vars, s)
    return splittable(p, filter_splitter(s, p), config)


@_timed
def self_splittable_with_filter(p: VSetAutomaton, s: VSetAutomaton,
                                config: RunConfig = DEFAULT_CONFIG) -> Verdict:
    s = separate_split_var(p.vars, s)
    return self_splittable(p, filter_splitter(s, p), config)


# --------------------------------------------------------------------------
# Black boxes with split constraints

_SIG_LINE = re.compile(r"\s*([A-Za-z][A-Za-z0-9_]*)\s*[:(]\s*([^)]*)\)?\s*\Z")
_CONSTRAINT_LINE = re.compile(r"\s*([A-Za-z][A-Za-z0-9_]*)\s+subsetof\s+(\S+)\s*\Z")


def _content_lines(text: str):
    for number, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if line:
            yield number, line


def parse_signature(text: str) -> dict[str, frozenset[str]]:
    """Lines ``name: x, y`` (or ``name(x, y)``) give each symbol its variables."""
    signature: dict[str, frozenset[str]] = {}
    for number, line in _content_lines(text):
        m = _SIG_LINE.match(line)
        if not m:
            raise DomainError(f"signature line {number}: expected 'name: var, var'")
        name = m.group(1)
        if name in signature:
            raise DomainError(f"signature line {number}: symbol {name!r} declared twice")
        signature[name] = frozenset(check_var(v) for v in re.split(r"[,\s]+", m.group(2)) if v)
    return signature


def parse_constraints(text: str) -> list[tuple[str, str]]:
    """Lines ``pi subsetof <splitter-file>``; returns (symbol, file) pairs."""
    out = []
    for number, line in _content_lines(text):
        m = _CONSTRAINT_LINE.match(line)
        if not m:
            raise DomainError(f"constraint line {number}: expected 'symbol subsetof file'")
        out.append((m.group(1), m.group(2)))
    return out


def _components(edges: list[frozenset[str]]) -> int:
    """Connected components of a hypergraph; an edge without variables is its own component."""
    parent = list(range(len(edges)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(len(edges)):
        for j in range(i + 1, len(edges)):
            if edges[i] & edges[j]:
                parent[find(i)] = find(j)
    return len({find(i) for i in range(len(edges))})


@_timed
def blackbox_infer(signature: Mapping[str, Iterable[str]],
                   constraints: Mapping[str, Iterable[VSetAutomaton]],
                   alpha: VSetAutomaton, s: VSetAutomaton,
                   config: RunConfig = DEFAULT_CONFIG) -> Verdict:
    """"yes" when the sufficient condition for black-box split-correctness holds,
    "unknown" otherwise; never "no".

    The condition: every symbol is constrained by a splitter equivalent to
    ``s``, ``alpha`` is splittable by ``s``, ``s`` is disjoint and, so that
    every joined tuple has exactly one covering split, ``s`` never lets two
    splits share an endpoint and ``alpha`` shares variables with the symbols.
    """
    signature = {name: frozenset(vs) for name, vs in signature.items()}
    edges = list(signature.values())
    if edges and _components(edges) > 1:
        raise DomainError("the signature is not connected")
    x = check_unary(s)
    reasons = []
    states = 0
    for name in sorted(signature):
        matched = False
        for c in constraints.get(name, ()):
            check_unary(c)
            v = equivalence(strip_annotations(s), rename_vars(strip_annotations(c), {c.vars[0]: x}),
                            config)
            states += v.stats["product_states"]
            if v.yes:
                matched = True
                break
        if not matched:
            reasons.append(f"no constraint {name} ⊑ S")
    unknown_syms = sorted(set(constraints) - set(signature))
    if unknown_syms:
        raise DomainError(f"constraints mention undeclared symbols {unknown_syms}")
    if edges and _components(edges + [frozenset(alpha.vars)]) > 1:
        reasons.append("alpha shares no variables with the signature")
    disjoint = splitter_disjoint(s, config)
    states += disjoint.stats["product_states"]
    if disjoint.no:
        reasons.append("splitter is not disjoint")
    else:
        separated = splitter_strictly_separated(s, config)
        states += separated.stats["product_states"]
        if separated.no:
            reasons.append("splitter has distinct splits sharing an endpoint")
        if not reasons:
            alpha_split = splittable(alpha, s, config)
            states += alpha_split.stats["product_states"]
            if alpha_split.no:
                reasons.append("alpha is not splittable by S")
    stats = {"product_states": states}
    if reasons:
        stats["reasons"] = reasons
        return Verdict("unknown", stats=stats)
    return Verdict("yes", stats=stats)


# --------------------------------------------------------------------------
# Annotated splitters

def annotated_evaluate(a: VSetAutomaton, doc: str,
                       config: RunConfig = DEFAULT_CONFIG) -> frozenset:
    """(key, tuple) pairs; the key is ``None`` for unannotated automata."""
    return _annotated_evaluate(a, doc, config.result_cap)


def _keys(s: VSetAutomaton) -> tuple[str, ...]:
    if s.annotations is None:
        raise DomainError("splitter carries no annotations")
    return s.keys


@_timed
def is_highlander(s: VSetAutomaton, config: RunConfig = DEFAULT_CONFIG) -> Verdict:
    """Disjoint once keys are erased, and at most one key per (document, span)."""
    check_unary(s)
    _keys(s)
    disjoint = splitter_disjoint(strip_annotations(s), config)
    if disjoint.no:
        disjoint.stats["reason"] = "not disjoint"
        return disjoint
    clash = key_clash(s, config)
    stats = {"product_states": disjoint.stats["product_states"] + clash.stats["product_states"]}
    if clash.yes:
        stats["reason"] = "span with two keys"
        return Verdict("no", clash.witness, stats)
    return Verdict("yes", stats=stats)


def _check_mapping(p: VSetAutomaton, mapping: Mapping[str, VSetAutomaton], keys) -> None:
    missing = [k for k in keys if k not in mapping]
    if missing:
        raise DomainError(f"key-spanner mapping lacks keys {missing}")
    for k in keys:
        if set(mapping[k].vars) != set(p.vars):
            raise DomainError(f"spanner for key {k!r} has variables {list(mapping[k].vars)}, "
                              f"expected {list(p.vars)}")


def compose_annotated(mapping: Mapping[str, VSetAutomaton], s: VSetAutomaton,
                      variables: Iterable[str] | None = None) -> VSetAutomaton:
    """``mapping ∘ s``: each split is processed by the spanner of its key.

    A splitter without keys selects nothing, so the result is the empty
    spanner over ``variables`` (or over the variables of the mapping).
    """
    keys = _keys(s)
    if not keys:
        if variables is None:
            variables = next(iter(mapping.values())).vars if mapping else ()
        return empty_automaton(s.sigma, variables)
    parts = [compose_construct(mapping[k], restrict_to_key(s, k)) for k in keys]
    return parts[0] if len(parts) == 1 else union(*parts)


@_timed
def annotated_split_correct(p: VSetAutomaton, mapping: Mapping[str, VSetAutomaton],
                            s: VSetAutomaton, config: RunConfig = DEFAULT_CONFIG) -> Verdict:
    """Does ``p`` equal ``mapping ∘ s``?"""
    s = separate_split_var(p.vars, s)
    keys = _keys(s)
    _check_mapping(p, mapping, keys)
    verdict = equivalence(p, compose_annotated(mapping, s, p.vars), config)
    verdict.stats["route"] = "general"
    return verdict


@_timed
def annotated_split_correct_ptime(p: VSetAutomaton, mapping: Mapping[str, VSetAutomaton],
                                  s: VSetAutomaton, config: RunConfig = DEFAULT_CONFIG) -> Verdict:
    """Polynomial route for dfVSA inputs and a highlander splitter.

    Cover check against the key-erased splitter, then a search over
    (key, state of p, state of s, state of mapping[key], phase) for a
    ref-word on which exactly one of ``p`` and ``mapping[key]`` accepts.
    """
    s = separate_split_var(p.vars, s)
    keys = _keys(s)
    _check_mapping(p, mapping, keys)
    p = _require_dfvsa(p, "spanner")
    machines = {k: _require_dfvsa(mapping[k], f"spanner for key {k!r}") for k in keys}
    plain = _require_dfvsa(strip_annotations(s), "splitter")
    high = is_highlander(s, config)
    if high.no:
        raise DomainError("splitter is not a highlander splitter")
    cover = cover_condition_ptime(p, plain, config)
    if cover.stats.get("route") == "fallback":
        return _fallback(annotated_split_correct(p, mapping, s, config),
                         cover.stats["fallback_reason"])
    if cover.no:
        cover.stats["route"] = "ptime"
        return cover
    x = s.vars[0]
    open_x, close_x = op_open(x), op_close(x)
    ops = sorted([op_open(v) for v in p.vars] + [op_close(v) for v in p.vars])

    def step(a, q, letter):
        return DEAD if q == DEAD else a.out(q).get(letter, (DEAD,))[0]

    parent: dict = {}
    queue = deque()
    for k in keys:
        start = (k, p.initial, s.initial, machines[k].initial, 0)
        parent[start] = None
        queue.append(start)
    found = None
    while queue:
        node = queue.popleft()
        k, qp, qs, qm, phase = node
        m = machines[k]
        if (phase == 2 and qs in s.finals and s.annotations[qs] == k
                and (qp in p.finals) != (qm in m.finals)):
            found = node
            break
        succ = []
        for letter in p.sigma:
            rs = step(s, qs, letter)
            if rs != DEAD:
                rm = step(m, qm, letter) if phase == 1 else qm
                succ.append((letter, (k, step(p, qp, letter), rs, rm, phase)))
        if phase == 1:
            for op in ops:
                succ.append((op, (k, step(p, qp, op), qs, step(m, qm, op), 1)))
        if phase == 0 and open_x in s.out(qs):
            succ.append((open_x, (k, qp, s.out(qs)[open_x][0], qm, 1)))
        if phase == 1 and close_x in s.out(qs):
            succ.append((close_x, (k, qp, s.out(qs)[close_x][0], qm, 2)))
        for letter, nxt in succ:
            if nxt[1] == DEAD and nxt[3] == DEAD:
                continue
            if nxt not in parent:
                parent[nxt] = (node, letter)
                queue.append(nxt)
                if len(parent) > config.state_cap:
                    raise ResourceError(f"annotated search exceeded {config.state_cap} states")
    stats = {"product_states": len(parent) + cover.stats.get("product_states", 0), "route": "ptime"}
    if found is None:
        return Verdict("yes", stats=stats)
    word = _bfs_word(parent, found)
    if len(word) > config.witness_cap:
        stats["witness_truncated"] = True
        return Verdict("no", None, stats)
    doc, t, split = _decode(word, p.vars, x)
    side = "lhs" if found[1] in p.finals else "rhs"
    return Verdict("no", Witness(doc, t, split, side, {"key": found[0]}), stats)


@_timed
def annotated_splittable(p: VSetAutomaton, s: VSetAutomaton,
                         config: RunConfig = DEFAULT_CONFIG) -> Verdict:
    """Is there a key-spanner mapping M with ``p = M ∘ s``? Needs a highlander ``s``.

    The canonical mapping (one canonical split-spanner per key) is tried first,
    then the largest mapping; the artifact of a "yes" is the mapping that worked.
    """
    s = separate_split_var(p.vars, s)
    keys = _keys(s)
    high = is_highlander(s, config)
    if high.no:
        raise UnsupportedError("annotated splittability is only decided for highlander splitters")
    canonical = {k: canonical_split_spanner(p, restrict_to_key(s, k), skip_disjoint_gate=True,
                                            config=config) for k in keys}
    first = annotated_split_correct(p, canonical, s, config)
    if first.yes:
        first.artifact = canonical
        first.stats["witness_spanner"] = "canonical"
        return first
    largest = {k: universal_split_spanner(p, restrict_to_key(s, k), config) for k in keys}
    second = annotated_split_correct(p, largest, s, config)
    second.stats["product_states"] += first.stats["product_states"]
    second.stats["witness_spanner"] = "universal"
    if second.yes:
        second.artifact = largest
    return second
