"""Variable-set automata: representation, classification, normalization,
evaluation and the spanner algebra."""

from __future__ import annotations

import json
from collections import defaultdict, deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Hashable, Iterable, Mapping

from .core import (
    DomainError,
    ResourceError,
    SpanTuple,
    VarOp,
    check_alphabet,
    check_var,
    is_op,
    op_close,
    op_open,
)

EPS = None
DEFAULT_STATE_CAP = 100_000
DEFAULT_RESULT_CAP = 1_000_000

WAITING, OPEN, CLOSED = 0, 1, 2


def label_key(label) -> tuple:
    if label is None:
        return (0,)
    if is_op(label):
        return (2, label.var, label.close)
    return (1, label)


@dataclass(frozen=True, eq=False)
class VSetAutomaton:
    """An ε-NFA over Σ ∪ Γ_V with dense integer states ``0..states-1``.

    Labels are single-character strings for symbols, ``VarOp`` for variable
    operations and ``None`` for ε.
    """

    sigma: str
    vars: tuple[str, ...]
    states: int
    initial: int
    finals: frozenset[int]
    transitions: tuple[tuple[int, object, int], ...]
    annotations: Mapping[int, str] | None = field(default=None)

    @classmethod
    def build(cls, sigma, variables, states, initial, finals, transitions, annotations=None):
        sigma = check_alphabet(sigma)
        variables = tuple(sorted({check_var(v) for v in variables}))
        finals = frozenset(finals)
        trans = sorted(set(transitions), key=lambda t: (t[0], label_key(t[1]), t[2]))
        for q in [initial, *finals]:
            if not 0 <= q < states:
                raise DomainError(f"state {q} out of range 0..{states - 1}")
        for src, label, dst in trans:
            if not (0 <= src < states and 0 <= dst < states):
                raise DomainError(f"transition {src}->{dst} leaves the state range")
            if is_op(label):
                if label.var not in variables:
                    raise DomainError(f"transition uses undeclared variable {label.var!r}")
            elif label is not None and label not in sigma:
                raise DomainError(f"transition symbol {label!r} not in alphabet")
        if annotations is not None:
            annotations = {int(q): str(k) for q, k in annotations.items()}
            if set(annotations) != set(finals):
                raise DomainError("annotations must be defined on exactly the final states")
        return cls(sigma, variables, states, initial, finals, tuple(trans), annotations)

    @cached_property
    def delta(self) -> dict[int, dict[object, tuple[int, ...]]]:
        table: dict[int, dict[object, list[int]]] = defaultdict(lambda: defaultdict(list))
        for src, label, dst in self.transitions:
            table[src][label].append(dst)
        return {q: {lab: tuple(d) for lab, d in row.items()} for q, row in table.items()}

    def out(self, q: int) -> dict[object, tuple[int, ...]]:
        return self.delta.get(q, {})

    @property
    def keys(self) -> tuple[str, ...]:
        return tuple(sorted(set(self.annotations.values()))) if self.annotations else ()

    def __repr__(self) -> str:
        return (f"VSetAutomaton(sigma={self.sigma!r}, vars={self.vars}, states={self.states}, "
                f"finals={sorted(self.finals)}, transitions={len(self.transitions)})")


class Builder:
    """Accumulates states keyed by arbitrary hashables into a dense automaton."""

    def __init__(self):
        self.index: dict[Hashable, int] = {}
        self.transitions: set[tuple[int, object, int]] = set()
        self.finals: set[int] = set()
        self.annotations: dict[int, str] = {}

    def state(self, key: Hashable) -> int:
        if key not in self.index:
            self.index[key] = len(self.index)
        return self.index[key]

    def add(self, src: Hashable, label, dst: Hashable) -> None:
        self.transitions.add((self.state(src), label, self.state(dst)))

    def final(self, key: Hashable, annotation: str | None = None) -> None:
        q = self.state(key)
        self.finals.add(q)
        if annotation is not None:
            self.annotations[q] = annotation

    def finish(self, sigma, variables, initial_key, annotated=False) -> VSetAutomaton:
        init = self.state(initial_key)
        return VSetAutomaton.build(sigma, variables, len(self.index), init, self.finals,
                                   self.transitions, self.annotations if annotated else None)


def empty_automaton(sigma: str, variables=()) -> VSetAutomaton:
    return VSetAutomaton.build(sigma, variables, 1, 0, (), ())


def universal_spanner(sigma: str, variables) -> VSetAutomaton:
    """One state with self-loops on every symbol and variable operation."""
    loops = [(0, a, 0) for a in sigma]
    for v in variables:
        loops += [(0, op_open(v), 0), (0, op_close(v), 0)]
    return VSetAutomaton.build(sigma, variables, 1, 0, {0}, loops)


def sigma_star(sigma: str) -> VSetAutomaton:
    return universal_spanner(sigma, ())


def word_automaton(sigma: str, word: str) -> VSetAutomaton:
    trans = [(i, ch, i + 1) for i, ch in enumerate(word)]
    return VSetAutomaton.build(sigma, (), len(word) + 1, 0, {len(word)}, trans)


# --------------------------------------------------------------------------
# JSON serialization

def label_to_json(label) -> dict:
    if label is None:
        return {"eps": True}
    if is_op(label):
        return {"close": label.var} if label.close else {"open": label.var}
    return {"sym": label}


def label_from_json(obj: Mapping):
    if obj.get("eps"):
        return None
    if "sym" in obj:
        return obj["sym"]
    if "open" in obj:
        return op_open(obj["open"])
    if "close" in obj:
        return op_close(obj["close"])
    raise DomainError(f"unrecognized transition label {obj!r}")


def to_json(a: VSetAutomaton) -> dict:
    out = {
        "sigma": a.sigma,
        "vars": list(a.vars),
        "states": a.states,
        "initial": a.initial,
        "finals": sorted(a.finals),
        "transitions": [{"from": s, "label": label_to_json(l), "to": d} for s, l, d in a.transitions],
    }
    if a.annotations is not None:
        out["annotations"] = {str(q): k for q, k in sorted(a.annotations.items())}
    return out


def from_json(obj: Mapping | str) -> VSetAutomaton:
    if isinstance(obj, str):
        obj = json.loads(obj)
    try:
        trans = [(int(t["from"]), label_from_json(t["label"]), int(t["to"])) for t in obj["transitions"]]
        ann = obj.get("annotations")
        if ann is not None:
            ann = {int(q): k for q, k in ann.items()}
        return VSetAutomaton.build(obj["sigma"], obj.get("vars", []), int(obj["states"]),
                                   int(obj["initial"]), obj["finals"], trans, ann)
    except (KeyError, TypeError, ValueError) as exc:
        raise DomainError(f"malformed automaton JSON: {exc}") from exc


# --------------------------------------------------------------------------
# Structural helpers

def reachable(a: VSetAutomaton) -> set[int]:
    seen = {a.initial}
    stack = [a.initial]
    while stack:
        q = stack.pop()
        for targets in a.out(q).values():
            for r in targets:
                if r not in seen:
                    seen.add(r)
                    stack.append(r)
    return seen


def coreachable(a: VSetAutomaton) -> set[int]:
    back: dict[int, list[int]] = defaultdict(list)
    for src, _, dst in a.transitions:
        back[dst].append(src)
    seen = set(a.finals)
    stack = list(a.finals)
    while stack:
        q = stack.pop()
        for p in back[q]:
            if p not in seen:
                seen.add(p)
                stack.append(p)
    return seen


def trim(a: VSetAutomaton) -> VSetAutomaton:
    """Keep only states that are reachable and co-reachable (plus the initial)."""
    useful = reachable(a) & coreachable(a)
    keep = sorted(useful | {a.initial})
    rename = {q: i for i, q in enumerate(keep)}
    trans = [(rename[s], l, rename[d]) for s, l, d in a.transitions if s in useful and d in useful]
    finals = {rename[q] for q in a.finals if q in useful}
    ann = {rename[q]: a.annotations[q] for q in a.finals if q in useful} if a.annotations else None
    return VSetAutomaton.build(a.sigma, a.vars, len(keep), rename[a.initial], finals, trans, ann)


def rename_vars(a: VSetAutomaton, renaming: Mapping[str, str]) -> VSetAutomaton:
    def mapping(label):
        if is_op(label) and label.var in renaming:
            return VarOp(renaming[label.var], label.close)
        return label
    variables = {renaming.get(v, v) for v in a.vars}
    trans = [(s, mapping(l), d) for s, l, d in a.transitions]
    return VSetAutomaton.build(a.sigma, variables, a.states, a.initial, a.finals, trans, a.annotations)


def with_finals(a: VSetAutomaton, finals: Iterable[int], annotations=None) -> VSetAutomaton:
    return VSetAutomaton.build(a.sigma, a.vars, a.states, a.initial, finals, a.transitions, annotations)


def strip_annotations(a: VSetAutomaton) -> VSetAutomaton:
    return VSetAutomaton.build(a.sigma, a.vars, a.states, a.initial, a.finals, a.transitions)


def restrict_to_key(a: VSetAutomaton, key: str) -> VSetAutomaton:
    """The plain automaton whose finals are the states annotated with ``key``."""
    finals = {q for q in a.finals if a.annotations and a.annotations.get(q) == key}
    return with_finals(a, finals)


def fresh_var(base: str, taken: Iterable[str]) -> str:
    taken = set(taken)
    name, k = base, 0
    while name in taken:
        k += 1
        name = f"{base}{k}"
    return name


def epsilon_closure(a: VSetAutomaton, states: Iterable[int]) -> frozenset[int]:
    seen = set(states)
    stack = list(seen)
    while stack:
        q = stack.pop()
        for r in a.out(q).get(EPS, ()):
            if r not in seen:
                seen.add(r)
                stack.append(r)
    return frozenset(seen)


def eliminate_epsilon(a: VSetAutomaton) -> VSetAutomaton:
    """Standard ε-closure removal; keeps the state set and the ref-language."""
    if not any(l is None for _, l, _ in a.transitions):
        return a
    if a.annotations is not None:
        return _eliminate_epsilon_keyed(a)
    trans = set()
    finals = set()
    for q in range(a.states):
        closure = epsilon_closure(a, [q])
        for p in closure:
            if p in a.finals:
                finals.add(q)
            for label, targets in a.out(p).items():
                if label is None:
                    continue
                for r in targets:
                    trans.add((q, label, r))
    return trim(VSetAutomaton.build(a.sigma, a.vars, a.states, a.initial, finals, trans))


def _eliminate_epsilon_keyed(a: VSetAutomaton) -> VSetAutomaton:
    """ε-removal that keeps every final state (and so its key) intact.

    Each edge is redirected into the ε-closure of its target; a fresh initial
    state takes over the edges leaving the initial closure.
    """
    init = a.states
    trans = set()
    for p in range(a.states + 1):
        sources = epsilon_closure(a, [a.initial]) if p == init else [p]
        for src in sources:
            for label, targets in a.out(src).items():
                if label is None:
                    continue
                for r in epsilon_closure(a, targets):
                    trans.add((p, label, r))
    finals = set(a.finals)
    ann = dict(a.annotations)
    keys = {a.annotations[q] for q in epsilon_closure(a, [a.initial]) if q in a.finals}
    if len(keys) > 1:
        raise DomainError("the empty ref-word is accepted with several keys")
    if keys:
        finals.add(init)
        ann[init] = keys.pop()
    return trim(VSetAutomaton.build(a.sigma, a.vars, a.states + 1, init, finals, trans, ann))


def is_epsilon_free(a: VSetAutomaton) -> bool:
    return all(l is not None for _, l, _ in a.transitions)


# --------------------------------------------------------------------------
# Variable configurations

def apply_op(config: tuple[int, ...], index: Mapping[str, int], op: VarOp):
    """Advance a per-variable status vector, or ``None`` if the op is invalid."""
    i = index[op.var]
    status = config[i]
    if not op.close and status == WAITING:
        return config[:i] + (OPEN,) + config[i + 1:]
    if op.close and status == OPEN:
        return config[:i] + (CLOSED,) + config[i + 1:]
    return None


def _config_graph(a: VSetAutomaton):
    """Reachable (state, config) pairs and their edges, following valid ops only."""
    index = {v: i for i, v in enumerate(a.vars)}
    start = (a.initial, (WAITING,) * len(a.vars))
    edges: dict[tuple, list[tuple]] = defaultdict(list)
    seen = {start}
    stack = [start]
    while stack:
        q, c = stack.pop()
        for label, targets in a.out(q).items():
            if is_op(label):
                c2 = apply_op(c, index, label)
                if c2 is None:
                    edges[(q, c)].append(None)
                    continue
            else:
                c2 = c
            for r in targets:
                node = (r, c2)
                edges[(q, c)].append(node)
                if node not in seen:
                    seen.add(node)
                    stack.append(node)
    return start, seen, edges


def functionality_check(a: VSetAutomaton) -> bool:
    """True iff every accepting path of the trimmed automaton is valid."""
    t = trim(a)
    full = (CLOSED,) * len(t.vars)
    index = {v: i for i, v in enumerate(t.vars)}
    useful = coreachable(t)
    start = (t.initial, (WAITING,) * len(t.vars))
    if t.initial not in useful:
        return True
    seen = {start}
    stack = [start]
    while stack:
        q, c = stack.pop()
        if q in t.finals and c != full:
            return False
        for label, targets in t.out(q).items():
            live = [r for r in targets if r in useful]
            if not live:
                continue
            if is_op(label):
                c2 = apply_op(c, index, label)
                if c2 is None:
                    return False
            else:
                c2 = c
            for r in live:
                if (r, c2) not in seen:
                    seen.add((r, c2))
                    stack.append((r, c2))
    # a useful state reached under two different configs implies an invalid path
    configs: dict[int, set] = defaultdict(set)
    for q, c in seen:
        configs[q].add(c)
    return all(len(cs) == 1 for cs in configs.values())


def state_configs(a: VSetAutomaton) -> dict[int, tuple[int, ...]]:
    """The variable configuration of each trimmed state of a functional automaton."""
    t_reach = coreachable(a)
    _, seen, _ = _config_graph(a)
    configs: dict[int, set] = defaultdict(set)
    for q, c in seen:
        if q in t_reach:
            configs[q].add(c)
    out = {}
    for q, cs in configs.items():
        if len(cs) != 1:
            raise DomainError("automaton is not functional")
        out[q] = next(iter(cs))
    return out


def is_weakly_deterministic(a: VSetAutomaton) -> bool:
    if not is_epsilon_free(a):
        return False
    return all(len(targets) <= 1 for row in a.delta.values() for targets in row.values())


def is_deterministic(a: VSetAutomaton) -> bool:
    if not is_weakly_deterministic(a):
        return False
    for q, row in a.delta.items():
        for label, targets in row.items():
            if not is_op(label):
                continue
            for r in targets:
                for nxt in a.out(r):
                    if is_op(nxt) and not label < nxt:
                        return False
    return True


def is_dfvsa(a: VSetAutomaton) -> bool:
    return is_deterministic(a) and functionality_check(a)


# --------------------------------------------------------------------------
# Normalization to a deterministic functional automaton

def _sorted_blocks(a: VSetAutomaton, state_cap: int) -> VSetAutomaton:
    """Phase 1: keep valid runs only and emit each operation block in sorted order.

    States are (q, config, tag) where tag 0 may start a block and tag 1 has just
    finished one and must read a symbol or stop.
    """
    a = eliminate_epsilon(a)
    index = {v: i for i, v in enumerate(a.vars)}
    full = (CLOSED,) * len(a.vars)
    b = Builder()
    start = (a.initial, (WAITING,) * len(a.vars), 0)
    b.state(start)
    stack = [start]
    seen = {start}

    def visit(node):
        if node not in seen:
            seen.add(node)
            stack.append(node)
            if len(seen) > state_cap:
                raise ResourceError(f"normalize exceeded state budget ({len(seen)} states)")

    while stack:
        node = stack.pop()
        q, c, tag = node
        if q in a.finals and c == full:
            b.final(node, a.annotations[q] if a.annotations else None)
        for label, targets in a.out(q).items():
            if not is_op(label):
                for r in targets:
                    nxt = (r, c, 0)
                    b.add(node, label, nxt)
                    visit(nxt)
        if tag == 1:
            continue
        # explore op-only paths from (q, c); the op set is determined by the config change
        reach = {(q, c)}
        frontier = [(q, c)]
        while frontier:
            p, cp = frontier.pop()
            for label, targets in a.out(p).items():
                if not is_op(label):
                    continue
                c2 = apply_op(cp, index, label)
                if c2 is None:
                    continue
                for r in targets:
                    if (r, c2) not in reach:
                        reach.add((r, c2))
                        frontier.append((r, c2))
        for r, c2 in reach:
            if c2 == c:
                continue
            ops = []
            for v, i in index.items():
                if c[i] == WAITING and c2[i] >= OPEN:
                    ops.append(op_open(v))
                if c[i] <= OPEN and c2[i] == CLOSED:
                    ops.append(op_close(v))
            ops.sort()
            target = (r, c2, 1)
            prev = node
            for k, op in enumerate(ops[:-1]):
                mid = ("chain", node, target, k)
                b.add(prev, op, mid)
                prev = mid
            b.add(prev, ops[-1], target)
            visit(target)
    return b.finish(a.sigma, a.vars, start, annotated=a.annotations is not None)


def determinize(a: VSetAutomaton, state_cap: int = DEFAULT_STATE_CAP) -> VSetAutomaton:
    """Subset construction over Σ ∪ Γ_V (ε removed first); no dead state is added.

    Keys survive as long as every final subset carries a single key; a subset
    mixing two keys means some ref-word is accepted with both, which no
    deterministic annotated automaton can express.
    """
    a = eliminate_epsilon(a)
    start = frozenset([a.initial])
    index = {start: 0}
    queue = deque([start])
    trans = []
    finals = set()
    keys = {}
    while queue:
        subset = queue.popleft()
        sid = index[subset]
        if subset & a.finals:
            finals.add(sid)
            if a.annotations is not None:
                found = {a.annotations[q] for q in subset & a.finals}
                if len(found) > 1:
                    raise DomainError(f"one ref-word is accepted with keys {sorted(found)}")
                keys[sid] = found.pop()
        moves: dict[object, set[int]] = defaultdict(set)
        for q in subset:
            for label, targets in a.out(q).items():
                moves[label].update(targets)
        for label in sorted(moves, key=label_key):
            target = frozenset(moves[label])
            if target not in index:
                index[target] = len(index)
                if len(index) > state_cap:
                    raise ResourceError(f"determinization exceeded state budget ({len(index)} states)")
                queue.append(target)
            trans.append((sid, label, index[target]))
    return VSetAutomaton.build(a.sigma, a.vars, len(index), 0, finals, trans,
                               keys if a.annotations is not None else None)


def normalize(a: VSetAutomaton, state_cap: int = DEFAULT_STATE_CAP) -> VSetAutomaton:
    """An equivalent deterministic functional automaton (a dfVSA); keys are kept."""
    return trim(determinize(trim(_sorted_blocks(a, state_cap)), state_cap))


# --------------------------------------------------------------------------
# Evaluation

def evaluate(a: VSetAutomaton, doc: str, result_cap: int = DEFAULT_RESULT_CAP) -> frozenset[SpanTuple]:
    return frozenset(t for _, t in annotated_evaluate(a, doc, result_cap))


def annotated_evaluate(a: VSetAutomaton, doc: str,
                       result_cap: int = DEFAULT_RESULT_CAP) -> frozenset[tuple[str | None, SpanTuple]]:
    """All (key, tuple) pairs of valid accepting runs on ``doc``.

    Depth-first search over (state, position, partial assignment).
    """
    for pos, ch in enumerate(doc):
        if ch not in a.sigma:
            raise DomainError(f"document symbol {ch!r} at position {pos + 1} not in alphabet")
    names = a.vars
    index = {v: i for i, v in enumerate(names)}
    n = len(doc)
    useful = coreachable(a)
    start = (a.initial, 0, ((None, None),) * len(names))
    seen = {start}
    stack = [start]
    results: set = set()
    while stack:
        q, pos, partial = stack.pop()
        if pos == n and q in a.finals and all(c is not None for _, c in partial):
            key = a.annotations.get(q) if a.annotations else None
            results.add((key, tuple((v, partial[i]) for i, v in enumerate(names))))
            if len(results) > result_cap:
                raise ResourceError(f"result-size limit exceeded ({result_cap})")
        for label, targets in a.out(q).items():
            if label is None:
                nxt_pos, nxt_partial = pos, partial
            elif is_op(label):
                i = index[label.var]
                o, c = partial[i]
                if not label.close and o is None:
                    nxt_partial = partial[:i] + ((pos + 1, None),) + partial[i + 1:]
                elif label.close and o is not None and c is None:
                    nxt_partial = partial[:i] + ((o, pos + 1),) + partial[i + 1:]
                else:
                    continue
                nxt_pos = pos
            else:
                if pos >= n or doc[pos] != label:
                    continue
                nxt_pos, nxt_partial = pos + 1, partial
            for r in targets:
                if r not in useful:
                    continue
                node = (r, nxt_pos, nxt_partial)
                if node not in seen:
                    seen.add(node)
                    stack.append(node)
    return frozenset(results)


def accepts_refword(a: VSetAutomaton, word) -> bool:
    """Direct NFA simulation of a ref-word (no validity filtering)."""
    current = epsilon_closure(a, [a.initial])
    for letter in word:
        nxt = set()
        for q in current:
            nxt.update(a.out(q).get(letter, ()))
        current = epsilon_closure(a, nxt)
        if not current:
            return False
    return bool(current & a.finals)


def accepting_paths(a: VSetAutomaton, word) -> int:
    """Number of accepting paths on ``word`` in an ε-free automaton."""
    if not is_epsilon_free(a):
        raise DomainError("path counting needs an ε-free automaton")
    counts = {a.initial: 1}
    for letter in word:
        nxt: dict[int, int] = defaultdict(int)
        for q, k in counts.items():
            for r in a.out(q).get(letter, ()):
                nxt[r] += k
        counts = nxt
    return sum(k for q, k in counts.items() if q in a.finals)


# --------------------------------------------------------------------------
# Spanner algebra

def union(a: VSetAutomaton, b: VSetAutomaton, *more: VSetAutomaton) -> VSetAutomaton:
    parts = [a, b, *more]
    for p in parts[1:]:
        if set(p.vars) != set(a.vars):
            raise DomainError(f"union needs equal variable sets, got {a.vars} and {p.vars}")
        if p.sigma != a.sigma:
            raise DomainError("union needs equal alphabets")
    annotated = all(p.annotations is not None for p in parts)
    bld = Builder()
    bld.state("init")
    for k, p in enumerate(parts):
        bld.add("init", EPS, (k, p.initial))
        for s, l, d in p.transitions:
            bld.add((k, s), l, (k, d))
        for f in p.finals:
            bld.final((k, f), p.annotations[f] if annotated else None)
    return bld.finish(a.sigma, a.vars, "init", annotated=annotated)


def projection(a: VSetAutomaton, keep: Iterable[str]) -> VSetAutomaton:
    keep = set(keep)
    if not keep <= set(a.vars):
        raise DomainError(f"projection onto unknown variables {sorted(keep - set(a.vars))}")
    if not functionality_check(a):
        a = normalize(a)

    def mapping(label):
        if is_op(label) and label.var not in keep:
            return None
        return label
    trans = [(s, mapping(l), d) for s, l, d in a.transitions]
    erased = VSetAutomaton.build(a.sigma, keep, a.states, a.initial, a.finals, trans, a.annotations)
    return eliminate_epsilon(erased)


def join(a: VSetAutomaton, b: VSetAutomaton) -> VSetAutomaton:
    """Natural join: synchronized on symbols and shared variables, interleaved otherwise."""
    if a.sigma != b.sigma:
        raise DomainError("join needs equal alphabets")
    a = a if is_dfvsa(a) else normalize(a)
    b = b if is_dfvsa(b) else normalize(b)
    shared = set(a.vars) & set(b.vars)
    bld = Builder()
    start = (a.initial, b.initial)
    bld.state(start)
    stack = [start]
    seen = {start}
    while stack:
        node = stack.pop()
        p, q = node
        if p in a.finals and q in b.finals:
            bld.final(node)
        succ = []
        for label, targets in a.out(p).items():
            if is_op(label) and label.var not in shared:
                succ += [(label, (r, q)) for r in targets]
            elif is_op(label) or label is not None:
                for r in targets:
                    succ += [(label, (r, s)) for s in b.out(q).get(label, ())]
        for label, targets in b.out(q).items():
            if is_op(label) and label.var not in shared:
                succ += [(label, (p, s)) for s in targets]
        for label, nxt in succ:
            bld.add(node, label, nxt)
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return trim(bld.finish(a.sigma, set(a.vars) | set(b.vars), start))


def concat(left: VSetAutomaton, right: VSetAutomaton) -> VSetAutomaton:
    """Concatenation where at most one operand carries variables."""
    if left.vars and right.vars:
        raise DomainError("concatenation needs a variable-free operand")
    if left.sigma != right.sigma:
        raise DomainError("concatenation needs equal alphabets")
    bld = Builder()
    for s, l, d in left.transitions:
        bld.add(("L", s), l, ("L", d))
    for s, l, d in right.transitions:
        bld.add(("R", s), l, ("R", d))
    for f in left.finals:
        bld.add(("L", f), EPS, ("R", right.initial))
    for f in right.finals:
        bld.final(("R", f))
    return bld.finish(left.sigma, set(left.vars) | set(right.vars), ("L", left.initial))


def capture(var: str, body: VSetAutomaton) -> VSetAutomaton:
    """``var{body}``: open, run body, close."""
    if var in body.vars:
        raise DomainError(f"variable {var!r} already used in the body")
    bld = Builder()
    bld.add("pre", op_open(var), ("B", body.initial))
    for s, l, d in body.transitions:
        bld.add(("B", s), l, ("B", d))
    for f in body.finals:
        bld.add(("B", f), op_close(var), "post")
    bld.final("post")
    return bld.finish(body.sigma, set(body.vars) | {var}, "pre")


def intersect_documents(a: VSetAutomaton, language: VSetAutomaton) -> VSetAutomaton:
    """Restrict ``a`` to documents of a variable-free ``language``."""
    if language.vars:
        raise DomainError("context language must be variable-free")
    return join(a, language)


def complete_universe(sigma: str, variables) -> VSetAutomaton:
    """DFA of all valid ref-words whose operation blocks are sorted."""
    names = tuple(sorted(variables))
    index = {v: i for i, v in enumerate(names)}
    full = (CLOSED,) * len(names)
    bld = Builder()
    start = ((WAITING,) * len(names), None)
    bld.state(start)
    stack = [start]
    seen = {start}
    while stack:
        node = stack.pop()
        c, last = node
        if c == full:
            bld.final(node)
        succ = [(a, (c, None)) for a in sigma]
        for v in names:
            for op in (op_open(v), op_close(v)):
                c2 = apply_op(c, index, op)
                if c2 is not None and (last is None or last < op):
                    succ.append((op, (c2, op)))
        for label, nxt in succ:
            bld.add(node, label, nxt)
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return bld.finish(sigma, names, start)


def complement(a: VSetAutomaton, state_cap: int = DEFAULT_STATE_CAP) -> VSetAutomaton:
    """The spanner selecting exactly the tuples ``a`` does not select."""
    d = normalize(a, state_cap)
    u = complete_universe(a.sigma, a.vars)
    bld = Builder()
    dead = -1
    start = (u.initial, d.initial)
    bld.state(start)
    stack = [start]
    seen = {start}
    while stack:
        node = stack.pop()
        p, q = node
        if p in u.finals and (q == dead or q not in d.finals):
            bld.final(node)
        for label, targets in u.out(p).items():
            r = d.out(q).get(label, (dead,))[0] if q != dead else dead
            nxt = (targets[0], r)
            bld.add(node, label, nxt)
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
                if len(seen) > state_cap:
                    raise ResourceError(f"complement exceeded state budget ({len(seen)} states)")
    return trim(bld.finish(a.sigma, a.vars, start))
