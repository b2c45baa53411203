"""Splitter algebra: composition of splitters, commutativity and subsumption
relative to a regular document context, and the transitivity rule for
self-splittability."""

from __future__ import annotations

from .config import DEFAULT_CONFIG, RunConfig
from .core import DomainError
from .decisions import (
    Verdict,
    _timed,
    check_unary,
    compose_construct,
    equivalence,
    self_splittable,
)
from .vsa import VSetAutomaton, fresh_var, join, rename_vars, sigma_star, strip_annotations


def compose_splitters(s1: VSetAutomaton, s2: VSetAutomaton) -> VSetAutomaton:
    """The splitter ``s1 ∘ s2``: split by ``s2``, then split each piece by ``s1``.

    The result uses ``s1``'s variable.
    """
    x1, x2 = check_unary(s1), check_unary(s2)
    s2 = strip_annotations(s2)
    if x2 == x1:
        s2 = rename_vars(s2, {x2: fresh_var("x", {x1})})
    return compose_construct(strip_annotations(s1), s2)


def _context(sigma: str, r: VSetAutomaton | None) -> VSetAutomaton:
    if r is None:
        return sigma_star(sigma)
    if r.vars:
        raise DomainError("a regular context must be variable-free")
    return r


def _as_var(a: VSetAutomaton, var: str) -> VSetAutomaton:
    return a if a.vars[0] == var else rename_vars(a, {a.vars[0]: var})


def _restricted_equivalence(a, b, r, config) -> Verdict:
    """Equivalence of two splitters on the documents of ``r``."""
    ctx = _context(a.sigma, r)
    b = _as_var(b, a.vars[0])
    return equivalence(join(a, ctx), join(b, ctx), config)


@_timed
def commute(s1: VSetAutomaton, s2: VSetAutomaton, r: VSetAutomaton | None = None,
            config: RunConfig = DEFAULT_CONFIG) -> Verdict:
    """``s1 ∘ s2`` and ``s2 ∘ s1`` agree on every document of ``r`` (default Σ*).

    Witness side "lhs": a split only ``s1 ∘ s2`` produces; "rhs": only ``s2 ∘ s1``.
    """
    left = compose_splitters(s1, s2)
    right = compose_splitters(s2, s1)
    return _restricted_equivalence(left, right, r, config)


@_timed
def subsume(s: VSetAutomaton, s_prime: VSetAutomaton, r: VSetAutomaton | None = None,
            config: RunConfig = DEFAULT_CONFIG) -> Verdict:
    """``s`` equals ``s_prime ∘ s`` on every document of ``r``."""
    check_unary(s)
    composed = compose_splitters(s_prime, s)
    return _restricted_equivalence(strip_annotations(s), composed, r, config)


@_timed
def splitter_identity(s1: VSetAutomaton, s2: VSetAutomaton,
                      config: RunConfig = DEFAULT_CONFIG) -> Verdict:
    """``s1`` equals ``s1 ∘ s2`` on all documents."""
    return _restricted_equivalence(strip_annotations(s1), compose_splitters(s1, s2), None, config)


@_timed
def transitivity_infer(p: VSetAutomaton, s1: VSetAutomaton, s2: VSetAutomaton,
                       config: RunConfig = DEFAULT_CONFIG, verify: bool = False) -> Verdict:
    """Is ``p`` self-splittable by ``s2``?

    If ``p`` is self-splittable by ``s1`` and ``s1 = s1 ∘ s2`` the answer is
    inferred without a further check (``stats["route"] == "inferred"``);
    otherwise it is decided directly. ``verify`` also runs the direct check
    on the inferred path and records it under ``stats["direct"]``.
    """
    first = self_splittable(p, s1, config)
    identity = splitter_identity(s1, s2, config) if first.yes else None
    if first.yes and identity.yes:
        verdict = Verdict("yes", stats={
            "product_states": first.stats["product_states"] + identity.stats["product_states"],
            "route": "inferred",
        })
        if verify:
            verdict.stats["direct"] = self_splittable(p, s2, config).answer
        return verdict
    direct = self_splittable(p, s2, config)
    direct.stats["route"] = "direct"
    return direct
