import random

import pytest
from hypothesis import given, strategies as st

from spanners.nfa import AmbiguityError, NfaBuilder, accepts, ambiguous_word, dfa_containment, ufa_containment


def dfa(seed, sigma="ab", states=3):
    rng = random.Random(seed)
    b = NfaBuilder()
    for q in range(states):
        b.state(q)
        for ch in sigma:
            if rng.random() < 0.8:
                b.add(q, ch, rng.randrange(states))
        if rng.random() < 0.5:
            b.final(q)
    return b.finish(0)


def second_from_end_is_a():
    """Unambiguous but nondeterministic: guess the second-to-last position."""
    b = NfaBuilder()
    for ch in "ab":
        b.add(0, ch, 0)
    b.add(0, "a", 1)
    for ch in "ab":
        b.add(1, ch, 2)
    b.final(2)
    return b.finish(0)


def ends_with_a():
    b = NfaBuilder()
    b.add(0, "a", 1)
    b.add(0, "b", 0)
    b.add(1, "a", 1)
    b.add(1, "b", 0)
    b.final(1)
    return b.finish(0)


@given(st.integers(0, 10**6), st.integers(0, 10**6))
def test_counting_agrees_with_subset_construction(s1, s2):
    a, b = dfa(s1), dfa(s2)
    answer, word, _ = ufa_containment(a, b)
    ref, _ = dfa_containment(a, b)
    assert answer == ref
    if not answer:
        assert accepts(a, word) and not accepts(b, word)


def test_unambiguous_nondeterministic_inputs():
    a = second_from_end_is_a()
    assert ambiguous_word(a) is None
    answer, word, _ = ufa_containment(a, ends_with_a())
    assert not answer
    assert accepts(a, word) and not accepts(ends_with_a(), word)
    assert ufa_containment(ends_with_a(), ends_with_a())[0]


def test_ambiguity_detected():
    b = NfaBuilder()
    b.add(0, "a", 1)
    b.add(0, "a", 2)
    b.final(1)
    b.final(2)
    n = b.finish(0)
    assert ambiguous_word(n) == ("a",)
    with pytest.raises(AmbiguityError):
        ufa_containment(n, ends_with_a())


def test_epsilon_edges_are_removed():
    b = NfaBuilder()
    b.add(0, None, 1)
    b.add(1, "a", 2)
    b.final(2)
    n = b.finish(0)
    assert accepts(n, ("a",))
    assert ufa_containment(n, ends_with_a())[0]
