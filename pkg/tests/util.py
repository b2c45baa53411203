"""Shared helpers and hypothesis strategies for the test suite."""

import random

from hypothesis import strategies as st

from spanners.formula import (
    Capture, Concat, Empty, Epsilon, Optional, Plus, Star, Symbol, Union, Wildcard, formula_vsa,
)
from spanners.oracle import random_spanner, random_splitter, separator_splitter


def rgx(text, sigma="ab"):
    return formula_vsa(text, sigma)


def seeds():
    return st.integers(min_value=0, max_value=2**31)


def spanners(sigma="ab", variables=("y",), max_states=6):
    return seeds().map(lambda s: random_spanner(random.Random(s), sigma, variables, max_states))


def splitters(sigma="ab", max_states=5):
    return seeds().map(lambda s: random_splitter(random.Random(s), sigma, max_states))


def disjoint_splitters(sigma="ab"):
    return seeds().map(lambda s: separator_splitter(random.Random(s), sigma))


def formulas(sigma="ab", names=("y", "z")):
    """Random formula ASTs; every capture variable is used at most once per branch."""
    leaves = st.one_of(
        st.sampled_from([Symbol(c) for c in sigma]),
        st.just(Wildcard()),
        st.just(Epsilon()),
        st.just(Empty()),
    )

    def extend(children):
        return st.one_of(
            st.builds(Union, children, children),
            st.builds(Concat, children, children),
            st.builds(Star, children),
            st.builds(Plus, children),
            st.builds(Optional, children),
            st.builds(Capture, st.sampled_from(names), children),
        )

    return st.recursive(leaves, extend, max_leaves=6)
