import pytest
from hypothesis import given, strategies as st

from spanners.core import (
    DomainError, ValidityError, all_encodings, all_spans, all_tuples, check_alphabet, check_document,
    clr, covers, encode_refword, format_refword, make_tuple, op_close, op_open, parse_refword,
    refword_is_valid, shift_span, shift_tuple, span_relations_equal, spans_overlap, substring,
    tuple_of_refword, unshift_tuple,
)

span = st.tuples(st.integers(1, 20), st.integers(0, 20)).map(lambda p: (p[0], p[0] + p[1]))


def test_shift_example():
    assert shift_span((2, 3), (2, 4)) == (3, 4)
    assert shift_span((1, 1), (5, 5)) == (5, 5)


def test_shift_overflow():
    import sys
    with pytest.raises(OverflowError):
        shift_span((sys.maxsize, sys.maxsize), (10, 10))


@given(span, span)
def test_shift_unshift_round_trip(inner, outer):
    t = make_tuple({"y": inner})
    assert unshift_tuple(shift_tuple(t, outer), outer) == t


@given(span, span)
def test_shift_composes(a, b):
    c = (3, 7)
    assert shift_span(shift_span(a, b), c) == shift_span(a, shift_span(b, c))


@given(span, span)
def test_overlap_symmetric(a, b):
    assert spans_overlap(a, b) == spans_overlap(b, a)


def test_overlap_edge_cases():
    assert not spans_overlap((1, 3), (3, 5))
    assert spans_overlap((1, 3), (2, 4))
    assert not spans_overlap((2, 2), (2, 2))
    assert spans_overlap((2, 2), (1, 3))


def test_covers_and_substring():
    t = make_tuple({"y": (2, 3), "z": (3, 3)})
    assert covers((1, 4), t)
    assert not covers((3, 4), t)
    assert substring("abb", (2, 4)) == "bb"


def test_all_spans_count():
    n = 4
    assert len(list(all_spans(n))) == (n + 1) * (n + 2) // 2
    assert len(list(all_tuples(["y", "z"], 2))) == 36


@given(st.text("ab", max_size=4), st.data())
def test_encodings_decode_to_the_tuple(doc, data):
    tuples = list(all_tuples(["y", "z"], len(doc)))
    t = data.draw(st.sampled_from(tuples))
    words = list(all_encodings(doc, t))
    assert encode_refword(doc, t) in words
    assert len(set(words)) == len(words)
    for w in words:
        assert clr(w) == doc
        assert refword_is_valid(w, ["y", "z"])
        assert tuple_of_refword(w, ["y", "z"]) == t


def test_invalid_refwords():
    y_open, y_close = op_open("y"), op_close("y")
    assert not refword_is_valid((y_close, y_open), ["y"])
    assert not refword_is_valid((y_open, "a"), ["y"])
    assert not refword_is_valid((y_open, y_open, y_close), ["y"])
    with pytest.raises(ValidityError):
        tuple_of_refword((y_open,), ["y"])


def test_refword_text_round_trip():
    w = parse_refword("a y⊢ b ⊣y b")
    assert format_refword(w) == "a y⊢ b ⊣y b"
    assert tuple_of_refword(w, ["y"]) == make_tuple({"y": (2, 3)})


def test_op_order_matches_precedence():
    # by variable name, then opening before closing
    assert sorted([op_close("a"), op_open("b"), op_open("a")]) == [op_open("a"), op_close("a"), op_open("b")]


def test_alphabet_and_document_checks():
    assert check_alphabet("ab") == "ab"
    for bad in ["", "aa", "a|"]:
        with pytest.raises(DomainError):
            check_alphabet(bad)
    with pytest.raises(DomainError):
        check_document("abc", "ab")


def test_relation_equality_ignores_order():
    r1 = [make_tuple({"y": (1, 2)}), make_tuple({"y": (2, 3)})]
    assert span_relations_equal(r1, list(reversed(r1)))
    assert not span_relations_equal(r1, r1[:1])
