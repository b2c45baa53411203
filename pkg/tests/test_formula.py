from pathlib import Path

import pytest
from hypothesis import given, settings

from spanners.core import make_tuple
from spanners.formula import (
    Capture, Concat, FormulaSyntaxError, Symbol, Union, check_functional_formula, compile_to_vsa,
    parse_formula, parse_formula_text, read_formula_file, to_text, variables,
)
from spanners.oracle import brute_eval, documents
from spanners.vsa import evaluate, functionality_check

from .util import formulas


def test_parse_concat_with_capture():
    f = parse_formula("a y{b} b", "ab")
    assert f == Concat(Symbol("a"), Concat(Capture("y", Symbol("b")), Symbol("b")))


def test_plus_and_bar_are_union():
    f = parse_formula("x{ab}b + a x{bb}", "ab")
    assert isinstance(f, Union)
    assert parse_formula("x{ab}b | a x{bb}", "ab") == f


@pytest.mark.parametrize("text", ["", "a |", "(a", "x{a", "c", "*a", "a\\"])
def test_syntax_errors(text):
    with pytest.raises(FormulaSyntaxError):
        parse_formula(text, "ab")


def test_error_reports_position():
    with pytest.raises(FormulaSyntaxError) as info:
        parse_formula("ab)", "ab")
    assert info.value.position == 2


def test_sugar():
    f = parse_formula("Σ* y{a++} .? <e> <0>", "ab")
    assert variables(f) == {"y"}


def test_duplicate_capture_parses():
    f = parse_formula("x{x{a}}", "ab")
    assert not check_functional_formula(f, "ab")


@pytest.mark.parametrize("text,expected", [("x{a}", True), ("(x{a})*", False), ("x{a} + b", False)])
def test_functional_check(text, expected):
    assert check_functional_formula(parse_formula(text, "ab"), "ab") is expected


def test_compile_example():
    a = compile_to_vsa(parse_formula("a y{b} b", "ab"), "ab")
    assert evaluate(a, "abb") == {make_tuple({"y": (2, 3)})}


def test_epsilon_formula():
    a = compile_to_vsa(parse_formula("<e>", "ab"), "ab")
    assert evaluate(a, "") == {()}
    assert evaluate(a, "a") == frozenset()


def test_file_format(tmp_path: Path):
    path = tmp_path / "P.rgx"
    path.write_text("alphabet: ab\na y{b} b\n")
    f, sigma = read_formula_file(path)
    assert sigma == "ab" and variables(f) == {"y"}
    with pytest.raises(Exception):
        parse_formula_text("a y{b} b")


@given(formulas())
def test_print_parse_round_trip(f):
    assert parse_formula(to_text(f), "ab") == f


@settings(max_examples=40)
@given(formulas())
def test_compiled_evaluation_matches_ref_word_oracle(f):
    a = compile_to_vsa(f, "ab")
    for doc in documents("ab", 5):
        assert evaluate(a, doc) == brute_eval(f, doc, sigma="ab")


@given(formulas())
def test_functional_formula_compiles_to_functional_automaton(f):
    if check_functional_formula(f, "ab"):
        assert functionality_check(compile_to_vsa(f, "ab"))
