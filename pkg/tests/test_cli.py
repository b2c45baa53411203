import json
from pathlib import Path

from click.testing import CliRunner

from spanners.cli import main
from spanners.vsa import VSetAutomaton, to_json, union

from .util import rgx

DATA = Path(__file__).resolve().parent.parent / "data" / "abb"


def run(*args):
    result = CliRunner().invoke(main, [str(a) for a in args])
    return result.exit_code, result.output


def out_json(*args):
    code, text = run(*args)
    return code, json.loads(text)


def write(tmp_path, name, text, sigma="ab"):
    path = tmp_path / name
    path.write_text(f"alphabet: {sigma}\n{text}\n", encoding="utf-8")
    return path


def keyed_json(tmp_path, name, parts, sigma):
    autos = []
    for text, key in parts:
        a = rgx(text, sigma)
        autos.append(VSetAutomaton.build(a.sigma, a.vars, a.states, a.initial, a.finals,
                                         a.transitions, {q: key for q in a.finals}))
    a = autos[0] if len(autos) == 1 else union(*autos)
    path = tmp_path / name
    path.write_text(json.dumps(to_json(a)), encoding="utf-8")
    return path


def test_eval_example():
    code, text = run("eval", DATA / "P.rgx", "--doc", "abb")
    assert code == 0
    assert json.loads(text) == {"tuples": [{"y": [2, 3]}]}


def test_split_correct_example():
    code, out = out_json("split-correct", DATA / "P.rgx", DATA / "PS.rgx", DATA / "S.rgx")
    assert code == 0 and out["answer"] == "yes"
    code, out = out_json("split-correct", DATA / "P.rgx", DATA / "PS2.rgx", DATA / "S.rgx")
    assert code == 0


def test_disjoint_example():
    code, out = out_json("disjoint", DATA / "S.rgx")
    assert code == 1
    assert out["answer"] == "no"
    assert out["witness"]["document"] == "abb"
    assert out["witness"]["detail"]["spans"] == [[1, 3], [2, 4]]


def test_output_is_byte_stable():
    args = ("split-correct", DATA / "P.rgx", DATA / "PS.rgx", DATA / "S.rgx")
    first, second = run(*args), run(*args)
    assert first == second
    assert json.loads(first[1])["stats"]["elapsed_ms"] is None
    code, out = out_json("--timing", *args)
    assert isinstance(out["stats"]["elapsed_ms"], float)


def test_witness_replays_through_eval(tmp_path):
    ps = write(tmp_path, "bad.rgx", "y{b}")
    code, out = out_json("split-correct", DATA / "P.rgx", ps, DATA / "S.rgx")
    assert code == 1
    doc = out["witness"]["document"]
    _, p_out = out_json("eval", DATA / "P.rgx", "--doc", doc)
    tuples = p_out["tuples"]
    assert (out["witness"]["tuple"] in tuples) == (out["witness"]["side"] == "lhs")


def test_domain_errors_exit_2(tmp_path):
    code, out = out_json("canonical", DATA / "P.rgx", DATA / "S.rgx")
    assert code == 2 and "disjoint" in out["error"]
    code, out = out_json("cover", "--certify-dfvsa", DATA / "P.rgx", DATA / "S.rgx")
    assert code == 2
    code, out = out_json("eval", tmp_path / "missing.rgx", "--doc", "a")
    assert code == 2
    bad = write(tmp_path, "bad.rgx", "y{a")
    code, out = out_json("eval", bad, "--doc", "a")
    assert code == 2


def test_usage_error_exit_2():
    code, _ = run("eval")
    assert code == 2
    code, _ = run("no-such-command")
    assert code == 2


def test_resource_error_exit_3(tmp_path):
    config = tmp_path / "config.json"
    config.write_text(json.dumps({"state_cap": 2}), encoding="utf-8")
    code, out = out_json("--config", config, "determinize", DATA / "S.rgx")
    assert code == 3 and out["kind"] == "resource"


def test_canonical_without_gate():
    code, out = out_json("canonical", "--skip-disjoint-gate", DATA / "P.rgx", DATA / "S.rgx",
                         "--doc", "bb")
    assert code == 0
    assert out["tuples"] == [{"y": [1, 2]}]


def test_splittable_and_artifact(tmp_path):
    s = write(tmp_path, "S.rgx", "x{abb}")
    artifact = tmp_path / "ps.json"
    code, out = out_json("splittable", DATA / "P.rgx", s, "--artifact", artifact)
    assert code == 0 and out["answer"] == "yes"
    code, out = out_json("eval", artifact, "--doc", "abb")
    assert out["tuples"] == [{"y": [2, 3]}]
    code, out = out_json("splittable", DATA / "P.rgx", DATA / "S.rgx")
    assert code == 2


def test_determinize_round_trip(tmp_path):
    target = tmp_path / "p.json"
    code, _ = run("determinize", DATA / "P.rgx", "--out", target)
    assert code == 0
    code, out = out_json("equiv", target, DATA / "P.rgx")
    assert code == 0 and out["answer"] == "yes"
    code, out = out_json("functional", target)
    assert code == 0


def test_contains_and_equiv(tmp_path):
    a = write(tmp_path, "a.rgx", "y{a}")
    ab = write(tmp_path, "ab.rgx", "y{a} + y{b}")
    assert run("contains", a, ab)[0] == 0
    code, out = out_json("contains", ab, a)
    assert code == 1 and out["witness"]["document"] == "b"
    assert run("equiv", a, ab)[0] == 1


def test_reasoning_commands(tmp_path):
    s1 = write(tmp_path, "s1.rgx", ".* x{.} .*")
    s2 = write(tmp_path, "s2.rgx", ".* x{..} .* + x{.}")
    p = write(tmp_path, "p.rgx", ".* y{a} .*")
    whole = write(tmp_path, "whole.rgx", "x{.*}")
    code, out = out_json("transitivity", "--verify", p, s1, s2)
    assert code == 0 and out["stats"]["route"] == "inferred"
    assert run("commute", s1, s1)[0] == 0
    assert run("subsume", s1, whole)[0] == 0
    code, out = out_json("compose-splitters", s1, s2, "--doc", "ab")
    assert out["tuples"] == [{"x": [1, 2]}, {"x": [2, 3]}]
    ctx = write(tmp_path, "ctx.rgx", "a*")
    assert run("commute", "--context", ctx, s1, s2)[0] in (0, 1)


def test_cover_and_self_split():
    code, out = out_json("cover", DATA / "P.rgx", DATA / "S.rgx")
    assert code == 0
    code, out = out_json("self-split", DATA / "P.rgx", DATA / "S.rgx")
    assert code == 1


def test_filter_split_correct(tmp_path):
    whole = write(tmp_path, "whole.rgx", "x{.*}")
    code, out = out_json("filter-split-correct", DATA / "P.rgx", DATA / "P.rgx", whole)
    assert code == 0 and out["answer"] == "yes"


def test_blackbox(tmp_path):
    sigma = "ab#"
    para = write(tmp_path, "para.rgx", "(.* #)? x{(a|b)*} (# .*)?", sigma)
    alpha = write(tmp_path, "alpha.rgx", "(.* #)? (a|b)* x{a} (a|b)* y{b} (a|b)* (# .*)?", sigma)
    sig = tmp_path / "sig.txt"
    sig.write_text("pi1: x, x2\npi2: x2, y\n", encoding="utf-8")
    cons = tmp_path / "cons.txt"
    cons.write_text("pi1 subsetof para.rgx\npi2 subsetof para.rgx\n", encoding="utf-8")
    code, out = out_json("blackbox", sig, cons, alpha, para)
    assert code == 0 and out["answer"] == "yes"
    cons.write_text("pi1 subsetof para.rgx\n", encoding="utf-8")
    code, out = out_json("blackbox", sig, cons, alpha, para)
    assert code == 1 and out["answer"] == "unknown"
    sig.write_text("pi1: x\npi2: y\n", encoding="utf-8")
    assert run("blackbox", sig, cons, alpha, para)[0] == 2


def test_annotated_commands(tmp_path):
    sigma = "gpa;"
    s = keyed_json(tmp_path, "s.json", [("(.* ;)? x{g a*} (; .*)?", "get"),
                                        ("(.* ;)? x{p a*} (; .*)?", "post")], sigma)
    p = write(tmp_path, "p.rgx", "(.* ;)? g y{a*} (; .*)? + (.* ;)? y{p a*} (; .*)?", sigma)
    get = write(tmp_path, "get.rgx", "g y{a*}", sigma)
    post = write(tmp_path, "post.rgx", "y{p a*}", sigma)
    code, out = out_json("annotated-eval", s, "--doc", "ga;p")
    assert code == 0
    assert out["tuples"] == [{"key": "get", "tuple": {"x": [1, 3]}},
                             {"key": "post", "tuple": {"x": [4, 5]}}]
    assert run("highlander", s)[0] == 0
    assert run("annotated-split-correct", p, s, "--key", f"get={get}", "--key", f"post={post}")[0] == 0
    assert run("annotated-split-correct", p, s, "--key", f"get={post}", "--key", f"post={get}")[0] == 1
    assert run("annotated-splittable", p, s)[0] == 0
    assert run("annotated-split-correct", p, s, "--key", "get")[0] == 2


def test_oracle_check_files():
    code, out = out_json("oracle-check", "--check", "disjoint", DATA / "S.rgx")
    assert code == 1
    assert out["counterexample"]["document"] == "abb"
    code, out = out_json("oracle-check", "--check", "split-correct", "--bound", "4",
                         DATA / "P.rgx", DATA / "PS.rgx", DATA / "S.rgx")
    assert code == 0
    assert out["result"] == "no counterexample up to bound"
    assert run("oracle-check", "--check", "cover", DATA / "P.rgx")[0] == 2


def test_oracle_check_corpus():
    code, out = out_json("--seed", "5", "oracle-check", "--trials", "3")
    assert code == 0
    assert out["seed"] == 5 and out["trials"] == 3 and out["discrepancies"] == []


def test_gen_gadget(tmp_path):
    code, out = out_json("--seed", "2", "gen-gadget", "-n", "2", "--out-dir", tmp_path / "g")
    assert code == 0
    assert sorted(p.name for p in (tmp_path / "g").iterdir()) == [
        "A.json", "A_prime.json", "P.json", "PS.json", "S.json"]
    code, verdict = out_json("contains", tmp_path / "g" / "A.json", tmp_path / "g" / "A_prime.json")
    assert (verdict["answer"] == "yes") == out["universal"]
    if not out["universal"]:
        assert verdict["witness"]["document"] == out["missing_word"]
    code, verdict = out_json("split-correct", *(tmp_path / "g" / f"{n}.json" for n in ("P", "PS", "S")))
    assert (verdict["answer"] == "yes") == out["universal"]
    assert run("--seed", "2", "gen-gadget", "-n", "2") == run("--seed", "2", "gen-gadget", "-n", "2")


def test_pretty_output():
    code, text = run("--pretty", "disjoint", DATA / "S.rgx")
    assert text.startswith("{\n  ")
