"""Command-line front end.

Every command prints one JSON object on standard output. Exit status:
0 for "yes" or plain success, 1 for "no" (or "unknown"), 2 for usage and
domain errors, 3 when a resource budget is exceeded.
"""

from __future__ import annotations

import json
import random
import sys
from pathlib import Path

import click

from . import decisions as dec
from . import extensions as ext
from . import oracle
from . import reasoning
from .config import RunConfig
from .core import DomainError, ResourceError, SpannerError, check_document, relation_json, tuple_dict
from .formula import compile_to_vsa, read_formula_file
from .vsa import (
    VSetAutomaton,
    evaluate,
    from_json,
    functionality_check,
    is_deterministic,
    is_dfvsa,
    is_weakly_deterministic,
    normalize,
    to_json,
)

EXIT_YES, EXIT_NO, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 2, 3


class Context:
    def __init__(self, config: RunConfig, fmt: str, pretty: bool, timing: bool):
        self.config = config
        self.fmt = fmt
        self.pretty = pretty
        self.timing = timing

    def load(self, path: str) -> VSetAutomaton:
        return load_spanner(path, self.fmt)


def load_spanner(path: str | Path, fmt: str = "auto") -> VSetAutomaton:
    """Read an automaton-JSON or formula file; ``auto`` decides by the ``.json`` suffix."""
    path = Path(path)
    if fmt == "auto":
        fmt = "json" if path.suffix == ".json" else "rgx"
    try:
        if fmt == "json":
            return from_json(path.read_text(encoding="utf-8"))
        f, sigma = read_formula_file(path)
    except OSError as exc:
        raise DomainError(f"cannot read {path}: {exc}") from exc
    return compile_to_vsa(f, sigma)


def emit(obj, pretty: bool = False) -> None:
    text = json.dumps(obj, sort_keys=True, ensure_ascii=False, indent=2 if pretty else None)
    click.echo(text)


def finish(ctx: Context, verdict: dec.Verdict, extra: dict | None = None) -> None:
    out = verdict.to_json(timing=ctx.timing)
    if extra:
        out.update(extra)
    emit(out, ctx.pretty)
    sys.exit(EXIT_YES if verdict.yes else EXIT_NO)


def _tuples(relation) -> list:
    return relation_json(relation)


class SpannerGroup(click.Group):
    """Maps library exceptions to JSON errors and exit codes."""

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except ResourceError as exc:
            emit({"error": str(exc), "kind": "resource"})
            sys.exit(EXIT_RESOURCE)
        except (SpannerError, ValueError) as exc:
            emit({"error": str(exc), "kind": type(exc).__name__})
            sys.exit(EXIT_USAGE)


@click.group(cls=SpannerGroup)
@click.option("--config", "config_path", type=click.Path(dir_okay=False),
              help="JSON run configuration (default: $SPANNERS_CONFIG).")
@click.option("--format", "fmt", type=click.Choice(["auto", "json", "rgx"]), default="auto",
              show_default=True, help="Input format of spanner files.")
@click.option("--pretty", is_flag=True, help="Indent the JSON output.")
@click.option("--timing", is_flag=True, help="Report elapsed_ms (otherwise null, for stable output).")
@click.option("--seed", type=int, default=None, help="Seed for random corpora.")
@click.pass_context
def main(click_ctx, config_path, fmt, pretty, timing, seed):
    """Document spanners: evaluation and split-correctness decisions."""
    config = RunConfig.load(config_path).replace(seed=seed)
    click_ctx.obj = Context(config, fmt, pretty, timing)


pass_ctx = click.make_pass_decorator(Context)


# --------------------------------------------------------------------------
# Evaluation and automata

@main.command("eval")
@click.argument("spanner")
@click.option("--doc", required=True, help="Document to evaluate on.")
@pass_ctx
def eval_cmd(ctx, spanner, doc):
    """Evaluate SPANNER on a document."""
    a = ctx.load(spanner)
    check_document(doc, a.sigma)
    emit({"tuples": _tuples(evaluate(a, doc, ctx.config.result_cap))}, ctx.pretty)


@main.command("annotated-eval")
@click.argument("spanner")
@click.option("--doc", required=True)
@pass_ctx
def annotated_eval_cmd(ctx, spanner, doc):
    """Evaluate an annotated spanner; every tuple carries its key."""
    a = ctx.load(spanner)
    check_document(doc, a.sigma)
    pairs = ext.annotated_evaluate(a, doc, ctx.config)
    rows = sorted(pairs, key=lambda kt: (kt[0] or "", kt[1]))
    emit({"tuples": [{"key": k, "tuple": tuple_dict(t)} for k, t in rows]}, ctx.pretty)


@main.command()
@click.argument("spanner")
@pass_ctx
def functional(ctx, spanner):
    """Is every accepting run of SPANNER valid?"""
    a = ctx.load(spanner)
    ok = functionality_check(a)
    emit({"answer": "yes" if ok else "no", "deterministic": is_deterministic(a),
          "weakly_deterministic": is_weakly_deterministic(a), "dfvsa": is_dfvsa(a)}, ctx.pretty)
    sys.exit(EXIT_YES if ok else EXIT_NO)


@main.command()
@click.argument("spanner")
@click.option("--out", type=click.Path(dir_okay=False), help="Also write the automaton here.")
@pass_ctx
def determinize(ctx, spanner, out):
    """Normalize SPANNER into an equivalent deterministic functional automaton."""
    a = normalize(ctx.load(spanner), ctx.config.state_cap)
    data = to_json(a)
    if out:
        Path(out).write_text(json.dumps(data, sort_keys=True) + "\n", encoding="utf-8")
    emit(data, ctx.pretty)


# --------------------------------------------------------------------------
# Decision procedures

@main.command()
@click.argument("p")
@click.argument("q")
@pass_ctx
def contains(ctx, p, q):
    """Is P contained in Q on every document?"""
    finish(ctx, dec.containment(ctx.load(p), ctx.load(q), ctx.config))


@main.command()
@click.argument("p")
@click.argument("q")
@pass_ctx
def equiv(ctx, p, q):
    """Do P and Q define the same spanner?"""
    finish(ctx, dec.equivalence(ctx.load(p), ctx.load(q), ctx.config))


@main.command()
@click.argument("s")
@pass_ctx
def disjoint(ctx, s):
    """Does splitter S never select two distinct overlapping spans?"""
    finish(ctx, dec.splitter_disjoint(ctx.load(s), ctx.config))


certify = click.option("--certify-dfvsa", is_flag=True,
                       help="Use the polynomial route; fail unless the inputs are dfVSA and S is disjoint.")


@main.command()
@click.argument("p")
@click.argument("s")
@certify
@pass_ctx
def cover(ctx, p, s, certify_dfvsa):
    """Does every tuple of P lie inside a split of S?"""
    fn = dec.cover_condition_ptime if certify_dfvsa else dec.cover_condition_general
    finish(ctx, fn(ctx.load(p), ctx.load(s), ctx.config))


@main.command("split-correct")
@click.argument("p")
@click.argument("ps")
@click.argument("s")
@certify
@pass_ctx
def split_correct_cmd(ctx, p, ps, s, certify_dfvsa):
    """Is P equal to PS composed with S?"""
    fn = dec.split_correct_ptime if certify_dfvsa else dec.split_correct
    finish(ctx, fn(ctx.load(p), ctx.load(ps), ctx.load(s), ctx.config))


@main.command("self-split")
@click.argument("p")
@click.argument("s")
@certify
@pass_ctx
def self_split_cmd(ctx, p, s, certify_dfvsa):
    """Is P equal to P composed with S?"""
    finish(ctx, dec.self_splittable(ctx.load(p), ctx.load(s), ctx.config, ptime=certify_dfvsa))


def _artifact_out(verdict, path):
    if path and verdict.yes and isinstance(verdict.artifact, VSetAutomaton):
        Path(path).write_text(json.dumps(to_json(verdict.artifact), sort_keys=True) + "\n",
                              encoding="utf-8")


@main.command()
@click.argument("p")
@click.argument("s")
@click.option("--artifact", type=click.Path(dir_okay=False),
              help="On yes, write the witnessing split-spanner here.")
@pass_ctx
def splittable(ctx, p, s, artifact):
    """Is there any split-spanner PS with P = PS composed with S? (S disjoint)"""
    verdict = dec.splittable(ctx.load(p), ctx.load(s), ctx.config)
    _artifact_out(verdict, artifact)
    finish(ctx, verdict)


@main.command()
@click.argument("p")
@click.argument("s")
@click.option("--skip-disjoint-gate", is_flag=True,
              help="Build the construction even for a non-disjoint S (for experiments).")
@click.option("--doc", help="Evaluate the canonical split-spanner on this document instead.")
@pass_ctx
def canonical(ctx, p, s, skip_disjoint_gate, doc):
    """Print the canonical split-spanner of P and S."""
    a = dec.canonical_split_spanner(ctx.load(p), ctx.load(s),
                                    skip_disjoint_gate=skip_disjoint_gate, config=ctx.config)
    if doc is not None:
        check_document(doc, a.sigma)
        emit({"tuples": _tuples(evaluate(a, doc, ctx.config.result_cap))}, ctx.pretty)
    else:
        emit(to_json(a), ctx.pretty)


# --------------------------------------------------------------------------
# Splitter algebra

context_opt = click.option("--context", "context_path",
                           help="Variable-free spanner restricting the documents (default: all).")


@main.command("compose-splitters")
@click.argument("s1")
@click.argument("s2")
@click.option("--doc", help="Evaluate the composed splitter on this document instead.")
@pass_ctx
def compose_splitters_cmd(ctx, s1, s2, doc):
    """Print the splitter S1 composed with S2 (split by S2, then by S1)."""
    a = reasoning.compose_splitters(ctx.load(s1), ctx.load(s2))
    if doc is not None:
        check_document(doc, a.sigma)
        emit({"tuples": _tuples(evaluate(a, doc, ctx.config.result_cap))}, ctx.pretty)
    else:
        emit(to_json(a), ctx.pretty)


@main.command()
@click.argument("s1")
@click.argument("s2")
@context_opt
@pass_ctx
def commute(ctx, s1, s2, context_path):
    """Do S1 and S2 commute on the context documents?"""
    r = ctx.load(context_path) if context_path else None
    finish(ctx, reasoning.commute(ctx.load(s1), ctx.load(s2), r, ctx.config))


@main.command()
@click.argument("s")
@click.argument("s_prime")
@context_opt
@pass_ctx
def subsume(ctx, s, s_prime, context_path):
    """Is S equal to S_PRIME composed with S on the context documents?"""
    r = ctx.load(context_path) if context_path else None
    finish(ctx, reasoning.subsume(ctx.load(s), ctx.load(s_prime), r, ctx.config))


@main.command()
@click.argument("p")
@click.argument("s1")
@click.argument("s2")
@click.option("--verify", is_flag=True, help="Also run the direct check on an inferred answer.")
@pass_ctx
def transitivity(ctx, p, s1, s2, verify):
    """Is P self-splittable by S2, inferring through S1 when possible?"""
    finish(ctx, reasoning.transitivity_infer(ctx.load(p), ctx.load(s1), ctx.load(s2),
                                             ctx.config, verify=verify))


# --------------------------------------------------------------------------
# Extensions

@main.command("filter-split-correct")
@click.argument("p")
@click.argument("ps")
@click.argument("s")
@pass_ctx
def filter_split_correct_cmd(ctx, p, ps, s):
    """Is P equal to PS composed with S filtered to the documents where P selects something?"""
    finish(ctx, ext.split_correct_with_filter(ctx.load(p), ctx.load(ps), ctx.load(s), ctx.config))


@main.command()
@click.argument("signature", type=click.Path(exists=True, dir_okay=False))
@click.argument("constraints", type=click.Path(exists=True, dir_okay=False))
@click.argument("alpha")
@click.argument("s")
@pass_ctx
def blackbox(ctx, signature, constraints, alpha, s):
    """Sufficient condition for split-correctness of a join of black boxes."""
    sig = ext.parse_signature(Path(signature).read_text(encoding="utf-8"))
    base = Path(constraints).parent
    table: dict[str, list[VSetAutomaton]] = {}
    for name, file in ext.parse_constraints(Path(constraints).read_text(encoding="utf-8")):
        path = Path(file) if Path(file).is_absolute() else base / file
        table.setdefault(name, []).append(ctx.load(str(path)))
    finish(ctx, ext.blackbox_infer(sig, table, ctx.load(alpha), ctx.load(s), ctx.config))


@main.command()
@click.argument("s")
@pass_ctx
def highlander(ctx, s):
    """Is the annotated splitter S disjoint with one key per span?"""
    finish(ctx, ext.is_highlander(ctx.load(s), ctx.config))


def _mapping(ctx, items) -> dict:
    mapping = {}
    for item in items:
        key, sep, path = item.partition("=")
        if not sep or not key:
            raise click.UsageError(f"--key expects KEY=FILE, got {item!r}")
        mapping[key] = ctx.load(path)
    return mapping


@main.command("annotated-split-correct")
@click.argument("p")
@click.argument("s")
@click.option("--key", "keys", multiple=True, required=True, metavar="KEY=FILE",
              help="Split-spanner used for splits with this key (repeatable).")
@certify
@pass_ctx
def annotated_split_correct_cmd(ctx, p, s, keys, certify_dfvsa):
    """Is P equal to the key-wise composition of the given spanners with S?"""
    fn = ext.annotated_split_correct_ptime if certify_dfvsa else ext.annotated_split_correct
    finish(ctx, fn(ctx.load(p), _mapping(ctx, keys), ctx.load(s), ctx.config))


@main.command("annotated-splittable")
@click.argument("p")
@click.argument("s")
@pass_ctx
def annotated_splittable_cmd(ctx, p, s):
    """Is there a key-to-spanner mapping splitting P by the highlander splitter S?"""
    finish(ctx, ext.annotated_splittable(ctx.load(p), ctx.load(s), ctx.config))


# --------------------------------------------------------------------------
# Oracle

BOUNDED_CHECKS = ["cover", "disjoint", "equiv", "split-correct", "split-condition", "refute-splittable"]


@main.command("oracle-check")
@click.option("--trials", type=int, help="Random instances (default: config oracle_trials).")
@click.option("--jobs", type=int, default=1, show_default=True, help="Worker processes.")
@click.option("--check", type=click.Choice(BOUNDED_CHECKS),
              help="Run one bounded check on the given files instead of the random corpus.")
@click.option("--bound", type=int, help="Document length bound (default: config oracle_doc_len).")
@click.argument("files", nargs=-1)
@pass_ctx
def oracle_check(ctx, trials, jobs, check, bound, files):
    """Compare the decision procedures with brute force.

    Without --check, runs the seeded random agreement corpus. With --check,
    FILES are the inputs of that check (e.g. P S for cover). A bounded check
    never says "yes": it reports a counterexample or none up to the bound.
    """
    bound = bound or ctx.config.oracle_doc_len
    if check is None:
        if files:
            raise click.UsageError("files are only used together with --check")
        report = oracle.run_agreement(trials or ctx.config.oracle_trials, ctx.config.seed, jobs)
        emit(report, ctx.pretty)
        sys.exit(EXIT_NO if report["discrepancies"] else EXIT_YES)
    arity = {"cover": 2, "disjoint": 1, "equiv": 2, "split-correct": 3,
             "split-condition": 2, "refute-splittable": 2}[check]
    if len(files) != arity:
        raise click.UsageError(f"--check {check} takes {arity} file(s)")
    autos = [ctx.load(f) for f in files]
    fn = {"cover": oracle.bounded_cover, "disjoint": oracle.bounded_disjoint,
          "equiv": oracle.bounded_equivalence, "split-correct": oracle.bounded_split_correct,
          "split-condition": oracle.bounded_split_condition,
          "refute-splittable": oracle.bounded_splittable_refutation}[check]
    report = fn(*autos, bound=bound, seed=ctx.config.seed)
    emit(report.to_json(), ctx.pretty)
    sys.exit(EXIT_NO if report.found else EXIT_YES)


def _dfa_json(d: oracle.Dfa) -> dict:
    return {"states": d.states, "initial": d.initial, "finals": sorted(d.finals),
            "delta": [[q, ch, r] for (q, ch), r in sorted(d.delta.items())]}


@main.command("gen-gadget")
@click.option("-n", "n", type=click.IntRange(1, 4), default=2, show_default=True,
              help="Number of DFAs.")
@click.option("--max-states", type=click.IntRange(1, 6), default=3, show_default=True)
@click.option("--sigma", default="ab", show_default=True)
@click.option("--out-dir", type=click.Path(file_okay=False),
              help="Write A, A', P, S and PS as automaton JSON files here.")
@pass_ctx
def gen_gadget(ctx, n, max_states, sigma, out_dir):
    """Random DFA family and its union-universality reduction gadgets."""
    rng = random.Random(ctx.config.seed)
    dfas = [oracle.random_dfa(rng, sigma, max_states) for _ in range(n)]
    g = oracle.gen_union_universality(n, dfas, sigma)
    autos = {"A": g.a, "A_prime": g.a_prime, "P": g.p, "S": g.s, "PS": g.ps}
    if out_dir:
        Path(out_dir).mkdir(parents=True, exist_ok=True)
        for name, a in autos.items():
            (Path(out_dir) / f"{name}.json").write_text(
                json.dumps(to_json(a), sort_keys=True) + "\n", encoding="utf-8")
    emit({"seed": ctx.config.seed, "dfas": [_dfa_json(d) for d in dfas], "pad": g.pad,
          "universal": g.universal, "missing_word": g.missing_word,
          "automata": {k: to_json(a) for k, a in autos.items()}}, ctx.pretty)


if __name__ == "__main__":
    main()
