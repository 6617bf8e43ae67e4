"""
Acceptance criteria, one test per criterion.

Each test records a single PASS/FAIL line, printed in the pytest terminal
summary (and on stdout when run with ``-s`` or as a script).
"""
import random
import time
from functools import lru_cache

from conftest import ACCEPTANCE_LINES
from shuffling.derivation import (
    AppRule, Ax, LamRule, check, derive_empty, min_derivation_normal, pull_back,
    subject_expand, subject_reduce,
)
from shuffling.harness import (
    bundled_corpus_path, check_counterexample, check_plotkin_closed, derivations_for,
    load_corpus, normal_terms, random_closed_term, random_term,
)
from shuffling.multitypes import ZERO, Environment
from shuffling.reduction import (
    SIGMA_ONLY, BudgetExceeded, Mode, RedexKind, ReductionStep, balanced_size,
    enumerate_sequences, explore, find_redexes, normalize,
)
from shuffling.search import find_smaller, search_derivations
from shuffling.semantics import NonEmpty, Unknown, is_nonempty_semi
from shuffling.terms import I, Var, is_value, parse, term_size

FUEL = 10000
GRAPH_DEPTH = 200
GRAPH_NODES = 20000


def P(src):
    return parse(src, constants=True)


T_EQ1 = P(r"(\y.D)(z I) D")
U_EQ1 = P(r"D ((\y.D)(z I))")
CRITICAL = P(r"(\y.y')(D (x I)) I")


def record(number, title, ok, detail=""):
    line = f"criterion {number:2d} [{'PASS' if ok else 'FAIL'}] {title}"
    if detail:
        line += f"  ({detail})"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


@lru_cache(maxsize=None)
def corpus():
    """Bundled terms, random closed terms and random open terms."""
    terms = list(load_corpus(bundled_corpus_path()))
    rng = random.Random(0)
    terms += [random_closed_term(rng, 10) for _ in range(300)]
    rng = random.Random(1)
    terms += [random_term(rng, 12) for _ in range(200)]
    return tuple(terms)


@lru_cache(maxsize=None)
def normalized(t):
    return normalize(t, Mode.BALANCED, FUEL)


def test_criterion_01_size_example():
    pi_i = LamRule("x", Var("x"), ())
    pi_ii = AppRule(LamRule("x", Var("x"), (Ax("x", ZERO),)), pi_i)
    j_i, j_ii = check(pi_i), check(pi_ii)
    root = ReductionStep((), RedexKind.BETA_V)
    reduced = subject_reduce(pi_ii, root)
    expanded = subject_expand(pi_i, P("I I"), root)
    ok = (
        (j_i.env, j_i.subject, j_i.type) == (Environment(), I, ZERO)
        and (j_ii.env, j_ii.subject, j_ii.type) == (Environment(), P("I I"), ZERO)
        and pi_i.size == 0 and pi_ii.size == 1
        and reduced == pi_i
        and expanded.size == 1 and check(expanded) == j_ii
    )
    record(1, "size example: |pi_II| = 1, |pi_I| = 0, reduce/expand", ok,
           f"sizes {pi_ii.size} -> {reduced.size} -> {expanded.size}")


def test_criterion_02_counterexample():
    report = check_counterexample()
    ok = report.passed and report.notes == ["size=2 point_size=1"]
    record(2, "counterexample: derivation size 2 > point size 1", ok, report.notes[0])


def test_criterion_03_quantitative_subject_reduction():
    start = time.perf_counter()
    rng = random.Random(2024)
    pairs = failures = 0
    kinds = {k: 0 for k in RedexKind}
    while pairs < 1500:
        t = random_closed_term(rng, 10) if rng.random() < 0.4 else random_term(rng, 12)
        seq = normalize(t, Mode.BALANCED, 200)
        if not seq.normal:
            continue
        for pi0 in derivations_for(seq.final, rng):
            chain = [pi0]
            for i in range(len(seq.steps) - 1, -1, -1):
                chain.append(subject_expand(chain[-1], seq.terms[i], seq.steps[i][0]))
            for d in chain:
                j = check(d)
                for step in find_redexes(j.subject, Mode.BALANCED):
                    out = subject_reduce(d, step)
                    jo = check(out)
                    want = -1 if step.kind is RedexKind.BETA_V else 0
                    pairs += 1
                    kinds[step.kind] += 1
                    if out.size - d.size != want or (jo.env, jo.type) != (j.env, j.type):
                        failures += 1
    elapsed = time.perf_counter() - start
    ok = pairs >= 1000 and failures == 0 and elapsed < 30 and all(kinds.values())
    counts = ", ".join(f"{k.value}={n}" for k, n in kinds.items())
    record(3, "quantitative subject reduction: beta_v -1, sigma 0", ok,
           f"{pairs} pairs, {failures} failures, {counts}, {elapsed:.1f}s")


def _outcomes_by_paths(t):
    seqs = enumerate_sequences(t, Mode.BALANCED, fuel=GRAPH_DEPTH, max_sequences=20000)
    if not all(s.normal for s in seqs):
        return None
    return {(s.leng_betav, s.final) for s in seqs}


def test_criterion_04_same_number():
    start = time.perf_counter()
    failures = []
    crit = _outcomes_by_paths(CRITICAL)
    if crit is None or len(crit) != 1:
        failures.append(("critical pair", crit))
    checked = 0
    for t in corpus():
        if t.fv or term_size(t) > 10 or not normalized(t).normal:
            continue
        checked += 1
        graph = explore(t, Mode.BALANCED, GRAPH_DEPTH, max_nodes=GRAPH_NODES)
        if graph.has_incomplete_paths():
            failures.append((t, "incomplete enumeration"))
            continue
        outcomes = graph.outcomes()
        if len(outcomes) != 1:
            failures.append((t, outcomes))
        try:
            by_paths = _outcomes_by_paths(t)
        except BudgetExceeded:
            by_paths = None
        if by_paths is not None and by_paths != set(outcomes):
            failures.append((t, by_paths))
    elapsed = time.perf_counter() - start
    ok = not failures and checked > 100 and elapsed < 60
    record(4, "same number of beta_v steps and one normal form", ok,
           f"critical pair {len(crit or ())} outcome, {checked} closed terms, "
           f"{len(failures)} failures, {elapsed:.1f}s")


def test_criterion_05_number_steps():
    failures = checked = 0
    for t in corpus():
        seq = normalized(t)
        if not seq.normal:
            continue
        checked += 1
        pi0 = min_derivation_normal(seq.final)
        pi = pull_back(pi0, seq)
        if seq.leng_betav != pi.size - balanced_size(seq.final) or pi0.size != balanced_size(seq.final):
            failures += 1
        if check(pi).subject != t:
            failures += 1
    record(5, "leng = size(pi_min) - balanced size of the normal form", failures == 0 and checked > 0,
           f"{checked} normalizing terms, {failures} failures")


def test_criterion_06_value_theorem():
    failures = valued = closed = 0
    for t in corpus():
        seq = normalized(t)
        if not seq.normal:
            continue
        if not t.fv and not is_value(seq.final):
            failures += 1
        if is_value(seq.final):
            valued += 1
            d = derive_empty(t, FUEL)
            if d is None or d.size != seq.leng_betav:
                failures += 1
                continue
            j = check(d)
            if j.env or j.type or j.subject != t:
                failures += 1
        if not t.fv:
            closed += 1
            if not check_plotkin_closed(t, FUEL).passed:
                failures += 1
    record(6, "|- t : 0 derivation has size leng; beta_v-only agrees on closed terms",
           failures == 0 and valued > 0 and closed > 0,
           f"{valued} terms reaching values, {closed} closed, {failures} failures")


def test_criterion_07_characterization():
    failures = []
    for t in corpus():
        nonempty = isinstance(is_nonempty_semi(t, None, FUEL), NonEmpty)
        if nonempty != normalized(t).normal:
            failures.append(t)
        if nonempty:
            graph = explore(t, Mode.BALANCED, GRAPH_DEPTH, max_nodes=GRAPH_NODES)
            if graph.has_incomplete_paths():
                failures.append(t)
    unknown = all(isinstance(is_nonempty_semi(t, None, FUEL), Unknown)
                  for t in (T_EQ1, U_EQ1, P("D D")))
    loop = P(r"(\y.D D)(z I)")
    cycles_ok = True
    for t in (T_EQ1, U_EQ1):
        graph = explore(t, Mode.BALANCED, FUEL)
        cycle = graph.find_cycle()
        cycles_ok &= (not graph.truncated and not graph.normal_nodes() and cycle is not None
                      and loop in {graph.nodes[i] for i in cycle})
    ok = not failures and unknown and cycles_ok
    record(7, "nonempty semantics exactly on normalizing terms; premature terms loop", ok,
           f"{len(corpus())} terms, {len(failures)} failures, unknown={unknown}, cycle={cycles_ok}")


def test_criterion_08_sizes_lemma():
    rng = random.Random(8)
    failures = 0
    sizes = {}
    for t in normal_terms(rng, 500, max_balanced=5, min_balanced=1):
        b = balanced_size(t)
        sizes[b] = sizes.get(b, 0) + 1
        if find_smaller(t, b, cap=6) is not None:
            failures += 1
        if min_derivation_normal(t).size != b:
            failures += 1
    reference = (balanced_size(P(r"(\x.y y)(z z)")), balanced_size(P(r"(\x.\x'.y y)(z z)")))
    ok = failures == 0 and reference == (3, 2)
    record(8, "no derivation below the balanced size; minimum attained", ok,
           f"500 normal forms, balanced sizes {dict(sorted(sizes.items()))}, "
           f"{failures} failures, reference sizes {reference}")


def test_criterion_09_uniqueness_at_empty_type():
    failures = values = others = 0
    seen = set()
    for t in corpus():
        seq = normalized(t)
        for u in (t, seq.final if seq.normal else None):
            if u is None or u in seen or find_redexes(u):
                continue
            seen.add(u)
            found = search_derivations(u, ZERO, Environment(), cap=6)
            if is_value(u):
                values += 1
                if len(found) != 1 or found[0].size != 0:
                    failures += 1
            else:
                others += 1
                if found:
                    failures += 1
    record(9, "values have exactly one derivation at 0, other normal forms none",
           failures == 0 and values > 0 and others > 0,
           f"{values} values, {others} non-value normal forms, {failures} failures")


def test_criterion_10_general_properties():
    failures = 0
    for t in corpus():
        sigma = explore(t, Mode.BALANCED, GRAPH_DEPTH, SIGMA_ONLY, GRAPH_NODES)
        if sigma.has_incomplete_paths():
            failures += 1
        try:
            graph = explore(t, Mode.BALANCED, 50, max_nodes=GRAPH_NODES)
        except BudgetExceeded:
            continue
        normal = {graph.nodes[i] for i in graph.normal_nodes()}
        if len(normal) > 1:
            failures += 1
    record(10, "sigma-only terminates; balanced graphs confluent", failures == 0,
           f"{len(corpus())} terms, {failures} failures")


if __name__ == "__main__":
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except AssertionError:
                pass
