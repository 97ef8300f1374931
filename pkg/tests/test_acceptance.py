"""Acceptance criteria, one test each.

Every test records a PASS or FAIL line (printed at the end of the session
by ``conftest.pytest_terminal_summary``) and then asserts the criterion.
"""
import random
import time

import pytest

from conftest import ACCEPTANCE
from elpp import (
    BOTTOM, GCI, TOP, Atomic, Conj, Exists, KnowledgeBase, Nominal, a_extend, normalize,
    parse_kb, validate,
)
from elpp.cdomains import RATIONALS, STRINGS
from elpp.classify import classify, replay_failures
from elpp.differential import case_rng, default_bound, run
from elpp.generate import CONCRETE, SMALL, Shape, benchmark_kb, random_kb, random_query
from elpp.oracle import entails
from elpp.pipeline import is_normal
from elpp.reasoner import check_subsumption, run_pipeline
from elpp.syntax import OntologyError, format_kb
from support import enumerate_strings, fuzz_input, holds, random_conjunction, sample_rationals
from test_pipeline import equal_up_to_renaming, fresh_labels

pytestmark = pytest.mark.acceptance

DIFFERENTIAL_CASES = 1000
DIFFERENTIAL_SEED = 20261016


def record(number: int, title: str, ok: bool, detail: str) -> None:
    line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {title} ({detail})"
    ACCEPTANCE[number] = line
    print(line)


def suite_kbs():
    """The knowledge bases and queries of the differential suite."""
    for i in range(DIFFERENTIAL_CASES):
        rng = case_rng(DIFFERENTIAL_SEED, i)
        kb = random_kb(rng, SMALL)
        yield kb, random_query(rng, kb)


def test_golden_classification(nominal_kb):
    start = time.perf_counter()
    state = classify(nominal_kb)
    seconds = time.perf_counter() - start
    X, A, b, c = Atomic("X"), Atomic("A"), Nominal("b"), Nominal("c")
    expected_s = {X: {TOP, X, b, c}, A: {TOP, A}, b: {TOP, b}, c: {TOP, c}}
    exact = all(state.S[k] == v for k, v in expected_s.items()) and state.R == {"r1": {(A, X)}}
    ok = exact and seconds < 1.0
    record(1, "golden classification reproduced exactly", ok,
           f"exact={exact}, {seconds * 1000:.1f} ms")
    assert ok


def test_differential_correctness():
    report = run(DIFFERENTIAL_CASES, seed=DIFFERENTIAL_SEED, shape=SMALL)
    ok = report.cases >= 1000 and not report.disagreements and report.seconds < 600
    record(2, "reasoner agrees with bounded countermodel search", ok,
           f"{report.cases} cases, {report.entailed} entailed, "
           f"{len(report.disagreements)} disagreements, {report.seconds:.1f} s")
    assert ok, [c.seed for c in report.disagreements]


def test_concrete_domain_deciders():
    start = time.perf_counter()
    rng = random.Random(7)
    violations = []
    counts = {}
    for dom, decider in (("Q", RATIONALS), ("S", STRINGS)):
        sat = unsat = 0
        for _ in range(500):
            atoms = random_conjunction(rng, dom)
            witness = decider.satisfiable(atoms)
            if witness is not None:
                sat += 1
                if not all(holds(a, witness) for a in atoms):
                    violations.append((dom, "witness", atoms))
            else:
                unsat += 1
                found = enumerate_strings(atoms) if dom == "S" else \
                    sample_rationals(atoms, rng, samples=10_000)
                if found is not None:
                    violations.append((dom, "refutation", atoms, found))
        counts[dom] = (sat, unsat)
    seconds = time.perf_counter() - start
    ok = not violations and seconds < 300
    record(3, "concrete-domain witnesses and refutations check out", ok,
           f"Q sat/unsat {counts['Q'][0]}/{counts['Q'][1]}, "
           f"S sat/unsat {counts['S'][0]}/{counts['S'][1]}, "
           f"{len(violations)} violations, {seconds:.1f} s")
    assert ok, violations[:3]


def test_normalization_suite():
    shapes = [SMALL, CONCRETE, Shape(depth=3, max_gcis=6, features=("f", "g"))]
    failures = []
    for i in range(1200):
        kb = random_kb(random.Random(f"nf-{i}"), shapes[i % 3])
        try:
            out = normalize(kb, debug=True)
        except AssertionError as exc:
            failures.append((i, str(exc)))
            continue
        if not is_normal(out):
            failures.append((i, "not normal"))
    golden = parse_kb("concept P Q E\nrole r s\naxiom ((exists r . P) and (exists s . Q)) <= E")
    out = normalize(golden, debug=True)
    expected = [GCI(Conj(Atomic("A"), Atomic("B'")), Atomic("E")),
                GCI(Exists("s", Atomic("Q")), Atomic("B'")),
                GCI(Exists("r", Atomic("P")), Atomic("A"))]
    golden_ok = equal_up_to_renaming(out.constraints, expected, fresh_labels(golden, out),
                                     ["A", "B'"])
    ok = not failures and golden_ok
    record(4, "normal form reached with strictly decreasing measure", ok,
           f"1200 kbs, {len(failures)} failures, modified NF2 golden={golden_ok}")
    assert ok, failures[:3]


def test_a_extension_equivalence():
    disagreements = []
    queries = 0
    for i in range(200):
        rng = random.Random(f"ax-{i}")
        kb = random_kb(rng, SMALL)
        a = rng.choice(sorted(kb.concepts))
        ext = a_extend(kb, a).kb
        for b in sorted(kb.concepts):
            x, y = Atomic(a), Atomic(b)
            before = entails(kb, x, y, default_bound(kb, x, y))
            after = entails(ext, x, y, default_bound(ext, x, y))
            queries += 1
            if before != after:
                disagreements.append((i, a, b))
    ok = not disagreements
    record(5, "A-extension preserves the oracle verdict", ok,
           f"200 kbs, {queries} queries, {len(disagreements)} disagreements")
    assert ok, disagreements[:3]


def test_trace_replay():
    entries = failed = 0
    for kb, (c, d) in suite_kbs():
        state = run_pipeline(kb, c, d).state
        entries += len(state.traces)
        failed += len(replay_failures(state))
    ok = failed == 0 and entries > 0
    record(6, "every derivation replays", ok,
           f"{entries} entries over {DIFFERENTIAL_CASES} queries, {failed} failures")
    assert ok


def test_benchmark_query():
    kb = benchmark_kb(seed=0, axioms=40)
    start = time.perf_counter()
    verdict = check_subsumption(kb, Atomic("C0"), Atomic("C1"))
    seconds = time.perf_counter() - start
    shape_ok = (len(kb.concepts), len(kb.roles), len(kb.individuals), len(kb.constraints)) \
        == (20, 10, 20, 40)
    ok = shape_ok and seconds < 5.0
    record(7, "benchmark query answered quickly", ok,
           f"20 concepts, 10 roles, 20 individuals, 40 axioms, holds={verdict.holds}, "
           f"{seconds:.2f} s")
    assert ok


def test_parser_robustness():
    rng = random.Random(99)
    crashes = []
    accepted = rejected = 0
    start = time.perf_counter()
    for i in range(100_000):
        source = fuzz_input(rng)
        try:
            kb = parse_kb(source)
        except OntologyError as exc:
            rejected += 1
            if not exc.diagnostics:
                crashes.append((i, "error without diagnostics"))
            continue
        except Exception as exc:  # anything else is a crash
            crashes.append((i, repr(exc)))
            continue
        accepted += 1
        if validate(kb) or parse_kb(format_kb(kb)) != kb:
            crashes.append((i, "accepted kb does not round-trip"))
    round_trip_failures = 0
    generated = 0
    for kb, _ in suite_kbs():
        generated += 1
        round_trip_failures += parse_kb(format_kb(kb)) != kb
    for i in range(500):
        generated += 1
        kb = random_kb(random.Random(f"rt-{i}"), CONCRETE)
        round_trip_failures += parse_kb(format_kb(kb)) != kb
    seconds = time.perf_counter() - start
    ok = not crashes and round_trip_failures == 0
    record(8, "parser never crashes and round-trips", ok,
           f"100000 fuzz inputs ({accepted} accepted, {rejected} rejected), "
           f"{len(crashes)} crashes, {generated} generated kbs, "
           f"{round_trip_failures} round-trip failures, {seconds:.1f} s")
    assert ok, crashes[:3]
