"""Smaller-scale runs of the randomized law suites.  The acceptance tests
run the same suites at full scale; these exist so a law regression fails
fast and close to the code."""

import random

import pytest

from conftest import load_scenario

import chainmail.assertions as A
from chainmail import BoundsExceeded, EvalContext, record_trace, sat
from chainmail.checker import (
    check_equivalence,
    check_linking_laws,
    run_classical_suite,
    run_equivalence_suite,
    run_property_suites,
)
from chainmail.corpus import scenarios
from chainmail.samplers import random_assertion, random_context


def assert_all_ok(reports):
    for r in reports:
        assert r.ok, f"{r.law}: {r.failures[:3]}"


def test_equivalence_suite_small():
    reports = run_equivalence_suite(trials=40, seed=5)
    assert len(reports) == 13
    assert_all_ok(reports)


def test_classical_suite_small():
    reports = run_classical_suite(trials=40, seed=5)
    assert len(reports) == 5
    assert_all_ok(reports)


def test_linking_laws_small():
    reports = check_linking_laws(trials=40, seed=5)
    assert len(reports) == 4
    assert_all_ok(reports)
    stepped = next(r for r in reports if r.law.startswith("steps preserved"))
    # the word in parentheses counts instances that actually stepped
    assert int(stepped.law.split("(")[1].split()[0]) > 0


def test_property_entry_point_collects_everything():
    reports = run_property_suites(trials=10, seed=1)
    assert len(reports) == 13 + 5 + 4
    assert_all_ok(reports)


def test_twin_generators_make_both_sides_draw_the_same_instance():
    draw = lambda ctx, rng: random_assertion(rng, ctx, 2)
    double_neg = lambda ctx, rng: A.Not(A.Not(random_assertion(rng, ctx, 2)))
    report = check_equivalence(draw, double_neg, trials=60, seed=11, law="~~A is A")
    assert report.ok


def test_the_harness_can_actually_fail():
    draw = lambda ctx, rng: random_assertion(rng, ctx, 2)
    negated = lambda ctx, rng: A.Not(random_assertion(rng, ctx, 2))
    report = check_equivalence(draw, negated, trials=40, seed=11, law="A is not ~A")
    assert len(report.failures) == 40


@pytest.mark.parametrize("sc", scenarios(), ids=[s["name"] for s in scenarios()])
def test_negation_flips_satisfaction_along_corpus_runs(sc):
    internal, external, spec, driver = load_scenario(sc)
    trace = record_trace(internal, external, driver)
    rng = random.Random(hash(sc["name"]) & 0xFFFF)
    for position in range(len(trace.externals)):
        for _ in range(3):
            ctx = EvalContext.at(trace, position)
            a = random_assertion(rng, ctx, depth=2)
            try:
                holds = sat(ctx, a)
                negated = sat(EvalContext.at(trace, position), A.Not(a))
            except BoundsExceeded:
                continue
            assert holds != negated
