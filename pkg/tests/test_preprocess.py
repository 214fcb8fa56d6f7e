"""College fixing rules: frozen examples, soundness, model reduction."""

import pytest

from conftest import load
from stableadmit import (AlgorithmError, FixingResult, GenConfig, Instance,
                         LowerGroup, ModelError, apply_fixings,
                         build_classical, build_lower, enumerate_feasible,
                         enumerate_stable, fix_iterate, generate, must_close,
                         must_open)


def test_frozen_examples_single_college():
    i4 = load("I4")
    assert must_open(i4) == frozenset()
    assert must_close(i4) == frozenset({0})
    fixing = fix_iterate(i4)
    assert fixing.must_open == frozenset()
    assert fixing.must_close == frozenset({0})

    i4b = load("I4B")
    assert must_open(i4b) == frozenset({0})
    assert must_close(i4b, must_open(i4b)) == frozenset()
    fixing = fix_iterate(i4b)
    assert fixing.must_open == frozenset({0})
    assert fixing.must_close == frozenset()


def test_quota_free_markets_fix_everything_open():
    inst = load("TWO")
    fixing = fix_iterate(inst)
    assert fixing.must_open == frozenset(range(inst.m))
    assert fixing.must_close == frozenset()
    assert fixing.iterations == 1


def test_close_test_uses_the_open_fixed_set():
    inst = load("I8")
    opened = must_open(inst)
    assert opened == frozenset({1})
    assert must_close(inst, opened) == frozenset({2})
    # closing c3 redirects its applicant to c1, whose intake then
    # reaches the lower quota, so the second round also fixes c1 open
    fixing = fix_iterate(inst)
    assert fixing.must_open == frozenset({0, 1})
    assert fixing.must_close == frozenset({2})
    assert fixing.iterations == 2


def test_second_round_grows_the_open_set():
    fixing = fix_iterate(load("ROUNDS2"))
    assert fixing.iterations == 2
    (open1, close1), (open2, close2) = fixing.trace
    assert open1 == frozenset({0})
    assert close1 == close2 == frozenset({1})
    assert open2 == frozenset({0, 2})
    assert open1 < open2


def test_report_shape():
    report = fix_iterate(load("ROUNDS2")).to_report(load("ROUNDS2"))
    assert report == {
        "iterations": 2,
        "must_open": ["c1", "c3"],
        "must_close": ["c2"],
        "rounds": [
            {"open": ["c1"], "close": ["c2"]},
            {"open": ["c1", "c3"], "close": ["c2"]},
        ],
    }


def derived_flags(inst, sol):
    intake = sol.intake(inst)
    if sol.open_colleges:
        return {j: bool(sol.open_colleges.get(j, True)) for j in range(inst.m)}
    return {j: not (intake[j] == 0 and inst.colleges[j].lower > 0)
            for j in range(inst.m)}


def assert_fixing_sound(inst):
    fixing = fix_iterate(inst)
    for sol in enumerate_stable(inst, "lower").solutions:
        flags = derived_flags(inst, sol)
        assert all(flags[j] for j in fixing.must_open), inst.digest()
        assert not any(flags[j] for j in fixing.must_close), inst.digest()


def test_fixings_never_cut_a_stable_outcome_on_fixtures():
    for name in ("I4", "I4B", "I8", "ROUNDS2", "TWO"):
        assert_fixing_sound(load(name))


def test_fixings_never_cut_a_stable_outcome_on_generated_markets():
    for seed in range(50):
        inst = generate(GenConfig(n=5, m=2, seed=seed, list_range=(1, 2),
                                  max_score=5, lower_range=(0, 2)))
        assert_fixing_sound(inst)


def matchings(model):
    names = [v.name for v in model.vars_by_role("assign")]
    res = enumerate_feasible(model, names)
    assert not res.truncated
    return {frozenset(n for n in names if p[n] == 1) for p in res.projections}


@pytest.mark.parametrize("name", ["I4", "I4B", "I8", "ROUNDS2"])
def test_apply_fixings_preserves_the_feasible_matchings(name):
    inst = load(name)
    before = matchings(build_lower(inst))
    reduced = apply_fixings(build_lower(inst), fix_iterate(inst))
    assert matchings(reduced) == before


def test_fixing_refuses_ties_and_groups():
    with pytest.raises(AlgorithmError, match="tied"):
        fix_iterate(load("I3"))
    base = load("I4B")
    grouped = Instance(
        max_score=base.max_score,
        applicants=base.applicants,
        colleges=base.colleges,
        applications=base.applications,
        lower_quota_groups=(LowerGroup("g1", (0,), 2),),
    )
    grouped.validate()
    for fn in (must_open, must_close, fix_iterate):
        with pytest.raises(AlgorithmError, match="fixing rules do not apply"):
            fn(grouped)


def test_apply_fixings_rejects_bad_inputs():
    overlap = FixingResult(must_open=frozenset({0}), must_close=frozenset({0}),
                           iterations=1, trace=())
    with pytest.raises(ModelError, match="both open and closed"):
        apply_fixings(build_lower(load("I4")), overlap)
    fixing = fix_iterate(load("I4"))
    with pytest.raises(ModelError, match="no open variable"):
        apply_fixings(build_classical(load("I2")), fixing)
