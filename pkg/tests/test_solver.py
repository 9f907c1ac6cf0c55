import random
import time
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from helpers import M1, M2, exhaustive_plan_exists, random_small_domain
from densetp.constraints import Constraint, feasible
from densetp.model import (
    Domain, Event, ExistentialStatement, Interval, IntervalAtom, PointAtom, Quantifier, StateVariable,
    TriggerlessRule, TriggerRule, ZERO_INF,
)
from densetp.reduction import check_well_formed_code, compile_machine, decode, timeline_word
from densetp.solver import Choice, atoms_to_constraints, bounded_solve, enumerate_skeletons, event_var
from densetp.validator import FUTURE, STANDARD, is_plan

S, E = Event.START, Event.END
POS = Interval(0, None, False)


def two_token_domain(atoms):
    x = StateVariable("x", ("a", "b"), {"a": ("b",), "b": ()}, {"a": POS, "b": POS})
    rule = TriggerRule(Quantifier("o", "x", "a"), (ExistentialStatement((Quantifier("o2", "x", "b"),), atoms),))
    return Domain((x,), (rule,))


def test_atom_translation_examples():
    domain = two_token_domain((IntervalAtom("o", S, "o2", S, Interval.at_least(1)),))
    sk = {"x": ("a", "b")}
    choice = Choice(0, 0, 0, {"o": ("x", 0), "o2": ("x", 1)})
    cs = atoms_to_constraints(domain, sk, [choice])
    so, so2 = event_var(("x", 0), S), event_var(("x", 1), S)
    assert Constraint(so, so2, -1) in cs.constraints
    assert not any(c.x == so2 and c.y == so for c in cs.constraints)
    # strict time monotonicity of ]0,inf[
    assert Constraint(event_var(("x", 0), S), event_var(("x", 0), E), 0, True) in cs.constraints


def test_punctual_pair_forces_one():
    atoms = (IntervalAtom("o", S, "o2", S, Interval.at_least(1)), IntervalAtom("o", S, "o2", S, Interval.closed(0, 1)))
    domain = two_token_domain(atoms)
    choice = Choice(0, 0, 0, {"o": ("x", 0), "o2": ("x", 1)})
    cs = atoms_to_constraints(domain, {"x": ("a", "b")}, [choice])
    sol = feasible(cs)
    assert sol[event_var(("x", 1), S)] - sol[event_var(("x", 0), S)] == 1


def test_choice_validation():
    domain = two_token_domain(())
    sk = {"x": ("a", "b")}
    with pytest.raises(ValueError):
        atoms_to_constraints(domain, sk, [])
    with pytest.raises(ValueError):
        atoms_to_constraints(domain, sk, [Choice(0, 0, 0, {"o": ("x", 0), "o2": ("x", 0)})])
    with pytest.raises(ValueError):
        atoms_to_constraints(domain, sk, [Choice(0, 0, 3, {"o": ("x", 0), "o2": ("x", 1)})])


def test_bounded_solve_simple():
    y = StateVariable("y", ("a", "b"), {"a": ("b",), "b": ()},
                      {"a": Interval.closed(1, 2), "b": Interval.closed(1, 2)})
    domain = Domain((y,), (TriggerlessRule((ExistentialStatement((Quantifier("o", "y", "b"),)),)),))
    plan = bounded_solve(domain, 2)
    assert plan is not None and "b" in plan["y"].values
    assert is_plan(domain, plan)
    assert bounded_solve(domain, 2, FUTURE) is not None


def test_bounded_solve_m2_is_none():
    t = time.perf_counter()
    assert bounded_solve(compile_machine(M2), 20, FUTURE) is None
    assert time.perf_counter() - t < 10


def test_bounded_solve_m1_finds_halting_code():
    domain = compile_machine(M1)
    plan = bounded_solve(domain, 16, FUTURE)
    assert plan is not None and is_plan(domain, plan, FUTURE)
    word = timeline_word(plan)
    assert check_well_formed_code(M1, word).ok
    assert [c.counters for c in decode(word)] == [(0, 0), (1, 0), (0, 0)]


def test_bound_too_small_for_m1():
    assert bounded_solve(compile_machine(M1), 15, FUTURE) is None


def test_point_atoms_pin_times():
    x = StateVariable("x", ("a",), {"a": ("a",)}, {"a": POS})
    rule = TriggerlessRule((ExistentialStatement((Quantifier("o", "x", "a"),),
                                                 (PointAtom("o", S, 3, Interval.closed(0, 0), token_first=False),)),))
    plan = bounded_solve(Domain((x,), (rule,)), 3)
    assert len(plan["x"].tokens) == 2 and plan["x"].tokens[0].duration == 3


def test_skeleton_order_is_shortest_first():
    x = StateVariable("x", ("a", "b"), {"a": ("a", "b"), "b": ("a",)}, {"a": ZERO_INF, "b": ZERO_INF})
    sks = list(enumerate_skeletons(Domain((x,), ()), 3))
    assert [len(s["x"]) for s in sks] == sorted(len(s["x"]) for s in sks)
    assert sks[:2] == [{"x": ("a",)}, {"x": ("b",)}]
    assert len(sks) == len({tuple(s["x"]) for s in sks})


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_small_completeness_and_soundness(seed):
    rng = random.Random(seed)
    domain = random_small_domain(rng)
    bound = rng.randint(1, 4)
    sem = rng.choice([STANDARD, FUTURE])
    plan = bounded_solve(domain, bound, sem)
    assert (plan is not None) == exhaustive_plan_exists(domain, bound, sem)
    if plan is not None:
        assert is_plan(domain, plan, sem)
        assert all(len(tl.tokens) <= bound for tl in plan.values())
        assert bounded_solve(domain, bound + 1, sem) is not None


def test_unknown_semantics():
    with pytest.raises(ValueError):
        bounded_solve(two_token_domain(()), 2, "eventually")
