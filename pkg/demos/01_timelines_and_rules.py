"""
Timelines, synchronization rules and the future semantics
==========================================================

A state variable, a timeline for it, and a few rules checked by the
validator.  All times are exact fractions.
"""

from fractions import Fraction

from densetp import (
    Domain, Event, ExistentialStatement, Interval, IntervalAtom, PointAtom, Quantifier,
    StateVariable, Timeline, Token, TriggerRule, brute_force_satisfies, check_timeline,
    is_plan, satisfies_rule, token_times,
)

# x moves a -> b -> c -> b -> c ...; every value has a duration window
x = StateVariable(
    "x", ("a", "b", "c"),
    {"a": ("b",), "b": ("c",), "c": ("b",)},
    {"a": Interval.closed(5, 8), "b": Interval.closed(1, 4), "c": Interval.at_least(2)},
)

# durations are fractions, so 3.9 is written 39/10
tl = Timeline("x", (Token("a", 7), Token("b", 3), Token("c", Fraction(39, 10))))
for tok, (s, e) in zip(tl.tokens, token_times(tl)):
    print(f"{tok.value}: [{s}, {e}]")
print("timeline problems:", check_timeline(x, tl))
print("a token of length 4:", check_timeline(x, Timeline("x", (Token("a", 4),))).message)

# every c token starts exactly when some b token ends
S, E = Event.START, Event.END
rule = TriggerRule(
    Quantifier("o", "x", "c"),
    (ExistentialStatement((Quantifier("p", "x", "b"),),
                          (IntervalAtom("p", E, "o", S, Interval.closed(0, 0)),)),),
)
plan = {"x": tl}
print("rule holds:", satisfies_rule(plan, rule).verdict)
late = {"x": Timeline("x", (Token("a", 7), Token("b", 3), Token("c", 2), Token("b", 1), Token("c", 2)))}
print("and on a longer timeline:", satisfies_rule(late, rule).verdict)

# the same rule with a point atom: the first token ends by time 10
deadline = TriggerRule(Quantifier("o", "x", "a"),
                       (ExistentialStatement((), (PointAtom("o", E, 10, Interval.closed(0, 3)),)),))
print("a ends within [7, 10]:", satisfies_rule(plan, deadline).verdict)

# Standard and future semantics differ when the witness lies in the past.
y = StateVariable("y", ("a", "b"), {"a": ("b",), "b": ()},
                  {"a": Interval.at_least(0), "b": Interval.at_least(0)})
past = TriggerRule(Quantifier("o", "y", "b"),
                   (ExistentialStatement((Quantifier("p", "y", "a"),),
                                         (IntervalAtom("p", S, "o", S, Interval.at_least(0)),)),))
ab = {"y": Timeline("y", (Token("a", 1), Token("b", 1)))}
domain = Domain((y,), (past,))
for semantics in ("standard", "future"):
    report = is_plan(domain, ab, semantics)
    oracle = brute_force_satisfies(ab, past, semantics)
    print(f"{semantics:>8}: {report.summary().splitlines()[0]} (exhaustive check: {oracle})")
