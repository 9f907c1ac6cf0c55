"""
Bounded plan synthesis over difference constraints
===================================================

Planning with these rules is undecidable in general, so the solver only
searches plans with a bounded number of tokens per timeline.  Each
candidate reduces to a system of difference constraints.
"""

import time

from densetp import (
    ConstraintSystem, Domain, ExistentialStatement, Interval, Quantifier, StateVariable,
    TriggerlessRule, bounded_solve, compile_machine, decode, feasible, is_plan,
)
from densetp.minsky import Machine, Transition
from densetp.reduction import timeline_word

# x - y <= c and x - y < c; strictness is tracked exactly
cs = ConstraintSystem()
cs.add("zero", "a", 0, strict=True)   # 0 < a
cs.add("a", "b", 0, strict=True)      # a < b
cs.add("b", "zero", 1)                # b <= 1
print("solution:", {k: str(v) for k, v in feasible(cs).items()})
cs.add("b", "a", 0)                   # b <= a closes a cycle of weight 0 with a strict edge
print("after b <= a:", feasible(cs))

# a tiny domain: reach a b token
y = StateVariable("y", ("a", "b"), {"a": ("b",), "b": ()},
                  {"a": Interval.closed(1, 2), "b": Interval.closed(1, 2)})
goal = TriggerlessRule((ExistentialStatement((Quantifier("o", "y", "b"),)),))
domain = Domain((y,), (goal,))
plan = bounded_solve(domain, 2)
print("\nplan for the small domain:", [(t.value, str(t.duration)) for t in plan["y"].tokens])
print("validator:", is_plan(domain, plan).verdict)

# the compiled machine needs 16 tokens; one fewer is not enough
T = Transition
m1 = Machine("qi", "qh", (T("qi", "inc", 1, "q1"), T("q1", "dec", 1, "q2"), T("q2", "zero", 1, "qh")))
d1 = compile_machine(m1)
for bound in (15, 16):
    t = time.perf_counter()
    plan = bounded_solve(d1, bound, "future")
    took = time.perf_counter() - t
    if plan is None:
        print(f"bound {bound}: no plan ({took:.2f}s)")
    else:
        print(f"bound {bound}: plan decoding to {[str(c) for c in decode(timeline_word(plan))]} ({took:.2f}s)")

# a machine that never halts compiles to a domain without plans
m2 = Machine("qi", "qh", (T("qi", "inc", 1, "q1"), T("q1", "inc", 1, "q1")))
print("non-halting machine, bound 20:", bounded_solve(compile_machine(m2), 20, "future"))
