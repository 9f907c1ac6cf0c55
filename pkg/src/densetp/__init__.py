"""Timeline-based planning over dense time.

Modelling and validation of planning domains with synchronization rules
(standard and future semantics), the two-counter machine reduction with
witness generation, and bounded plan synthesis over difference constraints.
"""

from .constraints import Constraint, ConstraintSystem, feasible
from .minsky import Computation, Configuration, Machine, Transition, run, step, validate_machine
from .model import (
    Domain, Event, ExistentialStatement, Interval, IntervalAtom, PointAtom, Quantifier,
    StateVariable, Timeline, Token, TriggerlessRule, TriggerRule, check_timeline, futurize,
    interval_contains, is_zero_infty, token_times, well_formed_rule,
)
from .reduction import (
    check_well_formed_code, compile_machine, decode, encode_computation, generate_witness,
    mutate_witness,
)
from .render import render_svg
from .solver import atoms_to_constraints, bounded_solve
from .validator import FUTURE, STANDARD, brute_force_satisfies, is_plan, satisfies_rule

__version__ = "0.1.0"
