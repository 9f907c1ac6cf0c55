"""Checking multi-timelines against synchronization rules.

Satisfaction is decided by backtracking over the quantified token names of
each existential statement.  :func:`brute_force_satisfies` enumerates every
assignment instead and computes event times on its own; it exists as a
testing oracle.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .model import (
    Domain, Event, ExistentialStatement, IntervalAtom, MultiTimeline, PointAtom,
    Rule, TriggerRule, Violation, check_timeline, futurize, interval_contains,
    token_times,
)

__all__ = [
    "STANDARD", "FUTURE", "TokenRef", "Assignment", "UnboundNameError",
    "CapExceededError", "RuleOutcome", "ValidationReport", "atom_satisfied",
    "satisfies_existential", "satisfies_rule", "is_plan", "brute_force_satisfies",
]

STANDARD = "standard"
FUTURE = "future"
_SEMANTICS = (STANDARD, FUTURE)

# (variable name, token position)
TokenRef = Tuple[str, int]
Assignment = Dict[str, TokenRef]


class UnboundNameError(KeyError):
    """An atom mentions a token name the assignment does not bind."""


class CapExceededError(RuntimeError):
    """The brute-force oracle was asked to enumerate too many assignments."""


@dataclass(frozen=True)
class RuleOutcome:
    rule_index: int
    satisfied: bool
    failed_position: Optional[int] = None   # first trigger token without a witness


@dataclass(frozen=True)
class ValidationReport:
    verdict: bool
    rules: Tuple[RuleOutcome, ...] = ()
    timeline_violations: Tuple[Tuple[str, Violation], ...] = ()

    def __bool__(self) -> bool:
        return self.verdict

    def summary(self) -> str:
        lines = [f"verdict: {'accepted' if self.verdict else 'rejected'}"]
        for var, v in self.timeline_violations:
            lines.append(f"timeline {var}: {v.kind} violation: {v.message}")
        for r in self.rules:
            if not r.satisfied:
                where = "" if r.failed_position is None else f" (trigger token {r.failed_position})"
                lines.append(f"rule {r.rule_index}: violated{where}")
        return "\n".join(lines)


def _check_semantics(semantics: str) -> None:
    if semantics not in _SEMANTICS:
        raise ValueError(f"semantics must be one of {_SEMANTICS}, got {semantics!r}")


class _Times:
    """Lazily computed start/end times per timeline."""

    def __init__(self, plan: MultiTimeline):
        self._plan = plan
        self._cache: Dict[str, List[Tuple[Fraction, Fraction]]] = {}

    def __call__(self, ref: TokenRef, event: Event) -> Fraction:
        var, i = ref
        times = self._cache.get(var)
        if times is None:
            times = self._cache[var] = token_times(self._plan[var])
        return times[i][0] if event is Event.START else times[i][1]


def _eval_atom(atom, assignment: Mapping[str, TokenRef], times: _Times) -> bool:
    try:
        if isinstance(atom, IntervalAtom):
            diff = times(assignment[atom.right], atom.right_event) - times(assignment[atom.left], atom.left_event)
        else:
            t = times(assignment[atom.token], atom.event)
            diff = atom.bound - t if atom.token_first else t - atom.bound
    except KeyError as exc:
        raise UnboundNameError(f"atom {atom} uses unbound token name {exc.args[0]!r}") from None
    return interval_contains(atom.interval, diff)


def atom_satisfied(atom, assignment: Mapping[str, TokenRef], plan: MultiTimeline) -> bool:
    """Evaluate one atom under ``assignment``; unbound names raise :class:`UnboundNameError`."""
    return _eval_atom(atom, assignment, _Times(plan))


def _candidates(plan: MultiTimeline, variable: str, value: str) -> List[int]:
    tl = plan.get(variable)
    if tl is None:
        return []
    return [i for i, tok in enumerate(tl.tokens) if tok.value == value]


def _search(plan: MultiTimeline, stmt: ExistentialStatement, fixed: Mapping[str, TokenRef],
            times: _Times) -> Optional[Assignment]:
    quants = [(q, _candidates(plan, q.variable, q.value)) for q in stmt.quantifiers]
    if any(not cands for _, cands in quants):
        return None
    # smallest candidate sets first; sort is stable so ties keep declaration order
    quants.sort(key=lambda qc: len(qc[1]))
    order = [q.name for q, _ in quants]
    known = set(fixed)
    for name in stmt.free_names():
        if name not in known:
            raise UnboundNameError(f"free token name {name!r} is not bound")

    # atoms become checkable at the depth where their last name gets bound
    depth_of = {name: 0 for name in fixed}
    for d, name in enumerate(order, start=1):
        depth_of[name] = d
    checks: List[List] = [[] for _ in range(len(order) + 1)]
    for atom in stmt.atoms:
        checks[max(depth_of[n] for n in atom.names)].append(atom)

    assignment: Assignment = dict(fixed)
    if not all(_eval_atom(a, assignment, times) for a in checks[0]):
        return None

    def extend(depth: int) -> bool:
        if depth == len(order):
            return True
        q, cands = quants[depth]
        for pos in cands:
            assignment[q.name] = (q.variable, pos)
            if all(_eval_atom(a, assignment, times) for a in checks[depth + 1]) and extend(depth + 1):
                return True
        del assignment[q.name]
        return False

    return assignment if extend(0) else None


def satisfies_existential(plan: MultiTimeline, stmt: ExistentialStatement,
                          fixed: Optional[Mapping[str, TokenRef]] = None) -> Optional[Assignment]:
    """Extend ``fixed`` to a satisfying assignment of ``stmt``'s quantifiers, or return None.

    The search is complete: None means no extension exists.
    """
    return _search(plan, stmt, dict(fixed or {}), _Times(plan))


def _rule_outcome(plan: MultiTimeline, rule: Rule, semantics: str, index: int,
                  times: _Times) -> RuleOutcome:
    if semantics == FUTURE:
        rule = futurize(rule)
    if isinstance(rule, TriggerRule):
        trig = rule.trigger
        for pos in _candidates(plan, trig.variable, trig.value):
            fixed = {trig.name: (trig.variable, pos)}
            if not any(_search(plan, d, fixed, times) is not None for d in rule.disjuncts):
                return RuleOutcome(index, False, pos)
        return RuleOutcome(index, True)
    ok = any(_search(plan, d, {}, times) is not None for d in rule.disjuncts)
    return RuleOutcome(index, ok)


def satisfies_rule(plan: MultiTimeline, rule: Rule, semantics: str = STANDARD) -> ValidationReport:
    """Decide one rule.  Under ``"future"`` semantics the futurized rule is evaluated."""
    _check_semantics(semantics)
    outcome = _rule_outcome(plan, rule, semantics, 0, _Times(plan))
    return ValidationReport(outcome.satisfied, (outcome,))


def is_plan(domain: Domain, plan: MultiTimeline, semantics: str = STANDARD) -> ValidationReport:
    """Check every timeline against its variable and every rule of ``domain``."""
    _check_semantics(semantics)
    if set(plan) != set(domain.variable_names):
        raise ValueError(
            f"plan variables {sorted(plan)} do not match domain variables {sorted(domain.variable_names)}")
    violations = []
    for var in domain.variables:
        problem = check_timeline(var, plan[var.name])
        if problem is not None:
            violations.append((var.name, problem))
    times = _Times(plan)
    outcomes = tuple(_rule_outcome(plan, r, semantics, i, times) for i, r in enumerate(domain.rules))
    verdict = not violations and all(o.satisfied for o in outcomes)
    return ValidationReport(verdict, outcomes, tuple(violations))


# --------------------------------------------------------------------------
# Exhaustive oracle
# --------------------------------------------------------------------------

def _event_time(plan: MultiTimeline, ref: TokenRef, event: Event) -> Fraction:
    var, i = ref
    durations = [tok.duration for tok in plan[var].tokens]
    start = sum(durations[:i], Fraction(0))
    return start if event is Event.START else start + durations[i]


def _holds(atom, lam: Mapping[str, TokenRef], plan: MultiTimeline) -> bool:
    if isinstance(atom, IntervalAtom):
        diff = _event_time(plan, lam[atom.right], atom.right_event) - _event_time(plan, lam[atom.left], atom.left_event)
    else:
        t = _event_time(plan, lam[atom.token], atom.event)
        diff = atom.bound - t if atom.token_first else t - atom.bound
    return interval_contains(atom.interval, diff)


def brute_force_satisfies(plan: MultiTimeline, rule: Rule, semantics: str = STANDARD,
                          cap: int = 10 ** 6) -> bool:
    """Decide ``rule`` by enumerating every value-consistent assignment.

    Future semantics is checked directly (each quantified token must start no
    earlier than the trigger) rather than through :func:`futurize`.
    """
    _check_semantics(semantics)
    if isinstance(rule, TriggerRule):
        trig = rule.trigger
        triggers = [{trig.name: (trig.variable, i)}
                    for i, tok in enumerate(plan.get(trig.variable, ()))
                    if tok.value == trig.value]
    else:
        triggers = [{}]

    pools = []
    total = 0
    for d in rule.disjuncts:
        pool = [[(q.variable, i) for i, tok in enumerate(plan.get(q.variable, ())) if tok.value == q.value]
                for q in d.quantifiers]
        size = 1
        for p in pool:
            size *= len(p)
        total += size * len(triggers)
        pools.append(pool)
    if total > cap:
        raise CapExceededError(f"{total} candidate assignments exceed the cap of {cap}")

    def witnessed(fixed: Dict[str, TokenRef]) -> bool:
        for d, pool in zip(rule.disjuncts, pools):
            for combo in itertools.product(*pool):
                lam = dict(fixed)
                lam.update(zip(d.quantified, combo))
                if semantics == FUTURE and fixed:
                    t0 = _event_time(plan, next(iter(fixed.values())), Event.START)
                    if any(_event_time(plan, ref, Event.START) < t0 for ref in combo):
                        continue
                if all(_holds(a, lam, plan) for a in d.atoms):
                    return True
        return False

    return all(witnessed(f) for f in triggers)
