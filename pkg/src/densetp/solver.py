"""Bounded plan synthesis.

Untimed skeletons (value sequences consistent with the transition
functions) are enumerated by increasing size.  For a fixed skeleton the
trigger tokens are known, so every rule reduces to a finite choice of
disjunct and token assignment per trigger occurrence; each choice adds
difference constraints, and a backtracking search keeps the constraint
graph free of negative cycles.  Finding nothing at a bound says nothing
about larger bounds.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Set, Tuple

from .constraints import ZERO, Constraint, ConstraintSystem, DifferenceGraph, feasible
from .model import (
    Domain, Event, ExistentialStatement, Interval, IntervalAtom, MultiTimeline, PointAtom,
    Rule, StateVariable, Timeline, Token, TriggerlessRule, TriggerRule, futurize,
)
from .validator import FUTURE, STANDARD, TokenRef, is_plan

__all__ = ["Skeleton", "Choice", "event_var", "atoms_to_constraints", "skeleton_constraints",
           "enumerate_skeletons", "bounded_solve"]

log = logging.getLogger(__name__)

# variable name -> sequence of values
Skeleton = Dict[str, Tuple[str, ...]]


@dataclass(frozen=True)
class Choice:
    """How one rule obligation is met: which disjunct, and which tokens its names denote.

    ``trigger_position`` is None for trigger-less rules.  ``assignment``
    binds every quantified name (and the trigger name, if any).
    """

    rule_index: int
    trigger_position: Optional[int]
    disjunct: int
    assignment: Mapping[str, TokenRef] = field(default_factory=dict)


def event_var(ref: TokenRef, event: Event) -> str:
    var, i = ref
    return f"{var}[{i}].{event.value}"


def _between(hi_var: str, lo_var: str, interval: Interval, offset: Fraction = Fraction(0)) -> List[Constraint]:
    """``hi_var - lo_var + offset`` in ``interval``."""
    out = [Constraint(lo_var, hi_var, offset - interval.lo, not interval.lo_closed)]
    if interval.hi is not None:
        out.append(Constraint(hi_var, lo_var, interval.hi - offset, not interval.hi_closed))
    return out


def _atom_constraints(atom, lam: Mapping[str, TokenRef]) -> List[Constraint]:
    if isinstance(atom, IntervalAtom):
        return _between(event_var(lam[atom.right], atom.right_event),
                        event_var(lam[atom.left], atom.left_event), atom.interval)
    t = event_var(lam[atom.token], atom.event)
    if atom.token_first:
        # bound - t in I
        return _between(ZERO, t, atom.interval, Fraction(atom.bound))
    return _between(t, ZERO, atom.interval, Fraction(-atom.bound))


def skeleton_constraints(domain: Domain, sk: Skeleton) -> List[Constraint]:
    """Timeline shape: first token starts at 0, tokens abut, durations in range."""
    out: List[Constraint] = []
    for var in domain.variables:
        values = sk[var.name]
        first = event_var((var.name, 0), Event.START)
        out += [Constraint(first, ZERO, 0), Constraint(ZERO, first, 0)]
        for i, v in enumerate(values):
            s, e = event_var((var.name, i), Event.START), event_var((var.name, i), Event.END)
            out += _between(e, s, var.durations[v])
            if i + 1 < len(values):
                nxt = event_var((var.name, i + 1), Event.START)
                out += [Constraint(e, nxt, 0), Constraint(nxt, e, 0)]
    return out


def _prepared_rules(domain: Domain, semantics: str) -> List[Rule]:
    if semantics not in (STANDARD, FUTURE):
        raise ValueError(f"unknown semantics {semantics!r}")
    return [futurize(r) if semantics == FUTURE else r for r in domain.rules]


def atoms_to_constraints(domain: Domain, sk: Skeleton, choices: Sequence[Choice],
                         semantics: str = STANDARD) -> ConstraintSystem:
    """The constraint system for ``sk`` with every rule obligation resolved by ``choices``."""
    rules = _prepared_rules(domain, semantics)
    needed = set()
    for k, r in enumerate(rules):
        if isinstance(r, TriggerRule):
            needed.update((k, i) for i, v in enumerate(sk.get(r.trigger.variable, ())) if v == r.trigger.value)
        else:
            needed.add((k, None))
    got = {(c.rule_index, c.trigger_position) for c in choices}
    if got != needed or len(choices) != len(needed):
        raise ValueError("choices must resolve each trigger occurrence and trigger-less rule exactly once")

    cs = ConstraintSystem()
    for var in domain.variables:
        for i in range(len(sk[var.name])):
            cs.add_variable(event_var((var.name, i), Event.START))
            cs.add_variable(event_var((var.name, i), Event.END))
    cs.extend(skeleton_constraints(domain, sk))
    for c in choices:
        rule = rules[c.rule_index]
        if not 0 <= c.disjunct < len(rule.disjuncts):
            raise ValueError(f"rule {c.rule_index} has no disjunct {c.disjunct}")
        stmt = rule.disjuncts[c.disjunct]
        lam = dict(c.assignment)
        binders = list(stmt.quantifiers)
        if isinstance(rule, TriggerRule):
            binders.append(rule.trigger)
            if lam.get(rule.trigger.name) != (rule.trigger.variable, c.trigger_position):
                raise ValueError(f"choice for rule {c.rule_index} does not bind the trigger to its token")
        for q in binders:
            ref = lam.get(q.name)
            if ref is None or ref[0] != q.variable or not 0 <= ref[1] < len(sk[q.variable]) \
                    or sk[q.variable][ref[1]] != q.value:
                raise ValueError(f"choice for rule {c.rule_index}: {q} is not bound to a matching token")
        for atom in stmt.atoms:
            cs.extend(_atom_constraints(atom, lam))
    return cs


# --------------------------------------------------------------------------
# Skeleton enumeration
# --------------------------------------------------------------------------

def _required_values(domain: Domain) -> Dict[str, Set[str]]:
    """Values every plan must contain: quantified in all disjuncts of a trigger-less rule."""
    req: Dict[str, Set[str]] = {v.name: set() for v in domain.variables}
    for r in domain.rules:
        if isinstance(r, TriggerlessRule) and r.disjuncts:
            common = set.intersection(*({(q.variable, q.value) for q in d.quantifiers} for d in r.disjuncts))
            for var, val in common:
                req[var].add(val)
    return req


def _reachability(var: StateVariable) -> Dict[str, Set[str]]:
    reach = {}
    for v in var.values:
        seen: Set[str] = set()
        stack = list(var.transitions[v])
        while stack:
            u = stack.pop()
            if u not in seen:
                seen.add(u)
                stack.extend(var.transitions[u])
        reach[v] = seen
    return reach


def _sequences(var: StateVariable, length: int, required: Set[str],
               reach: Dict[str, Set[str]]) -> List[Tuple[str, ...]]:
    """Transition-consistent sequences of exactly ``length`` values, lexicographic by declaration order."""
    order = {v: i for i, v in enumerate(var.values)}
    out: List[Tuple[str, ...]] = []
    seq: List[str] = []

    def grow(missing: Set[str]) -> None:
        if len(missing) > length - len(seq):
            return
        if len(seq) == length:
            out.append(tuple(seq))
            return
        options = var.values if not seq else sorted(var.transitions[seq[-1]], key=order.__getitem__)
        for v in options:
            still = missing - {v}
            if still and len(seq) + 1 < length and not still <= reach[v]:
                continue
            seq.append(v)
            grow(still)
            seq.pop()

    grow(set(required))
    return out


def enumerate_skeletons(domain: Domain, token_bound: int) -> Iterator[Skeleton]:
    """Skeletons by total token count, then per-variable lengths, then lexicographically.

    Skeletons missing a value that every plan needs are skipped.
    """
    names = domain.variable_names
    req = _required_values(domain)
    reach = {v.name: _reachability(v) for v in domain.variables}
    cache: Dict[Tuple[str, int], List[Tuple[str, ...]]] = {}

    def seqs(var: StateVariable, n: int) -> List[Tuple[str, ...]]:
        key = (var.name, n)
        if key not in cache:
            cache[key] = _sequences(var, n, req[var.name], reach[var.name])
        return cache[key]

    k = len(names)
    for total in range(k, k * token_bound + 1):
        for lengths in itertools.product(range(1, token_bound + 1), repeat=k):
            if sum(lengths) != total:
                continue
            pools = [seqs(var, n) for var, n in zip(domain.variables, lengths)]
            for combo in itertools.product(*pools):
                yield dict(zip(names, combo))


# --------------------------------------------------------------------------
# Search
# --------------------------------------------------------------------------

@dataclass
class _Task:
    rule_index: int
    trigger_position: Optional[int]
    fixed: Dict[str, TokenRef]
    options: List[Tuple[int, ExistentialStatement, List[List[TokenRef]]]]


def _tasks(rules: Sequence[Rule], sk: Skeleton) -> Optional[List[_Task]]:
    positions: Dict[Tuple[str, str], List[TokenRef]] = {}
    for var, values in sk.items():
        for i, v in enumerate(values):
            positions.setdefault((var, v), []).append((var, i))

    def options(rule: Rule) -> List:
        opts = []
        for j, d in enumerate(rule.disjuncts):
            pools = [positions.get((q.variable, q.value), []) for q in d.quantifiers]
            if all(pools):
                opts.append((j, d, pools))
        return opts

    tasks = []
    for k, r in enumerate(rules):
        opts = options(r)
        if isinstance(r, TriggerRule):
            occurrences = positions.get((r.trigger.variable, r.trigger.value), [])
            if occurrences and not opts:
                return None
            tasks.extend(_Task(k, ref[1], {r.trigger.name: ref}, opts) for ref in occurrences)
        else:
            if not opts:
                return None
            tasks.append(_Task(k, None, {}, opts))
    # fewest options first prunes earlier; ties keep rule order
    tasks.sort(key=lambda t: sum(math.prod(len(p) for p in pools) for _, _, pools in t.options))
    return tasks


def _solve_skeleton(domain: Domain, rules: Sequence[Rule], sk: Skeleton) -> Optional[List[Choice]]:
    tasks = _tasks(rules, sk)
    if tasks is None:
        return None
    graph = DifferenceGraph()
    for c in skeleton_constraints(domain, sk):
        if not graph.add(c):
            return None
    chosen: List[Choice] = []

    def search(depth: int) -> bool:
        if depth == len(tasks):
            return True
        task = tasks[depth]
        for j, stmt, pools in task.options:
            for combo in itertools.product(*pools):
                lam = dict(task.fixed)
                lam.update(zip(stmt.quantified, combo))
                mark = graph.mark()
                if all(graph.add(c) for atom in stmt.atoms for c in _atom_constraints(atom, lam)):
                    chosen.append(Choice(task.rule_index, task.trigger_position, j, lam))
                    if search(depth + 1):
                        return True
                    chosen.pop()
                graph.undo(mark)
        return False

    return list(chosen) if search(0) else None


def bounded_solve(domain: Domain, token_bound: int, semantics: str = STANDARD) -> Optional[MultiTimeline]:
    """First plan (in enumeration order) with at most ``token_bound`` tokens per timeline.

    None only means no plan exists within the bound.
    """
    rules = _prepared_rules(domain, semantics)
    if any(isinstance(r, TriggerlessRule) and not r.disjuncts for r in rules):
        return None
    for sk in enumerate_skeletons(domain, token_bound):
        choices = _solve_skeleton(domain, rules, sk)
        if choices is None:
            continue
        choices.sort(key=lambda c: (c.rule_index, -1 if c.trigger_position is None else c.trigger_position))
        cs = atoms_to_constraints(domain, sk, choices, semantics)
        values = feasible(cs)
        if values is None:
            raise AssertionError("internal error: search accepted an infeasible choice structure")
        plan = _materialize(domain, sk, values)
        if not is_plan(domain, plan, semantics).verdict:
            raise AssertionError("internal error: synthesized plan fails validation")
        log.debug("plan found with skeleton %s", sk)
        return plan
    return None


def _materialize(domain: Domain, sk: Skeleton, values: Mapping[str, Fraction]) -> MultiTimeline:
    plan = {}
    for var in domain.variables:
        toks = []
        for i, v in enumerate(sk[var.name]):
            d = values[event_var((var.name, i), Event.END)] - values[event_var((var.name, i), Event.START)]
            toks.append(Token(v, d))
        plan[var.name] = Timeline(var.name, tuple(toks))
    return plan
