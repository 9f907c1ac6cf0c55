"""Timeline-based planning domains over dense time.

State variables, tokens, timelines, the synchronization-rule language
(atoms, existential statements, trigger and trigger-less rules) and the
small amount of arithmetic needed to evaluate them.  All time values are
exact :class:`fractions.Fraction` instances; floats are rejected.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

__all__ = [
    "ModelError", "Violation", "Interval", "ZERO_INF", "POSITIVE",
    "StateVariable", "Token", "Timeline", "MultiTimeline", "Event",
    "IntervalAtom", "PointAtom", "Atom", "Quantifier", "ExistentialStatement",
    "TriggerRule", "TriggerlessRule", "Rule", "Domain",
    "as_time", "interval_contains", "is_zero_infty", "token_times",
    "check_timeline", "futurize", "well_formed_rule", "atom_names",
]


class ModelError(ValueError):
    """Raised when a domain object cannot be constructed."""


@dataclass(frozen=True)
class Violation:
    """A failed structural check: what kind, where, and a readable message."""

    kind: str
    message: str
    index: Optional[int] = None

    def __str__(self) -> str:
        return self.message


def as_time(value: Union[int, Fraction]) -> Fraction:
    """Coerce an exact number to a Fraction; floats and bools are refused."""
    if isinstance(value, bool) or not isinstance(value, (int, Fraction)):
        raise TypeError(f"time values must be int or Fraction, got {type(value).__name__}")
    return Fraction(value)


# --------------------------------------------------------------------------
# Intervals
# --------------------------------------------------------------------------

_BRACKET_RE = re.compile(
    r"^\s*([\[\]])\s*(\d+)\s*,\s*(\d+|\+?inf|\+?∞)\s*([\[\]])\s*$")
_CMP_RE = re.compile(r"^\s*(<=|>=|<|>|≤|≥)\s*(\d+)\s*$")


@dataclass(frozen=True)
class Interval:
    """An interval of the non-negative reals with endpoints in N ∪ {∞}.

    ``hi is None`` stands for an unbounded right end (always open).  Empty
    intervals are rejected at construction.
    """

    lo: int
    hi: Optional[int]
    lo_closed: bool = True
    hi_closed: bool = True

    def __post_init__(self) -> None:
        if isinstance(self.lo, bool) or not isinstance(self.lo, int) or self.lo < 0:
            raise ModelError(f"lower endpoint must be a natural number, got {self.lo!r}")
        if self.hi is None:
            object.__setattr__(self, "hi_closed", False)
            return
        if isinstance(self.hi, bool) or not isinstance(self.hi, int):
            raise ModelError(f"upper endpoint must be a natural number or None, got {self.hi!r}")
        if self.hi < self.lo:
            raise ModelError(f"empty interval: {self.lo} > {self.hi}")
        if self.hi == self.lo and not (self.lo_closed and self.hi_closed):
            raise ModelError(f"empty interval: point {self.lo} with an open side")

    @classmethod
    def closed(cls, lo: int, hi: Optional[int]) -> "Interval":
        return cls(lo, hi, True, True)

    @classmethod
    def at_least(cls, n: int) -> "Interval":
        return cls(n, None, True)

    @classmethod
    def parse(cls, text: str) -> "Interval":
        """Parse ``[a,b]``, ``]a,inf[`` style brackets or a ``~ n`` comparison.

        ``<= 3`` is ``[0,3]``, ``< 3`` is ``[0,3[``, ``> 3`` is ``]3,∞[`` and
        ``>= 3`` is ``[3,∞[``.
        """
        m = _BRACKET_RE.match(text)
        if m:
            left, lo, hi, right = m.groups()
            upper = None if hi.lstrip("+") in ("inf", "∞") else int(hi)
            if upper is None and right != "[":
                raise ModelError(f"unbounded interval must be right-open: {text!r}")
            return cls(int(lo), upper, left == "[", right == "]")
        m = _CMP_RE.match(text)
        if m:
            op, n = m.group(1), int(m.group(2))
            if op in ("<=", "≤"):
                return cls(0, n, True, True)
            if op == "<":
                return cls(0, n, True, False)
            if op == ">":
                return cls(n, None, False)
            return cls(n, None, True)
        raise ModelError(f"cannot parse interval {text!r}")

    def contains(self, q: Union[int, Fraction]) -> bool:
        return interval_contains(self, q)

    @property
    def bounded(self) -> bool:
        return self.hi is not None

    def __str__(self) -> str:
        left = "[" if self.lo_closed else "]"
        if self.hi is None:
            return f"{left}{self.lo},inf["
        right = "]" if self.hi_closed else "["
        return f"{left}{self.lo},{self.hi}{right}"


ZERO_INF = Interval(0, None, True)     # [0,∞[
POSITIVE = Interval(0, None, False)    # ]0,∞[


def interval_contains(interval: Interval, q: Union[int, Fraction]) -> bool:
    """Membership test respecting strictness; negative values are never inside."""
    q = as_time(q)
    if interval.lo_closed:
        if q < interval.lo:
            return False
    elif q <= interval.lo:
        return False
    if interval.hi is None:
        return True
    return q <= interval.hi if interval.hi_closed else q < interval.hi


def is_zero_infty(interval: Interval) -> bool:
    """True for intervals that are unbounded or left-closed at 0."""
    return interval.hi is None or (interval.lo == 0 and interval.lo_closed)


# --------------------------------------------------------------------------
# State variables and timelines
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class StateVariable:
    """A finite-domain variable with its transition function and durations.

    ``values`` keeps declaration order, which the solver uses for
    deterministic enumeration.
    """

    name: str
    values: Tuple[str, ...]
    transitions: Mapping[str, Tuple[str, ...]]
    durations: Mapping[str, Interval]

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", tuple(self.values))
        object.__setattr__(self, "transitions",
                           {v: tuple(s) for v, s in self.transitions.items()})
        object.__setattr__(self, "durations", dict(self.durations))
        if len(set(self.values)) != len(self.values):
            raise ModelError(f"variable {self.name!r} declares a value twice")
        known = set(self.values)
        for mapping, what in ((self.transitions, "transitions"), (self.durations, "durations")):
            extra = set(mapping) - known
            if extra:
                raise ModelError(f"variable {self.name!r}: {what} mention unknown value {sorted(extra)[0]!r}")
            missing = known - set(mapping)
            if missing:
                raise ModelError(f"variable {self.name!r}: {what} undefined for {sorted(missing)[0]!r}")
        for v, succ in self.transitions.items():
            for u in succ:
                if u not in known:
                    raise ModelError(f"variable {self.name!r}: successor {u!r} of {v!r} is not a value")
        for v, d in self.durations.items():
            if not isinstance(d, Interval):
                raise ModelError(f"variable {self.name!r}: duration of {v!r} is not an Interval")

    def __hash__(self) -> int:
        return hash((self.name, self.values))


@dataclass(frozen=True)
class Token:
    value: str
    duration: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "duration", as_time(self.duration))


@dataclass(frozen=True)
class Timeline:
    variable: str
    tokens: Tuple[Token, ...]

    def __post_init__(self) -> None:
        tokens = tuple(t if isinstance(t, Token) else Token(*t) for t in self.tokens)
        if not tokens:
            raise ModelError(f"timeline for {self.variable!r} is empty")
        object.__setattr__(self, "tokens", tokens)

    def __len__(self) -> int:
        return len(self.tokens)

    def __iter__(self) -> Iterator[Token]:
        return iter(self.tokens)

    @property
    def values(self) -> Tuple[str, ...]:
        return tuple(t.value for t in self.tokens)

    @property
    def horizon(self) -> Fraction:
        return sum((t.duration for t in self.tokens), Fraction(0))


# variable name -> timeline
MultiTimeline = Dict[str, Timeline]


def token_times(timeline: Timeline) -> List[Tuple[Fraction, Fraction]]:
    """Start and end time of every token: starts at 0, each token ends where the next starts."""
    out = []
    t = Fraction(0)
    for tok in timeline.tokens:
        out.append((t, t + tok.duration))
        t += tok.duration
    return out


def check_timeline(var: StateVariable, timeline: Timeline) -> Optional[Violation]:
    """First value, transition or duration violation along ``timeline``, else None."""
    if timeline.variable != var.name:
        raise ValueError(f"timeline is for {timeline.variable!r}, not {var.name!r}")
    prev = None
    for i, tok in enumerate(timeline.tokens):
        if tok.value not in var.durations:
            return Violation("value", f"token {i}: {tok.value!r} is not a value of {var.name!r}", i)
        if prev is not None and tok.value not in var.transitions[prev]:
            return Violation("transition", f"token {i}: {tok.value!r} may not follow {prev!r}", i)
        if not interval_contains(var.durations[tok.value], tok.duration):
            return Violation(
                "duration",
                f"token {i}: duration {tok.duration} of {tok.value!r} outside {var.durations[tok.value]}", i)
        prev = tok.value
    return None


# --------------------------------------------------------------------------
# Rule language
# --------------------------------------------------------------------------

class Event(enum.Enum):
    START = "s"
    END = "e"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class IntervalAtom:
    """``left <=^{left_event,right_event}_interval right``.

    Satisfied when ``right_event(right) - left_event(left)`` lies in ``interval``.
    """

    left: str
    left_event: Event
    right: str
    right_event: Event
    interval: Interval

    @property
    def names(self) -> Tuple[str, ...]:
        return (self.left, self.right)

    def __str__(self) -> str:
        return f"{self.left} <=[{self.left_event},{self.right_event}]{self.interval} {self.right}"


@dataclass(frozen=True)
class PointAtom:
    """A time-point atom comparing one token event with a constant.

    With ``token_first`` it reads ``token <=^event_I bound`` and holds when
    ``bound - event(token)`` is in ``interval``; otherwise it reads
    ``bound <=^event_I token`` and holds when ``event(token) - bound`` is.
    """

    token: str
    event: Event
    bound: int
    interval: Interval
    token_first: bool = True

    def __post_init__(self) -> None:
        if isinstance(self.bound, bool) or not isinstance(self.bound, int) or self.bound < 0:
            raise ModelError(f"point atom bound must be a natural number, got {self.bound!r}")

    @property
    def names(self) -> Tuple[str, ...]:
        return (self.token,)

    def __str__(self) -> str:
        if self.token_first:
            return f"{self.token} <=[{self.event}]{self.interval} {self.bound}"
        return f"{self.bound} <=[{self.event}]{self.interval} {self.token}"


Atom = Union[IntervalAtom, PointAtom]


def atom_names(atom: Atom) -> Tuple[str, ...]:
    return atom.names


@dataclass(frozen=True)
class Quantifier:
    """``name[variable = value]``."""

    name: str
    variable: str
    value: str

    def __str__(self) -> str:
        return f"{self.name}[{self.variable}={self.value}]"


@dataclass(frozen=True)
class ExistentialStatement:
    quantifiers: Tuple[Quantifier, ...] = ()
    atoms: Tuple[Atom, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "quantifiers", tuple(self.quantifiers))
        object.__setattr__(self, "atoms", tuple(self.atoms))

    @property
    def quantified(self) -> Tuple[str, ...]:
        return tuple(q.name for q in self.quantifiers)

    def free_names(self) -> List[str]:
        """Names used in atoms but not quantified, in order of first use."""
        bound = set(self.quantified)
        seen: List[str] = []
        for atom in self.atoms:
            for n in atom.names:
                if n not in bound and n not in seen:
                    seen.append(n)
        return seen

    def __str__(self) -> str:
        qs = " ".join(f"E{q}" for q in self.quantifiers)
        body = " & ".join(str(a) for a in self.atoms) or "T"
        return f"{qs}. {body}" if qs else body


@dataclass(frozen=True)
class TriggerRule:
    """``trigger -> E_1 | ... | E_k``: every trigger-valued token needs some disjunct."""

    trigger: Quantifier
    disjuncts: Tuple[ExistentialStatement, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "disjuncts", tuple(self.disjuncts))

    def __str__(self) -> str:
        return f"{self.trigger} -> " + " | ".join(f"({d})" for d in self.disjuncts)


@dataclass(frozen=True)
class TriggerlessRule:
    """``T -> E_1 | ... | E_k``; an empty disjunction can never be satisfied."""

    disjuncts: Tuple[ExistentialStatement, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "disjuncts", tuple(self.disjuncts))

    def __str__(self) -> str:
        if not self.disjuncts:
            return "T -> F"
        return "T -> " + " | ".join(f"({d})" for d in self.disjuncts)


Rule = Union[TriggerRule, TriggerlessRule]


@dataclass(frozen=True)
class Domain:
    """A planning domain: state variables plus synchronization rules."""

    variables: Tuple[StateVariable, ...]
    rules: Tuple[Rule, ...] = ()
    check: bool = field(default=True, compare=False, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "rules", tuple(self.rules))
        names = [v.name for v in self.variables]
        if len(set(names)) != len(names):
            raise ModelError("duplicate state variable name")
        if self.check:
            for i, rule in enumerate(self.rules):
                problem = well_formed_rule(self, rule)
                if problem is not None:
                    raise ModelError(f"rule {i}: {problem.message}")

    def __hash__(self) -> int:
        return hash((self.variables, self.rules))

    def variable(self, name: str) -> StateVariable:
        for v in self.variables:
            if v.name == name:
                return v
        raise KeyError(name)

    @property
    def variable_names(self) -> Tuple[str, ...]:
        return tuple(v.name for v in self.variables)


def futurize(rule: Rule) -> Rule:
    """Strengthen every disjunct so quantified tokens start no earlier than the trigger.

    Trigger-less rules are returned unchanged.
    """
    if not isinstance(rule, TriggerRule):
        return rule
    o0 = rule.trigger.name
    disjuncts = tuple(
        ExistentialStatement(
            d.quantifiers,
            d.atoms + tuple(IntervalAtom(o0, Event.START, q.name, Event.START, ZERO_INF)
                            for q in d.quantifiers))
        for d in rule.disjuncts)
    return TriggerRule(rule.trigger, disjuncts)


def _check_quantifier(domain: Domain, q: Quantifier) -> Optional[str]:
    try:
        var = domain.variable(q.variable)
    except KeyError:
        return f"{q}: undeclared variable {q.variable!r}"
    if q.value not in var.durations:
        return f"{q}: {q.value!r} is not a value of {q.variable!r}"
    return None


def well_formed_rule(domain: Domain, rule: Rule) -> Optional[Violation]:
    """Check the free-name discipline and that quantifiers name declared values."""
    trigger = rule.trigger.name if isinstance(rule, TriggerRule) else None
    if trigger is not None:
        msg = _check_quantifier(domain, rule.trigger)
        if msg:
            return Violation("trigger", msg)
    for i, d in enumerate(rule.disjuncts):
        names = d.quantified
        if len(set(names)) != len(names):
            return Violation("quantifier", f"disjunct {i}: a token name is quantified twice", i)
        if trigger is not None and trigger in names:
            return Violation("quantifier", f"disjunct {i}: trigger name {trigger!r} is re-quantified", i)
        for q in d.quantifiers:
            msg = _check_quantifier(domain, q)
            if msg:
                return Violation("quantifier", f"disjunct {i}: {msg}", i)
        for name in d.free_names():
            if name != trigger:
                return Violation("free-name", f"disjunct {i}: token name {name!r} appears free", i)
        for atom in d.atoms:
            if not isinstance(atom, (IntervalAtom, PointAtom)) or not isinstance(atom.interval, Interval):
                return Violation("atom", f"disjunct {i}: malformed atom {atom!r}", i)
    return None
