"""Compiling a two-counter machine into a one-variable planning domain.

The domain has a single state variable ``xM``.  Its values are the machine
transitions ("main" values) and triples ``(transition, counter, tag)`` with
tag in ``beg``, ``#``, ``end`` ("secondary" values).  A configuration
``(q, n1, n2)`` reached before taking transition ``d`` is written as the word

    d (d,1,beg) (d,1,#)^n1 (d,1,end) (d,2,beg) (d,2,#)^n2 (d,2,end)

and a computation as the concatenation of such words.  The transition
function only admits prefixes of such words that start with the initial
configuration; trigger rules with punctual timing force every configuration
word to last exactly one time unit and tie each counter token to a token one
unit later, so counter values are copied, incremented or decremented
correctly from one configuration to the next.

Besides :func:`compile_machine` the module provides the word-level encoding
and decoding, an arithmetic well-formedness check on words that does not
look at the rules at all, a generator for timed witness plans, and a
mutation helper for negative tests.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .minsky import Computation, Configuration, Machine, Transition, apply_transition, validate_machine
from .model import (
    POSITIVE, Domain, Event, ExistentialStatement, Interval, IntervalAtom, MultiTimeline,
    Quantifier, StateVariable, Timeline, Token, TriggerlessRule, TriggerRule, Violation,
    token_times,
)

__all__ = [
    "VARIABLE", "TAGS", "Main", "Sec", "ReductionValue", "CodeWord", "CodeError",
    "MutationError", "CodeCheck", "value_name", "parse_value", "machine_values",
    "may_follow", "compile_machine", "encode_computation", "decode",
    "check_well_formed_code", "is_initial_code_prefix", "generate_witness",
    "timeline_word", "mutate_witness", "check_unit_spacing", "MUTATIONS",
]

VARIABLE = "xM"
TAGS = ("beg", "#", "end")
MUTATIONS = ("insert_hash", "delete_hash", "stretch_config", "swap_tags")

S, E = Event.START, Event.END


@dataclass(frozen=True)
class Main:
    delta: Transition

    @property
    def name(self) -> str:
        return self.delta.name


@dataclass(frozen=True)
class Sec:
    delta: Transition
    counter: int
    tag: str

    @property
    def name(self) -> str:
        return f"{self.delta.name}|{self.counter}|{self.tag}"


ReductionValue = Union[Main, Sec]
CodeWord = Tuple[ReductionValue, ...]


class CodeError(ValueError):
    """A word is not shaped like a computation-code."""

    def __init__(self, message: str, position: Optional[int] = None):
        super().__init__(message if position is None else f"position {position}: {message}")
        self.position = position


class MutationError(ValueError):
    """The requested mutation cannot be applied to this plan."""


def value_name(v: ReductionValue) -> str:
    return v.name


def parse_value(name: str) -> ReductionValue:
    """Inverse of :func:`value_name`."""
    head, *rest = name.split("|")
    try:
        source, opc, target = head.split(":")
        delta = Transition(source, opc[:-1], int(opc[-1]), target)
    except (ValueError, IndexError):
        raise CodeError(f"{name!r} is not a reduction value") from None
    if not rest:
        return Main(delta)
    if len(rest) != 2 or rest[0] not in ("1", "2") or rest[1] not in TAGS:
        raise CodeError(f"{name!r} is not a reduction value")
    return Sec(delta, int(rest[0]), rest[1])


def machine_values(machine: Machine) -> List[ReductionValue]:
    """All values, seven per transition, in declaration order."""
    out: List[ReductionValue] = []
    for d in machine.transitions:
        out.append(Main(d))
        out.extend(Sec(d, c, t) for c in (1, 2) for t in TAGS)
    return out


def _no_hash(delta: Transition, counter: int, initial: Transition) -> bool:
    # counter must be encoded as zero: zero-tests, and both counters of the initial configuration
    return delta == initial or (delta.op == "zero" and delta.counter == counter)


def may_follow(prev: ReductionValue, nxt: ReductionValue, initial: Transition) -> bool:
    """The transition function of ``xM`` as a predicate on adjacent values."""
    if isinstance(prev, Main):
        return nxt == Sec(prev.delta, 1, "beg")
    d, c, t = prev.delta, prev.counter, prev.tag
    if t == "beg":
        if nxt == Sec(d, c, "end"):
            return True
        return nxt == Sec(d, c, "#") and not _no_hash(d, c, initial)
    if t == "#":
        return nxt in (Sec(d, c, "#"), Sec(d, c, "end"))
    if c == 1:
        return nxt == Sec(d, 2, "beg")
    return isinstance(nxt, Main) and nxt.delta.source == d.target and nxt.delta != initial


# --------------------------------------------------------------------------
# Rules
# --------------------------------------------------------------------------

def _punctual(left_event: Event, right_event: Event, k: int = 1) -> Tuple[IntervalAtom, IntervalAtom]:
    """``right_event(o2) - left_event(o) = k`` as a pair of zero-or-unbounded atoms."""
    return (IntervalAtom("o", left_event, "o2", right_event, Interval.at_least(k)),
            IntervalAtom("o", left_event, "o2", right_event, Interval.closed(0, k)))


def _rule(v: ReductionValue, targets: Sequence[ReductionValue], atoms: Sequence[IntervalAtom]) -> TriggerRule:
    return TriggerRule(
        Quantifier("o", VARIABLE, v.name),
        tuple(ExistentialStatement((Quantifier("o2", VARIABLE, u.name),), tuple(atoms)) for u in targets))


def compile_machine(machine: Machine) -> Domain:
    """Build the one-variable domain whose future plans encode halting computations."""
    problem = validate_machine(machine)
    if problem is not None:
        raise ValueError(f"machine violates an assumption: {problem.message}")
    delta_init = machine.initial_transition
    deltas = machine.transitions
    values = machine_values(machine)
    transitions = {v.name: tuple(u.name for u in values if may_follow(v, u, delta_init)) for v in values}
    xm = StateVariable(VARIABLE, tuple(v.name for v in values), transitions,
                       {v.name: POSITIVE for v in values})

    def layer(c: int, tag: str) -> List[Sec]:
        return [Sec(d, c, tag) for d in deltas]

    mains = [Main(d) for d in deltas]
    halting = [m for m in mains if m.delta.target == machine.halting]
    start_shift = _punctual(S, S)
    both_shift = start_shift + _punctual(E, E)

    rules: List = [
        TriggerlessRule((ExistentialStatement((Quantifier("o", VARIABLE, Main(delta_init).name),)),)),
        TriggerlessRule(tuple(ExistentialStatement((Quantifier("o", VARIABLE, m.name),)) for m in halting)),
    ]
    # consecutive main tokens start exactly one unit apart
    for m in mains:
        if m.delta.target != machine.halting:
            rules.append(_rule(m, mains, start_shift))

    live = [d for d in deltas if d.target != machine.halting]
    # counters left unchanged by the step: copy every token one unit later
    for d in live:
        for c in (1, 2):
            if c != d.counter or d.op == "zero":
                for tag in TAGS:
                    rules.append(_rule(Sec(d, c, tag), layer(c, tag),
                                       start_shift if tag == "end" else both_shift))
    for d in live:
        c = d.counter
        if d.op == "inc":
            # the new beg ends one unit after the old beg starts; the old beg's slot becomes a #
            rules.append(_rule(Sec(d, c, "beg"), layer(c, "beg"), _punctual(S, E)))
            rules.append(_rule(Sec(d, c, "beg"), layer(c, "#"), both_shift))
            rules.append(_rule(Sec(d, c, "#"), layer(c, "#"), both_shift))
            rules.append(_rule(Sec(d, c, "end"), layer(c, "end"), start_shift))
        elif d.op == "dec":
            # the new beg starts one unit after the old beg ends, taking over the first #
            rules.append(_rule(Sec(d, c, "beg"), layer(c, "beg"), _punctual(E, S)))
            rules.append(_rule(Sec(d, c, "#"), layer(c, "beg") + layer(c, "#"), both_shift))
            rules.append(_rule(Sec(d, c, "end"), layer(c, "end"), start_shift))
    return Domain((xm,), tuple(rules))


# --------------------------------------------------------------------------
# Words
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class _CodeSpan:
    delta: Transition
    start: int                                  # index of the main token
    counters: Tuple[Tuple[int, Tuple[int, ...], int], ...]   # per counter: beg, #s, end
    stop: int                                   # one past the last token

    @property
    def values(self) -> Tuple[int, int]:
        return (len(self.counters[0][1]), len(self.counters[1][1]))


def _as_values(word: Sequence[Union[ReductionValue, str]]) -> List[ReductionValue]:
    return [parse_value(v) if isinstance(v, str) else v for v in word]


def _parse(word: Sequence[ReductionValue], prefix: bool = False) -> List[_CodeSpan]:
    """Split a word into configuration-codes.  With ``prefix`` a truncated last code is accepted."""
    spans: List[_CodeSpan] = []
    n = len(word)
    p = 0
    if n == 0 and not prefix:
        raise CodeError("empty word")

    def expect(pos: int, want: ReductionValue) -> bool:
        if pos >= n:
            if prefix:
                return False
            raise CodeError(f"word ends, expected {want.name}", pos)
        if word[pos] != want:
            raise CodeError(f"expected {want.name}, found {word[pos].name}", pos)
        return True

    while p < n:
        head = word[p]
        if not isinstance(head, Main):
            raise CodeError(f"expected a main value, found {head.name}", p)
        d = head.delta
        if spans and spans[-1].delta.target != d.source:
            raise CodeError(f"{d} does not continue from {spans[-1].delta}", p)
        start = p
        p += 1
        counters = []
        for c in (1, 2):
            if not expect(p, Sec(d, c, "beg")):
                return spans
            beg = p
            p += 1
            hashes = []
            while p < n and word[p] == Sec(d, c, "#"):
                hashes.append(p)
                p += 1
            if hashes and d.op == "zero" and d.counter == c:
                raise CodeError(f"counter {c} of a zero-test code must be empty", hashes[0])
            if not expect(p, Sec(d, c, "end")):
                return spans
            counters.append((beg, tuple(hashes), p))
            p += 1
        spans.append(_CodeSpan(d, start, tuple(counters), p))
    return spans


def encode_computation(machine: Machine, comp: Computation) -> CodeWord:
    """Word encoding ``comp``.

    For a computation ending in the halting location the final configuration
    has no code of its own: it is implied by the last code's transition.
    """
    confs = comp.configurations
    steps = list(comp.transitions) if comp.transitions is not None else _recover(machine, confs)
    for i, t in enumerate(steps):
        if t not in machine.transitions:
            raise ValueError(f"step {i}: {t} is not a transition of the machine")
        if t.source != confs[i].location or t.target != confs[i + 1].location \
                or apply_transition(t, confs[i].counters) != confs[i + 1].counters:
            raise ValueError(f"step {i}: {t} does not lead from {confs[i]} to {confs[i + 1]}")
    if confs[-1].location == machine.halting:
        if not steps:
            raise ValueError("a halting computation needs at least one step")
        coded = confs[:-1]
    else:
        coded = confs
        last = confs[-1]
        tail = [t for t in machine.transitions if t.source == last.location
                and not (t.op == "zero" and last.counters[t.counter - 1] != 0)]
        if not tail:
            raise ValueError(f"no transition can encode the final configuration {last}")
        steps.append(tail[0])
    word: List[ReductionValue] = []
    for conf, d in zip(coded, steps):
        word.append(Main(d))
        for c in (1, 2):
            word.append(Sec(d, c, "beg"))
            word.extend([Sec(d, c, "#")] * conf.counters[c - 1])
            word.append(Sec(d, c, "end"))
    return tuple(word)


def _recover(machine: Machine, confs: Sequence[Configuration]) -> List[Transition]:
    steps = []
    last = len(confs) - 2
    for i, (a, b) in enumerate(zip(confs, confs[1:])):
        cands = [t for t in machine.transitions
                 if t.source == a.location and t.target == b.location
                 and apply_transition(t, a.counters) == b.counters]
        if not cands:
            raise ValueError(f"step {i}: no transition leads from {a} to {b}")
        if len(cands) > 1 and not (i == last and b.location == machine.halting):
            raise ValueError(f"step {i}: ambiguous transitions {[str(t) for t in cands]}")
        steps.append(cands[0])
    return steps


def decode(word: Sequence[Union[ReductionValue, str]]) -> List[Configuration]:
    """Configurations encoded by a computation-code (one per configuration-code)."""
    return [Configuration(s.delta.source, s.values) for s in _parse(_as_values(word))]


@dataclass(frozen=True)
class CodeCheck:
    violation: Optional[Violation]
    initial: bool
    halting: bool

    @property
    def ok(self) -> bool:
        return self.violation is None


def check_well_formed_code(machine: Machine, word: Sequence[Union[ReductionValue, str]]) -> CodeCheck:
    """Arithmetic check of adjacent configuration-codes.

    ``violation.index`` is the 1-based step ``j`` relating codes ``j`` and
    ``j + 1``; ``violation.kind`` is ``equality``, ``increment`` or
    ``decrement``.
    """
    spans = _parse(_as_values(word))
    for s in spans:
        if s.delta not in machine.transitions:
            raise CodeError(f"{s.delta} is not a transition of the machine", s.start)
    first = spans[0]
    initial = first.delta == machine.initial_transition and first.values == (0, 0)
    halting = spans[-1].delta.target == machine.halting
    for j, (a, b) in enumerate(zip(spans, spans[1:]), start=1):
        d = a.delta
        for c in (1, 2):
            old, new = a.values[c - 1], b.values[c - 1]
            if c != d.counter or d.op == "zero":
                kind, want = "equality", old
            elif d.op == "inc":
                kind, want = "increment", old + 1
            else:
                kind, want = "decrement", old - 1
            if new != want:
                msg = f"step {j}: counter {c} is {new} after {d}, expected {want} ({kind} requirement)"
                return CodeCheck(Violation(kind, msg, j), initial, halting)
    return CodeCheck(None, initial, halting)


def is_initial_code_prefix(machine: Machine, word: Sequence[Union[ReductionValue, str]]) -> bool:
    """True when ``word`` can be extended to an initial computation-code of ``machine``."""
    values = _as_values(word)
    if not values:
        return True
    try:
        spans = _parse(values, prefix=True)
    except CodeError:
        return False
    if any(isinstance(v, (Main, Sec)) and v.delta not in machine.transitions for v in values):
        return False
    if values[0] != Main(machine.initial_transition):
        return False
    # the first code may be truncated, in which case no # may have appeared yet
    if spans:
        return spans[0].values == (0, 0)
    return all(not (isinstance(v, Sec) and v.tag == "#") for v in values)


def timeline_word(plan: MultiTimeline) -> CodeWord:
    return tuple(parse_value(t.value) for t in plan[VARIABLE].tokens)


# --------------------------------------------------------------------------
# Timed witnesses
# --------------------------------------------------------------------------

def generate_witness(machine: Machine, comp: Computation) -> MultiTimeline:
    """A future plan of ``compile_machine(machine)`` whose untimed part encodes ``comp``.

    Configuration-code ``i`` (0-based) occupies ``[i, i + 1]``.  The first
    code is laid out evenly; every later code is obtained from its
    predecessor by shifting tokens one unit to the right, except for the
    counter touched by an increment (a new ``beg`` is squeezed in before the
    old ``beg`` slot, which becomes a ``#``) or a decrement (the old ``beg``
    slot is absorbed by the preceding token and the first ``#`` slot becomes
    the new ``beg``).
    """
    if comp.configurations[-1].location != machine.halting:
        raise ValueError("witnesses are generated for halting computations only")
    spans = _parse(encode_computation(machine, comp))
    deltas = [s.delta for s in spans]
    counts = [s.values for s in spans]

    # a configuration is a list of (value, start); ends are implied by the next start
    n0 = 5 + sum(counts[0])
    first: List[Tuple[ReductionValue, Fraction]] = [(Main(deltas[0]), Fraction(0))]
    for c in (1, 2):
        first.append((Sec(deltas[0], c, "beg"), Fraction(0)))
        first.extend((Sec(deltas[0], c, "#"), Fraction(0)) for _ in range(counts[0][c - 1]))
        first.append((Sec(deltas[0], c, "end"), Fraction(0)))
    first = [(v, Fraction(j, n0)) for j, (v, _) in enumerate(first)]

    configs = [first]
    for i in range(1, len(spans)):
        configs.append(_shift(configs[-1], deltas[i - 1], deltas[i], Fraction(i)))

    tokens: List[Token] = []
    flat = [vs for conf in configs for vs in conf]
    for j, (v, start) in enumerate(flat):
        end = flat[j + 1][1] if j + 1 < len(flat) else Fraction(len(configs))
        tokens.append(Token(v.name, end - start))
    return {VARIABLE: Timeline(VARIABLE, tuple(tokens))}


def _shift(prev: List[Tuple[ReductionValue, Fraction]], d: Transition, d2: Transition,
           boundary: Fraction) -> List[Tuple[ReductionValue, Fraction]]:
    ends = [s for _, s in prev[1:]] + [boundary]
    by_counter: Dict[int, List[Tuple[str, Fraction, Fraction]]] = {1: [], 2: []}
    for (v, s), e in zip(prev[1:], ends[1:]):
        by_counter[v.counter].append((v.tag, s, e))

    out: List[Tuple[ReductionValue, Fraction]] = [(Main(d2), boundary)]
    for c in (1, 2):
        toks = by_counter[c]
        if c == d.counter and d.op == "inc":
            _, s_beg, _ = toks[0]
            prev_start = out[-1][1]
            out.append((Sec(d2, c, "beg"), (prev_start + s_beg + 1) / 2))
            out.append((Sec(d2, c, "#"), s_beg + 1))
            out.extend((Sec(d2, c, tag), s + 1) for tag, s, _ in toks[1:])
        elif c == d.counter and d.op == "dec":
            _, _, e_beg = toks[0]
            out.append((Sec(d2, c, "beg"), e_beg + 1))
            out.extend((Sec(d2, c, tag), s + 1) for tag, s, _ in toks[2:])
        else:
            out.extend((Sec(d2, c, tag), s + 1) for tag, s, _ in toks)
    return out


def check_unit_spacing(plan: MultiTimeline) -> Optional[Violation]:
    """Timing-only check: main tokens must start at 0, 1, 2, ... in order."""
    times = token_times(plan[VARIABLE])
    k = 0
    for i, tok in enumerate(plan[VARIABLE].tokens):
        if isinstance(parse_value(tok.value), Main):
            if times[i][0] != k:
                return Violation("unit-spacing", f"main token {i} starts at {times[i][0]}, expected {k}", k)
            k += 1
    return None


def mutate_witness(plan: MultiTimeline, mutation: str, configuration: int = 1,
                   counter: int = 1) -> MultiTimeline:
    """A transition-consistent variant of a witness that breaks one requirement.

    ``configuration`` is 1-based.  ``insert_hash`` splits the ``beg`` token
    of the chosen counter and inserts a ``#`` in its second half;
    ``delete_hash`` removes the first ``#`` and hands its duration to the
    ``beg`` token; ``stretch_config`` lengthens the configuration's last
    token by 1/10; ``swap_tags`` exchanges the chosen counter's ``beg`` and
    ``end`` tokens, which the transition function only allows in degenerate
    cases.
    """
    if mutation not in MUTATIONS:
        raise MutationError(f"unknown mutation {mutation!r}")
    tokens = list(plan[VARIABLE].tokens)
    word = [parse_value(t.value) for t in tokens]
    spans = _parse(word)
    if not 1 <= configuration <= len(spans):
        raise MutationError(f"no configuration {configuration}; the plan has {len(spans)}")
    span = spans[configuration - 1]
    d = span.delta
    beg, hashes, end = span.counters[counter - 1]
    initial = spans[0].delta

    if mutation == "insert_hash":
        if _no_hash(d, counter, initial):
            raise MutationError(f"counter {counter} of configuration {configuration} cannot hold a #")
        half = tokens[beg].duration / 2
        tokens[beg] = Token(tokens[beg].value, half)
        tokens.insert(beg + 1, Token(Sec(d, counter, "#").name, half))
    elif mutation == "delete_hash":
        if not hashes:
            raise MutationError(f"counter {counter} of configuration {configuration} has no #")
        h = hashes[0]
        gone = tokens.pop(h)
        tokens[h - 1] = Token(tokens[h - 1].value, tokens[h - 1].duration + gone.duration)
    elif mutation == "stretch_config":
        if configuration == len(spans):
            # nothing bounds the length of the final configuration
            raise MutationError("the last configuration has no successor to be one unit away from")
        last = span.stop - 1
        tokens[last] = Token(tokens[last].value, tokens[last].duration + Fraction(1, 10))
    else:
        tokens[beg], tokens[end] = Token(tokens[end].value, tokens[beg].duration), \
            Token(tokens[beg].value, tokens[end].duration)
        swapped = [parse_value(t.value) for t in tokens]
        for i in range(1, len(swapped)):
            if not may_follow(swapped[i - 1], swapped[i], initial):
                raise MutationError(f"swapping tags breaks the transition function at token {i}")
    return {VARIABLE: Timeline(VARIABLE, tuple(tokens))}
