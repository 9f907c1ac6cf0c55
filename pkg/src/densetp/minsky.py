"""Two-counter Minsky machines: structure checks, one-step successors, halting search."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, NamedTuple, Optional, Set, Tuple

from .model import Violation

__all__ = [
    "OPS", "Transition", "Machine", "Configuration", "Computation",
    "validate_machine", "apply_transition", "successors", "step", "run",
]

OPS = ("inc", "dec", "zero")


@dataclass(frozen=True)
class Transition:
    source: str
    op: str
    counter: int
    target: str

    def __post_init__(self) -> None:
        if self.op not in OPS:
            raise ValueError(f"unknown instruction {self.op!r}")
        if self.counter not in (1, 2):
            raise ValueError(f"counter must be 1 or 2, got {self.counter!r}")

    @property
    def name(self) -> str:
        """Identifier used for this transition's values in a compiled domain."""
        return f"{self.source}:{self.op}{self.counter}:{self.target}"

    def __str__(self) -> str:
        return f"{self.source} --{self.op}{self.counter}--> {self.target}"


@dataclass(frozen=True)
class Machine:
    initial: str
    halting: str
    transitions: Tuple[Transition, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "transitions", tuple(self.transitions))

    @property
    def locations(self) -> Tuple[str, ...]:
        seen: Dict[str, None] = {self.initial: None, self.halting: None}
        for t in self.transitions:
            seen.setdefault(t.source)
            seen.setdefault(t.target)
        return tuple(seen)

    @property
    def initial_transition(self) -> Transition:
        """The unique transition leaving the initial location."""
        out = [t for t in self.transitions if t.source == self.initial]
        if len(out) != 1:
            raise ValueError(f"expected exactly one transition from {self.initial!r}, found {len(out)}")
        return out[0]


class Configuration(NamedTuple):
    location: str
    counters: Tuple[int, int]

    def __str__(self) -> str:
        return f"({self.location}, {self.counters[0]}, {self.counters[1]})"


@dataclass(frozen=True)
class Computation:
    """A run of the machine.

    ``transitions[i]`` justifies the step from ``configurations[i]`` to
    ``configurations[i + 1]`` when known.
    """

    configurations: Tuple[Configuration, ...]
    transitions: Optional[Tuple[Transition, ...]] = None

    def __post_init__(self) -> None:
        if not self.configurations:
            raise ValueError("a computation has at least one configuration")
        object.__setattr__(self, "configurations", tuple(self.configurations))
        if self.transitions is not None:
            object.__setattr__(self, "transitions", tuple(self.transitions))
            if len(self.transitions) != len(self.configurations) - 1:
                raise ValueError("need one transition per step")

    def __len__(self) -> int:
        return len(self.configurations)


def validate_machine(machine: Machine) -> Optional[Violation]:
    """Check the structural assumptions the reduction relies on."""
    if machine.initial == machine.halting:
        return Violation("init-halt", "initial and halting locations coincide")
    if len(set(machine.transitions)) != len(machine.transitions):
        return Violation("duplicate", "a transition is listed twice")
    for i, t in enumerate(machine.transitions):
        if t.source == machine.halting:
            return Violation("from-halt", f"transition {t} leaves the halting location", i)
        if t.target == machine.initial:
            return Violation("to-init", f"transition {t} enters the initial location", i)
    n_init = sum(t.source == machine.initial for t in machine.transitions)
    if n_init != 1:
        return Violation("init-unique",
                         f"{n_init} transitions leave the initial location; exactly one is required")
    return None


def apply_transition(t: Transition, counters: Tuple[int, int]) -> Optional[Tuple[int, int]]:
    c = t.counter - 1
    vals = list(counters)
    if t.op == "inc":
        vals[c] += 1
    elif t.op == "dec":
        if vals[c] == 0:
            return None
        vals[c] -= 1
    elif vals[c] != 0:
        return None
    return (vals[0], vals[1])


def successors(machine: Machine, conf: Configuration) -> List[Tuple[Transition, Configuration]]:
    """Every enabled transition paired with the configuration it produces."""
    out = []
    for t in machine.transitions:
        if t.source == conf.location:
            counters = apply_transition(t, conf.counters)
            if counters is not None:
                out.append((t, Configuration(t.target, counters)))
    return out


def step(machine: Machine, conf: Configuration) -> Set[Configuration]:
    return {c for _, c in successors(machine, conf)}


def run(machine: Machine, max_steps: int) -> Optional[Computation]:
    """Shortest computation from the all-zero initial configuration to the halting location.

    Breadth-first with deduplication on configurations; gives up after
    ``max_steps`` steps.
    """
    start = Configuration(machine.initial, (0, 0))
    parent: Dict[Configuration, Optional[Tuple[Configuration, Transition]]] = {start: None}
    frontier = deque([start])
    for _ in range(max_steps):
        nxt: deque = deque()
        while frontier:
            conf = frontier.popleft()
            for t, succ in successors(machine, conf):
                if succ in parent:
                    continue
                parent[succ] = (conf, t)
                if succ.location == machine.halting:
                    return _trace(parent, succ)
                nxt.append(succ)
        if not nxt:
            return None
        frontier = nxt
    return None


def _trace(parent, last: Configuration) -> Computation:
    confs = [last]
    trans = []
    link = parent[last]
    while link is not None:
        prev, t = link
        confs.append(prev)
        trans.append(t)
        link = parent[prev]
    return Computation(tuple(reversed(confs)), tuple(reversed(trans)))
