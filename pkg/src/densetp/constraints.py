"""Difference constraints ``x - y <= c`` / ``x - y < c`` over the rationals.

Feasibility is the absence of a negative cycle when edge weights are pairs
``(c, -1 if strict else 0)`` compared lexicographically: a cycle is
infeasible when its bound sum is negative, or zero with a strict edge on it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Tuple, Union

from .model import as_time

__all__ = ["ZERO", "Constraint", "ConstraintSystem", "feasible", "check_solution", "DifferenceGraph"]

ZERO = "zero"

Weight = Tuple[Fraction, int]


@dataclass(frozen=True)
class Constraint:
    """``x - y <= bound`` (``<`` when strict)."""

    x: str
    y: str
    bound: Fraction
    strict: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "bound", as_time(self.bound))

    def holds(self, values: Dict[str, Fraction]) -> bool:
        diff = values[self.x] - values[self.y]
        return diff < self.bound if self.strict else diff <= self.bound

    @property
    def weight(self) -> Weight:
        return (self.bound, -1 if self.strict else 0)

    def __str__(self) -> str:
        return f"{self.x} - {self.y} {'<' if self.strict else '<='} {self.bound}"


@dataclass
class ConstraintSystem:
    variables: List[str] = field(default_factory=lambda: [ZERO])
    constraints: List[Constraint] = field(default_factory=list)

    def __post_init__(self) -> None:
        if ZERO not in self.variables:
            self.variables.insert(0, ZERO)
        self._known = set(self.variables)

    def add_variable(self, name: str) -> None:
        if name not in self._known:
            self._known.add(name)
            self.variables.append(name)

    def add(self, x: str, y: str, bound: Union[int, Fraction], strict: bool = False) -> None:
        self.add_variable(x)
        self.add_variable(y)
        self.constraints.append(Constraint(x, y, bound, strict))

    def extend(self, constraints: Iterable[Constraint]) -> None:
        for c in constraints:
            self.add(c.x, c.y, c.bound, c.strict)


def check_solution(cs: ConstraintSystem, values: Dict[str, Fraction]) -> bool:
    return all(c.holds(values) for c in cs.constraints)


def feasible(cs: ConstraintSystem) -> Optional[Dict[str, Fraction]]:
    """A rational solution with ``zero`` mapped to 0, or None if the system is infeasible.

    Bellman-Ford from a virtual source gives lexicographic potentials
    ``(b, k)``; the solution is ``b + k * eps`` with ``eps`` the smallest
    positive slack of the ``b`` part divided by ``len(variables) + 1``.
    """
    names = list(cs.variables)
    n = len(names)
    dist: Dict[str, Weight] = {v: (Fraction(0), 0) for v in names}
    edges = [(c.y, c.x, c.weight) for c in cs.constraints]
    for _ in range(n + 1):
        changed = False
        for u, v, (b, k) in edges:
            du = dist[u]
            cand = (du[0] + b, du[1] + k)
            if cand < dist[v]:
                dist[v] = cand
                changed = True
        if not changed:
            break
    else:
        return None

    slacks = [c.bound - (dist[c.x][0] - dist[c.y][0]) for c in cs.constraints]
    positive = [s for s in slacks if s > 0]
    eps = min(positive) / (n + 1) if positive else Fraction(1)
    raw = {v: b + k * eps for v, (b, k) in dist.items()}
    shift = raw[ZERO]
    values = {v: x - shift for v, x in raw.items()}
    if not check_solution(cs, values):
        raise AssertionError("internal error: potential-based solution violates a constraint")
    return values


class DifferenceGraph:
    """Incremental negative-cycle detection with undo, for backtracking search.

    Potentials are kept valid for every edge added so far; adding an edge
    propagates from its head and fails as soon as the propagation would lower
    its tail, which can only happen through a cycle using the new edge.
    """

    def __init__(self) -> None:
        self.pot: Dict[str, Weight] = {}
        self.out: Dict[str, List[Tuple[str, Weight]]] = {}
        self._trail: List[Tuple[str, ...]] = []

    def mark(self) -> int:
        return len(self._trail)

    def undo(self, mark: int) -> None:
        while len(self._trail) > mark:
            entry = self._trail.pop()
            if entry[0] == "pot":
                self.pot[entry[1]] = entry[2]
            elif entry[0] == "edge":
                self.out[entry[1]].pop()
            else:
                del self.pot[entry[1]]
                del self.out[entry[1]]

    def _node(self, name: str) -> None:
        if name not in self.pot:
            self.pot[name] = (Fraction(0), 0)
            self.out[name] = []
            self._trail.append(("node", name))

    def add(self, c: Constraint) -> bool:
        """Add ``c``; False means the system became infeasible (state must be undone)."""
        y, x, w = c.y, c.x, c.weight
        self._node(x)
        self._node(y)
        self.out[y].append((x, w))
        self._trail.append(("edge", y))
        if x == y:
            return w >= (0, 0)
        py = self.pot[y]
        cand = (py[0] + w[0], py[1] + w[1])
        if not cand < self.pot[x]:
            return True
        self._set(x, cand)
        queue = [x]
        while queue:
            u = queue.pop()
            pu = self.pot[u]
            for v, (b, k) in self.out[u]:
                cand = (pu[0] + b, pu[1] + k)
                if cand < self.pot[v]:
                    if v == y:
                        return False
                    self._set(v, cand)
                    queue.append(v)
        return True

    def _set(self, v: str, w: Weight) -> None:
        self._trail.append(("pot", v, self.pot[v]))
        self.pot[v] = w
