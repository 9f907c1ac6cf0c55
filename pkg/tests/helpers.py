"""Shared fixtures data, random instance generators and independent oracles."""

from __future__ import annotations

import itertools
import random
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import LinearConstraint, milp

from densetp.constraints import ConstraintSystem
from densetp.minsky import Machine, Transition
from densetp.model import (
    Domain, Event, ExistentialStatement, Interval, IntervalAtom, PointAtom, Quantifier,
    StateVariable, Timeline, Token, TriggerlessRule, TriggerRule,
)

T = Transition

M1 = Machine("qi", "qh", (T("qi", "inc", 1, "q1"), T("q1", "dec", 1, "q2"), T("q2", "zero", 1, "qh")))
M2 = Machine("qi", "qh", (T("qi", "inc", 1, "q1"), T("q1", "inc", 1, "q1")))
# counter 1 up to 3, moved to counter 2, then counted down
TRANSFER = Machine("qi", "qh", (
    T("qi", "inc", 1, "a"), T("a", "inc", 1, "b"), T("b", "inc", 1, "c"),
    T("c", "dec", 1, "d"), T("d", "inc", 2, "c"), T("c", "zero", 1, "e"),
    T("e", "dec", 2, "e"), T("e", "zero", 2, "qh")))
# counter 2 := 2 * 3
DOUBLE = Machine("qi", "qh", (
    T("qi", "inc", 1, "a"), T("a", "inc", 1, "b"), T("b", "inc", 1, "c"),
    T("c", "dec", 1, "d"), T("d", "inc", 2, "e"), T("e", "inc", 2, "c"),
    T("c", "zero", 1, "qh")))

HALTING_MACHINES = {"M1": M1, "transfer": TRANSFER, "double": DOUBLE}


def abc_variable() -> StateVariable:
    """x with a -> b -> c -> b, D(a)=[5,8], D(b)=[1,4], D(c)=[2,inf[."""
    return StateVariable(
        "x", ("a", "b", "c"),
        {"a": ("b",), "b": ("c",), "c": ("b",)},
        {"a": Interval.closed(5, 8), "b": Interval.closed(1, 4), "c": Interval.at_least(2)})


def abc_timeline() -> Timeline:
    return Timeline("x", (Token("a", 7), Token("b", 3), Token("c", Fraction(39, 10))))


# --------------------------------------------------------------------------
# Random instances
# --------------------------------------------------------------------------

DURATIONS = [Fraction(0), Fraction(1, 2), Fraction(1), Fraction(3, 2), Fraction(2), Fraction(3)]


def random_interval(rng: random.Random, top: int = 4) -> Interval:
    lo = rng.randint(0, top - 1)
    if rng.random() < 0.3:
        return Interval(lo, None, rng.random() < 0.5)
    hi = rng.randint(lo, top)
    if hi == lo:
        return Interval(lo, hi, True, True)
    return Interval(lo, hi, rng.random() < 0.6, rng.random() < 0.6)


def random_atom(rng: random.Random, names: Sequence[str]):
    ev = lambda: rng.choice([Event.START, Event.END])
    if rng.random() < 0.75 or not names:
        return IntervalAtom(rng.choice(names), ev(), rng.choice(names), ev(), random_interval(rng))
    return PointAtom(rng.choice(names), ev(), rng.randint(0, 6), random_interval(rng), rng.random() < 0.5)


def random_plan(rng: random.Random, max_tokens: int = 6) -> Dict[str, Timeline]:
    plan = {}
    for var in rng.sample(["x", "y"], rng.randint(1, 2)):
        n = rng.randint(1, max_tokens)
        plan[var] = Timeline(var, tuple(Token(rng.choice("abc"), rng.choice(DURATIONS)) for _ in range(n)))
    return plan


def random_rule(rng: random.Random, plan, max_quantifiers: int = 3, trigger: Optional[bool] = True):
    variables = sorted(plan)
    if trigger is None:
        trigger = rng.random() < 0.8
    trig = Quantifier("o0", rng.choice(variables), rng.choice("abc")) if trigger else None
    disjuncts = []
    for _ in range(rng.randint(1, 3)):
        k = rng.randint(0, max_quantifiers)
        quants = tuple(Quantifier(f"o{i}", rng.choice(variables), rng.choice("abc")) for i in range(1, k + 1))
        names = [q.name for q in quants] + (["o0"] if trig else [])
        atoms = tuple(random_atom(rng, names) for _ in range(rng.randint(0, 3))) if names else ()
        disjuncts.append(ExistentialStatement(quants, atoms))
    if trig is None:
        return TriggerlessRule(tuple(disjuncts))
    return TriggerRule(trig, tuple(disjuncts))


def random_system(rng: random.Random, max_vars: int = 4, max_bound: int = 3) -> ConstraintSystem:
    n = rng.randint(2, max_vars)
    names = ["zero", "a", "b", "c"][:n]
    cs = ConstraintSystem(list(names))
    for _ in range(rng.randint(1, 6)):
        x, y = rng.choice(names), rng.choice(names)
        if x == y and rng.random() < 0.8:
            continue
        cs.add(x, y, rng.randint(-max_bound, max_bound), rng.random() < 0.4)
    return cs


def random_small_domain(rng: random.Random) -> Domain:
    """One or two variables, two values each, a few one-quantifier rules."""
    variables = []
    for name in rng.sample(["x", "y"], rng.randint(1, 2)):
        values = ("a", "b")
        trans = {v: tuple(u for u in values if rng.random() < 0.6) for v in values}
        durs = {v: random_interval(rng, 3) for v in values}
        variables.append(StateVariable(name, values, trans, durs))
    names = [v.name for v in variables]
    rules = []
    if rng.random() < 0.7:
        ds = []
        for _ in range(rng.randint(1, 2)):
            q = Quantifier("o", rng.choice(names), rng.choice("ab"))
            atoms = (PointAtom("o", rng.choice([Event.START, Event.END]), rng.randint(0, 3),
                               random_interval(rng, 3), rng.random() < 0.5),) if rng.random() < 0.5 else ()
            ds.append(ExistentialStatement((q,), atoms))
        rules.append(TriggerlessRule(tuple(ds)))
    for _ in range(rng.randint(0, 2)):
        trig = Quantifier("o", rng.choice(names), rng.choice("ab"))
        ds = []
        for _ in range(rng.randint(1, 2)):
            if rng.random() < 0.2:
                ds.append(ExistentialStatement((), (random_atom(rng, ["o"]),)))
                continue
            q = Quantifier("p", rng.choice(names), rng.choice("ab"))
            atoms = tuple(random_atom(rng, ["o", "p"]) for _ in range(rng.randint(1, 2)))
            ds.append(ExistentialStatement((q,), atoms))
        rules.append(TriggerRule(trig, tuple(ds)))
    return Domain(tuple(variables), tuple(rules))


# --------------------------------------------------------------------------
# Oracles
# --------------------------------------------------------------------------

def grid_feasible(cs: ConstraintSystem) -> bool:
    """Exhaustive search on the grid of multiples of 1/(n+1).

    With n variables and integer bounds of magnitude at most M, a feasible
    system has a solution on that grid whose values span less than
    (n-1)*M + 1; translating so the smallest value is 0, it suffices to try
    each variable at 0 and the others in [0, (n-1)*M + 1].
    """
    names = list(cs.variables)
    n = len(names)
    m = max([abs(c.bound) for c in cs.constraints] + [1])
    den = n + 1
    top = int(((n - 1) * m + 1) * den)
    idx = {v: i for i, v in enumerate(names)}
    axis = np.arange(top + 1, dtype=np.int32)
    for pinned in range(n):
        grids = np.meshgrid(*[np.zeros(1, dtype=np.int32) if i == pinned else axis for i in range(n)],
                            indexing="ij", sparse=True)
        ok = np.ones([1] * n, dtype=bool)
        for c in cs.constraints:
            diff = grids[idx[c.x]] - grids[idx[c.y]]
            lim = c.bound * den
            assert lim.denominator == 1
            ok = ok & ((diff < int(lim)) if c.strict else (diff <= int(lim)))
        if ok.any():
            return True
    return False


def _milp_skeleton_feasible(domain: Domain, sk: Dict[str, Tuple[str, ...]], semantics: str,
                            horizon: int = 60) -> bool:
    """Existence of durations making ``sk`` a plan, as a mixed-integer program.

    Times are the token boundaries of every timeline; one binary per way of
    discharging each obligation; strict inequalities share a slack that is
    maximised and must come out positive.
    """
    tvar: Dict[Tuple[str, int], int] = {}
    for var in domain.variables:
        for i in range(len(sk[var.name]) + 1):
            tvar[(var.name, i)] = len(tvar)
    n_t = len(tvar)

    def ev(ref, event):
        var, i = ref
        return tvar[(var, i if event is Event.START else i + 1)]

    rows: List[Tuple[Dict[int, float], float, bool, Optional[int]]] = []   # coeffs, rhs, strict, binary

    def diff_in(hi, lo, interval, offset, z):
        # value(hi) - value(lo) + offset in interval ; hi/lo may be None (constant 0)
        def coeffs(sign):
            c = {}
            if hi is not None:
                c[hi] = c.get(hi, 0) + sign
            if lo is not None:
                c[lo] = c.get(lo, 0) - sign
            return c
        rows.append((coeffs(-1), offset - interval.lo, not interval.lo_closed, z))
        if interval.hi is not None:
            rows.append((coeffs(1), interval.hi - offset, not interval.hi_closed, z))

    for var in domain.variables:
        for i, v in enumerate(sk[var.name]):
            diff_in(tvar[(var.name, i + 1)], tvar[(var.name, i)], var.durations[v], 0, None)

    positions: Dict[Tuple[str, str], List[Tuple[str, int]]] = {}
    for var, vals in sk.items():
        for i, v in enumerate(vals):
            positions.setdefault((var, v), []).append((var, i))

    groups: List[List[int]] = []
    n_z = 0
    for rule in domain.rules:
        if isinstance(rule, TriggerRule):
            obligations = [{rule.trigger.name: ref}
                           for ref in positions.get((rule.trigger.variable, rule.trigger.value), [])]
        else:
            obligations = [{}]
        for fixed in obligations:
            group = []
            for d in rule.disjuncts:
                pools = [positions.get((q.variable, q.value), []) for q in d.quantifiers]
                for combo in itertools.product(*pools):
                    lam = dict(fixed)
                    lam.update(zip(d.quantified, combo))
                    z = n_t + n_z
                    n_z += 1
                    group.append(z)
                    if semantics == "future" and fixed:
                        t0 = ev(next(iter(fixed.values())), Event.START)
                        for ref in combo:
                            diff_in(ev(ref, Event.START), t0, Interval.at_least(0), 0, z)
                    for a in d.atoms:
                        if isinstance(a, IntervalAtom):
                            diff_in(ev(lam[a.right], a.right_event), ev(lam[a.left], a.left_event), a.interval, 0, z)
                        elif a.token_first:
                            diff_in(None, ev(lam[a.token], a.event), a.interval, a.bound, z)
                        else:
                            diff_in(ev(lam[a.token], a.event), None, a.interval, -a.bound, z)
            if not group:
                return False
            groups.append(group)

    n = n_t + n_z + 1
    s_idx = n - 1
    big = 4 * horizon
    A, lb, ub = [], [], []
    for coeffs, rhs, strict, z in rows:
        row = np.zeros(n)
        for k, v in coeffs.items():
            row[k] += v
        if strict:
            row[s_idx] = 1.0
        bound = float(rhs)
        if z is not None:
            row[z] = big
            bound += big
        A.append(row)
        lb.append(-np.inf)
        ub.append(bound)
    for group in groups:
        row = np.zeros(n)
        row[group] = 1
        A.append(row)
        lb.append(1)
        ub.append(np.inf)
    for var in domain.variables:
        row = np.zeros(n)
        row[tvar[(var.name, 0)]] = 1
        A.append(row)
        lb.append(0)
        ub.append(0)
    c = np.zeros(n)
    c[s_idx] = -1
    integrality = np.zeros(n)
    integrality[n_t:n_t + n_z] = 1
    lo_b = np.zeros(n)
    hi_b = np.full(n, float(horizon))
    hi_b[n_t:n_t + n_z] = 1
    hi_b[s_idx] = 1
    from scipy.optimize import Bounds
    res = milp(c, integrality=integrality, bounds=Bounds(lo_b, hi_b),
               constraints=LinearConstraint(np.array(A), lb, ub) if A else None)
    if res.status != 0:
        return False
    has_strict = any(strict for _, _, strict, _ in rows)
    return not has_strict or -res.fun > 1e-6


def exhaustive_plan_exists(domain: Domain, bound: int, semantics: str) -> bool:
    """Plan existence within ``bound`` tokens per timeline, by brute skeleton enumeration."""
    per_var = []
    for var in domain.variables:
        seqs = []
        for n in range(1, bound + 1):
            for seq in itertools.product(var.values, repeat=n):
                if all(b in var.transitions[a] for a, b in zip(seq, seq[1:])):
                    seqs.append(seq)
        per_var.append(seqs)
    for combo in itertools.product(*per_var):
        sk = {v.name: s for v, s in zip(domain.variables, combo)}
        if _milp_skeleton_feasible(domain, sk, semantics):
            return True
    return False
