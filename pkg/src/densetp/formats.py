"""Text formats: JSON for domains and plans, a line format for machines.

Durations are written as ``"p/q"`` or integer strings.  On input, decimal
literals such as ``"3.9"`` are read exactly; anything else (expressions,
exponents, negative numbers) is rejected.
"""

from __future__ import annotations

import json
import re
from fractions import Fraction
from typing import Any, Dict, List, Optional, Union

from .minsky import Machine, Transition
from .model import (
    Domain, Event, ExistentialStatement, Interval, IntervalAtom, ModelError, MultiTimeline,
    PointAtom, Quantifier, StateVariable, Timeline, Token, TriggerlessRule, TriggerRule,
)

__all__ = [
    "FormatError", "parse_rational", "format_rational",
    "domain_to_dict", "domain_from_dict", "serialize_domain", "parse_domain",
    "plan_to_dict", "plan_from_dict", "serialize_plan", "parse_plan",
    "serialize_machine", "parse_machine",
]


class FormatError(ValueError):
    """Malformed input; ``where`` is a JSON path or ``line N``."""

    def __init__(self, message: str, where: Optional[str] = None):
        super().__init__(f"{where}: {message}" if where else message)
        self.where = where


_RATIONAL_RE = re.compile(r"^\s*(\d+)(?:/(\d+)|\.(\d+))?\s*$")


def parse_rational(text: Union[str, int]) -> Fraction:
    if isinstance(text, bool):
        raise FormatError(f"not a rational literal: {text!r}")
    if isinstance(text, int):
        if text < 0:
            raise FormatError(f"negative value {text}")
        return Fraction(text)
    if not isinstance(text, str):
        raise FormatError(f"not a rational literal: {text!r}")
    m = _RATIONAL_RE.match(text)
    if not m:
        raise FormatError(f"not a rational literal: {text!r}")
    whole, den, frac = m.groups()
    if den is not None:
        if int(den) == 0:
            raise FormatError(f"zero denominator in {text!r}")
        return Fraction(int(whole), int(den))
    if frac is not None:
        return Fraction(f"{whole}.{frac}")
    return Fraction(int(whole))


def format_rational(q: Fraction) -> str:
    return str(q)


def _load(text: str) -> Any:
    try:
        # keep decimal literals exact
        return json.loads(text, parse_float=lambda s: s)
    except json.JSONDecodeError as exc:
        raise FormatError(exc.msg, f"line {exc.lineno} column {exc.colno}") from None


def _get(obj: Any, key: str, path: str, kind: type = str) -> Any:
    if not isinstance(obj, dict):
        raise FormatError("expected an object", path)
    if key not in obj:
        raise FormatError(f"missing key {key!r}", path)
    val = obj[key]
    if kind is not None and not isinstance(val, kind):
        raise FormatError(f"{key!r} must be of type {kind.__name__}", path)
    return val


def _interval(text: Any, path: str) -> Interval:
    if not isinstance(text, str):
        raise FormatError("interval must be a string", path)
    try:
        return Interval.parse(text)
    except ModelError as exc:
        raise FormatError(str(exc), path) from None


def _event(text: Any, path: str) -> Event:
    try:
        return Event(text)
    except ValueError:
        raise FormatError(f"event must be 's' or 'e', got {text!r}", path) from None


# --------------------------------------------------------------------------
# Domains
# --------------------------------------------------------------------------

def _atom_to_dict(atom) -> Dict[str, Any]:
    if isinstance(atom, IntervalAtom):
        return {"kind": "interval", "left": atom.left, "left_event": atom.left_event.value,
                "right": atom.right, "right_event": atom.right_event.value,
                "interval": str(atom.interval)}
    return {"kind": "point", "token": atom.token, "event": atom.event.value, "bound": atom.bound,
            "interval": str(atom.interval),
            "order": "token-first" if atom.token_first else "constant-first"}


def _atom_from_dict(obj: Any, path: str):
    kind = _get(obj, "kind", path)
    if kind == "interval":
        return IntervalAtom(_get(obj, "left", path), _event(_get(obj, "left_event", path), path),
                            _get(obj, "right", path), _event(_get(obj, "right_event", path), path),
                            _interval(_get(obj, "interval", path), path))
    if kind == "point":
        bound = _get(obj, "bound", path, int)
        order = obj.get("order", "token-first")
        if order not in ("token-first", "constant-first"):
            raise FormatError(f"unknown point atom order {order!r}", path)
        try:
            return PointAtom(_get(obj, "token", path), _event(_get(obj, "event", path), path), bound,
                             _interval(_get(obj, "interval", path), path), order == "token-first")
        except ModelError as exc:
            raise FormatError(str(exc), path) from None
    raise FormatError(f"unknown atom kind {kind!r}", path)


def _quant_to_dict(q: Quantifier) -> Dict[str, str]:
    return {"name": q.name, "variable": q.variable, "value": q.value}


def _quant_from_dict(obj: Any, path: str) -> Quantifier:
    return Quantifier(_get(obj, "name", path), _get(obj, "variable", path), _get(obj, "value", path))


def domain_to_dict(domain: Domain) -> Dict[str, Any]:
    variables = [{"name": v.name, "values": list(v.values),
                  "transitions": {k: list(s) for k, s in v.transitions.items()},
                  "durations": {k: str(i) for k, i in v.durations.items()}}
                 for v in domain.variables]
    rules = []
    for r in domain.rules:
        entry: Dict[str, Any] = {}
        if isinstance(r, TriggerRule):
            entry["trigger"] = _quant_to_dict(r.trigger)
        entry["disjuncts"] = [{"quantifiers": [_quant_to_dict(q) for q in d.quantifiers],
                               "atoms": [_atom_to_dict(a) for a in d.atoms]}
                              for d in r.disjuncts]
        rules.append(entry)
    return {"variables": variables, "rules": rules}


def domain_from_dict(obj: Any) -> Domain:
    variables = []
    for i, v in enumerate(_get(obj, "variables", "$", list)):
        path = f"variables[{i}]"
        values = _get(v, "values", path, list)
        trans = _get(v, "transitions", path, dict)
        durs = _get(v, "durations", path, dict)
        try:
            variables.append(StateVariable(
                _get(v, "name", path), tuple(values),
                {k: tuple(s) for k, s in trans.items()},
                {k: _interval(d, f"{path}.durations.{k}") for k, d in durs.items()}))
        except ModelError as exc:
            raise FormatError(str(exc), path) from None
    rules = []
    for i, r in enumerate(_get(obj, "rules", "$", list)):
        path = f"rules[{i}]"
        disjuncts = []
        for j, d in enumerate(_get(r, "disjuncts", path, list)):
            dpath = f"{path}.disjuncts[{j}]"
            quants = tuple(_quant_from_dict(q, f"{dpath}.quantifiers[{k}]")
                           for k, q in enumerate(_get(d, "quantifiers", dpath, list)))
            atoms = tuple(_atom_from_dict(a, f"{dpath}.atoms[{k}]")
                          for k, a in enumerate(_get(d, "atoms", dpath, list)))
            disjuncts.append(ExistentialStatement(quants, atoms))
        trig = r.get("trigger") if isinstance(r, dict) else None
        if trig is None:
            rules.append(TriggerlessRule(tuple(disjuncts)))
        else:
            rules.append(TriggerRule(_quant_from_dict(trig, f"{path}.trigger"), tuple(disjuncts)))
    try:
        return Domain(tuple(variables), tuple(rules))
    except ModelError as exc:
        raise FormatError(str(exc)) from None


def serialize_domain(domain: Domain) -> str:
    return json.dumps(domain_to_dict(domain), indent=2, ensure_ascii=False) + "\n"


def parse_domain(text: str) -> Domain:
    return domain_from_dict(_load(text))


# --------------------------------------------------------------------------
# Plans
# --------------------------------------------------------------------------

def plan_to_dict(plan: MultiTimeline) -> Dict[str, Any]:
    return {"timelines": {name: [[t.value, format_rational(t.duration)] for t in tl.tokens]
                          for name, tl in plan.items()}}


def plan_from_dict(obj: Any, domain: Optional[Domain] = None) -> MultiTimeline:
    timelines = _get(obj, "timelines", "$", dict)
    plan: MultiTimeline = {}
    for name, toks in timelines.items():
        path = f"timelines.{name}"
        var = None
        if domain is not None:
            try:
                var = domain.variable(name)
            except KeyError:
                raise FormatError(f"unknown state variable {name!r}", path) from None
        if not isinstance(toks, list) or not toks:
            raise FormatError("a timeline is a non-empty list of [value, duration] pairs", path)
        out = []
        for i, pair in enumerate(toks):
            tpath = f"{path}[{i}]"
            if not isinstance(pair, list) or len(pair) != 2 or not isinstance(pair[0], str):
                raise FormatError("expected [value, duration]", tpath)
            if var is not None and pair[0] not in var.durations:
                raise FormatError(f"{pair[0]!r} is not a value of {name!r}", tpath)
            try:
                out.append(Token(pair[0], parse_rational(pair[1])))
            except FormatError as exc:
                raise FormatError(str(exc), tpath) from None
        plan[name] = Timeline(name, tuple(out))
    if domain is not None:
        missing = set(domain.variable_names) - set(plan)
        if missing:
            raise FormatError(f"no timeline for {sorted(missing)[0]!r}", "timelines")
    return plan


def serialize_plan(plan: MultiTimeline) -> str:
    return json.dumps(plan_to_dict(plan), indent=2, ensure_ascii=False) + "\n"


def parse_plan(text: str, domain: Optional[Domain] = None) -> MultiTimeline:
    return plan_from_dict(_load(text), domain)


# --------------------------------------------------------------------------
# Machines
# --------------------------------------------------------------------------

_IDENT = re.compile(r"^[A-Za-z0-9_]+$")


def serialize_machine(machine: Machine) -> str:
    lines = [f"init {machine.initial}", f"halt {machine.halting}"]
    lines += [f"trans {t.source} {t.op} {t.counter} {t.target}" for t in machine.transitions]
    return "\n".join(lines) + "\n"


def parse_machine(text: str) -> Machine:
    """Read ``init``/``halt``/``trans`` lines; ``#`` starts a comment."""
    init = halt = None
    trans: List[Transition] = []
    for n, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        where = f"line {n}"
        parts = line.split()
        for p in parts[1:]:
            if not _IDENT.match(p):
                raise FormatError(f"bad identifier {p!r}", where)
        if parts[0] in ("init", "halt"):
            if len(parts) != 2:
                raise FormatError(f"expected '{parts[0]} <location>'", where)
            if parts[0] == "init":
                if init is not None:
                    raise FormatError("initial location given twice", where)
                init = parts[1]
            else:
                if halt is not None:
                    raise FormatError("halting location given twice", where)
                halt = parts[1]
        elif parts[0] == "trans":
            if len(parts) != 5 or parts[2] not in ("inc", "dec", "zero") or parts[3] not in ("1", "2"):
                raise FormatError("expected 'trans <from> <inc|dec|zero> <1|2> <to>'", where)
            trans.append(Transition(parts[1], parts[2], int(parts[3]), parts[4]))
        else:
            raise FormatError(f"unknown directive {parts[0]!r}", where)
    if init is None or halt is None:
        raise FormatError("machine needs both 'init' and 'halt' lines")
    return Machine(init, halt, tuple(trans))
