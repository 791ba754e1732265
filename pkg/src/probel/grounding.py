"""Violated-clause detection with on-demand evaluation of datatype predicates.

eval atoms are never stored or turned into ILP variables: each grounding of a
template with an eval literal either evaluates it to true (the literal is
dropped from the emitted clause, it cannot help satisfy it) or to false (the
body can never fire, the grounding is skipped).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .model import BOT, INFINITE, OPERATORS, Nominal, is_infinite
from .translate import (
    Atom,
    ClauseTemplate,
    NomOf,
    PatternAtom,
    S_CONCEPT,
    S_CONCEPT_NONBOT,
    S_FEATURE,
    S_IND,
    S_NAMED_IND,
    S_OP,
    S_ROLE,
    S_VALUE,
    SuccessorOf,
    Var,
    atom_sort_key,
    is_anonymous,
    make_atom,
    successor_name,
    template_sort_key,
)

REAL = "real"
INTEGER = "integer"


def eval_op(o1: str, v1: Fraction, o2: str, v2: Fraction, domain: str = REAL) -> bool:
    """True iff every value satisfying (o1, v1) also satisfies (o2, v2).

    Each operator/value pair denotes a ray or a point; containment is decided
    by comparing endpoints and open/closed flags. Over the integer domain the
    rays are first snapped to integer endpoints, which makes e.g.
    (>, 1) a subset of (>=, 2).
    """
    if domain == INTEGER:
        return _eval_integer(o1, v1, o2, v2)
    if o2 == "=":
        return o1 == "=" and v1 == v2
    if o1 == "=":
        return _satisfies(v1, o2, v2)
    down1, down2 = o1 in ("<", "<="), o2 in ("<", "<=")
    if down1 != down2:
        return False
    if v1 != v2:
        return (v1 < v2) if down1 else (v1 > v2)
    closed1 = o1 in ("<=", ">=")
    open2 = o2 in ("<", ">")
    return not (closed1 and open2)


def _satisfies(x: Fraction, op: str, v: Fraction) -> bool:
    if op == "<":
        return x < v
    if op == "<=":
        return x <= v
    if op == "=":
        return x == v
    if op == ">=":
        return x >= v
    return x > v


def _int_ray(op: str, v: Fraction):
    """Normalize a restriction over the integers: ('down'|'up'|'point'|'empty', bound)."""
    if op == "<":
        return "down", math.ceil(v) - 1 if v.denominator == 1 else math.floor(v)
    if op == "<=":
        return "down", math.floor(v)
    if op == ">":
        return "up", math.floor(v) + 1 if v.denominator == 1 else math.ceil(v)
    if op == ">=":
        return "up", math.ceil(v)
    return ("point", v) if v.denominator == 1 else ("empty", None)


def _eval_integer(o1, v1, o2, v2) -> bool:
    kind1, b1 = _int_ray(o1, v1)
    kind2, b2 = _int_ray(o2, v2)
    if kind1 == "empty":
        return True
    if kind2 == "empty":
        return False
    if kind2 == "point":
        return kind1 == "point" and b1 == b2
    if kind1 == "point":
        return b1 <= b2 if kind2 == "down" else b1 >= b2
    if kind1 != kind2:
        return False
    return b1 <= b2 if kind1 == "down" else b1 >= b2


# ---------------------------------------------------------------------------
# Grounding
# ---------------------------------------------------------------------------

class EvidenceAtom:
    """A statement atom with its weight; deterministic atoms carry INFINITE."""

    __slots__ = ("atom", "weight", "origin")

    def __init__(self, atom: Atom, weight, origin: Optional[int] = None):
        self.atom = atom
        self.weight = weight
        self.origin = origin


@dataclass(frozen=True)
class ViolatedClause:
    """A ground clause falsified by the current assignment.

    positive holds the atoms occurring unnegated (the head, if any), negative
    the atoms occurring negated (the body). eval literals never appear.
    """

    positive: frozenset
    negative: frozenset
    weight: object
    template_id: str
    origin: Optional[int] = None

    def sort_key(self):
        return (
            template_sort_key(self.template_id),
            -1 if self.origin is None else self.origin,
            tuple(sorted(atom_sort_key(a) for a in self.positive)),
            tuple(sorted(atom_sort_key(a) for a in self.negative)),
        )


def _sort_ok(value, sort: str) -> bool:
    if sort == S_CONCEPT:
        return isinstance(value, (str, Nominal))
    if sort == S_CONCEPT_NONBOT:
        return isinstance(value, (str, Nominal)) and value != BOT
    if sort in (S_ROLE, S_FEATURE):
        return isinstance(value, str)
    if sort == S_IND:
        return isinstance(value, str)
    if sort == S_NAMED_IND:
        return isinstance(value, str) and not is_anonymous(value)
    if sort == S_OP:
        return value in OPERATORS
    if sort == S_VALUE:
        return isinstance(value, Fraction)
    raise ValueError(f"unknown sort {sort}")


def _unify(pattern: PatternAtom, atom: Atom, binding: dict) -> Optional[dict]:
    if pattern.pred != atom.pred or len(pattern.args) != len(atom.args):
        return None
    out = binding
    for parg, value in zip(pattern.args, atom.args):
        if isinstance(parg, Var):
            bound = out.get(parg.name, _UNBOUND)
            if bound is _UNBOUND:
                if not _sort_ok(value, parg.sort):
                    return None
                if out is binding:
                    out = dict(binding)
                out[parg.name] = value
            elif bound != value:
                return None
        elif isinstance(parg, NomOf):
            if not isinstance(value, Nominal):
                return None
            bound = out.get(parg.var.name, _UNBOUND)
            if bound is _UNBOUND:
                if out is binding:
                    out = dict(binding)
                out[parg.var.name] = value.individual
            elif bound != value.individual:
                return None
        elif parg != value:
            return None
    return out


_UNBOUND = object()


def _instantiate(pattern: PatternAtom, binding: dict) -> Atom:
    args = []
    for parg in pattern.args:
        if isinstance(parg, Var):
            args.append(binding[parg.name])
        elif isinstance(parg, NomOf):
            args.append(Nominal(binding[parg.var.name]))
        elif isinstance(parg, SuccessorOf):
            args.append(successor_name(binding[parg.x], binding[parg.r], binding[parg.b]))
        else:
            args.append(parg)
    return make_atom(pattern.pred, *args)


_EMPTY = ()


def _bound_positions(pattern: PatternAtom, binding: dict) -> int:
    count = 0
    for arg in pattern.args:
        if isinstance(arg, Var):
            count += arg.name in binding
        elif isinstance(arg, NomOf):
            count += arg.var.name in binding
        elif not isinstance(arg, SuccessorOf):
            count += 1
    return count


def _candidates(pattern: PatternAtom, binding: dict, index):
    """The smallest candidate atom list, probing per bound argument position."""
    by_pred, by_pos = index
    best = by_pred.get(pattern.pred, _EMPTY)
    for i, parg in enumerate(pattern.args):
        if isinstance(parg, Var):
            value = binding.get(parg.name, _UNBOUND)
            if value is _UNBOUND:
                continue
        elif isinstance(parg, NomOf):
            inner = binding.get(parg.var.name, _UNBOUND)
            if inner is _UNBOUND:
                continue
            value = Nominal(inner)
        elif isinstance(parg, SuccessorOf):
            continue
        else:
            value = parg
        probe = by_pos.get((pattern.pred, i, value), _EMPTY)
        if len(probe) < len(best):
            best = probe
            if not best:
                break
    return best


def _bindings(template: ClauseTemplate, index):
    body = [p for p in template.body if p.pred != "eval"]

    def extend(remaining, binding: dict):
        if not remaining:
            yield binding
            return
        pick = 0
        if len(remaining) > 1:
            pick = max(range(len(remaining)), key=lambda i: _bound_positions(remaining[i], binding))
        pattern = remaining[pick]
        rest = remaining[:pick] + remaining[pick + 1:]
        for atom in _candidates(pattern, binding, index):
            new = _unify(pattern, atom, binding)
            if new is not None:
                yield from extend(rest, new)

    for seed in template.seeds:
        yield from extend(body, dict(seed) if seed else {})


def _eval_value(arg, binding):
    return binding[arg.name] if isinstance(arg, Var) else arg


def find_violated(
    templates: Sequence[ClauseTemplate],
    evidence: Iterable[EvidenceAtom],
    current: frozenset,
    domain: str = REAL,
) -> list:
    """All template groundings with body satisfied and head falsified by
    ``current``, plus each violated weighted evidence unit clause.

    Grounding is join-driven: candidate substitutions are enumerated from the
    true atoms only, never by cross product. Results come back in canonical
    order (template id, then atom order) so callers are deterministic.
    """
    by_pred: dict = {}
    by_pos: dict = {}
    for atom in current:
        by_pred.setdefault(atom.pred, []).append(atom)
        for i, arg in enumerate(atom.args):
            by_pos.setdefault((atom.pred, i, arg), []).append(atom)
    index = (by_pred, by_pos)

    found = set()
    for template in templates:
        evals = [p for p in template.body if p.pred == "eval"]
        for binding in _bindings(template, index):
            if template.head is not None:
                head = _instantiate(template.head, binding)
                if head in current:
                    continue
                positive = frozenset((head,))
            else:
                positive = frozenset()
            if evals and not all(
                eval_op(*(_eval_value(a, binding) for a in ev.args), domain=domain) for ev in evals
            ):
                continue
            negative = frozenset(_instantiate(p, binding) for p in template.body if p.pred != "eval")
            found.add(ViolatedClause(positive, negative, template.weight, template.id))

    for ev in evidence:
        if is_infinite(ev.weight) or ev.weight > 0:
            violated = ev.atom not in current
        elif ev.weight < 0:
            violated = ev.atom in current
        else:
            violated = False  # zero-weight statements cannot move the objective
        if violated:
            found.add(ViolatedClause(frozenset((ev.atom,)), frozenset(), ev.weight, "EV", ev.origin))

    return sorted(found, key=ViolatedClause.sort_key)


def _index(atoms) -> tuple:
    by_pred: dict = {}
    by_pos: dict = {}
    for atom in atoms:
        by_pred.setdefault(atom.pred, []).append(atom)
        for i, arg in enumerate(atom.args):
            by_pos.setdefault((atom.pred, i, arg), []).append(atom)
    return by_pred, by_pos


def _join_fixed(plan, binding: dict, k: int = 0):
    if k == len(plan):
        yield binding
        return
    pattern, index = plan[k]
    for atom in _candidates(pattern, binding, index):
        new = _unify(pattern, atom, binding)
        if new is not None:
            yield from _join_fixed(plan, new, k + 1)


def extend_closure(
    templates: Sequence[ClauseTemplate],
    base: frozenset,
    new_atoms: Iterable[Atom],
    domain: str = REAL,
) -> frozenset:
    """Close ``base | new_atoms`` under the head-producing rules, assuming
    ``base`` is already closed.

    Semi-naive: each pass grounds only substitutions that touch at least one
    atom derived in the previous pass, which is exhaustive over a closed
    base. Equals saturate() on the same inputs; the enumeration oracle leans
    on this for its subset lattice walk.
    """
    current = set(base)
    delta = set(new_atoms) - current
    bodies = [
        (t, [p for p in t.body if p.pred != "eval"], [p for p in t.body if p.pred == "eval"])
        for t in templates
        if t.head is not None and t.body
    ]
    while delta:
        current |= delta
        old_idx = _index(current - delta)
        cur_idx = _index(current)
        delta_idx = _index(delta)
        heads = set()
        for template, body, evals in bodies:
            for j, anchor in enumerate(body):
                # anchor binds from the delta; earlier positions stay in the
                # old atoms, later ones range over everything: each new
                # grounding is produced exactly once
                plan = [(anchor, delta_idx)]
                plan += [(p, old_idx if i < j else cur_idx) for i, p in enumerate(body) if i != j]
                for seed in template.seeds:
                    for binding in _join_fixed(plan, dict(seed) if seed else {}):
                        head = _instantiate(template.head, binding)
                        if head in current or head in heads:
                            continue
                        if evals and not all(
                            eval_op(*(_eval_value(a, binding) for a in ev.args), domain=domain)
                            for ev in evals
                        ):
                            continue
                        heads.add(head)
        delta = heads - current
    return frozenset(current)


def saturate(
    templates: Sequence[ClauseTemplate],
    atoms: Iterable[Atom],
    domain: str = REAL,
) -> tuple:
    """Deterministic closure: chase the hard rules to a fixpoint.

    Returns (closure, coherence_violations) where the violations are the
    groundings of the FALSE-headed coherence rule that hold in the closure.
    """
    current = set(atoms)
    conflicts = []
    while True:
        new_atoms = set()
        conflicts = []
        for clause in find_violated(templates, (), frozenset(current), domain=domain):
            if clause.positive:
                new_atoms.update(clause.positive)
            else:
                conflicts.append(clause)
        new_atoms -= current
        if not new_atoms:
            return frozenset(current), conflicts
        current |= new_atoms


def incoherence_atoms(closure: frozenset) -> list:
    """The sub(c, BOT) atoms with c != BOT present in a closure."""
    return sorted(
        (a for a in closure if a.pred == "sub" and a.args[1] == BOT and a.args[0] != BOT),
        key=atom_sort_key,
    )
