"""Exact 0/1 integer linear programming for clause constraints.

Violated ground clauses translate into the three linear constraint forms
(positive, negative and infinite weight); an internal depth-first
branch-and-bound maximizer with unit propagation returns the optimum as an
exact rational, breaking ties toward the lexicographically smallest
assignment in declared variable order.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .model import Nominal, format_value, is_infinite
from .translate import Atom


class HardConflict(Exception):
    """An infinite-weight clause whose literals are all fixed by evidence."""

    def __init__(self, clause):
        self.clause = clause
        super().__init__(f"unsatisfiable hard clause from template {clause.template_id}")


class Infeasible(Exception):
    """No assignment satisfies the hard constraints."""

    def __init__(self, core):
        self.core = tuple(core)
        super().__init__(f"infeasible program; conflicting constraints: {len(self.core)}")


@dataclass(frozen=True)
class LinearConstraint:
    terms: tuple  # ((variable, integer coefficient), ...)
    relation: str  # ">=" or "<="
    bound: int

    def render(self) -> str:
        parts = " ".join(f"{'+' if c >= 0 else '-'}{abs(c)} {v}" for v, c in self.terms)
        return f"{parts} {self.relation} {self.bound}"


_OP_TOKENS = {"<": "lt", "<=": "le", "=": "eq", ">=": "ge", ">": "gt"}


def atom_token(atom: Atom) -> str:
    parts = [atom.pred]
    for arg in atom.args:
        if isinstance(arg, Nominal):
            parts.append(f"nom_{arg.individual}")
        elif isinstance(arg, Fraction):
            parts.append(format_value(arg).replace("-", "m").replace(".", "p").replace("/", "d"))
        elif arg in _OP_TOKENS:
            parts.append(_OP_TOKENS[arg])
        else:
            parts.append(str(arg).replace(":", "_"))
    return "_".join(parts)


@dataclass
class IlpProgram:
    """Binary variables, linear constraints and a maximization objective.

    One x variable per ground atom occurring in a constraint, one z variable
    per finite-weight clause; objective coefficients attach only to z
    variables.
    """

    variables: List[str] = field(default_factory=list)
    constraints: List[LinearConstraint] = field(default_factory=list)
    objective: List[Tuple[str, Fraction]] = field(default_factory=list)
    _atom_vars: Dict[Atom, str] = field(default_factory=dict)
    _names: set = field(default_factory=set)
    _clauses: int = 0

    def atom_var(self, atom: Atom) -> str:
        name = self._atom_vars.get(atom)
        if name is None:
            name = "x_" + atom_token(atom)
            while name in self._names:  # distinct atoms may mangle identically
                name += "_"
            self._declare(name)
            self._atom_vars[atom] = name
        return name

    def clause_var(self, weight: Fraction) -> str:
        self._clauses += 1
        name = f"z_{self._clauses}"
        self._declare(name)
        self.objective.append((name, weight))
        return name

    def _declare(self, name: str):
        self._names.add(name)
        self.variables.append(name)

    def true_atoms(self, assignment: Dict[str, int]) -> frozenset:
        return frozenset(a for a, v in self._atom_vars.items() if assignment.get(v) == 1)


def translate_clause(clause, program: IlpProgram, fixed_true: frozenset = frozenset()) -> list:
    """Add the constraint(s) for one violated clause to the program.

    Atoms fixed true by evidence are substituted out: a positive literal over
    one satisfies the clause outright, a negated literal over one can never
    help and is omitted from the sums.
    """
    satisfied = sum(1 for atom in clause.positive if atom in fixed_true)
    pos = [atom for atom in clause.positive if atom not in fixed_true]
    neg = [atom for atom in clause.negative if atom not in fixed_true]

    if is_infinite(clause.weight):
        if satisfied:
            return []
        if not pos and not neg:
            raise HardConflict(clause)
        terms = [(program.atom_var(a), 1) for a in sorted(pos, key=atom_token)]
        terms += [(program.atom_var(a), -1) for a in sorted(neg, key=atom_token)]
        made = [LinearConstraint(tuple(terms), ">=", 1 - len(neg))]
    elif clause.weight < 0:
        z = program.clause_var(clause.weight)
        size = len(clause.positive) + len(clause.negative)
        terms = [(program.atom_var(a), 1) for a in sorted(pos, key=atom_token)]
        terms += [(program.atom_var(a), -1) for a in sorted(neg, key=atom_token)]
        terms.append((z, -size))
        made = [LinearConstraint(tuple(terms), "<=", -satisfied - len(neg))]
    else:
        z = program.clause_var(clause.weight)
        if satisfied:
            return []  # z is free to take 1; the clause already holds
        terms = [(program.atom_var(a), 1) for a in sorted(pos, key=atom_token)]
        terms += [(program.atom_var(a), -1) for a in sorted(neg, key=atom_token)]
        terms.append((z, -1))
        made = [LinearConstraint(tuple(terms), ">=", -len(neg))]
    program.constraints.extend(made)
    return made


# ---------------------------------------------------------------------------
# Solver
# ---------------------------------------------------------------------------

class _Search:
    """Depth-first branch and bound over the binary variables."""

    def __init__(self, program: IlpProgram):
        self.vars = list(program.variables)
        self.index = {v: i for i, v in enumerate(self.vars)}
        self.n = len(self.vars)
        self.cons = [
            (tuple((self.index[v], c) for v, c in con.terms), con.relation, con.bound)
            for con in program.constraints
        ]
        self.obj = [Fraction(0)] * self.n
        for v, w in program.objective:
            self.obj[self.index[v]] += w
        # branch on large coefficients first, 1 before 0
        self.branch_order = sorted(range(self.n), key=lambda i: (-self.obj[i], i))

    def propagate(self, values: list) -> bool:
        """Fix variables forced by the constraints; False on a dead end."""
        changed = True
        while changed:
            changed = False
            for terms, relation, bound in self.cons:
                lo = hi = 0
                free = []
                for vi, c in terms:
                    v = values[vi]
                    if v is None:
                        free.append((vi, c))
                        if c > 0:
                            hi += c
                        else:
                            lo += c
                    else:
                        lo += c * v
                        hi += c * v
                if relation == ">=":
                    if hi < bound:
                        return False
                    if lo >= bound:
                        continue
                    for vi, c in free:
                        # best value for >= is 1 when c>0 else 0; forced when
                        # the worst value kills the constraint
                        if hi - abs(c) < bound:
                            values[vi] = 1 if c > 0 else 0
                            changed = True
                else:
                    if lo > bound:
                        return False
                    if hi <= bound:
                        continue
                    for vi, c in free:
                        if lo + abs(c) > bound:
                            values[vi] = 0 if c > 0 else 1
                            changed = True
        return True

    def value_of(self, values: list) -> Fraction:
        return sum((self.obj[i] for i, v in enumerate(values) if v == 1), Fraction(0))

    def check(self, values: list) -> bool:
        for terms, relation, bound in self.cons:
            lhs = sum(c * values[vi] for vi, c in terms)
            if (relation == ">=" and lhs < bound) or (relation == "<=" and lhs > bound):
                return False
        return True

    def _bound(self, values: list) -> Fraction:
        total = Fraction(0)
        for i, v in enumerate(values):
            if v == 1:
                total += self.obj[i]
            elif v is None and self.obj[i] > 0:
                total += self.obj[i]
        return total

    def maximize(self, values: list) -> Optional[Fraction]:
        """Optimal objective over completions of ``values``; None if infeasible."""
        self._best: Optional[Fraction] = None
        self._dfs(values)
        return self._best

    def _dfs(self, values: list):
        values = list(values)
        if not self.propagate(values):
            return
        if self._best is not None and self._bound(values) <= self._best:
            return
        pick = next((i for i in self.branch_order if values[i] is None), None)
        if pick is None:
            if self.check(values):
                value = self.value_of(values)
                if self._best is None or value > self._best:
                    self._best = value
            return
        for choice in (1, 0):
            values[pick] = choice
            self._dfs(values)
        values[pick] = None

    def attains(self, values: list, target: Fraction) -> bool:
        """Is there a feasible completion with objective >= target?"""
        values = list(values)
        if not self.propagate(values):
            return False
        if self._bound(values) < target:
            return False
        pick = next((i for i in self.branch_order if values[i] is None), None)
        if pick is None:
            return self.check(values) and self.value_of(values) >= target
        for choice in (1, 0):
            trial = list(values)
            trial[pick] = choice
            if self.attains(trial, target):
                return True
        return False


def solve(program: IlpProgram) -> Tuple[Dict[str, int], Fraction]:
    """Maximize the objective; exact rational value, deterministic assignment.

    Among optima the lexicographically smallest assignment (in declared
    variable order, 0 before 1) is returned, established by a second descent
    that re-proves attainability of the optimum after each tentative 0.
    """
    search = _Search(program)
    if search.n == 0:
        return {}, Fraction(0)
    optimum = search.maximize([None] * search.n)
    if optimum is None:
        raise Infeasible(_minimize_core(program))
    values: list = [None] * search.n
    for i in range(search.n):
        if values[i] is not None:
            continue
        values[i] = 0
        if not search.attains(values, optimum):
            values[i] = 1
        implied = list(values)
        if search.propagate(implied):  # adopt feasibility-forced consequences
            values = implied
    assignment = {v: values[i] for i, v in enumerate(search.vars)}
    assert search.check(values) and search.value_of(values) == optimum
    return assignment, optimum


def _minimize_core(program: IlpProgram) -> list:
    """Best-effort irreducible infeasible subset by deletion filtering."""
    core = list(program.constraints)
    if len(core) > 160:
        return core
    i = 0
    while i < len(core):
        trial = core[:i] + core[i + 1:]
        probe = IlpProgram(variables=list(program.variables), constraints=trial)
        if _Search(probe).maximize([None] * len(probe.variables)) is None:
            core = trial
        else:
            i += 1
    return core


def dump(program: IlpProgram) -> str:
    """Serialize to the textual LP format, byte-stable across runs."""
    lines = ["OBJECTIVE"]
    for var, weight in program.objective:
        lines.append(f"  {format_value(weight)} {var}")
    lines.append("CONSTRAINTS")
    for con in program.constraints:
        lines.append("  " + con.render())
    lines.append("BINARY")
    for var in program.variables:
        lines.append(f"  {var}")
    return "\n".join(lines) + "\n"
