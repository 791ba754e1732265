"""Cutting-plane MAP inference and the exhaustive distribution oracle.

The engine starts from the deterministic evidence, repeatedly grounds only
the clauses violated by the current solution, translates them into the ILP
and re-solves, until no new violated clause exists. The final assignment is
the most probable coherent deductively closed world; its probability-side
counterpart is computed by the subset-enumeration oracle, with scores kept
as exact rationals inside formal sums of exponentials.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Tuple

from . import ilp
from .grounding import (
    REAL,
    EvidenceAtom,
    ViolatedClause,
    extend_closure,
    find_violated,
    incoherence_atoms,
    saturate,
)
from .model import INFINITE, KnowledgeBase, WeightedStatement, validate
from .translate import Atom, atom_sort_key, phi, phi_inverse, rule_templates

_MAX_ITERATIONS = 100_000


@dataclass(frozen=True)
class ReasonerConfig:
    domain: str = REAL
    enumeration_cap: int = 16


DEFAULT_CONFIG = ReasonerConfig()


class ValidationFailed(Exception):
    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(str(d) for d in self.diagnostics))


class IncoherentDeterministic(Exception):
    """The deterministic part alone forces some concept under BOT."""

    def __init__(self, core: Sequence[WeightedStatement], atoms):
        self.core = tuple(core)
        self.atoms = tuple(atoms)
        super().__init__(f"deterministic part is incoherent ({len(self.core)} statements involved)")


class EnumerationCapExceeded(Exception):
    def __init__(self, count: int, cap: int):
        self.count, self.cap = count, cap
        super().__init__(
            f"{count} uncertain statements exceed the enumeration cap {cap}; use MAP inference instead"
        )


# ---------------------------------------------------------------------------
# Exact exponential sums
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExpSum:
    """A formal sum of exp(score) terms with exact rational scores.

    Exponentials of distinct rationals are linearly independent over the
    rationals, so multiset equality of the scores is equality of the sums.
    """

    terms: tuple  # sorted ((score, count), ...)

    @staticmethod
    def of(scores: Iterable[Fraction]) -> "ExpSum":
        counts: dict = {}
        for s in scores:
            counts[s] = counts.get(s, 0) + 1
        return ExpSum(tuple(sorted(counts.items())))

    def log_value(self) -> float:
        if not self.terms:
            return float("-inf")
        top = max(s for s, _ in self.terms)
        acc = sum(n * math.exp(float(s - top)) for s, n in self.terms)
        return float(top) + math.log(acc)


@dataclass(frozen=True)
class Probability:
    """Ratio of two exponential sums; exact at 0 and 1, float elsewhere."""

    numerator: ExpSum
    denominator: ExpSum

    def is_zero(self) -> bool:
        return not self.numerator.terms

    def is_one(self) -> bool:
        return self.numerator == self.denominator

    def __float__(self) -> float:
        if self.is_zero():
            return 0.0
        return math.exp(self.numerator.log_value() - self.denominator.log_value())

    def __eq__(self, other) -> bool:
        if isinstance(other, Probability):
            return (self.numerator, self.denominator) == (other.numerator, other.denominator)
        if other == 0:
            return self.is_zero()
        if other == 1:
            return self.is_one()
        return NotImplemented

    __hash__ = None


# ---------------------------------------------------------------------------
# MAP inference
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MapResult:
    atoms: frozenset
    selected: tuple
    rejected: tuple
    objective: Fraction
    classified: tuple
    iterations: int
    coherent: bool


def _evidence(kb: KnowledgeBase):
    det_atoms = []
    units = []
    for index, ws in enumerate(kb.deterministic):
        det_atoms.append(phi(ws.statement))
    for index, ws in enumerate(kb.uncertain):
        units.append(EvidenceAtom(phi(ws.statement), ws.weight, index))
    return frozenset(det_atoms), tuple(units)


def _gate_deterministic(kb, templates, det_atoms, domain):
    closure, _ = saturate(templates, det_atoms, domain=domain)
    bad = incoherence_atoms(closure)
    if bad:
        core = _minimize_incoherent_core(kb, templates, domain)
        raise IncoherentDeterministic(core, bad)
    return closure


def _minimize_incoherent_core(kb, templates, domain):
    core = list(kb.deterministic)
    i = 0
    while i < len(core):
        trial = core[:i] + core[i + 1:]
        closure, _ = saturate(templates, [phi(ws.statement) for ws in trial], domain=domain)
        if incoherence_atoms(closure):
            core = trial
        else:
            i += 1
    return core


def map_inference(
    kb: KnowledgeBase,
    config: ReasonerConfig = DEFAULT_CONFIG,
    forced: Sequence[Tuple[Atom, bool]] = (),
) -> MapResult:
    """The most probable coherent classified ontology of a weighted KB.

    Runs the cutting-plane loop: find violated ground clauses, add their ILP
    constraints, re-solve, and stop when every violated clause is already
    accounted for. The objective is the exact sum of the weights of the
    uncertain statements the returned world entails.
    """
    diagnostics = validate(kb)
    if diagnostics:
        raise ValidationFailed(diagnostics)
    templates = rule_templates(kb.signature)
    det_atoms, units = _evidence(kb)
    _gate_deterministic(kb, templates, det_atoms, config.domain)

    program = ilp.IlpProgram()
    for atom, value in forced:
        clause = ViolatedClause(
            frozenset((atom,)) if value else frozenset(),
            frozenset() if value else frozenset((atom,)),
            INFINITE,
            "FORCE",
        )
        ilp.translate_clause(clause, program, det_atoms)

    added = set()
    current = set(det_atoms)
    iterations = 0
    while True:
        violated = find_violated(templates, units, frozenset(current), domain=config.domain)
        fresh = [g for g in violated if g not in added]
        if not fresh:
            break
        iterations += 1
        if iterations > _MAX_ITERATIONS:
            raise RuntimeError("cutting-plane loop failed to converge")
        for clause in fresh:
            added.add(clause)
            ilp.translate_clause(clause, program, det_atoms)
        assignment, _ = ilp.solve(program)
        current = set(det_atoms) | program.true_atoms(assignment)

    final = frozenset(current)
    selected, rejected = [], []
    objective = Fraction(0)
    for ws in kb.uncertain:
        if phi(ws.statement) in final:
            selected.append(ws)
            objective += ws.weight
        else:
            rejected.append(ws)
    classified = tuple(phi_inverse(a) for a in sorted(final, key=atom_sort_key))
    return MapResult(
        atoms=final,
        selected=tuple(selected),
        rejected=tuple(rejected),
        objective=objective,
        classified=classified,
        iterations=iterations,
        coherent=True,
    )


def first_iteration_program(kb: KnowledgeBase, config: ReasonerConfig = DEFAULT_CONFIG) -> ilp.IlpProgram:
    """The ILP after translating the first round of violated clauses."""
    diagnostics = validate(kb)
    if diagnostics:
        raise ValidationFailed(diagnostics)
    templates = rule_templates(kb.signature)
    det_atoms, units = _evidence(kb)
    _gate_deterministic(kb, templates, det_atoms, config.domain)
    program = ilp.IlpProgram()
    for clause in find_violated(templates, units, det_atoms, domain=config.domain):
        ilp.translate_clause(clause, program, det_atoms)
    return program


def classify_deterministic(kb: KnowledgeBase, config: ReasonerConfig = DEFAULT_CONFIG):
    """Saturate the deterministic part only; the uncertain part is ignored."""
    diagnostics = validate(kb)
    if diagnostics:
        raise ValidationFailed(diagnostics)
    templates = rule_templates(kb.signature)
    det_atoms, _ = _evidence(kb)
    closure = _gate_deterministic(kb, templates, det_atoms, config.domain)
    return tuple(phi_inverse(a) for a in sorted(closure, key=atom_sort_key))


# ---------------------------------------------------------------------------
# Exhaustive oracle
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class World:
    statements: tuple
    score: Fraction
    probability: Probability
    atoms: frozenset


@dataclass(frozen=True)
class WorldDistribution:
    worlds: tuple
    partition: ExpSum


def brute_force_distribution(
    kb: KnowledgeBase, config: ReasonerConfig = DEFAULT_CONFIG
) -> WorldDistribution:
    """Enumerate every subset of the uncertain statements, close it under the
    hard rules together with the deterministic part, drop incoherent worlds,
    deduplicate by closure, and score each world by the weights of all
    uncertain statements its closure entails.
    """
    diagnostics = validate(kb)
    if diagnostics:
        raise ValidationFailed(diagnostics)
    count = len(kb.uncertain)
    if count > config.enumeration_cap:
        raise EnumerationCapExceeded(count, config.enumeration_cap)
    templates = rule_templates(kb.signature)
    det_atoms, units = _evidence(kb)
    base = _gate_deterministic(kb, templates, det_atoms, config.domain)

    closures = {0: base}
    for mask in range(1, 1 << count):
        low = mask & -mask
        parent = closures[mask ^ low]
        extra = units[low.bit_length() - 1].atom
        if extra in parent:
            closures[mask] = parent
        else:
            closures[mask] = extend_closure(templates, parent, (extra,), domain=config.domain)

    seen = {}
    for mask in range(1 << count):
        closure = closures[mask]
        if closure not in seen and not incoherence_atoms(closure):
            score = sum(
                (ws.weight for ws, unit in zip(kb.uncertain, units) if unit.atom in closure),
                Fraction(0),
            )
            seen[closure] = score

    partition = ExpSum.of(seen.values())
    worlds = []
    for closure, score in seen.items():
        worlds.append(
            World(
                statements=tuple(phi_inverse(a) for a in sorted(closure, key=atom_sort_key)),
                score=score,
                probability=Probability(ExpSum.of([score]), partition),
                atoms=closure,
            )
        )
    worlds.sort(key=lambda w: (-w.score, tuple(atom_sort_key(a) for a in sorted(w.atoms, key=atom_sort_key))))
    return WorldDistribution(tuple(worlds), partition)


def probability_of(
    kb: KnowledgeBase,
    query: Sequence,
    config: ReasonerConfig = DEFAULT_CONFIG,
) -> Probability:
    """Total probability of the worlds whose closure entails every query
    statement. Query statements must be in normal form."""
    atoms = [phi(statement) for statement in query]
    dist = brute_force_distribution(kb, config)
    matching = [w.score for w in dist.worlds if all(a in w.atoms for a in atoms)]
    return Probability(ExpSum.of(matching), dist.partition)


# ---------------------------------------------------------------------------
# Per-statement provenance
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExplainEntry:
    statement: WeightedStatement
    selected: bool
    delta: Optional[Fraction]  # objective loss when the choice is flipped; None if flipping is incoherent


def explain_selection(kb: KnowledgeBase, result: MapResult, config: ReasonerConfig = DEFAULT_CONFIG):
    """Re-solve once per uncertain statement with its selection flipped."""
    entries = []
    for ws in kb.uncertain:
        atom = phi(ws.statement)
        selected = atom in result.atoms
        try:
            flipped = map_inference(kb, config, forced=((atom, not selected),))
            delta = result.objective - flipped.objective
        except (ilp.HardConflict, ilp.Infeasible):
            delta = None
        entries.append(ExplainEntry(ws, selected, delta))
    return entries
