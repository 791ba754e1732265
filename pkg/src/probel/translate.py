"""Ground reasoner atoms, the axiom/atom mapping, and the completion-rule templates.

Thirteen stored predicates (sub, subNom, int, intEx, rsub, rsup, rsupEx,
rsubEx, psub, pcom, inst, rinst, ninst) plus the computed predicate eval.
Concept arguments are concept names or nominals; rinst is dual-sorted,
holding either (individual, role, individual) or (individual, feature, value).

inst atoms never carry a nominal concept: constructing inst(x, {a})
canonicalizes to ninst(x, a), which is what the nominal-instance rules
consume. Likewise the calculus reads "x has a nominal-rooted role filler"
directly off rsup atoms whose first argument is a nominal.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Optional

from .model import (
    BOT,
    INFINITE,
    TOP,
    And,
    Axiom,
    ConceptAssertion,
    DataSome,
    Exists,
    FeatureAssertion,
    Form,
    Gci,
    Nominal,
    Restriction,
    RoleAssertion,
    RoleInclusion,
    Signature,
    classify_normal,
    format_value,
)


class Atom(NamedTuple):
    pred: str
    args: tuple

    def __str__(self) -> str:
        return f"{self.pred}({', '.join(_arg_str(a) for a in self.args)})"


def _arg_str(arg) -> str:
    if isinstance(arg, Nominal):
        return str(arg)
    if isinstance(arg, Fraction):
        return format_value(arg)
    return arg


def make_atom(pred: str, *args) -> Atom:
    if pred == "inst" and isinstance(args[1], Nominal):
        return Atom("ninst", (args[0], args[1].individual))
    return Atom(pred, tuple(args))


def atom_sort_key(atom: Atom) -> tuple:
    return (atom.pred, tuple(_arg_str(a) for a in atom.args))


# Argument sorts per predicate, used for validation and by the grounding
# machinery ("C" concept ref, "I" individual, "R" role, "F" feature,
# "O" operator, "V" value; rinst is checked structurally).
PREDICATE_SORTS = {
    "sub": ("C", "C"),
    "subNom": ("C", "I"),
    "int": ("C", "C", "C"),
    "intEx": ("C", "C", "F", "O", "V"),
    "rsub": ("C", "R", "C"),
    "rsup": ("C", "R", "C"),
    "rsupEx": ("C", "F", "O", "V"),
    "rsubEx": ("F", "O", "V", "C"),
    "psub": ("R", "R"),
    "pcom": ("R", "R", "R"),
    "inst": ("I", "C"),
    "rinst": ("I", None, None),
    "ninst": ("I", "I"),
    "eval": ("O", "V", "O", "V"),
}


class NotNormal(ValueError):
    """Raised when a non-normal axiom reaches the atom mapping."""


class NoAxiomCounterpart(ValueError):
    """Raised for atoms outside the axiom/atom bijection (eval)."""


def phi(axiom: Axiom) -> Atom:
    """Map a normal statement to its ground atom."""
    form = classify_normal(axiom)
    if form is None:
        raise NotNormal(f"not a normal statement: {axiom!r}")
    if form is Form.CONCEPT_ASSERTION:
        return make_atom("inst", axiom.individual, axiom.concept)
    if form is Form.ROLE_ASSERTION:
        return make_atom("rinst", axiom.subject, axiom.role, axiom.object)
    if form is Form.FEATURE_ASSERTION:
        return make_atom("rinst", axiom.subject, axiom.feature, axiom.value)
    if form is Form.SUB:
        return make_atom("sub", axiom.left, axiom.right)
    if form is Form.SUB_NOMINAL:
        return make_atom("subNom", axiom.left, axiom.right.individual)
    if form is Form.CONJUNCTION:
        a, b = axiom.left.parts
        return make_atom("int", a, b, axiom.right)
    if form is Form.CONJUNCTION_DATA:
        a, b = axiom.left.parts
        r = axiom.right.restriction
        return make_atom("intEx", a, b, axiom.right.feature, r.op, r.value)
    if form is Form.EXISTS_LEFT:
        return make_atom("rsub", axiom.left.filler, axiom.left.role, axiom.right)
    if form is Form.EXISTS_RIGHT:
        return make_atom("rsup", axiom.left, axiom.right.role, axiom.right.filler)
    if form is Form.DATA_RIGHT:
        r = axiom.right.restriction
        return make_atom("rsupEx", axiom.left, axiom.right.feature, r.op, r.value)
    if form is Form.DATA_LEFT:
        r = axiom.left.restriction
        return make_atom("rsubEx", axiom.left.feature, r.op, r.value, axiom.right)
    if form is Form.ROLE_SUB:
        return make_atom("psub", axiom.chain[0], axiom.sup)
    if form is Form.ROLE_CHAIN:
        return make_atom("pcom", axiom.chain[0], axiom.chain[1], axiom.sup)
    raise NotNormal(f"unhandled form {form}")  # pragma: no cover


def phi_inverse(atom: Atom) -> Axiom:
    """Map a stored ground atom back to a normal statement.

    subNom is the canonical carrier of "atomic under a nominal": sub atoms
    with an atomic left and nominal right (produced by the bridging rule)
    invert to the same inclusion axiom and are the one non-injective corner.
    """
    pred, args = atom.pred, atom.args
    if pred == "eval":
        raise NoAxiomCounterpart("eval atoms have no axiom counterpart")
    if pred == "inst":
        return ConceptAssertion(args[1], args[0])
    if pred == "ninst":
        return ConceptAssertion(Nominal(args[1]), args[0])
    if pred == "rinst":
        if isinstance(args[2], Fraction):
            return FeatureAssertion(args[1], args[0], args[2])
        return RoleAssertion(args[1], args[0], args[2])
    if pred == "sub":
        return Gci(args[0], args[1])
    if pred == "subNom":
        return Gci(args[0], Nominal(args[1]))
    if pred == "int":
        return Gci(And((args[0], args[1])), args[2])
    if pred == "intEx":
        return Gci(And((args[0], args[1])), DataSome(args[2], Restriction(args[3], args[4])))
    if pred == "rsub":
        return Gci(Exists(args[1], args[0]), args[2])
    if pred == "rsup":
        return Gci(args[0], Exists(args[1], args[2]))
    if pred == "rsupEx":
        return Gci(args[0], DataSome(args[1], Restriction(args[2], args[3])))
    if pred == "rsubEx":
        return Gci(DataSome(args[0], Restriction(args[1], args[2])), args[3])
    if pred == "psub":
        return RoleInclusion((args[0],), args[1])
    if pred == "pcom":
        return RoleInclusion((args[0], args[1]), args[2])
    raise NoAxiomCounterpart(f"unknown predicate {pred}")


# ---------------------------------------------------------------------------
# Clause templates
# ---------------------------------------------------------------------------

# Variable sorts used in templates.
S_CONCEPT = "C"
S_CONCEPT_NONBOT = "C-"  # any concept ref except BOT
S_ROLE = "R"
S_FEATURE = "F"
S_IND = "I"
S_NAMED_IND = "I!"  # individuals that are not anonymous successors
S_OP = "O"
S_VALUE = "V"


class Var(NamedTuple):
    name: str
    sort: str


class NomOf(NamedTuple):
    """Pattern argument matching/building a nominal over an individual variable."""

    var: Var


class SuccessorOf(NamedTuple):
    """Head-only argument naming the anonymous role successor for (x, R, B)."""

    x: str
    r: str
    b: str


class PatternAtom(NamedTuple):
    pred: str
    args: tuple


def successor_name(x: str, role: str, concept) -> str:
    # ":" never occurs in names, so the encoding is injective.
    return f"_w:{x}:{role}:{_arg_str(concept)}"


def is_anonymous(individual: str) -> bool:
    return individual.startswith("_w:")


@dataclass(frozen=True)
class ClauseTemplate:
    """Universally quantified definite implication; head None means FALSE.

    ``seeds`` lists base substitutions for templates whose head variables do
    not occur in the body (the reflexivity seeds and unique-name clauses are
    pre-grounded per concept constant / individual pair).
    """

    id: str
    body: tuple
    head: Optional[PatternAtom]
    weight: object = INFINITE
    seeds: tuple = (None,)


def _v(name, sort):
    return Var(name, sort)


def _p(pred, *args):
    return PatternAtom(pred, tuple(args))


TEMPLATE_ORDER = {f"F{i}": i for i in range(1, 28)}
TEMPLATE_ORDER.update({"SUBNOM": 28, "UNA": 29, "COH": 30, "EV": 31, "FORCE": 32})


def template_sort_key(template_id: str) -> int:
    return TEMPLATE_ORDER[template_id]


def concept_constants(sig: Signature) -> list:
    """All concept-sort constants: names plus one nominal per individual."""
    names = sorted(sig.concepts)
    noms = [Nominal(a) for a in sorted(sig.individuals)]
    return names + noms


def rule_templates(sig: Signature) -> list:
    """The completion calculus: F1-F27, the subNom bridge, unique-name
    clauses for each pair of distinct individuals, and the coherence rule.

    F1-F9 are the concept-level saturation rules (reflexivity seeds,
    transitivity, conjunction, existentials on both sides, bottom
    propagation, role hierarchy and composition); F10-F13 handle nominals
    and datatype restrictions at the concept level; F14-F27 are the
    assertion-level rules. eval literals are evaluated by the grounder, not
    stored.
    """
    c, d, e, f_ = _v("c", S_CONCEPT), _v("d", S_CONCEPT), _v("e", S_CONCEPT), _v("f", S_CONCEPT)
    d1, d2 = _v("d1", S_CONCEPT), _v("d2", S_CONCEPT)
    r, s, r1, r2 = _v("r", S_ROLE), _v("s", S_ROLE), _v("r1", S_ROLE), _v("r2", S_ROLE)
    a_i, b_i = _v("a", S_IND), _v("b", S_IND)
    feat = _v("ft", S_FEATURE)
    o1, v1, o2, v2 = _v("o1", S_OP), _v("v1", S_VALUE), _v("o2", S_OP), _v("v2", S_VALUE)

    A, B, A1, A2, C_ = _v("A", S_CONCEPT), _v("B", S_CONCEPT), _v("A1", S_CONCEPT), _v("A2", S_CONCEPT), _v("C", S_CONCEPT)
    x, y, z = _v("x", S_IND), _v("y", S_IND), _v("z", S_IND)
    xn = _v("x", S_NAMED_IND)
    R_, S_, R1_, R2_, R3_ = _v("R", S_ROLE), _v("S", S_ROLE), _v("R1", S_ROLE), _v("R2", S_ROLE), _v("R3", S_ROLE)

    consts = concept_constants(sig)
    inds = sorted(sig.individuals)

    templates = [
        ClauseTemplate("F1", (), _p("sub", c, c), seeds=tuple({"c": cc} for cc in consts)),
        ClauseTemplate("F2", (), _p("sub", c, TOP), seeds=tuple({"c": cc} for cc in consts)),
        ClauseTemplate("F3", (_p("sub", c, d), _p("sub", d, e)), _p("sub", c, e)),
        ClauseTemplate("F4", (_p("sub", c, d1), _p("sub", c, d2), _p("int", d1, d2, e)), _p("sub", c, e)),
        ClauseTemplate("F5", (_p("sub", c, d), _p("rsup", d, r, e)), _p("rsup", c, r, e)),
        ClauseTemplate("F6", (_p("rsup", c, r, d), _p("sub", d, e), _p("rsub", e, r, f_)), _p("sub", c, f_)),
        ClauseTemplate("F7", (_p("rsup", c, r, d), _p("sub", d, BOT)), _p("sub", c, BOT)),
        ClauseTemplate("F8", (_p("rsup", c, r, d), _p("psub", r, s)), _p("rsup", c, s, d)),
        ClauseTemplate("F9", (_p("rsup", c, r1, d), _p("rsup", d, r2, e), _p("pcom", r1, r2, r)), _p("rsup", c, r, e)),
        ClauseTemplate("F10", (_p("subNom", c, a_i), _p("subNom", d, a_i), _p("rsup", c, r, d)), _p("sub", c, d)),
        ClauseTemplate("F11", (_p("subNom", c, a_i), _p("subNom", d, a_i), _p("rsup", NomOf(b_i), r, d)), _p("sub", c, d)),
        ClauseTemplate("F12", (_p("sub", c, d), _p("rsupEx", d, feat, o1, v1)), _p("rsupEx", c, feat, o1, v1)),
        ClauseTemplate(
            "F13",
            (_p("rsupEx", c, feat, o1, v1), _p("rsubEx", feat, o2, v2, d), _p("eval", o1, v1, o2, v2)),
            _p("sub", c, d),
        ),
        ClauseTemplate("F14", (_p("inst", x, A), _p("sub", A, B)), _p("inst", x, B)),
        ClauseTemplate("F15", (_p("inst", x, A1), _p("inst", x, A2), _p("int", A1, A2, B)), _p("inst", x, B)),
        ClauseTemplate("F16", (_p("rinst", x, R_, y), _p("inst", y, A), _p("rsub", A, R_, B)), _p("inst", x, B)),
        ClauseTemplate("F17", (_p("rinst", x, R_, y), _p("psub", R_, S_)), _p("rinst", x, S_, y)),
        ClauseTemplate("F18", (_p("rinst", x, R1_, y), _p("rinst", y, R2_, z), _p("pcom", R1_, R2_, R3_)), _p("rinst", x, R3_, z)),
        ClauseTemplate("F19", (_p("ninst", x, a_i), _p("inst", x, B)), _p("inst", a_i, B)),
        ClauseTemplate("F20", (_p("ninst", x, a_i), _p("inst", a_i, B)), _p("inst", x, B)),
        ClauseTemplate("F21", (_p("ninst", x, a_i), _p("rinst", z, R_, x)), _p("rinst", z, R_, a_i)),
        ClauseTemplate("F22", (_p("sub", TOP, A), _p("inst", x, B)), _p("inst", x, A)),
        ClauseTemplate("F23", (_p("inst", xn, A), _p("rsup", A, R_, B)), _p("rinst", xn, R_, SuccessorOf("x", "R", "B"))),
        ClauseTemplate("F24", (_p("inst", xn, A), _p("rsup", A, R_, B)), _p("inst", SuccessorOf("x", "R", "B"), B)),
        ClauseTemplate(
            "F25",
            (_p("rsubEx", feat, o1, v1, C_), _p("rinst", a_i, feat, v2), _p("eval", "=", v2, o1, v1)),
            _p("inst", a_i, C_),
        ),
        ClauseTemplate("F26", (_p("inst", a_i, A), _p("rsupEx", A, feat, "=", v1)), _p("rinst", a_i, feat, v1)),
        ClauseTemplate(
            "F27",
            (_p("inst", a_i, A1), _p("inst", a_i, A2), _p("intEx", A1, A2, feat, o1, v1)),
            _p("rinst", a_i, feat, v1),
        ),
        ClauseTemplate("SUBNOM", (_p("subNom", c, a_i),), _p("sub", c, NomOf(a_i))),
        ClauseTemplate(
            "UNA",
            (),
            _p("int", NomOf(a_i), NomOf(b_i), BOT),
            seeds=tuple({"a": p, "b": q} for p, q in _pairs(inds)),
        ),
        ClauseTemplate("COH", (_p("sub", _v("c", S_CONCEPT_NONBOT), BOT),), None),
    ]
    return templates


def _pairs(items):
    for i, p in enumerate(items):
        for q in items[i + 1:]:
            yield p, q
