from fractions import Fraction

import pytest
from hypothesis import given

from probel.model import (
    BOT,
    ConceptAssertion,
    DataSome,
    Exists,
    Gci,
    Nominal,
    Restriction,
    TOP,
    make_signature,
)
from probel.translate import (
    Atom,
    NoAxiomCounterpart,
    NotNormal,
    PREDICATE_SORTS,
    make_atom,
    phi,
    phi_inverse,
    rule_templates,
)

from strategies import normal_statements


class TestPhi:
    def test_datatype_right(self):
        axiom = Gci("A", DataSome("f", Restriction("<", Fraction(5))))
        assert phi(axiom) == Atom("rsupEx", ("A", "f", "<", Fraction(5)))

    def test_concept_assertion(self):
        assert phi(ConceptAssertion("C", "a")) == Atom("inst", ("a", "C"))

    def test_top_sub_top(self):
        assert phi(Gci(TOP, TOP)) == Atom("sub", (TOP, TOP))

    def test_nominal_pair_keeps_sub(self):
        assert phi(Gci(Nominal("a"), Nominal("c"))) == Atom("sub", (Nominal("a"), Nominal("c")))

    def test_atomic_under_nominal_goes_to_subnom(self):
        assert phi(Gci("A", Nominal("c"))) == Atom("subNom", ("A", "c"))

    def test_nominal_assertion_is_ninst(self):
        assert phi(ConceptAssertion(Nominal("b"), "x")) == Atom("ninst", ("x", "b"))

    def test_rejects_non_normal(self):
        from probel.model import And

        with pytest.raises(NotNormal):
            phi(Gci("A", And(("B", "C"))))


class TestPhiInverse:
    def test_feature_left(self):
        atom = Atom("rsubEx", ("age", "<=", Fraction(3), "Toddler"))
        assert phi_inverse(atom) == Gci(
            DataSome("age", Restriction("<=", Fraction(3))), "Toddler"
        )

    def test_sub_self(self):
        assert phi_inverse(Atom("sub", ("A", "A"))) == Gci("A", "A")

    def test_role_chain(self):
        from probel.model import RoleInclusion

        assert phi_inverse(Atom("pcom", ("R1", "R2", "R"))) == RoleInclusion(("R1", "R2"), "R")

    def test_eval_rejected(self):
        with pytest.raises(NoAxiomCounterpart):
            phi_inverse(Atom("eval", ("=", Fraction(2), "<=", Fraction(3))))


@given(normal_statements)
def test_round_trip_statement(statement):
    atom = phi(statement)
    assert phi_inverse(atom) == statement
    assert phi(phi_inverse(atom)) == atom


def test_make_atom_canonicalizes_nominal_instance():
    assert make_atom("inst", "x", Nominal("a")) == Atom("ninst", ("x", "a"))


class TestRuleTemplates:
    def test_ids_complete_and_unique(self):
        sig = make_signature(concepts=("A",), individuals=("a", "b"))
        templates = rule_templates(sig)
        ids = [t.id for t in templates]
        assert len(ids) == len(set(ids))
        assert set(ids) == {f"F{i}" for i in range(1, 28)} | {"SUBNOM", "UNA", "COH"}

    def test_no_unique_name_clause_for_single_individual(self):
        sig = make_signature(concepts=("A",), individuals=("john",))
        una = next(t for t in rule_templates(sig) if t.id == "UNA")
        assert una.seeds == ()

    def test_one_unique_name_clause_per_pair(self):
        sig = make_signature(concepts=(), individuals=("a", "b"))
        una = next(t for t in rule_templates(sig) if t.id == "UNA")
        assert len(una.seeds) == 1
        from probel.grounding import _instantiate

        atom = _instantiate(una.head, dict(una.seeds[0]))
        assert atom == Atom("int", (Nominal("a"), Nominal("b"), BOT))

    def test_head_predicates_stay_in_vocabulary(self):
        sig = make_signature(concepts=("A",), individuals=("a",))
        for template in rule_templates(sig):
            if template.head is not None:
                assert template.head.pred in PREDICATE_SORTS
            for pattern in template.body:
                assert pattern.pred in PREDICATE_SORTS

    def test_head_variables_bound_by_body_or_seeds(self):
        from probel.translate import NomOf, SuccessorOf, Var

        def var_names(pattern):
            for arg in pattern.args:
                if isinstance(arg, Var):
                    yield arg.name
                elif isinstance(arg, NomOf):
                    yield arg.var.name

        sig = make_signature(concepts=("A",), individuals=("a", "b"))
        for template in rule_templates(sig):
            if template.head is None:
                continue
            bound = {n for p in template.body for n in var_names(p)}
            if template.seeds and template.seeds[0] is not None:
                bound |= set(template.seeds[0])
            for arg in template.head.args:
                if isinstance(arg, SuccessorOf):
                    continue  # anonymous successor, named from body bindings
                if isinstance(arg, Var):
                    assert arg.name in bound, (template.id, arg.name)
                elif isinstance(arg, NomOf):
                    assert arg.var.name in bound, (template.id, arg.var.name)

    def test_seed_clauses_depend_only_on_signature(self):
        sig = make_signature(concepts=("A", "B"), individuals=("a",))
        first = rule_templates(sig)
        second = rule_templates(sig)
        assert [t.id for t in first] == [t.id for t in second]
        assert [t.seeds for t in first] == [t.seeds for t in second]
