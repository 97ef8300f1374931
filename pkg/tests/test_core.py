import pytest
from hypothesis import given, strategies as st

from elpp import (
    BOTTOM, GCI, TOP, Atomic, Conj, Exists, KnowledgeBase, Nominal, Pred, RoleInclusion,
    basic_concepts, conj, validate,
)
from elpp.cdomains import EqConst, GtConst, PlusConst
from elpp.core import FreshNames, Name, check, fresh_name, is_basic, names_in, InvalidKnowledgeBase

X, Y, P = Atomic("X"), Atomic("Y"), Atomic("P")


class TestNames:
    def test_kinds_never_equal(self):
        assert Name("concept", "a") != Name("individual", "a")

    def test_total_order_consistent_with_equality(self):
        names = [Name("role", "r"), Name("concept", "b"), Name("concept", "a")]
        assert sorted(names) == [Name("concept", "a"), Name("concept", "b"), Name("role", "r")]

    def test_fresh_avoids_used(self):
        used = [Name("concept", n) for n in ("X", "A", "B")]
        n = fresh_name("concept", used)
        assert n.kind == "concept" and n not in used

    def test_fresh_with_empty_list(self):
        assert fresh_name("role", []).kind == "role"

    def test_fresh_twice_distinct(self):
        first = fresh_name("concept", [])
        second = fresh_name("concept", [first])
        assert first != second

    def test_fresh_is_deterministic(self):
        used = [Name("concept", "_C0")]
        assert fresh_name("concept", used) == fresh_name("concept", used)

    @given(st.integers(min_value=1, max_value=40))
    def test_fresh_iterated_is_injective(self, n):
        used: list = []
        for _ in range(n):
            used.append(fresh_name("individual", used))
        assert len(set(used)) == n

    def test_fresh_supply_skips_kb_names(self):
        kb = KnowledgeBase.build([GCI(Atomic("_C0"), Atomic("_C1"))])
        fresh = FreshNames.avoiding(kb)
        assert fresh("concept") not in {"_C0", "_C1"}

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError):
            fresh_name("datatype", [])


class TestConcepts:
    def test_is_basic(self):
        assert is_basic(X)
        assert is_basic(TOP) and is_basic(Nominal("a"))
        assert is_basic(Pred.of(GtConst(3), "f"))
        assert not is_basic(Conj(X, Y))
        assert not is_basic(BOTTOM)
        assert not is_basic(Exists("r", X))

    def test_structural_equality(self):
        assert Exists("r", Conj(X, Y)) == Exists("r", Conj(X, Y))
        assert hash(Pred.of(EqConst(2), "f")) == hash(Pred.of(EqConst(2), "f"))

    def test_conj_is_left_associated(self):
        assert conj(X, Y, P) == Conj(Conj(X, Y), P)
        assert conj() == TOP

    def test_printing(self):
        c = Exists("r", conj(X, Nominal("a"), Pred.of(PlusConst(1), "f", "g")))
        assert str(c) == "(exists r . (X and {a} and Q.plus[1](f, g)))"

    def test_role_inclusion_needs_chain(self):
        with pytest.raises(ValueError):
            RoleInclusion((), "r")

    def test_names_in(self):
        names = names_in(GCI(Exists("r", Nominal("a")), Pred.of(GtConst(0), "f")))
        assert names == {Name("role", "r"), Name("individual", "a"), Name("feature", "f")}


class TestBasicConcepts:
    def test_nominal_example(self, nominal_kb):
        assert set(basic_concepts(nominal_kb)) == {TOP, X, Nominal("b"), Nominal("c"), Atomic("A")}

    def test_empty(self):
        assert basic_concepts(KnowledgeBase()) == (TOP,)

    def test_predicate(self):
        p = Pred.of(GtConst(3), "f")
        kb = KnowledgeBase.build([GCI(P, p)])
        assert set(basic_concepts(kb)) == {TOP, P, p}

    def test_unused_declarations_are_not_basic(self, nominal_kb):
        assert Atomic("B") not in basic_concepts(nominal_kb)

    def test_all_members_basic(self, nominal_kb):
        bc = basic_concepts(nominal_kb.extend([GCI(Conj(X, BOTTOM), Exists("r1", TOP))]))
        assert TOP in bc and all(is_basic(c) for c in bc)


class TestValidate:
    def test_nominal_ok(self, nominal_kb):
        assert validate(nominal_kb) == []

    def test_unknown_role(self, nominal_kb):
        bad = KnowledgeBase(nominal_kb.constraints + (GCI(X, Exists("r2", X)),),
                            nominal_kb.concepts, nominal_kb.roles, nominal_kb.individuals)
        (v,) = validate(bad)
        assert v.kind == "unknown-name" and v.name == Name("role", "r2")

    def test_arity_mismatch(self):
        kb = KnowledgeBase.build([GCI(P, Pred.of(PlusConst(1), "f"))])
        (v,) = validate(kb)
        assert v.kind == "arity-mismatch"

    def test_unknown_domain(self):
        kb = KnowledgeBase.build([GCI(P, Pred("Z", GtConst(1), ("f",)))])
        assert [v.kind for v in validate(kb)] == ["unknown-predicate"]

    def test_predicate_of_other_domain(self):
        kb = KnowledgeBase.build([GCI(P, Pred("S", GtConst(1), ("f",)))])
        assert [v.kind for v in validate(kb)] == ["unknown-predicate"]

    def test_role_inclusion_closure(self):
        kb = KnowledgeBase([RoleInclusion(("r", "s"), "t")], roles={"r", "t"})
        assert [v.name for v in validate(kb)] == [Name("role", "s")]

    def test_check_raises_with_all_violations(self):
        kb = KnowledgeBase([GCI(X, Exists("r", Y))])
        with pytest.raises(InvalidKnowledgeBase) as info:
            check(kb)
        assert len(info.value.violations) == 3

    def test_build_closes_inventories(self):
        kb = KnowledgeBase.build([GCI(Exists("r", Nominal("a")), Pred.of(GtConst(0), "f"))])
        assert validate(kb) == []
        assert kb.roles == {"r"} and kb.individuals == {"a"} and kb.features == {"f"}


class TestKnowledgeBase:
    def test_extend_keeps_order(self, nominal_kb):
        g = GCI(Atomic("B"), TOP)
        out = nominal_kb.extend([g], concepts=["N"])
        assert out.constraints[-1] == g and out.constraints[:-1] == nominal_kb.constraints
        assert "N" in out.concepts

    def test_is_immutable(self, nominal_kb):
        with pytest.raises(AttributeError):
            nominal_kb.constraints = ()
