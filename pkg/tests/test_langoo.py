import pytest

import chainmail.langoo as L
from chainmail import link, parse_module, parse_stmts
from chainmail.langoo import (
    EMPTY_MODULE,
    ClassDescr,
    GhostDecl,
    MethodDecl,
    ModuleDef,
    OverlapError,
    WellFormednessError,
    lookup_ghost,
    lookup_method,
    modules_equal,
    stmt_vars,
)


def cls(name, fields=(), methods=(), ghosts=()):
    return ClassDescr(name, tuple(fields), tuple(methods), tuple(ghosts))


def test_reserved_class_name_rejected():
    with pytest.raises(WellFormednessError):
        cls("Object")


def test_duplicate_fields_rejected():
    with pytest.raises(WellFormednessError):
        cls("C", fields=("f", "f"))


def test_duplicate_methods_rejected():
    m = MethodDecl("m", (), (L.Return(L.Var("x")),))
    with pytest.raises(WellFormednessError):
        cls("C", methods=(m, m))


def test_field_ghost_name_clash_rejected():
    g = GhostDecl("f", (), L.NullLit())
    with pytest.raises(WellFormednessError) as exc:
        cls("C", fields=("f",), ghosts=(g,))
    assert "f" in str(exc.value)


def test_this_cannot_be_a_parameter():
    with pytest.raises(WellFormednessError):
        MethodDecl("m", ("this",), ())
    with pytest.raises(WellFormednessError):
        GhostDecl("g", ("a", "this"), L.NullLit())


def test_duplicate_parameters_rejected():
    with pytest.raises(WellFormednessError):
        MethodDecl("m", ("a", "a"), ())


def test_duplicate_classes_rejected():
    with pytest.raises(WellFormednessError) as exc:
        ModuleDef(classes=(cls("C"), cls("C")))
    assert "C" in str(exc.value)


def test_statement_value_positions_take_atoms_only():
    with pytest.raises(WellFormednessError):
        L.Return(L.Eq(L.Var("x"), L.Var("y")))
    with pytest.raises(WellFormednessError):
        L.FieldWrite("x", "f", L.FieldSel(L.Var("y"), "g"))
    # variables, nat literals, and null are all fine
    L.Return(L.Var("x"))
    L.Return(L.NatLit(7))
    L.Return(L.NullLit())


def test_module_lookup_and_contains():
    m = ModuleDef(classes=(cls("A"), cls("B", fields=("f",))))
    assert "A" in m and "B" in m and "C" not in m
    assert m.lookup("B").fields == ("f",)
    assert m.lookup("C") is None
    assert m.class_ids() == ("A", "B")


def test_link_disjoint_unions_the_maps():
    m1 = ModuleDef(classes=(cls("A"),))
    m2 = ModuleDef(classes=(cls("B"),))
    both = link(m1, m2)
    assert set(both.class_ids()) == {"A", "B"}
    assert link(m1, EMPTY_MODULE).class_ids() == ("A",)


def test_link_overlap_is_undefined():
    m1 = ModuleDef(classes=(cls("A"), cls("B")))
    m2 = ModuleDef(classes=(cls("B"),))
    with pytest.raises(OverlapError) as exc:
        link(m1, m2)
    assert "B" in str(exc.value)


def test_modules_equal_ignores_declaration_order():
    a, b = cls("A", fields=("x",)), cls("B")
    assert modules_equal(ModuleDef(classes=(a, b)), ModuleDef(classes=(b, a)))
    assert not modules_equal(ModuleDef(classes=(a,)), ModuleDef(classes=(b,)))
    assert not modules_equal(
        ModuleDef(classes=(cls("A", fields=("x",)),)),
        ModuleDef(classes=(cls("A", fields=("y",)),)),
    )


def test_method_and_ghost_lookup_through_module():
    m = parse_module(
        """
        class C {
          field f
          method m(a) { return a; }
          ghost g() { this.f }
        }
        """
    )
    assert lookup_method(m, "C", "m").params == ("a",)
    assert lookup_method(m, "C", "missing") is None
    assert lookup_method(m, "D", "m") is None
    assert lookup_ghost(m, "C", "g").params == ()
    assert lookup_ghost(m, "C", "f") is None


def test_stmt_vars_covers_every_position():
    (s,) = parse_stmts("x := y.m(a, 3, null);")
    assert list(stmt_vars(s)) == ["x", "y", "a"]
    (w,) = parse_stmts("x.f := v;")
    assert list(stmt_vars(w)) == ["x", "v"]
    (r,) = parse_stmts("x := y.f;")
    assert list(stmt_vars(r)) == ["x", "y"]
    (n,) = parse_stmts("x := new C(b);")
    assert list(stmt_vars(n)) == ["x", "b"]
    (ret,) = parse_stmts("return z;")
    assert list(stmt_vars(ret)) == ["z"]
