from conftest import addr_set, make_config, obj

from chainmail import Addr, AddrSet, Bool, Config, Continuation, Frame, NULL, Nat, adapt, restrict
from chainmail.langoo import NatLit, NullLit, Var
from chainmail.parser import parse_stmts
from chainmail.printer import print_stmt
from chainmail.runtime import (
    class_of,
    config_to_json,
    configs_alpha_equivalent,
    frames_alpha_equivalent,
    fresh_name,
    interp_atom,
    interp_path,
    interp_var,
    is_external,
    is_internal,
    unreachable_refs,
    value_to_json,
)
from chainmail.langoo import ModuleDef, ClassDescr


def simple_config():
    heap = {
        0: obj("Object"),
        1: obj("C", f=Addr(2), g=Nat(5)),
        2: obj("D"),
    }
    return make_config(heap, {"this": Addr(1), "x": Addr(2), "n": Nat(3)})


def test_interp_var_and_atom():
    c = simple_config()
    assert interp_var(c, "x") == Addr(2)
    assert interp_var(c, "zzz") is None
    assert interp_atom(c, Var("n")) == Nat(3)
    assert interp_atom(c, NatLit(9)) == Nat(9)
    assert interp_atom(c, NullLit()) == NULL


def test_interp_path():
    c = simple_config()
    assert interp_path(c, "this", "f") == Addr(2)
    assert interp_path(c, "this", "missing") is None
    assert interp_path(c, "n", "f") is None  # not an address
    assert interp_path(c, "zzz", "f") is None


def test_class_of_and_module_side():
    c = simple_config()
    internal = ModuleDef(classes=(ClassDescr("C", (), (), ()),))
    assert class_of(c, "this") == "C"
    assert class_of(c, "x") == "D"
    assert class_of(c, "n") is None
    assert is_internal(c, internal)
    assert not is_external(c, internal)
    # a dangling this counts as external
    dangling = make_config({0: obj("Object")}, {"this": Addr(7)})
    assert is_external(dangling, internal)


def test_restrict_domain_is_exact_and_records_are_kept_bitwise():
    c = simple_config()
    r = restrict(c, [Addr(1), Addr(99)])
    assert set(r.heap) == {Addr(1)}
    assert r.heap[Addr(1)] is c.heap[Addr(1)]
    assert r.stack == c.stack
    # the surviving record still points at the removed object
    assert r.heap[Addr(1)].fields["f"] == Addr(2)
    assert any("dangles" in p for p in unreachable_refs(r))


def test_restrict_to_nothing_keeps_the_frame():
    c = simple_config()
    r = restrict(c, [])
    assert r.heap == {}
    assert interp_var(r, "x") == Addr(2)


def test_fresh_name_picks_smallest_unused_suffix():
    assert fresh_name("x", set()) == "x$0"
    assert fresh_name("x", {"x$0", "x$1"}) == "x$2"


def test_adapt_overlays_current_bindings_and_renames_the_rest():
    heap = {0: obj("Object"), 1: obj("C"), 2: obj("C")}
    cur = make_config(heap, {"this": Addr(1), "a": Addr(2)})
    other = make_config(heap, {"this": Addr(2), "b": Addr(1)}, "x := b.m(this);")
    out = adapt(cur, other)
    # current's names win with current's values
    assert interp_var(out, "this") == Addr(1)
    assert interp_var(out, "a") == Addr(2)
    # other's bindings survive under fresh dollar names
    assert interp_var(out, "this$0") == Addr(2)
    assert interp_var(out, "b$0") == Addr(1)
    # the continuation follows the renaming; the never-bound target x is
    # not a variable of the frame and keeps its spelling
    assert print_stmt(out.top.contn.stmts[0]) == "x := b$0.m(this$0)"
    assert out.heap is other.heap or out.heap == other.heap


def test_adapt_keeps_others_lower_frames():
    heap = {0: obj("Object")}
    cur = make_config(heap, {"this": Addr(0)})
    below = Frame(Continuation(tuple(parse_stmts("return z;")), marker="z"), {"this": Addr(0)})
    top = Frame(Continuation(()), {"this": Addr(0), "w": Nat(1)})
    other = Config((below, top), {Addr(0): obj("Object")})
    out = adapt(cur, other)
    assert out.stack[0] == below
    assert interp_var(out, "w$0") == Nat(1)


def test_adapt_is_insensitive_to_others_variable_spelling():
    heap = {0: obj("Object"), 1: obj("C")}
    cur = make_config(heap, {"this": Addr(0), "p": Addr(1)})
    o1 = make_config(heap, {"this": Addr(1), "u": Nat(7)}, "return u;")
    o2 = make_config(heap, {"this": Addr(1), "v": Nat(7)}, "return v;")
    assert configs_alpha_equivalent(adapt(cur, o1), adapt(cur, o2))


def test_frames_alpha_equivalent_requires_value_preserving_bijection():
    f1 = Frame(Continuation(tuple(parse_stmts("return a;"))), {"a": Nat(1), "b": Nat(2)})
    f2 = Frame(Continuation(tuple(parse_stmts("return c;"))), {"c": Nat(1), "d": Nat(2)})
    assert frames_alpha_equivalent(f1, f2)
    f3 = Frame(Continuation(tuple(parse_stmts("return c;"))), {"c": Nat(9), "d": Nat(2)})
    assert not frames_alpha_equivalent(f1, f3)
    # same shape but the two occurrences collapse to one name: not injective
    f4 = Frame(Continuation(tuple(parse_stmts("x := a.m(b);"))), {"a": Nat(1), "b": Nat(1), "x": NULL})
    f5 = Frame(Continuation(tuple(parse_stmts("y := c.m(c);"))), {"c": Nat(1), "y": NULL, "z": Nat(1)})
    assert not frames_alpha_equivalent(f4, f5)


def test_unused_variables_compare_as_a_multiset():
    f1 = Frame(Continuation(()), {"a": Nat(1), "b": Nat(2)})
    f2 = Frame(Continuation(()), {"x": Nat(2), "y": Nat(1)})
    f3 = Frame(Continuation(()), {"x": Nat(1), "y": Nat(1)})
    assert frames_alpha_equivalent(f1, f2)
    assert not frames_alpha_equivalent(f1, f3)


def test_value_to_json_shapes():
    assert value_to_json(NULL) is None
    assert value_to_json(Addr(3)) == {"addr": 3}
    assert value_to_json(Nat(4)) == {"nat": 4}
    assert value_to_json(Bool(True)) is True
    assert value_to_json(addr_set(2, 1)) == {"set": [1, 2]}


def test_config_to_json_is_deterministic():
    c = make_config({0: obj("Object"), 1: obj("C", f=NULL)}, {"this": Addr(0)}, "x := new C(null);")
    assert config_to_json(c) == config_to_json(c)
    d = config_to_json(c)
    assert d["heap"]["1"] == {"class": "C", "fields": {"f": None}}
    assert d["stack"][0]["contn"]["stmts"] == ["x := new C(null)"]
