import pytest

from conftest import (
    BANK_CLIENTS,
    BANK_V1,
    BANK_V2,
    GHOST_NODES,
    addr_set,
    bank_v2_config,
    ghost_config,
    judge,
    make_config,
    obj,
)

import chainmail.assertions as A
from chainmail import (
    Addr,
    Bounds,
    BoundsExceeded,
    EvalContext,
    NULL,
    Nat,
    NamedAssertion,
    Spec,
    desugar_changes,
    parse_assertion,
    record_trace,
    sat,
)
from chainmail.parser import parse_expr, parse_stmts
from chainmail.samplers import EXTERNAL_FIXTURE, INTERNAL_FIXTURE

EMPTY = GHOST_NODES  # any module works where no ghosts are involved


def judge_nodes(config, text, bounds=None):
    return judge(GHOST_NODES, EXTERNAL_FIXTURE, config, text, bounds)


def judge_bank2(config, text, bounds=None):
    return judge(BANK_V2, BANK_CLIENTS, config, text, bounds)


# -- atoms ------------------------------------------------------------------


def test_expression_atoms_are_two_valued():
    c = ghost_config()
    assert judge_nodes(c, "true")
    assert not judge_nodes(c, "false")
    assert not judge_nodes(c, "null")  # defined but not a boolean
    assert not judge_nodes(c, "missing")  # undefined counts as false


def test_equality_atom():
    c = ghost_config()
    assert judge_nodes(c, "acyc = acyc")
    assert not judge_nodes(c, "acyc = cyc")
    assert not judge_nodes(c, "missing = missing")  # undefined on both sides


def test_undefined_equality_differs_from_negated_holding():
    c = ghost_config()
    # cyc.last never settles: the equality atom is false, so its negation
    # is satisfied, while "equals false" fails as well
    assert not judge_nodes(c, "cyc.last = cyc.last")
    assert judge_nodes(c, "!(cyc.last = cyc.last)")
    assert not judge_nodes(c, "cyc.acyclic = false")
    assert judge_nodes(c, "!cyc.acyclic")


def test_class_atom():
    c = ghost_config()
    assert judge_nodes(c, "acyc : Node")
    assert not judge_nodes(c, "acyc : Cell")
    assert not judge_nodes(c, "null : Node")
    assert not judge_nodes(c, "3 : Node")
    dangling = make_config({0: obj("Object")}, {"x": Addr(5)})
    assert not judge_nodes(dangling, "x : Node")


def test_membership_atom():
    c = make_config(
        {0: obj("Object"), 1: obj("Node", next=NULL)},
        {"n": Addr(1), "S": addr_set(1), "E": addr_set(), "bad": Nat(2)},
    )
    assert judge_nodes(c, "n in S")
    assert not judge_nodes(c, "n in E")
    assert not judge_nodes(c, "n in missing")  # unbound set variable
    assert not judge_nodes(c, "n in bad")  # bound, but not to a set
    assert not judge_nodes(c, "phantom in S")  # undefined element


def test_connectives_are_classical():
    c = ghost_config()
    for text in ("true", "false", "acyc = cyc", "cyc.last = cyc.last"):
        assert judge_nodes(c, text) != judge_nodes(c, f"!({text})")
    assert judge_nodes(c, "true && !false")
    assert judge_nodes(c, "false || true")
    assert judge_nodes(c, "false ==> false")
    assert not judge_nodes(c, "true ==> false")


# -- quantifiers ------------------------------------------------------------


def test_object_quantifiers_range_over_the_heap():
    c = ghost_config()
    assert judge_nodes(c, "exists x. x : Node")
    assert judge_nodes(c, "forall x. [ x : Node || x : Object ]")
    assert not judge_nodes(c, "forall x. x : Node")  # the initial object is not
    assert judge_nodes(c, "exists x. [ x : Node && x.next = null ]")
    assert not judge_nodes(c, "exists x. x : Cell")


def test_quantifier_binding_does_not_capture_program_variables():
    # "acyc" is both a program variable and a binder here; the program
    # binding must win inside expressions mentioning it from outside
    c = ghost_config()
    assert judge_nodes(c, "exists acyc. [ acyc : Object ]")
    assert judge_nodes(c, "forall x. [ x = cyc || !(x = cyc) ]")


def test_set_quantifiers_enumerate_subsets():
    c = ghost_config()  # heap of 3 objects: 8 subsets
    assert judge_nodes(c, "exists Q: SET. [ acyc in Q && !(cyc in Q) ]")
    assert not judge_nodes(c, "forall Q: SET. acyc in Q")  # the empty subset
    assert judge_nodes(c, "forall Q: SET. [ acyc in Q || !(acyc in Q) ]")


def test_set_quantifier_respects_the_enumeration_cap():
    c = ghost_config()
    ctx = EvalContext.for_config(GHOST_NODES, EXTERNAL_FIXTURE, c, Bounds(set_cap=2))
    with pytest.raises(BoundsExceeded):
        sat(ctx, parse_assertion("exists Q: SET. acyc in Q"))
    # under the cap the same judgment goes through
    assert judge_nodes(c, "exists Q: SET. acyc in Q", Bounds(set_cap=3))


# -- module-side atoms ------------------------------------------------------


def test_internal_and_external(sigma2):
    assert judge_bank2(sigma2, "internal(a2)")
    assert judge_bank2(sigma2, "!external(a2)")
    assert judge_bank2(sigma2, "external(u91)")
    assert judge_bank2(sigma2, "external(this)")
    # the featureless initial object sits on the client side
    c = make_config({0: obj("Object")}, {"o": Addr(0)})
    assert judge_bank2(c, "external(o)")
    # neither holds of non-objects or dangling addresses
    d = make_config({0: obj("Object")}, {"x": Addr(9), "n": Nat(1)})
    for text in ("internal(x)", "external(x)", "internal(n)", "external(n)", "internal(nothing)"):
        assert not judge_bank2(d, text)


# -- permission -------------------------------------------------------------


def test_access_by_identity(sigma2):
    assert judge_bank2(sigma2, "access(a4, a4)")


def test_access_by_field(sigma2):
    assert judge_bank2(sigma2, "access(b1, n11p)") is False  # unbound name
    assert judge_bank2(sigma2, "access(a2, b1)")  # myBank
    assert judge_bank2(sigma2, "access(u94, a2)")  # r2
    assert not judge_bank2(sigma2, "access(a2, a3)")


def test_access_by_frame_needs_this(sigma4):
    # sigma4's frame is about to run "r := a2.deposit(a3, 360)"; this is 91
    assert judge_bank2(sigma4, "access(this, a2)")
    assert judge_bank2(sigma4, "access(u91, a3)")  # u91 denotes this
    # a4 is bound in the frame but never occurs in the remaining code
    assert not judge_bank2(sigma4, "access(this, a4)")
    # and the frame route is only open to this itself
    assert not judge_bank2(sigma4, "access(u92, a2)")


def test_access_requires_addresses(sigma2):
    assert not judge_bank2(sigma2, "access(a2, null)")
    assert not judge_bank2(sigma2, "access(null, a2)")
    assert not judge_bank2(sigma2, "access(S1, a2)")  # sets have no standing


# -- control ----------------------------------------------------------------


def test_calls_matches_the_pending_statement(sigma4):
    assert judge_bank2(sigma4, "calls(this, deposit, a2, [a3, 360])")
    assert judge_bank2(sigma4, "calls(u91, deposit, a2, [_, _])")
    assert judge_bank2(sigma4, "calls(this, deposit, a2, [a3, _])")


def test_calls_mismatches(sigma4, sigma2):
    assert not judge_bank2(sigma4, "calls(u92, deposit, a2, [a3, 360])")  # not the caller
    assert not judge_bank2(sigma4, "calls(this, deposit, a3, [a3, 360])")  # wrong receiver
    assert not judge_bank2(sigma4, "calls(this, attach, a2, [a3, 360])")  # wrong method
    assert not judge_bank2(sigma4, "calls(this, deposit, a2, [a3])")  # wrong arity
    assert not judge_bank2(sigma4, "calls(this, deposit, a2, [a4, 360])")  # wrong argument
    assert not judge_bank2(sigma2, "calls(this, deposit, a2, [a3, 360])")  # nothing pending


# -- space ------------------------------------------------------------------


def test_space_restricts_the_heap_not_the_frame(sigma2):
    assert judge_bank2(sigma2, "in S2: a2 : Account")
    assert not judge_bank2(sigma2, "in S2: a4 : Account")  # removed from view
    assert not judge_bank2(sigma2, "in S2: exists x. x : Client")
    # the frame still evaluates names whose referents were cut away
    assert judge_bank2(sigma2, "in S2: a4 = a4")
    assert not judge_bank2(sigma2, "in missing: true")


def test_space_nests_by_intersection(sigma2):
    assert judge_bank2(sigma2, "in S1: in S2: a2 : Account")
    assert not judge_bank2(sigma2, "in S2: in S1: a4 : Account")


def test_restricted_ghost_evaluation_can_dangle(sigma2):
    # balance sums over ledger nodes, which S2 cuts away
    assert judge_bank2(sigma2, "a2.balance = 60")
    assert not judge_bank2(sigma2, "in S2: a2.balance = 60")


# -- time -------------------------------------------------------------------


def fixture_trace(code):
    return record_trace(INTERNAL_FIXTURE, EXTERNAL_FIXTURE, parse_stmts(code))


def at(trace, position, bounds=None):
    return EvalContext.at(trace, position, bounds)


def test_next_and_will_look_forward():
    trace = fixture_trace("c := new Cell(null, null); x := c.put(5); y := c.get();")
    ctx = at(trace, 1)  # c is bound, put not yet run
    assert sat(ctx, parse_assertion("next [ c.val = 5 ]"))
    assert sat(ctx, parse_assertion("will [ c.val = 5 ]"))
    assert not sat(ctx, parse_assertion("next [ c.val = 7 ]"))
    # will reaches every later configuration, next only the first
    trace2 = fixture_trace("c := new Cell(1, null); x := c.put(2); y := c.put(3);")
    ctx2 = at(trace2, 1)
    assert sat(ctx2, parse_assertion("will [ c.val = 3 ]"))
    assert not sat(ctx2, parse_assertion("next [ c.val = 3 ]"))


def test_future_variables_do_not_leak_back():
    trace = fixture_trace("c := new Cell(null, null); x := c.put(5);")
    ctx = at(trace, 0)
    # c gets bound later; judged from here it has no value at any time
    assert not sat(ctx, parse_assertion("will [ c.val = 5 ]"))
    assert sat(ctx, parse_assertion("will [ !(c.val = 5) ]"))


def test_temporal_operators_end_at_termination():
    trace = fixture_trace("c := new Cell(null, null);")
    last = len(trace.externals) - 1
    ctx = at(trace, last)
    assert not sat(ctx, parse_assertion("next true"))
    assert not sat(ctx, parse_assertion("will true"))


def test_prev_and_was_look_backward():
    trace = fixture_trace("c := new Cell(1, null); x := c.put(2); y := c.put(3);")
    first_change = 2  # position after put(2) completed
    ctx = at(trace, first_change)
    assert sat(ctx, parse_assertion("c.val = 2"))
    assert sat(ctx, parse_assertion("prev [ c.val = 1 ]"))
    last = len(trace.externals) - 1
    ctx = at(trace, last)
    assert sat(ctx, parse_assertion("was [ c.val = 1 ]"))
    assert sat(ctx, parse_assertion("was [ c.val = 2 ]"))
    assert not sat(ctx, parse_assertion("was [ c.val = 3 ]"))  # was is strict


def test_prev_at_the_start_is_false():
    trace = fixture_trace("c := new Cell(1, null);")
    ctx = at(trace, 0)
    assert not sat(ctx, parse_assertion("prev true"))
    assert not sat(ctx, parse_assertion("was true"))


def test_past_under_future_sees_its_own_anchor():
    trace = fixture_trace("c := new Cell(1, null); x := c.put(2);")
    ctx = at(trace, 1)
    # at the next configuration, the previous one is this one
    assert sat(ctx, parse_assertion("next [ prev [ c.val = 1 ] ]"))


def test_changes_requires_a_value_now():
    trace = fixture_trace("c := new Cell(null, null); x := c.put(5); y := c.get();")
    assert not sat(at(trace, 0), parse_assertion("changes(c.val)"))  # c unbound now
    assert sat(at(trace, 1), parse_assertion("changes(c.val)"))  # null -> 5
    assert not sat(at(trace, 2), parse_assertion("changes(c.val)"))  # get touches nothing


def test_changes_desugaring_shape():
    e = parse_expr("c.val")
    d = desugar_changes(A.Changes(e))
    assert isinstance(d, A.BindValue)
    assert d.expr == e
    assert isinstance(d.body, A.Next)


def test_future_search_cutoff_is_reported_not_fatal(sigma4):
    ctx = EvalContext.for_config(BANK_V2, BANK_CLIENTS, sigma4, Bounds(max_steps=1))
    assert not sat(ctx, parse_assertion("will [ a2.balance = 420 ]"))
    assert any("cut off" in c for c in ctx.caveats)


def test_fuel_exhaustion_is_reported_not_fatal():
    c = ghost_config()
    ctx = EvalContext.for_config(GHOST_NODES, EXTERNAL_FIXTURE, c, Bounds(fuel=3))
    assert not sat(ctx, parse_assertion("cyc.last = cyc.last"))
    assert any("fuel" in m for m in ctx.caveats)


# -- named specs ------------------------------------------------------------


def test_spec_rejects_duplicate_names():
    body = parse_assertion("true")
    with pytest.raises(ValueError):
        Spec("s", (NamedAssertion("a", body), NamedAssertion("a", body)))


def test_spec_lookup():
    body = parse_assertion("true")
    spec = Spec("s", (NamedAssertion("a", body),))
    assert spec.lookup("a").body == body
    with pytest.raises(KeyError):
        spec.lookup("b")
