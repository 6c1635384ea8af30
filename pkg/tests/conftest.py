"""Shared fixtures: hand-built bank configurations and corpus loading.

The bank configurations use fixed addresses so judgments in the tests can
name objects directly: 1 is the bank, 2..4 are accounts, 11..13 are ledger
nodes (second representation only), 91..94 are clients.  The active frame
is client 91's, with every participant bound to a variable and two address
sets S1/S2 in scope for the space judgments.
"""

from __future__ import annotations

import pytest

from chainmail import (
    Addr,
    AddrSet,
    Bounds,
    Config,
    Continuation,
    EvalContext,
    Frame,
    Nat,
    NULL,
    ObjectRecord,
    parse_assertion,
    parse_module,
    parse_spec,
    parse_stmts,
    sat,
)
from chainmail import corpus


def obj(class_id, **fields):
    return ObjectRecord(class_id, dict(fields))


def addr_set(*indices):
    return AddrSet(frozenset(Addr(i) for i in indices))


def make_config(heap, vars, code=""):
    stmts = tuple(parse_stmts(code)) if code else ()
    frame = Frame(Continuation(stmts), dict(vars))
    return Config((frame,), {Addr(k): v for k, v in heap.items()})


def judge(internal, external, config, text, bounds=None):
    ctx = EvalContext.for_config(internal, external, config, bounds or Bounds())
    return sat(ctx, parse_assertion(text))


def corpus_module(name):
    return parse_module(corpus.read_text(name), name)


def corpus_spec(name):
    return parse_spec(corpus.read_text(name), name)


def load_scenario(sc):
    internal = corpus_module(sc["internal"])
    external = corpus_module(sc["external"])
    spec = corpus_spec(sc["spec"])
    driver = parse_stmts(sc["driver"], "<driver>")
    return internal, external, spec, driver


BANK_V1 = corpus_module("bank_v1.loo")
BANK_V2 = corpus_module("bank_v2.loo")
BANK_CLIENTS = corpus_module("bank_clients.loo")

GHOST_NODES = parse_module(
    """
class Node {
  field next
  ghost last() { if this.next = null then this else this.next.last() }
  ghost acyclic() { if this.next = null then true else this.next.acyclic() }
}
""",
    "<ghost-nodes>",
)


def _clients():
    return {
        91: obj("Client", r1=Addr(1)),
        92: obj("Client"),
        93: obj("Client", r1=Addr(4)),
        94: obj("Client", r1=Addr(93), r2=Addr(2)),
    }


def _bank_vars():
    return {
        "this": Addr(91),
        "b1": Addr(1),
        "a2": Addr(2),
        "a3": Addr(3),
        "a4": Addr(4),
        "u91": Addr(91),
        "u92": Addr(92),
        "u93": Addr(93),
        "u94": Addr(94),
        "S1": addr_set(1, 2, 3, 4, 94),
        "S2": addr_set(1, 2, 3),
    }


def bank_v1_config():
    heap = {
        0: obj("Object"),
        1: obj("Bank"),
        2: obj("Account", myBank=Addr(1), balance=Nat(60)),
        3: obj("Account", myBank=Addr(1), balance=Nat(360)),
        4: obj("Account", myBank=Addr(1), balance=Nat(380)),
        **_clients(),
    }
    return make_config(heap, _bank_vars())


def bank_v2_config(code=""):
    heap = {
        0: obj("Object"),
        1: obj("Bank", ledger=Addr(11)),
        2: obj("Account", myBank=Addr(1), nd=Addr(11)),
        3: obj("Account", myBank=Addr(1), nd=Addr(12)),
        4: obj("Account", myBank=Addr(1), nd=Addr(13)),
        11: obj("Node", acct=Addr(2), val=Nat(60), next=Addr(12)),
        12: obj("Node", acct=Addr(3), val=Nat(360), next=Addr(13)),
        13: obj("Node", acct=Addr(4), val=Nat(380), next=NULL),
        **_clients(),
    }
    return make_config(heap, _bank_vars(), code)


def bank_go_config():
    """First representation, poised on a chained call: client 94 reaches an
    account through client 93 and deposits into it.  S1 keeps the whole
    chain; S2 drops the clients."""
    heap = {
        0: obj("Object"),
        1: obj("Bank"),
        2: obj("Account", myBank=Addr(1), balance=Nat(60)),
        3: obj("Account", myBank=Addr(1), balance=Nat(60)),
        4: obj("Account", myBank=Addr(1), balance=Nat(380)),
        91: obj("Client", r1=Addr(1)),
        93: obj("Client93", fa4=Addr(4)),
        94: obj("Client94", f93=Addr(93), facc=Addr(2)),
    }
    vars = {
        "this": Addr(91),
        "b1": Addr(1),
        "a2": Addr(2),
        "a3": Addr(3),
        "a4": Addr(4),
        "u93": Addr(93),
        "u94": Addr(94),
        "S1": addr_set(1, 2, 4, 93, 94),
        "S2": addr_set(1, 2, 4),
    }
    return make_config(heap, vars, "r := u94.go();")


@pytest.fixture
def sigma1():
    return bank_v1_config()


@pytest.fixture
def sigma2():
    return bank_v2_config()


@pytest.fixture
def sigma4():
    return bank_v2_config("r := a2.deposit(a3, 360);")


@pytest.fixture
def sigma5():
    return bank_go_config()


def ghost_config():
    """Two nodes: 1 ends a chain, 2 points at itself."""
    heap = {
        0: obj("Object"),
        1: obj("Node", next=NULL),
        2: obj("Node", next=Addr(2)),
    }
    return make_config(heap, {"this": Addr(0), "acyc": Addr(1), "cyc": Addr(2)})
