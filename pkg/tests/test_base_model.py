from __future__ import annotations

import pytest

from bpabis.base_model import (
    EMPTY,
    ContextNotInDomain,
    DecTriple,
    PdBudgetExceeded,
    PreBase,
    PropTriple,
    base_from_payload,
    base_to_payload,
    cc_norm,
    cc_norm_table,
    check_base,
    check_pre_base,
    pd,
    red_of,
    rff,
)
from bpabis.grammar import parse_system

Y = frozenset({"Y"})


@pytest.fixture(scope="module")
def xy_base(xy_norm):
    # X hands over to Y, so X equals X Y and is prime only once Y is absorbed.
    return PreBase(
        system=xy_norm,
        domain=frozenset({EMPTY, Y}),
        primes={EMPTY: frozenset({"Y"}), Y: frozenset({"X"})},
        dec=(DecTriple("X", ("X", "Y"), EMPTY),),
        prop=(PropTriple("Y", "Y", EMPTY),),
    )


def single_var_base(system):
    names = frozenset(system.variables)
    return PreBase(system, frozenset({EMPTY}), {EMPTY: names}, (), ())


def test_xy_base_is_well_formed(xy_norm, xy_base):
    assert check_pre_base(xy_norm, xy_base) == []
    assert check_base(xy_norm, xy_base) == []


def test_pd_golden_xy(xy_base):
    assert pd(xy_base, EMPTY, ("X",)) == ("X", "Y")
    assert pd(xy_base, EMPTY, ("Y",)) == ("Y",)
    assert pd(xy_base, Y, ("X",)) == ("X",)
    assert pd(xy_base, EMPTY, ("X", "X")) == ("X", "Y", "X", "Y")


def test_pd_empty_config(xy_base):
    assert pd(xy_base, EMPTY, ()) == ()
    assert pd(xy_base, Y, ()) == ()


def test_pd_requires_domain_context(xy_base):
    with pytest.raises(ContextNotInDomain):
        pd(xy_base, frozenset({"X"}), ("X",))


def test_red_of_xy(xy_base):
    assert red_of(xy_base, EMPTY, ()) == EMPTY
    assert red_of(xy_base, EMPTY, ("Y",)) == Y
    assert red_of(xy_base, EMPTY, ("X",)) == EMPTY  # image X Y ends with X, whose set is empty
    assert red_of(xy_base, EMPTY, ("Y", "Y")) == Y


def test_rff_xy(xy_base):
    assert rff(xy_base, EMPTY, ()) == ()
    assert rff(xy_base, Y, ("Y",)) == ()
    assert rff(xy_base, EMPTY, ("Y", "Y")) == ("Y",)
    assert rff(xy_base, Y, ("X", "Y", "Y")) == ("X",)


def test_pd_budget_detects_looping_candidate():
    system = parse_system("X -a-> .\nY -b-> .")
    # X's body starts with X itself while X stays a non-prime: pd cannot settle
    looping = PreBase(
        system,
        frozenset({EMPTY}),
        {EMPTY: frozenset({"Y"})},
        (DecTriple("X", ("X", "Y"), EMPTY),),
        (),
    )
    with pytest.raises(PdBudgetExceeded):
        pd(looping, EMPTY, ("X",))
    assert any("failed" in p for p in check_base(system, looping))


def test_check_pre_base_accepts_trivial():
    system = parse_system("X -a-> .")
    assert check_pre_base(system, single_var_base(system)) == []


def test_check_pre_base_domain_closure():
    system = parse_system("X -a-> .")
    # the propagation set {X} is claimed but the domain omits it
    candidate = PreBase(
        system,
        frozenset({EMPTY}),
        {EMPTY: frozenset({"X"})},
        (),
        (PropTriple("X", "X", EMPTY),),
    )
    assert any("not propagation-closed" in p for p in check_pre_base(system, candidate))


def test_check_pre_base_unreachable_context():
    system = parse_system("X -a-> .")
    candidate = PreBase(
        system,
        frozenset({EMPTY, frozenset({"X"})}),
        {EMPTY: frozenset({"X"}), frozenset({"X"}): frozenset()},
        (),
        (),
    )
    assert any("unreachable" in p for p in check_pre_base(system, candidate))


def test_check_pre_base_duplicate_dec(xy_norm):
    candidate = PreBase(
        xy_norm,
        frozenset({EMPTY, Y}),
        {EMPTY: frozenset({"Y"}), Y: frozenset({"X"})},
        (DecTriple("X", ("X", "Y"), EMPTY), DecTriple("X", ("Y",), EMPTY)),
        (PropTriple("Y", "Y", EMPTY),),
    )
    assert any("duplicate decomposition" in p for p in check_pre_base(xy_norm, candidate))


def test_check_pre_base_missing_dec(xy_norm):
    candidate = PreBase(
        xy_norm,
        frozenset({EMPTY, Y}),
        {EMPTY: frozenset({"Y"}), Y: frozenset({"X"})},
        (),
        (PropTriple("Y", "Y", EMPTY),),
    )
    assert any("has no decomposition" in p for p in check_pre_base(xy_norm, candidate))


def test_check_pre_base_body_must_end_in_prime(xy_norm):
    candidate = PreBase(
        xy_norm,
        frozenset({EMPTY, Y}),
        {EMPTY: frozenset({"Y"}), Y: frozenset({"X"})},
        (DecTriple("X", ("Y", "X"), EMPTY),),
        (PropTriple("Y", "Y", EMPTY),),
    )
    assert any("does not end in a prime" in p for p in check_pre_base(xy_norm, candidate))


def test_check_base_norm_bound(xy_norm):
    # body Y X at context {Y} evaluates fine but makes pd(X) at {} too long
    candidate = PreBase(
        xy_norm,
        frozenset({EMPTY, Y}),
        {EMPTY: frozenset({"Y"}), Y: frozenset({"X"})},
        (DecTriple("X", ("X", "Y", "Y"), EMPTY),),
        (PropTriple("Y", "Y", EMPTY),),
    )
    problems = check_base(xy_norm, candidate)
    assert any("not in prime form" in p for p in problems) or any("norm" in p for p in problems)


def test_check_base_body_fixed_point(xy_norm):
    # Y Y is not an image: the leading Y is absorbed by the trailing one
    candidate = PreBase(
        xy_norm,
        frozenset({EMPTY, Y}),
        {EMPTY: frozenset({"Y"}), Y: frozenset({"X"})},
        (DecTriple("X", ("Y", "Y"), EMPTY),),
        (PropTriple("Y", "Y", EMPTY),),
    )
    assert any("not in prime form" in p for p in check_base(xy_norm, candidate))


def test_cc_norm_table_xy(xy_base):
    table = cc_norm_table(xy_base)
    assert table[("Y", EMPTY)] == 1
    assert table[("X", EMPTY)] == 2
    assert table[("Y", Y)] == 0
    assert table[("X", Y)] == 1
    assert cc_norm(xy_base, table, EMPTY, ("X", "Y")) == 2
    assert cc_norm(xy_base, table, EMPTY, ()) == 0


def test_cc_norm_zero_iff_in_context(xy_base):
    table = cc_norm_table(xy_base)
    for (var, ctx), value in table.items():
        assert (value == 0) == (var in ctx)


def test_cc_norm_bounded_by_norm(xy_base):
    table = cc_norm_table(xy_base)
    norms = xy_base.norms
    for (var, _), value in table.items():
        assert value <= norms[var]


def test_payload_round_trip(xy_norm, xy_base):
    payload = base_to_payload(xy_base)
    again = base_from_payload(xy_norm, payload)
    assert again == xy_base
    assert base_to_payload(again) == payload


def test_payload_shape(xy_base):
    payload = base_to_payload(xy_base)
    assert payload["domain"] == [[], ["Y"]]
    assert payload["primes"] == {"": ["Y"], "Y": ["X"]}
    assert payload["dec"] == [{"var": "X", "body": ["X", "Y"], "context": []}]
    assert payload["prop"] == [{"prime": "Y", "redundant": ["Y"], "context": []}]
