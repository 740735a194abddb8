import pytest
from hypothesis import given
from hypothesis import strategies as st

from dessins.perm import (
    GroupOrderOverflow,
    Permutation,
    PermutationError,
    compose,
    cycle_decomposition,
    from_cycles,
    group_order,
    identity,
    inverse,
    is_transitive,
    parse,
)

from .oracles import NINE_ALPHA, NINE_GROUP_ORDER, NINE_PHI, NINE_SIGMA


def perms(n):
    return st.permutations(list(range(1, n + 1))).map(lambda xs: Permutation(tuple(xs)))


sized_perms = st.integers(1, 12).flatmap(perms)
same_size_triples = st.integers(1, 10).flatmap(lambda n: st.tuples(perms(n), perms(n), perms(n)))


# -- examples ---------------------------------------------------------------


def test_identity_maps_every_label_to_itself():
    e = identity(3)
    assert [e(x) for x in (1, 2, 3)] == [1, 2, 3]
    assert identity(1).images == (1,)


def test_identity_rejects_size_zero():
    with pytest.raises(PermutationError):
        identity(0)


def test_compose_is_left_to_right():
    p = parse("(1 2)", 3)
    q = parse("(2 3)", 3)
    # 1 -> p -> 2 -> q -> 3
    assert compose(p, q)(1) == 3
    assert compose(q, p)(1) == 2


def test_nine_edge_triple_multiplies_to_identity():
    s, a, f = parse(NINE_SIGMA), parse(NINE_ALPHA), parse(NINE_PHI)
    assert compose(compose(s, a), f) == identity(9)
    assert inverse(compose(s, a)) == f


def test_involution_and_three_cycle():
    t = parse("(1 2)")
    assert compose(t, t) == identity(2)
    assert str(inverse(parse("(1 2 3)"))) == "(1 3 2)"
    assert inverse(identity(5)) == identity(5)


def test_size_mismatch_is_an_error():
    with pytest.raises(PermutationError):
        compose(identity(2), identity(3))


def test_cycle_decomposition_is_canonical():
    s = parse(NINE_SIGMA)
    assert cycle_decomposition(s).cycles == [(1, 7, 6), (2, 3), (4, 8, 5), (9,)]
    assert sorted(parse(NINE_PHI).cycle_type()) == [1, 3, 5]
    assert cycle_decomposition(identity(4)).cycles == [(1,), (2,), (3,), (4,)]
    # rotated input still comes out starting at the smallest label
    assert str(parse("(7 6 1)(3 2)(5 4 8)", 9)) == "(1 7 6)(2 3)(4 8 5)(9)"


def test_parse_accepts_compact_and_spaced_forms():
    assert parse("(176)(23)(485)(9)") == parse(NINE_SIGMA)
    assert parse("(1,7,6)(2,3)(4,8,5)(9)") == parse(NINE_SIGMA)
    assert parse("(10 11)", 12).n == 12
    assert parse("()", 3) == identity(3)


@pytest.mark.parametrize("bad", ["(1 2", "1 2", "(1 a)", "(1 2)(2 3)", "(0 1)"])
def test_parse_rejects_garbage(bad):
    with pytest.raises(PermutationError):
        parse(bad, 3)


def test_non_bijection_rejected():
    with pytest.raises(PermutationError):
        Permutation((1, 1, 2))


def test_transitivity_examples():
    assert is_transitive([parse(NINE_SIGMA), parse(NINE_ALPHA)], 9)
    assert not is_transitive([identity(2)], 2)
    assert is_transitive([parse("(1 2 3 4 5)")], 5)
    assert not is_transitive([], 2)
    assert is_transitive([], 1)


def test_group_order_examples():
    assert group_order([parse("(1 2)")], 2, 100) == 2
    assert group_order([from_cycles([range(1, 8)], 7)], 7, 10**6) == 7
    assert group_order([parse("(1 2 3)"), identity(3)], 3, 100) == 3
    assert group_order([parse(NINE_SIGMA), parse(NINE_ALPHA)], 9, 10**6) == NINE_GROUP_ORDER


def test_group_order_cap():
    out = group_order([parse("(1 2 3 4 5 6)"), parse("(1 2)", 6)], 6, 100)
    assert out == GroupOrderOverflow(100)
    assert str(out) == ">100"
    with pytest.raises(PermutationError):
        group_order([identity(2)], 2, 0)


# -- properties -------------------------------------------------------------


@given(sized_perms)
def test_inverse_both_sides(p):
    e = identity(p.n)
    assert compose(p, inverse(p)) == e
    assert compose(inverse(p), p) == e


@given(same_size_triples)
def test_compose_is_associative(t):
    a, b, c = t
    assert compose(compose(a, b), c) == compose(a, compose(b, c))


@given(sized_perms)
def test_cycles_round_trip(p):
    d = cycle_decomposition(p)
    assert d.to_permutation() == p
    assert sorted(x for c in d.cycles for x in c) == list(range(1, p.n + 1))
    assert all(c[0] == min(c) for c in d.cycles)
    assert [c[0] for c in d.cycles] == sorted(c[0] for c in d.cycles)


@given(sized_perms)
def test_text_round_trip(p):
    assert parse(str(p), p.n) == p


@given(st.integers(1, 9))
def test_single_cycle_group(k):
    g = from_cycles([range(1, k + 1)], k)
    assert is_transitive([g], k)
    assert group_order([g], k, 100) == k
    if k >= 2:
        assert not is_transitive([identity(k)], k)
