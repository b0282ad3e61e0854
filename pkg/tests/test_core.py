import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from corel import (
    Corelation,
    Cospan,
    Direction,
    Relation,
    Span,
    Zigzag,
    compose,
    compose_corel,
    compose_cospan,
    compose_rel,
    compose_span,
    dagger,
    gamma,
    pi,
    rho,
    tensor_diagram,
    zigzag_eval,
)
from corel.core import embed_backward, embed_forward
from corel.enumeration import enumerate_homs
from corel.errors import DimensionError, KindError, PreconditionError
from corel.finset import FinFn, FinSetEngine, Partition, partition_of, pullback_finset
from corel.linear import LinearEngine

F = FinSetEngine()
INJ = F.with_subcategory("M")


def fn(table, cod):
    return FinFn.of(table, cod)


def corels(n, m):
    return enumerate_homs(F, n, m, "corel")


def rels(n, m):
    return enumerate_homs(F, n, m, "rel")


def test_engine_subcategory_is_a_copy():
    assert F.a_class != "M" or F is not INJ
    assert INJ.a_class == "M"
    with pytest.raises(ValueError):
        F.with_subcategory("nonsense")


def test_cospan_equality_is_up_to_apex_iso():
    a = Cospan(F, fn([0], 2), fn([1], 2))
    b = Cospan(F, fn([1], 2), fn([0], 2))
    assert a == b and hash(a) == hash(b)
    assert a != Cospan(F, fn([0], 2), fn([0], 2))


def test_cospan_legs_must_share_apex():
    with pytest.raises(DimensionError):
        Cospan(F, fn([0], 1), fn([0], 2))


def test_identity_laws_exhaustive():
    for n, m in [(0, 1), (1, 1), (2, 1), (1, 2)]:
        for a in corels(n, m):
            assert compose_corel(Corelation.identity(F, n), a) == a
            assert compose_corel(a, Corelation.identity(F, m)) == a
        for r in rels(n, m):
            assert compose_rel(Relation.identity(F, n), r) == r
            assert compose_rel(r, Relation.identity(F, m)) == r


def test_corelation_composition_is_associative_exhaustive():
    for a, b, c in itertools.product(corels(1, 2), corels(2, 1), corels(1, 2)):
        assert compose_corel(compose_corel(a, b), c) == compose_corel(a, compose_corel(b, c))


def test_relation_composition_is_associative_exhaustive():
    for a, b, c in itertools.product(rels(1, 2), rels(2, 1), rels(1, 1)):
        assert compose_rel(compose_rel(a, b), c) == compose_rel(a, compose_rel(b, c))


def test_relation_composition_matches_existential_chase():
    def pairs(r):
        return {(x, y) for x, y in zip(r.left.table, r.right.table)}

    for a, b in itertools.product(rels(2, 2), rels(2, 1)):
        expected = {(x, z) for x, y in pairs(a) for y2, z in pairs(b) if y == y2}
        assert pairs(compose_rel(a, b)) == expected


def test_gamma_is_full():
    for a in corels(2, 2):
        assert gamma(a.cospan) == a


def test_tensor_examples():
    unit = Corelation.identity(F, 0)
    for a in corels(1, 2):
        assert tensor_diagram(a, unit) == a == tensor_diagram(unit, a)
    ident = gamma(Cospan.identity(F, 1))
    both = tensor_diagram(ident, ident)
    assert partition_of(both) == Partition.from_blocks(2, 2, [["x0", "y0"], ["x1", "y1"]])


def test_tensor_rejects_mixed_kinds():
    with pytest.raises(KindError):
        tensor_diagram(Cospan.identity(F, 1), Span.identity(F, 1))
    with pytest.raises(KindError):
        compose(Corelation.identity(F, 1), Relation.identity(F, 1))


def test_tensor_is_strict_for_gamma_and_pi():
    cs = [Cospan(F, fn([0], 2), fn([1, 1], 2)), Cospan(F, fn([0, 0], 1), fn([], 1))]
    for c1, c2 in itertools.product(cs, repeat=2):
        assert gamma(tensor_diagram(c1, c2)) == tensor_diagram(gamma(c1), gamma(c2))
    ss = [Span(INJ, fn([0], 2), fn([1], 3)), Span.identity(INJ, 1)]
    for s1, s2 in itertools.product(ss, repeat=2):
        assert pi(tensor_diagram(s1, s2)) == tensor_diagram(pi(s1), pi(s2))


def test_dagger_swaps_boundaries():
    a = gamma(Cospan(F, fn([0, 0], 1), fn([0], 1)))
    d = dagger(a)
    assert (d.dom, d.cod) == (1, 2)
    assert dagger(d) == a
    with pytest.raises(KindError):
        dagger(fn([0], 1))


def test_pi_rejects_legs_outside_subcategory():
    with pytest.raises(PreconditionError):
        pi(Span(INJ, fn([0, 0], 1), fn([0, 1], 2)))


def test_square_commutes_for_injections():
    for f in INJ.morphisms(1, 3):
        if INJ.in_A(f):
            assert pi(embed_forward(INJ, f, "span")) == gamma(embed_forward(INJ, f, "cospan"))
            assert pi(embed_backward(INJ, f, "span")) == gamma(embed_backward(INJ, f, "cospan"))


# --- zigzags ---------------------------------------------------------------


def test_empty_zigzag_gives_identities():
    z = Zigzag.empty(INJ, 2)
    assert zigzag_eval(z, "cospan") == Cospan.identity(INJ, 2)
    assert zigzag_eval(z, "span") == Span.identity(INJ, 2)


def test_single_forward_step():
    f = fn([1], 2)
    z = Zigzag.build(INJ, 1, [("fwd", f)])
    assert zigzag_eval(z, "cospan") == Cospan(INJ, f, INJ.identity(2))
    assert zigzag_eval(z, "span") == Span(INJ, INJ.identity(1), f)


def test_forward_then_backward():
    f, g = fn([0], 2), fn([1], 2)
    z = Zigzag.build(INJ, 1, [(Direction.FWD, f), (Direction.BWD, g)])
    assert zigzag_eval(z, "cospan") == Cospan(INJ, f, g)
    assert zigzag_eval(z, "span") == Span(INJ, *pullback_finset(f, g))


def test_zigzag_normalises_repeats_and_identities():
    f, g = fn([1], 2), fn([0, 2], 3)
    z = Zigzag.build(INJ, 1, [("fwd", f), ("fwd", INJ.identity(2)), ("fwd", g)])
    assert z.steps == ((Direction.FWD, INJ.compose(f, g)),)
    assert Zigzag.build(INJ, 2, [("bwd", INJ.identity(2))]).steps == ()


def test_zigzag_rejects_bad_chains_and_steps_outside_A():
    with pytest.raises(DimensionError):
        Zigzag.build(INJ, 1, [("fwd", fn([0, 1], 2))])
    z = Zigzag.build(INJ, 2, [("fwd", fn([0, 0], 1))])
    with pytest.raises(PreconditionError):
        zigzag_eval(z)


def test_zigzag_evaluation_is_compositional():
    f, g, h = fn([0], 2), fn([1], 2), fn([0, 1], 3)
    a = Zigzag.build(INJ, 1, [("fwd", f), ("bwd", g)])
    b = Zigzag.build(INJ, 1, [("fwd", fn([2], 3))])
    both = a.then(b)
    assert zigzag_eval(both) == compose_cospan(zigzag_eval(a), zigzag_eval(b))
    assert zigzag_eval(both, "span") == compose_span(zigzag_eval(a, "span"), zigzag_eval(b, "span"))


# --- linear examples from the core operations ------------------------------


def test_linear_span_composition_example():
    Q = LinearEngine()
    from corel.linalg import Matrix

    def m(x):
        return Matrix.of(Q.field, [[x]])

    got = compose_span(Span(Q, m(2), m(1)), Span(Q, m(1), m(3)))
    assert got == Span(Q, m(2), m(3))


def test_linear_rho_spans_rref_of_pairing():
    Q = LinearEngine()
    from corel.linalg import Matrix, row_space, vstack

    left = Matrix.of(Q.field, [[1, 0]])
    right = Matrix.of(Q.field, [[1, 1]])
    r = rho(Span(Q, left, right))
    assert row_space(vstack(r.left, r.right).T) == row_space(vstack(left, right).T)
    assert r.apex == 2


@given(st.lists(st.integers(0, 2), min_size=0, max_size=3), st.lists(st.integers(0, 2), min_size=0, max_size=3))
def test_gamma_of_cospan_equals_gamma_of_its_canonical_form(a, b):
    c = Cospan(F, fn(a, 3), fn(b, 3))
    assert gamma(c) == gamma(c.canonical)
    assert gamma(c).apex <= 3
