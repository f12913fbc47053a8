import itertools
import random
from fractions import Fraction

import pytest

import oracles
from painted_operad.cohomology import (
    GradedClass,
    all_standard_relations,
    build_basis,
    edge_quads,
    linear_class,
    monomial_class,
    multiply,
    multiply_by_generator,
    multiply_generator,
    normal_form,
    quadratic_pairs,
    r_ijkl,
    standard_relation,
)
from painted_operad.trees import (
    GoodFamily,
    PaintedSet,
    enumerate_stable_partitions,
    enumerate_trees,
    expand_tree,
    one_vertex,
    parse_label,
    tail,
    tree_cache,
    vertex_partitions,
)

S4 = PaintedSet.standard(4)
S5 = PaintedSet.standard(5)
W2B2 = PaintedSet.standard(2, 2)
W2B3 = PaintedSet.standard(2, 3)


def P(S, *labels):
    return S.partition([parse_label(x) for x in labels])


def T(S, *parts):
    return GoodFamily(S, [P(S, *p) for p in parts])


def L(*xs):
    return [parse_label(x) for x in xs]


def form_text(form):
    return {tuple(str(x) for x in p.parts[0]): c for p, c in form.terms.items()}


def test_r_ijkl_examples():
    assert form_text(r_ijkl(S4, *L("w1", "w2", "w3", "w4"))) == {("w1", "w2"): 1, ("w1", "w4"): -1}
    r = form_text(r_ijkl(W2B3, *L("b1", "w1", "b2", "w2")))
    assert r == {("w1", "b1"): 1, ("w1", "b1", "b3"): 1, ("w1", "b2"): -1, ("w1", "b2", "b3"): -1}
    r = form_text(r_ijkl(W2B2, *L("b1", "w1", "b2", "w2")))
    assert r == {("w1", "b1"): 1, ("w1", "b2"): -1}
    with pytest.raises(ValueError):
        r_ijkl(W2B2, *L("w1", "w2", "b1", "b2"))


def test_quadratic_pairs_examples():
    assert len(quadratic_pairs(S4)) == 3
    assert len(quadratic_pairs(W2B2)) == 1


@pytest.mark.parametrize("m,n", [(4, 0), (5, 0), (6, 0), (2, 2), (2, 3), (3, 2), (3, 3)])
def test_quadratic_pairs_match_literal_definition(m, n):
    S = PaintedSet.standard(m, n)
    ours = {frozenset((_fs(a), _fs(b))) for a, b in quadratic_pairs(S)}
    parts = oracles.stable_partitions(m, n)
    ref = {frozenset((parts[a], parts[b])) for a, b in oracles.quadratic_pairs(m, n)}
    assert ours == ref


def _fs(p):
    return frozenset(frozenset(map(str, x)) for x in p.parts)


def test_multiply_generator_examples():
    s1, s2 = enumerate_stable_partitions(W2B2)
    assert multiply_generator(s1, GoodFamily(W2B2, [s2])).is_zero()
    g = T(S5, ("w1", "w2"))
    x = multiply_generator(P(S5, "w3", "w4"), g)
    assert x.terms == {T(S5, ("w1", "w2"), ("w3", "w4")): 1}
    a = multiply_generator(P(S5, "w1", "w2"), g, L("w1", "w2", "w3", "w4"))
    assert a.terms == {T(S5, ("w1", "w2"), ("w3", "w4")): -1}
    b = multiply_generator(P(S5, "w1", "w2"), g, L("w1", "w2", "w3", "w5"))
    assert b.terms == {T(S5, ("w1", "w2"), ("w3", "w5")): -1}
    basis = build_basis(S5)
    assert basis.normal_form(a) == basis.normal_form(b)
    with pytest.raises(ValueError):
        multiply_generator(P(S5, "w1", "w2"), g, L("w1", "w3", "w4", "w5"))


def test_multiply_examples():
    basis = build_basis(S4)
    one = GradedClass.one(S4)
    x = GradedClass.monomial(T(S4, ("w1", "w2")))
    y = GradedClass.monomial(T(S4, ("w1", "w3")))
    assert multiply(one, x, basis) == basis.normal_form(x)
    assert multiply(x, y, basis).is_zero()
    assert multiply(x, x, basis).is_zero()


def test_standard_relation_examples():
    rel = standard_relation(one_vertex(S5), 0, L("w1", "w2", "w3", "w4"))
    want = {
        T(S5, ("w1", "w2")): 1,
        T(S5, ("w1", "w2", "w5")): 1,
        T(S5, ("w1", "w4")): -1,
        T(S5, ("w1", "w4", "w5")): -1,
    }
    assert rel == want
    s1, s2 = enumerate_stable_partitions(W2B2)
    rel = standard_relation(one_vertex(W2B2), 0, L("b1", "w1", "b2", "w2"))
    assert rel == {GoodFamily(W2B2, [s1]): 1, GoodFamily(W2B2, [s2]): -1}
    assert build_basis(S5).normal_form(want, 1).is_zero()
    assert build_basis(W2B2).normal_form(rel, 1).is_zero()


GOLDEN = {(3, 0): [1], (4, 0): [1, 1], (5, 0): [1, 5, 1], (6, 0): [1, 16, 16, 1], (2, 2): [1, 1], (2, 3): [1, 4, 1], (3, 2): [1, 5, 1]}


@pytest.mark.parametrize("mn", sorted(GOLDEN))
def test_dims_match_oracle_and_golden(mn):
    S = PaintedSet.standard(*mn)
    assert build_basis(S).dims == GOLDEN[mn]
    assert oracles.quotient_dims(*mn) == GOLDEN[mn]


def test_w2b3_degree_one_hand_check():
    assert len(enumerate_stable_partitions(W2B3)) == 6
    assert oracles.linear_relation_rank(2, 3) == 2
    assert build_basis(W2B3).dims[1] == 4


@pytest.mark.parametrize("mn", [(4, 0), (5, 0), (2, 3), (3, 2), (6, 0)])
def test_basis_sizes_and_relations_vanish(mn):
    S = PaintedSet.standard(*mn)
    basis = build_basis(S)
    for d in range(1, basis.top + 1):
        rels = all_standard_relations(S, d, enumerate_trees(S, d - 1))
        for rel in rels:
            assert basis.normal_form(rel, d).is_zero()
        for g in basis.basis[d]:
            assert basis.class_of(g).terms == {g: 1}
        col = {g: k for k, g in enumerate(basis.trees[d])}
        rows = [{col[g]: c for g, c in rel.items()} for rel in rels]
        assert len(basis.trees[d]) - oracles.sparse_rank(rows, len(col)) == basis.dims[d]


@pytest.mark.parametrize("mn", [(4, 0), (5, 0), (6, 0), (2, 3), (3, 2), (2, 2)])
def test_top_degree_rank_one_and_maximal_trees_agree(mn):
    S = PaintedSet.standard(*mn)
    basis = build_basis(S)
    D = len(S) - 3
    assert basis.top == D and basis.dims[D] == 1
    classes = {tuple(sorted(basis.class_of(g).terms.items(), key=lambda kv: kv[0].masks)) for g in basis.trees[D]}
    assert len(classes) == 1


def test_normal_form_idempotent_and_linear():
    basis = build_basis(S5)
    rng = random.Random(0)
    trees = basis.trees[1]
    for _ in range(20):
        x = GradedClass(S5, 1, {g: rng.randint(-3, 3) for g in rng.sample(trees, 4)})
        y = GradedClass(S5, 1, {g: rng.randint(-3, 3) for g in rng.sample(trees, 4)})
        nx = normal_form(x, basis)
        assert normal_form(nx, basis) == nx
        assert normal_form(x + y, basis) == nx + normal_form(y, basis)
        assert set(nx.terms) <= set(basis.basis[1])


def _choice_independence(S):
    basis = build_basis(S)
    checked = 0
    for d in range(1, basis.top + 1):
        for g in enumerate_trees(S, d):
            t = tree_cache(g)
            for m in g.masks:
                quads = edge_quads(t, m)
                ref = basis.normal_form(multiply_generator(m, g, quads[0]))
                for q in quads[1:]:
                    assert basis.normal_form(multiply_generator(m, g, q)) == ref
                    checked += 1
    return checked


@pytest.mark.parametrize("mn", [(4, 0), (5, 0), (2, 2), (2, 3), (3, 2)])
def test_choice_independence_exhaustive(mn):
    assert _choice_independence(PaintedSet.standard(*mn)) > 0


@pytest.mark.parametrize("mn", [(4, 0), (5, 0), (2, 3), (3, 2)])
def test_generator_products_commute(mn):
    S = PaintedSet.standard(*mn)
    basis = build_basis(S)
    parts = enumerate_stable_partitions(S)
    for d in range(basis.top):
        for g in basis.basis[d]:
            x = GradedClass.monomial(g)
            for a, b in itertools.combinations(parts, 2):
                left = multiply_by_generator(a, multiply_by_generator(b, x, basis), basis)
                right = multiply_by_generator(b, multiply_by_generator(a, x, basis), basis)
                assert left == right


@pytest.mark.parametrize("mn", [(4, 0), (5, 0), (2, 3), (3, 2)])
def test_ideal_generators_annihilate(mn):
    S = PaintedSet.standard(*mn)
    basis = build_basis(S)
    labs = S.labels
    quads = [q for q in itertools.permutations(labs, 4) if _allowed(S, q)]
    for q in quads:
        r = linear_class(r_ijkl(S, *q), basis)
        assert r.is_zero()
    for a, b in quadratic_pairs(S):
        assert monomial_class([a.mask, b.mask], basis).is_zero()
        for d in range(basis.top - 1):
            for g in basis.basis[d]:
                assert multiply(monomial_class([a.mask, b.mask], basis), GradedClass.monomial(g), basis).is_zero()


def _allowed(S, q):
    try:
        r_ijkl(S, *q)
        return True
    except ValueError:
        return False


@pytest.mark.parametrize("mn", [(5, 0), (3, 2)])
def test_ring_associative_commutative(mn):
    S = PaintedSet.standard(*mn)
    basis = build_basis(S)
    rng = random.Random(1)
    classes = [c for d in range(basis.top + 1) for c in basis.basis_classes(d)]
    for _ in range(40):
        x, y, z = (rng.choice(classes) for _ in range(3))
        assert multiply(x, y, basis) == multiply(y, x, basis)
        assert multiply(multiply(x, y, basis), z, basis) == multiply(x, multiply(y, z, basis), basis)


def test_five_white_square():
    basis = build_basis(S5)
    l = GradedClass.monomial(T(S5, ("w1", "w2")))
    sq = multiply(l, l, basis)
    chain = basis.normal_form(GradedClass.monomial(T(S5, ("w1", "w2"), ("w3", "w4"))))
    assert sq == -chain


def test_graded_class_json_roundtrip():
    x = GradedClass(S5, 1, {T(S5, ("w1", "w2")): Fraction(1, 3), T(S5, ("w1", "w3")): -2})
    assert GradedClass.from_json(S5, x.to_json()) == x


def test_vertex_partition_count_matches_splits():
    t = expand_tree(one_vertex(W2B3))
    assert len(vertex_partitions(t, 0)) == 6
    assert tail("b1") in t.vertices[0]
