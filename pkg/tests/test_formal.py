import random
from fractions import Fraction

import numpy as np
import pytest

from painted_operad.formal import (
    ProjectionError,
    VectorField,
    a_from_b,
    assoc_check,
    b_from_a,
    build_B,
    check_comm,
    check_maximality,
    extract_lalgebra,
    formal_projection,
    glue,
    has_flat_identity,
    is_closed,
    random_assoc_A,
    random_commuting_B,
    random_lalgebra,
)
from painted_operad.lalgebra import LAlgebra, verify
from painted_operad.series import Series, identity, unit_matrix

HALF = Fraction(1, 2)


def scalar(vs, order, terms):
    return Series(vs, order, terms)


def mat_series(vs, order, terms, dim):
    return Series(vs, order, {e: np.array([[Fraction(x) for x in r] for r in M], dtype=object) for e, M in terms.items()}, (dim, dim))


def two_coord_A(order=6):
    vs = ("t0", "t1")
    A0 = scalar(vs, order, {(2, 0): HALF, (0, 3): Fraction(1, 6)})
    A1 = scalar(vs, order, {(1, 1): 1})
    return VectorField([A0, A1])


def two_coord_B(order=6):
    return mat_series(("t0", "t1"), order, {(1, 0): [[1, 0], [0, 1]], (0, 2): [[0, HALF], [0, 0]], (0, 1): [[0, 0], [1, 0]]}, 2)


# --- build_B / extract ---------------------------------------------------------------


def test_build_B_examples():
    B = build_B(LAlgebra(1, 1, 4, {(0, 1): [[1]]}))
    assert B.vars == ("t1", "f1") and B.terms == {(1, 1): B.terms[(1, 1)]} and B.terms[(1, 1)][0, 0] == 1
    assert build_B(LAlgebra(1, 2, 3)).is_zero()
    M = [[1, 2], [3, 4]]
    B = build_B(LAlgebra(0, 2, 3, {(0, 0): M}))
    assert B.coeff((2, 0)).tolist() == [[HALF, 1], [Fraction(3, 2), 2]]


@pytest.mark.parametrize("seed", range(10))
def test_roundtrips(seed):
    rng = random.Random(seed)
    dimT, dimF, order = rng.randint(0, 2), rng.randint(1, 3), rng.randint(2, 5)
    L = random_lalgebra(rng, dimT, dimF, order)
    assert extract_lalgebra(build_B(L), dimT) == L
    B = random_commuting_B(rng, dimT, dimF, order)
    assert build_B(extract_lalgebra(B, dimT)) == B


def test_extract_rejects_constant_term():
    B = mat_series(("x",), 3, {(0,): [[1]]}, 1)
    with pytest.raises(ValueError):
        extract_lalgebra(B)


# --- check_comm ----------------------------------------------------------------------


def test_check_comm_examples():
    rep = check_comm(mat_series(("x",), 4, {(1,): [[1, 0], [0, 1]]}, 2))
    assert rep.ok and rep.verified_order == 2
    bad = Series(("x1", "x2"), 3, {(1, 0): unit_matrix(2, 0, 0), (0, 1): unit_matrix(2, 0, 1)})
    rep = check_comm(bad)
    assert rep.status == "fail"
    assert rep.witness == {"vars": ["x1", "x2"], "exp": {}, "matrix": [["0", "1"], ["0", "0"]]}
    assert rep.to_json()["witness"]["matrix"] == [["0", "1"], ["0", "0"]]
    assert check_comm(two_coord_B()).ok


@pytest.mark.parametrize("seed", range(10))
def test_verify_iff_check_comm(seed):
    rng = random.Random(100 + seed)
    L = random_lalgebra(rng, rng.randint(0, 2), rng.randint(1, 3), rng.randint(2, 5))
    assert verify(L).ok and check_comm(build_B(L)).ok
    n = L.n_indices
    key = tuple(sorted(rng.randrange(n) for _ in range(rng.randint(1, L.order - 1))))
    noise = np.array([[Fraction(rng.randint(-2, 2)) for _ in range(L.dimF)] for _ in range(L.dimF)], dtype=object)
    bad = L.with_entry(key, L.get(key) + noise)
    assert verify(bad).ok == check_comm(build_B(bad)).ok


# --- associativity -------------------------------------------------------------------


def test_assoc_examples():
    A = VectorField([scalar(("t0",), 5, {(2,): HALF})])
    assert assoc_check(A).ok and has_flat_identity(A)
    A = two_coord_A()
    assert assoc_check(A).ok and has_flat_identity(A)
    from painted_operad.formal import structure_constants

    K = structure_constants(A)
    assert K[1][1][0] == scalar(A.vars, A.order, {(0, 1): 1}) and K[1][1][1].is_zero()
    A1 = scalar(A.vars, 6, {(1, 1): 1, (2, 0): 1})
    broken = VectorField([A.components[0], A1])
    assert not has_flat_identity(broken)


def test_assoc_failure_reported():
    vs = ("a", "b")
    # d_a o d_a = d_b, d_b o d_b = d_a, d_a o d_b = 0 is commutative but not associative
    A0 = scalar(vs, 5, {(0, 2): HALF})
    A1 = scalar(vs, 5, {(2, 0): HALF})
    rep = assoc_check(VectorField([A0, A1]))
    assert rep.status == "fail" and rep.verified_order == 2


def test_b_from_a_example():
    assert b_from_a(two_coord_A()) == two_coord_B()


@pytest.mark.parametrize("seed", range(8))
def test_assoc_iff_comm(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 3)
    A = random_assoc_A(rng, n, 5)
    assert assoc_check(A).ok and check_comm(b_from_a(A)).ok
    vs = A.vars
    cubic = tuple(2 if k == 0 else int(k == n - 1) for k in range(n)) if n > 1 else (3,)
    comps = list(A.components)
    comps[-1] = comps[-1] + scalar(vs, 5, {cubic: rng.randint(1, 3)})
    B = VectorField(comps)
    assert assoc_check(B).ok == check_comm(b_from_a(B)).ok


@pytest.mark.parametrize("seed", range(6))
def test_a_from_b_roundtrip(seed):
    rng = random.Random(seed)
    n = [1, 2, 3][seed % 3]
    A = random_assoc_A(rng, n, 5, flat_identity=True)
    assert has_flat_identity(A)
    e = [1] + [0] * (n - 1)
    back = a_from_b(b_from_a(A), e)
    diff = back - A
    assert all(sum(x) == 0 for c in diff.components for x in c.terms)


def test_a_from_b_examples():
    B = mat_series(("x",), 4, {(1,): [[1]]}, 1)
    (A,) = a_from_b(B, [1]).components
    assert A.terms == {(2,): HALF}
    A = a_from_b(two_coord_B(), [1, 0])
    assert b_from_a(A).equal_upto(two_coord_B(), 5)
    with pytest.raises(ValueError, match="primitive"):
        a_from_b(two_coord_B(), [0, 1])
    notclosed = mat_series(("x", "y"), 4, {(1, 0): [[1, 1], [0, 1]], (0, 1): [[0, 0], [1, 0]]}, 2)
    assert not is_closed(notclosed)
    with pytest.raises(ValueError, match="closedness"):
        a_from_b(notclosed, [1, 0])


# --- gluing and projection -------------------------------------------------------------


def test_glue_example():
    B1 = Series(("t",), 4, {(1,): identity(1)}, (1, 1))
    B2 = mat_series(("th",), 4, {(1,): [[1]], (2,): [[HALF]]}, 1)
    G = glue(B1, B2, [1])
    want = mat_series(("t", "th"), 4, {(1, 0): [[1]], (0, 1): [[1]], (2, 0): [[HALF]], (1, 1): [[1]], (0, 2): [[HALF]]}, 1)
    assert G == want
    assert G.restrict(("t",)) == mat_series(("t",), 4, {(1,): [[1]], (2,): [[HALF]]}, 1)
    assert G.restrict(("th",)) == B2
    assert check_comm(G).ok
    with pytest.raises(ValueError):
        glue(B1, B2.rename(("t",)), [1])


def test_glue_then_project_scalar():
    B1 = Series(("t",), 5, {(1,): identity(1)}, (1, 1))
    B2 = mat_series(("th",), 5, {(1,): [[1]], (2,): [[HALF]]}, 1)
    G = glue(B1, B2, [1])
    P = formal_projection(G.restrict(("t",)), G)
    assert P.unique
    assert list(P.lam) == [(1,)]
    assert P.lam[(1,)][0] == Series(("t",), 4, {(0,): 1})


@pytest.mark.parametrize("seed", range(4))
def test_glue_random_passes_and_projects(seed):
    rng = random.Random(seed)
    A = random_assoc_A(rng, 2, 5, flat_identity=True)
    B2 = b_from_a(A).rename(("f1", "f2"))
    # B1 = s1 Id + s2 N with N regular nilpotent: strictly maximal, and s -> B1(s) e0 is invertible
    B1 = Series(("s1", "s2"), 5, {(1, 0): identity(2), (0, 1): unit_matrix(2, 1, 0)}, (2, 2))
    assert check_maximality(B1).verdict == "strict"
    G = glue(B1, B2, [1, 0])
    assert check_comm(G).ok
    assert G.restrict(("f1", "f2")) == B2
    base = G.restrict(("s1", "s2"))
    P = formal_projection(base, G)
    assert base.compose(P.substitution(), G.vars, G.order) == G
    assert check_maximality(base).verdict == "strict"
    assert P.unique


def test_projection_scalar_example():
    B = Series(("t",), 5, {(1,): identity(1)}, (1, 1))
    Bp = mat_series(("t", "th"), 5, {(1, 0): [[1]], (0, 1): [[1]], (1, 1): [[1]]}, 1)
    P = formal_projection(B, Bp)
    assert list(P.lam) == [(1,)]
    assert P.lam[(1,)][0] == Series(("t",), 4, {(0,): 1, (1,): 1})
    assert P.unique
    js = P.to_json()
    assert js["lambda"][0]["text"] == "1+t"


def test_projection_recovers_known_map():
    B = Series(("t",), 5, {(1,): identity(1), (2,): identity(1) * 3}, (1, 1))
    vs = ("t", "th")
    phi = Series(vs, 5, {(1, 0): 1, (0, 1): 2, (1, 1): -1, (0, 2): 1})
    Bp = B.compose({"t": phi}, vs, 5)
    P = formal_projection(B, Bp)
    assert B.compose(P.substitution(), vs, 5) == Bp
    assert P.substitution()["t"].equal_upto(phi, 4)


def test_projection_inconsistent():
    vs = ("x1", "x2")
    B = Series(vs, 4, {(1, 0): unit_matrix(2, 0, 0), (0, 1): unit_matrix(2, 1, 1)})
    Bp = B.extend(vs + ("th",)) + Series(vs + ("th",), 4, {(0, 0, 1): unit_matrix(2, 0, 1)})
    with pytest.raises(ProjectionError):
        formal_projection(B, Bp)
    with pytest.raises(ValueError):
        formal_projection(B, Bp.restrict(("x1", "x2")) + Series(vs, 4, {(1, 0): unit_matrix(2, 0, 1)}))


def test_projection_not_unique_reported():
    vs = ("x1", "x2")
    B = Series(vs, 3, {(1, 0): identity(2), (0, 1): identity(2)}, (2, 2))
    tv = vs + ("th",)
    Bp = Series(tv, 3, {(1, 0, 0): identity(2), (0, 1, 0): identity(2), (0, 0, 1): identity(2)}, (2, 2))
    P = formal_projection(B, Bp)
    assert not P.unique and P.kernel_dims
    assert B.compose(P.substitution(), tv, 3) == Bp


# --- maximality -------------------------------------------------------------------------


def test_maximality_examples():
    assert check_maximality(Series(("t",), 4, {(1,): identity(1)}, (1, 1))).verdict == "strict"
    rep = check_maximality(Series(("x",), 4, {(1,): identity(2)}, (2, 2)))
    assert rep.verdict == "not-maximal" and rep.degree0 == "not-maximal"
    diag = Series(("x1", "x2"), 4, {(1, 0): unit_matrix(2, 0, 0), (0, 1): unit_matrix(2, 1, 1)})
    rep = check_maximality(diag)
    assert rep.verdict == "strict" and rep.degree0 == "maximal"
    assert check_maximality(diag, order=1).verdict == "inconclusive"
    assert set(rep.to_json()) == {"verdict", "degree0", "order", "centralizer_dim", "span_dim"}


def test_strict_diagonal_projection_unique():
    vs = ("x1", "x2")
    diag = Series(vs, 4, {(1, 0): unit_matrix(2, 0, 0), (0, 1): unit_matrix(2, 1, 1)})
    assert check_maximality(diag).verdict == "strict"
    tv = vs + ("th",)
    phi = {
        "x1": Series(tv, 4, {(1, 0, 0): 1, (0, 0, 1): 1, (1, 0, 1): 2}),
        "x2": Series(tv, 4, {(0, 1, 0): 1, (0, 0, 2): -1}),
    }
    Bp = diag.compose(phi, tv, 4)
    P = formal_projection(diag, Bp)
    assert P.unique and diag.compose(P.substitution(), tv, 4) == Bp
