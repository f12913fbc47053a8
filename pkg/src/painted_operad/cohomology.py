"""The ring H*_S spanned by good monomials m(tau), modulo the standard relations.

Classes are sparse vectors over good families; the degree of m(tau) is the
number of edges of tau.  Bases are chosen as the non-pivot trees of the
row-reduced relation matrix, degree by degree, with trees in canonical
order.
"""
from __future__ import annotations

import itertools
from fractions import Fraction
from functools import lru_cache

from .linalg import SparseEchelon
from .trees import (
    Flag,
    GoodFamily,
    Label,
    PaintedSet,
    TwoPartition,
    classify_mask,
    edge_half,
    enumerate_trees,
    mask_delta,
    one_vertex,
    parse_label,
    quad_allowed,
    stable_masks,
    tree_cache,
    vertex_splits,
    _as_mask,
)


class GradedClass:
    """Homogeneous sparse rational combination of trees with a fixed edge count."""

    __slots__ = ("ground", "grade", "terms")

    def __init__(self, ground: PaintedSet, grade: int, terms=None):
        self.ground = ground
        self.grade = grade
        self.terms = {}
        for g, c in (terms or {}).items():
            if len(g) != grade:
                raise ValueError(f"tree with {len(g)} edges in a degree {grade} class")
            c = Fraction(c)
            if c:
                self.terms[g] = self.terms.get(g, 0) + c
        self.terms = {g: c for g, c in self.terms.items() if c}

    @classmethod
    def monomial(cls, g: GoodFamily, coeff=1):
        return cls(g.ground, len(g), {g: coeff})

    @classmethod
    def one(cls, ground: PaintedSet):
        return cls.monomial(one_vertex(ground))

    @classmethod
    def zero(cls, ground: PaintedSet, grade: int = 0):
        return cls(ground, grade)

    def is_zero(self):
        return not self.terms

    def _check(self, other):
        if self.ground != other.ground:
            raise ValueError("classes over different grounds")
        if self.terms and other.terms and self.grade != other.grade:
            raise ValueError("adding classes of different degrees")

    def __add__(self, other):
        self._check(other)
        grade = self.grade if self.terms else other.grade
        out = dict(self.terms)
        for g, c in other.terms.items():
            out[g] = out.get(g, 0) + c
        return GradedClass(self.ground, grade, out)

    def __neg__(self):
        return GradedClass(self.ground, self.grade, {g: -c for g, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, k):
        if isinstance(k, GradedClass):
            raise TypeError("use multiply(x, y, basis) for ring products")
        return GradedClass(self.ground, self.grade, {g: c * k for g, c in self.terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, GradedClass):
            return NotImplemented
        if self.ground != other.ground or self.terms != other.terms:
            return False
        return not self.terms or self.grade == other.grade

    def __hash__(self):
        return hash((self.grade, frozenset(self.terms.items())))

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda kv: kv[0].masks)

    def __repr__(self):
        if not self.terms:
            return f"0[deg {self.grade}]"
        return " + ".join(f"({c})*{g!r}" for g, c in self.sorted_terms())

    def to_json(self):
        return {
            "grade": self.grade,
            "terms": [{"tree": g.to_json(), "coeff": str(c)} for g, c in self.sorted_terms()],
        }

    @classmethod
    def from_json(cls, ground: PaintedSet, data):
        from .trees import family_from_json

        terms = {}
        for t in data["terms"]:
            g = family_from_json(ground, t["tree"])
            terms[g] = terms.get(g, 0) + Fraction(t["coeff"])
        return cls(ground, int(data["grade"]), terms)


class LinearForm:
    """Sparse rational combination of generators l_sigma."""

    def __init__(self, ground: PaintedSet, terms=None):
        self.ground = ground
        self.terms = {p: Fraction(c) for p, c in (terms or {}).items() if c}

    def __eq__(self, other):
        return isinstance(other, LinearForm) and self.ground == other.ground and self.terms == other.terms

    def __repr__(self):
        return " + ".join(f"({c})l[{p}]" for p, c in sorted(self.terms.items(), key=lambda kv: kv[0].mask))


# --- relations -----------------------------------------------------------------


def _sep(mask, a, b, c, d) -> bool:
    """True iff bits a,b lie on one side of ``mask`` and c,d on the other."""
    ia, ib, ic, id_ = (mask >> a & 1, mask >> b & 1, mask >> c & 1, mask >> d & 1)
    return ia == ib and ic == id_ and ia != ic


def epsilon(sigma: TwoPartition, i, j, k, l) -> int:
    S = sigma.ground
    a, b, c, d = (S.position[parse_label(x)] for x in (i, j, k, l))
    if _sep(sigma.mask, a, b, c, d):
        return 1
    if _sep(sigma.mask, c, b, a, d):
        return -1
    return 0


def label_quad_allowed(S: PaintedSet, i, j, k, l) -> bool:
    labs = [parse_label(x) for x in (i, j, k, l)]
    if len(set(labs)) != 4 or any(x not in S for x in labs):
        return False
    I, J, K, L = labs
    return (J.white and L.white) or (I.white and K.white)


def r_ijkl(S: PaintedSet, i, j, k, l) -> LinearForm:
    if not label_quad_allowed(S, i, j, k, l):
        raise ValueError("quadruple is not allowed")
    terms = {}
    for m in stable_masks(S):
        p = TwoPartition(S, m)
        e = epsilon(p, i, j, k, l)
        if e:
            terms[p] = e
    return LinearForm(S, terms)


def quadratic_pairs(S: PaintedSet) -> list:
    ms = stable_masks(S)
    return [
        (TwoPartition(S, a), TwoPartition(S, b))
        for a, b in itertools.combinations(ms, 2)
        if mask_delta(a, b, S.full) == 2
    ]


# --- multiplication table ------------------------------------------------------------


def _resolve_flag(t, v, x) -> Flag:
    if isinstance(x, Flag):
        if x not in t.vertices[v]:
            raise ValueError(f"flag {x} is not at vertex {v}")
        return x
    return t.flag_towards(v, parse_label(x))


def default_edge_quad(t, m):
    v1, v2 = t.vertex_of_edge(m)
    e1, e2 = edge_half(m, 0), edge_half(m, 1)
    left = [f for f in t.vertices[v1] if f != e1]
    right = [f for f in t.vertices[v2] if f != e2]
    for I in left:
        for J in left:
            if J == I:
                continue
            for K in right:
                for L in right:
                    if L != K and quad_allowed(I, J, K, L):
                        return (I, J, K, L)
    raise AssertionError("no allowed quadruple around an edge of a stable tree")


def edge_quads(t, m):
    v1, v2 = t.vertex_of_edge(m)
    e1, e2 = edge_half(m, 0), edge_half(m, 1)
    left = [f for f in t.vertices[v1] if f != e1]
    right = [f for f in t.vertices[v2] if f != e2]
    return [
        (I, J, K, L)
        for I, J in itertools.permutations(left, 2)
        for K, L in itertools.permutations(right, 2)
        if quad_allowed(I, J, K, L)
    ]


def _square_terms(g: GoodFamily, m: int, quad) -> dict:
    """Expansion of l_sigma * m(tau) for sigma = the edge ``m`` of ``g``."""
    t = tree_cache(g)
    v1, v2 = t.vertex_of_edge(m)
    I, J, K, L = quad
    out = {}
    for v, e, pair in ((v1, edge_half(m, 0), (I, J)), (v2, edge_half(m, 1), (K, L))):
        flags = t.vertices[v]
        pos = {f: k for k, f in enumerate(flags)}
        pa, pb, pe = pos[pair[0]], pos[pair[1]], pos[e]
        for a, sm in vertex_splits(t, v):
            sa, sb, se = a >> pa & 1, a >> pb & 1, a >> pe & 1
            if sa == sb and sa != se:
                h = g.with_mask(sm)
                out[h] = out.get(h, 0) - 1
    return out


def multiply_generator_raw(sigma, g: GoodFamily, quad=None) -> dict:
    m = _as_mask(g.ground, sigma)
    br = classify_mask(g, m)
    if br.variant == "none":
        return {}
    if br.variant == "vertex":
        return {g.with_mask(m): Fraction(1)}
    t = tree_cache(g)
    if quad is None:
        return dict(_default_square(g, m))
    v1, v2 = t.vertex_of_edge(m)
    I, J = (_resolve_flag(t, v1, x) for x in quad[:2])
    K, L = (_resolve_flag(t, v2, x) for x in quad[2:])
    if edge_half(m, 0) in (I, J) or edge_half(m, 1) in (K, L) or I == J or K == L:
        raise ValueError("quadruple must avoid the edge halves and be distinct")
    if not quad_allowed(I, J, K, L):
        raise ValueError("quadruple is not allowed")
    return _square_terms(g, m, (I, J, K, L))


@lru_cache(maxsize=None)
def _default_square(g, m):
    t = tree_cache(g)
    return tuple(_square_terms(g, m, default_edge_quad(t, m)).items())


def multiply_generator(sigma, g: GoodFamily, quad=None) -> GradedClass:
    """The class l_sigma * m(g) as a combination of good monomials (unreduced)."""
    if isinstance(sigma, TwoPartition) and not sigma.ground == g.ground:
        raise ValueError("ground mismatch")
    m = _as_mask(g.ground, sigma)
    from .trees import mask_stable

    if not mask_stable(m, g.ground):
        raise ValueError("generator index must be painted stable")
    return GradedClass(g.ground, len(g) + 1, multiply_generator_raw(m, g, quad))


def vertex_quads(t, v):
    flags = t.vertices[v]
    return [q for q in itertools.permutations(flags, 4) if quad_allowed(*q)]


def standard_relation(g: GoodFamily, v: int, quad) -> dict:
    """Vector sum_alpha eps(alpha) tau(alpha) over trees with |g|+1 edges."""
    t = tree_cache(g)
    I, J, K, L = (_resolve_flag(t, v, x) for x in quad)
    if len({I, J, K, L}) != 4 or not quad_allowed(I, J, K, L):
        raise ValueError("quadruple is not allowed")
    return _relation(t, g, v, (I, J, K, L))


def _relation(t, g, v, quad):
    flags = t.vertices[v]
    pos = {f: k for k, f in enumerate(flags)}
    a, b, c, d = (pos[x] for x in quad)
    out = {}
    for al, sm in vertex_splits(t, v):
        if _sep(al, a, b, c, d):
            e = 1
        elif _sep(al, c, b, a, d):
            e = -1
        else:
            continue
        h = g.with_mask(sm)
        out[h] = out.get(h, 0) + e
    return {h: Fraction(c) for h, c in out.items() if c}


def all_standard_relations(S: PaintedSet, degree: int, trees_below=None) -> list:
    """Deduplicated, sign-normalised standard relations landing in ``degree``."""
    if degree <= 0:
        return []
    trees_below = trees_below if trees_below is not None else enumerate_trees(S, degree - 1)
    seen = set()
    out = []
    for g in trees_below:
        t = tree_cache(g)
        for v in range(len(t.vertices)):
            if len(t.vertices[v]) < 4:
                continue
            for q in vertex_quads(t, v):
                r = _relation(t, g, v, q)
                if not r:
                    continue
                lead = min(r, key=lambda h: h.masks)
                if r[lead] < 0:
                    r = {h: -c for h, c in r.items()}
                key = frozenset(r.items())
                if key not in seen:
                    seen.add(key)
                    out.append(r)
    return out


# --- bases and normal forms --------------------------------------------------------


class GradedBasis:
    """Row-reduced relation matrices and chosen basis trees, per degree."""

    def __init__(self, ground: PaintedSet):
        ground.check_ring_ground()
        self.ground = ground
        self.top = len(ground) - 3
        self.trees = []
        self.index = []
        self.echelon = []
        self.basis = []
        prev = None
        for d in range(self.top + 1):
            trees = sorted(enumerate_trees(ground, d), key=lambda g: g.masks)
            idx = {g: k for k, g in enumerate(trees)}
            ech = SparseEchelon()
            for r in all_standard_relations(ground, d, prev):
                ech.add({idx[h]: c for h, c in r.items()})
            self.trees.append(trees)
            self.index.append(idx)
            self.echelon.append(ech)
            self.basis.append([g for k, g in enumerate(trees) if k not in ech.pivots])
            prev = trees
        self._nf_cache = {}

    @property
    def dims(self):
        return [len(b) for b in self.basis]

    def normal_form(self, vec, grade=None) -> GradedClass:
        if isinstance(vec, GradedClass):
            grade, terms = vec.grade, vec.terms
        else:
            terms = dict(vec)
            if grade is None:
                grade = len(next(iter(terms))) if terms else 0
        if grade > self.top or not terms:
            return GradedClass(self.ground, grade)
        idx = self.index[grade]
        row = {}
        for g, c in terms.items():
            if len(g) != grade:
                raise ValueError("inhomogeneous vector")
            k = idx[g]
            row[k] = row.get(k, 0) + c
        red = self.echelon[grade].reduce(row)
        trees = self.trees[grade]
        return GradedClass(self.ground, grade, {trees[k]: c for k, c in red.items()})

    def class_of(self, g: GoodFamily) -> GradedClass:
        hit = self._nf_cache.get(g)
        if hit is None:
            hit = self.normal_form({g: 1}, len(g))
            self._nf_cache[g] = hit
        return hit

    def coordinates(self, x: GradedClass) -> list:
        """Coefficients of the normal form of ``x`` on the basis of its degree."""
        nf = self.normal_form(x)
        if x.grade > self.top:
            return []
        return [nf.terms.get(g, Fraction(0)) for g in self.basis[x.grade]]

    def from_coordinates(self, grade: int, coords) -> GradedClass:
        return GradedClass(self.ground, grade, dict(zip(self.basis[grade], coords)))

    def basis_classes(self, grade: int) -> list:
        return [GradedClass.monomial(g) for g in self.basis[grade]]

    def to_json(self):
        return {"dims": self.dims}


_BASES: dict = {}


def build_basis(S: PaintedSet) -> GradedBasis:
    b = _BASES.get(S)
    if b is None:
        b = GradedBasis(S)
        _BASES[S] = b
    return b


def normal_form(vec, basis: GradedBasis) -> GradedClass:
    return basis.normal_form(vec)


def multiply_by_generator(sigma, x: GradedClass, basis: GradedBasis) -> GradedClass:
    m = _as_mask(basis.ground, sigma)
    out = {}
    for g, c in x.terms.items():
        for h, k in multiply_generator_raw(m, g).items():
            out[h] = out.get(h, 0) + c * k
    return basis.normal_form(out, x.grade + 1)


def multiply(x: GradedClass, y: GradedClass, basis: GradedBasis) -> GradedClass:
    """Product in H*_S, reduced to the chosen basis."""
    S = basis.ground
    grade = x.grade + y.grade
    acc = GradedClass(S, grade)
    if grade > basis.top:
        return acc
    x = basis.normal_form(x)
    for g, c in y.terms.items():
        cur = x
        for m in g.masks:
            cur = multiply_by_generator(m, cur, basis)
            if cur.is_zero():
                break
        if not cur.is_zero():
            acc = acc + cur * c
    return basis.normal_form(acc) if acc.terms else GradedClass(S, grade)


def monomial_class(masks, basis: GradedBasis) -> GradedClass:
    """Class of an arbitrary product of generators l_sigma (repeats allowed)."""
    cur = GradedClass.one(basis.ground)
    for m in masks:
        cur = multiply_by_generator(m, cur, basis)
    return cur


def linear_class(form: LinearForm, basis: GradedBasis) -> GradedClass:
    terms = {}
    for p, c in form.terms.items():
        g = GoodFamily._raw(basis.ground, (p.mask,))
        terms[g] = terms.get(g, 0) + c
    return basis.normal_form(terms, 1)
