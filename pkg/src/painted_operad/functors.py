"""H* and H_* as functors on trees and contractions.

For a tree tau over S the vertex ground F(v) consists of the tails at v
together with one white label per incident edge; edge number k (in the
sorted edge list of the target tree) is named ``w(m+1+k)`` where m is the
largest white index in S.  Both halves of an edge carry the same name, in
two different vertex grounds.

Elements of H*(tau) are :class:`TensorClass` values: sparse combinations of
pure tensors of trees, one tree per vertex ground.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from .cohomology import GradedClass, build_basis, multiply_by_generator, label_quad_allowed
from .trees import (
    GoodFamily,
    PaintedSet,
    TwoPartition,
    W,
    _as_mask,
    classify_mask,
    graft,
    mask_delta,
    mask_stable,
    one_vertex,
    parse_label,
    relabel,
    stable_masks,
    tree_cache,
)


class TensorClass:
    """Sparse combination of pure tensors over an ordered tuple of grounds."""

    __slots__ = ("grounds", "terms")

    def __init__(self, grounds, terms=None):
        self.grounds = tuple(grounds)
        self.terms = {}
        for key, c in (terms or {}).items():
            if c:
                self.terms[key] = self.terms.get(key, 0) + Fraction(c)
        self.terms = {k: c for k, c in self.terms.items() if c}

    @classmethod
    def pure(cls, factors, coeff=1):
        return cls(tuple(g.ground for g in factors), {tuple(factors): coeff})

    @classmethod
    def unit(cls, grounds):
        return cls.pure([one_vertex(G) for G in grounds])

    @classmethod
    def single(cls, x: GradedClass):
        return cls((x.ground,), {(g,): c for g, c in x.terms.items()})

    def is_zero(self):
        return not self.terms

    def __add__(self, other):
        other = other.reorder(self.grounds)
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0) + c
        return TensorClass(self.grounds, out)

    def __neg__(self):
        return TensorClass(self.grounds, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, k):
        return TensorClass(self.grounds, {key: c * k for key, c in self.terms.items()})

    __rmul__ = __mul__

    def reorder(self, grounds):
        grounds = tuple(grounds)
        if grounds == self.grounds:
            return self
        if sorted(map(_gkey, grounds)) != sorted(map(_gkey, self.grounds)):
            raise ValueError("tensor factors do not match")
        perm = [self.grounds.index(G) for G in grounds]
        return TensorClass(grounds, {tuple(k[p] for p in perm): c for k, c in self.terms.items()})

    def canonical(self):
        return self.reorder(sorted(self.grounds, key=_gkey))

    def normal_form(self):
        """Reduce every factor to its chosen basis."""
        bases = [build_basis(G) for G in self.grounds]
        out = {}
        for key, c in self.terms.items():
            acc = [((), c)]
            for i, g in enumerate(key):
                nf = bases[i].class_of(g)
                acc = [(k + (h,), a * b) for k, a in acc for h, b in nf.terms.items()]
                if not acc:
                    break
            for k, a in acc:
                out[k] = out.get(k, 0) + a
        return TensorClass(self.grounds, out)

    def __eq__(self, other):
        if not isinstance(other, TensorClass):
            return NotImplemented
        try:
            other = other.reorder(self.grounds)
        except ValueError:
            return False
        return (self - other).normal_form().is_zero()

    def __hash__(self):
        raise TypeError("TensorClass is not hashable")

    def __repr__(self):
        if not self.terms:
            return "0"
        return " + ".join(
            f"({c})*" + " (x) ".join(repr(g) for g in k) for k, c in sorted(self.terms.items(), key=lambda kv: [g.masks for g in kv[0]])
        )

    def to_json(self):
        return [
            {"factors": [g.to_json() for g in key], "coeff": str(c)}
            for key, c in sorted(self.terms.items(), key=lambda kv: [g.masks for g in kv[0]])
        ]


def _gkey(G: PaintedSet):
    return tuple(x.key for x in G.labels)


def tensor_multiply(X: TensorClass, Y: TensorClass) -> TensorClass:
    """Factorwise product in the tensor product of rings."""
    from .cohomology import multiply

    Y = Y.reorder(X.grounds)
    bases = [build_basis(G) for G in X.grounds]
    out = {}
    for kx, cx in X.terms.items():
        for ky, cy in Y.terms.items():
            acc = [((), cx * cy)]
            for i, (a, b) in enumerate(zip(kx, ky)):
                p = multiply(GradedClass.monomial(a), GradedClass.monomial(b), bases[i])
                acc = [(k + (h,), u * v) for k, u in acc for h, v in p.terms.items()]
                if not acc:
                    break
            for k, c in acc:
                out[k] = out.get(k, 0) + c
    return TensorClass(X.grounds, out)


# --- one edge -----------------------------------------------------------------------


class EdgeSplit:
    """The grounds S1+e1 and S2+e2 of a one-edge tree sigma = S1|S2."""

    def __init__(self, S: PaintedSet, sigma, e1=None, e2=None):
        self.S = S
        self.mask = _as_mask(S, sigma)
        if not mask_stable(self.mask, S):
            raise ValueError("edge partition must be painted stable")
        self.e1 = parse_label(e1) if e1 is not None else S.fresh_white()
        self.e2 = parse_label(e2) if e2 is not None else S.fresh_white()
        if self.e1 in S or self.e2 in S or not (self.e1.white and self.e2.white):
            raise ValueError("edge halves need fresh white labels")
        self.S1 = S.labels_of(self.mask)
        self.S2 = S.labels_of(S.full ^ self.mask)
        self.G1 = PaintedSet(self.S1 + (self.e1,))
        self.G2 = PaintedSet(self.S2 + (self.e2,))

    def __hash__(self):
        return hash((self.S, self.mask, self.e1, self.e2))

    def __eq__(self, other):
        return (self.S, self.mask, self.e1, self.e2) == (other.S, other.mask, other.e1, other.e2)

    def default_quad(self):
        for i in self.S1:
            for j in self.S1:
                for k in self.S2:
                    for l in self.S2:
                        if label_quad_allowed(self.S, i, j, k, l):
                            return (i, j, k, l)
        raise AssertionError("no allowed quadruple across a stable edge")


@lru_cache(maxsize=None)
def _pullback_terms(split: EdgeSplit, rho: int, quad=None) -> tuple:
    """phi*(l_rho) as a tuple of (side, mask in that side's ground, coeff)."""
    S, m = split.S, split.mask
    if rho == m:
        i, j, k, l = quad if quad is not None else split.default_quad()
        out = []
        G1, G2 = split.G1, split.G2
        a, b, e = (G1.position[x] for x in (i, j, split.e1))
        for al in stable_masks(G1):
            if (al >> a & 1) == (al >> b & 1) != (al >> e & 1):
                out.append((0, al, Fraction(-1)))
        e, c, d = (G2.position[x] for x in (split.e2, k, l))
        for be in stable_masks(G2):
            if (be >> c & 1) == (be >> d & 1) != (be >> e & 1):
                out.append((1, be, Fraction(-1)))
        return tuple(out)
    if mask_delta(rho, m, S.full) != 1:
        return ()
    for part in (rho, S.full ^ rho):
        if part & m == part:
            labs = S.labels_of(part)
            return ((0, split.G1.canonical(split.G1.mask(labs)), Fraction(1)),)
        if part & (S.full ^ m) == part:
            labs = S.labels_of(part)
            return ((1, split.G2.canonical(split.G2.mask(labs)), Fraction(1)),)
    raise AssertionError("compatible partition with no part inside sigma")


def _check_quad(split: EdgeSplit, quad):
    if quad is None:
        return None
    q = tuple(parse_label(x) for x in quad)
    if not (q[0] in split.S1 and q[1] in split.S1 and q[2] in split.S2 and q[3] in split.S2):
        raise ValueError("quadruple needs i, j on the first side and k, l on the second")
    if not label_quad_allowed(split.S, *q):
        raise ValueError("quadruple is not allowed")
    return q


def fstar_edge(S: PaintedSet, sigma, rho, quad=None, e1=None, e2=None) -> TensorClass:
    """phi*(l_rho) in H*(S1+e1) (x) H*(S2+e2) for the one-edge tree sigma."""
    split = EdgeSplit(S, sigma, e1, e2)
    r = _as_mask(S, rho)
    if not mask_stable(r, S):
        raise ValueError("rho must be painted stable")
    G1, G2 = split.G1, split.G2
    out = {}
    for side, mk, c in _pullback_terms(split, r, _check_quad(split, quad)):
        key = (GoodFamily._raw(G1, (mk,)), one_vertex(G2)) if side == 0 else (one_vertex(G1), GoodFamily._raw(G2, (mk,)))
        out[key] = out.get(key, 0) + c
    return TensorClass((G1, G2), out)


def _pull_monomial(split: EdgeSplit, masks, quad=None) -> dict:
    """phi*(prod l_rho) as a dict (tree1, tree2) -> coeff, each factor reduced."""
    b1, b2 = build_basis(split.G1), build_basis(split.G2)
    cur = {(one_vertex(split.G1), one_vertex(split.G2)): Fraction(1)}
    for r in masks:
        terms = _pullback_terms(split, r, quad)
        nxt = {}
        for (t1, t2), c in cur.items():
            for side, mk, k in terms:
                if side == 0:
                    prod = multiply_by_generator(mk, GradedClass.monomial(t1), b1)
                    for h, v in prod.terms.items():
                        nxt[(h, t2)] = nxt.get((h, t2), 0) + c * k * v
                else:
                    prod = multiply_by_generator(mk, GradedClass.monomial(t2), b2)
                    for h, v in prod.terms.items():
                        nxt[(t1, h)] = nxt.get((t1, h), 0) + c * k * v
        cur = {key: c for key, c in nxt.items() if c}
        if not cur:
            break
    return cur


@lru_cache(maxsize=None)
def _pull_tree(split: EdgeSplit, g: GoodFamily):
    return tuple(_pull_monomial(split, g.masks).items())


def fstar_monomial(S: PaintedSet, sigma, masks, quad=None, e1=None, e2=None) -> TensorClass:
    """phi* of an arbitrary product of generators (repeats allowed)."""
    split = EdgeSplit(S, sigma, e1, e2)
    masks = [_as_mask(S, r) for r in masks]
    return TensorClass((split.G1, split.G2), _pull_monomial(split, masks, _check_quad(split, quad)))


def fstar_one_edge(S: PaintedSet, sigma, x: GradedClass, e1=None, e2=None) -> TensorClass:
    split = EdgeSplit(S, sigma, e1, e2)
    out = {}
    for g, c in x.terms.items():
        for key, v in _pull_tree(split, g):
            out[key] = out.get(key, 0) + c * v
    return TensorClass((split.G1, split.G2), out)


# --- general contractions ------------------------------------------------------------------


def edge_label(S: PaintedSet, k: int):
    top = max((x.index for x in S.whites), default=0)
    return W(top + 1 + k)


def _vertex_data(S: PaintedSet, g: GoodFamily, names: dict):
    """For each vertex: (ground, {label: branch mask})."""
    t = tree_cache(g)
    out = []
    for flags in t.vertices:
        branch = {}
        for f in flags:
            lab = f.label if f.kind == "tail" else names[f.mask]
            branch[lab] = t.branch_mask(f)
        out.append((PaintedSet(branch), branch))
    return out


def vertex_grounds(g: GoodFamily, final: GoodFamily | None = None) -> list:
    """Vertex grounds F(v) of ``g`` in vertex order, edges named after ``final``."""
    final = final or g
    names = {m: edge_label(g.ground, k) for k, m in enumerate(final.masks)}
    return [G for G, _ in _vertex_data(g.ground, g, names)]


def _insert_edge(X: TensorClass, S, g_cur, sigma, names):
    br = classify_mask(g_cur, sigma)
    if br.variant != "vertex":
        raise ValueError("edge does not break the current tree at a vertex")
    F, branch = _vertex_data(S, g_cur, names)[br.vertex]
    part = [lab for lab, b in branch.items() if b & sigma == b]
    e = names[sigma]
    split = EdgeSplit(F, F.mask(part), e, e)
    pos = X.grounds.index(F)
    grounds = X.grounds[:pos] + (split.G1, split.G2) + X.grounds[pos + 1 :]
    out = {}
    for key, c in X.terms.items():
        for (h1, h2), v in _pull_tree(split, key[pos]):
            nk = key[:pos] + (h1, h2) + key[pos + 1 :]
            out[nk] = out.get(nk, 0) + c * v
    return TensorClass(grounds, out), g_cur.with_mask(sigma)


def fstar(g_small: GoodFamily, g_big: GoodFamily, X: TensorClass, order=None) -> TensorClass:
    """Pull back along the contraction g_big -> g_small (g_small a subset of g_big).

    ``X`` lives on the vertex grounds of g_small (edges named after g_small);
    the result lives on the vertex grounds of g_big, in vertex order.
    ``order`` fixes the sequence of single-edge insertions.
    """
    S = g_big.ground
    if not set(g_small.masks) <= set(g_big.masks):
        raise ValueError("not a contraction: the small tree has an edge the big one lacks")
    small_names = {m: edge_label(S, k) for k, m in enumerate(g_small.masks)}
    names = {m: edge_label(S, k) for k, m in enumerate(g_big.masks)}
    X = X.reorder(vertex_grounds(g_small))
    # rename small-tree edge labels to the big tree's numbering
    ren = {small_names[m]: names[m] for m in g_small.masks}
    new_grounds = []
    maps = []
    for G in X.grounds:
        mp = {x: ren.get(x, x) for x in G.labels}
        maps.append(mp)
        new_grounds.append(PaintedSet(mp.values()))
    terms = {}
    for key, c in X.terms.items():
        nk = tuple(relabel(h, mp, G2) for h, mp, G2 in zip(key, maps, new_grounds))
        terms[nk] = terms.get(nk, 0) + c
    cur = TensorClass(new_grounds, terms).normal_form()
    g_cur = g_small
    todo = [m for m in g_big.masks if m not in g_small.masks]
    if order is not None:
        order = [_as_mask(S, m) for m in order]
        if sorted(order) != sorted(todo):
            raise ValueError("order must list exactly the contracted edges")
        todo = order
    for m in todo:
        cur, g_cur = _insert_edge(cur, S, g_cur, m, names)
    return cur.reorder(vertex_grounds(g_big))


def fstar_class(g: GoodFamily, x: GradedClass, order=None) -> TensorClass:
    """Pull a class of H*_S back to H*(tau) along tau -> one-vertex tree."""
    return fstar(one_vertex(g.ground), g, TensorClass.single(x), order)


# --- gluing in homology ------------------------------------------------------------------


def flowerstar(X: TensorClass, e1, e2, ground: PaintedSet | None = None) -> GradedClass:
    """f_*: [mu(t1)] (x) [mu(t2)] -> [mu(t1 . t2)], glued along tails e1, e2."""
    if len(X.grounds) != 2:
        raise ValueError("gluing needs two factors")
    from .homology import HomologyClass

    G1, G2 = X.grounds
    e1, e2 = parse_label(e1), parse_label(e2)
    if ground is None:
        ground = PaintedSet([x for x in G1.labels if x != e1] + [x for x in G2.labels if x != e2])
    out = {}
    for (g1, g2), c in X.terms.items():
        h = graft(g1, e1, g2, e2, ground)
        out[h] = out.get(h, 0) + c
    grades = {len(h) for h in out}
    if len(grades) > 1:
        raise ValueError("f_* of an inhomogeneous tensor; split it by degree first")
    return HomologyClass(ground, grades.pop() if grades else 1, out)


def tensor_cap(X: TensorClass, Y: TensorClass) -> TensorClass:
    """x . y for x in H*(tau), y in H_*(tau); rank-one freeness makes it the ring product."""
    return tensor_multiply(X, Y)
