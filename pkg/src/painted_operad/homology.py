"""The module H_*S, the action of H*S on it, integration, pairing and coproduct.

Homology classes are reduced against the same relation matrices as
cohomology classes, so the comparison maps s and t of the rank-one freeness
statement act as the identity on coordinates.  Integration is normalised
by [m(tau_max)] = 1 after checking that all maximal trees have one class.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .cohomology import GradedBasis, GradedClass, multiply, multiply_generator_raw
from .linalg import dense_rank, inverse
from .trees import GoodFamily, _as_mask


class HomologyClass(GradedClass):
    """Combination of the classes mu(tau); same layout as a cohomology class."""

    __slots__ = ()

    def __add__(self, other):
        return HomologyClass._of(super().__add__(other))

    def __neg__(self):
        return HomologyClass._of(super().__neg__())

    def __mul__(self, k):
        return HomologyClass._of(super().__mul__(k))

    __rmul__ = __mul__

    @classmethod
    def _of(cls, x: GradedClass):
        return cls(x.ground, x.grade, x.terms)


def unit(basis: GradedBasis) -> HomologyClass:
    """The class 1 = mu(one-vertex tree)."""
    return HomologyClass.one(basis.ground)


def act(sigma, h: HomologyClass, basis: GradedBasis) -> HomologyClass:
    m = _as_mask(basis.ground, sigma)
    out = {}
    for g, c in h.terms.items():
        for t, k in multiply_generator_raw(m, g).items():
            out[t] = out.get(t, 0) + c * k
    return HomologyClass._of(basis.normal_form(out, h.grade + 1))


def cap(x: GradedClass, h: HomologyClass, basis: GradedBasis) -> HomologyClass:
    acc = HomologyClass(basis.ground, x.grade + h.grade)
    for g, c in x.terms.items():
        cur = HomologyClass._of(basis.normal_form(h))
        for m in g.masks:
            cur = act(m, cur, basis)
            if cur.is_zero():
                break
        if not cur.is_zero():
            acc = acc + cur * c
    return acc


def s_map(h: HomologyClass, basis: GradedBasis) -> GradedClass:
    """[mu(tau)] -> [m(tau)]."""
    nf = basis.normal_form(h)
    return GradedClass(nf.ground, nf.grade, nf.terms)


def t_map(x: GradedClass, basis: GradedBasis) -> HomologyClass:
    """x -> x . 1."""
    return cap(x, unit(basis), basis)


def top_class_check(basis: GradedBasis) -> GoodFamily:
    """Verify the top degree is one-dimensional and all maximal trees agree."""
    cached = getattr(basis, "_top_tree", None)
    if cached is not None:
        return cached
    D = basis.top
    if basis.dims[D] != 1:
        raise ArithmeticError(f"top degree has dimension {basis.dims[D]}, expected 1")
    b = basis.basis[D][0]
    for g in basis.trees[D]:
        nf = basis.class_of(g)
        if nf.terms != {b: 1}:
            raise ArithmeticError(f"maximal tree {g!r} is not equal to the top generator")
    basis._top_tree = b
    return b


def integrate(x: GradedClass, basis: GradedBasis) -> Fraction:
    if x.is_zero():
        return Fraction(0)
    if x.grade != basis.top:
        raise ValueError(f"integration needs a class of degree {basis.top}, got {x.grade}")
    b = top_class_check(basis)
    return basis.normal_form(x).terms.get(b, Fraction(0))


@dataclass
class PairingMatrix:
    degree: int
    rows: list
    cols: list
    matrix: list

    @property
    def nondegenerate(self) -> bool:
        n = len(self.rows)
        return n == len(self.cols) and dense_rank(self.matrix) == n if n else n == len(self.cols)

    def to_csv(self) -> str:
        return "\n".join(",".join(str(x) for x in row) for row in self.matrix) + ("\n" if self.matrix else "")


def pairing(basis: GradedBasis, d: int) -> PairingMatrix:
    cache = basis.__dict__.setdefault("_pairings", {})
    if d in cache:
        return cache[d]
    D = basis.top
    rows = basis.basis_classes(d)
    cols = basis.basis_classes(D - d)
    mat = [[integrate(multiply(a, b, basis), basis) for b in cols] for a in rows]
    pm = PairingMatrix(d, basis.basis[d], basis.basis[D - d], mat)
    cache[d] = pm
    return pm


def _dual_data(basis: GradedBasis):
    """Flattened basis (degree, tree) and the inverse Gram matrix of the full pairing."""
    hit = getattr(basis, "_dual", None)
    if hit is not None:
        return hit
    D = basis.top
    flat = [(d, g) for d in range(D + 1) for g in basis.basis[d]]
    pos = {x: k for k, x in enumerate(flat)}
    n = len(flat)
    G = [[Fraction(0)] * n for _ in range(n)]
    for d in range(D + 1):
        pm = pairing(basis, d)
        if not pm.nondegenerate:
            raise ArithmeticError(f"pairing in degree {d} is degenerate")
        for i, a in enumerate(pm.rows):
            for j, b in enumerate(pm.cols):
                G[pos[(d, a)]][pos[(D - d, b)]] = pm.matrix[i][j]
    Ginv = inverse(G)
    basis._dual = (flat, pos, Ginv)
    return basis._dual


def coproduct(h: HomologyClass, basis: GradedBasis) -> list:
    """Delta(h) as a list of (a, b, c) meaning c * a (x) b with a, b basis classes.

    Delta is dual to the ring product under the integration pairing:
    integrate((a . b . s(h))) = <Delta(h), a (x) b> with the pairing applied
    factorwise.  The counit is integration against the top degree.
    """
    flat, pos, Ginv = _dual_data(basis)
    D = basis.top
    x = s_map(h, basis)
    n = len(flat)
    Q = {}
    for a in range(n):
        da, ga = flat[a]
        for b in range(n):
            db, gb = flat[b]
            if da + db + x.grade != D:
                continue
            p = multiply(multiply(GradedClass.monomial(ga), GradedClass.monomial(gb), basis), x, basis)
            v = integrate(p, basis)
            if v:
                Q[(a, b)] = v
    cols = {}
    for a in range(n):
        for i in range(n):
            if Ginv[i][a]:
                cols.setdefault(a, []).append((i, Ginv[i][a]))
    R = {}
    for (a, b), q in Q.items():
        for i, g in cols.get(a, ()):
            R[(i, b)] = R.get((i, b), 0) + g * q
    C = {}
    for (i, b), r in R.items():
        for j, g in cols.get(b, ()):
            C[(i, j)] = C.get((i, j), 0) + r * g
    out = []
    for (i, j), c in sorted(C.items()):
        if c:
            out.append((HomologyClass.monomial(flat[i][1]), HomologyClass.monomial(flat[j][1]), Fraction(c)))
    return out
