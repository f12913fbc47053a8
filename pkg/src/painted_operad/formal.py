"""Formal solutions of the commutativity and oriented associativity equations.

Matrix convention: for a vector field A = sum_c A^c d_c the matrix B has
entries B[c][b] = d_b A^c, so that B(t) h with h = e_0 is the column of
first derivatives of the components.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from .lalgebra import LAlgebra, index_name
from .linalg import dense_rank, solve
from .series import (
    Series,
    frac_matrix,
    monomials,
    monomials_upto,
    multinomial_weight,
    random_poly,
    series_inverse_map,
    zeros,
)


def lalgebra_vars(dimT: int, dimF: int):
    return tuple(index_name(i, dimT) for i in range(dimT + dimF))


def build_B(L: LAlgebra) -> Series:
    """Generating series sum over multisets x^P / P! <P>."""
    n = L.n_indices
    terms = {}
    for key, M in L.correlators.items():
        e = [0] * n
        for i in key:
            e[i] += 1
        terms[tuple(e)] = M * multinomial_weight(e)
    return Series(lalgebra_vars(L.dimT, L.dimF), L.order, terms, (L.dimF, L.dimF))


def extract_lalgebra(Bs: Series, dimT: int | None = None) -> LAlgebra:
    """Read symmetrised coefficients of ``Bs`` back as top correlators.

    The last dimF variables are the F coordinates; the others are T
    coordinates.
    """
    if not Bs.is_matrix:
        raise ValueError("extraction needs a matrix series")
    dimF = Bs.shape[0]
    if dimT is None:
        dimT = len(Bs.vars) - dimF
    if dimT < 0 or dimT + dimF != len(Bs.vars):
        raise ValueError("variables do not split into T and F coordinates")
    c0 = Bs.constant_term()
    if any(x != 0 for x in c0.flat):
        raise ValueError("series has a constant term")
    corr = {}
    for e, M in Bs.terms.items():
        key = tuple(i for i, k in enumerate(e) for _ in range(k))
        corr[key] = M / multinomial_weight(e)
    return LAlgebra(dimT, dimF, Bs.order, corr)


# --- commutativity --------------------------------------------------------------


@dataclass
class CommReport:
    status: str
    verified_order: int
    witness: dict | None = None

    @property
    def ok(self):
        return self.status == "pass"

    def to_json(self):
        out = {"status": self.status, "verified_order": self.verified_order}
        if self.witness is not None:
            out["witness"] = self.witness
        return out


def partials(Bs: Series):
    return [Bs.derivative(v) for v in Bs.vars]


def check_comm(Bs: Series) -> CommReport:
    """Verify [d_i B, d_j B] = 0 coefficientwise through degree order - 2."""
    top = Bs.order - 2
    if top < 0:
        return CommReport("pass", top)
    b = partials(Bs)
    for i, j in itertools.combinations(range(len(Bs.vars)), 2):
        c = b[i].commutator(b[j])
        bad = [e for e in c.terms if sum(e) <= top]
        if bad:
            e = min(bad, key=lambda e: (sum(e), [-k for k in e]))
            return CommReport(
                "fail",
                top,
                {
                    "vars": [Bs.vars[i], Bs.vars[j]],
                    "exp": {v: k for v, k in zip(Bs.vars, e) if k},
                    "matrix": [[str(x) for x in row] for row in c.terms[e]],
                },
            )
    return CommReport("pass", top)


# --- oriented associativity ----------------------------------------------------------


class VectorField:
    """Components A^c as scalar series over flat coordinates (same variables)."""

    def __init__(self, components):
        self.components = list(components)
        if not self.components:
            raise ValueError("empty vector field")
        vs = self.components[0].vars
        if any(c.vars != vs for c in self.components) or len(vs) != len(self.components):
            raise ValueError("components must be series in the coordinates they index")
        self.vars = vs
        self.order = min(c.order for c in self.components)

    def __len__(self):
        return len(self.components)

    def __sub__(self, other):
        return VectorField([a - b for a, b in zip(self.components, other.components)])

    def __eq__(self, other):
        return isinstance(other, VectorField) and all(a == b for a, b in zip(self.components, other.components))

    def to_json(self):
        return {"vars": list(self.vars), "order": self.order, "components": [c.to_json()["terms"] for c in self.components]}

    @classmethod
    def from_json(cls, data):
        comps = [Series.from_json({"vars": data["vars"], "order": data["order"], "terms": t}) for t in data["components"]]
        return cls(comps)


def structure_constants(A: VectorField):
    """A_ab^c = d_a d_b A^c as a nested list [a][b][c] of series."""
    vs = A.vars
    return [[[A.components[c].derivative(vs[a]).derivative(vs[b]) for c in range(len(vs))] for b in range(len(vs))] for a in range(len(vs))]


def assoc_check(A: VectorField) -> CommReport:
    """(d_a o d_b) o d_c = (d_b o d_c) o d_a coefficientwise through order N - 3."""
    top = A.order - 3
    n = len(A)
    if top < 0:
        return CommReport("pass", top)
    K = structure_constants(A)
    for a, b, c in itertools.product(range(n), repeat=3):
        for f in range(n):
            lhs = sum((K[a][b][e] * K[e][c][f] for e in range(n)), Series(A.vars, top))
            rhs = sum((K[b][c][e] * K[e][a][f] for e in range(n)), Series(A.vars, top))
            d = (lhs - rhs).truncate(top)
            if not d.is_zero():
                e0 = min(d.terms, key=lambda e: (sum(e), [-k for k in e]))
                return CommReport(
                    "fail",
                    top,
                    {"abcf": [A.vars[a], A.vars[b], A.vars[c], A.vars[f]], "exp": {v: k for v, k in zip(A.vars, e0) if k}, "value": str(d.terms[e0])},
                )
    return CommReport("pass", top)


def has_flat_identity(A: VectorField, index: int = 0) -> bool:
    n = len(A)
    K = structure_constants(A)
    for a in range(n):
        for c in range(n):
            want = Series.constant(A.vars, K[a][index][c].order, int(a == c))
            if not K[a][index][c] == want:
                return False
    return True


def b_from_a(A: VectorField) -> Series:
    n = len(A)
    entries = [[A.components[c].derivative(A.vars[b]) for b in range(n)] for c in range(n)]
    return Series.from_entries(entries)


def is_closed(Bs: Series) -> bool:
    """d_a B[c][b] = d_b B[c][a] for all a, b, c (the forms sum_b B[c][b] dx^b are closed)."""
    n = len(Bs.vars)
    for a, b in itertools.combinations(range(n), 2):
        for c in range(Bs.shape[0]):
            if not Bs.entry(c, b).derivative(Bs.vars[a]) == Bs.entry(c, a).derivative(Bs.vars[b]):
                return False
    return True


def a_from_b(Bs: Series, h) -> VectorField:
    """Integrate B to a vector field in the flat coordinates u = B(x)h - B(0)h."""
    n = Bs.shape[0]
    if len(Bs.vars) != n:
        raise ValueError("a primitive vector needs as many variables as dim F")
    h = [Fraction(x) for x in h]
    u = Bs.apply(h)
    u = [c - Series.constant(Bs.vars, Bs.order, c.constant_term()) for c in u]
    lin = [[u[i].coeff(tuple(int(k == j) for k in range(n))) for j in range(n)] for i in range(n)]
    if dense_rank(lin) < n:
        raise ValueError("h is not primitive: x -> B(x)h is not a local isomorphism")
    x_of_u = series_inverse_map(u, Bs.vars)
    Bt = Bs.compose({v: x_of_u[k] for k, v in enumerate(Bs.vars)}, Bs.vars)
    if not is_closed(Bt):
        raise ValueError("closedness fails: B is not the differential of a vector field")
    comps = []
    for c in range(n):
        out = {}
        for b in range(n):
            for e, coef in Bt.entry(c, b).terms.items():
                f = list(e)
                f[b] += 1
                f = tuple(f)
                out[f] = out.get(f, 0) + coef / (sum(e) + 1)
        comps.append(Series(Bs.vars, Bs.order + 1, out))
    return VectorField(comps)


# --- gluing and projection ---------------------------------------------------------------


def glue(B1: Series, second, h) -> Series:
    """B(t, theta) = B2(theta + B1(t) h) over the variables of B1 followed by those of B2."""
    B2 = b_from_a(second) if isinstance(second, VectorField) else second
    if set(B1.vars) & set(B2.vars):
        raise ValueError("variable sets of the two factors collide")
    if B1.shape != B2.shape or len(B2.vars) != B2.shape[0]:
        raise ValueError("B2 must live on flat coordinates of F")
    variables = B1.vars + B2.vars
    order = min(B1.order, B2.order)
    shift = B1.apply([Fraction(x) for x in h])
    if any(c.constant_term() != 0 for c in shift):
        raise ValueError("B1(0) h is nonzero: the gluing point must sit at the origin")
    subs = {}
    for k, v in enumerate(B2.vars):
        s = Series.variable(variables, order, v) + shift[k].extend(variables).truncate(order)
        subs[v] = s
    return B2.compose(subs, variables, order)


class ProjectionError(ValueError):
    pass


@dataclass
class Projection:
    """phi*(t^i) = t^i + sum over theta-monomials k of lam[k][i](t) theta^k."""

    base_vars: tuple
    fiber_vars: tuple
    order: int
    lam: dict
    unique: bool
    kernel_dims: dict = field(default_factory=dict)

    def substitution(self):
        variables = self.base_vars + self.fiber_vars
        out = {}
        for i, v in enumerate(self.base_vars):
            s = Series.variable(variables, self.order, v)
            for k, comps in self.lam.items():
                mono = Series(variables, self.order, {(0,) * len(self.base_vars) + k: 1})
                s = s + comps[i].extend(variables) * mono
            out[v] = s
        return out

    def to_json(self):
        recs = []
        for k, comps in sorted(self.lam.items(), key=lambda kv: (sum(kv[0]), [-x for x in kv[0]])):
            for i, s in enumerate(comps):
                if s.terms:
                    recs.append({"theta": {v: a for v, a in zip(self.fiber_vars, k) if a}, "component": self.base_vars[i], "series": s.to_json(), "text": s.to_text()})
        return {"unique": self.unique, "order": self.order, "lambda": recs}


def formal_projection(Bbase: Series, Btotal: Series) -> Projection:
    """Find phi with Btotal = Bbase o phi, theta-degree by theta-degree."""
    tv = Bbase.vars
    if Btotal.vars[: len(tv)] != tv:
        raise ValueError("the total series must start with the base variables")
    fv = Btotal.vars[len(tv):]
    m, n = len(tv), len(fv)
    N = min(Bbase.order, Btotal.order)
    if not Btotal.restrict(tv).equal_upto(Bbase, N):
        raise ValueError("restriction of the total series to theta = 0 differs from the base")
    variables = tv + fv
    b = [Bbase.derivative(v) for v in tv]
    lam = {}
    unique = True
    kdims = {}
    shape = Bbase.shape
    for deg in range(1, N + 1):
        proj = Projection(tv, fv, N, lam, unique)
        cur = Bbase.compose(proj.substitution(), variables, N) if lam else Bbase.extend(variables).truncate(N)
        defect = (Btotal.truncate(N) - cur)
        for k in monomials(n, deg):
            # coefficient of theta^k as a series in t
            Y = {}
            for e, c in defect.terms.items():
                if tuple(e[m:]) == k:
                    Y[tuple(e[:m])] = c
            tdeg = N - deg
            unknowns = [(i, e) for i in range(m) for e in monomials_upto(m, tdeg)]
            rows_idx = [(e, r, s) for e in monomials_upto(m, tdeg) for r in range(shape[0]) for s in range(shape[1])]
            rpos = {key: r for r, key in enumerate(rows_idx)}
            mat = [[Fraction(0)] * len(unknowns) for _ in rows_idx]
            for col, (i, e) in enumerate(unknowns):
                for f, M in b[i].terms.items():
                    g = tuple(x + y for x, y in zip(e, f))
                    if sum(g) > tdeg:
                        continue
                    for r in range(shape[0]):
                        for s in range(shape[1]):
                            if M[r, s]:
                                mat[rpos[(g, r, s)]][col] += M[r, s]
            rhs = [Fraction(0)] * len(rows_idx)
            for e, M in Y.items():
                if sum(e) > tdeg:
                    continue
                for r in range(shape[0]):
                    for s in range(shape[1]):
                        rhs[rpos[(e, r, s)]] = M[r, s]
            try:
                x, kernel = solve(mat, rhs)
            except ValueError:
                raise ProjectionError(
                    f"no projection: theta-degree {deg} defect at {dict(zip(fv, k))} is not in the span of the b_i"
                ) from None
            if kernel:
                unique = False
                kdims[k] = len(kernel)
            comps = []
            for i in range(m):
                comps.append(Series(tv, tdeg, {e: x[col] for col, (j, e) in enumerate(unknowns) if j == i}))
            if any(c.terms for c in comps):
                lam[k] = comps
    return Projection(tv, fv, N, lam, unique, kdims)


# --- maximality --------------------------------------------------------------------


@dataclass
class MaximalityReport:
    verdict: str
    degree0: str
    order: int
    centralizer_dim: int
    span_dim: int

    def to_json(self):
        return dict(self.__dict__)


def _flatten(series_list, m, k, dim):
    """Coefficient vector of matrix series (degree <= k) as a list of Fractions."""
    vec = []
    for s in series_list:
        for e in monomials_upto(m, k):
            M = s.coeff(e)
            vec.extend(M.flat)
    return vec


def check_maximality(Bs: Series, order: int | None = None) -> MaximalityReport:
    m = len(Bs.vars)
    dim = Bs.shape[0]
    full = Bs.order - 1
    k = full if order is None else min(order, full)
    b = [Bs.derivative(v).truncate(k) for v in Bs.vars]
    exps = list(monomials_upto(m, k))
    # centralizer: unknown matrix coefficients c_e, equations [c, b_i] = 0 through degree k
    nunk = len(exps) * dim * dim
    eqs = []
    for bi in b:
        for g in exps:
            for r in range(dim):
                for s in range(dim):
                    row = [Fraction(0)] * nunk
                    for ei, e in enumerate(exps):
                        f = tuple(x - y for x, y in zip(g, e))
                        if min(f) < 0:
                            continue
                        M = bi.coeff(f)
                        base = ei * dim * dim
                        # (c_e M - M c_e)[r][s]
                        for q in range(dim):
                            if M[q, s]:
                                row[base + r * dim + q] += M[q, s]
                            if M[r, q]:
                                row[base + q * dim + s] -= M[r, q]
                    if any(row):
                        eqs.append(row)
    cent = nunk - dense_rank(eqs) if eqs else nunk
    # span of f_i(t) b_i(t) truncated at degree k
    gens = []
    for bi in b:
        for e in exps:
            mono = Series(Bs.vars, k, {e: 1})
            gens.append(_flatten([(bi * mono).truncate(k)], m, k, dim))
    span = dense_rank(gens) if gens else 0
    b0 = [bi.coeff((0,) * m) for bi in b]
    c0_eqs = []
    for M in b0:
        for r in range(dim):
            for s in range(dim):
                row = [Fraction(0)] * (dim * dim)
                for q in range(dim):
                    if M[q, s]:
                        row[r * dim + q] += M[q, s]
                    if M[r, q]:
                        row[q * dim + s] -= M[r, q]
                if any(row):
                    c0_eqs.append(row)
    cent0 = dim * dim - (dense_rank(c0_eqs) if c0_eqs else 0)
    span0 = dense_rank([list(M.flat) for M in b0]) if b0 else 0
    degree0 = "maximal" if cent0 == span0 else "not-maximal"
    if cent != span:
        verdict = "not-maximal"
    elif k < full:
        verdict = "inconclusive"
    elif span == m * len(exps):
        verdict = "strict"
    else:
        verdict = "maximal-not-strict"
    return MaximalityReport(verdict, degree0, k, cent, span)


# --- random valid inputs ---------------------------------------------------------


def random_invertible(rng, n, lo=-2, hi=2):
    while True:
        P = [[Fraction(rng.randint(lo, hi)) for _ in range(n)] for _ in range(n)]
        if dense_rank(P) == n:
            return P


def random_commuting_B(rng, dimT, dimF, order, density=0.5) -> Series:
    """B = P diag(p_1, ..., p_dimF) P^-1 with random polynomials p_k without constant term."""
    from .linalg import inverse

    variables = lalgebra_vars(dimT, dimF)
    P = random_invertible(rng, dimF)
    Pi = inverse(P)
    Pm, Pim = frac_matrix(P), frac_matrix(Pi)
    terms = {}
    polys = [random_poly(rng, variables, order, density=density) for _ in range(dimF)]
    for e in monomials_upto(len(variables), order):
        D = zeros(dimF)
        for k, p in enumerate(polys):
            D[k, k] = p.coeff(e)
        if any(x != 0 for x in D.flat):
            terms[e] = Pm.dot(D).dot(Pim)
    return Series(variables, order, terms, (dimF, dimF))


def random_lalgebra(rng, dimT, dimF, order) -> LAlgebra:
    return extract_lalgebra(random_commuting_B(rng, dimT, dimF, order), dimT)


def random_assoc_A(rng, n, order, lo=-2, hi=2, flat_identity=False) -> VectorField:
    """Random associative vector field in n flat coordinates.

    Direct sum of blocks: one coordinate with A = f(t) (f without constant or linear part), or two coordinates
    with A = (u^2/2 + f(v), u v + g(v)) (identity d_u, generated by it and
    one more element).  A random linear change of flat coordinates mixes
    the blocks; associativity is preserved because the structure
    constants transform as a tensor.  With ``flat_identity`` the one
    coordinate blocks are t^2/2 and the change of coordinates sends d_0 to
    the sum of the block units, so d_0 is a flat identity.
    """
    from .linalg import inverse

    variables = tuple(f"t{i}" for i in range(n))

    def poly(v):
        p = random_poly(rng, (v,), order, lo, hi)
        return (p - p.degree_part(1)).extend(variables)

    comps, units = [], []
    k = 0
    while k < n:
        if k + 1 < n and rng.random() < 0.6:
            u, v = variables[k], variables[k + 1]
            f, g = poly(v), poly(v)
            U, V = Series.variable(variables, order, u), Series.variable(variables, order, v)
            comps.append((U * U).scale(Fraction(1, 2)) + f)
            comps.append(U * V + g)
            units.append(k)
            k += 2
        else:
            w = Series.variable(variables, order, variables[k])
            comps.append((w * w).scale(Fraction(1, 2)) if flat_identity else poly(variables[k]))
            units.append(k)
            k += 1
    if flat_identity:
        while True:
            Pi = [[Fraction(int(i in units)) if j == 0 else Fraction(rng.randint(-1, 1)) for j in range(n)] for i in range(n)]
            if dense_rank(Pi) == n:
                break
        P = inverse(Pi)
    else:
        P = random_invertible(rng, n, -1, 1)
        Pi = inverse(P)
    ts = [Series.variable(variables, order, v) for v in variables]
    sub = {v: sum((ts[j].scale(Pi[i][j]) for j in range(n)), Series(variables, order)) for i, v in enumerate(variables)}
    moved = [c.compose(sub, variables, order) for c in comps]
    out = [sum((moved[d].scale(P[c][d]) for d in range(n)), Series(variables, order)) for c in range(n)]
    return VectorField(out)


__all__ = [
    "build_B",
    "extract_lalgebra",
    "check_comm",
    "assoc_check",
    "has_flat_identity",
    "b_from_a",
    "a_from_b",
    "glue",
    "formal_projection",
    "check_maximality",
    "VectorField",
    "CommReport",
    "Projection",
    "ProjectionError",
]
