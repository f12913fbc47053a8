"""Truncated multivariate power series with exact rational coefficients.

Coefficients are either ``Fraction`` scalars or square numpy object arrays
of ``Fraction``.  Truncation is by total degree: a series of order N keeps
monomials of degree at most N.
"""
from __future__ import annotations

from fractions import Fraction
from math import factorial

import numpy as np


def frac_matrix(rows) -> np.ndarray:
    a = np.array([[Fraction(x) for x in r] for r in rows], dtype=object)
    return a


def zeros(n: int) -> np.ndarray:
    return np.array([[Fraction(0)] * n for _ in range(n)], dtype=object)


def identity(n: int) -> np.ndarray:
    a = zeros(n)
    for i in range(n):
        a[i, i] = Fraction(1)
    return a


def unit_matrix(n: int, i: int, j: int) -> np.ndarray:
    a = zeros(n)
    a[i, j] = Fraction(1)
    return a


def _is_zero(c) -> bool:
    if isinstance(c, np.ndarray):
        return all(x == 0 for x in c.flat)
    return c == 0


def _same(a, b) -> bool:
    if isinstance(a, np.ndarray) or isinstance(b, np.ndarray):
        return _is_zero(a - b)
    return a == b


def monomials(nvars: int, degree: int):
    """Exponent tuples of the given total degree, in lexicographic descending order."""
    if nvars == 0:
        if degree == 0:
            yield ()
        return
    for k in range(degree, -1, -1):
        for rest in monomials(nvars - 1, degree - k):
            yield (k,) + rest


def monomials_upto(nvars: int, order: int):
    for d in range(order + 1):
        yield from monomials(nvars, d)


class Series:
    """Total-degree truncated series in named variables."""

    __slots__ = ("vars", "order", "shape", "terms")

    def __init__(self, variables, order: int, terms=None, shape=None):
        self.vars = tuple(variables)
        if len(set(self.vars)) != len(self.vars):
            raise ValueError("repeated variable name")
        self.order = int(order)
        self.shape = shape
        self.terms = {}
        for e, c in (terms or {}).items():
            e = tuple(e)
            if len(e) != len(self.vars):
                raise ValueError("exponent length does not match the variables")
            if sum(e) > self.order:
                continue
            if isinstance(c, np.ndarray):
                if self.shape is None:
                    self.shape = c.shape
                c = np.array([[Fraction(x) for x in r] for r in c], dtype=object)
            else:
                c = Fraction(c)
            if not _is_zero(c):
                self.terms[e] = c

    # construction ---------------------------------------------------------------
    @classmethod
    def variable(cls, variables, order, name):
        variables = tuple(variables)
        e = tuple(int(v == name) for v in variables)
        if sum(e) != 1:
            raise ValueError(f"unknown variable {name}")
        return cls(variables, order, {e: 1})

    @classmethod
    def constant(cls, variables, order, c):
        return cls(variables, order, {(0,) * len(tuple(variables)): c})

    def zero_like(self):
        return Series(self.vars, self.order, shape=self.shape)

    def _zero_coeff(self):
        return zeros(self.shape[0]) if self.shape else Fraction(0)

    @property
    def is_matrix(self):
        return self.shape is not None

    # arithmetic -----------------------------------------------------------------
    def _align(self, other):
        if not isinstance(other, Series):
            other = Series.constant(self.vars, self.order, other)
        if other.vars != self.vars:
            raise ValueError("series over different variables")
        return other

    def __add__(self, other):
        other = self._align(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out[e] + c if e in out else c
        return Series(self.vars, min(self.order, other.order), out, self.shape or other.shape)

    __radd__ = __add__

    def __neg__(self):
        return Series(self.vars, self.order, {e: -c for e, c in self.terms.items()}, self.shape)

    def __sub__(self, other):
        return self + (-self._align(other))

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, k):
        return Series(self.vars, self.order, {e: c * k for e, c in self.terms.items()}, self.shape)

    def __mul__(self, other):
        if not isinstance(other, Series):
            if isinstance(other, np.ndarray):
                return Series(self.vars, self.order, {e: _prod(c, other) for e, c in self.terms.items()}, other.shape)
            return self.scale(other)
        other = self._align(other)
        order = min(self.order, other.order)
        out = {}
        for e1, c1 in self.terms.items():
            d1 = sum(e1)
            for e2, c2 in other.terms.items():
                if d1 + sum(e2) > order:
                    continue
                e = tuple(a + b for a, b in zip(e1, e2))
                p = _prod(c1, c2)
                out[e] = out[e] + p if e in out else p
        shape = self.shape if self.shape else other.shape
        return Series(self.vars, order, out, shape)

    def __rmul__(self, other):
        if isinstance(other, np.ndarray):
            return Series(self.vars, self.order, {e: _prod(other, c) for e, c in self.terms.items()}, other.shape)
        return self.scale(other)

    def __pow__(self, k: int):
        out = Series.constant(self.vars, self.order, identity(self.shape[0]) if self.shape else 1)
        for _ in range(k):
            out = out * self
        return out

    def commutator(self, other):
        return self * other - other * self

    # calculus -------------------------------------------------------------------
    def derivative(self, name):
        i = self.vars.index(name)
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                f = list(e)
                f[i] -= 1
                out[tuple(f)] = c * e[i]
        return Series(self.vars, max(self.order - 1, 0), out, self.shape)

    def truncate(self, order):
        return Series(self.vars, min(order, self.order), self.terms, self.shape)

    def coeff(self, e):
        return self.terms.get(tuple(e), self._zero_coeff())

    def constant_term(self):
        return self.coeff((0,) * len(self.vars))

    def degree_part(self, d):
        return Series(self.vars, self.order, {e: c for e, c in self.terms.items() if sum(e) == d}, self.shape)

    def entry(self, i, j):
        return Series(self.vars, self.order, {e: c[i, j] for e, c in self.terms.items()})

    def apply(self, vec):
        """Matrix series times a constant vector: a list of scalar series."""
        n = self.shape[0]
        return [
            Series(self.vars, self.order, {e: sum((c[i, j] * Fraction(vec[j]) for j in range(n)), Fraction(0)) for e, c in self.terms.items()})
            for i in range(n)
        ]

    @classmethod
    def from_entries(cls, entries):
        """Assemble a matrix series from a square list of scalar series."""
        n = len(entries)
        first = entries[0][0]
        out = {}
        for i in range(n):
            for j in range(n):
                for e, c in entries[i][j].terms.items():
                    if e not in out:
                        out[e] = zeros(n)
                    out[e][i, j] = c
        order = min(s.order for row in entries for s in row)
        return cls(first.vars, order, out, (n, n))

    def rename(self, variables):
        variables = tuple(variables)
        if len(variables) != len(self.vars):
            raise ValueError("wrong number of variable names")
        return Series(variables, self.order, self.terms, self.shape)

    def extend(self, variables):
        """View as a series in a larger variable list containing ours."""
        variables = tuple(variables)
        pos = [variables.index(v) for v in self.vars]
        out = {}
        for e, c in self.terms.items():
            f = [0] * len(variables)
            for p, k in zip(pos, e):
                f[p] = k
            out[tuple(f)] = c
        return Series(variables, self.order, out, self.shape)

    def restrict(self, keep):
        """Set every variable outside ``keep`` to zero."""
        keep = tuple(keep)
        pos = [self.vars.index(v) for v in keep]
        out = {}
        for e, c in self.terms.items():
            if any(k for i, k in enumerate(e) if i not in pos):
                continue
            out[tuple(e[p] for p in pos)] = c
        return Series(keep, self.order, out, self.shape)

    def compose(self, subs: dict, variables, order=None):
        """Substitute ``var -> series`` (series over ``variables``, zero constant term)."""
        variables = tuple(variables)
        order = self.order if order is None else order
        inner = []
        for v in self.vars:
            s = subs[v]
            if not isinstance(s, Series):
                s = Series.constant(variables, order, s)
            if s.vars != variables:
                raise ValueError("substituted series must share the target variables")
            if not _is_zero(s.constant_term()):
                raise ValueError("composition needs inner series without constant term")
            order = min(order, s.order if s.terms else order)
            inner.append(s)
        powers = [[Series.constant(variables, order, 1)] for _ in inner]
        acc = {}
        for e, c in self.terms.items():
            term = Series.constant(variables, order, 1)
            for i, k in enumerate(e):
                while len(powers[i]) <= k:
                    powers[i].append(powers[i][-1] * inner[i])
                if k:
                    term = term * powers[i][k]
            for f, a in term.terms.items():
                p = c * a
                acc[f] = acc[f] + p if f in acc else p
        return Series(variables, order, acc, self.shape)

    # comparison -------------------------------------------------------------------
    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        if not isinstance(other, Series):
            return NotImplemented
        return self.vars == other.vars and (self - other).is_zero()

    def equal_upto(self, other, order):
        d = self - other
        return all(sum(e) > order for e in d.terms)

    def __repr__(self):
        return f"Series({self.vars}, N={self.order}, {len(self.terms)} terms)"

    def to_text(self):
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms, key=lambda e: (sum(e), [-k for k in e])):
            c = self.terms[e]
            mono = "*".join(v if k == 1 else f"{v}^{k}" for v, k in zip(self.vars, e) if k)
            if isinstance(c, np.ndarray):
                mat = "[" + ";".join(",".join(str(x) for x in row) for row in c) + "]"
                parts.append(mat + (f"*{mono}" if mono else ""))
            elif not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return "+".join(parts).replace("+-", "-")

    # serialisation ------------------------------------------------------------------
    def to_json(self):
        terms = []
        for e in sorted(self.terms, key=lambda e: (sum(e), [-k for k in e])):
            c = self.terms[e]
            rec = {"exp": {v: k for v, k in zip(self.vars, e) if k}}
            if isinstance(c, np.ndarray):
                rec["matrix"] = [[str(x) for x in row] for row in c]
            else:
                rec["coeff"] = str(c)
            terms.append(rec)
        out = {"vars": list(self.vars), "order": self.order}
        if self.shape:
            out["dimF"] = self.shape[0]
        out["terms"] = terms
        return out

    @classmethod
    def from_json(cls, data):
        variables = tuple(data["vars"])
        dimF = data.get("dimF")
        terms = {}
        for rec in data["terms"]:
            for v in rec["exp"]:
                if v not in variables:
                    raise ValueError(f"unknown variable {v!r} in series term")
            e = tuple(int(rec["exp"].get(v, 0)) for v in variables)
            if "matrix" in rec:
                c = frac_matrix(rec["matrix"])
                if dimF is not None and c.shape != (dimF, dimF):
                    raise ValueError("matrix size does not match dimF")
            else:
                c = Fraction(rec["coeff"])
            terms[e] = terms[e] + c if e in terms else c
        shape = (dimF, dimF) if dimF is not None else None
        return cls(variables, int(data["order"]), terms, shape)


def _prod(a, b):
    if isinstance(a, np.ndarray) and isinstance(b, np.ndarray):
        return a.dot(b)
    return a * b


def multinomial_weight(e) -> Fraction:
    w = 1
    for k in e:
        w *= factorial(k)
    return Fraction(1, w)


def series_inverse_map(comps, variables):
    """Inverse of a formal map x -> y = comps(x) with invertible linear part.

    ``comps`` are scalar series over ``variables`` with zero constant term;
    the result expresses each x_i as a series in the same variable names
    read as the y coordinates.
    """
    from .linalg import inverse

    n = len(comps)
    order = min(c.order for c in comps)
    lin = [[comps[i].coeff(tuple(int(k == j) for k in range(n))) for j in range(n)] for i in range(n)]
    try:
        Linv = inverse(lin)
    except ZeroDivisionError:
        raise ValueError("linear part is not invertible") from None
    ys = [Series.variable(variables, order, v) for v in variables]
    nonlin = [c - c.degree_part(1) for c in comps]
    x = [sum((ys[j].scale(Linv[i][j]) for j in range(n)), Series(variables, order)) for i in range(n)]
    for _ in range(order):
        sub = {v: x[k] for k, v in enumerate(variables)}
        nl = [c.compose(sub, variables, order) for c in nonlin]
        rhs = [ys[j] - nl[j] for j in range(n)]
        x = [sum((rhs[j].scale(Linv[i][j]) for j in range(n)), Series(variables, order)) for i in range(n)]
    return x


def random_poly(rng, variables, order, lo=-3, hi=3, density=0.6, const=False):
    """Random scalar polynomial with small integer coefficients."""
    terms = {}
    for e in monomials_upto(len(variables), order):
        if sum(e) == 0 and not const:
            continue
        if rng.random() < density:
            terms[e] = rng.randint(lo, hi)
    return Series(variables, order, terms)


__all__ = [
    "Series",
    "frac_matrix",
    "zeros",
    "identity",
    "unit_matrix",
    "monomials",
    "monomials_upto",
    "multinomial_weight",
    "series_inverse_map",
    "random_poly",
]
