"""Exact linear algebra over the rationals.

Sparse rows are dicts ``column -> Fraction`` with integer columns.  The
echelon form picks the smallest column as pivot, so the set of pivot
columns depends only on the row space and the column order.
"""
from __future__ import annotations

import heapq
from fractions import Fraction


def clean(row: dict) -> dict:
    return {k: v for k, v in row.items() if v}


def axpy(target: dict, coeff, row: dict):
    """target += coeff * row, dropping zeros."""
    if not coeff:
        return target
    for k, v in row.items():
        s = target.get(k, 0) + coeff * v
        if s:
            target[k] = s
        else:
            target.pop(k, None)
    return target


class SparseEchelon:
    """Incremental row echelon form with minimal-column pivots."""

    def __init__(self):
        self.pivots: dict = {}

    def __len__(self):
        return len(self.pivots)

    def _lead_reduce(self, row: dict) -> dict:
        row = dict(row)
        while row:
            c = min(row)
            p = self.pivots.get(c)
            if p is None:
                return row
            axpy(row, -row[c], p)
        return row

    def add(self, row: dict) -> bool:
        """Insert a row; return True if it enlarged the row space."""
        row = self._lead_reduce(clean(row))
        if not row:
            return False
        c = min(row)
        lead = row[c]
        self.pivots[c] = {k: Fraction(v) / lead for k, v in row.items()}
        return True

    def reduce(self, row: dict) -> dict:
        """Remove every pivot column; the result is the normal form of ``row``."""
        row = clean(row)
        heap = [c for c in row if c in self.pivots]
        heapq.heapify(heap)
        seen = set()
        while heap:
            c = heapq.heappop(heap)
            if c in seen:
                continue
            seen.add(c)
            a = row.get(c)
            if not a:
                continue
            p = self.pivots[c]
            for k, v in p.items():
                s = row.get(k, 0) - a * v
                if s:
                    row[k] = s
                    if k in self.pivots and k not in seen:
                        heapq.heappush(heap, k)
                else:
                    row.pop(k, None)
        return row

    def in_span(self, row: dict) -> bool:
        return not self._lead_reduce(clean(row))


def rank(rows) -> int:
    e = SparseEchelon()
    for r in rows:
        e.add(r)
    return len(e)


# --- dense helpers ------------------------------------------------------------


def to_fraction_matrix(a):
    return [[Fraction(x) for x in row] for row in a]


def rref(a):
    """Reduced row echelon form; returns (matrix, pivot columns)."""
    m = to_fraction_matrix(a)
    rows = len(m)
    cols = len(m[0]) if rows else 0
    piv = []
    r = 0
    for c in range(cols):
        k = next((i for i in range(r, rows) if m[i][c]), None)
        if k is None:
            continue
        m[r], m[k] = m[k], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(rows):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        piv.append(c)
        r += 1
        if r == rows:
            break
    return m, piv


def dense_rank(a) -> int:
    if not len(a):
        return 0
    return len(rref(a)[1])


def inverse(a):
    n = len(a)
    aug = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(to_fraction_matrix(a))]
    m, piv = rref(aug)
    if piv[:n] != list(range(n)) or len(piv) < n or piv[n - 1] >= n:
        raise ZeroDivisionError("matrix is singular")
    return [row[n:] for row in m]


def solve(a, b):
    """Solve a x = b exactly.

    Returns ``(particular, kernel_basis)``; raises ValueError when the system
    is inconsistent.  ``b`` is a list of scalars.
    """
    rows = len(a)
    cols = len(a[0]) if rows else 0
    aug = [list(a[i]) + [b[i]] for i in range(rows)]
    if rows == 0:
        return [Fraction(0)] * cols, [[Fraction(int(i == j)) for j in range(cols)] for i in range(cols)]
    m, piv = rref(aug)
    if cols in piv:
        raise ValueError("inconsistent linear system")
    x = [Fraction(0)] * cols
    for r, c in enumerate(piv):
        x[c] = m[r][cols]
    free = [c for c in range(cols) if c not in piv]
    kernel = []
    for f in free:
        v = [Fraction(0)] * cols
        v[f] = Fraction(1)
        for r, c in enumerate(piv):
            v[c] = -m[r][f]
        kernel.append(v)
    return x, kernel


def matmul(a, b):
    return [[sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in zip(*b)] for row in a]


def transpose(a):
    return [list(r) for r in zip(*a)]
