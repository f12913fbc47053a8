"""L-algebras presented by top matrix correlators (even case).

The index set I = {0, ..., dimT + dimF - 1}: index i < dimT names the T basis
vector ``t(i+1)`` (a black argument), the rest name F basis vectors
``f(i-dimT+1)`` (white arguments).  Correlators are stored on sorted index
tuples, so symmetry holds by construction.

Tree correlators are computed as numpy object tensors of Fractions.  The
tensor of an S-tree with root r has axis 0 for the output and one axis per
non-root label of S, in the canonical label order.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

import numpy as np

from .series import frac_matrix, zeros
from .trees import B, Flag, GoodFamily, PaintedSet, W, edge_half, enumerate_trees, parse_label, tree_cache


def index_name(i: int, dimT: int) -> str:
    return f"t{i + 1}" if i < dimT else f"f{i - dimT + 1}"


def parse_index(name: str, dimT: int, dimF: int) -> int:
    name = name.strip()
    kind, num = name[0], int(name[1:])
    if kind == "t" and 1 <= num <= dimT:
        return num - 1
    if kind == "f" and 1 <= num <= dimF:
        return dimT + num - 1
    raise ValueError(f"bad correlator index {name!r}")


def sub_multisets(P):
    """All sub-multisets Q of the sorted tuple P, with complements and binomial weights."""
    counts = {}
    for x in P:
        counts[x] = counts.get(x, 0) + 1
    keys = sorted(counts)
    for qs in itertools.product(*(range(counts[k] + 1) for k in keys)):
        Q, R, w = [], [], 1
        for k, q in zip(keys, qs):
            Q += [k] * q
            R += [k] * (counts[k] - q)
            w *= comb(counts[k], q)
        yield tuple(Q), tuple(R), w


def multisets(n_indices: int, size: int):
    return itertools.combinations_with_replacement(range(n_indices), size)


class LAlgebra:
    """Top matrix correlators <D_a1 ... D_an> in End F for 1 <= n <= order."""

    def __init__(self, dimT: int, dimF: int, order: int, correlators=None):
        if dimT < 0 or dimF < 1 or order < 1:
            raise ValueError("need dimT >= 0, dimF >= 1, order >= 1")
        self.dimT, self.dimF, self.order = dimT, dimF, order
        self.correlators = {}
        n = dimT + dimF
        for key, M in (correlators or {}).items():
            key = tuple(sorted(key))
            if not 1 <= len(key) <= order or any(not 0 <= i < n for i in key):
                raise ValueError(f"bad correlator key {key}")
            M = frac_matrix(M)
            if M.shape != (dimF, dimF):
                raise ValueError("correlator matrix has the wrong size")
            if any(x != 0 for x in M.flat):
                self.correlators[key] = M
        self._tensor_cache = {}

    @property
    def n_indices(self):
        return self.dimT + self.dimF

    def is_white(self, i: int) -> bool:
        return i >= self.dimT

    def get(self, key) -> np.ndarray:
        M = self.correlators.get(tuple(sorted(key)))
        return M if M is not None else zeros(self.dimF)

    def __eq__(self, other):
        if not isinstance(other, LAlgebra):
            return NotImplemented
        if (self.dimT, self.dimF, self.order) != (other.dimT, other.dimF, other.order):
            return False
        keys = set(self.correlators) | set(other.correlators)
        return all(all(x == y for x, y in zip(self.get(k).flat, other.get(k).flat)) for k in keys)

    def __repr__(self):
        return f"LAlgebra(dimT={self.dimT}, dimF={self.dimF}, order={self.order}, {len(self.correlators)} correlators)"

    def with_entry(self, key, M):
        c = dict(self.correlators)
        c[tuple(sorted(key))] = frac_matrix(M)
        return LAlgebra(self.dimT, self.dimF, self.order, c)

    def to_json(self):
        return {
            "dimT": self.dimT,
            "dimF": self.dimF,
            "order": self.order,
            "parity": "even",
            "correlators": [
                {
                    "indices": [index_name(i, self.dimT) for i in key],
                    "matrix": [[str(x) for x in row] for row in M],
                }
                for key, M in sorted(self.correlators.items(), key=lambda kv: (len(kv[0]), kv[0]))
            ],
        }

    @classmethod
    def from_json(cls, data):
        if data.get("parity", "even") != "even":
            raise ValueError("only the even case is supported")
        dimT, dimF, order = int(data["dimT"]), int(data["dimF"]), int(data["order"])
        corr = {}
        for rec in data.get("correlators", []):
            key = tuple(sorted(parse_index(x, dimT, dimF) for x in rec["indices"]))
            if key in corr:
                raise ValueError(f"correlator {rec['indices']} given twice")
            corr[key] = rec["matrix"]
        return cls(dimT, dimF, order, corr)


def unit_lalgebra(order: int) -> LAlgebra:
    """dimT = dimF = 1 with <D_t> = <D_f> = 1 and all other correlators zero."""
    one = [[1]]
    return LAlgebra(1, 1, order, {(0,): one, (1,): one})


# --- verification ------------------------------------------------------------------


@dataclass
class VerifyReport:
    ok: bool
    verified_order: int
    violations: list = field(default_factory=list)
    slot_violations: list = field(default_factory=list)

    def records(self, dimT):
        for a, b, P, M in self.violations:
            yield {
                "kind": "commutator",
                "pair": [index_name(a, dimT), index_name(b, dimT)],
                "multiset": [index_name(i, dimT) for i in P],
                "defect": [[str(x) for x in row] for row in M],
            }
        for R, i, j in self.slot_violations:
            yield {
                "kind": "slot-symmetry",
                "multiset": [index_name(k, dimT) for k in R],
                "slots": [index_name(i, dimT), index_name(j, dimT)],
            }


def commutator_defect(L: LAlgebra, a: int, b: int, P) -> np.ndarray:
    """Coefficient of x^P / P! in [d_a B, d_b B]."""
    out = zeros(L.dimF)
    for Q, R, w in sub_multisets(P):
        A1, B1 = L.get((a,) + Q), L.get((b,) + R)
        A2, B2 = L.get((b,) + Q), L.get((a,) + R)
        out = out + (A1.dot(B1) - A2.dot(B2)) * w
    return out


def verify(L: LAlgebra, slot_check: bool = True) -> VerifyReport:
    """Check the quadratic identities among top correlators.

    For every pair of indices a < b and multiset P with |P| <= order - 2 the
    sum over sub-multisets Q of P of binom-weighted
    <a Q><b P-Q> - <b Q><a P-Q> must vanish.  Symmetry is structural.  When
    ``slot_check`` is on, symmetry between the slot and the white arguments
    (needed for trees with three or more white tails) is reported
    separately and does not affect ``ok``.
    """
    n = L.n_indices
    top = L.order - 2
    viol = []
    for size in range(0, top + 1):
        for P in multisets(n, size):
            for a, b in itertools.combinations(range(n), 2):
                M = commutator_defect(L, a, b, P)
                if any(x != 0 for x in M.flat):
                    viol.append((a, b, P, M))
    slots = slot_violations(L) if slot_check else []
    return VerifyReport(not viol, max(top, 0), viol, slots)


def slot_violations(L: LAlgebra) -> list:
    out = []
    n, T = L.n_indices, L.dimT
    for size in range(0, L.order):
        for R in multisets(n, size):
            for i, j in itertools.combinations(range(L.dimF), 2):
                Mi, Mj = L.get(R + (T + i,)), L.get(R + (T + j,))
                if any(x != y for x, y in zip(Mi[:, j], Mj[:, i])):
                    out.append((R, T + i, T + j))
    return out


def is_slot_symmetric(L: LAlgebra) -> bool:
    return not slot_violations(L)


# --- tree correlators -------------------------------------------------------------


class ArityError(ValueError):
    pass


def top_tensor(L: LAlgebra, kinds) -> np.ndarray:
    """Array with axes (output, arg_1, ..., arg_n, slot) of the top correlator."""
    kinds = tuple(kinds)
    hit = L._tensor_cache.get(kinds)
    if hit is not None:
        return hit
    if len(kinds) > L.order:
        raise ArityError(f"vertex needs {len(kinds)} arguments but the order is {L.order}")
    F, T = L.dimF, L.dimT
    dims = [T if k == "T" else F for k in kinds]
    arr = np.empty((F, *dims, F), dtype=object)
    arr.fill(Fraction(0))
    for idx in itertools.product(*(range(d) for d in dims)):
        key = tuple(i if k == "T" else T + i for i, k in zip(idx, kinds))
        M = L.correlators.get(tuple(sorted(key)))
        if M is not None:
            arr[(slice(None),) + idx + (slice(None),)] = M
    L._tensor_cache[kinds] = arr
    return arr


def _slot_flag(t, v, in_flags, slot_label):
    if slot_label is not None:
        f = t.flag_towards(v, slot_label)
        if f in in_flags:
            return f
    for f in in_flags:
        if f.white:
            return f
    raise ValueError("vertex without a white input")


def tree_tensor(L: LAlgebra, g: GoodFamily, root, slot=None, chooser=None):
    """Correlator tensor of the tree ``g`` oriented towards ``root``.

    Returns (array, labels): axis 0 is the output, axis k >= 1 belongs to
    ``labels[k-1]`` (non-root labels in canonical order).  ``slot`` picks
    the slot flag along the path to that label; elsewhere the smallest
    white input is used.  ``chooser`` picks the next end vertex to cut
    among the ready ones (default: the first).
    """
    S = g.ground
    root = parse_label(root)
    if root not in S or not root.white:
        raise ValueError("root must be a white label of the ground set")
    slot = parse_label(slot) if slot is not None else None
    t = tree_cache(g)
    nv = len(t.vertices)
    out_flag = [t.flag_towards(v, root) for v in range(nv)]
    children = {}
    for v in range(nv):
        for f in t.vertices[v]:
            if f != out_flag[v] and f.kind == "edge":
                other = edge_half(f.mask, 1 - f.side)
                children[(v, f)] = t.vertex_of(other)
    done = {}
    pending = set(range(nv))
    while pending:
        ready = sorted(
            v for v in pending if all(children[(v, f)] in done for f in t.vertices[v] if (v, f) in children)
        )
        v = chooser(ready) if chooser else ready[0]
        if v not in ready:
            raise ValueError("chooser returned a vertex that is not ready")
        in_flags = [f for f in t.vertices[v] if f != out_flag[v]]
        sf = _slot_flag(t, v, in_flags, slot)
        args = [f for f in in_flags if f != sf]
        kinds = ["T" if (f.kind == "tail" and not f.label.white) else "F" for f in args]
        cur = top_tensor(L, kinds)
        axes = ["out"] + args + [sf]
        for f in args + [sf]:
            if f.kind == "tail":
                continue
            child, clabels = done.pop(children[(v, f)])
            k = axes.index(f)
            cur = np.tensordot(cur, child, axes=([k], [0]))
            axes = axes[:k] + axes[k + 1 :] + clabels
        labels = [a.label if isinstance(a, Flag) else a for a in axes[1:]]
        done[v] = (cur, labels)
        pending.discard(v)
    (arr, labels), = done.values()
    order = sorted(range(len(labels)), key=lambda k: labels[k].key)
    arr = np.transpose(arr, [0] + [k + 1 for k in order])
    return arr, [labels[k] for k in order]


def evaluate_tree_correlator(L: LAlgebra, g: GoodFamily, root, inputs: dict, slot=None, chooser=None):
    """Output F-vector of the flowchart ``g`` on the given input vectors."""
    arr, labels = tree_tensor(L, g, root, slot, chooser)
    vecs = {parse_label(k): v for k, v in inputs.items()}
    for lab in reversed(labels):
        if lab not in vecs:
            raise ValueError(f"missing input for {lab}")
        v = np.array([Fraction(x) for x in vecs[lab]], dtype=object)
        if v.shape[0] != arr.shape[-1]:
            raise ValueError(f"input for {lab} has the wrong dimension")
        arr = arr.dot(v)
    return list(arr)


def tree_matrix(L: LAlgebra, g: GoodFamily, root, slot, inputs: dict):
    """Matrix correlator of ``g`` with designated slot tail ``slot``."""
    arr, labels = tree_tensor(L, g, root, slot)
    slot = parse_label(slot)
    vecs = {parse_label(k): v for k, v in inputs.items()}
    ks = labels.index(slot)
    perm = [0, ks + 1] + [k + 1 for k in range(len(labels)) if k != ks]
    arr = np.transpose(arr, perm)
    rest = [lab for lab in labels if lab != slot]
    for lab in reversed(rest):
        v = np.array([Fraction(x) for x in vecs[lab]], dtype=object)
        arr = arr.dot(v)
    return arr


def tree_matrix_basis(L: LAlgebra, g: GoodFamily, root, slot, indices: dict):
    """Matrix correlator with basis-vector inputs: ``indices`` maps label -> basis index."""
    arr, labels = tree_tensor(L, g, root, slot)
    slot = parse_label(slot)
    sl = [slice(None)]
    for lab in labels:
        sl.append(slice(None) if lab == slot else indices[lab])
    return arr[tuple(sl)]


# --- linear relations -------------------------------------------------------------------


@dataclass
class RelationReport:
    ok: bool
    checked: int
    violations: list = field(default_factory=list)


def verify_linear_relations(L: LAlgebra, S: PaintedSet, max_edges: int, root=None) -> RelationReport:
    """Check that every standard relation among trees with at most ``max_edges``
    edges is killed by the correlators, on all basis inputs."""
    from .cohomology import all_standard_relations

    S.check_ring_ground()
    root = parse_label(root) if root is not None else S.whites[0]
    cache = {}

    def tensor(h):
        if h not in cache:
            cache[h] = tree_tensor(L, h, root)[0]
        return cache[h]

    checked = 0
    viol = []
    for d in range(1, min(max_edges, len(S) - 3) + 1):
        prev = enumerate_trees(S, d - 1)
        for rel in all_standard_relations(S, d, prev):
            checked += 1
            acc = None
            for h, c in rel.items():
                term = tensor(h) * c
                acc = term if acc is None else acc + term
            if acc is not None and any(x != 0 for x in acc.flat):
                viol.append({h: c for h, c in rel.items()})
    return RelationReport(not viol, checked, viol)


# --- tensor product ------------------------------------------------------------------


def _split_index(i, L1, L2):
    T2, F2 = L2.dimT, L2.dimF
    T = L1.dimT * L2.dimT
    if i < T:
        return i // T2, i % T2, "T"
    j = i - T
    return L1.dimT + j // F2, L2.dimT + j % F2, "F"


def tensor(L1: LAlgebra, L2: LAlgebra) -> LAlgebra:
    """Tensor product theory on (T1 (x) T2, F1 (x) F2).

    The top correlator at a one-vertex set S is the correlator of the
    class 1 in H_*S, pushed through the homology coproduct: a sum of
    Kronecker products of tree matrix correlators of the two factors.
    """
    from .cohomology import build_basis
    from .homology import coproduct, unit

    if L1.order != L2.order:
        raise ValueError("tensor factors must have the same order")
    N = L1.order
    dimT, dimF = L1.dimT * L2.dimT, L1.dimF * L2.dimF
    n = dimT + dimF
    out = {}
    copro = {}
    for size in range(1, N + 1):
        for key in multisets(n, size):
            whites = [i for i in key if i >= dimT]
            blacks = [i for i in key if i < dimT]
            S = PaintedSet.standard(2 + len(whites), len(blacks))
            if S not in copro:
                basis = build_basis(S)
                copro[S] = coproduct(unit(basis), basis)
            lab = {}
            for k, i in enumerate(whites):
                lab[W(3 + k)] = i
            for k, i in enumerate(blacks):
                lab[B(1 + k)] = i
            idx1, idx2 = {}, {}
            for L_, i in lab.items():
                a, b, _ = _split_index(i, L1, L2)
                idx1[L_] = a if a < L1.dimT else a - L1.dimT
                idx2[L_] = b if b < L2.dimT else b - L2.dimT
            M = zeros(dimF)
            for h1, h2, c in copro[S]:
                (g1,) = h1.terms
                (g2,) = h2.terms
                M1 = tree_matrix_basis(L1, g1, W(1), W(2), idx1)
                M2 = tree_matrix_basis(L2, g2, W(1), W(2), idx2)
                M = M + np.kron(M1, M2) * c
            if any(x != 0 for x in M.flat):
                out[key] = M
    return LAlgebra(dimT, dimF, N, out)


# --- cyclic data -------------------------------------------------------------------------


class CyclicData:
    """dimT, dimF and a symmetric invertible scalar product on F."""

    def __init__(self, dimT: int, dimF: int, product):
        from .linalg import inverse

        self.dimT, self.dimF = dimT, dimF
        self.product = [[Fraction(x) for x in row] for row in product]
        if len(self.product) != dimF or any(len(r) != dimF for r in self.product):
            raise ValueError("scalar product has the wrong size")
        if any(self.product[i][j] != self.product[j][i] for i in range(dimF) for j in range(dimF)):
            raise ValueError("scalar product must be symmetric")
        self.casimir = inverse(self.product)


@dataclass
class CyclicReport:
    ok: bool
    checked: int
    failures: list = field(default_factory=list)


def _standardize(G: PaintedSet):
    """Order-preserving relabelling of G onto the standard set with its shape."""
    std = PaintedSet.standard(len(G.whites), len(G.blacks))
    fwd = dict(zip(G.whites, std.whites))
    fwd.update(zip(G.blacks, std.blacks))
    return std, fwd


def _relabel_value(X, mp, ground):
    from .functors import TensorClass
    from .trees import relabel

    return TensorClass((ground,), {(relabel(k[0], mp, ground),): c for k, c in X.terms.items()})


def verify_cyclic(C: CyclicData, I_maps: dict, cap: int) -> CyclicReport:
    """Check the gluing square and permutation equivariance of cyclic data.

    ``I_maps[(m, n)]`` maps an index tuple (one basis index per label of the
    standard set with m whites and n blacks, canonical order; F indices for
    whites, T indices for blacks) to a single-factor TensorClass over that
    set.  Missing tuples are zero.  Every set with 3 <= |S| <= cap and at
    least two whites is required.
    """
    from .functors import EdgeSplit, TensorClass, fstar_one_edge
    from .cohomology import GradedClass
    from .trees import stable_masks

    need = [(m, n) for total in range(3, cap + 1) for m in range(2, total + 1) for n in [total - m]]
    for key in need:
        if key not in I_maps:
            raise KeyError(f"missing I-map for {key[0]} whites and {key[1]} blacks")

    def value(G, idx):
        std, fwd = _standardize(G)
        X = I_maps[(len(std.whites), len(std.blacks))].get(tuple(idx[x] for x in G.labels))
        if X is None:
            return TensorClass((G,), {})
        back = {v: k for k, v in fwd.items()}
        return _relabel_value(X, back, G)

    failures = []
    checked = 0
    for m, n in need:
        S = PaintedSet.standard(m, n)
        dims = [C.dimF if x.white else C.dimT for x in S.labels]
        for idx_t in itertools.product(*(range(d) for d in dims)):
            idx = dict(zip(S.labels, idx_t))
            X = value(S, idx)
            # equivariance under adjacent transpositions of same-coloured labels
            for grp in (S.whites, S.blacks):
                for a, b in zip(grp, grp[1:]):
                    mp = {x: x for x in S.labels}
                    mp[a], mp[b] = b, a
                    idx2 = {mp[x]: v for x, v in idx.items()}
                    checked += 1
                    if not (value(S, idx2) == _relabel_value(X, mp, S)):
                        failures.append({"set": [m, n], "indices": list(idx_t), "kind": "equivariance", "swap": [str(a), str(b)]})
            for sm in stable_masks(S):
                split = EdgeSplit(S, sm)
                right = TensorClass((split.G1, split.G2), {})
                by_grade = {}
                for (g,), c in X.terms.items():
                    by_grade.setdefault(len(g), {})[g] = c
                for d, terms in by_grade.items():
                    right = right + fstar_one_edge(S, sm, GradedClass(S, d, terms))
                left = TensorClass((split.G1, split.G2), {})
                for p in range(C.dimF):
                    for q in range(C.dimF):
                        w = C.casimir[p][q]
                        if not w:
                            continue
                        i1 = {x: idx[x] for x in split.S1}
                        i1[split.e1] = p
                        i2 = {x: idx[x] for x in split.S2}
                        i2[split.e2] = q
                        X1, X2 = value(split.G1, i1), value(split.G2, i2)
                        prod = {(k1[0], k2[0]): w * c1 * c2 for k1, c1 in X1.terms.items() for k2, c2 in X2.terms.items()}
                        left = left + TensorClass((split.G1, split.G2), prod)
                checked += 1
                if not (left == right):
                    failures.append({"set": [m, n], "indices": list(idx_t), "kind": "gluing", "edge": _part_text(S, sm)})
    return CyclicReport(not failures, checked, failures)


def _part_text(S, m):
    from .trees import TwoPartition

    return str(TwoPartition(S, m))


__all__ = [
    "LAlgebra",
    "CyclicData",
    "verify",
    "verify_linear_relations",
    "verify_cyclic",
    "tensor",
    "tree_tensor",
    "tree_matrix",
    "evaluate_tree_correlator",
    "unit_lalgebra",
]
