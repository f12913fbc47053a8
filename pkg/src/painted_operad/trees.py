"""Painted sets, painted stable 2-partitions and painted stable trees.

A painted stable S-tree is stored canonically as the set of 2-partitions
of S cut out by its edges (a *good family*).  Every 2-partition is kept as
an integer bitmask over the ground set, normalised so that the part holding
the smallest label is the one recorded.  The vertex/flag picture of a tree
(:class:`TreeStructure`) is derived on demand by :func:`expand_tree`.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import total_ordering
from typing import Iterable, Iterator, Sequence

WHITE = "w"
BLACK = "b"


@total_ordering
@dataclass(frozen=True)
class Label:
    color: str
    index: int

    def __post_init__(self):
        if self.color not in (WHITE, BLACK):
            raise ValueError(f"bad label color {self.color!r}")

    @property
    def white(self) -> bool:
        return self.color == WHITE

    @property
    def key(self):
        return (0 if self.color == WHITE else 1, self.index)

    def __lt__(self, other):
        return self.key < other.key

    def __str__(self):
        return f"{self.color}{self.index}"

    def __repr__(self):
        return str(self)


def W(i: int) -> Label:
    return Label(WHITE, i)


def B(i: int) -> Label:
    return Label(BLACK, i)


def parse_label(text) -> Label:
    if isinstance(text, Label):
        return text
    text = str(text).strip()
    if len(text) < 2 or text[0] not in (WHITE, BLACK) or not text[1:].isdigit():
        raise ValueError(f"cannot parse label {text!r}")
    return Label(text[0], int(text[1:]))


class PaintedSet:
    """A finite set of labels split into white and black ones.

    Labels are kept in the fixed order whites-then-blacks, each by index;
    bit ``k`` of every mask refers to ``labels[k]``.
    """

    __slots__ = ("labels", "position", "full", "white_mask", "_hash")

    def __init__(self, labels: Iterable[Label]):
        labs = tuple(sorted(parse_label(x) for x in labels))
        if len(set(labs)) != len(labs):
            raise ValueError("labels of a painted set must be distinct")
        self.labels = labs
        self.position = {lab: k for k, lab in enumerate(labs)}
        self.full = (1 << len(labs)) - 1
        self.white_mask = sum(1 << k for k, lab in enumerate(labs) if lab.white)
        self._hash = hash(labs)

    @classmethod
    def standard(cls, whites: int, blacks: int = 0) -> "PaintedSet":
        return cls([W(i) for i in range(1, whites + 1)] + [B(i) for i in range(1, blacks + 1)])

    def __len__(self):
        return len(self.labels)

    def __iter__(self):
        return iter(self.labels)

    def __contains__(self, lab):
        return lab in self.position

    def __eq__(self, other):
        return isinstance(other, PaintedSet) and self.labels == other.labels

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return "PaintedSet(" + " ".join(map(str, self.labels)) + ")"

    @property
    def whites(self):
        return tuple(x for x in self.labels if x.white)

    @property
    def blacks(self):
        return tuple(x for x in self.labels if not x.white)

    def mask(self, labels: Iterable) -> int:
        m = 0
        for lab in labels:
            m |= 1 << self.position[parse_label(lab)]
        return m

    def labels_of(self, mask: int) -> tuple:
        return tuple(lab for k, lab in enumerate(self.labels) if mask >> k & 1)

    def canonical(self, mask: int) -> int:
        """Return the mask of the part containing the first label."""
        return mask if mask & 1 else self.full ^ mask

    def partition(self, part: Iterable) -> "TwoPartition":
        return TwoPartition(self, self.mask(part))

    def fresh_white(self) -> Label:
        return W(max((x.index for x in self.labels if x.white), default=0) + 1)

    def check_ring_ground(self):
        if len(self.labels) < 3 or bin(self.white_mask).count("1") < 2:
            raise ValueError(f"{self!r} needs at least 3 labels and 2 whites")

    def to_json(self):
        return {"whites": [str(x) for x in self.whites], "blacks": [str(x) for x in self.blacks]}


def popcount(m: int) -> int:
    return bin(m).count("1")


def mask_delta(a: int, b: int, full: int) -> int:
    na, nb = full ^ a, full ^ b
    return sum(1 for x in (a & b, a & nb, na & b, na & nb) if x) - 2


def mask_stable(mask: int, ground: PaintedSet) -> bool:
    other = ground.full ^ mask
    return (
        popcount(mask) >= 2
        and popcount(other) >= 2
        and bool(mask & ground.white_mask)
        and bool(other & ground.white_mask)
    )


@dataclass(frozen=True)
class TwoPartition:
    """Unordered 2-partition; ``mask`` is the part holding the minimal label."""

    ground: PaintedSet
    mask: int

    def __post_init__(self):
        m = self.mask
        if m <= 0 or m >= self.ground.full or m & ~self.ground.full:
            raise ValueError("a 2-partition needs two nonempty parts")
        object.__setattr__(self, "mask", self.ground.canonical(m))

    @property
    def parts(self):
        return (self.ground.labels_of(self.mask), self.ground.labels_of(self.ground.full ^ self.mask))

    @property
    def other(self) -> int:
        return self.ground.full ^ self.mask

    def separates(self, left: Iterable, right: Iterable) -> bool:
        """True iff all of ``left`` lie in one part and all of ``right`` in the other."""
        lm, rm = self.ground.mask(left), self.ground.mask(right)
        return (lm & self.mask == lm and rm & self.other == rm) or (
            lm & self.other == lm and rm & self.mask == rm
        )

    def __str__(self):
        a, b = self.parts
        return "{" + ",".join(map(str, a)) + "}|{" + ",".join(map(str, b)) + "}"

    def to_json(self):
        return {"part": [str(x) for x in self.parts[0]]}


def delta(s: TwoPartition, t: TwoPartition) -> int:
    if s.ground != t.ground:
        raise ValueError("partitions live on different ground sets")
    return mask_delta(s.mask, t.mask, s.ground.full)


def is_painted_stable(s: TwoPartition) -> bool:
    return mask_stable(s.mask, s.ground)


def stable_masks(ground: PaintedSet) -> list:
    n = len(ground)
    if n < 4:
        return []
    # bit 0 always in the recorded part
    return [m for m in range(1, ground.full, 2) if mask_stable(m, ground)]


def enumerate_stable_partitions(ground: PaintedSet) -> list:
    return [TwoPartition(ground, m) for m in stable_masks(ground)]


def _as_mask(ground: PaintedSet, p) -> int:
    if isinstance(p, TwoPartition):
        if p.ground != ground:
            raise ValueError("partition on a different ground set")
        return p.mask
    if isinstance(p, int):
        return ground.canonical(p)
    return ground.canonical(ground.mask(p))


class GoodFamily:
    """Canonical encoding of a painted stable tree: its sorted edge masks."""

    __slots__ = ("ground", "masks", "_hash")

    def __init__(self, ground: PaintedSet, partitions: Iterable = (), check: bool = True):
        masks = sorted(_as_mask(ground, p) for p in partitions)
        if len(set(masks)) != len(masks):
            raise ValueError("repeated partition in family")
        self.ground = ground
        self.masks = tuple(masks)
        self._hash = hash((ground._hash, self.masks))
        if check and not masks_good(self.masks, ground):
            raise ValueError("family is not good")

    @classmethod
    def _raw(cls, ground, masks):
        obj = cls.__new__(cls)
        obj.ground = ground
        obj.masks = masks
        obj._hash = hash((ground._hash, masks))
        return obj

    def __len__(self):
        return len(self.masks)

    def __iter__(self) -> Iterator[TwoPartition]:
        return (TwoPartition(self.ground, m) for m in self.masks)

    def __contains__(self, p):
        return _as_mask(self.ground, p) in self.masks

    def __eq__(self, other):
        return isinstance(other, GoodFamily) and self.masks == other.masks and self.ground == other.ground

    def __lt__(self, other):
        return (len(self.masks), self.masks) < (len(other.masks), other.masks)

    def __hash__(self):
        return self._hash

    @property
    def partitions(self):
        return tuple(self)

    def with_mask(self, m: int) -> "GoodFamily":
        return GoodFamily._raw(self.ground, tuple(sorted(self.masks + (m,))))

    def without_mask(self, m: int) -> "GoodFamily":
        return GoodFamily._raw(self.ground, tuple(x for x in self.masks if x != m))

    def __repr__(self):
        return "GoodFamily[" + ", ".join(str(p) for p in self) + "]"

    def to_json(self):
        return [p.to_json() for p in self]


def masks_good(masks: Sequence[int], ground: PaintedSet) -> bool:
    if not all(mask_stable(m, ground) for m in masks):
        return False
    full = ground.full
    return all(mask_delta(a, b, full) == 1 for a, b in itertools.combinations(masks, 2))


def is_good_family(parts: Iterable) -> bool:
    parts = list(parts)
    if not parts:
        return True
    ground = parts[0].ground
    masks = [_as_mask(ground, p) for p in parts]
    return len(set(masks)) == len(masks) and masks_good(masks, ground)


def one_vertex(ground: PaintedSet) -> GoodFamily:
    return GoodFamily._raw(ground, ())


def enumerate_trees(ground: PaintedSet, num_edges: int | None = None) -> list:
    """All good families over ``ground``, in lexicographic order of mask lists."""
    parts = stable_masks(ground)
    full = ground.full
    compat = {a: {b for b in parts if mask_delta(a, b, full) == 1} for a in parts}
    out = []

    def grow(chosen, start, allowed):
        if num_edges is None or len(chosen) == num_edges:
            out.append(GoodFamily._raw(ground, tuple(chosen)))
        if num_edges is not None and len(chosen) >= num_edges:
            return
        for k in range(start, len(parts)):
            p = parts[k]
            if p in allowed:
                grow(chosen + [p], k + 1, allowed & compat[p])

    grow([], 0, set(parts))
    assert all(len(g) <= max(len(ground) - 3, 0) for g in out)
    return out


# --- vertex/flag picture --------------------------------------------------


@dataclass(frozen=True)
class Flag:
    """A tail (``label`` set) or a half of the edge ``mask``.

    For an edge half, ``side`` is 0 when its vertex sits on the side of the
    recorded part ``mask`` and 1 otherwise.
    """

    kind: str
    label: Label | None = None
    mask: int = 0
    side: int = 0

    @property
    def key(self):
        if self.kind == "tail":
            return (0,) + self.label.key
        return (1, self.mask, self.side)

    @property
    def white(self) -> bool:
        # halves of edges count as white
        return self.kind == "edge" or self.label.white

    def __lt__(self, other):
        return self.key < other.key

    def __str__(self):
        if self.kind == "tail":
            return str(self.label)
        return f"e{self.mask}.{self.side}"

    __repr__ = __str__


def tail(lab) -> Flag:
    return Flag("tail", parse_label(lab))


def edge_half(mask: int, side: int) -> Flag:
    return Flag("edge", None, mask, side)


def branch_has_white(t: "TreeStructure", flag: Flag) -> bool:
    return flag.white


@dataclass
class TreeStructure:
    ground: PaintedSet
    family: GoodFamily
    vertices: tuple
    edges: tuple
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def branch_mask(self, flag: Flag) -> int:
        if flag.kind == "tail":
            return 1 << self.ground.position[flag.label]
        return self.ground.full ^ flag.mask if flag.side == 0 else flag.mask

    def vertex_of(self, flag: Flag) -> int:
        vmap = self._cache.get("vertex_of")
        if vmap is None:
            vmap = {f: v for v, fl in enumerate(self.vertices) for f in fl}
            self._cache["vertex_of"] = vmap
        return vmap[flag]

    def vertex_of_edge(self, mask: int):
        return self.vertex_of(edge_half(mask, 0)), self.vertex_of(edge_half(mask, 1))

    def tails_at(self, v: int) -> tuple:
        return tuple(f.label for f in self.vertices[v] if f.kind == "tail")

    def flag_towards(self, v: int, lab) -> Flag:
        """The flag at ``v`` whose branch carries label ``lab``."""
        bit = 1 << self.ground.position[parse_label(lab)]
        for f in self.vertices[v]:
            if self.branch_mask(f) & bit:
                return f
        raise KeyError(lab)

    def is_end_vertex(self, v: int) -> bool:
        return sum(1 for f in self.vertices[v] if f.kind == "edge") <= 1


def _branch(ground: PaintedSet, f: Flag) -> int:
    if f.kind == "tail":
        return 1 << ground.position[f.label]
    return ground.full ^ f.mask if f.side == 0 else f.mask


def _split_vertex(ground, vertices, m):
    comp = ground.full ^ m
    for vi, flags in enumerate(vertices):
        inside, outside = [], []
        for f in flags:
            br = _branch(ground, f)
            if br & m == br:
                inside.append(f)
            elif br & comp == br:
                outside.append(f)
            else:
                break
        else:
            if inside and outside:
                return vi, inside, outside
    return None


def expand_tree(g: GoodFamily) -> TreeStructure:
    """Rebuild the vertices and flags of the tree encoded by ``g``."""
    ground = g.ground
    if not masks_good(g.masks, ground):
        raise ValueError("family is not good")
    vertices = [[tail(x) for x in ground.labels]]
    for m in g.masks:
        hit = _split_vertex(ground, vertices, m)
        if hit is None:
            raise ValueError("family does not describe a tree")
        vi, inside, outside = hit
        vertices[vi] = inside + [edge_half(m, 0)]
        vertices.append(outside + [edge_half(m, 1)])
    verts = sorted((tuple(sorted(fl, key=lambda f: f.key)) for fl in vertices), key=lambda fl: fl[0].key)
    where = {f: v for v, fl in enumerate(verts) for f in fl}
    edges = tuple((m, where[edge_half(m, 0)], where[edge_half(m, 1)]) for m in g.masks)
    return TreeStructure(ground, g, tuple(verts), edges)


def edge_partitions(t: TreeStructure) -> GoodFamily:
    """Recompute the family from the vertex picture (inverse of expand_tree)."""
    masks = []
    for v, flags in enumerate(t.vertices):
        for f in flags:
            if f.kind == "edge" and f.side == 0:
                side_labels = 0
                # labels reachable from v without crossing f
                for h in flags:
                    if h != f:
                        side_labels |= t.branch_mask(h)
                masks.append(t.ground.canonical(side_labels))
    return GoodFamily(t.ground, masks)


def branches(t: TreeStructure, v: int) -> list:
    return [(f, t.ground.labels_of(t.branch_mask(f))) for f in t.vertices[v]]


def tree_cache(g: GoodFamily) -> TreeStructure:
    t = _TREES.get(g)
    if t is None:
        t = expand_tree(g)
        if len(_TREES) > 200000:
            _TREES.clear()
        _TREES[g] = t
    return t


_TREES: dict = {}


# --- breaking -------------------------------------------------------------


@dataclass(frozen=True)
class BreakResult:
    variant: str  # "edge" | "vertex" | "none"
    edge: int | None = None
    vertex: int | None = None
    witness: int | None = None


def classify_mask(g: GoodFamily, m: int) -> BreakResult:
    full = g.ground.full
    if m in g.masks:
        return BreakResult("edge", edge=m)
    for e in g.masks:
        if mask_delta(m, e, full) == 2:
            return BreakResult("none", witness=e)
    t = tree_cache(g)
    hit = _split_vertex(g.ground, [list(fl) for fl in t.vertices], m)
    assert hit is not None
    return BreakResult("vertex", vertex=hit[0])


def classify_break(g: GoodFamily, sigma: TwoPartition) -> BreakResult:
    if not is_painted_stable(sigma):
        raise ValueError(f"{sigma} is not painted stable")
    return classify_mask(g, _as_mask(g.ground, sigma))


def contract_edge(g: GoodFamily, sigma) -> GoodFamily:
    m = _as_mask(g.ground, sigma)
    if m not in g.masks:
        raise ValueError("partition is not an edge of the tree")
    return g.without_mask(m)


def star_insert(sigma, g: GoodFamily) -> GoodFamily:
    m = _as_mask(g.ground, sigma)
    if not mask_stable(m, g.ground) or classify_mask(g, m).variant != "vertex":
        raise ValueError("partition does not break the tree at a vertex")
    return g.with_mask(m)


# --- vertex partitions and quadruples ----------------------------------------


def vertex_splits(t: TreeStructure, v: int) -> list:
    """Valid 2-partitions of the flags at ``v`` as (flag-bitmask, sigma mask).

    Bit k of the flag-bitmask refers to ``t.vertices[v][k]``; the recorded
    part always contains flag 0.  A split is valid when both parts have at
    least two flags and at least one white flag; this also rules out
    splits that would re-create an existing edge.
    """
    key = ("splits", v)
    hit = t._cache.get(key)
    if hit is not None:
        return hit
    flags = t.vertices[v]
    k = len(flags)
    brs = [t.branch_mask(f) for f in flags]
    whites = [f.white for f in flags]
    out = []
    allf = (1 << k) - 1
    for a in range(1, allf, 2):
        b = allf ^ a
        if popcount(a) < 2 or popcount(b) < 2:
            continue
        if not any(whites[i] for i in range(k) if a >> i & 1):
            continue
        if not any(whites[i] for i in range(k) if b >> i & 1):
            continue
        sm = 0
        for i in range(k):
            if a >> i & 1:
                sm |= brs[i]
        out.append((a, t.ground.canonical(sm)))
    t._cache[key] = out
    return out


def vertex_partitions(t: TreeStructure, v: int) -> list:
    flags = t.vertices[v]
    res = []
    for a, sm in vertex_splits(t, v):
        pa = tuple(f for i, f in enumerate(flags) if a >> i & 1)
        pb = tuple(f for i, f in enumerate(flags) if not a >> i & 1)
        res.append(((pa, pb), TwoPartition(t.ground, sm)))
    return res


def quad_allowed(I: Flag, J: Flag, K: Flag, L: Flag) -> bool:
    return (J.white and L.white) or (I.white and K.white)


def allowed_quadruples(t: TreeStructure, where) -> list:
    """Allowed flag quadruples at a vertex (int) or around an edge (mask via ``("edge", m)``)."""
    if isinstance(where, tuple) and where[0] == "edge":
        m = where[1]
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
    return [q for q in itertools.permutations(t.vertices[where], 4) if quad_allowed(*q)]


# --- grafting -------------------------------------------------------------


def graft(g1: GoodFamily, e1, g2: GoodFamily, e2, ground: PaintedSet | None = None) -> GoodFamily:
    """Glue tail ``e1`` of g1 to tail ``e2`` of g2 into a new edge."""
    e1, e2 = parse_label(e1), parse_label(e2)
    G1, G2 = g1.ground, g2.ground
    if not (e1.white and e2.white and e1 in G1 and e2 in G2):
        raise ValueError("gluing tails must be white labels of the two grounds")
    s1 = [x for x in G1.labels if x != e1]
    s2 = [x for x in G2.labels if x != e2]
    if set(s1) & set(s2):
        raise ValueError("the two sides share labels")
    S = ground if ground is not None else PaintedSet(s1 + s2)
    if set(S.labels) != set(s1) | set(s2):
        raise ValueError("target ground does not match")
    out = [S.mask(s1)]
    for g, e, rest in ((g1, e1, s2), (g2, e2, s1)):
        for p in g:
            a, b = p.parts
            part = a if e in a else b
            other = b if e in a else a
            out.append(S.mask(other))
    res = GoodFamily(S, out, check=False)
    assert masks_good(res.masks, S), "grafting produced an unstable family"
    return res


def split_at_edge(g: GoodFamily, sigma, e1: Label | None = None, e2: Label | None = None):
    """Cut ``g`` at edge ``sigma``; inverse of :func:`graft`.

    Returns ``(g1, e1, g2, e2)`` with g1 over (recorded part of sigma) + e1
    and g2 over (other part) + e2.
    """
    S = g.ground
    m = _as_mask(S, sigma)
    if m not in g.masks:
        raise ValueError("not an edge")
    e1 = e1 or S.fresh_white()
    e2 = e2 or S.fresh_white()
    s1, s2 = S.labels_of(m), S.labels_of(S.full ^ m)
    G1, G2 = PaintedSet(s1 + (e1,)), PaintedSet(s2 + (e2,))
    f1, f2 = [], []
    for r in g.masks:
        if r == m:
            continue
        ra, rb = S.labels_of(r), S.labels_of(S.full ^ r)
        for part in (ra, rb):
            if set(part) < set(s1):
                f1.append(G1.mask(part))
                break
            if set(part) < set(s2):
                f2.append(G2.mask(part))
                break
        else:
            raise AssertionError("edge incompatible with sigma")
    return GoodFamily(G1, f1), e1, GoodFamily(G2, f2), e2


def relabel(g: GoodFamily, mapping: dict, ground: PaintedSet) -> GoodFamily:
    """Transport ``g`` along a color-preserving bijection of labels."""
    for a, b in mapping.items():
        if a.white != b.white:
            raise ValueError("relabelling must preserve colors")
    out = []
    for p in g:
        out.append(ground.mask(mapping[x] for x in p.parts[0]))
    return GoodFamily(ground, out, check=False)


def family_from_json(ground: PaintedSet, data) -> GoodFamily:
    return GoodFamily(ground, [[parse_label(x) for x in p["part"]] for p in data])
