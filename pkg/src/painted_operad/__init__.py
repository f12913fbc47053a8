"""Exact combinatorics of painted stable trees and the structures built on them."""

from .trees import (
    B,
    GoodFamily,
    Label,
    PaintedSet,
    TwoPartition,
    W,
    classify_break,
    contract_edge,
    delta,
    enumerate_stable_partitions,
    enumerate_trees,
    expand_tree,
    graft,
    is_good_family,
    is_painted_stable,
    star_insert,
)
from .cohomology import GradedClass, build_basis, multiply, multiply_generator, normal_form
from .homology import HomologyClass, act, cap, coproduct, integrate, pairing
from .functors import TensorClass, flowerstar, fstar, fstar_edge
from .series import Series
from .lalgebra import LAlgebra, tensor, verify, verify_linear_relations
from .formal import (
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
)

__version__ = "0.1.0"
