"""Glue a strict base onto an associative fibre and recover the base map."""
import random

from painted_operad.formal import b_from_a, check_comm, check_maximality, formal_projection, glue, random_assoc_A
from painted_operad.series import Series, identity, unit_matrix


def main():
    A = random_assoc_A(random.Random(4), 2, 5, flat_identity=True)
    B2 = b_from_a(A).rename(("f1", "f2"))
    B1 = Series(("s1", "s2"), 5, {(1, 0): identity(2), (0, 1): unit_matrix(2, 1, 0)}, (2, 2))
    G = glue(B1, B2, [1, 0])
    print("glued passes:", check_comm(G).ok)
    base = G.restrict(("s1", "s2"))
    print("base maximality:", check_maximality(base).verdict)
    P = formal_projection(base, G)
    print("unique projection:", P.unique)
    for v, s in P.substitution().items():
        print(f"  {v} -> {s.to_text()}")


if __name__ == "__main__":
    main()
