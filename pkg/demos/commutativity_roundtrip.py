"""Random L-algebra to series B and back, then a corrupted entry caught twice."""
import random
from fractions import Fraction

import numpy as np

from painted_operad.formal import build_B, check_comm, extract_lalgebra, random_lalgebra
from painted_operad.lalgebra import verify


def main():
    rng = random.Random(3)
    L = random_lalgebra(rng, 1, 2, 4)
    B = build_B(L)
    print("B =", B.to_text())
    print("round trip:", extract_lalgebra(B, 1) == L)
    print("verify:", verify(L).ok, "check_comm:", check_comm(B).ok)
    bump = np.array([[Fraction(0), Fraction(1)], [Fraction(0), Fraction(0)]], dtype=object)
    bad = L.with_entry((1,), L.get((1,)) + bump)
    rep = check_comm(build_B(bad))
    print("corrupted verify:", verify(bad).ok, "check_comm:", rep.ok, "witness:", rep.witness)


if __name__ == "__main__":
    main()
