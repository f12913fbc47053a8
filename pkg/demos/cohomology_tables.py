"""Print graded dimensions and a pairing matrix for small painted sets."""
from painted_operad.cohomology import build_basis
from painted_operad.homology import pairing
from painted_operad.trees import PaintedSet, enumerate_trees


def main():
    for whites, blacks in [(4, 0), (5, 0), (6, 0), (2, 2), (2, 3), (3, 2)]:
        S = PaintedSet.standard(whites, blacks)
        basis = build_basis(S)
        counts = [len(enumerate_trees(S, d)) for d in range(basis.top + 1)]
        print(f"W{whites}B{blacks}: trees by edges {counts}, dims {basis.dims}")
    S = PaintedSet.standard(5)
    P = pairing(build_basis(S), 1)
    print("pairing in degree 1 for five whites:")
    print(P.to_csv())


if __name__ == "__main__":
    main()
