"""Moment values, weight matrices, and the five-dimensional example.

The normalized moment value of a single basis bracket equals its weight
matrix, every moment value has trace -1, and the four-bracket algebra
in dimension five has a fully explicit moment image whose convex hull
of weights is a rectangle.
"""

import numpy as np

from rnlie.brackets import FLOAT, Bracket
from rnlie import corpus, moment_map, weight_matrix, weight_polytope


def main():
    triple = (0, 1, 2)
    single = Bracket(4, {triple: 1.0}, FLOAT)
    print("moment value of a basis bracket equals its weight matrix:")
    print(" ", np.diag(moment_map(single).matrix), "==", np.diag(weight_matrix(triple, 4)))

    t5 = corpus("tricky5").bracket
    mv = moment_map(t5)
    print("\nfive-dimensional example, equal constants:")
    print("  moment diagonal:", [str(v) for v in mv.diagonal])
    print("  trace:", sum(mv.diagonal))
    print("  off-diagonal maximum:", mv.offdiagonal_max())

    poly = weight_polytope(t5)
    print("\nweight polytope:")
    print("  vertices:", poly.vertices)
    print("  proper faces:", [f for f in poly.hull_faces if len(f) < len(poly.vertices)])

    # a lopsided member of the same family: off-diagonal part appears
    lopsided = Bracket(5, {(0, 1, 2): 2.0, (0, 1, 3): 1.0,
                           (0, 2, 4): 1.0, (0, 3, 4): 1.0}, FLOAT)
    print("\nlopsided constants (2, 1, 1, 1):")
    print("  off-diagonal maximum:", moment_map(lopsided).offdiagonal_max())


if __name__ == "__main__":
    main()
