"""Exact certificates on the Heisenberg algebra.

The diagonal derivations diag(a, b, a+b) of the 3-dimensional
Heisenberg algebra admit a Ricci-negative metric exactly when 2a+b > 0
and a+2b > 0.  The exact linear program reproduces the region, returns
convex-coefficient certificates inside it, and dual vectors outside.
"""

from fractions import Fraction

import numpy as np

from rnlie import PreconditionError, SrnCertificate, certify_srn_nice, corpus, search_rn_metric


def main():
    h3 = corpus("heisenberg", 3).bracket

    probes = [(1, 1), (3, -2), (-2, 3), (2, 1)]
    for a, b in probes:
        D = np.diag([Fraction(a), Fraction(b), Fraction(a + b)])
        closed = 2 * a + b > 0 and a + 2 * b > 0
        result = certify_srn_nice(D, h3)
        print(f"diag({a}, {b}, {a + b}):")
        print("  closed form says inside:", closed)
        print("  LP result:", type(result).__name__, " margin:", result.margin)
        if isinstance(result, SrnCertificate):
            print("  certificate:", {t: str(c) for t, c in result.coefficients.items()})
            witness = search_rn_metric(np.diag([float(a), float(b), float(a + b)]), h3, seed=1)
            print("  search confirms, lambda_max =", witness.lambda_max)
        print()

    print("a nonpositive trace is rejected up front:")
    try:
        certify_srn_nice(np.diag([Fraction(1), Fraction(-2), Fraction(-1)]), h3)
    except PreconditionError as ex:
        print("  PreconditionError:", ex)


if __name__ == "__main__":
    main()
