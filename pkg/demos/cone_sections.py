"""Trace-normalized sections of the certified cone.

For Heisenberg algebras the diagonal derivation torus is small enough
to slice the certified cone exactly.  heisenberg(3) gives a segment;
heisenberg(5) gives an octagon.  Both sections are invariant under the
signed-permutation symmetries of the algebra, and random probes of the
section all come back with genuine Ricci-negative witnesses.
"""

from rnlie import (
    cone_section,
    containment_audit,
    corpus,
    weyl_invariance_check,
)


def describe(name, param):
    b = corpus(name, param).bracket
    section = cone_section(b, 1)
    print(f"{name}({param}) at trace level 1:")
    print("  exactness:", section.exactness)
    print("  vertex count:", len(section.vertices))
    for v in section.vertices:
        print("   ", tuple(str(c) for c in v))
    weyl = weyl_invariance_check(section)
    print("  Weyl-invariant:", weyl.ok,
          f"({weyl.actions_checked} actions, worst move {weyl.worst_distance})")
    audit = containment_audit(b, section, probes=12, seed=5)
    print("  audit:", audit.probes, "probes,", audit.witnesses, "witnesses,",
          "worst lambda", f"{audit.worst_lambda:.3e}")
    print()


def main():
    describe("heisenberg", 3)
    describe("heisenberg", 5)


if __name__ == "__main__":
    main()
