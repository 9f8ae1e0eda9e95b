"""Exact convex hulls of small rational point sets.

Everything here runs in Fraction arithmetic so that face identifications
are combinatorial facts, not tolerance calls.  Sized for the polytopes
that show up in weight-space computations: at most 16 distinct points,
ambient dimension at most 8.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from . import _exactlp, _rational
from .errors import PreconditionError

MAX_POINTS = 16


def _fraction_point(p):
    return tuple(Fraction(x) for x in p)


@dataclass(frozen=True)
class Hull:
    """Face lattice of the convex hull of a finite point set.

    `unique` holds the deduplicated points and `to_unique[i]` maps input
    index i to its representative.  `faces` lists every nonempty face as
    a frozenset of unique indices (all points lying on the face, extreme
    or not), sorted by size then lexicographically; the full index set
    is always the last entry.  `extreme` indexes the points that are
    vertices of the hull.
    """

    points: tuple
    unique: tuple
    to_unique: tuple
    dim: int
    extreme: tuple
    facets: tuple
    faces: tuple

    def face_count(self) -> int:
        return len(self.faces)


def _affine_coordinates(unique):
    """Exact coordinates of the points on their own affine hull.

    Returns (dim, coords).  Uses the reduced row form of the difference
    vectors; because pivot columns of reduced rows carry an identity
    block, each coordinate is read straight off the pivot entries.
    """
    base = unique[0]
    n = len(base)
    diffs = [[p[t] - base[t] for t in range(n)] for p in unique]
    rows, pivots = _rational.rref(diffs)
    basis = [r for r in rows if any(x != 0 for x in r)]
    d = len(basis)
    coords = []
    for p in unique:
        delta = [p[t] - base[t] for t in range(n)]
        x = [delta[pc] for pc in pivots[:d]]
        # the difference must reconstruct exactly from the basis
        for t in range(n):
            s = sum(x[m] * basis[m][t] for m in range(d))
            if s != delta[t]:
                raise PreconditionError("points do not lie on a common rational "
                                        "affine subspace of the expected rank")
        coords.append(tuple(x))
    return d, coords


def _hyperplane_through(coords, subset, d):
    """Normal/offset of the hyperplane spanned by a d-subset, or None."""
    q0 = coords[subset[0]]
    rows = [[coords[s][t] - q0[t] for t in range(d)] for s in subset[1:]]
    kernel = _rational.nullspace(rows, ncols=d)
    if len(kernel) != 1:
        return None
    phi = [v for v in kernel[0]]
    beta = sum(phi[t] * q0[t] for t in range(d))
    return phi, beta


def _enumerate_facets(coords, d):
    m = len(coords)
    facets = set()
    for subset in itertools.combinations(range(m), d):
        hp = _hyperplane_through(coords, subset, d)
        if hp is None:
            continue
        phi, beta = hp
        values = [sum(phi[t] * q[t] for t in range(d)) - beta for q in coords]
        if all(v >= 0 for v in values) or all(v <= 0 for v in values):
            facets.add(frozenset(i for i, v in enumerate(values) if v == 0))
    return facets


def _extreme_indices(coords):
    out = []
    m = len(coords)
    if m == 1:
        return (0,)
    d = len(coords[0])
    for r in range(m):
        others = [coords[i] for i in range(m) if i != r]
        a_eq = [[q[t] for q in others] for t in range(d)]
        a_eq.append([Fraction(1)] * len(others))
        b_eq = [coords[r][t] for t in range(d)] + [Fraction(1)]
        ok, _ = _exactlp.feasible(a_eq=a_eq, b_eq=b_eq,
                                  nonneg=[True] * len(others), nvars=len(others))
        if not ok:
            out.append(r)
    return tuple(out)


def _face_sort_key(face):
    return (len(face), tuple(sorted(face)))


def exact_hull(points) -> Hull:
    """Face lattice, facets, and extreme points of conv(points)."""
    pts = tuple(_fraction_point(p) for p in points)
    if not pts:
        raise PreconditionError("hull of an empty point set")
    unique = []
    seen = {}
    to_unique = []
    for p in pts:
        if p not in seen:
            seen[p] = len(unique)
            unique.append(p)
        to_unique.append(seen[p])
    if len(unique) > MAX_POINTS:
        raise PreconditionError(
            f"{len(unique)} distinct points exceeds the hull bound {MAX_POINTS}")
    unique = tuple(unique)

    d, coords = _affine_coordinates(unique)
    full = frozenset(range(len(unique)))
    if d == 0:
        return Hull(pts, unique, tuple(to_unique), 0, (0,), (), (full,))

    facets = _enumerate_facets(coords, d)
    faces = set(facets)
    frontier = set(facets)
    while frontier:
        fresh = set()
        for f in frontier:
            for g in facets:
                h = f & g
                if h and h not in faces:
                    fresh.add(h)
        faces |= fresh
        frontier = fresh
    faces.add(full)
    faces = tuple(sorted(faces, key=_face_sort_key))
    extreme = _extreme_indices(coords)
    return Hull(pts, unique, tuple(to_unique), d, extreme,
                tuple(sorted(facets, key=_face_sort_key)), faces)


def hrep_vertices(a_ub, b_ub, a_eq=None, b_eq=None):
    """Vertices of the polytope {x : a_ub x <= b_ub, a_eq x = b_eq}.

    Exact basis enumeration: every vertex is the unique solution of the
    equality rows plus some choice of active inequality rows.  The input
    is assumed bounded; unbounded directions are silently ignored.
    """
    a_ub = [_fraction_point(r) for r in a_ub]
    b_ub = [Fraction(v) for v in b_ub]
    a_eq = [_fraction_point(r) for r in (a_eq or [])]
    b_eq = [Fraction(v) for v in (b_eq or [])]
    if not a_ub and not a_eq:
        raise PreconditionError("no constraints given")
    n = len(a_ub[0]) if a_ub else len(a_eq[0])
    need = n - len(a_eq)
    if need < 0:
        raise PreconditionError("more equality rows than variables")
    vertices = []
    seen = set()
    for chosen in itertools.combinations(range(len(a_ub)), need):
        rows = a_eq + [a_ub[i] for i in chosen]
        rhs = b_eq + [b_ub[i] for i in chosen]
        sol = _rational.solve(rows, rhs)
        if sol is None:
            continue
        if _rational.rank(rows) < n:
            continue
        x = tuple(sol)
        if x in seen:
            continue
        if all(sum(r[t] * x[t] for t in range(n)) <= bv
               for r, bv in zip(a_ub, b_ub)):
            seen.add(x)
            vertices.append(x)
    return tuple(sorted(vertices))
