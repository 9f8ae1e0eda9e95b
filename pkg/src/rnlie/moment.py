"""Moment values of brackets and the combinatorics of their weight hulls.

The central object is the trace-normalized symmetric matrix m(mu)
pairing the infinitesimal basis-change action against the bracket
itself.  Its diagonal part is an exact convex combination of the
weight matrices F_ij^k, which is what ties curvature questions to the
small polytopes computed here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ._hull import Hull, exact_hull
from .brackets import Bracket, BasisChange, act
from .derivations import Derivation, diagonal_torus, is_derivation
from .errors import NumericalError, PreconditionError
from .rng import default_seed, generator

DIAG_POSITIVE = "DiagPositive"
TORUS_CENTRALIZER = "TorusCentralizer"
DERIVATION_CENTRALIZER = "DerivationCentralizer"
GROUP_TAGS = (DIAG_POSITIVE, TORUS_CENTRALIZER, DERIVATION_CENTRALIZER)

MAX_HULL_DIM = 8


@dataclass(frozen=True, eq=False)
class MomentValue:
    """Symmetric matrix with trace -1; `exact` carries Fraction rows when
    the input bracket was rational."""

    matrix: np.ndarray
    exact: tuple = None

    def __post_init__(self):
        m = self.matrix
        if np.abs(m - m.T).max() > 1e-10:
            raise NumericalError("moment value lost symmetry")
        if abs(np.trace(m) + 1.0) > 1e-10:
            raise NumericalError(f"moment value trace {np.trace(m):.3e} is not -1")

    @property
    def diagonal(self) -> np.ndarray:
        return np.diag(self.matrix).copy()

    def offdiagonal_max(self) -> float:
        off = self.matrix - np.diag(np.diag(self.matrix))
        return float(np.abs(off).max()) if off.size else 0.0


def _moment_exact(b: Bracket):
    full = {}
    for (i, j, k), c in b.constants.items():
        full[(i, j, k)] = Fraction(c)
        full[(j, i, k)] = -Fraction(c)
    norm = sum(c * c for c in full.values())
    n = b.dim
    tgt = [[Fraction(0)] * n for _ in range(n)]
    src = [[Fraction(0)] * n for _ in range(n)]
    by_pair, by_tail = {}, {}
    for (i, j, k), c in full.items():
        by_pair.setdefault((i, j), []).append((k, c))
        by_tail.setdefault((j, k), []).append((i, c))
    for lst in by_pair.values():
        for k1, c1 in lst:
            for k2, c2 in lst:
                tgt[k1][k2] += c1 * c2
    for lst in by_tail.values():
        for a1, c1 in lst:
            for a2, c2 in lst:
                src[a1][a2] += c1 * c2
    return tuple(tuple((tgt[r][s] - 2 * src[r][s]) / norm for s in range(n))
                 for r in range(n))


def moment_map(b: Bracket) -> MomentValue:
    """Moment value of a nonzero bracket.

    Defined by <m(mu), E> = <E . mu, mu> / |mu|^2 over symmetric E,
    where E acts as the infinitesimal basis change.  Contracting out
    the action gives m = (T - 2 S) / |mu|^2 with T the target-target
    and S the source-source gram matrix of the structure constants;
    equivalently m = 4 Ric / |mu|^2.
    """
    if b.is_zero():
        raise PreconditionError("moment value of the zero bracket is undefined")
    if b.is_rational:
        exact = _moment_exact(b)
        mat = np.array([[float(x) for x in row] for row in exact])
        return MomentValue(mat, exact)
    C = b.tensor()
    norm = float(np.einsum("ijk,ijk->", C, C))
    tgt = np.einsum("ija,ijb->ab", C, C)
    src = np.einsum("ajk,bjk->ab", C, C)
    return MomentValue((tgt - 2.0 * src) / norm)


def weight_vector(triple, dim):
    """Diagonal of F_ij^k as a tuple of ints: -1 at i and j, +1 at k."""
    i, j, k = triple
    v = [0] * dim
    v[i] -= 1
    v[j] -= 1
    v[k] += 1
    return tuple(v)


def weight_matrix(triple, dim) -> np.ndarray:
    return np.diag(np.array(weight_vector(triple, dim), dtype=float))


def weight_coordinates(b: Bracket):
    """Convex coefficients putting diag(m(mu)) at sum_a coeff_a F_a.

    The identity diag(m(mu)) = sum over triples of (2 c^2 / |mu|^2) F
    holds for every nonzero bracket; the returned dict maps each triple
    to its coefficient (Fractions when the bracket is rational).
    """
    if b.is_zero():
        raise PreconditionError("zero bracket has no weight coordinates")
    if b.is_rational:
        norm = 2 * sum(c * c for c in b.constants.values())
        return {t: 2 * c * c / norm for t, c in sorted(b.constants.items())}
    norm = 2.0 * sum(float(c) ** 2 for c in b.constants.values())
    return {t: 2.0 * float(c) ** 2 / norm for t, c in sorted(b.constants.items())}


@dataclass(frozen=True, eq=False)
class WeightPolytope:
    """Hull of the weight matrices of the nonzero structure constants.

    `triples` lists every weight triple, `vertices` the triples whose
    weight matrix is an extreme point, and `hull_faces` every nonempty
    face as a sorted tuple of triples (full face last).
    """

    ambient_dim: int
    triples: tuple
    vertices: tuple
    hull_faces: tuple
    hull: Hull

    @property
    def dim(self) -> int:
        return self.hull.dim

    def vertex_matrices(self):
        return [(t, weight_matrix(t, self.ambient_dim)) for t in self.vertices]

    def face_count(self) -> int:
        return len(self.hull_faces)


def weight_polytope(b: Bracket) -> WeightPolytope:
    if b.is_zero():
        raise PreconditionError("zero bracket has no weight polytope")
    if b.dim > MAX_HULL_DIM:
        raise PreconditionError(
            f"dimension {b.dim} exceeds the hull bound {MAX_HULL_DIM}")
    triples = tuple(sorted(b.constants))
    points = [weight_vector(t, b.dim) for t in triples]
    hull = exact_hull(points)
    extreme = set(hull.extreme)
    vertices = tuple(t for t, u in zip(triples, hull.to_unique) if u in extreme)
    faces = []
    for face in hull.faces:
        faces.append(tuple(t for t, u in zip(triples, hull.to_unique) if u in face))
    return WeightPolytope(b.dim, triples, vertices, tuple(faces), hull)


@dataclass(frozen=True)
class NiceBasisReport:
    ok: bool
    # pairs (i, j) whose bracket hits more than one basis direction
    multiple_targets: tuple
    # ((i1, j1), (i2, j2), k): distinct pairs sharing target k and an index
    overlapping_pairs: tuple


def nice_basis_check(b: Bracket) -> NiceBasisReport:
    """True iff each bracket hits one direction and pairs sharing a
    target are disjoint."""
    by_pair, by_target = {}, {}
    for (i, j, k) in sorted(b.constants):
        by_pair.setdefault((i, j), []).append(k)
        by_target.setdefault(k, []).append((i, j))
    multi = tuple((pair, tuple(ks)) for pair, ks in sorted(by_pair.items())
                  if len(ks) > 1)
    overlap = []
    for k, pairs in sorted(by_target.items()):
        for a in range(len(pairs)):
            for c in range(a + 1, len(pairs)):
                p, q = pairs[a], pairs[c]
                if set(p) & set(q):
                    overlap.append((p, q, k))
    return NiceBasisReport(not multi and not overlap, multi, tuple(overlap))


@dataclass(frozen=True, eq=False)
class OrbitSample:
    """Group elements paired with the moment values of the acted bracket.

    Every stored element has been driven onto the part of the orbit
    where the moment value is diagonal (up to 1e-10), so the diagonal
    projections are faithful points of the diagonal image.
    """

    group_tag: str
    points: tuple
    seed: int

    def verify(self, b: Bracket, tol: float = 1e-10):
        bf = b
        for g, mv in self.points:
            again = moment_map(act(BasisChange(g), bf))
            if np.abs(again.matrix - mv.matrix).max() > tol:
                raise NumericalError("stored moment value does not recompute")

    def diagonals(self) -> np.ndarray:
        return np.array([np.diag(mv.matrix) for _, mv in self.points])


def _group_blocks(tag, b, derivation=None):
    n = b.dim
    if tag == DIAG_POSITIVE:
        return [(i,) for i in range(n)]
    if tag == TORUS_CENTRALIZER:
        torus = diagonal_torus(b)
        return [tuple(indices) for _, indices in torus.weights]
    if tag == DERIVATION_CENTRALIZER:
        if derivation is None:
            raise PreconditionError(
                "DerivationCentralizer sampling needs the derivation")
        D = derivation.matrix if isinstance(derivation, Derivation) else derivation
        D = np.asarray(D, dtype=float)
        if not is_derivation(D, b):
            raise PreconditionError("centralizer base point is not a derivation")
        diag = np.diag(D)
        scale = max(1.0, float(np.abs(diag).max()))
        off = D - np.diag(diag)
        if off.size and np.abs(off).max() > 1e-9 * scale:
            raise PreconditionError(
                "block structure requires a diagonal derivation in this basis")
        blocks, reps = [], []
        for i in range(n):
            placed = False
            for bi, r in enumerate(reps):
                if abs(diag[i] - r) <= 1e-9 * scale:
                    blocks[bi] = blocks[bi] + (i,)
                    placed = True
                    break
            if not placed:
                reps.append(diag[i])
                blocks.append((i,))
        return blocks
    raise PreconditionError(f"unknown group tag {tag!r}")


def _draw_block_element(rng, blocks, n):
    for _ in range(64):
        g = np.zeros((n, n))
        for blk in blocks:
            k = len(blk)
            sub = rng.standard_normal((k, k))
            for t in range(k):
                sub[t, t] = math.exp(rng.uniform(-6.0, 6.0))
            g[np.ix_(blk, blk)] = sub
        if np.linalg.cond(g) < 1e8:
            return g
    raise NumericalError("could not draw a well-conditioned group element")


def _acted_moment_matrix(C, g):
    """Moment matrix of the transformed structure tensor, all dense."""
    gi = np.linalg.inv(g)
    Cp = np.einsum("pi,qj,kr,pqr->ijk", gi, gi, g, C)
    norm = float(np.einsum("ijk,ijk->", Cp, Cp))
    tgt = np.einsum("ija,ijb->ab", Cp, Cp)
    src = np.einsum("ajk,bjk->ab", Cp, Cp)
    return (tgt - 2.0 * src) / norm


def _steer_to_diagonal(b, g0, blocks, rng, attempts=3, tol=1e-11):
    """Move g0 within its group until the acted moment value is diagonal.

    Solves for the off-diagonal moment entries as a least-squares zero
    over exp(A) with A in the group's Lie algebra (block matrices);
    returns the steered element, or None when no attempt lands on the
    diagonal slice, in which case the caller redraws.
    """
    from scipy.linalg import expm
    from scipy.optimize import least_squares

    n = b.dim
    C = b.tensor()
    iu = np.triu_indices(n, 1)
    slots = [(blk, len(blk)) for blk in blocks]
    size = sum(k * k for _, k in slots)

    def unpack(x):
        A = np.zeros((n, n))
        pos = 0
        for blk, k in slots:
            A[np.ix_(blk, blk)] = np.asarray(x[pos:pos + k * k]).reshape(k, k)
            pos += k * k
        return A

    def element(x):
        return expm(unpack(x)) @ g0

    def resid(x):
        return _acted_moment_matrix(C, element(x))[iu]

    if np.abs(resid(np.zeros(size))).max() <= tol:
        return g0
    for attempt in range(attempts):
        x0 = np.zeros(size) if attempt == 0 else 0.3 * rng.standard_normal(size)
        with np.errstate(invalid="ignore", divide="ignore"):
            res = least_squares(resid, x0, xtol=3e-16, ftol=3e-16, gtol=None,
                                max_nfev=300)
        if np.abs(resid(res.x)).max() <= tol:
            return element(res.x)
    return None


_TAG_STREAM = {DIAG_POSITIVE: 11, TORUS_CENTRALIZER: 12, DERIVATION_CENTRALIZER: 13}


def orbit_sample(tag, b: Bracket, count: int = 32, seed=None,
                 derivation=None) -> OrbitSample:
    """Sample `count` group elements and the moment values they induce.

    Diagonal entries are log-uniform in [e^-6, e^6], off-diagonal block
    entries standard normal, near-singular draws rejected.  Each draw
    is then steered inside the group onto the locus where the acted
    moment value is diagonal; draws that cannot be steered there (sign
    obstructions, roughly half the block draws on some inputs) are
    discarded and redrawn, so the emitted diagonal projections are
    genuine points of the diagonal image of the orbit.
    """
    if tag not in GROUP_TAGS:
        raise PreconditionError(f"unknown group tag {tag!r}; "
                                f"expected one of {GROUP_TAGS}")
    if count < 1:
        raise PreconditionError("count must be positive")
    blocks = _group_blocks(tag, b, derivation)
    seed = default_seed() if seed is None else int(seed)
    rng = generator(seed, _TAG_STREAM[tag])
    n = b.dim
    points = []
    budget = 80 * count
    while len(points) < count:
        budget -= 1
        if budget < 0:
            raise NumericalError(
                "steering onto the diagonal moment slice kept failing; "
                "the orbit may have no diagonal moment values")
        g0 = _draw_block_element(rng, blocks, n)
        g = _steer_to_diagonal(b, g0, blocks, rng)
        if g is None:
            continue
        mv = moment_map(act(BasisChange(g), b))
        points.append((g, mv))
    sample = OrbitSample(tag, tuple(points), seed)
    sample.verify(b)
    return sample


def sample_coordinates(b: Bracket, sample: OrbitSample):
    """Hull coordinates of each sampled point over the base weight triples.

    Returns (triples, rows) where rows has one column per base triple
    plus a trailing residual column for coordinate mass sitting on
    triples outside the base support (zero when the group action
    preserves the support).
    """
    triples = tuple(sorted(b.constants))
    rows = []
    for g, _ in sample.points:
        bb = act(BasisChange(g), b)
        coords = weight_coordinates(bb)
        row = [float(coords.pop(t, 0.0)) for t in triples]
        row.append(float(sum(coords.values())))
        rows.append(row)
    return triples, np.array(rows)


@dataclass(frozen=True)
class DiagImageReport:
    contained: bool
    worst_margin: float
    worst_index: int
    equality_claimed: bool
    vertex_coverage: tuple  # ((vertex diagonal as int tuple, best distance), ...)
    covered: bool


def _containment_deficit(diag_vec, vertex_points):
    from scipy.optimize import linprog

    V = len(vertex_points)
    n = len(diag_vec)
    c = [0.0] * V + [1.0]
    a_ub, b_ub = [], []
    for r in range(n):
        row = [float(p[r]) for p in vertex_points]
        a_ub.append(row + [-1.0])
        b_ub.append(float(diag_vec[r]))
        a_ub.append([-v for v in row] + [-1.0])
        b_ub.append(-float(diag_vec[r]))
    a_eq = [[1.0] * V + [0.0]]
    res = linprog(c, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=[1.0],
                  bounds=[(0.0, None)] * V + [(None, None)], method="highs")
    if not res.success:
        raise NumericalError("containment probe did not solve")
    return float(res.fun)


def _vertex_exponent(poly: WeightPolytope, v_unique: int):
    """Exact diagonal exponent whose weight pairing is maximized only
    at the given hull vertex."""
    from ._exactlp import solve_lp

    pts = poly.hull.unique
    n = poly.ambient_dim
    pv = pts[v_unique]
    if len(pts) == 1:
        return [Fraction(0)] * n
    a_ub, b_ub = [], []
    for u, pu in enumerate(pts):
        if u == v_unique:
            continue
        a_ub.append([pu[t] - pv[t] for t in range(n)] + [Fraction(1)])
        b_ub.append(Fraction(0))
    for t in range(n):
        row = [Fraction(0)] * (n + 1)
        row[t] = Fraction(1)
        a_ub.append(list(row))
        b_ub.append(Fraction(1))
        row2 = [Fraction(0)] * (n + 1)
        row2[t] = Fraction(-1)
        a_ub.append(row2)
        b_ub.append(Fraction(1))
    c = [Fraction(0)] * n + [Fraction(1)]
    res = solve_lp(c, a_ub=a_ub, b_ub=b_ub)
    if res.status != "optimal" or res.objective <= 0:
        raise NumericalError("hull vertex admits no separating exponent")
    return res.x[:n]


def _steered_vertex_distance(b: Bracket, poly: WeightPolytope, v_unique: int,
                             target: float = 1e-3):
    """Best distance to the vertex moment matrix along the separating
    diagonal curve; constants are rescaled in log space so the sweep
    never overflows."""
    a = _vertex_exponent(poly, v_unique)
    triples = poly.triples
    exps = []
    for (i, j, k) in triples:
        exps.append(float(a[k] - a[i] - a[j]))
    F_v = np.diag(np.array([float(x) for x in poly.hull.unique[v_unique]]))
    best = math.inf
    for p in range(0, 241, 16):
        shift = max(e * p for e in exps)
        consts = {}
        for t, e in zip(triples, exps):
            w = float(b.constants[t]) * 2.0 ** (e * p - shift)
            if abs(w) > 1e-300:
                consts[t] = w
        mv = moment_map(Bracket(b.dim, consts, "float"))
        dist = float(np.abs(mv.matrix - F_v).max())
        best = min(best, dist)
        if best <= 0.5 * target:
            break
    return best


def diag_image_check(b: Bracket, sample: OrbitSample,
                     margin_tol: float = 1e-9,
                     coverage_tol: float = 1e-3) -> DiagImageReport:
    """Check sampled diagonal moment values against the weight hull.

    Containment: every sampled diagonal lies in the hull up to
    `margin_tol` (linear programming probe per point).  Coverage: each
    hull vertex is approached within `coverage_tol` by a deterministic
    diagonal curve that scales the dominating weight up.  Containment
    failure raises with the worst point; the equality claim (image
    fills the hull) is only made when the basis is nice.
    """
    poly = weight_polytope(b)
    vertex_points = [poly.hull.unique[u] for u in poly.hull.extreme]
    worst, worst_idx = 0.0, -1
    for idx, (_, mv) in enumerate(sample.points):
        t = _containment_deficit(np.diag(mv.matrix), vertex_points)
        if t > worst:
            worst, worst_idx = t, idx
    if worst > margin_tol:
        raise NumericalError(
            f"sampled point #{worst_idx} leaves the weight hull by {worst:.3e}")
    coverage = []
    for u in poly.hull.extreme:
        dist = _steered_vertex_distance(b, poly, u, coverage_tol)
        key = tuple(int(x) for x in poly.hull.unique[u])
        coverage.append((key, dist))
    covered = all(d <= coverage_tol for _, d in coverage)
    return DiagImageReport(True, worst, worst_idx,
                           nice_basis_check(b).ok, tuple(coverage), covered)


@dataclass(frozen=True, eq=False)
class ClosureFace:
    triples: tuple
    bracket: Bracket


def closure_faces(b: Bracket, require_nice: bool = True):
    """Degenerate brackets lambda_J, one per face of the weight hull.

    Each face contributes the restriction of the constants to the
    triples lying on it; the count equals the face count.  With a nice
    basis these restrictions are exactly the brackets reachable in the
    closure of the diagonal orbit; without one that reading is not
    guaranteed, so non-nice input is rejected unless `require_nice` is
    switched off.
    """
    report = nice_basis_check(b)
    if require_nice and not report.ok:
        raise PreconditionError(
            "closure faces are only certified for nice bases; "
            f"violations: {report.multiple_targets + report.overlapping_pairs}; "
            "pass require_nice=False for the bare combinatorial restriction")
    poly = weight_polytope(b)
    return tuple(ClosureFace(face, b.restricted(face))
                 for face in poly.hull_faces)
