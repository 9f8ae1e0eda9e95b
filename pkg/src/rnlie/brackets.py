"""Antisymmetric bracket tensors on R^n and the basis-change action.

A bracket is stored sparsely through its structure constants c_ij^k for
i < j, so that mu(e_i, e_j) = sum_k c_ij^k e_k with respect to the fixed
orthonormal basis e_1, ..., e_n.  Constants are either exact rationals
(Fraction) or floats; most structural operations have an exact path when
the constants are rational.

The inner product on the space of brackets sums over ordered index pairs,
so a single basis bracket mu_ijk = (e^i wedge e^j) otimes e_k has squared
norm 2.  This normalization is what makes the Ricci formula in the
curvature module reproduce the classical Heisenberg spectrum.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import _rational
from .errors import PreconditionError

RATIONAL = "rational"
FLOAT = "float"


def _canon_key(i, j, k):
    if i == j:
        raise PreconditionError(f"bracket pair ({i}, {i}) is degenerate")
    if i < j:
        return (i, j, k), 1
    return (j, i, k), -1


@dataclass(frozen=True)
class Bracket:
    """Sparse antisymmetric bracket on R^dim with 0-based indices.

    constants maps (i, j, k) with i < j to a nonzero scalar.  Use
    scalar_kind = "rational" for Fraction constants and "float" for
    floats; mixed dicts are normalized on construction.
    """

    dim: int
    constants: dict = field(default_factory=dict)
    scalar_kind: str = RATIONAL

    def __post_init__(self):
        if self.scalar_kind not in (RATIONAL, FLOAT):
            raise PreconditionError(f"unknown scalar kind {self.scalar_kind!r}")
        clean = {}
        for (i, j, k), c in self.constants.items():
            if not (0 <= i < self.dim and 0 <= j < self.dim and 0 <= k < self.dim):
                raise PreconditionError(f"index out of range in triple {(i, j, k)}")
            if i >= j:
                raise PreconditionError(f"constants must be keyed with i < j, got {(i, j, k)}")
            if self.scalar_kind == RATIONAL:
                c = Fraction(c)
            else:
                c = float(c)
            if c != 0:
                clean[(i, j, k)] = c
        object.__setattr__(self, "constants", clean)

    # -- basic views ---------------------------------------------------

    def tensor(self) -> np.ndarray:
        """Full antisymmetric (n, n, n) float tensor C[i, j, k]."""
        C = np.zeros((self.dim, self.dim, self.dim))
        for (i, j, k), c in self.constants.items():
            C[i, j, k] = float(c)
            C[j, i, k] = -float(c)
        return C

    def norm_sq(self):
        """|mu|^2 with the ordered-pair convention (each i < j entry counts twice)."""
        if self.scalar_kind == RATIONAL:
            return 2 * sum(c * c for c in self.constants.values())
        return 2.0 * sum(float(c) ** 2 for c in self.constants.values())

    def is_zero(self) -> bool:
        return not self.constants

    @property
    def is_rational(self) -> bool:
        return self.scalar_kind == RATIONAL

    def triples(self):
        return sorted(self.constants)

    def ad(self, i: int) -> np.ndarray:
        """Matrix of ad(e_i) = [e_i, .] acting on R^dim."""
        C = self.tensor()
        return C[i].T.copy()

    def apply(self, x, y):
        """mu(x, y) for float coordinate vectors x, y."""
        C = self.tensor()
        return np.einsum("i,j,ijk->k", np.asarray(x, float), np.asarray(y, float), C)

    def to_float(self) -> "Bracket":
        if self.scalar_kind == FLOAT:
            return self
        return Bracket(self.dim, {t: float(c) for t, c in self.constants.items()}, FLOAT)

    def scaled(self, s) -> "Bracket":
        if self.scalar_kind == RATIONAL and isinstance(s, (int, Fraction)):
            return Bracket(self.dim, {t: c * s for t, c in self.constants.items()}, RATIONAL)
        return Bracket(self.dim, {t: float(c) * float(s) for t, c in self.constants.items()}, FLOAT)

    def restricted(self, triples) -> "Bracket":
        """Sub-bracket keeping only the given (i, j, k) triples."""
        keep = set(triples)
        return Bracket(self.dim, {t: c for t, c in self.constants.items() if t in keep},
                       self.scalar_kind)

    def __repr__(self):
        parts = ", ".join(f"[e{i + 1},e{j + 1}]->e{k + 1}:{c}"
                          for (i, j, k), c in sorted(self.constants.items()))
        return f"Bracket(dim={self.dim}, {parts or 'abelian'})"


@dataclass(frozen=True)
class BasisChange:
    """Invertible matrix h acting on brackets by h . mu = h mu(h^-1 ., h^-1 .)."""

    matrix: object  # ndarray, or list of list of Fraction for the exact path

    def as_array(self) -> np.ndarray:
        if isinstance(self.matrix, np.ndarray):
            return self.matrix
        return np.array([[float(x) for x in row] for row in self.matrix])

    @property
    def is_rational(self) -> bool:
        return not isinstance(self.matrix, np.ndarray)

    @staticmethod
    def diagonal(entries) -> "BasisChange":
        entries = list(entries)
        if all(isinstance(e, (int, Fraction)) for e in entries):
            n = len(entries)
            return BasisChange([[Fraction(entries[i]) if i == j else Fraction(0)
                                 for j in range(n)] for i in range(n)])
        return BasisChange(np.diag([float(e) for e in entries]))


def act(h: BasisChange, b: Bracket) -> Bracket:
    """Basis-change action (h . mu)(x, y) = h mu(h^-1 x, h^-1 y).

    This is a left action: act(h1 @ h2, mu) = act(h1, act(h2, mu)).
    Rational h on a rational bracket stays exact.
    """
    if not isinstance(h, BasisChange):
        h = BasisChange(h)
    if b.is_rational and h.is_rational:
        hinv = _rational.inverse(h.matrix)
        if hinv is None:
            raise PreconditionError("basis change matrix is singular")
        n = b.dim
        hm = h.matrix
        new = {}
        for (p, q, r), c in b.constants.items():
            for i in range(n):
                hpi = hinv[p][i]
                hqi_neg = hinv[q][i]
                for j in range(i + 1, n):
                    # antisymmetrized pullback of the (p, q) slot
                    w = c * (hpi * hinv[q][j] - hqi_neg * hinv[p][j])
                    if w == 0:
                        continue
                    for k in range(n):
                        if hm[k][r] != 0:
                            key = (i, j, k)
                            new[key] = new.get(key, Fraction(0)) + w * hm[k][r]
        return Bracket(b.dim, {t: c for t, c in new.items() if c != 0}, RATIONAL)

    H = h.as_array().astype(float)
    Hinv = np.linalg.inv(H)
    C = b.tensor()
    Cp = np.einsum("pi,qj,kr,pqr->ijk", Hinv, Hinv, H, C)
    new = {}
    n = b.dim
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(n):
                v = Cp[i, j, k]
                if abs(v) > 1e-14 * max(1.0, np.abs(Cp).max()):
                    new[(i, j, k)] = float(v)
    return Bracket(b.dim, new, FLOAT)


def jacobiator(b: Bracket, i: int, j: int, k: int):
    """Cyclic sum [[e_i,e_j],e_k] + [[e_j,e_k],e_i] + [[e_k,e_i],e_j].

    Returns a coordinate vector (Fractions in rational mode, floats otherwise).
    """
    n = b.dim
    if b.is_rational:
        get = b.constants.get

        def mu(a, bb):
            if a == bb:
                return {}
            (p, q, _), _s = _canon_key(a, bb, 0)
            sign = 1 if a < bb else -1
            out = {}
            for (pi, qi, r), c in b.constants.items():
                if pi == p and qi == q:
                    out[r] = sign * c
            return out

        total = [Fraction(0)] * n
        for (a, bb, cc) in ((i, j, k), (j, k, i), (k, i, j)):
            inner = mu(a, bb)
            for r, c in inner.items():
                outer = mu(r, cc)
                for s, c2 in outer.items():
                    total[s] += c * c2
        return total
    C = b.tensor()
    ei = np.eye(n)
    total = np.zeros(n)
    for (a, bb, cc) in ((i, j, k), (j, k, i), (k, i, j)):
        inner = np.einsum("i,j,ijk->k", ei[a], ei[bb], C)
        total += np.einsum("i,j,ijk->k", inner, ei[cc], C)
    return total


def validate_jacobi(b: Bracket):
    """Largest Jacobi residual over basis triples.

    Exact Fraction in rational mode (0 means a genuine Lie bracket);
    float max norm otherwise.  The residual on a triple is the Euclidean
    norm of the cyclic sum, except in rational mode where the max |entry|
    is used so the result stays rational.
    """
    n = b.dim
    worst = Fraction(0) if b.is_rational else 0.0
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                res = jacobiator(b, i, j, k)
                if b.is_rational:
                    m = max((abs(x) for x in res), default=Fraction(0))
                else:
                    m = float(np.linalg.norm(res))
                if m > worst:
                    worst = m
    return worst


def is_lie(b: Bracket, tol: float = 1e-9) -> bool:
    """Jacobi check; float tolerance is relative to max |c|^2."""
    r = validate_jacobi(b)
    if b.is_rational:
        return r == 0
    cmax = max((abs(float(c)) for c in b.constants.values()), default=0.0)
    return float(r) <= tol * max(1.0, cmax * cmax)


def _require_lie(b: Bracket):
    if not is_lie(b):
        raise PreconditionError("input does not satisfy the Jacobi identity")


def _span_rows_rational(vectors):
    """Row-reduce a list of Fraction coordinate vectors, dropping zero rows."""
    red, pivots = _rational.rref(vectors)
    return red[: len(pivots)]


def lower_central_series(b: Bracket):
    """Dimensions [dim g^0, dim g^1, ...] of g^0 = g, g^{i+1} = [g, g^i].

    The list ends with a 0 exactly when the bracket is nilpotent;
    otherwise it ends at the stabilized dimension.  Non-Lie input is
    rejected.
    """
    _require_lie(b)
    n = b.dim
    if b.is_rational:
        current = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
        dims = [n]
        while True:
            products = []
            for vec in current:
                for i in range(n):
                    # [e_i, vec]
                    out = [Fraction(0)] * n
                    for (p, q, r), c in b.constants.items():
                        if p == i:
                            out[r] += c * vec[q]
                        elif q == i:
                            out[r] -= c * vec[p]
                    if any(x != 0 for x in out):
                        products.append(out)
            nxt = _span_rows_rational(products) if products else []
            d = len(nxt)
            dims.append(d)
            if d == 0 or d == dims[-2]:
                return dims
            current = nxt
    C = b.tensor()
    current = np.eye(n)
    dims = [n]
    while True:
        prods = np.einsum("ijk,aj->iak", C, current).reshape(-1, n)
        if prods.size == 0:
            dims.append(0)
            return dims
        sv = np.linalg.svd(prods, compute_uv=False)
        tol = max(prods.shape) * (sv[0] if sv.size else 0.0) * 1e-12
        d = int((sv > tol).sum())
        dims.append(d)
        if d == 0 or d == dims[-2]:
            return dims
        # orthonormal basis of the row space
        _u, _s, vt = np.linalg.svd(prods)
        current = vt[:d]


def nilpotency_step(b: Bracket):
    """Number of nonzero terms in the lower central series past g itself.

    Returns None when the bracket is not nilpotent.
    """
    dims = lower_central_series(b)
    if dims[-1] != 0:
        return None
    return len(dims) - 1


def center(b: Bracket) -> np.ndarray:
    """Orthonormal basis (columns) of the center {x : [x, .] = 0}.

    The kernel is computed exactly for rational constants and then
    orthonormalized in floats.
    """
    n = b.dim
    if b.is_rational:
        rows = []
        for j in range(n):
            for k in range(n):
                row = [Fraction(0)] * n
                nontrivial = False
                for (p, q, r), c in b.constants.items():
                    if r != k:
                        continue
                    if q == j:
                        row[p] += c
                        nontrivial = True
                    if p == j:
                        row[q] -= c
                        nontrivial = True
                if nontrivial:
                    rows.append(row)
        if not rows:
            return np.eye(n)
        basis = _rational.nullspace(rows, ncols=n)
        if not basis:
            return np.zeros((n, 0))
        M = np.array([[float(x) for x in vec] for vec in basis]).T
    else:
        C = b.tensor()
        A = C.transpose(1, 2, 0).reshape(-1, n)  # rows (j, k), columns i
        from scipy.linalg import null_space

        M = null_space(A)
        if M.size == 0:
            return np.zeros((n, 0))
    # orthonormalize columns
    q, _ = np.linalg.qr(M)
    return q[:, : M.shape[1]]


def direct_sum(a: Bracket, b: Bracket) -> Bracket:
    """Direct sum of two brackets, second summand shifted past the first."""
    kind = RATIONAL if (a.is_rational and b.is_rational) else FLOAT
    consts = {}
    for (i, j, k), c in a.constants.items():
        consts[(i, j, k)] = c if kind == RATIONAL else float(c)
    off = a.dim
    for (i, j, k), c in b.constants.items():
        consts[(i + off, j + off, k + off)] = c if kind == RATIONAL else float(c)
    return Bracket(a.dim + b.dim, consts, kind)
