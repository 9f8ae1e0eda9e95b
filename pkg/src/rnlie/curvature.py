"""Curvature of nilpotent metric Lie algebras and their rank-one
solvable extensions.

Two independent computations are kept side by side: closed-form Ricci
blocks of the extension, and a Koszul-formula oracle that evaluates the
full curvature tensor of any left-invariant metric from structure
constants alone.  The oracle is authoritative whenever they are
assembled together; the blocks must agree with it and the test suite
pins that agreement.

Convention: the basis is orthonormal and squared norms sum over ordered
index pairs, so a single basis bracket e_i ^ e_j -> e_k has squared norm
2.  This normalization makes the nilpotent Ricci operator equal
(|mu|^2/4) times the trace-normalized moment value.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .brackets import BasisChange, Bracket, act
from .derivations import Derivation, is_derivation, leibniz_residual
from .errors import NumericalError, PreconditionError


def sym_part(D: np.ndarray) -> np.ndarray:
    return 0.5 * (D + D.T)


def ricci_nilpotent(b: Bracket) -> np.ndarray:
    """Ricci operator of the nilpotent metric Lie algebra (orthonormal basis).

    Ric = -1/2 sum_ik C[a,i,k]C[b,i,k] + 1/4 sum_ij C[i,j,a]C[i,j,b].
    Returns the zero matrix for the zero bracket (flat).
    """
    C = b.tensor()
    if not b.constants:
        return np.zeros((b.dim, b.dim))
    r1 = -0.5 * np.einsum("aik,bik->ab", C, C)
    r2 = 0.25 * np.einsum("ija,ijb->ab", C, C)
    return r1 + r2


def extension_bracket(D, b: Bracket, t: float = 1.0) -> Bracket:
    """Rank-one extension bracket on dim n+1 with the new generator at
    index 0 acting on the nilpotent part as t*D."""
    n = b.dim
    rational = b.is_rational and _is_rational_matrix(D) and _is_exact(t)
    src = D.matrix if isinstance(D, Derivation) else D
    constants: dict = {}
    for (i, j, k), c in b.constants.items():
        constants[(i + 1, j + 1, k + 1)] = c if rational else float(c)
    for i in range(n):
        for j in range(n):
            v = _entry(src, j, i)
            if v == 0:
                continue
            if rational:
                constants[(0, i + 1, j + 1)] = Fraction(v) * Fraction(t)
            else:
                constants[(0, i + 1, j + 1)] = float(v) * float(t)
    return Bracket(n + 1, constants, scalar_kind="rational" if rational else "float")


def _is_rational_matrix(D) -> bool:
    if isinstance(D, Derivation):
        return False
    if isinstance(D, (list, tuple)):
        return all(isinstance(x, (int, Fraction)) for row in D for x in row)
    return False


def _is_exact(t) -> bool:
    return isinstance(t, (int, Fraction))


def _entry(src, i, j):
    if isinstance(src, (list, tuple)):
        return src[i][j]
    return src[i, j]


@dataclass(frozen=True)
class MetricParams:
    """Parameters (c, X, h) of an inner product on a rank-one extension.

    Encodes the block lower-triangular frame change with c on the
    extension direction, shear X into the nilpotent part, and h on the
    nilpotent part; every positive-definite inner product arises this
    way with c > 0.
    """

    c: float
    X: np.ndarray
    h: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "X", np.asarray(self.X, float))
        object.__setattr__(self, "h", np.asarray(self.h, float))
        if self.c == 0:
            raise PreconditionError("scale c must be nonzero")
        n = self.h.shape[0]
        if self.h.shape != (n, n) or self.X.shape != (n,):
            raise PreconditionError("inconsistent metric parameter shapes")
        if abs(np.linalg.det(self.h)) < 1e-300:
            raise PreconditionError("h is singular")

    @staticmethod
    def identity(n: int) -> "MetricParams":
        return MetricParams(1.0, np.zeros(n), np.eye(n))

    def frame_matrix(self) -> np.ndarray:
        """Columns are the frame of the extension (index 0 first) that the
        encoded inner product declares orthonormal: c(f - h^{-1}X) and the
        columns of h^{-1}; transport_metric rewrites the pair in exactly
        this frame."""
        n = self.h.shape[0]
        hinv = np.linalg.inv(self.h)
        out = np.zeros((n + 1, n + 1))
        out[0, 0] = self.c
        out[1:, 0] = -self.c * (hinv @ self.X)
        out[1:, 1:] = hinv
        return out

    def gram(self) -> np.ndarray:
        """Inner product matrix whose orthonormal frame is frame_matrix."""
        F = self.frame_matrix()
        Finv = np.linalg.inv(F)
        return Finv.T @ Finv


def transport_metric(p: MetricParams, D, b: Bracket):
    """Isometric normal form of the pair (D, b) under the metric p.

    Returns (c*h(D - ad(h^{-1}X))h^{-1}, h.b); the assembled Ricci of the
    output pair with the standard metric has the same spectrum as the
    Ricci of (D, b) with the metric p.
    """
    M = D.matrix if isinstance(D, Derivation) else np.asarray(D, float)
    n = b.dim
    if p.h.shape[0] != n:
        raise PreconditionError("metric parameter dimension mismatch")
    hinv = np.linalg.inv(p.h)
    Y = hinv @ p.X
    Dnew = p.c * (p.h @ (M - ad_vector(b, Y)) @ hinv)
    bnew = act(BasisChange(p.h), b)
    return Dnew, bnew


def ad_vector(b: Bracket, Y) -> np.ndarray:
    """Matrix of ad Y on the bracket: (ad Y)Z = [Y, Z]."""
    C = b.tensor()
    Y = np.asarray(Y, float)
    # column j of ad Y is [Y, e_j] = sum_i Y_i C[i,j,:]
    return np.einsum("i,ijk->kj", Y, C)


@dataclass(frozen=True)
class RicciBlock:
    """Ricci operator of a rank-one extension in block form.

    ff is the extension-direction diagonal entry, fn_row the closed-form
    mixed row, nn the nilpotent block, and star the measured correction
    to the mixed row so that assembled() reproduces the curvature
    oracle's Ricci operator exactly.
    """

    ff: float
    fn_row: np.ndarray
    nn: np.ndarray
    star: np.ndarray
    oracle_delta: float

    def assembled(self) -> np.ndarray:
        n = self.nn.shape[0]
        out = np.zeros((n + 1, n + 1))
        out[0, 0] = self.ff
        row = self.fn_row + self.star
        out[0, 1:] = row
        out[1:, 0] = row
        out[1:, 1:] = self.nn
        return out

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.assembled())

    @property
    def lambda_max(self) -> float:
        return float(self.eigenvalues().max())


def ricci_extension(D, b: Bracket) -> RicciBlock:
    """Block Ricci operator of the rank-one extension of b by D.

    Closed forms: ff = -tr S(D)^2; nn = Ric(b) + [D,D^t]/2 - tr(D) S(D);
    fn_row_i = -tr(S(D) ad e_i).  The star block is obtained by
    differencing the mixed row against the curvature oracle, which is
    authoritative; oracle_delta records the worst disagreement of the
    closed-form blocks with the oracle.
    """
    M = D.matrix if isinstance(D, Derivation) else np.asarray(D, float)
    if not is_derivation(M, b):
        raise PreconditionError(
            f"not a derivation, Leibniz residual {leibniz_residual(M, b):.3e}")
    n = b.dim
    S = sym_part(M)
    ff = -float(np.trace(S @ S))
    ric = ricci_nilpotent(b)
    nn = ric + 0.5 * (M @ M.T - M.T @ M) - float(np.trace(M)) * S
    fn = np.array([-float(np.trace(S @ b.ad(i))) for i in range(n)])
    full = extension_bracket(M, b)
    oracle = koszul_oracle(full)
    R = oracle.ricci
    star = R[0, 1:] - fn
    delta = 0.0
    delta = max(delta, abs(R[0, 0] - ff))
    delta = max(delta, float(np.abs(R[1:, 1:] - nn).max()) if n else 0.0)
    delta = max(delta, float(np.abs(R[1:, 0] - (fn + star)).max()) if n else 0.0)
    return RicciBlock(ff, fn, nn, star, float(delta))


@dataclass(frozen=True)
class KoszulReport:
    """Full curvature data of a left-invariant metric from the Koszul formula."""

    riemann: np.ndarray      # R[i,j,k,l] in the orthonormal frame
    sectional: np.ndarray    # sec of the (i,j) frame plane, NaN on the diagonal
    ricci: np.ndarray        # Ricci operator in the ORIGINAL coordinates
    scalar: float
    frame: np.ndarray        # columns are the orthonormal frame used


def koszul_oracle(b: Bracket, metric: np.ndarray | None = None) -> KoszulReport:
    """Curvature of the left-invariant metric defined by `metric` (the
    identity by default) on the Lie algebra of b.

    Works for any Lie bracket, solvable or not.  With a non-identity
    metric the bracket is rewritten in a metric-orthonormal frame via
    Cholesky; the Ricci operator is conjugated back to the original
    coordinates (same spectrum either way).
    """
    n = b.dim
    if metric is None:
        V = np.eye(n)
        bb = b
    else:
        G = np.asarray(metric, float)
        if G.shape != (n, n):
            raise PreconditionError("metric shape mismatch")
        if np.abs(G - G.T).max() > 1e-10 * max(1.0, np.abs(G).max()):
            raise PreconditionError("metric must be symmetric")
        try:
            L = np.linalg.cholesky(G)
        except np.linalg.LinAlgError as exc:
            raise PreconditionError("metric must be positive definite") from exc
        V = np.linalg.inv(L.T)  # columns: G-orthonormal frame
        bb = act(BasisChange(np.linalg.inv(V)), b)
    C = bb.tensor()
    # Gamma[i,j,k] = <nabla_{e_i} e_j, e_k> in the orthonormal frame:
    # 2 Gamma_ijk = C_ijk - C_jki + C_kij
    gamma = 0.5 * (C - np.transpose(C, (2, 0, 1)) + np.transpose(C, (1, 2, 0)))
    # R[i,j,k,l] = <R(e_i,e_j)e_k, e_l>
    term = np.einsum("jkm,iml->ijkl", gamma, gamma)
    riemann = term - np.transpose(term, (1, 0, 2, 3)) - np.einsum(
        "ijm,mkl->ijkl", C, gamma)
    ric_frame = np.einsum("ikli->kl", riemann)
    ric_frame = 0.5 * (ric_frame + ric_frame.T)
    sec = np.einsum("ijji->ij", riemann)
    sec = sec.copy()
    np.fill_diagonal(sec, np.nan)
    ricci = V @ ric_frame @ np.linalg.inv(V)
    return KoszulReport(riemann, sec, ricci, float(np.trace(ric_frame)), V)


def is_ricci_negative(D, b: Bracket, p: MetricParams | None = None):
    """Whether the extension of b by D is Ricci negative in the metric p.

    Returns (flag, lambda_max) where lambda_max is the top eigenvalue of
    the oracle's Ricci operator of the transported pair; the flag is
    lambda_max < -1e-9.
    """
    if p is None:
        p = MetricParams.identity(b.dim)
    Dn, bn = transport_metric(p, D, b)
    full = extension_bracket(Dn, bn)
    rep = koszul_oracle(full)
    lam = float(np.linalg.eigvalsh(0.5 * (rep.ricci + rep.ricci.T)).max())
    return lam < -1e-9, lam
